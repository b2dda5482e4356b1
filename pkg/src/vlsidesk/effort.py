"""Logical effort: template derivation from sized gates, closed-form
NAND/NOR efforts, path delay and stage-count optimization, size
back-propagation, and two-branch fork design.

All capacitances are in units of the gate capacitance of a minimum-width
transistor (C_g); device widths double as C_g counts. Resistances are in
units of the minimum-width nMOS channel resistance.
"""

import itertools
import math
from dataclasses import dataclass

from .errors import DesignError, InputError
from .gates import (
    CompoundGate,
    Parallel,
    Switch,
    _resistance,
    network_inputs,
)

RHO_DEFAULT = 3.59  # optimum stage effort for p_inv = 1, Cd = Cg


@dataclass(frozen=True)
class PullupLoad:
    """Always-on pMOS load (ratioed/pseudo-nMOS style pull-up)."""
    width: float = 1.0


@dataclass(frozen=True)
class GateTemplate:
    name: str
    g_rise: dict
    g_fall: dict
    p_rise: float
    p_fall: float
    c_in: dict

    def g(self, inp, transition=None):
        gr, gf = self.g_rise[inp], self.g_fall[inp]
        if transition == "rise":
            return gr
        if transition == "fall":
            return gf
        if abs(gr - gf) > 1e-12 * max(abs(gr), abs(gf), 1.0):
            raise InputError(
                f"{self.name or 'gate'} input {inp} is asymmetric "
                f"(g_rise={gr:.4g}, g_fall={gf:.4g}); pick a transition")
        return gr

    def p(self, transition=None):
        if transition == "rise":
            return self.p_rise
        if transition == "fall":
            return self.p_fall
        return max(self.p_rise, self.p_fall)

    def stage(self, inp, b=1.0, transition=None):
        return Stage(g=self.g(inp, transition), p=self.p(transition), b=b,
                     name=self.name)

    @classmethod
    def symmetric(cls, name, g, p, c_in=1.0, inputs=("a",)):
        return cls(name=name, g_rise={i: g for i in inputs},
                   g_fall={i: g for i in inputs}, p_rise=p, p_fall=p,
                   c_in={i: c_in for i in inputs})


def _pull_resistances(drive_net, oppose, mu, rho_drive):
    """Worst-case drive resistance per critical input and overall.

    Iterates over the on/off space of the driving network's switches
    (``rho_drive`` is 1 for nmos nets, mu for pmos nets); the opposing
    side (dual network evaluated on complemented inputs, or an always-on
    load) subtracts conductance when it fights the transition.
    """
    names = sorted(set(network_inputs(drive_net)))
    per_input, overall = {}, None
    for bits in itertools.product((0, 1), repeat=len(names)):
        a = dict(zip(names, bits))
        r_drive = _resistance(drive_net, a, rho_drive)
        if r_drive is None:
            continue
        g_eff = 1.0 / r_drive
        if isinstance(oppose, PullupLoad):
            g_eff -= oppose.width / mu
        elif oppose is not None:
            flipped = {k: 1 - v for k, v in a.items()}
            rho_opp = mu if rho_drive == 1.0 else 1.0
            r_opp = _resistance(oppose, flipped, rho_opp)
            if r_opp is not None:
                g_eff -= 1.0 / r_opp
        if g_eff <= 0:
            continue  # this setting cannot complete the transition
        r_eff = 1.0 / g_eff
        overall = r_eff if overall is None else max(overall, r_eff)
        for x in names:
            if not a[x]:
                continue
            if _resistance(drive_net, {**a, x: 0}, rho_drive) is not None:
                continue  # x is not the deciding switch here
            per_input[x] = max(per_input.get(x, 0.0), r_eff)
    return per_input, overall


def _output_adjacent_width(net):
    if isinstance(net, Switch):
        return net.width
    if isinstance(net, Parallel):
        return sum(_output_adjacent_width(c) for c in net.children)
    return _output_adjacent_width(net.children[0])


def _input_caps(gate):
    caps = {}
    nets = [gate.pdn] + ([] if isinstance(gate.pun, PullupLoad) else [gate.pun])
    for net in nets:
        stack = [net]
        while stack:
            n = stack.pop()
            if isinstance(n, Switch):
                caps[n.name] = caps.get(n.name, 0.0) + n.width
            else:
                stack.extend(n.children)
    return caps


def derive_template(gate: CompoundGate, reference: CompoundGate,
                    cd_over_cg: float = 1.0, name: str = "") -> GateTemplate:
    """Per-input logical effort and parasitic delay of a sized gate.

    Normalizes drive-resistance * input-capacitance against the reference
    gate (its per-input C_in times its worst pull-down resistance). The
    parasitic term counts only devices whose drains touch the output
    node, weighted by ``cd_over_cg``.
    """
    mu = gate.mu
    fall_r, fall_worst = _pull_resistances(gate.pdn, gate.pun, mu, 1.0)
    if isinstance(gate.pun, PullupLoad):
        r_up = mu / gate.pun.width
        rise_r = {x: r_up for x in _input_caps(gate)}
        rise_worst = r_up
    else:
        rise_r, rise_worst = _pull_resistances(gate.pun, gate.pdn, mu, mu)

    ref_caps = _input_caps(reference)
    ref_c_in = next(iter(ref_caps.values()))
    _, ref_r = _pull_resistances(reference.pdn, None, reference.mu, 1.0)
    norm = ref_r * ref_c_in

    caps = _input_caps(gate)
    c_par = _output_adjacent_width(gate.pdn)
    if isinstance(gate.pun, PullupLoad):
        c_par += gate.pun.width
    else:
        c_par += _output_adjacent_width(gate.pun)

    g_rise, g_fall = {}, {}
    for x, c in caps.items():
        if x in rise_r:
            g_rise[x] = rise_r[x] * c / norm
        if x in fall_r:
            g_fall[x] = fall_r[x] * c / norm
    for x in caps:  # inputs that never decide a transition inherit the worst case
        g_rise.setdefault(x, rise_worst * caps[x] / norm if rise_worst else float("nan"))
        g_fall.setdefault(x, fall_worst * caps[x] / norm if fall_worst else float("nan"))
    return GateTemplate(
        name=name, g_rise=g_rise, g_fall=g_fall,
        p_rise=rise_worst * c_par * cd_over_cg / norm,
        p_fall=fall_worst * c_par * cd_over_cg / norm,
        c_in=caps,
    )


def nand_nor_effort(n: int, mu: float) -> dict:
    """Closed-form NAND/NOR logical efforts for an n-input gate."""
    if n < 1 or mu <= 0:
        raise InputError("need n >= 1 and mu > 0")
    nand_per = (n + mu) / (1 + mu)
    nor_per = (1 + n * mu) / (1 + mu)
    return {
        "nand": {"per_input": nand_per, "total": n * nand_per},
        "nor": {"per_input": nor_per, "total": n * nor_per},
    }


@dataclass(frozen=True)
class Stage:
    g: float
    p: float
    b: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.g <= 0 or self.b < 1:
            raise InputError("stage needs g > 0 and branching >= 1")


@dataclass(frozen=True)
class PathSpec:
    stages: tuple
    c_in: float
    c_load: float

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise InputError("path needs at least one stage")
        if self.c_in <= 0 or self.c_load <= 0:
            raise InputError("c_in and c_load must be positive")

    @property
    def h(self):
        return self.c_load / self.c_in


def path_delay(path: PathSpec) -> dict:
    """Equal-stage-effort delay: F = G*B*H, D = N*F^(1/N) + sum(p)."""
    g = math.prod(s.g for s in path.stages)
    b = math.prod(s.b for s in path.stages)
    h = path.h
    f = g * b * h
    n = len(path.stages)
    f_hat = f ** (1.0 / n)
    p_total = sum(s.p for s in path.stages)
    return {
        "G": g, "B": b, "H": h, "F": f, "N": n,
        "f_hat": f_hat, "p_total": p_total,
        "d_hat": n * f_hat + p_total,
        "stage_efforts": [f_hat] * n,
    }


def size_stages(path: PathSpec, f_hat: float = None) -> list:
    """Back-propagated per-stage input capacitances at equal stage effort."""
    if f_hat is None:
        f_hat = path_delay(path)["f_hat"]
    caps = [0.0] * len(path.stages)
    c_next = path.c_load
    for i in range(len(path.stages) - 1, -1, -1):
        s = path.stages[i]
        caps[i] = s.g * s.b * c_next / f_hat
        c_next = caps[i]
    return caps


def _parity_ok(n, polarity):
    if polarity == "any":
        return True
    if polarity == "non_inverting":
        return n % 2 == 0
    if polarity == "inverting":
        return n % 2 == 1
    raise InputError(f"unknown polarity constraint {polarity!r}")


def optimize_path(path: PathSpec, allow_added_inverters: bool = True,
                  polarity: str = "any", rho: float = RHO_DEFAULT,
                  p_inv: float = 1.0) -> dict:
    """Pick the stage count (appending reference inverters) minimizing D.

    Candidate counts are the original length plus the neighborhood of
    log_rho(F), filtered by the polarity constraint (all path gates are
    taken as inverting, so polarity pins the parity of N). Ties go to the
    fewest stages.
    """
    base = path_delay(path)
    f, n0 = base["F"], base["N"]
    candidates = set()
    if _parity_ok(n0, polarity):
        candidates.add(n0)
    if allow_added_inverters:
        n_star = round(math.log(f) / math.log(rho)) if f > 1 else n0
        for k in (n_star - 1, n_star, n_star + 1):
            if k >= n0 and _parity_ok(k, polarity):
                candidates.add(k)
    if not candidates:
        k = n0
        while not _parity_ok(k, polarity):
            k += 1
        candidates.add(k)

    def d_of(k):
        return k * f ** (1.0 / k) + base["p_total"] + (k - n0) * p_inv

    best = min(sorted(candidates), key=lambda k: (d_of(k), k))
    stages = list(path.stages) + [Stage(g=1.0, p=p_inv, name="inv")] * (best - n0)
    final = PathSpec(stages=tuple(stages), c_in=path.c_in, c_load=path.c_load)
    result = path_delay(final)
    return {
        "n": best, "added_inverters": best - n0, "d": result["d_hat"],
        "f_hat": result["f_hat"], "stage_caps": size_stages(final),
        "candidates": {k: d_of(k) for k in sorted(candidates)},
    }


@dataclass(frozen=True)
class ForkSpec:
    """Two-branch amplifying fork: the branches differ in length by one
    inverter (m+1 vs m) so the outputs have opposite polarity."""
    c_in_total: float
    branch_load: float
    m: int = 0          # short-branch length; 0 = choose automatically
    p_inv: float = 1.0

    def __post_init__(self):
        if self.c_in_total <= 0 or self.branch_load <= 0:
            raise DesignError("fork needs positive input cap and loads")


def _fork_delays(m, x, spec):
    long_d = (m + 1) * (spec.branch_load / x) ** (1.0 / (m + 1)) + (m + 1) * spec.p_inv
    short_d = m * (spec.branch_load / (spec.c_in_total - x)) ** (1.0 / m) + m * spec.p_inv
    return long_d, short_d


def design_fork(spec: ForkSpec, rho: float = RHO_DEFAULT, tol: float = 1e-3) -> dict:
    """Split the input capacitance between the two branches so their
    delays match (bisection to |dD| < tol); branch length from the
    log_rho estimate +/- 1, smallest worst-case delay wins."""
    if spec.m:
        candidates = [spec.m]
    else:
        m0 = math.log(2.0 * spec.branch_load / spec.c_in_total) / math.log(rho)
        candidates = sorted({max(1, round(m0) - 1), max(1, round(m0)),
                             max(1, round(m0) + 1)})
    best = None
    for m in candidates:
        lo, hi = 1e-9 * spec.c_in_total, (1 - 1e-9) * spec.c_in_total
        x = 0.5 * spec.c_in_total
        for _ in range(200):
            x = 0.5 * (lo + hi)
            long_d, short_d = _fork_delays(m, x, spec)
            if abs(long_d - short_d) < tol:
                break
            if long_d > short_d:
                lo = x
            else:
                hi = x
        else:
            raise DesignError(f"fork split did not converge for m={m}")
        d_fork = max(long_d, short_d)
        if best is None or d_fork < best["d_fork"] - 1e-12:
            f_long = (spec.branch_load / x) ** (1.0 / (m + 1))
            x_short = spec.c_in_total - x
            f_short = (spec.branch_load / x_short) ** (1.0 / m)
            best = {
                "m": m, "x": x, "x_short": x_short, "d_fork": d_fork,
                "f_long": f_long, "f_short": f_short,
                "long_caps": [x * f_long ** i for i in range(m + 1)],
                "short_caps": [x_short * f_short ** i for i in range(m)],
            }
    return best


def transition_chain(templates_inputs, output_transition):
    """Stage views for a specified output transition, alternating rise and
    fall backwards through inverting stages."""
    n = len(templates_inputs)
    stages = []
    for i, (tpl, inp, b) in enumerate(templates_inputs):
        # stage i output transition: alternates, ending at output_transition
        flips = n - 1 - i
        tr = output_transition
        if flips % 2 == 1:
            tr = "fall" if output_transition == "rise" else "rise"
        stages.append(tpl.stage(inp, b=b, transition=tr))
    return tuple(stages)
