"""Series-parallel compound CMOS gates.

Construction from boolean expressions, equal-worst-case sizing against a
reference inverter, resistive best/worst delay bounds, common Euler
orderings, and dynamic-node charge sharing.

Sizing follows a recursive budget rule: a network's every conducting
root-to-rail path must add up to the reference device resistance, so a
series node splits its resistance budget equally among its children and
a parallel node hands the full budget to each child.
"""

import itertools
from dataclasses import dataclass, field

from . import boolexpr
from .errors import InputError, SizeError, StructureError

EULER_INPUT_LIMIT = 12


@dataclass(frozen=True)
class Switch:
    name: str
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise InputError(f"switch {self.name!r} needs a positive width")


@dataclass(frozen=True)
class Series:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise StructureError("series node needs >= 2 children")


@dataclass(frozen=True)
class Parallel:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise StructureError("parallel node needs >= 2 children")


def network_inputs(net):
    if isinstance(net, Switch):
        return [net.name]
    out = []
    for c in net.children:
        out.extend(network_inputs(c))
    return out


def network_to_json(net):
    if isinstance(net, Switch):
        return {"input": net.name, "width": net.width}
    key = "series" if isinstance(net, Series) else "parallel"
    return {key: [network_to_json(c) for c in net.children]}


def network_from_json(obj):
    if not isinstance(obj, dict):
        raise StructureError("network node must be an object")
    if "input" in obj:
        return Switch(obj["input"], float(obj.get("width", 1.0)))
    if "series" in obj:
        return Series(tuple(network_from_json(c) for c in obj["series"]))
    if "parallel" in obj:
        return Parallel(tuple(network_from_json(c) for c in obj["parallel"]))
    raise StructureError(f"network node needs input/series/parallel, got {sorted(obj)}")


def evaluate_network(net, assignment) -> bool:
    """True when the switch network conducts under the 0/1 assignment."""
    if isinstance(net, Switch):
        if net.name not in assignment:
            raise InputError(f"assignment misses input {net.name!r}")
        return bool(assignment[net.name])
    if isinstance(net, Series):
        return all(evaluate_network(c, assignment) for c in net.children)
    return any(evaluate_network(c, assignment) for c in net.children)


def _literal_name(e):
    if isinstance(e, boolexpr.Var):
        return e.name
    if isinstance(e, boolexpr.Not) and isinstance(e.arg, boolexpr.Var):
        return e.arg.name + "'"
    return None


def sp_from_expr(expr):
    """Switch tree for an AND/OR expression; complements only at inputs."""
    if isinstance(expr, str):
        expr = boolexpr.parse_expr(expr)
    name = _literal_name(expr)
    if name is not None:
        return Switch(name)
    if isinstance(expr, boolexpr.And):
        return Series(tuple(sp_from_expr(a) for a in expr.args))
    if isinstance(expr, boolexpr.Or):
        return Parallel(tuple(sp_from_expr(a) for a in expr.args))
    raise StructureError(f"not a series-parallel AND/OR expression: {expr!r}")


def dual_network(net):
    if isinstance(net, Switch):
        return net
    children = tuple(dual_network(c) for c in net.children)
    return Parallel(children) if isinstance(net, Series) else Series(children)


def _sized(net, r_budget, unit_width):
    # unit_width / width = resistance in reference units
    if isinstance(net, Switch):
        return Switch(net.name, unit_width / r_budget)
    if isinstance(net, Series):
        share = r_budget / len(net.children)
        return Series(tuple(_sized(c, share, unit_width) for c in net.children))
    return Parallel(tuple(_sized(c, r_budget, unit_width) for c in net.children))


@dataclass(frozen=True)
class CompoundGate:
    pdn: object
    pun: object
    w_n: float = 1.0
    w_p: float = 4.0
    mu: float = 4.0
    name: str = ""
    extras: dict = field(default_factory=dict)

    def pdn_conducts(self, assignment):
        return evaluate_network(self.pdn, assignment)

    def pun_conducts(self, assignment):
        flipped = {k: 0 if v else 1 for k, v in assignment.items()}
        return evaluate_network(self.pun, flipped)

    def widths(self):
        """Per input: (total nmos width, total pmos width)."""
        out = {}
        for net, idx in ((self.pdn, 0), (self.pun, 1)):
            for sw in _switches(net):
                pair = out.setdefault(sw.name, [0.0, 0.0])
                pair[idx] += sw.width
        return {k: tuple(v) for k, v in out.items()}

    def area(self):
        return sum(s.width for s in _switches(self.pdn)) + \
            sum(s.width for s in _switches(self.pun))

    def area_ratio_vs_reference(self):
        return self.area() / (self.w_n + self.w_p)


def _switches(net):
    if isinstance(net, Switch):
        yield net
    else:
        for c in net.children:
            yield from _switches(c)


def compound_gate(expr, reference=(1.0, 4.0), mu=4.0, check_duality=True) -> CompoundGate:
    """Build and size the PDN/PUN pair realizing the complement of ``expr``.

    ``reference`` is the (w_n, w_p) of the equal-delay reference inverter;
    series paths are sized so their total resistance matches the matching
    reference device.
    """
    w_n, w_p = reference
    if w_n <= 0 or w_p <= 0 or mu <= 0:
        raise InputError("reference widths and mu must be positive")
    shape = sp_from_expr(expr)
    pdn = _sized(shape, 1.0, w_n)                      # budget: R of ref nmos
    pun_budget = mu * w_n / w_p                        # ref pull-up R, nmos units
    pun = _sized(dual_network(shape), pun_budget, mu * w_n)
    gate = CompoundGate(pdn=pdn, pun=pun, w_n=w_n, w_p=w_p, mu=mu)
    if check_duality:
        names = sorted(set(network_inputs(pdn)))
        if len(names) <= 16:
            for bits in itertools.product((0, 1), repeat=len(names)):
                a = dict(zip(names, bits))
                if gate.pdn_conducts(a) == gate.pun_conducts(a):
                    raise StructureError(f"PDN/PUN not complementary at {a}")
    return gate


# --- resistive delay bounds -----------------------------------------------

def _resistance(net, assignment, rho):
    # None means non-conducting
    if isinstance(net, Switch):
        return rho / net.width if assignment[net.name] else None
    if isinstance(net, Series):
        total = 0.0
        for c in net.children:
            r = _resistance(c, assignment, rho)
            if r is None:
                return None
            total += r
        return total
    conductance = 0.0
    for c in net.children:
        r = _resistance(c, assignment, rho)
        if r is not None:
            conductance += 1.0 / r
    return 1.0 / conductance if conductance else None


def resistance_bounds(net, rho=1.0):
    """(worst, best) conduction resistance over all conducting assignments."""
    names = sorted(set(network_inputs(net)))
    if len(names) > 18:
        raise SizeError(f"{len(names)} inputs exceeds the enumeration bound")
    worst = best = None
    for bits in itertools.product((0, 1), repeat=len(names)):
        r = _resistance(net, dict(zip(names, bits)), rho)
        if r is None:
            continue
        worst = r if worst is None else max(worst, r)
        best = r if best is None else min(best, r)
    if worst is None:
        raise StructureError("network never conducts")
    return worst, best


def delay_bounds(gate: CompoundGate, c_l=1.0) -> dict:
    """Resistive-model delay extremes, in units of R_ref * C_L.

    Fall delays discharge through the PDN, rise delays charge through the
    PUN; worst case turns on a single maximum-resistance path, best case
    the strongest parallel combination.
    """
    fall_worst, fall_best = resistance_bounds(gate.pdn, rho=gate.w_n)
    rise_worst, rise_best = resistance_bounds(gate.pun, rho=gate.mu * gate.w_n)
    return {
        "fall": {"worst": fall_worst * c_l, "best": fall_best * c_l},
        "rise": {"worst": rise_worst * c_l, "best": rise_best * c_l},
        "ratios": {"fall": fall_worst / fall_best, "rise": rise_worst / rise_best},
    }


# --- Euler orderings ------------------------------------------------------

def network_graph(net):
    """Edge list (u, v, input name) with integer nodes; 0 and 1 are the rails."""
    edges = []
    counter = itertools.count(2)

    def build(n, top, bot):
        if isinstance(n, Switch):
            edges.append((top, bot, n.name))
        elif isinstance(n, Parallel):
            for c in n.children:
                build(c, top, bot)
        else:
            nodes = [top] + [next(counter) for _ in n.children[:-1]] + [bot]
            for c, (u, v) in zip(n.children, itertools.pairwise(nodes)):
                build(c, u, v)

    build(net, 0, 1)
    return edges


def euler_ordering_valid(net, ordering) -> bool:
    """Independent check: can ``ordering`` be walked edge-by-edge in the graph?"""
    edges = network_graph(net)
    if sorted(ordering) != sorted(label for _, _, label in edges):
        return False

    def walk(at, remaining, idx):
        if idx == len(ordering):
            return True
        for i, (u, v, label) in enumerate(remaining):
            if label != ordering[idx]:
                continue
            nxt = remaining[:i] + remaining[i + 1:]
            if u == at and walk(v, nxt, idx + 1):
                return True
            if v == at and walk(u, nxt, idx + 1):
                return True
        return False

    nodes = {n for u, v, _ in edges for n in (u, v)}
    return any(walk(start, edges, 0) for start in sorted(nodes))


def common_euler_ordering(gate: CompoundGate):
    """Deterministic search for one input ordering that is an Euler path of
    both the PDN and PUN graphs, or None when no such ordering exists."""
    n_inputs = len(set(network_inputs(gate.pdn)))
    if n_inputs > EULER_INPUT_LIMIT:
        raise SizeError(f"{n_inputs} inputs exceeds the Euler search bound")
    pdn_edges = network_graph(gate.pdn)
    pun_edges = network_graph(gate.pun)
    if sorted(l for _, _, l in pdn_edges) != sorted(l for _, _, l in pun_edges):
        return None
    total = len(pdn_edges)

    def moves(edges, used, at, label=None):
        for i, (u, v, lbl) in enumerate(edges):
            if used[i] or (label is not None and lbl != label):
                continue
            if u == at:
                yield i, v, lbl
            elif v == at:
                yield i, u, lbl

    def search(p_at, q_at, p_used, q_used, seq):
        if len(seq) == total:
            return list(seq)
        for pi, p_next, label in sorted(moves(pdn_edges, p_used, p_at),
                                        key=lambda m: m[2]):
            for qi, q_next, _ in moves(pun_edges, q_used, q_at, label):
                p_used[pi] = q_used[qi] = True
                seq.append(label)
                found = search(p_next, q_next, p_used, q_used, seq)
                if found:
                    return found
                seq.pop()
                p_used[pi] = q_used[qi] = False
        return None

    pdn_nodes = sorted({n for u, v, _ in pdn_edges for n in (u, v)})
    pun_nodes = sorted({n for u, v, _ in pun_edges for n in (u, v)})
    for p_start in pdn_nodes:
        for q_start in pun_nodes:
            found = search(p_start, q_start,
                           [False] * total, [False] * total, [])
            if found:
                return found
    return None


# --- charge sharing -------------------------------------------------------

@dataclass(frozen=True)
class ChargeShareCase:
    c_out: float
    c_exposed: tuple
    v_dd: float = 1.0
    v_internal_init: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c_exposed", tuple(self.c_exposed))
        if self.c_out <= 0:
            raise InputError("c_out must be positive")
        if any(c < 0 for c in self.c_exposed):
            raise InputError("exposed capacitances must be >= 0")


def charge_share_voltage(case: ChargeShareCase) -> float:
    """Final voltage of a precharged node after charge redistribution."""
    c_total = case.c_out + sum(case.c_exposed)
    charge = case.c_out * case.v_dd + sum(case.c_exposed) * case.v_internal_init
    return charge / c_total
