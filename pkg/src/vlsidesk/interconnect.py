"""RC interconnect: Elmore delay on trees, wire extraction, repeater
insertion, optimal inverter chains, and inverter output slew."""

import math
from dataclasses import dataclass, field

from .device import MosDevice, square_law_current, threshold_voltage
from .errors import DomainError, InputError

_REL_TOL = 1e-9


@dataclass
class RcTree:
    """Rooted RC tree: each non-root node hangs off its parent through a
    resistance; every node may carry a grounded capacitance."""

    root: str
    parent: dict = field(default_factory=dict)      # node -> (parent, r_edge)
    cap: dict = field(default_factory=dict)         # node -> farads

    @classmethod
    def from_edges(cls, root, edges, caps=None):
        tree = cls(root=root)
        for parent, child, r in edges:
            tree.add_edge(parent, child, r)
        for node, c in (caps or {}).items():
            tree.set_cap(node, c)
        return tree

    def add_edge(self, parent, child, r):
        if r < 0:
            raise InputError(f"edge {parent}->{child} has negative resistance")
        if child == self.root or child in self.parent:
            raise InputError(f"node {child!r} already has a parent (tree must be acyclic)")
        self.parent[child] = (parent, float(r))
        return self

    def set_cap(self, node, c):
        if c < 0:
            raise InputError(f"node {node!r} has negative capacitance")
        self.cap[node] = float(c)
        return self

    def nodes(self):
        seen = {self.root, *self.parent}
        for p, _ in self.parent.values():
            seen.add(p)
        return seen

    def path_to_root(self, node):
        """Edges (parent, child, r) from ``node`` up to the root."""
        path = []
        seen = set()
        while node != self.root:
            if node not in self.parent or node in seen:
                raise InputError(f"node {node!r} is not connected to the root")
            seen.add(node)
            p, r = self.parent[node]
            path.append((p, node, r))
            node = p
        return path

    def downstream_cap(self, node):
        children = {}
        for child, (p, _) in self.parent.items():
            children.setdefault(p, []).append(child)
        total = self.cap.get(node, 0.0)
        for child in children.get(node, ()):
            total += self.downstream_cap(child)
        return total


def _elmore_resistance_form(tree, sink):
    return sum(r * tree.downstream_cap(child)
               for _, child, r in tree.path_to_root(sink))


def _elmore_capacitance_form(tree, sink):
    sink_edges = {(p, c) for p, c, _ in tree.path_to_root(sink)}
    tau = 0.0
    for node in tree.nodes():
        c = tree.cap.get(node, 0.0)
        if not c:
            continue
        shared = sum(r for p, ch, r in tree.path_to_root(node)
                     if (p, ch) in sink_edges)
        tau += c * shared
    return tau


def elmore(tree: RcTree, sink, scale="tau") -> float:
    """First-moment delay from the root step to ``sink``.

    Computed with both the resistance-oriented and shared-path-resistance
    accumulations, which must agree; ``scale=0.69`` applies the usual
    50%-crossing factor.
    """
    if sink != tree.root and sink not in tree.parent:
        raise InputError(f"unknown sink {sink!r}")
    tau_r = _elmore_resistance_form(tree, sink)
    tau_c = _elmore_capacitance_form(tree, sink)
    if abs(tau_r - tau_c) > _REL_TOL * max(abs(tau_r), abs(tau_c), 1e-30):
        raise AssertionError(f"Elmore accumulation mismatch: {tau_r} vs {tau_c}")
    factor = 0.69 if scale in (0.69, "0.69") else 1.0
    if scale not in ("tau", 0.69, "0.69"):
        raise InputError(f"scale must be 'tau' or 0.69, not {scale!r}")
    return tau_r * factor


@dataclass(frozen=True)
class WireSpec:
    length: float                   # consistent length unit L
    width: float                    # L
    r_sheet: float                  # ohm/sq
    c_area: float = 0.0             # F/L^2
    c_fringe_per_edge: float = 0.0  # F/L
    fringe_edges: int = 2

    def __post_init__(self):
        if self.length < 0 or self.width <= 0:
            raise InputError("wire needs length >= 0 and width > 0")


def wire_rc(spec: WireSpec) -> dict:
    """Total wire resistance and capacitance (area plate + fringe)."""
    r = spec.r_sheet * spec.length / spec.width
    c = spec.c_area * spec.length * spec.width \
        + spec.c_fringe_per_edge * spec.length * spec.fringe_edges
    return {"r": r, "c": c}


@dataclass(frozen=True)
class FixedDelay:
    delay: float

    def __post_init__(self):
        if self.delay < 0:
            raise InputError("buffer delay must be >= 0")


@dataclass(frozen=True)
class RcDriver:
    r_drive: float
    c_diff_out: float = 0.0
    c_gate_in: float = 0.0

    def __post_init__(self):
        if min(self.r_drive, self.c_diff_out, self.c_gate_in) < 0:
            raise InputError("driver parameters must be >= 0")


def _segment_sweep(n):
    if isinstance(n, int):
        return [n]
    return sorted(set(int(k) for k in n))


def buffered_wire_delay(wire: WireSpec, n_buffers, buffer, driver=None,
                        load_c=0.0, wire_delay_coeff=1.0) -> dict:
    """Delay of a wire split by ``n`` identical buffers into n+1 segments.

    With ``FixedDelay`` buffers each segment contributes
    ``coeff * R_seg * C_seg`` and each buffer its fixed delay. With
    ``RcDriver`` buffers the full RC composition is used: the driving
    stage charges its own diffusion, the segment cap, and the next gate;
    the segment resistance then charges the segment cap (lumped at its
    far end) plus the next gate. Optimum is the smallest arg-min of the
    sweep.
    """
    total = wire_rc(wire)
    r_tot, c_tot = total["r"], total["c"]
    delays = {}
    for n in _segment_sweep(n_buffers):
        if n < 0:
            raise InputError("buffer count must be >= 0")
        segs = n + 1
        r_seg, c_seg = r_tot / segs, c_tot / segs
        if isinstance(buffer, FixedDelay):
            delays[n] = segs * wire_delay_coeff * r_seg * c_seg + n * buffer.delay
        elif isinstance(buffer, RcDriver):
            t = 0.0
            for i in range(segs):
                drv = driver if (i == 0 and driver is not None) else buffer
                c_next = buffer.c_gate_in if i < n else load_c
                t += drv.r_drive * (drv.c_diff_out + c_seg + c_next) \
                    + r_seg * (c_seg + c_next)
            delays[n] = t
        else:
            raise InputError("buffer must be FixedDelay or RcDriver")
    best = min(delays, key=lambda n: (delays[n], n))
    return {"delays": delays, "optimal_n": best, "optimal_delay": delays[best]}


def inverter_chain_plan(f: float, cd_over_cg: float = 1.0) -> dict:
    """Stage ratio and inverter count driving a load ``f`` times the input.

    The optimum per-stage ratio alpha solves alpha*(ln alpha - 1) = Cd/Cg;
    the chain length is log_alpha(f) rounded up (never below one
    inverter).
    """
    if f < 1:
        raise InputError("load ratio f must be >= 1")
    if cd_over_cg < 0:
        raise InputError("cd_over_cg must be >= 0")
    lo, hi = 1.0 + 1e-12, 1e6
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if mid * (math.log(mid) - 1.0) < cd_over_cg:
            lo = mid
        else:
            hi = mid
    alpha = 0.5 * (lo + hi)
    total = max(1, math.ceil(math.log(f) / math.log(alpha) - 1e-9))
    return {"alpha": alpha, "total_inverters": total}


def output_slew(dev: MosDevice, c_load: float, v_dd: float,
                v_from_pct: float = 0.9, v_to_pct: float = 0.1,
                method: str = "acc", i_avg: float = None) -> float:
    """Falling-output transition time between two V_DD fractions.

    ``acc`` divides the charge by the mean of the endpoint currents,
    ``diff`` integrates C*dV/I(V) exactly across the saturation and
    linear regions, ``avg_current`` uses a supplied mean current.
    """
    if not 0.0 < v_to_pct < v_from_pct <= 1.0:
        raise InputError("need 0 < v_to_pct < v_from_pct <= 1")
    if c_load <= 0 or v_dd <= 0:
        raise InputError("c_load and v_dd must be positive")
    v_hi, v_lo = v_from_pct * v_dd, v_to_pct * v_dd
    if method == "avg_current":
        if not i_avg or i_avg <= 0:
            raise InputError("avg_current method needs a positive i_avg")
        return c_load * (v_hi - v_lo) / i_avg

    k = dev.k_prime * dev.wl_ratio
    v_ov = v_dd - abs(threshold_voltage(dev, 0.0))
    if v_ov <= 0:
        raise DomainError("device is off for the whole transition (v_dd <= |v_t|)")

    def current(v):
        return square_law_current(k, v_ov, v)

    if method == "acc":
        i_mean = 0.5 * (current(v_hi) + current(v_lo))
        if i_mean <= 0:
            raise DomainError("no discharge current at either endpoint")
        return c_load * (v_hi - v_lo) / i_mean
    if method == "diff":
        t = 0.0
        if v_hi > v_ov:  # constant saturation current above v_ov
            t += c_load * (v_hi - max(v_lo, v_ov)) / current(v_hi)
        top = min(v_hi, v_ov)
        if v_lo < top:   # closed-form 1/I integral through the linear region
            a = v_ov
            t += c_load / (k * a) * (math.log(top / (2 * a - top))
                                     - math.log(v_lo / (2 * a - v_lo)))
        return t
    raise InputError(f"unknown slew method {method!r}")
