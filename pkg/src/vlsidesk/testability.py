"""Test-logic utilities: modular (Galois) LFSRs from characteristic
polynomials, small gate-netlist simulation, serial stuck-at fault
simulation, and exhaustive ATPG."""

import itertools
from dataclasses import dataclass, field

from .errors import InputError, NetlistError, SizeError

ATPG_INPUT_LIMIT = 20


@dataclass(frozen=True)
class GfPolynomial:
    """Coefficient bits c_0..c_n over GF(2), c_0 = c_n = 1 for LFSR use."""
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) & 1 for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise InputError("polynomial needs degree >= 1")
        if self.coeffs[0] != 1:
            raise InputError("c_0 must be 1 for an LFSR polynomial")
        if self.coeffs[-1] != 1:
            raise InputError("leading coefficient c_n must be 1")

    @classmethod
    def from_powers(cls, powers):
        degree = max(powers)
        coeffs = [0] * (degree + 1)
        for p in powers:
            coeffs[p] = 1
        return cls(tuple(coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class Lfsr:
    """Modular (Galois) LFSR: bit 0 takes the feedback, an XOR sits in
    front of stage i wherever c_i = 1 (0 < i < n)."""
    poly: GfPolynomial
    taps: tuple = field(init=False)
    matrix: tuple = field(init=False)

    def __post_init__(self):
        n = self.poly.degree
        taps = tuple(i for i in range(1, n) if self.poly.coeffs[i])
        object.__setattr__(self, "taps", taps)
        m = [[0] * n for _ in range(n)]
        m[0][n - 1] = 1
        for i in range(1, n):
            m[i][i - 1] = 1
            if i in taps:
                m[i][n - 1] ^= 1
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in m))

    @property
    def n(self):
        return self.poly.degree

    def step(self, state: int) -> int:
        fb = (state >> (self.n - 1)) & 1
        nxt = ((state << 1) | fb) & ((1 << self.n) - 1)
        if fb:
            for t in self.taps:
                nxt ^= 1 << t
        return nxt

    def step_matrix(self, state: int) -> int:
        bits = [(state >> i) & 1 for i in range(self.n)]
        out = 0
        for i, row in enumerate(self.matrix):
            v = 0
            for j, m in enumerate(row):
                v ^= m & bits[j]
            out |= v << i
        return out


def lfsr_build(poly: GfPolynomial) -> Lfsr:
    """Modular LFSR with XOR taps at the polynomial's nonzero middle terms."""
    return Lfsr(poly)


def lfsr_run(lfsr: Lfsr, seed: int, steps: int) -> dict:
    """State sequence from ``seed`` plus its period (first recurrence of
    the seed, searched up to 2^n steps)."""
    if steps < 0:
        raise InputError("steps must be >= 0")
    mask = (1 << lfsr.n) - 1
    seed &= mask
    states = [seed]
    s = seed
    for _ in range(steps):
        s = lfsr.step(s)
        states.append(s)
    period = None
    s = seed
    for i in range(1, (1 << lfsr.n) + 1):
        s = lfsr.step(s)
        if s == seed:
            period = i
            break
    return {"states": states, "period": period}


_GATE_FUNCS = {
    "and": lambda ins: all(ins),
    "or": lambda ins: any(ins),
    "nand": lambda ins: not all(ins),
    "nor": lambda ins: not any(ins),
    "xor": lambda ins: sum(ins) % 2 == 1,
    "xnor": lambda ins: sum(ins) % 2 == 0,
    "not": lambda ins: not ins[0],
    "buf": lambda ins: bool(ins[0]),
}


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple
    output: str

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.kind not in _GATE_FUNCS:
            raise NetlistError(f"unknown gate kind {self.kind!r}")
        if self.kind in ("not", "buf") and len(self.inputs) != 1:
            raise NetlistError(f"{self.kind} takes exactly one input")
        if self.kind not in ("not", "buf") and len(self.inputs) < 2:
            raise NetlistError(f"{self.kind} needs at least two inputs")


@dataclass(frozen=True)
class GateNetlist:
    inputs: tuple
    gates: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "gates",
                           tuple(g if isinstance(g, Gate) else Gate(**g)
                                 for g in self.gates))
        driven = set(self.inputs)
        for g in self.gates:
            if g.output in driven:
                raise NetlistError(f"net {g.output!r} driven more than once")
            driven.add(g.output)
        for g in self.gates:
            for net in g.inputs:
                if net not in driven:
                    raise NetlistError(f"net {net!r} is never driven")
        for net in self.outputs:
            if net not in driven:
                raise NetlistError(f"output net {net!r} is never driven")
        self._toposort()

    def _toposort(self):
        order, ready = [], set(self.inputs)
        pending = list(self.gates)
        while pending:
            progress = [g for g in pending if all(i in ready for i in g.inputs)]
            if not progress:
                raise NetlistError("combinational cycle in netlist")
            for g in progress:
                order.append(g)
                ready.add(g.output)
            pending = [g for g in pending if g not in progress]
        object.__setattr__(self, "_order", tuple(order))

    def nets(self):
        return tuple(self.inputs) + tuple(g.output for g in self.gates)

    @classmethod
    def from_json(cls, obj):
        return cls(inputs=tuple(obj["inputs"]),
                   gates=tuple(Gate(kind=g["kind"], inputs=tuple(g["inputs"]),
                                    output=g["output"]) for g in obj["gates"]),
                   outputs=tuple(obj["outputs"]))


@dataclass(frozen=True)
class StuckFault:
    net: str
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise InputError("stuck value must be 0 or 1")

    def label(self):
        return f"{self.net}/SA{self.value}"


def logic_simulate(net: GateNetlist, vector, fault: StuckFault = None) -> dict:
    """Topological evaluation of all nets; an optional fault pins one net."""
    if isinstance(vector, (list, tuple)):
        if len(vector) != len(net.inputs):
            raise InputError("vector length does not match the inputs")
        values = {n: bool(v) for n, v in zip(net.inputs, vector)}
    else:
        missing = [n for n in net.inputs if n not in vector]
        if missing:
            raise InputError(f"vector misses inputs {missing}")
        values = {n: bool(vector[n]) for n in net.inputs}
    if fault is not None and fault.net not in net.nets():
        raise InputError(f"fault net {fault.net!r} does not exist")

    def pin(name, v):
        if fault is not None and name == fault.net:
            return bool(fault.value)
        return v

    for name in net.inputs:
        values[name] = pin(name, values[name])
    for g in net._order:
        values[g.output] = pin(g.output, _GATE_FUNCS[g.kind](
            [values[i] for i in g.inputs]))
    return {"outputs": {o: int(values[o]) for o in net.outputs},
            "nets": {k: int(v) for k, v in values.items()}}


def fault_simulate(net: GateNetlist, vectors, faults) -> list:
    """Serial fault simulation: for each vector, the set of faults whose
    faulty response differs from the good one at any primary output."""
    results = []
    for vec in vectors:
        good = logic_simulate(net, vec)["outputs"]
        detected = [f.label() for f in faults
                    if logic_simulate(net, vec, fault=f)["outputs"] != good]
        results.append({"vector": list(vec) if not isinstance(vec, dict) else dict(vec),
                        "detected": detected})
    return results


def atpg_exhaustive(net: GateNetlist, fault: StuckFault) -> dict:
    """Lexicographically smallest detecting vector (inputs in declaration
    order), or untestable when the whole space exposes nothing."""
    n = len(net.inputs)
    if n > ATPG_INPUT_LIMIT:
        raise SizeError(f"{n} inputs exceeds the exhaustive ATPG bound")
    for bits in itertools.product((0, 1), repeat=n):
        good = logic_simulate(net, bits)["outputs"]
        bad = logic_simulate(net, bits, fault=fault)["outputs"]
        if good != bad:
            return {"testable": True, "vector": list(bits)}
    return {"testable": False, "vector": None}
