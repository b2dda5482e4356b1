"""Switching-activity and power estimation: exact signal probabilities,
dynamic/short-circuit/leakage/adiabatic power, supply-scaling factors,
bus splitting, and gray-code transition accounting."""

import itertools
import math
from dataclasses import dataclass

from . import boolexpr
from .errors import InputError, SizeError

ENUMERATION_LIMIT = 24


@dataclass(frozen=True)
class PowerEnv:
    v_dd: float
    f_clk: float
    v_swing: float = 0.0  # defaults to v_dd

    def __post_init__(self):
        if self.v_dd <= 0 or self.f_clk <= 0:
            raise InputError("v_dd and f_clk must be positive")
        if self.v_swing == 0.0:
            object.__setattr__(self, "v_swing", self.v_dd)
        if not 0 < self.v_swing <= self.v_dd:
            raise InputError("need 0 < v_swing <= v_dd")


@dataclass(frozen=True)
class LoadPoint:
    c: float
    beta: float          # transitions per cycle (both directions)

    def __post_init__(self):
        if self.c < 0:
            raise InputError("capacitance must be >= 0")
        if not 0 <= self.beta <= 2:
            raise InputError("activity must be within [0, 2] transitions/cycle")


def signal_probability(expr, probabilities) -> dict:
    """Exact output probability by summing minterm probabilities, plus the
    random-cycle activity beta = 2 p (1-p). Inputs are taken spatially and
    temporally independent."""
    if isinstance(expr, str):
        expr = boolexpr.parse_expr(expr)
    names = expr.variables()
    if len(names) > ENUMERATION_LIMIT:
        raise SizeError(f"{len(names)} inputs exceeds the enumeration bound")
    missing = [n for n in names if n not in probabilities]
    if missing:
        raise InputError(f"no probability for inputs {missing}")
    for n in names:
        if not 0.0 <= probabilities[n] <= 1.0:
            raise InputError(f"p({n}) out of [0, 1]")
    p = 0.0
    for bits in itertools.product((0, 1), repeat=len(names)):
        env = dict(zip(names, bits))
        if expr.evaluate(env):
            term = 1.0
            for n, b in env.items():
                term *= probabilities[n] if b else 1.0 - probabilities[n]
            p += term
    return {"p": p, "beta": 2.0 * p * (1.0 - p)}


def switching_power(loads, env: PowerEnv, activity="transitions") -> float:
    """P = 1/2 * V_swing * V_DD * f * sum(C_i * beta_i).

    ``activity='zero_to_one'`` reads each load's activity as alpha_0->1
    (one charging event per pair), numerically identical to beta = 2*alpha.
    """
    if activity not in ("transitions", "zero_to_one"):
        raise InputError(f"unknown activity convention {activity!r}")
    scale = 2.0 if activity == "zero_to_one" else 1.0
    cb = sum(l.c * l.beta * scale for l in loads)
    return 0.5 * env.v_swing * env.v_dd * env.f_clk * cb


def short_circuit_power(k: float, v_t: float, env: PowerEnv,
                        tau_in: float, tau_out: float = 0.0,
                        beta: float = 1.0) -> float:
    """Triangular (Veendrick) crowbar model.

    Per input transition the rail-to-rail current, integrated over the
    linear input ramp, dissipates E = k * tau_in * (V_DD - 2 V_t)^3 / 24;
    the output transition time does not enter this variant (accepted for
    interface symmetry). Zero when the supply cannot turn both devices on
    at once.
    """
    if tau_in < 0 or tau_out < 0 or beta < 0:
        raise InputError("transition times and activity must be >= 0")
    if env.v_dd <= 2.0 * v_t:
        return 0.0
    energy_per_transition = k * tau_in * (env.v_dd - 2.0 * v_t) ** 3 / 24.0
    return energy_per_transition * beta * env.f_clk


def short_circuit_energy_numeric(k, v_t, v_dd, tau_in, steps=20000) -> float:
    """Quadrature over the triangular current waveform (oracle for the
    closed form): input ramps 0 -> V_DD in tau_in, the off-going device
    conducts (k/2)(v_in - v_t)^2 up to the midpoint, symmetric after."""
    if v_dd <= 2.0 * v_t:
        return 0.0
    t_on = v_t / v_dd * tau_in
    t_mid = 0.5 * tau_in
    dt = (t_mid - t_on) / steps
    q = 0.0
    for i in range(steps):
        t = t_on + (i + 0.5) * dt
        v_in = v_dd * t / tau_in
        q += 0.5 * k * (v_in - v_t) ** 2 * dt
    return 2.0 * q * v_dd  # both halves, energy drawn from the rail


def voltage_scaling_factors(v_from: float, v_to: float, v_t: float) -> dict:
    """Reduction factors when lowering the supply from v_from to v_to:
    switching scales with V^2, crowbar with V*(V - 2Vt)^2."""
    if v_to <= v_t:
        raise InputError("v_to must stay above the threshold")
    switching = (v_from / v_to) ** 2
    if v_to <= 2.0 * v_t:
        sc = math.inf
    else:
        sc = (v_from * (v_from - 2 * v_t) ** 2) / (v_to * (v_to - 2 * v_t) ** 2)
    return {"switching_reduction": switching, "short_circuit_reduction": sc}


def leakage_stack(i0: float, lambda_d: float, s_swing: float, v_dd: float) -> dict:
    """Two stacked off devices: the internal node settles where both leak
    equally, v_x = (1+lambda)/(1+2 lambda) * V_DD; the DIBL-driven ratio
    against a single off device is 10^(-lambda * v_x / S)."""
    if min(i0, s_swing, v_dd) <= 0 or lambda_d < 0:
        raise InputError("parameters must be positive (lambda_d >= 0)")
    v_x = (1.0 + lambda_d) / (1.0 + 2.0 * lambda_d) * v_dd
    ratio = 10.0 ** (-lambda_d * v_x / s_swing)
    return {"v_x": v_x, "stack_over_single_ratio": ratio}


def leakage_stack_residual(lambda_d, s_swing, v_dd, v_x) -> float:
    """Relative mismatch of the two stacked-device leakage exponents at
    v_x (plug-back oracle for leakage_stack)."""
    top = lambda_d * (v_dd - v_x) / s_swing
    bottom = ((v_x - v_dd) + lambda_d * v_x) / s_swing
    return abs(top - bottom) / max(abs(top), abs(bottom), 1e-30)


def adiabatic_energy(r_on: float, c: float, v_cmax: float, t_ramp: float,
                     n_outputs_switching: int = 1) -> float:
    """E = n * (R C / T) * C * V^2 for a slow supply ramp through the
    conducting network resistance."""
    if t_ramp <= 0:
        raise InputError("ramp time must be positive")
    if min(r_on, c) < 0 or n_outputs_switching < 0:
        raise InputError("r_on, c and the output count must be >= 0")
    return n_outputs_switching * (r_on * c / t_ramp) * c * v_cmax**2


def bus_split(n_modules: int, m_buses: int, locality: float = 0.8) -> dict:
    """Power saving of splitting one bus into m segments with pass
    switches between neighbors; ``locality`` is the fraction of traffic
    that stays inside a segment."""
    if not 1 <= m_buses <= n_modules:
        raise InputError("need 1 <= m <= n")
    if not 0 <= locality <= 1:
        raise InputError("locality is a fraction")
    near, far = locality, 1.0 - locality
    saving = 1.0 - (near + 2.0 * far) / m_buses - far * m_buses / n_modules
    m_opt = math.sqrt(n_modules * (near + 2.0 * far) / far) if far else float(n_modules)

    def saving_at(m):
        return 1.0 - (near + 2.0 * far) / m - far * m / n_modules

    best_int = max((m for m in (math.floor(m_opt), math.ceil(m_opt))
                    if 1 <= m <= n_modules),
                   key=saving_at, default=m_buses)
    return {"saving_percent": saving * 100.0, "optimal_m": m_opt,
            "optimal_m_integer": best_int,
            "optimal_saving_percent": saving_at(best_int) * 100.0}


def gray_code(n_bits: int, sequence=None) -> dict:
    """Gray encoding b ^ (b >> 1) and the binary-vs-gray transition counts
    along a value sequence (full counting cycle by default)."""
    if n_bits < 1:
        raise InputError("need at least one bit")
    top = 1 << n_bits
    if sequence is None:
        sequence = list(range(top))
    for v in sequence:
        if not 0 <= v < top:
            raise InputError(f"value {v} out of range for {n_bits} bits")

    def gray(b):
        return b ^ (b >> 1)

    def transitions(values):
        return sum((a ^ b).bit_count() for a, b in itertools.pairwise(values))

    binary_t = transitions(sequence)
    gray_t = transitions([gray(v) for v in sequence])
    return {
        "codes": [gray(v) for v in sequence],
        "binary_transitions": binary_t,
        "gray_transitions": gray_t,
        "saved": binary_t - gray_t,
    }
