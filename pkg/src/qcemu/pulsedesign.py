"""Pulse sequences for the two-spin NMR-like machine.

Single-qubit rotations are resonant rotating fields whose duration and
amplitude follow the 2*pi*k rule: during a pulse on spin 1 the off-resonant
spin 2 makes an integer number of full turns (and vice versa), so it is left
approximately unchanged.  Gyromagnetic ratios are gamma = N/M with spin 2
seeing gamma times the field applied to spin 1.

Sequences are written the way operator products are written: the rightmost
symbol acts first.  ``sequence_from_string`` returns them in time order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gateset import GateOp, rotation
from .hamiltonian import (
    CHLOROFORM_H1,
    CHLOROFORM_H2,
    CHLOROFORM_J,
    FieldTerm,
    Microinstruction,
    SpinModel,
    build_chloroform,
)
from .propagators import PropagatorConfig, evolve_raw, segment_propagator
from .statevector import StateVector

TWO_PI = 2 * math.pi

# axis -> (phase of the x field, phase of the y field, sign of amplitude per unit angle)
_PATTERN = {"x": (-math.pi / 2, 0.0, -1.0), "y": (0.0, math.pi / 2, 1.0)}


@dataclass(frozen=True)
class TwoPiKParams:
    k: int = 1
    N: int = 1
    M: int = 4

    def __post_init__(self):
        if self.k <= 0 or self.N <= 0 or self.M <= 0:
            raise ValueError("k, N, M must be positive integers")
        if self.N >= self.M:
            raise ValueError("need N < M")

    @property
    def gamma(self) -> float:
        return self.N / self.M

    @property
    def s(self) -> int:
        """Label used for result tables: s = 2 k M N^2."""
        return 2 * self.k * self.M * self.N ** 2

    @property
    def separation(self) -> int:
        """2 k N M (M - N); should be >> 1 for the rule to suppress cross-talk."""
        return 2 * self.k * self.N * self.M * (self.M - self.N)

    @classmethod
    def from_s(cls, s: int, N: int = 1, M: int = 4) -> "TwoPiKParams":
        base = 2 * M * N * N
        if s % base:
            raise ValueError(f"s={s} is not a multiple of 2MN^2={base}")
        return cls(s // base, N, M)


@dataclass(frozen=True)
class PulseSpec:
    """Rotating-field pulse: h_j^x = h1x/h2x sin(omega t + phix), same for y."""
    duration_over_2pi: float
    omega: float
    h1x: float
    h2x: float
    phix: float
    h1y: float
    h2y: float
    phiy: float

    def row(self):
        return (self.duration_over_2pi, self.omega, self.h1x, self.h2x, self.phix, self.h1y, self.h2y, self.phiy)


def design_pulse(params: TwoPiKParams, target_spin: int, axis: str, angle: float, h1z: float = CHLOROFORM_H1) -> PulseSpec:
    """Rotation exp(i angle S^axis) of `target_spin` by a resonant rotating field.

    Spin 1: duration 2 k M N^2 (in 2 pi / h1z units), carrier omega = h1z.
    Spin 2: duration 2 k M^3, carrier omega = gamma h1z.
    The x pattern uses phases (-pi/2, 0) and a negative amplitude per unit
    angle, the y pattern (0, pi/2) and a positive one.
    """
    if target_spin not in (1, 2):
        raise ValueError("target spin must be 1 or 2")
    if axis not in _PATTERN:
        raise ValueError("axis must be 'x' or 'y'")
    if not abs(angle) <= 4 * math.pi + 1e-12:
        raise ValueError("rotation angle must lie in [-4pi, 4pi]")
    g = params.gamma
    if target_spin == 1:
        dur = 2 * params.k * params.M * params.N ** 2 / h1z
        omega = h1z
    else:
        dur = 2 * params.k * params.M ** 3 / h1z
        omega = g * h1z
    phx, phy, sgn = _PATTERN[axis]
    amp_target = sgn * angle / (TWO_PI * dur)
    h1 = amp_target if target_spin == 1 else amp_target / g
    h2 = g * h1
    return PulseSpec(dur, omega, h1, h2, phx, h1, h2, phy)


def pulse_duration_exact(params: TwoPiKParams, angle: float, n1: int = 1, h1z: float = CHLOROFORM_H1) -> float:
    """Duration t1 for which spin 2 turns through exactly 4 pi n1 while spin 1
    rotates by `angle`: t1 = pi / |h1z (1 - gamma)| * sqrt(16 n1^2 - (angle/pi)^2)."""
    rad = 16 * n1 ** 2 - (angle / math.pi) ** 2
    if rad < 0:
        raise ValueError("angle too large for this n1")
    return math.pi / abs(h1z * (1 - params.gamma)) * math.sqrt(rad)


def condition_residual(params: TwoPiKParams, angle: float, target_spin: int = 1) -> float:
    """Distance of a designed pulse from the exact 2 pi k conditions.

    With k_j = t h_j^z / 4 pi the exact conditions read
      (1-g)^2 k1^2 + (g^2/4)(phi/2pi)^2 = n1^2        (spin 1 pulse)
      (1-1/g)^2 k2^2 + (1/(4 g^2))(phi/2pi)^2 = n2^2  (spin 2 pulse)
    for integer n. Returns |lhs - n^2| / n^2 for the nearest integer n.
    """
    g = params.gamma
    spec = design_pulse(params, target_spin, "x", angle)
    t = TWO_PI * spec.duration_over_2pi
    ph = (angle / TWO_PI) ** 2
    if target_spin == 1:
        k1 = t * 1.0 / (4 * math.pi)
        lhs = (1 - g) ** 2 * k1 ** 2 + g * g / 4 * ph
    else:
        k2 = t * g / (4 * math.pi)
        lhs = (1 - 1 / g) ** 2 * k2 ** 2 + ph / (4 * g * g)
    n = max(round(math.sqrt(lhs)), 1)
    return abs(lhs - n * n) / (n * n)


def pulse_model(spec: PulseSpec, base: SpinModel | None = None) -> SpinModel:
    base = base or build_chloroform()
    fields = {}
    for j, hx, hy in ((1, spec.h1x, spec.h1y), (2, spec.h2x, spec.h2y)):
        fields[(j, "x")] = FieldTerm(0.0, hx, spec.omega, spec.phix)
        fields[(j, "y")] = FieldTerm(0.0, hy, spec.omega, spec.phiy)
    return base.with_fields(fields)


def pulse_microinstruction(label: str, params: TwoPiKParams, target_spin: int, axis: str, angle: float,
                           base: SpinModel | None = None) -> Microinstruction:
    spec = design_pulse(params, target_spin, axis, angle)
    ideal = (GateOp("R" + axis, (target_spin,), angle),)
    return Microinstruction(label, spec.duration_over_2pi, pulse_model(spec, base), ideal)


# ---------------------------------------------------------------------------
# free evolution and the phase-fixing rotations

def interaction_time(J: float = CHLOROFORM_J) -> float:
    """tau with tau J = -pi (raw time)."""
    return -math.pi / J


def interaction_step(J: float = CHLOROFORM_J, h1: float = CHLOROFORM_H1, h2: float = CHLOROFORM_H2) -> Microinstruction:
    """Free evolution I' = exp(-i tau H) for tau J = -pi."""
    model = build_chloroform(J, h1, h2)
    return Microinstruction("I'", interaction_time(J) / TWO_PI, model)


def _reduce(phase: float) -> float:
    # rotation angle theta with exp(i theta S^z) = exp(-i phase S^z), in (-4pi, 0]
    return -(phase % (4 * math.pi))


def phase_fix_angles(J: float = CHLOROFORM_J, h1: float = CHLOROFORM_H1, h2: float = CHLOROFORM_H2) -> dict:
    """Angles of the primed (CNOT) and double-primed (Grover G) rotations.

    Primed: undo tau (h_j - h) S^z_j with h = -J/2, leaving the Ising phase
    I_21(pi). Double primed: undo the full tau h_j S^z_j.
    """
    tau = interaction_time(J)
    h = -J / 2
    return {
        "1'": _reduce(tau * (h1 - h)),
        "2'": _reduce(tau * (h2 - h)),
        "1''": _reduce(tau * h1),
        "2''": _reduce(tau * h2),
    }


PULSE_ROWS = ("X1", "X2", "Y1", "Y2", "X1'", "X2'", "Y1'", "X1''", "X2''")


def pulse_specs(params: TwoPiKParams, J: float = CHLOROFORM_J, h1: float = CHLOROFORM_H1,
                h2: float = CHLOROFORM_H2) -> dict:
    """PulseSpec for each named pulse in PULSE_ROWS."""
    ang = phase_fix_angles(J, h1, h2)
    q = math.pi / 2
    angles = {"X1": (1, "x", q), "X2": (2, "x", q), "Y1": (1, "y", q), "Y2": (2, "y", q),
              "X1'": (1, "x", ang["1'"]), "X2'": (2, "x", ang["2'"]), "Y1'": (1, "y", ang["1'"]),
              "X1''": (1, "x", ang["1''"]), "X2''": (2, "x", ang["2''"])}
    return {name: design_pulse(params, *angles[name], h1z=h1) for name in PULSE_ROWS}


def pulse_library(params: TwoPiKParams, J: float = CHLOROFORM_J, h1: float = CHLOROFORM_H1,
                  h2: float = CHLOROFORM_H2) -> dict:
    """All named microinstructions used by the CNOT and Grover sequences.

    Keys: X1 X2 Y1 Y2, Xb1 ... (bars = inverse), X1' X2' Y1', X1'' X2'', I'.
    """
    base = build_chloroform(J, h1, h2)
    ang = phase_fix_angles(J, h1, h2)
    q = math.pi / 2
    lib = {}
    for j in (1, 2):
        lib[f"X{j}"] = pulse_microinstruction(f"X{j}", params, j, "x", q, base)
        lib[f"Y{j}"] = pulse_microinstruction(f"Y{j}", params, j, "y", q, base)
        lib[f"Xb{j}"] = pulse_microinstruction(f"Xb{j}", params, j, "x", -q, base)
        lib[f"Yb{j}"] = pulse_microinstruction(f"Yb{j}", params, j, "y", -q, base)
    lib["X1'"] = pulse_microinstruction("X1'", params, 1, "x", ang["1'"], base)
    lib["X2'"] = pulse_microinstruction("X2'", params, 2, "x", ang["2'"], base)
    lib["Y1'"] = pulse_microinstruction("Y1'", params, 1, "y", ang["1'"], base)
    lib["X1''"] = pulse_microinstruction("X1''", params, 1, "x", ang["1''"], base)
    lib["X2''"] = pulse_microinstruction("X2''", params, 2, "x", ang["2''"], base)
    lib["I'"] = interaction_step(J, h1, h2)
    return lib


def sequence_from_string(text: str, lib: dict) -> list:
    """Operator product (rightmost acts first) -> microinstructions in time order."""
    return [lib[name] for name in reversed(text.split())]


CNOT_STRINGS = {
    1: "Y1 X1' Yb1 X2' Yb2 I' Y2",
    2: "Y1 X1' X2' Yb1 Yb2 I' Y2",
    3: "Xb1 Y1' X2' Yb2 X1 I' Y2",
}
G_STRING = "Y2 X2'' Yb2 Y1 X1'' Yb1 I'"
_GROVER_MIDDLE = {
    0: "X1 Yb1 X2 Yb2",
    1: "X1 Yb1 Xb2 Yb2",
    2: "Xb1 Yb1 X2 Yb2",
    3: "Xb1 Yb1 Xb2 Yb2",
}


def grover_string(item: int) -> str:
    """Optimized two-qubit Grover sequence for the given item (global -1 dropped)."""
    if item not in _GROVER_MIDDLE:
        raise ValueError("item must be 0..3")
    return f"X1 Yb1 X2 Yb2 {G_STRING} {_GROVER_MIDDLE[item]} {G_STRING} Xb2 Xb2 Yb2 Xb1 Xb1 Yb1"


def cnot_variant(v: int, params: TwoPiKParams, **model_kw) -> list:
    if v not in CNOT_STRINGS:
        raise ValueError("CNOT variant must be 1, 2 or 3")
    return sequence_from_string(CNOT_STRINGS[v], pulse_library(params, **model_kw))


def grover_g_step(params: TwoPiKParams, **model_kw) -> list:
    return sequence_from_string(G_STRING, pulse_library(params, **model_kw))


def grover_sequence(item: int, params: TwoPiKParams, **model_kw) -> list:
    return sequence_from_string(grover_string(item), pulse_library(params, **model_kw))


# ---------------------------------------------------------------------------
# execution

class MicroRunner:
    """Runs microinstruction lists, caching dense propagators for tiny registers.

    Each microinstruction starts its own clock at t = 0.
    """

    def __init__(self, cfg: PropagatorConfig | None = None, ideal: bool = False):
        self.cfg = cfg or PropagatorConfig()
        self.ideal = ideal
        self._cache = {}

    def unitary(self, micro: Microinstruction) -> np.ndarray:
        key = (micro, self.ideal)
        U = self._cache.get(key)
        if U is None:
            if self.ideal and micro.ideal:
                U = ideal_unitary(micro)
            else:
                U = segment_propagator(micro.model, 0.0, micro.tau, self.cfg)
            self._cache[key] = U
        return U

    def run(self, state: StateVector, micros: Sequence[Microinstruction]) -> StateVector:
        a = state.amplitudes
        small = (1 << state.num_qubits) <= self.cfg.dense_max_dim
        for m in micros:
            if small:
                a = self.unitary(m) @ a
            elif self.ideal and m.ideal:
                for op in m.ideal:
                    _apply_gate_raw(a, op)
            else:
                a = evolve_raw(a, m.model, 0.0, m.tau, self.cfg)
        state.amplitudes[:] = a / np.linalg.norm(a)
        return state

    def sequence_unitary(self, micros: Sequence[Microinstruction]) -> np.ndarray:
        D = 1 << micros[0].model.num_spins
        U = np.eye(D, dtype=complex)
        for m in micros:
            U = self.unitary(m) @ U
        return U


def _apply_gate_raw(a, op: GateOp):
    from .gateset import _apply_raw
    _apply_raw(a, op)


def ideal_unitary(micro: Microinstruction) -> np.ndarray:
    """Exact gate product a microinstruction stands for."""
    from .gateset import GateProgram, program_matrix
    L = micro.model.num_spins
    return program_matrix(GateProgram(L, list(micro.ideal)))


def ideal_rotation(spin: int, axis: str, angle: float) -> np.ndarray:
    """4x4 exp(i angle S^axis_spin) on the two-spin register."""
    r = rotation(axis, angle)
    return np.kron(np.eye(2), r) if spin == 1 else np.kron(r, np.eye(2))


# ---------------------------------------------------------------------------
# result tables

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
CNOT_INPUTS = ("00", "01", "10", "11", "singlet")


def _qz_pair(a):
    p = np.abs(a) ** 2
    return float(p[1] + p[3]), float(p[2] + p[3])


def cnot_power_table(s: int, cfg: PropagatorConfig | None = None, power: int = 5, ideal: bool = False) -> dict:
    """(Q1z, Q2z) after CNOT_v^power for each variant and input.

    Keys are (variant, input) with input in CNOT_INPUTS; bit strings read
    qubit 2 first. The singlet rows end with an exact Y1 rotation.
    """
    runner = MicroRunner(cfg or PropagatorConfig("st4-pair", dt=0.01), ideal=ideal)
    params = TwoPiKParams.from_s(s)
    y1 = ideal_rotation(1, "y", math.pi / 2)
    out = {}
    for v in (1, 2, 3):
        U = np.linalg.matrix_power(runner.sequence_unitary(cnot_variant(v, params)), power)
        for name in CNOT_INPUTS:
            if name == "singlet":
                a = y1 @ (U @ SINGLET)
            else:
                a = U[:, int(name, 2)]
            out[(v, name)] = _qz_pair(a)
    return out


def grover_table(s: int, cfg: PropagatorConfig | None = None, ideal: bool = False) -> list:
    """(Q1z, Q2z) after the pulse-level Grover search for items 0..3, from |00>."""
    runner = MicroRunner(cfg or PropagatorConfig("st4-pair", dt=0.01), ideal=ideal)
    params = TwoPiKParams.from_s(s)
    return [_qz_pair(runner.sequence_unitary(grover_sequence(item, params))[:, 0]) for item in range(4)]
