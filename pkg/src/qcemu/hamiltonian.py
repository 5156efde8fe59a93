"""Generic spin-1/2 Hamiltonian

    H(t) = - sum_{j<k, a} J^a_{jk} S^a_j S^a_k - sum_{j, a} h^a_j(t) S^a_j

with fields h(t) = static + amplitude * sin(omega t + phase), plus builders for
a few physical models and the microinstruction (piecewise-constant segment).

Time is dimensionless (hbar = 1).  Durations handed around between modules
are in units of t/2pi; ``Microinstruction.tau`` gives the raw time.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .statevector import (
    StateVector,
    accumulate_spin,
    accumulate_two_spin,
    _check_qubit,
)

AXES = ("x", "y", "z")
TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class FieldTerm:
    """static + amplitude * sin(omega * t + phase).

    ``omega`` is an angular frequency. Because durations are quoted in units of
    t/2pi, omega is also the number of carrier cycles per unit of duration.
    """
    static: float = 0.0
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0

    @property
    def frequency(self) -> float:
        """Cycles per unit of (raw) time."""
        return self.omega / TWO_PI

    @property
    def time_dependent(self) -> bool:
        return self.amplitude != 0.0

    def value(self, t):
        if self.amplitude == 0.0:
            return self.static + 0.0 * np.asarray(t, dtype=float)
        return self.static + self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float) + self.phase)

    def bound(self) -> float:
        return abs(self.static) + abs(self.amplitude)


def _as_field(v) -> FieldTerm:
    if isinstance(v, FieldTerm):
        return v
    return FieldTerm(float(v))


@dataclass(frozen=True)
class SpinModel:
    """Immutable, hashable spin model.

    couplings: tuple of ((j, k, axis), J) with j < k
    fields:    tuple of ((j, axis), FieldTerm)
    """
    num_spins: int
    couplings: tuple = ()
    fields: tuple = ()

    @classmethod
    def make(cls, L: int, couplings: Mapping | None = None, fields: Mapping | None = None) -> "SpinModel":
        if L < 1:
            raise ValueError("need at least one spin")
        cpl = {}
        for key, J in (couplings or {}).items():
            if len(key) == 2:
                keys = [(key[0], key[1], "z")]
            else:
                keys = [tuple(key)]
            for j, k, a in keys:
                j, k = int(j), int(k)
                if j == k:
                    raise ValueError(f"coupling of spin {j} with itself")
                _check_qubit(j, L)
                _check_qubit(k, L)
                if a not in AXES:
                    raise ValueError(f"bad axis {a!r}")
                if not np.isfinite(J):
                    raise ValueError("non-finite coupling")
                j, k = min(j, k), max(j, k)
                cpl[(j, k, a)] = cpl.get((j, k, a), 0.0) + float(J)
        fld = {}
        for (j, a), v in (fields or {}).items():
            _check_qubit(int(j), L)
            if a not in AXES:
                raise ValueError(f"bad axis {a!r}")
            f = _as_field(v)
            if not all(np.isfinite([f.static, f.amplitude, f.omega, f.phase])):
                raise ValueError("non-finite field parameter")
            fld[(int(j), a)] = f
        return cls(
            L,
            tuple(sorted((k, v) for k, v in cpl.items() if v != 0.0)),
            tuple(sorted(((k, v) for k, v in fld.items() if v.bound() != 0.0), key=lambda kv: kv[0])),
        )

    # ---- derived views -------------------------------------------------
    @cached_property
    def coupling_map(self) -> dict:
        return dict(self.couplings)

    @cached_property
    def field_map(self) -> dict:
        return dict(self.fields)

    @cached_property
    def pairs(self) -> list:
        """[(j, k, (Jx, Jy, Jz))] in ascending (j, k) order."""
        acc = {}
        for (j, k, a), J in self.couplings:
            acc.setdefault((j, k), [0.0, 0.0, 0.0])[AXES.index(a)] += J
        return [(j, k, tuple(v)) for (j, k), v in sorted(acc.items())]

    @cached_property
    def is_static(self) -> bool:
        return not any(f.time_dependent for _, f in self.fields)

    @cached_property
    def is_diagonal(self) -> bool:
        """Only z couplings and z fields: every term commutes."""
        return all(a == "z" for (_, _, a), _ in self.couplings) and all(a == "z" for (_, a), _ in self.fields)

    @cached_property
    def _zz_diag(self):
        L = self.num_spins
        idx = np.arange(1 << L)
        d = np.zeros(1 << L)
        for (j, k, a), J in self.couplings:
            if a == "z":
                sj = 0.5 - ((idx >> (j - 1)) & 1)
                sk = 0.5 - ((idx >> (k - 1)) & 1)
                d -= J * sj * sk
        return d

    @cached_property
    def _zsign(self):
        idx = np.arange(1 << self.num_spins)
        return {j: 0.5 - ((idx >> (j - 1)) & 1) for j in range(1, self.num_spins + 1)}

    def field_vectors(self, t) -> np.ndarray:
        """h(t) as array (..., L, 3); t may be an array of times."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (self.num_spins, 3))
        for (j, a), f in self.fields:
            out[..., j - 1, AXES.index(a)] = f.value(t)
        return out

    def diagonal(self, t=0.0) -> np.ndarray:
        """Diagonal part of H(t) (zz couplings and z fields)."""
        d = self._zz_diag.copy()
        for (j, a), f in self.fields:
            if a == "z":
                d -= float(f.value(t)) * self._zsign[j]
        return d

    def norm_bound(self) -> float:
        return norm_bound(self)

    def with_fields(self, fields: Mapping) -> "SpinModel":
        fm = dict(self.field_map)
        fm.update({k: _as_field(v) for k, v in fields.items()})
        return SpinModel.make(self.num_spins, self.coupling_map, fm)

    def scaled(self, c: float) -> "SpinModel":
        """Model for c*H (used for time reversal checks)."""
        return SpinModel(
            self.num_spins,
            tuple((k, c * J) for k, J in self.couplings),
            tuple((k, FieldTerm(c * f.static, c * f.amplitude, f.omega, f.phase)) for k, f in self.fields),
        )


@dataclass(frozen=True)
class Microinstruction:
    """One piecewise-constant (or explicitly time-dependent) segment.

    duration is in units of t/2pi. ``ideal`` optionally names the gates the
    segment is meant to realise, so a program can be rerun on the ideal
    machine with exact gates substituted.
    """
    label: str
    duration: float
    model: SpinModel
    ideal: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"microinstruction {self.label!r}: duration must be positive")

    @property
    def tau(self) -> float:
        return TWO_PI * self.duration


# ---------------------------------------------------------------------------

def apply_h_raw(a: np.ndarray, model: SpinModel, t: float = 0.0) -> np.ndarray:
    """H(t) a for an array whose last axis holds amplitudes (batch allowed)."""
    out = model.diagonal(t) * a
    for (j, ax), f in model.fields:
        if ax != "z":
            h = float(f.value(t))
            if h != 0.0:
                accumulate_spin(out, a, ax, j, -h)
    for (j, k, ax), J in model.couplings:
        if ax != "z":
            accumulate_two_spin(out, a, ax, j, k, -J)
    return out


def apply_h(state: StateVector, model: SpinModel, t: float = 0.0) -> StateVector:
    """Return H(t)|state> as a new (unnormalized) StateVector."""
    if model.num_spins != state.num_qubits:
        raise ValueError(f"model has {model.num_spins} spins, state has {state.num_qubits} qubits")
    return StateVector(state.num_qubits, apply_h_raw(state.amplitudes, model, t))


def dense_matrix(model: SpinModel, t: float = 0.0) -> np.ndarray:
    """H(t) as a dense matrix, built column by column from apply_h."""
    D = 1 << model.num_spins
    rows = apply_h_raw(np.eye(D, dtype=complex), model, t)  # row c = H e_c
    return rows.T.copy()


def norm_bound(model: SpinModel, t=None) -> float:
    """Triangle-inequality bound: 1/4 sum|J| + 1/2 sum(|static| + |amplitude|)."""
    return 0.25 * sum(abs(J) for _, J in model.couplings) + 0.5 * sum(f.bound() for _, f in model.fields)


# ---------------------------------------------------------------------------
# model builders

def build_ising(L: int, J_map: Mapping | None = None, fields: Mapping | None = None) -> SpinModel:
    """Ising couplings J_jk S^z S^z plus arbitrary static fields.

    J_map keys are (j, k) for zz couplings; (j, k, axis) keys are accepted too.
    fields keys are (j, axis) with float or FieldTerm values.
    """
    return SpinModel.make(L, J_map or {}, fields or {})


CHLOROFORM_J = -0.43e-6
CHLOROFORM_H1 = 1.0
CHLOROFORM_H2 = 0.25


def build_chloroform(J=CHLOROFORM_J, h1=CHLOROFORM_H1, h2=CHLOROFORM_H2, extra_fields=None) -> SpinModel:
    """Two nuclear spins with an Ising coupling in strong static z fields."""
    fields = {(1, "z"): h1, (2, "z"): h2}
    if extra_fields:
        fields.update(extra_fields)
    return SpinModel.make(2, {(1, 2, "z"): J}, fields)


def bath_couplings(L: int, J0=8.0, Jmax=0.4, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, Jmax, size=L - 2)


def build_spin_bath(L: int, J0=8.0, Jmax=0.4, seed=0) -> SpinModel:
    """Central pair with H = J0 (S1+S2)^2 + sum_n J_n I_n.(S1+S2).

    (S1+S2)^2 = 3/2 + 2 S1.S2; the constant only shifts the global phase and
    is dropped. In the -J S S convention the pair coupling is -2 J0 and each
    bath coupling is -J_n, on all three axes. J_n is uniform in (0, Jmax).
    """
    if L < 3:
        raise ValueError("spin bath needs at least 3 spins")
    Jn = bath_couplings(L, J0, Jmax, seed)
    cpl = {}
    for a in AXES:
        cpl[(1, 2, a)] = -2.0 * J0
        for n in range(3, L + 1):
            cpl[(1, n, a)] = -Jn[n - 3]
            cpl[(2, n, a)] = -Jn[n - 3]
    return SpinModel.make(L, cpl, {})


def _per_spin(v, L, name):
    arr = np.broadcast_to(np.asarray(v, dtype=float), (L,))
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def build_quantum_dot(L: int, E0: float, hx=0.0, P=0.0) -> SpinModel:
    """Linear quantum-dot array at one instant of its control schedule.

    H = - sum_{j<L} E_j S^z_j S^z_{j+1} - sum_j hx_j S^x_j + E0 sum_j P_j S^z_j,
    E_j = E0 for odd j and 2 E0 for even j.
    """
    if L < 2:
        raise ValueError("need at least two dots")
    hx = _per_spin(hx, L, "hx")
    P = _per_spin(P, L, "P")
    cpl = {(j, j + 1, "z"): (E0 if j % 2 else 2 * E0) for j in range(1, L)}
    fields = {}
    for j in range(1, L + 1):
        fields[(j, "x")] = hx[j - 1]
        fields[(j, "z")] = -E0 * P[j - 1]
    return SpinModel.make(L, cpl, fields)


def build_josephson(L: int, EJ: float, EI=0.0, hz=0.0) -> SpinModel:
    """Two-level projection of a Josephson-junction chain at one instant.

    H = -2 EI sum_{j<L} S^y_j S^y_{j+1} - EJ sum_j S^x_j - sum_j hz_j S^z_j.
    """
    if L < 2:
        raise ValueError("need at least two junctions")
    hz = _per_spin(hz, L, "hz")
    cpl = {(j, j + 1, "y"): 2.0 * EI for j in range(1, L)}
    fields = {}
    for j in range(1, L + 1):
        fields[(j, "x")] = EJ
        fields[(j, "z")] = hz[j - 1]
    return SpinModel.make(L, cpl, fields)


def schedule(builder, segments, label="seg"):
    """Piecewise-constant control schedule -> list of Microinstructions.

    segments: iterable of (duration_over_2pi, kwargs for builder).
    """
    return [Microinstruction(f"{label}{i}", dur, builder(**kw)) for i, (dur, kw) in enumerate(segments)]


def product_state(single_qubit_states) -> StateVector:
    """Tensor product; element 0 is qubit 1 (the least significant bit)."""
    a = np.array([1.0 + 0j])
    for s in single_qubit_states:
        a = np.kron(np.asarray(s, dtype=complex), a)
    return StateVector(len(single_qubit_states), a)


def random_bath_state(L: int, seed=0) -> StateVector:
    """Spin 1 up, spin 2 down, bath spins independent uniform-on-sphere pure states."""
    if L < 3:
        raise ValueError("need at least 3 spins")
    rng = np.random.default_rng(seed)
    spins = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    cos_t = rng.uniform(-1.0, 1.0, size=L - 2)
    phi = rng.uniform(0.0, TWO_PI, size=L - 2)
    for c, p in zip(cos_t, phi):
        th = np.arccos(c)
        spins.append(np.array([np.cos(th / 2), np.exp(1j * p) * np.sin(th / 2)]))
    psi = product_state(spins)
    psi.amplitudes /= np.linalg.norm(psi.amplitudes)
    return psi


def without_pair_coupling(model: SpinModel) -> SpinModel:
    """The spin-bath model with the central S1.S2 term removed.

    For the spin bath, (S1+S2)^2 commutes with every other term, so
    exp(-itH) = exp(-itH_pair) exp(-itH_rest) and the fast pair oscillation
    can be put back analytically (see pair_magnetization_terms).
    """
    cpl = {k: v for k, v in model.coupling_map.items() if k[:2] != (1, 2)}
    return SpinModel.make(model.num_spins, cpl, model.field_map)


def pair_magnetization_terms(amplitudes) -> tuple:
    """(m, c) with <S1z(t)> = m + 2 Re[exp(2i J0 t) c].

    `amplitudes` is the state evolved to time t under without_pair_coupling.
    m = <S1z + S2z>/2 is slow; c = <T0|(S1z - S2z)/2|S> is the singlet-triplet
    coherence carried at frequency 2 J0. The envelope of |<S1z>| is |m| + 2|c|.
    """
    b = np.asarray(amplitudes).reshape(-1, 4)     # columns: (spin 2, spin 1) bits
    p = np.abs(b) ** 2
    m = 0.5 * float(p[:, 0].sum() - p[:, 3].sum())
    up_down, down_up = b[:, 2], b[:, 1]          # spin 1 up / spin 2 down and the reverse
    singlet = (up_down - down_up) / np.sqrt(2)
    triplet0 = (up_down + down_up) / np.sqrt(2)
    return m, 0.5 * complex(np.vdot(triplet0, singlet))
