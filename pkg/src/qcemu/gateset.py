"""Named gates of the ideal quantum computer and their decompositions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import (
    StateVector,
    SPIN_MATRICES,
    UNITARY_TOL,
    _check_unitary,
    kernel_1q,
    kernel_2q,
)

_R2 = 1 / np.sqrt(2)

X_MAT = _R2 * np.array([[1, 1j], [1j, 1]])     # exp(i pi S^x / 2)
Y_MAT = _R2 * np.array([[1, 1], [-1, 1]])      # exp(i pi S^y / 2)
XBAR_MAT = X_MAT.conj().T
YBAR_MAT = Y_MAT.conj().T
W_MAT = _R2 * np.array([[1, 1], [1, -1]])
NOT_MAT = np.array([[0, 1], [1, 0]], dtype=complex)

CNOT_MAT = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]], dtype=complex)
SWAP_MAT = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)


def rotation(axis: str, angle: float) -> np.ndarray:
    """exp(i angle S^axis) in closed form (positive angle = clockwise)."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return c * np.eye(2) + 2j * s * SPIN_MATRICES[axis]


def phase_mat(phi):
    return np.diag([1.0, np.exp(1j * phi)])


def ising_phase_mat(phi):
    """I_21(phi) = diag(e^{-i phi/4}, e^{-i phi/4}, e^{-i phi/4}, e^{3i phi/4})."""
    a = np.exp(-0.25j * phi)
    return np.diag([a, a, a, np.exp(0.75j * phi)])


def ctrl_phase_mat(phi):
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * phi)]).astype(complex)


TOFFOLI_MAT = np.eye(8, dtype=complex)
TOFFOLI_MAT[[3, 7]] = TOFFOLI_MAT[[7, 3]]

# arity of every kind; Custom gates carry their own matrix
_ARITY = {
    "X": 1, "Xbar": 1, "Y": 1, "Ybar": 1, "W": 1, "NOT": 1, "R": 1,
    "Rx": 1, "Ry": 1, "Rz": 1, "Custom1q": 1,
    "CNOT": 2, "CP": 2, "I": 2, "SWAP": 2, "Custom2q": 2,
    "Toffoli": 3,
}
ALIASES = {
    "H": "W", "HADAMARD": "W", "XB": "Xbar", "YB": "Ybar", "XBAR": "Xbar",
    "YBAR": "Ybar", "CPHASE": "CP", "CTRLPHASE": "CP", "ISING": "I",
    "ISINGPHASE": "I", "RPHASE": "R", "CCNOT": "Toffoli", "TOFFOLI": "Toffoli",
    "SWAP": "SWAP", "CNOT": "CNOT", "NOT": "NOT", "W": "W", "X": "X", "Y": "Y",
    "R": "R", "CP": "CP", "I": "I", "RX": "Rx", "RY": "Ry", "RZ": "Rz",
}
NEEDS_ANGLE = {"R", "CP", "I", "Rx", "Ry", "Rz"}


@dataclass(frozen=True)
class GateOp:
    """One gate. ``targets`` are 1-based qubit indices.

    Two-qubit gates follow the (j, k) convention of the matrices: the 4x4 row
    index is 2*bit_k + bit_j. For CNOT/CP the first target is the control.
    For Toffoli the targets are (control1, control2, target).
    """
    kind: str
    targets: tuple
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = ALIASES.get(self.kind.upper(), self.kind) if self.kind not in _ARITY else self.kind
        if kind not in _ARITY:
            raise ValueError(f"unknown gate {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != _ARITY[kind]:
            raise ValueError(f"{kind} needs {_ARITY[kind]} target(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{kind}: repeated qubit in {self.targets}")
        if kind in NEEDS_ANGLE:
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{kind} needs a finite angle")
        if kind.startswith("Custom"):
            if self.matrix is None:
                raise ValueError("custom gate without matrix")
            n = 2 ** _ARITY[kind]
            object.__setattr__(self, "matrix", _check_unitary(self.matrix, n, UNITARY_TOL))

    @property
    def arity(self):
        return _ARITY[self.kind]

    def unitary(self) -> np.ndarray:
        """Matrix on the gate's own qubits (2x2, 4x4 or 8x8)."""
        k, a = self.kind, self.angle
        if k == "X":
            return X_MAT
        if k == "Xbar":
            return XBAR_MAT
        if k == "Y":
            return Y_MAT
        if k == "Ybar":
            return YBAR_MAT
        if k == "W":
            return W_MAT
        if k == "NOT":
            return NOT_MAT
        if k == "R":
            return phase_mat(a)
        if k in ("Rx", "Ry", "Rz"):
            return rotation(k[1].lower(), a)
        if k == "CNOT":
            return CNOT_MAT
        if k == "CP":
            return ctrl_phase_mat(a)
        if k == "I":
            return ising_phase_mat(a)
        if k == "SWAP":
            return SWAP_MAT
        if k == "Toffoli":
            return TOFFOLI_MAT
        return self.matrix

    def inverse(self) -> "GateOp":
        swap = {"X": "Xbar", "Xbar": "X", "Y": "Ybar", "Ybar": "Y"}
        if self.kind in swap:
            return GateOp(swap[self.kind], self.targets)
        if self.kind in NEEDS_ANGLE:
            return GateOp(self.kind, self.targets, -self.angle)
        if self.kind.startswith("Custom"):
            return GateOp(self.kind, self.targets, matrix=self.matrix.conj().T)
        return self  # self-inverse: W, NOT, CNOT, SWAP, Toffoli

    def __str__(self):
        s = f"{self.kind} {' '.join(map(str, self.targets))}"
        if self.angle is not None:
            s += f" angle {self.angle!r}"
        return s


@dataclass
class GateProgram:
    num_qubits: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        for op in self.ops:
            self._check(op)

    def _check(self, op):
        if max(op.targets) > self.num_qubits or min(op.targets) < 1:
            raise ValueError(f"{op} addresses a qubit outside 1..{self.num_qubits}")

    def append(self, op: GateOp):
        self._check(op)
        self.ops.append(op)
        return self

    def extend(self, ops):
        for op in ops:
            self.append(op)
        return self

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def inverse(self) -> "GateProgram":
        return GateProgram(self.num_qubits, [op.inverse() for op in reversed(self.ops)])


def _apply_raw(a, op: GateOp):
    t = op.targets
    if op.arity == 1:
        kernel_1q(a, t[0], op.unitary())
    elif op.arity == 2:
        kernel_2q(a, t[0], t[1], op.unitary())
    else:
        _toffoli_raw(a, *t)
    return a


def _toffoli_raw(a, c1, c2, tgt):
    idx = np.arange(a.shape[-1])
    sel = idx[((idx >> (c1 - 1)) & 1 == 1) & ((idx >> (c2 - 1)) & 1 == 1) & ((idx >> (tgt - 1)) & 1 == 0)]
    partner = sel | (1 << (tgt - 1))
    tmp = a[..., sel].copy()
    a[..., sel] = a[..., partner]
    a[..., partner] = tmp


def apply(state: StateVector, op: GateOp) -> StateVector:
    if max(op.targets) > state.num_qubits:
        raise ValueError(f"{op} addresses a qubit outside 1..{state.num_qubits}")
    _apply_raw(state.amplitudes, op)
    return state


def run(state: StateVector, program: GateProgram) -> StateVector:
    if program.num_qubits != state.num_qubits:
        raise ValueError("program and state sizes differ")
    for op in program.ops:
        _apply_raw(state.amplitudes, op)
    return state


def program_matrix(program: GateProgram) -> np.ndarray:
    """Dense unitary of a program (columns = images of basis states)."""
    D = 1 << program.num_qubits
    rows = np.eye(D, dtype=complex)   # row c is basis state c
    for op in program.ops:
        _apply_raw(rows, op)
    return rows.T


# ---------------------------------------------------------------------------
# decompositions

def cnot_sequence(control: int, target: int) -> GateProgram:
    """Ybar_t I_tc(pi) Y_t with its global phase folded in.

    Ybar I(pi) Y equals e^{-i pi/4} CNOT, so the diagonal factor is multiplied
    by e^{+i pi/4} to make the three-gate product exactly CNOT.
    """
    n = max(control, target)
    m = np.exp(0.25j * np.pi) * ising_phase_mat(np.pi)
    return GateProgram(n, [
        GateOp("Y", (target,)),
        GateOp("Custom2q", (control, target), matrix=m),
        GateOp("Ybar", (target,)),
    ])


def swap_sequence(j: int, k: int) -> GateProgram:
    n = max(j, k)
    return GateProgram(n, [GateOp("CNOT", (j, k)), GateOp("CNOT", (k, j)), GateOp("CNOT", (j, k))])


def toffoli_sequence(c1: int, c2: int, target: int) -> GateProgram:
    """Short Toffoli network, equal to Toffoli up to a global phase.

    Operator product (rightmost first):
      Ybar3 Rbar31 Ybar2 I21 Y2 R32 Ybar2 I21 Y2 Rbar32 Y3
    with R = R(pi/2) controlled phase, I = I(pi). Qubit roles: 1 = c1, 2 = c2,
    3 = target.
    """
    if len({c1, c2, target}) != 3:
        raise ValueError("Toffoli needs three distinct qubits")
    q1, q2, q3 = c1, c2, target
    hp = np.pi / 2
    written = [
        GateOp("Ybar", (q3,)),
        GateOp("CP", (q3, q1), -hp),
        GateOp("Ybar", (q2,)),
        GateOp("I", (q2, q1), np.pi),
        GateOp("Y", (q2,)),
        GateOp("CP", (q3, q2), hp),
        GateOp("Ybar", (q2,)),
        GateOp("I", (q2, q1), np.pi),
        GateOp("Y", (q2,)),
        GateOp("CP", (q3, q2), -hp),
        GateOp("Y", (q3,)),
    ]
    return GateProgram(max(q1, q2, q3), list(reversed(written)))


def _a_gate(q, sign=1):
    # A = exp(i pi S^y / 4)
    return GateOp("Custom1q", (q,), matrix=rotation("y", sign * np.pi / 4))


def toffoli_margolus_sequence(c1: int, c2: int, target: int) -> GateProgram:
    """A, CNOT(c2), A, CNOT(c1), Abar, CNOT(c2), Abar on the target (time order).

    With A = exp(i pi S^y / 4) this flips the target iff both controls are 1.
    When c1 = 1 and c2 = 0 the target is hit by Abar Abar N A A = -2 S^z
    instead of the identity, i.e. a sign that depends on the target bit.
    """
    if len({c1, c2, target}) != 3:
        raise ValueError("need three distinct qubits")
    t = target
    ops = [
        _a_gate(t),
        GateOp("CNOT", (c2, t)),
        _a_gate(t),
        GateOp("CNOT", (c1, t)),
        _a_gate(t, -1),
        GateOp("CNOT", (c2, t)),
        _a_gate(t, -1),
    ]
    return GateProgram(max(c1, c2, t), ops)


def hadamard_sequence(j: int) -> GateProgram:
    """W = -i X X Ybar, global phase dropped."""
    return GateProgram(j, [GateOp("Ybar", (j,)), GateOp("X", (j,)), GateOp("X", (j,))])


def lift(program: GateProgram, num_qubits: int) -> GateProgram:
    return GateProgram(num_qubits, list(program.ops))


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol=1e-12) -> bool:
    """True when u = e^{i theta} v for some theta."""
    k = np.argmax(np.abs(v))
    k = np.unravel_index(k, v.shape)
    if abs(v[k]) < tol:
        return np.allclose(u, v, atol=tol)
    ph = u[k] / v[k]
    if abs(abs(ph) - 1) > tol:
        return False
    return np.max(np.abs(u - ph * v)) <= tol


def concat(*programs: Sequence[GateProgram]) -> GateProgram:
    n = max(p.num_qubits for p in programs)
    out = GateProgram(n)
    for p in programs:
        out.extend(p.ops)
    return out
