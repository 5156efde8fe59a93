"""State vector storage and the elementary spin/qubit kernels.

Qubit ``j`` (1-based, as used everywhere at the API surface) lives in bit
``j - 1`` of the amplitude index, so qubit 1 is the least significant bit.
``|0>`` is spin up, the +1/2 eigenstate of S^z.

The kernels work on any ndarray whose *last* axis is the 2**L amplitude axis.
Leading axes are treated as a batch, which is how the propagator code builds
dense propagators for tiny registers without a second code path.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

UNITARY_TOL = 1e-10

_SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
SPIN_MATRICES = {"x": _SX, "y": _SY, "z": _SZ}


class QubitExpectation(NamedTuple):
    qx: float
    qy: float
    qz: float


class StateVector:
    """Complex amplitudes of an L-qubit pure state (mutated in place)."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes=None):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        dim = 1 << num_qubits
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=np.complex128)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.array(amplitudes, dtype=np.complex128)
            if amplitudes.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes, got shape {amplitudes.shape}")
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def __repr__(self):
        return f"StateVector(L={self.num_qubits}, norm={norm(self):.15g})"


def basis_state(L: int, index) -> StateVector:
    """|index>, where bit j-1 of index is the value of qubit j.

    ``index`` may also be a bit string written most significant qubit first,
    e.g. ``"10"`` is qubit 2 = 1, qubit 1 = 0.
    """
    if isinstance(index, str):
        if len(index) != L or set(index) - {"0", "1"}:
            raise ValueError(f"bad bit string {index!r} for {L} qubits")
        index = int(index, 2)
    if not 0 <= index < (1 << L):
        raise ValueError(f"basis index {index} out of range for {L} qubits")
    psi = StateVector(L)
    psi.amplitudes[0] = 0.0
    psi.amplitudes[index] = 1.0
    return psi


def from_amplitudes(amps) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128)
    L = int(round(np.log2(amps.shape[0])))
    if (1 << L) != amps.shape[0]:
        raise ValueError("length is not a power of two")
    return StateVector(L, amps)


# ---------------------------------------------------------------------------
# raw kernels on arrays (last axis = amplitudes)

def _nqubits(a) -> int:
    n = a.shape[-1].bit_length() - 1
    return n


def _check_qubit(j, L):
    if not 1 <= j <= L:
        raise ValueError(f"qubit {j} out of range 1..{L}")


def _pair_view(a, j):
    """View with axes (..., hi, 2, lo) where the middle axis is bit j-1."""
    lo = 1 << (j - 1)
    return a.reshape(a.shape[:-1] + (a.shape[-1] // (2 * lo), 2, lo))


def _quad_view(a, j, k):
    """View (..., hi, 2, mid, 2, lo); returns (view, axis of bit j, axis of bit k)."""
    p, q = sorted((j - 1, k - 1))
    D = a.shape[-1]
    shape = a.shape[:-1] + (D >> (q + 1), 2, 1 << (q - p - 1), 2, 1 << p)
    v = a.reshape(shape)
    n = v.ndim
    ax_hi, ax_lo = n - 4, n - 2
    if j - 1 == p:
        return v, ax_lo, ax_hi
    return v, ax_hi, ax_lo


def _sl(v, axis, bit):
    idx = [slice(None)] * v.ndim
    idx[axis] = bit
    return tuple(idx)


def _coef(u, r, c, extra):
    # u has shape batch + (n, n); add singleton axes so it broadcasts against slices
    x = u[..., r, c]
    if np.ndim(x) == 0:
        return x
    return x.reshape(x.shape + (1,) * extra)


def kernel_1q(a, j, u):
    """In place: apply 2x2 u (or a batch of them, shape (..., 2, 2)) to qubit j."""
    v = _pair_view(a, j)
    x0 = v[..., 0, :].copy()
    x1 = v[..., 1, :]
    u = np.asarray(u)
    c = [[_coef(u, r, s, 2) for s in range(2)] for r in range(2)]
    v[..., 0, :] = c[0][0] * x0 + c[0][1] * x1
    v[..., 1, :] = c[1][0] * x0 + c[1][1] * x1
    return a


def kernel_2q(a, j, k, u):
    """In place: apply 4x4 u on qubits (j, k); row index is 2*bit_k + bit_j."""
    v, aj, ak = _quad_view(a, j, k)
    u = np.asarray(u)
    comps = []
    for idx in range(4):
        bj, bk = idx & 1, idx >> 1
        s = [slice(None)] * v.ndim
        s[aj] = bj
        s[ak] = bk
        comps.append(tuple(s))
    old = [v[s].copy() for s in comps[:3]] + [v[comps[3]]]
    extra = 3
    for r in range(4):
        acc = None
        for c in range(4):
            coef = _coef(u, r, c, extra)
            if np.ndim(coef) == 0 and coef == 0:
                continue
            term = coef * old[c]
            acc = term if acc is None else acc + term
        if acc is None:
            v[comps[r]] = 0
        else:
            v[comps[r]] = acc
    return a


def kernel_diag(a, phases):
    a *= phases
    return a


def z_signs(L, j):
    """+1/2 where qubit j is 0, -1/2 where it is 1 (the diagonal of S^z_j)."""
    idx = np.arange(1 << L)
    return 0.5 - ((idx >> (j - 1)) & 1)


def accumulate_spin(out, a, axis, j, coef):
    """out += coef * S_j^axis a   (a untouched)."""
    vo = _pair_view(out, j)
    va = _pair_view(a, j)
    h = 0.5 * coef
    if axis == "z":
        vo[..., 0, :] += h * va[..., 0, :]
        vo[..., 1, :] -= h * va[..., 1, :]
    elif axis == "x":
        vo[..., 0, :] += h * va[..., 1, :]
        vo[..., 1, :] += h * va[..., 0, :]
    elif axis == "y":
        vo[..., 0, :] += (-1j * h) * va[..., 1, :]
        vo[..., 1, :] += (1j * h) * va[..., 0, :]
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return out


def accumulate_two_spin(out, a, axis, j, k, coef):
    """out += coef * S_j^axis S_k^axis a."""
    v_o, aj, ak = _quad_view(out, j, k)
    v_a, _, _ = _quad_view(a, j, k)
    q = 0.25 * coef

    def sl(bj, bk):
        s = [slice(None)] * v_o.ndim
        s[aj] = bj
        s[ak] = bk
        return tuple(s)

    for bj in (0, 1):
        for bk in (0, 1):
            if axis == "z":
                sign = 1.0 if bj == bk else -1.0
                v_o[sl(bj, bk)] += (sign * q) * v_a[sl(bj, bk)]
            elif axis == "x":
                v_o[sl(bj, bk)] += q * v_a[sl(1 - bj, 1 - bk)]
            elif axis == "y":
                # (S^y)(S^y) flips both bits; the i*(-i) factors give -1 when the
                # two source bits are equal and +1 otherwise
                sign = -1.0 if bj == bk else 1.0
                v_o[sl(bj, bk)] += (sign * q) * v_a[sl(1 - bj, 1 - bk)]
            else:
                raise ValueError(f"unknown axis {axis!r}")
    return out


# ---------------------------------------------------------------------------
# public operations on StateVector

def _check_unitary(u, n, tol):
    u = np.asarray(u, dtype=complex)
    if u.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got {u.shape}")
    if tol is not None and np.max(np.abs(u.conj().T @ u - np.eye(n))) > tol:
        raise ValueError("matrix is not unitary within tolerance")
    return u


def apply_spin(state: StateVector, axis: str, j: int) -> StateVector:
    """Replace the state by S_j^axis |state> (not normalized)."""
    _check_qubit(j, state.num_qubits)
    v = _pair_view(state.amplitudes, j)
    if axis == "z":
        v[..., 0, :] *= 0.5
        v[..., 1, :] *= -0.5
    elif axis == "x":
        t = v[..., 0, :].copy()
        v[..., 0, :] = 0.5 * v[..., 1, :]
        v[..., 1, :] = 0.5 * t
    elif axis == "y":
        t = v[..., 0, :].copy()
        v[..., 0, :] = -0.5j * v[..., 1, :]
        v[..., 1, :] = 0.5j * t
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return state


def apply_two_spin(state: StateVector, axis: str, j: int, k: int) -> StateVector:
    """Replace the state by S_j^axis S_k^axis |state>."""
    L = state.num_qubits
    _check_qubit(j, L)
    _check_qubit(k, L)
    if j == k:
        raise ValueError("two-spin operator needs distinct qubits")
    out = np.zeros_like(state.amplitudes)
    accumulate_two_spin(out, state.amplitudes, axis, j, k, 1.0)
    state.amplitudes[:] = out
    return state


def apply_1q_unitary(state: StateVector, j: int, u, tol=UNITARY_TOL) -> StateVector:
    _check_qubit(j, state.num_qubits)
    u = _check_unitary(u, 2, tol)
    kernel_1q(state.amplitudes, j, u)
    return state


def apply_2q_unitary(state: StateVector, j: int, k: int, u, tol=UNITARY_TOL) -> StateVector:
    L = state.num_qubits
    _check_qubit(j, L)
    _check_qubit(k, L)
    if j == k:
        raise ValueError("two-qubit gate needs distinct qubits")
    u = _check_unitary(u, 4, tol)
    kernel_2q(state.amplitudes, j, k, u)
    return state


def expectation(state: StateVector, j: int) -> QubitExpectation:
    """(qx, qy, qz) with Q^a = 1/2 - <S^a>; qz is P(qubit j reads 1)."""
    _check_qubit(j, state.num_qubits)
    v = _pair_view(state.amplitudes, j)
    a0 = v[..., 0, :]
    a1 = v[..., 1, :]
    p1 = float(np.sum(np.abs(a1) ** 2))
    p0 = float(np.sum(np.abs(a0) ** 2))
    c = np.vdot(a0, a1)  # sum conj(a0) a1
    sx = c.real          # <S^x> = Re(conj(a0) a1)
    sy = c.imag          # <S^y> = Im(conj(a0) a1)
    sz = 0.5 * (p0 - p1)
    return QubitExpectation(0.5 - sx, 0.5 - sy, 0.5 - sz)


def all_expectations(state: StateVector):
    return [expectation(state, j) for j in range(1, state.num_qubits + 1)]


def _same_size(a: StateVector, b: StateVector):
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different numbers of qubits")


def inner_product(a: StateVector, b: StateVector) -> complex:
    _same_size(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def norm(a: StateVector) -> float:
    return float(np.linalg.norm(a.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|, insensitive to global phase."""
    return abs(inner_product(a, b))


def normalize(a: StateVector) -> StateVector:
    a.amplitudes /= norm(a)
    return a
