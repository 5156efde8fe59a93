"""Time-evolution backends for |psi(t + tau)> = exp(-i tau H) |psi(t)>.

Backends: exact diagonalization, Chebyshev expansion, short-iterative
Lanczos, and second/fourth order Suzuki-Trotter product formulas with either
a pair split (one 4x4 factor per coupled pair) or an XYZ split (diagonal
phases, x and y parts rotated onto z).  ``evolve`` is the piecewise-constant
driver for time-dependent fields: each substep uses H at its midpoint.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import eigensolver
from .hamiltonian import SpinModel, apply_h_raw, dense_matrix, norm_bound, TWO_PI
from .gateset import X_MAT, Y_MAT
from .statevector import StateVector, kernel_1q, kernel_2q

BACKENDS = ("diag", "chebyshev", "lanczos", "st2-pair", "st4-pair", "st2-xyz", "st4-xyz")
_ALIAS = {
    "exact": "diag", "cheb": "chebyshev",
    "st2pair": "st2-pair", "st4pair": "st4-pair", "st2xyz": "st2-xyz", "st4xyz": "st4-xyz",
}
SUZUKI_A = 1.0 / (4.0 - 4.0 ** (1.0 / 3.0))


@dataclass(frozen=True)
class PropagatorConfig:
    """Backend choice and parameters. ``dt`` is the substep in units of t/2pi."""
    backend: str = "st4-pair"
    dt: float = 0.01
    lanczos_order: int = 5
    cheb_kappa: float = 1e-17
    cheb_kmax: int = 10_000_000
    reorthogonalize: bool = False
    diag_max_qubits: int = 13
    dense_max_dim: int = 16      # registers this small get batched dense propagators
    workers: int = 1

    def __post_init__(self):
        b = _ALIAS.get(self.backend.lower().replace("_", "-"), self.backend.lower().replace("_", "-"))
        if b not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; choose from {', '.join(BACKENDS)}")
        object.__setattr__(self, "backend", b)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.lanczos_order < 2:
            raise ValueError("lanczos_order must be at least 2")
        if not 0 < self.cheb_kappa < 1:
            raise ValueError("cheb_kappa must lie in (0, 1)")

    @property
    def is_suzuki(self):
        return self.backend.startswith("st")

    @property
    def order(self):
        return int(self.backend[2]) if self.is_suzuki else None

    @property
    def split(self):
        return self.backend.split("-")[1] if self.is_suzuki else None


# ---------------------------------------------------------------------------
# closed-form small exponentials

def single_spin_exponential(h_vec, tau):
    """exp(i tau h.S), i.e. the propagator of H = -h.S over time tau.

    Works on stacks: h_vec has shape (..., 3); returns (..., 2, 2).
    """
    h = np.asarray(h_vec, dtype=float)
    v = tau * h
    vn = np.sqrt(np.sum(v * v, axis=-1))
    c = np.cos(vn / 2)
    sc = 0.5 * np.sinc(vn / TWO_PI)      # sin(|v|/2)/|v|, finite at 0
    vx, vy, vz = v[..., 0], v[..., 1], v[..., 2]
    u = np.empty(h.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = c + 1j * sc * vz
    u[..., 1, 1] = c - 1j * sc * vz
    u[..., 0, 1] = sc * (1j * vx + vy)
    u[..., 1, 0] = sc * (1j * vx - vy)
    return u


def pair_exponential(Jx, Jy, Jz, tau):
    """exp(i tau (Jx SxSx + Jy SySy + Jz SzSz)) in the (bit_k bit_j) basis."""
    a = Jz / 4.0
    b = (Jx - Jy) / 4.0
    c = (Jx + Jy) / 4.0
    ep, em = np.exp(1j * a * tau), np.exp(-1j * a * tau)
    cb, sb = np.cos(b * tau), np.sin(b * tau)
    cc, scc = np.cos(c * tau), np.sin(c * tau)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = u[3, 3] = ep * cb
    u[0, 3] = u[3, 0] = 1j * ep * sb
    u[1, 1] = u[2, 2] = em * cc
    u[1, 2] = u[2, 1] = 1j * em * scc
    return u


# ---------------------------------------------------------------------------
# Bessel coefficients

def bessel_coeffs(z: float, K: int) -> np.ndarray:
    """J_0(z) .. J_K(z) by Miller's downward recurrence.

    The recurrence is started far enough above max(K, |z|) that the trial
    values have converged to the minimal solution, then normalized with
    J_0 + 2 sum_k J_2k = 1.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    out = np.zeros(K + 1)
    if z == 0.0:
        out[0] = 1.0
        return out
    sign_flip = z < 0
    x = abs(float(z))
    top = max(K, math.ceil(x))
    n0 = top + 20 + math.ceil(20.0 * x ** (1.0 / 3.0)) + math.ceil(math.sqrt(40.0 * top))
    n0 += n0 % 2
    b = np.zeros(n0 + 2)
    b[n0] = 1e-30
    two_over_x = 2.0 / x
    bk1, bk = 0.0, b[n0]
    for k in range(n0, 0, -1):
        bm = k * two_over_x * bk - bk1
        b[k - 1] = bm
        bk1, bk = bk, bm
        if abs(bm) > 1e250:
            b[k - 1:] *= 1e-250
            bk1 *= 1e-250
            bk *= 1e-250
    norm = b[0] + 2.0 * b[2:n0 + 1:2].sum()
    out[:] = b[: K + 1] / norm
    if sign_flip:
        out[1::2] *= -1.0
    return out


def chebyshev_order(tnorm: float, kappa: float = 1e-17, kmax: int = 10_000_000, run: int = 50) -> tuple[int, np.ndarray]:
    """Pick K: the last index before |J_k(tnorm)| stays below kappa for `run` terms.

    Returns (K, J[0..K]).
    """
    guess = int(tnorm + 30 + 10 * tnorm ** (1.0 / 3.0)) + run
    while True:
        if guess > kmax + run:
            raise MemoryError(f"Chebyshev expansion would need more than {kmax} terms")
        J = bessel_coeffs(tnorm, guess)
        small = np.abs(J) < kappa
        # first index k0 with small[k0:k0+run] all True
        if small.size >= run:
            win = np.convolve(small.astype(int), np.ones(run, dtype=int), mode="valid")
            hits = np.nonzero(win == run)[0]
            if hits.size:
                k0 = int(hits[0])
                K = max(k0 - 1, 0)
                if K > kmax:
                    raise MemoryError(f"Chebyshev expansion would need more than {kmax} terms")
                return K, J[: K + 1]
        guess *= 2


# ---------------------------------------------------------------------------
# kernels. All take raw amplitude arrays (last axis) and return the new array.

@lru_cache(maxsize=8)
def _static_eig(model: SpinModel):
    return eigensolver.eigh(dense_matrix(model, 0.0))


def kernel_diag(a, model: SpinModel, t_mid: float, tau: float, max_qubits: int = 13):
    """V exp(-i tau Lambda) V^H a with H(t_mid) diagonalized in-repo."""
    if model.num_spins > max_qubits:
        raise MemoryError(f"exact diagonalization capped at {max_qubits} qubits")
    if model.is_static:
        w, V = _static_eig(model)
    else:
        w, V = eigensolver.eigh(dense_matrix(model, t_mid))
    c = V.conj().T @ a.T if a.ndim > 1 else V.conj().T @ a
    c = c * (np.exp(-1j * tau * w)[:, None] if a.ndim > 1 else np.exp(-1j * tau * w))
    out = V @ c
    return out.T.copy() if a.ndim > 1 else out


def kernel_chebyshev(a, model: SpinModel, t_mid: float, tau: float, kappa=1e-17, kmax=10_000_000):
    nb = norm_bound(model)
    if nb == 0.0 or tau == 0.0:
        return a.copy()
    tn = tau * nb
    K, J = chebyshev_order(tn, kappa, kmax)
    inv = 1.0 / nb

    def Hn(v):
        return apply_h_raw(v, model, t_mid) * inv

    # exp(-i x tn) = J_0 + 2 sum_k (-i)^k J_k T_k(x)
    prev = a
    res = J[0] * a
    if K == 0:
        return res
    cur = Hn(a)
    res = res + (2.0 * (-1j) * J[1]) * cur
    ph = -1j
    for k in range(2, K + 1):
        nxt = 2.0 * Hn(cur) - prev
        prev, cur = cur, nxt
        ph *= -1j
        res += (2.0 * ph * J[k]) * cur
    return res


def kernel_lanczos(a, model: SpinModel, t_mid: float, tau: float, N: int = 5, reorthogonalize=False):
    """exp(-i tau P_N H P_N) a on the Krylov space of a."""
    if a.ndim != 1:
        return np.stack([kernel_lanczos(r, model, t_mid, tau, N, reorthogonalize) for r in a])
    nrm = np.linalg.norm(a)
    if nrm == 0.0:
        return a.copy()
    V = [a / nrm]
    alpha, beta = [], []
    for k in range(N):
        w = apply_h_raw(V[k], model, t_mid)
        al = np.vdot(V[k], w).real
        alpha.append(al)
        w = w - al * V[k]
        if k > 0:
            w -= beta[k - 1] * V[k - 1]
        if reorthogonalize:
            for q in V:
                w -= np.vdot(q, w) * q
        if k == N - 1:
            break
        b = np.linalg.norm(w)
        if b < 1e-14:
            break          # invariant subspace: exact from here on
        beta.append(b)
        V.append(w / b)
    m = len(alpha)
    w_eig, Z = eigensolver.tridiagonal_eigh(np.array(alpha), np.array(beta[: m - 1]))
    coef = Z @ (np.exp(-1j * tau * w_eig) * Z[0])
    out = np.zeros_like(a)
    for k in range(m):
        out += coef[k] * V[k]
    return nrm * out


# ---- Suzuki-Trotter -------------------------------------------------------

@lru_cache(maxsize=64)
def _axis_diag(model: SpinModel, axis: str):
    """Diagonal of -sum J^axis S^z S^z (the axis couplings rotated onto z)."""
    L = model.num_spins
    idx = np.arange(1 << L)
    d = np.zeros(1 << L)
    for (j, k, a), J in model.couplings:
        if a == axis:
            d -= J * (0.5 - ((idx >> (j - 1)) & 1)) * (0.5 - ((idx >> (k - 1)) & 1))
    return d


@lru_cache(maxsize=64)
def _axis_spins(model: SpinModel, axis: str):
    s = set()
    for (j, k, a), _ in model.couplings:
        if a == axis:
            s.update((j, k))
    return tuple(sorted(s))


# R^H S^z R = S^x for R = Y, and = -S^y for R = X; the sign cancels in the
# two-spin products, so Ybar e^{..SzSz..} Y and Xbar e^{..SzSz..} X do the job
_ROT_TO_Z = {"x": Y_MAT, "y": X_MAT}


def _field_factor(a, hvec, t):
    """Apply prod_j exp(i t h_j.S_j). hvec: (L, 3) or (B, 1, L, 3)."""
    L = hvec.shape[-2]
    for j in range(1, L + 1):
        hj = hvec[..., j - 1, :]
        if not np.any(hj):
            continue
        kernel_1q(a, j, single_spin_exponential(hj, t))


def _factor(a, model, term, hvec, t):
    kind = term[0]
    if kind == "fields":
        _field_factor(a, hvec, t)
    elif kind == "pair":
        _, j, k, (Jx, Jy, Jz) = term
        kernel_2q(a, j, k, pair_exponential(Jx, Jy, Jz, t))
    else:  # ("axis", a)
        ax = term[1]
        d = _axis_diag(model, ax)
        if ax == "z":
            a *= np.exp(-1j * t * d)
            return
        R = _ROT_TO_Z[ax]
        Rh = R.conj().T
        spins = _axis_spins(model, ax)
        for j in spins:
            kernel_1q(a, j, R)
        a *= np.exp(-1j * t * d)
        for j in spins:
            kernel_1q(a, j, Rh)


def _terms(model: SpinModel, split: str, hvec):
    terms = []
    if np.any(hvec):
        terms.append(("fields",))
    if split == "pair":
        terms += [("pair", j, k, J) for j, k, J in model.pairs]
    else:
        present = {a for (_, _, a), _ in model.couplings}
        terms += [("axis", ax) for ax in ("z", "x", "y") if ax in present]
    return terms


def _st2(a, model, terms, hvec, t):
    # U1(t/2) with factors in time order, then its mirror; the two middle
    # half steps of the last term are merged into one full step
    if not terms:
        return
    half = 0.5 * t
    for term in terms[:-1]:
        _factor(a, model, term, hvec, half)
    _factor(a, model, terms[-1], hvec, t)
    for term in reversed(terms[:-1]):
        _factor(a, model, term, hvec, half)


def _st_apply(a, model, hvec, tau, order, split):
    terms = _terms(model, split, hvec)
    if order == 2:
        _st2(a, model, terms, hvec, tau)
    else:
        p = SUZUKI_A
        for frac in (p, p, 1 - 4 * p, p, p):
            _st2(a, model, terms, hvec, frac * tau)
    return a


def kernel_st(a, model: SpinModel, t_mid: float, tau: float, order: int = 4, split: str = "pair"):
    """One Suzuki-Trotter step of length tau with fields frozen at t_mid."""
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    if split not in ("pair", "xyz"):
        raise ValueError("split must be 'pair' or 'xyz'")
    out = np.array(a, dtype=complex, copy=True)
    hvec = model.field_vectors(t_mid)
    return _st_apply(out, model, hvec, tau, order, split)


def _one_step(a, model, t_mid, tau, cfg: PropagatorConfig):
    b = cfg.backend
    if b == "diag":
        return kernel_diag(a, model, t_mid, tau, cfg.diag_max_qubits)
    if b == "chebyshev":
        return kernel_chebyshev(a, model, t_mid, tau, cfg.cheb_kappa, cfg.cheb_kmax)
    if b == "lanczos":
        return kernel_lanczos(a, model, t_mid, tau, cfg.lanczos_order, cfg.reorthogonalize)
    return kernel_st(a, model, t_mid, tau, cfg.order, cfg.split)


# ---------------------------------------------------------------------------
# driver

def substeps(tau: float, dt: float):
    """(number of full steps, remainder) splitting tau into steps of dt (raw time)."""
    n = int(math.floor(tau / dt + 1e-9))
    rem = tau - n * dt
    if rem <= 1e-12 * max(tau, 1.0):
        rem = 0.0
    return n, rem


def _diagonal_phases(model: SpinModel, t0: float, tau: float):
    """Exact propagator of a model whose terms are all z-diagonal.

    Everything commutes, so U = exp(-i int H dt) with the field integral done
    analytically.
    """
    d = model._zz_diag * tau
    for (j, ax), f in model.fields:
        if f.amplitude != 0.0 and f.omega != 0.0:
            integ = f.static * tau + f.amplitude * (
                math.cos(f.omega * t0 + f.phase) - math.cos(f.omega * (t0 + tau) + f.phase)) / f.omega
        elif f.amplitude != 0.0:
            integ = (f.static + f.amplitude * math.sin(f.phase)) * tau
        else:
            integ = f.static * tau
        d = d - integ * model._zsign[j]
    return np.exp(-1j * d)


def _step_times(t0, tau, dt_raw):
    n, rem = substeps(tau, dt_raw)
    mids = t0 + (np.arange(n) + 0.5) * dt_raw
    lens = np.full(n, dt_raw)
    if rem > 0:
        mids = np.append(mids, t0 + n * dt_raw + 0.5 * rem)
        lens = np.append(lens, rem)
    return mids, lens


def _chain(mats):
    """Ordered product M[-1] @ ... @ M[0] by pairwise tree reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            tail = mats[-1:]
            mats = np.concatenate([mats[1:-1:2] @ mats[0:-1:2], tail])
        else:
            mats = mats[1::2] @ mats[0::2]
    return mats[0]


def _dense_block(model, mids, lens, cfg):
    """Propagator for consecutive substeps, built for all of them at once."""
    D = 1 << model.num_spins
    B = mids.shape[0]
    if np.all(lens == lens[0]):
        lens_const = float(lens[0])
    else:
        lens_const = None
    if lens_const is None:
        # only the final, shorter step differs; handle it separately
        head = _dense_block(model, mids[:-1], lens[:-1], cfg) if B > 1 else np.eye(D, dtype=complex)
        tail = _dense_block(model, mids[-1:], lens[-1:], cfg)
        return tail @ head
    rows = np.broadcast_to(np.eye(D, dtype=complex), (B, D, D)).copy()
    hvec = model.field_vectors(mids)[:, None, :, :]          # (B, 1, L, 3)
    _st_apply(rows, model, hvec, lens_const, cfg.order, cfg.split)
    mats = np.swapaxes(rows, -1, -2)                        # columns = images
    return _chain(mats)


def segment_propagator(model: SpinModel, t0: float, tau: float, cfg: PropagatorConfig, chunk: int = 8192):
    """Dense D x D propagator of one segment (small registers only)."""
    D = 1 << model.num_spins
    if model.is_diagonal:
        return np.diag(_diagonal_phases(model, t0, tau))
    if model.is_static and cfg.backend == "diag":
        return kernel_diag(np.eye(D, dtype=complex), model, 0.0, tau, cfg.diag_max_qubits).T
    mids, lens = _step_times(t0, tau, cfg.dt * TWO_PI)
    if not cfg.is_suzuki:
        rows = np.eye(D, dtype=complex)
        for tm, h in zip(mids, lens):
            rows = _one_step(rows, model, tm, h, cfg)
        return rows.T.copy()
    blocks = [(mids[i:i + chunk], lens[i:i + chunk]) for i in range(0, mids.shape[0], chunk)]
    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(lambda b: _dense_block(model, b[0], b[1], cfg), blocks))
    else:
        parts = [_dense_block(model, m, l, cfg) for m, l in blocks]
    U = np.eye(D, dtype=complex)
    for P in parts:
        U = P @ U
    return U


def evolve_raw(a: np.ndarray, model: SpinModel, t0: float, tau: float, cfg: PropagatorConfig) -> np.ndarray:
    """Evolve amplitudes from t0 to t0 + tau (raw time). Returns a new array."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau == 0:
        return a.copy()
    if model.is_diagonal:
        return a * _diagonal_phases(model, t0, tau)
    if cfg.backend == "diag" and model.is_static:
        return kernel_diag(a, model, 0.0, tau, cfg.diag_max_qubits)
    dt = cfg.dt * TWO_PI
    D = a.shape[-1]
    n, _ = substeps(tau, dt)
    if cfg.is_suzuki and D <= cfg.dense_max_dim and n >= 4 * D:
        U = segment_propagator(model, t0, tau, cfg)
        return a @ U.T
    mids, lens = _step_times(t0, tau, dt)
    out = a
    for tm, h in zip(mids, lens):
        out = _one_step(out, model, tm, h, cfg)
    return out


def evolve(state: StateVector, model: SpinModel, t0: float, tau: float, cfg: PropagatorConfig) -> StateVector:
    """In-place evolution of `state` from time t0 over tau (both raw time)."""
    if model.num_spins != state.num_qubits:
        raise ValueError("model and state sizes differ")
    out = evolve_raw(state.amplitudes, model, t0, tau, cfg)
    out /= np.linalg.norm(out)
    state.amplitudes[:] = out
    return state
