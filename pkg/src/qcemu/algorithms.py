"""Gate-level algorithms: QFT, period finding, two-qubit Grover search,
permutation order finding, Shor for N = 15 and a three-register adder."""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .gateset import GateOp, GateProgram, W_MAT, run
from .statevector import StateVector, basis_state

# ---------------------------------------------------------------------------
# quantum Fourier transform


def qft_program(qubits, include_swaps: bool = True, num_qubits: int | None = None) -> GateProgram:
    """b_k = 2^{-n/2} sum_j exp(2 pi i j k / 2^n) a_j on the listed qubits.

    ``qubits[0]`` is the least significant bit. Without the final swaps the
    output register is bit reversed.
    """
    qubits = list(qubits)
    n = len(qubits)
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    prog = GateProgram(num_qubits or max(qubits))
    for i in range(n - 1, -1, -1):
        prog.append(GateOp("W", (qubits[i],)))
        for m, c in enumerate(range(i - 1, -1, -1), start=1):
            prog.append(GateOp("CP", (qubits[c], qubits[i]), math.pi / 2 ** m))
    if include_swaps:
        for i in range(n // 2):
            prog.append(GateOp("SWAP", (qubits[i], qubits[n - 1 - i])))
    return prog


def dft_matrix(n_qubits: int) -> np.ndarray:
    N = 1 << n_qubits
    j = np.arange(N)
    return np.exp(2j * np.pi * np.outer(j, j) / N) / np.sqrt(N)


def _bit_reverse(q, n):
    return int(format(q, f"0{n}b")[::-1], 2)


def register_probabilities(state: StateVector, qubits, bit_reversed: bool = False) -> np.ndarray:
    """Marginal distribution of the integer held by `qubits` (first = LSB)."""
    L = state.num_qubits
    n = len(qubits)
    p = np.abs(state.amplitudes) ** 2
    idx = np.arange(1 << L)
    val = np.zeros_like(idx)
    for b, q in enumerate(qubits):
        val |= ((idx >> (q - 1)) & 1) << b
    out = np.bincount(val, weights=p, minlength=1 << n)
    if bit_reversed:
        out = out[[_bit_reverse(q, n) for q in range(1 << n)]]
    return out


def qubit_z_from_distribution(p: np.ndarray) -> tuple:
    """P(bit b = 1) for each bit of the register, LSB first."""
    n = int(round(math.log2(p.size)))
    q = np.arange(p.size)
    return tuple(float(p[((q >> b) & 1) == 1].sum()) for b in range(n))


# ---------------------------------------------------------------------------
# period finding


@dataclass
class PeriodSpectrum:
    probabilities: np.ndarray
    qubit_expectations: tuple


def _sin_ratio(a, x):
    """sin(a x) / sin(x) with the removable singularities filled in."""
    s = math.sin(x)
    if abs(s) < 1e-12:
        return a * math.cos(a * x) / math.cos(x)
    return math.sin(a * x) / s


def period_probability(q: int, M: int, N: int = 8) -> float:
    """Closed form probability to read q after the QFT, for period M."""
    L = N // M
    x = math.pi * q * M / N
    return M / N ** 2 * _sin_ratio(L, x) ** 2 + (N - M * L) / N ** 2 * _sin_ratio(2 * L + 1, x)


def period_find(M: int, N: int = 8) -> PeriodSpectrum:
    """Simulate QFT period finding for f(n) = n mod M, n = 0..N-1."""
    n = int(round(math.log2(N)))
    if 1 << n != N:
        raise ValueError("N must be a power of two")
    if not 1 <= M <= N:
        raise ValueError("need 1 <= M <= N")
    m = max(1, (M - 1).bit_length())
    L = n + m
    amps = np.zeros(1 << L, dtype=complex)
    for x in range(N):
        amps[x | ((x % M) << n)] = 1.0
    state = StateVector(L, amps / np.sqrt(N))
    reg = list(range(1, n + 1))
    run(state, _lift(qft_program(reg, include_swaps=False), L))
    p = register_probabilities(state, reg, bit_reversed=True)
    return PeriodSpectrum(p, qubit_z_from_distribution(p))


def _lift(prog: GateProgram, L: int) -> GateProgram:
    return GateProgram(L, list(prog.ops))


def infer_period(p: np.ndarray, N: int = 8) -> int:
    """Period whose closed-form spectrum is closest to the observed one."""
    best, err = None, np.inf
    for M in range(1, N + 1):
        ref = np.array([period_probability(q, M, N) for q in range(N)])
        e = np.abs(ref - p).max()
        if e < err - 1e-12:
            best, err = M, e
    return best


# ---------------------------------------------------------------------------
# Grover search on two qubits

G_MAT = np.diag(np.exp(1j * np.pi / 4 * np.array([-1, 1, 1, -1])))
_GROVER_MID = {0: "X1 Yb1 X2 Yb2", 1: "X1 Yb1 Xb2 Yb2", 2: "Xb1 Yb1 X2 Yb2", 3: "Xb1 Yb1 Xb2 Yb2"}
_SYMBOL = {"X": "X", "Xb": "Xbar", "Y": "Y", "Yb": "Ybar"}


def _ops_from_string(text: str) -> list:
    ops = []
    for tok in reversed(text.split()):
        if tok == "G":
            ops.append(GateOp("Custom2q", (1, 2), matrix=G_MAT))
        else:
            ops.append(GateOp(_SYMBOL[tok[:-1]], (int(tok[-1]),)))
    return ops


def grover_string(item: int) -> str:
    if item not in _GROVER_MID:
        raise ValueError("item must be 0..3")
    return f"X1 Yb1 X2 Yb2 G {_GROVER_MID[item]} G Xb2 Xb2 Yb2 Xb1 Xb1 Yb1"


def grover_program(item: int) -> GateProgram:
    """Optimized X/Y/G sequence with U_item |00> = |item> (up to a phase)."""
    return GateProgram(2, _ops_from_string(grover_string(item)))


def inversion_about_mean() -> np.ndarray:
    """B = W1 W2 P W1 W2 with P = diag(1, -1, -1, -1)."""
    W2 = np.kron(W_MAT, W_MAT)
    return W2 @ np.diag([1, -1, -1, -1]) @ W2


# ---------------------------------------------------------------------------
# permutation order finding

_GEN = {
    "N1": lambda x: x ^ 1,
    "N2": lambda x: x ^ 2,
    "C21": lambda x: x ^ 2 if x & 1 else x,   # control bit 0, flip bit 1
    "C12": lambda x: x ^ 1 if x & 2 else x,   # control bit 1, flip bit 0
}


def _as_perm(perm) -> tuple:
    perm = tuple(int(v) for v in perm)
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"{perm} is not a permutation of 0..3")
    return perm


def permutation_words(perm) -> list:
    """Shortest word in NOT/CNOT generators realizing the permutation of 2 bits.

    Generators act in list order. Every permutation of {0,1,2,3} is an
    affine map of GF(2)^2, so a word always exists.
    """
    target = _as_perm(perm)
    start = (0, 1, 2, 3)
    seen = {start: []}
    dq = deque([start])
    while dq:
        cur = dq.popleft()
        if cur == target:
            return seen[cur]
        for name, g in _GEN.items():
            nxt = tuple(g(v) for v in cur)
            if nxt not in seen:
                seen[nxt] = seen[cur] + [name]
                dq.append(nxt)
    raise AssertionError("unreachable")


def cycle_length(perm, y: int) -> int:
    perm = _as_perm(perm)
    r, x = 1, perm[y]
    while x != y:
        x = perm[x]
        r += 1
    return r


def _controlled_word(word, control, d0, d1):
    ops = []
    for g in word:
        if g == "N1":
            ops.append(GateOp("CNOT", (control, d0)))
        elif g == "N2":
            ops.append(GateOp("CNOT", (control, d1)))
        elif g == "C21":
            ops.append(GateOp("Toffoli", (control, d0, d1)))
        else:
            ops.append(GateOp("Toffoli", (control, d1, d0)))
    return ops


def permutation_order_program(perm, y: int) -> GateProgram:
    """5 qubits: 1..3 counting register, 4..5 data (4 = low bit).

    Prepares |y>, puts the register in uniform superposition, applies P^(2^b)
    controlled by register bit b, and ends with a QFT (no swaps) on the register.
    """
    perm = _as_perm(perm)
    if not 0 <= y < 4:
        raise ValueError("y must be 0..3")
    prog = GateProgram(5)
    for b, q in ((0, 4), (1, 5)):
        if (y >> b) & 1:
            prog.append(GateOp("NOT", (q,)))
    for q in (1, 2, 3):
        prog.append(GateOp("W", (q,)))
    word = permutation_words(perm)
    for b, ctrl in enumerate((1, 2, 3)):
        for _ in range(2 ** b):
            prog.extend(_controlled_word(word, ctrl, 4, 5))
    prog.extend(qft_program([1, 2, 3], include_swaps=False).ops)
    return prog


def permutation_order(perm, y: int):
    """Run the order-finding network; returns (inferred order, spectrum)."""
    prog = permutation_order_program(perm, y)
    st = run(basis_state(5, 0), prog)
    p = register_probabilities(st, [1, 2, 3], bit_reversed=True)
    return infer_period(p), PeriodSpectrum(p, qubit_z_from_distribution(p))


# ---------------------------------------------------------------------------
# Shor, N = 15

SHOR_BASES = (2, 4, 7, 8, 11, 13, 14)


def _cswap(c, a, b):
    return [GateOp("CNOT", (b, a)), GateOp("Toffoli", (c, a, b)), GateOp("CNOT", (b, a))]


def _controlled_times(mult: int, ctrl: int, f) -> list:
    """Controlled x -> mult * x mod 15 on the 4-qubit register f (f[0] = LSB).

    Valid for x in 1..14: *2 is a cyclic bit rotation and *(-1) = *14 is a
    bitwise NOT, and every unit mod 15 is +-2^r.
    """
    mult %= 15
    neg = False
    for r in range(4):
        if pow(2, r, 15) == mult:
            break
        if (15 - pow(2, r, 15)) == mult:
            neg = True
            break
    else:
        raise ValueError(f"{mult} is not a unit mod 15")
    ops = []
    # rotate left by r: x_b -> position b + r; done as r adjacent-swap cascades
    for _ in range(r):
        for b in (2, 1, 0):
            ops += _cswap(ctrl, f[b], f[b + 1])
    if neg:
        ops += [GateOp("CNOT", (ctrl, q)) for q in f]
    return ops


def shor15_program(a: int) -> GateProgram:
    """7 qubits: 1..3 QFT register (1 = LSB of j), 4..7 hold a^j mod 15."""
    if a not in SHOR_BASES:
        raise ValueError(f"a must be one of {SHOR_BASES}")
    f = [4, 5, 6, 7]
    prog = GateProgram(7)
    prog.append(GateOp("NOT", (f[0],)))          # f register starts at 1
    for q in (1, 2, 3):
        prog.append(GateOp("W", (q,)))
    if a == 11:
        # 1 -> 11 flips bits 1 and 3, both controlled by the register LSB; 11^2 = 1
        prog.extend([GateOp("CNOT", (1, f[1])), GateOp("CNOT", (1, f[3]))])
    else:
        for b, ctrl in enumerate((1, 2, 3)):
            m = pow(a, 2 ** b, 15)
            if m != 1:
                prog.extend(_controlled_times(m, ctrl, f))
    prog.extend(qft_program([1, 2, 3], include_swaps=False).ops)
    return prog


@dataclass
class ShorResult:
    a: int
    period: int
    factors: tuple
    gcd_arguments: tuple
    spectrum: PeriodSpectrum


def classical_order(a: int, n: int = 15) -> int:
    r, x = 1, a % n
    while x != 1:
        x = x * a % n
        r += 1
    return r


def shor15(a: int) -> ShorResult:
    st = run(basis_state(7, 0), shor15_program(a))
    p = register_probabilities(st, [1, 2, 3], bit_reversed=True)
    M = infer_period(p)
    args = ()
    factors = ()
    if M % 2 == 0:
        h = pow(a, M // 2)
        args = (h - 1, h + 1)
        factors = tuple(sorted({math.gcd(15, h - 1), math.gcd(15, h + 1)}))
    return ShorResult(a, M, factors, args, PeriodSpectrum(p, qubit_z_from_distribution(p)))


# ---------------------------------------------------------------------------
# three-register adder

ADDER_REGS = ((1, 2, 3, 4), (5, 6, 7, 8), (9, 10, 11, 12))


def adder3_network() -> GateProgram:
    """reg3 <- reg1 + reg2 + reg3 mod 16 on 12 qubits (LSB first in each register).

    QFT on register 3, phase kicks exp(2 pi i 2^(s+t) / 16) from every source bit
    s of registers 1 and 2 onto Fourier qubit t, inverse QFT.
    """
    r1, r2, r3 = ADDER_REGS
    prog = GateProgram(12)
    prog.extend(qft_program(r3, include_swaps=True).ops)
    for src in (r1, r2):
        for s, qs in enumerate(src):
            for t, qt in enumerate(r3):
                if s + t < 4:
                    prog.append(GateOp("CP", (qs, qt), 2 * math.pi * 2 ** (s + t) / 16))
    prog.extend(qft_program(r3, include_swaps=True).inverse().ops)
    return prog


def adder3_program(r1: int, r2: int, r3: int) -> GateProgram:
    """Input preparation (NOT gates) followed by the adder network."""
    prog = GateProgram(12)
    for val, reg in zip((r1, r2, r3), ADDER_REGS):
        if not 0 <= val < 16:
            raise ValueError("register values must be 0..15")
        for b, q in enumerate(reg):
            if (val >> b) & 1:
                prog.append(GateOp("NOT", (q,)))
    prog.extend(adder3_network().ops)
    return prog


def adder3(r1: int, r2: int, r3: int):
    """Returns (most likely value of register 3, its probability)."""
    st = run(basis_state(12, 0), adder3_program(r1, r2, r3))
    p = register_probabilities(st, ADDER_REGS[2])
    k = int(np.argmax(p))
    return k, float(p[k])


def adder3_exhaustive():
    """All 4096 inputs at once: the network acts on each basis state, so run it
    on a batch of states. Yields (r1, r2, r3, out, prob)."""
    net = adder3_network()
    from .gateset import _apply_raw
    for r1, r2 in itertools.product(range(16), range(16)):
        batch = np.zeros((16, 1 << 12), dtype=complex)
        for r3 in range(16):
            batch[r3, r1 | (r2 << 4) | (r3 << 8)] = 1.0
        for op in net.ops:
            _apply_raw(batch, op)
        p = np.abs(batch) ** 2
        for r3 in range(16):
            k = int(np.argmax(p[r3]))
            yield r1, r2, r3, k >> 8, float(p[r3, k]), k & 0xFF == (r1 | (r2 << 4))
