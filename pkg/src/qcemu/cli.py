"""Command-line front end.

Program files are line oriented and case-insensitive for keywords::

    qubits 2
    init 00                      # index, bit string, `amps ...` or `random`
    gate W 1
    gate CP 2 1 angle pi/2
    pulses 64                    # named NMR pulses use s = 64 (N=1, M=4)
    pulse Y2
    micro free dur 0.5           # explicit segment, duration in t/2pi
      coupling 1 2 z -0.43e-6
      field 1 z static 1
      field 1 x static 0 sin amp 0.1 freq 1 phase 0
      ideal I 1 2 angle pi       # gate(s) substituted on the ideal backend
    expect after-grover
    assert qz 1 1.0 tol 1e-6

Every `init` starts a fresh run on the same register, so one file can hold a
whole results table.  `--s` overrides the `pulses` value.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .gateset import NEEDS_ANGLE, GateOp, GateProgram, _apply_raw
from .hamiltonian import (
    AXES,
    FieldTerm,
    Microinstruction,
    SpinModel,
    build_spin_bath,
    random_bath_state,
)
from .propagators import BACKENDS, PropagatorConfig, evolve_raw
from .pulsedesign import MicroRunner, TwoPiKParams, pulse_library
from .statevector import StateVector, all_expectations, basis_state

CLI_BACKENDS = ("ideal",) + BACKENDS
PULSE_S = (8, 16, 32, 64, 256)
DEFAULT_SEED = 20060101


class ProgramError(ValueError):
    def __init__(self, msg, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(loc + msg)
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# angle / number expressions

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e, "i": 1j}
_FUNCS = {"sqrt": np.sqrt, "sin": np.sin, "cos": np.cos, "exp": np.exp}


def eval_expr(text: str):
    """Evaluate `pi/2`, `-3*pi/4`, `1/sqrt(2)`, `0.5+0.5*i`, plain decimals."""
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ValueError(f"malformed expression {text!r}") from exc

    def ev(n):
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float)) and not isinstance(n.value, bool):
            return n.value
        if isinstance(n, ast.Name) and n.id.lower() in _NAMES:
            return _NAMES[n.id.lower()]
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.USub, ast.UAdd)):
            v = ev(n.operand)
            return -v if isinstance(n.op, ast.USub) else v
        if isinstance(n, ast.BinOp) and type(n.op) in _BINOPS:
            return _BINOPS[type(n.op)](ev(n.left), ev(n.right))
        if (isinstance(n, ast.Call) and isinstance(n.func, ast.Name)
                and n.func.id.lower() in _FUNCS and len(n.args) == 1 and not n.keywords):
            return _FUNCS[n.func.id.lower()](ev(n.args[0]))
        raise ValueError(f"malformed expression {text!r}")

    v = ev(node)
    if isinstance(v, complex) or np.iscomplexobj(v):
        return complex(v)
    return float(v)


def _real(text):
    v = eval_expr(text)
    if isinstance(v, complex):
        raise ValueError(f"expected a real number, got {text!r}")
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {text!r}")
    return v


def _fmt_num(v) -> str:
    v = complex(v)
    if v.imag == 0.0:
        return repr(float(v.real))
    return f"{v.real!r}+{v.imag!r}*i"


# ---------------------------------------------------------------------------
# program representation


@dataclass
class ProgramFile:
    """Parsed program: gate and microinstruction steps in execution order.

    instructions are tuples:
      ("init", index) | ("init", ("amps", tuple)) | ("init", "random")
      ("gate", GateOp) | ("micro", Microinstruction) | ("pulse", name)
      ("expect", label) | ("assert", component, qubit, value, tol)
    """
    num_qubits: int
    instructions: list = field(default_factory=list)
    pulses: tuple | None = None          # (s, N, M)

    @property
    def is_gate_program(self) -> bool:
        return all(ins[0] == "gate" for ins in self.instructions)

    def gate_program(self) -> GateProgram:
        ops = [ins[1] for ins in self.instructions if ins[0] == "gate"]
        return GateProgram(self.num_qubits, ops)


_PULSE_NAMES = ("X1", "X2", "Y1", "Y2", "Xb1", "Xb2", "Yb1", "Yb2",
                "X1'", "X2'", "Y1'", "X1''", "X2''", "I'")
_PULSE_LOOKUP = {n.lower(): n for n in _PULSE_NAMES}


def _gate_from_tokens(toks, L, lineno, col0):
    if not toks:
        raise ProgramError("gate name missing", lineno, col0)
    name = toks[0]
    rest = toks[1:]
    angle = None
    low = [t.lower() for t in rest]
    if "angle" in low:
        i = low.index("angle")
        expr = " ".join(rest[i + 1:])
        if not expr:
            raise ProgramError("angle expression missing", lineno)
        try:
            angle = _real(expr)
        except ValueError as exc:
            raise ProgramError(str(exc), lineno) from None
        rest = rest[:i]
    try:
        targets = tuple(int(t) for t in rest)
    except ValueError:
        raise ProgramError(f"bad qubit index in {' '.join(rest)!r}", lineno) from None
    for t in targets:
        if not 1 <= t <= L:
            raise ProgramError(f"qubit {t} out of range 1..{L}", lineno)
    try:
        op = GateOp(name, targets, angle)
    except ValueError as exc:
        raise ProgramError(str(exc), lineno, col0) from None
    if angle is not None and op.kind not in NEEDS_ANGLE:
        raise ProgramError(f"gate {op.kind} takes no angle", lineno)
    return op


def _finish_micro(pending, L):
    label, dur, cpl, fld, ideal, lineno = pending
    try:
        model = SpinModel.make(L, cpl, fld)
        return Microinstruction(label, dur, model, tuple(ideal))
    except ValueError as exc:
        raise ProgramError(str(exc), lineno) from None


def parse_program(text: str) -> ProgramFile:
    prog = None
    pending = None          # open micro block
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0] in " \t"
        toks = line.split()
        kw = toks[0].lower()
        col = len(line) - len(line.lstrip()) + 1
        if indented and pending is not None:
            _micro_line(pending, kw, toks, prog.num_qubits, lineno, col)
            continue
        if pending is not None:
            prog.instructions.append(("micro", _finish_micro(pending, prog.num_qubits)))
            pending = None
        if indented:
            raise ProgramError("indented line outside a micro block", lineno, col)
        if kw == "qubits":
            if prog is not None:
                raise ProgramError("qubits declared twice", lineno, col)
            try:
                L = int(toks[1])
            except (IndexError, ValueError):
                raise ProgramError("qubits needs an integer", lineno, col) from None
            if not 1 <= L <= 30:
                raise ProgramError("qubit count must be 1..30", lineno, col)
            prog = ProgramFile(L)
            continue
        if prog is None:
            raise ProgramError("program must start with `qubits <L>`", lineno, col)
        L = prog.num_qubits
        if kw == "init":
            prog.instructions.append(("init", _parse_init(toks[1:], L, lineno)))
        elif kw == "gate":
            prog.instructions.append(("gate", _gate_from_tokens(toks[1:], L, lineno, col + 5)))
        elif kw == "pulses":
            try:
                vals = [int(t) for t in toks[1:]]
                s, N, M = (vals + [1, 4])[:3] if len(vals) in (1, 3) else (None, None, None)
                TwoPiKParams.from_s(s, N, M)
            except (TypeError, ValueError) as exc:
                raise ProgramError(f"pulses needs `<s> [N M]`: {exc}", lineno, col) from None
            if L != 2:
                raise ProgramError("named pulses need a 2-qubit register", lineno, col)
            prog.pulses = (s, N, M)
        elif kw == "pulse":
            if len(toks) != 2 or toks[1].lower() not in _PULSE_LOOKUP:
                raise ProgramError(f"unknown pulse {' '.join(toks[1:])!r}", lineno, col)
            if prog.pulses is None:
                raise ProgramError("`pulse` before a `pulses <s>` line", lineno, col)
            prog.instructions.append(("pulse", _PULSE_LOOKUP[toks[1].lower()]))
        elif kw == "micro":
            if len(toks) != 4 or toks[2].lower() != "dur":
                raise ProgramError("expected `micro <label> dur <t/2pi>`", lineno, col)
            try:
                dur = _real(toks[3])
            except ValueError as exc:
                raise ProgramError(str(exc), lineno) from None
            if dur <= 0:
                raise ProgramError("duration must be positive", lineno)
            pending = [toks[1], dur, {}, {}, [], lineno]
        elif kw == "expect":
            prog.instructions.append(("expect", " ".join(toks[1:])))
        elif kw == "assert":
            prog.instructions.append(("assert",) + _parse_assert(toks, L, lineno))
        else:
            raise ProgramError(f"unknown keyword {toks[0]!r}", lineno, col)
    if prog is None:
        raise ProgramError("empty program")
    if pending is not None:
        prog.instructions.append(("micro", _finish_micro(pending, prog.num_qubits)))
    return prog


def _parse_init(args, L, lineno):
    if not args:
        raise ProgramError("init needs a value", lineno)
    head = args[0].lower()
    if head == "random":
        return "random"
    if head == "amps":
        try:
            amps = tuple(complex(eval_expr(t)) for t in args[1:])
        except ValueError as exc:
            raise ProgramError(str(exc), lineno) from None
        if len(amps) != 1 << L:
            raise ProgramError(f"init amps needs {1 << L} values, got {len(amps)}", lineno)
        if not np.linalg.norm(amps) > 0:
            raise ProgramError("zero state", lineno)
        return ("amps", amps)
    tok = args[0]
    try:
        if len(tok) == L and set(tok) <= {"0", "1"} and L > 1:
            idx = int(tok, 2)
        else:
            idx = int(tok)
    except ValueError:
        raise ProgramError(f"bad init value {tok!r}", lineno) from None
    if not 0 <= idx < 1 << L:
        raise ProgramError(f"basis index {idx} out of range", lineno)
    return idx


def _parse_assert(toks, L, lineno):
    # assert qz <j> <value> tol <t>
    if len(toks) != 6 or toks[1].lower() not in ("qx", "qy", "qz") or toks[4].lower() != "tol":
        raise ProgramError("expected `assert qz <j> <value> tol <t>`", lineno)
    try:
        j = int(toks[2])
        v = _real(toks[3])
        tol = _real(toks[5])
    except ValueError as exc:
        raise ProgramError(str(exc), lineno) from None
    if not 1 <= j <= L:
        raise ProgramError(f"qubit {j} out of range 1..{L}", lineno)
    return toks[1].lower(), j, v, tol


def _micro_line(pending, kw, toks, L, lineno, col):
    cpl, fld, ideal = pending[2], pending[3], pending[4]
    try:
        if kw == "coupling":
            if len(toks) != 5 or toks[3].lower() not in AXES:
                raise ValueError("expected `coupling <j> <k> <axis> <J>`")
            j, k = int(toks[1]), int(toks[2])
            for q in (j, k):
                if not 1 <= q <= L:
                    raise ValueError(f"qubit {q} out of range 1..{L}")
            key = (j, k, toks[3].lower())
            cpl[key] = cpl.get(key, 0.0) + _real(toks[4])
        elif kw == "field":
            # field <spin> <axis> static <v> [sin amp <v> freq <v> phase <v>]
            if len(toks) not in (5, 12) or toks[2].lower() not in AXES or toks[3].lower() != "static":
                raise ValueError("expected `field <j> <axis> static <v> [sin amp <v> freq <v> phase <v>]`")
            j = int(toks[1])
            if not 1 <= j <= L:
                raise ValueError(f"qubit {j} out of range 1..{L}")
            static = _real(toks[4])
            amp = omega = phase = 0.0
            if len(toks) == 12:
                if [toks[5].lower(), toks[6].lower(), toks[8].lower(), toks[10].lower()] != ["sin", "amp", "freq", "phase"]:
                    raise ValueError("expected `sin amp <v> freq <v> phase <v>`")
                amp, omega, phase = _real(toks[7]), _real(toks[9]), _real(toks[11])
            key = (j, toks[2].lower())
            if key in fld:
                raise ValueError(f"field on spin {j} axis {key[1]} given twice")
            fld[key] = FieldTerm(static, amp, omega, phase)
        elif kw == "ideal":
            ideal.append(_gate_from_tokens(toks[1:], L, lineno, col))
        else:
            raise ValueError(f"unknown micro line {toks[0]!r}")
    except ProgramError:
        raise
    except ValueError as exc:
        raise ProgramError(str(exc), lineno, col) from None


def serialize(prog: ProgramFile) -> str:
    out = [f"qubits {prog.num_qubits}"]
    if prog.pulses is not None:
        out.append("pulses " + " ".join(map(str, prog.pulses)))
    for ins in prog.instructions:
        kind = ins[0]
        if kind == "init":
            v = ins[1]
            if v == "random":
                out.append("init random")
            elif isinstance(v, tuple):
                out.append("init amps " + " ".join(_fmt_num(a) for a in v[1]))
            else:
                out.append(f"init {v}")
        elif kind == "gate":
            out.append(f"gate {ins[1]}")
        elif kind == "pulse":
            out.append(f"pulse {ins[1]}")
        elif kind == "micro":
            m = ins[1]
            out.append(f"micro {m.label} dur {m.duration!r}")
            for (j, k, a), J in m.model.couplings:
                out.append(f"  coupling {j} {k} {a} {J!r}")
            for (j, a), f in m.model.fields:
                s = f"  field {j} {a} static {f.static!r}"
                if f.amplitude != 0.0:
                    s += f" sin amp {f.amplitude!r} freq {f.omega!r} phase {f.phase!r}"
                out.append(s)
            for op in m.ideal:
                out.append(f"  ideal {op}")
        elif kind == "expect":
            out.append(f"expect {ins[1]}".rstrip())
        elif kind == "assert":
            _, comp, j, v, tol = ins
            out.append(f"assert {comp} {j} {v!r} tol {tol!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# execution


@dataclass
class RunReport:
    checkpoints: list            # [(label, [QubitExpectation])]
    amplitudes: list             # [(label, ndarray)] when requested
    timings: dict
    config: dict
    assertions: list             # [(description, passed)]

    @property
    def ok(self) -> bool:
        return all(p for _, p in self.assertions)


def run_program(prog: ProgramFile, backend: str = "ideal", cfg: PropagatorConfig | None = None,
                s: int | None = None, seed: int = DEFAULT_SEED, dump_amplitudes: bool = False) -> RunReport:
    if backend not in CLI_BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    ideal = backend == "ideal"
    if cfg is None:
        cfg = PropagatorConfig("st4-pair" if ideal else backend)
    elif not ideal and cfg.backend != backend:
        raise ValueError("backend flag and config disagree")
    t0 = time.perf_counter()
    lib = None
    s_used = None
    if prog.pulses is not None or any(ins[0] == "pulse" for ins in prog.instructions):
        s0, N, M = prog.pulses
        s_used = s if s is not None else s0
        lib = pulse_library(TwoPiKParams.from_s(s_used, N, M))
    t_build = time.perf_counter() - t0
    runner = MicroRunner(cfg, ideal=ideal)
    rng = np.random.default_rng(seed)
    L = prog.num_qubits
    state = basis_state(L, 0)
    checkpoints, amps, asserts = [], [], []
    t1 = time.perf_counter()
    for n, ins in enumerate(prog.instructions):
        kind = ins[0]
        if kind == "init":
            v = ins[1]
            if v == "random":
                z = rng.normal(size=1 << L) + 1j * rng.normal(size=1 << L)
                state = StateVector(L, z / np.linalg.norm(z))
            elif isinstance(v, tuple):
                a = np.array(v[1], dtype=complex)
                state = StateVector(L, a / np.linalg.norm(a))
            else:
                state = basis_state(L, v)
        elif kind == "gate":
            _apply_raw(state.amplitudes, ins[1])
        elif kind == "micro":
            runner.run(state, [ins[1]])
        elif kind == "pulse":
            runner.run(state, [lib[ins[1]]])
        elif kind == "expect":
            label = ins[1] or f"cp{len(checkpoints) + 1}"
            checkpoints.append((label, all_expectations(state)))
            if dump_amplitudes:
                amps.append((label, state.amplitudes.copy()))
        elif kind == "assert":
            _, comp, j, v, tol = ins
            q = getattr(all_expectations(state)[j - 1], comp)
            asserts.append((f"{comp}{j} = {q:.6g}, expected {v} +- {tol}", abs(q - v) <= tol))
    t_run = time.perf_counter() - t1
    conf = {"backend": backend, "dt": cfg.dt, "lanczos_order": cfg.lanczos_order,
            "cheb_kappa": cfg.cheb_kappa, "s": s_used, "seed": seed, "workers": cfg.workers}
    return RunReport(checkpoints, amps, {"build": t_build, "run": t_run}, conf, asserts)


def format_report(rep: RunReport, fmt: str = "table") -> str:
    lines = []
    if fmt == "table":
        c = rep.config
        head = f"# backend={c['backend']}"
        if c["backend"] != "ideal":
            head += f" dt={c['dt']:g}"
        if c["s"] is not None:
            head += f" s={c['s']}"
        lines.append(head)
        lines.append(f"{'checkpoint':<20} {'qubit':>5} {'Qx':>6} {'Qy':>6} {'Qz':>6}")
        for label, qs in rep.checkpoints:
            for j, q in enumerate(qs, start=1):
                lines.append(f"{label:<20} {j:>5} {_r2(q.qx):>6} {_r2(q.qy):>6} {_r2(q.qz):>6}")
        for label, a in rep.amplitudes:
            lines.append(f"# amplitudes {label}: " + " ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in a))
        for desc, ok in rep.assertions:
            lines.append(f"# assert {'PASS' if ok else 'FAIL'}: {desc}")
        lines.append(f"# time build={rep.timings['build']:.3f}s run={rep.timings['run']:.3f}s")
    elif fmt == "csv":
        lines.append("checkpoint,qubit,qx,qy,qz")
        for label, qs in rep.checkpoints:
            for j, q in enumerate(qs, start=1):
                lines.append(f"{label},{j},{q.qx:.15g},{q.qy:.15g},{q.qz:.15g}")
    elif fmt == "json-lines":
        amp = dict(rep.amplitudes)
        for label, qs in rep.checkpoints:
            rec = {"checkpoint": label,
                   "qubits": [{"qubit": j, "qx": q.qx, "qy": q.qy, "qz": q.qz} for j, q in enumerate(qs, 1)]}
            if label in amp:
                rec["amplitudes"] = [[z.real, z.imag] for z in amp[label]]
            lines.append(json.dumps(rec))
        lines.append(json.dumps({"config": rep.config, "timings": rep.timings,
                                 "assertions": [{"check": d, "passed": p} for d, p in rep.assertions]}))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join(lines) + "\n"


def _r2(x):
    # avoid printing -0.00
    return f"{x + 0.0:.2f}" if abs(x) >= 0.005 else "0.00"


# ---------------------------------------------------------------------------
# bundled programs


def bundled_dir():
    return resources.files("qcemu") / "programs"


def bundled_programs() -> list:
    return sorted(p.name for p in bundled_dir().iterdir() if p.name.endswith(".qp"))


def read_program_text(name: str) -> str:
    p = Path(name)
    if p.exists():
        return p.read_text()
    q = bundled_dir() / name
    if q.is_file():
        return q.read_text()
    raise FileNotFoundError(f"program {name!r} not found (bundled: {', '.join(bundled_programs())})")


# ---------------------------------------------------------------------------
# benchmark

BENCH_PRESETS = {"spin-bath-10": (10, 400), "spin-bath-12": (12, 400),
                 "spin-bath-18": (18, 40), "spin-bath-22": (22, 8)}
BENCH_BACKENDS = ("diag", "chebyshev", "lanczos", "st2-pair", "st4-pair", "st2-xyz", "st4-xyz")


def bench(preset: str, backends=None, steps: int | None = None, dt: float = 0.01, seed: int = DEFAULT_SEED,
          lanczos_order: int = 5, mem_cap_gb: float = 4.0, diag_max_qubits: int = 10):
    """Final-state error vs a one-leap Chebyshev reference, and CPU time.

    Returns [{backend, error, seconds}] with error None for the reference.
    """
    if preset not in BENCH_PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(BENCH_PRESETS)}")
    L, m = BENCH_PRESETS[preset]
    m = steps or m
    # a handful of work vectors of 2^L complex numbers per backend
    need = 8 * 16 * (1 << L)
    if need > mem_cap_gb * 2 ** 30:
        raise MemoryError(f"{preset} needs about {need / 2 ** 30:.1f} GiB, cap is {mem_cap_gb} GiB")
    backends = list(backends or BENCH_BACKENDS)
    model = build_spin_bath(L, seed=seed)
    psi = random_bath_state(L, seed=seed).amplitudes
    T = 2 * math.pi * dt * m
    t = time.process_time()
    ref = evolve_raw(psi, model, 0.0, T, PropagatorConfig("chebyshev", dt=dt * m))
    rows = [{"backend": "chebyshev", "error": None, "seconds": time.process_time() - t}]
    for b in backends:
        if b == "chebyshev":
            continue
        if b == "diag" and L > diag_max_qubits:
            rows.append({"backend": b, "error": None, "seconds": None, "skipped": "too large"})
            continue
        cfg = PropagatorConfig(b, dt=dt, lanczos_order=lanczos_order, diag_max_qubits=max(L, 1))
        t = time.process_time()
        out = evolve_raw(psi, model, 0.0, T, cfg)
        rows.append({"backend": b, "error": float(np.linalg.norm(out - ref)),
                     "seconds": time.process_time() - t})
    return rows


def format_bench(preset, rows) -> str:
    L, m = BENCH_PRESETS[preset]
    head = f"{preset}: L={L}, reference Chebyshev (*)"
    w = 12
    names = "".join(f"{r['backend']:>{w}}" for r in rows)
    errs = "".join(f"{'*' if r['error'] is None and r['seconds'] is not None else ('-' if r['error'] is None else format(r['error'], '.2E')):>{w}}" for r in rows)
    cpu = "".join(f"{('-' if r['seconds'] is None else format(r['seconds'], '.1f')):>{w}}" for r in rows)
    return "\n".join([head, f"{'':<12}{names}", f"{'Error':<12}{errs}", f"{'CPU time [s]':<12}{cpu}"]) + "\n"


# ---------------------------------------------------------------------------
# self test


def selftest(verbose: bool = True) -> bool:
    """Fast invariant checks on the installed package."""
    from . import algorithms, gateset
    from .hamiltonian import SpinModel as SM, dense_matrix

    checks = []

    def check(name, ok):
        checks.append(ok)
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}")

    U = gateset.program_matrix(gateset.cnot_sequence(1, 2))
    check("CNOT decomposition equals CNOT", np.allclose(U, gateset.CNOT_MAT, atol=1e-12))
    for n in (2, 3):
        Q = gateset.program_matrix(algorithms.qft_program(range(1, n + 1)))
        check(f"QFT on {n} qubits equals DFT", np.allclose(Q, algorithms.dft_matrix(n), atol=1e-12))
    for item in range(4):
        st = gateset.run(basis_state(2, 0), algorithms.grover_program(item))
        check(f"Grover finds item {item}", abs(abs(st.amplitudes[item]) - 1) < 1e-10)
    rng = np.random.default_rng(1)
    cpl = {(1, 2, a): rng.normal() for a in AXES}
    cpl.update({(2, 3, a): rng.normal() for a in AXES})
    fld = {(j, a): rng.normal() for j in (1, 2, 3) for a in AXES}
    model = SM.make(3, cpl, fld)
    H = dense_matrix(model)
    w, V = np.linalg.eigh(H)
    psi = basis_state(3, 5).amplitudes
    exact = V @ (np.exp(-1j * 0.3 * w) * (V.conj().T @ psi))
    tol = {"diag": 1e-10, "chebyshev": 1e-10, "lanczos": 1e-6, "st2-pair": 1e-2,
           "st4-pair": 1e-4, "st2-xyz": 1e-2, "st4-xyz": 1e-4}
    for b in BACKENDS:
        out = evolve_raw(psi, model, 0.0, 0.3, PropagatorConfig(b, dt=0.3 / (2 * math.pi) / 10, lanczos_order=8))
        check(f"{b} norm and accuracy", abs(np.linalg.norm(out) - 1) < 1e-12 and np.linalg.norm(out - exact) < tol[b])
    for name in bundled_programs():
        if "nmr" in name or name.startswith("adder"):
            continue
        prog = parse_program(read_program_text(name))
        ok = parse_program(serialize(prog)) == prog and run_program(prog).ok
        check(f"bundled {name} round trip and assertions", ok)
    return all(checks)


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    p = argparse.ArgumentParser(prog="qcemu", description="Gate-level and pulse-level quantum computer emulator.")
    p.add_argument("--program", help="program file (path or bundled name)")
    p.add_argument("--backend", default="ideal", choices=CLI_BACKENDS)
    p.add_argument("--dt", type=float, default=0.01, help="time substep in units of t/2pi")
    p.add_argument("--lanczos-order", type=int, default=5)
    p.add_argument("--cheb-kappa", type=float, default=1e-17)
    p.add_argument("--s", type=int, choices=PULSE_S, help="pulse parameter s = 2kMN^2 for named pulses")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--dump-amplitudes", action="store_true")
    p.add_argument("--format", default="table", choices=("table", "csv", "json-lines"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--selftest", action="store_true")
    p.add_argument("--bench", choices=sorted(BENCH_PRESETS))
    p.add_argument("--steps", type=int, help="override the number of benchmark steps")
    p.add_argument("--bench-backends", help="comma separated subset of backends for --bench")
    p.add_argument("--list-programs", action="store_true")
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.seed < 2 ** 64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        if args.list_programs:
            print("\n".join(bundled_programs()))
            return 0
        if args.selftest:
            return 0 if selftest() else 1
        if args.bench:
            backends = args.bench_backends.split(",") if args.bench_backends else None
            rows = bench(args.bench, backends, args.steps, args.dt, args.seed, args.lanczos_order)
            print(format_bench(args.bench, rows), end="")
            return 0
        if not args.program:
            parser.print_usage(sys.stderr)
            print("error: one of --program, --selftest, --bench, --list-programs is required", file=sys.stderr)
            return 2
        prog = parse_program(read_program_text(args.program))
        if prog.num_qubits > 26:
            gib = 16 * 2 ** prog.num_qubits / 2 ** 30
            print(f"warning: {prog.num_qubits} qubits need {gib:.0f} GiB per state vector", file=sys.stderr)
        cfg = PropagatorConfig("st4-pair" if args.backend == "ideal" else args.backend, dt=args.dt,
                               lanczos_order=args.lanczos_order, cheb_kappa=args.cheb_kappa,
                               workers=args.workers)
        rep = run_program(prog, args.backend, cfg, args.s, args.seed, args.dump_amplitudes)
        sys.stdout.write(format_report(rep, args.format))
        if not rep.ok:
            for desc, ok in rep.assertions:
                if not ok:
                    print(f"assertion failed: {desc}", file=sys.stderr)
            return 1
        return 0
    except (ValueError, FileNotFoundError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())
