"""Regenerate the bundled program files in src/qcemu/programs/.

    python tools/make_programs.py
"""
from pathlib import Path

import numpy as np

from qcemu import algorithms as alg
from qcemu import gateset as gs
from qcemu.cli import ProgramFile, serialize
from qcemu.gateset import GateOp
from qcemu.pulsedesign import CNOT_STRINGS, TwoPiKParams, grover_string, pulse_library

OUT = Path(__file__).resolve().parents[1] / "src" / "qcemu" / "programs"


def _expressible(op):
    # Custom2q matrices have no text form: the CNOT phase gate becomes I(pi)
    # (global phase only) and G = exp(-i pi Sz Sz) becomes R1(pi/2) R2(pi/2) CP(-pi)
    if op.kind != "Custom2q":
        return [op]
    j, k = op.targets
    if np.allclose(op.matrix, alg.G_MAT):
        return [GateOp("R", (j,), np.pi / 2), GateOp("R", (k,), np.pi / 2), GateOp("CP", (j, k), -np.pi)]
    return [GateOp("I", (j, k), np.pi)]


def gates(prog):
    return [("gate", e) for op in prog.ops for e in _expressible(op)]


def asserts(values, tol=1e-9):
    return [("assert", "qz", j, float(v), tol) for j, v in enumerate(values, start=1)]


def write(name, prog, header):
    text = "".join(f"# {h}\n" for h in header) + serialize(prog)
    (OUT / name).write_text(text)


def cnot_truth_table():
    p = ProgramFile(2)
    for idx in range(4):
        out = idx ^ 2 if idx & 1 else idx
        p.instructions += [("init", idx), ("gate", GateOp("CNOT", (1, 2))), ("expect", f"CNOT|{idx:02b}>")]
        p.instructions += asserts([out & 1, out >> 1], 1e-12)
    write("cnot.qp", p, ["CNOT (control 1, target 2) on the four basis states"])
    p = ProgramFile(2)
    for idx in range(4):
        out = idx ^ 2 if idx & 1 else idx
        p.instructions += [("init", idx)] + gates(gs.cnot_sequence(1, 2)) + [("expect", f"CNOT|{idx:02b}>")]
        p.instructions += asserts([out & 1, out >> 1], 1e-12)
    write("cnot-decomposed.qp", p, ["CNOT as Ybar2 I(pi) Y2 (Custom2q not expressible: uses I up to phase)"])


def toffoli():
    p = ProgramFile(3)
    for idx in range(8):
        out = idx ^ 4 if idx & 3 == 3 else idx
        p.instructions += [("init", idx)] + gates(gs.toffoli_sequence(1, 2, 3)) + [("expect", f"T|{idx:03b}>")]
        p.instructions += asserts([(out >> b) & 1 for b in range(3)], 1e-10)
    write("toffoli.qp", p, ["Toffoli (controls 1, 2; target 3) from the short X/Y/R/I network"])


def period(M):
    n = 3
    L = n + max(1, (M - 1).bit_length())
    amps = np.zeros(1 << L, dtype=complex)
    for x in range(8):
        amps[x | ((x % M) << n)] = 1 / np.sqrt(8)
    p = ProgramFile(L, [("init", ("amps", tuple(amps)))])
    p.instructions += gates(alg.qft_program([1, 2, 3], include_swaps=True, num_qubits=L))
    p.instructions.append(("expect", f"period-{M}"))
    p.instructions += asserts(alg.period_find(M).qubit_expectations, 1e-10)
    write(f"period-M{M}.qp", p, [f"QFT period finding for f(n) = n mod {M}, n = 0..7",
                                 "qubits 1-3 hold n (qubit 1 = LSB), the rest hold f(n)"])


def grover():
    p = ProgramFile(2)
    for item in range(4):
        p.instructions += [("init", 0)] + gates(alg.grover_program(item)) + [("expect", f"item-{item}")]
        p.instructions += asserts([item & 1, item >> 1], 1e-10)
    write("grover2.qp", p, ["two-qubit Grover search for each of the four items",
                            "G = exp(-i pi Sz Sz) written as R1(pi/2) R2(pi/2) CP(-pi), equal up to a global phase"])


def order():
    prog = alg.permutation_order_program((0, 3, 2, 1), 1)
    p = ProgramFile(5, gates(prog) + [("gate", GateOp("SWAP", (1, 3))), ("expect", "order")])
    p.instructions += asserts(list(alg.period_find(2).qubit_expectations), 1e-10)
    write("order-P0-2-13.qp", p, ["order of y = 1 under the permutation (0)(2)(13): expect 2"])


def shor():
    for a in alg.SHOR_BASES:
        M = alg.classical_order(a)
        p = ProgramFile(7, gates(alg.shor15_program(a)) + [("gate", GateOp("SWAP", (1, 3))), ("expect", f"a={a}")])
        p.instructions += asserts(list(alg.period_find(M).qubit_expectations), 1e-10)
        write(f"shor15-a{a}.qp", p, [f"Shor for N = 15, a = {a}: register 1-3 shows period {M}"])


def adder():
    for r in ((1, 2, 3), (1, 1, 1), (9, 9, 9)):
        s = sum(r) % 16
        p = ProgramFile(12, gates(alg.adder3_program(*r)) + [("expect", "+".join(map(str, r)))])
        p.instructions += [("assert", "qz", 9 + b, float((s >> b) & 1), 1e-10) for b in range(4)]
        write(f"adder-{'+'.join(map(str, r))}.qp", p, [f"register 3 <- {r[0]} + {r[1]} + {r[2]} mod 16 = {s}"])


def _pulses(text):
    return [("pulse", name) for name in reversed(text.split())]


SINGLET = (0.0, 2 ** -0.5, -(2 ** -0.5), 0.0)


def nmr():
    for v, text in CNOT_STRINGS.items():
        p = ProgramFile(2, pulses=(64, 1, 4))
        for idx in range(4):
            p.instructions += [("init", idx)] + _pulses(text) * 5 + [("expect", f"CNOT{v}^5|{idx:02b}>")]
        p.instructions += [("init", ("amps", SINGLET))] + _pulses(text) * 5
        p.instructions += [("gate", GateOp("Y", (1,))), ("expect", f"Y1CNOT{v}^5|singlet>")]
        write(f"cnot{v}-nmr.qp", p, [f"five CNOT{v} pulse sequences on the NMR model; pick s with --s"])
    p = ProgramFile(2, pulses=(64, 1, 4))
    for item in range(4):
        p.instructions += [("init", 0)] + _pulses(grover_string(item)) + [("expect", f"item-{item}")]
    write("grover2-nmr.qp", p, ["Grover search as pulse sequences on the NMR model; pick s with --s"])
    # one CNOT1 with every segment spelled out, to exercise the micro grammar
    lib = pulse_library(TwoPiKParams.from_s(8))
    p = ProgramFile(2)
    for idx in range(4):
        p.instructions += [("init", idx)]
        p.instructions += [("micro", lib[name]) for name in reversed(CNOT_STRINGS[1].split())]
        p.instructions += [("expect", f"CNOT1|{idx:02b}>")]
    write("cnot1-nmr-explicit-s8.qp", p, ["CNOT1 at s = 8 with every microinstruction written out"])


def main():
    OUT.mkdir(exist_ok=True)
    cnot_truth_table()
    toffoli()
    for M in range(1, 9):
        period(M)
    grover()
    order()
    shor()
    adder()
    nmr()


if __name__ == "__main__":
    main()
