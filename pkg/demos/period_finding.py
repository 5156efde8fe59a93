"""QFT period finding on three qubits: spectrum and qubit expectations for M = 1..8.

    python demos/period_finding.py
"""
from qcemu import algorithms as al

print(" M  " + " ".join(f"  p{q}   " for q in range(8)) + "   Q1z   Q2z   Q3z  period")
for M in range(1, 9):
    spec = al.period_find(M)
    p = " ".join(f"{x:.5f}" for x in spec.probabilities)
    q = " ".join(f"{x:.3f}" for x in spec.qubit_expectations)
    print(f"{M:2d}  {p}  {q}  {al.infer_period(spec.probabilities):4d}")

print()
for a in al.SHOR_BASES:
    r = al.shor15(a)
    print(f"Shor N=15, a={a:2d}: period {r.period}, gcd arguments {r.gcd_arguments}, factors {r.factors}")
