"""Pulse-level runs of CNOT^5 and Grover's search on the two-spin NMR model.

Prints (Q1z, Q2z) for the ideal machine and for pulse strengths s = 8 .. 64
(Grover also s = 256). Takes about half a minute.

    python demos/nmr_tables.py
"""
from qcemu import pulsedesign as pd

S = (8, 16, 32, 64)

cnot = {"ideal": pd.cnot_power_table(8, ideal=True)}
cnot.update({s: pd.cnot_power_table(s) for s in S})
print("CNOT_v^5 on input".ljust(22) + "".join(f"{str(s):>13}" for s in cnot))
for v in (1, 2, 3):
    for x in pd.CNOT_INPUTS:
        cells = "".join(f"  {cnot[s][(v, x)][0]:.2f} {cnot[s][(v, x)][1]:.2f}  " for s in cnot)
        print(f"CNOT{v} |{x}>".ljust(22) + cells)

print()
grover = {"ideal": pd.grover_table(8, ideal=True)}
grover.update({s: pd.grover_table(s) for s in S + (256,)})
print("Grover item".ljust(22) + "".join(f"{str(s):>13}" for s in grover))
for item in range(4):
    print(f"{item}".ljust(22) + "".join(f"  {grover[s][item][0]:.2f} {grover[s][item][1]:.2f}  " for s in grover))
