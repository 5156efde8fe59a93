"""Decoherence of a singlet-triplet pair coupled to a spin bath.

Prints the envelope of |<S1z(t)>| for the central pair, starting from spin 1
up, spin 2 down and random bath spins. The fast 2*J0 oscillation is removed
analytically, so only the slow bath dynamics is integrated.

    python demos/spin_bath.py [L] [T] [dt]      (defaults 12 40 0.5)
"""
import sys

import numpy as np

from qcemu import hamiltonian as hm
from qcemu.propagators import kernel_chebyshev

L = int(sys.argv[1]) if len(sys.argv) > 1 else 12
T = float(sys.argv[2]) if len(sys.argv) > 2 else 40.0
dt = float(sys.argv[3]) if len(sys.argv) > 3 else 0.5

model = hm.build_spin_bath(L, seed=1)
slow = hm.without_pair_coupling(model)
a = hm.random_bath_state(L, seed=1).amplitudes
t, env = [], []
for n in range(int(round(T / dt)) + 1):
    m, c = hm.pair_magnetization_terms(a)
    t.append(n * dt)
    env.append(abs(m) + 2 * abs(c))
    print(f"{n * dt:7.2f}  {env[-1]:.4f}  " + "#" * int(100 * env[-1]))
    a = kernel_chebyshev(a, slow, 0.0, dt)

t, env = np.array(t), np.array(env)
tail = t >= t.max() / 4
r = np.corrcoef(t[tail], np.log(env[tail]))[0, 1]
print(f"log-linear fit over t >= {t.max() / 4:.1f}: slope {np.polyfit(t[tail], np.log(env[tail]), 1)[0]:.4f}, r = {r:.3f}")
