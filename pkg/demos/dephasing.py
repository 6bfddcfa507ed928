"""Pure dephasing (f2 = 0): frozen populations, coherence decay at 2 f1^2 g T.

Compares the Markovian rate with the long-time growth of the damping
integral  int_0^inf dw exp(-w/omega_c) coth(w/2T) (1 - cos w t).
"""
import math

import numpy as np

import qubitmaps as qm

bath = qm.REFERENCE_BATH
qubit = qm.QubitParams(omega0=5.0, f1=1.0, f2=0.0)
gen = qm.build_generator("redfield", qubit, bath)

rho0 = qm.from_bloch((0.6, 0.0, 0.5))
traj = qm.propagate(gen, rho0, np.linspace(0.0, 0.25, 26))
fit = qm.fit_decay_rates(traj, "dephasing")
print(f"fitted Gamma2 = {fit.gamma2:.8f}  (2 f1^2 g T = {2 * bath.g * bath.T})")
print("v_z along the trajectory:", sorted({float(round(qm.to_bloch(r).vz, 14)) for r in traj.states}))

print(f"\n{'t':>8} {'I(t), T=10':>14} {'I(t), T=20':>14}")
hot = qm.BathParams(1.0, 1.0, 100.0, 20.0)
for t in (1e-3, 1e-2, 0.1, 1.0, 2.0, 5.0, 10.0):
    print(f"{t:8.3f} {qm.dephasing_damping_integral(t, bath):14.6f} "
          f"{qm.dephasing_damping_integral(t, hot):14.6f}")

for b in (bath, hot):
    slope = (qm.dephasing_damping_integral(10.0, b) - qm.dephasing_damping_integral(2.0, b)) \
        / math.log(5.0)
    print(f"T={b.T:4.0f}: dI/dln t = {slope:.4f}")
