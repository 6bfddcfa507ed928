"""Upper-level steady-state population versus qubit splitting.

Bath: ohmic, g=1, omega_c=100, T=10; coupling f1 = f2 = 1. The Redfield
population goes negative past a threshold splitting, the Lindblad one is the
Gibbs value n0/(1+2n0) and stays positive. Writes population_sweep.csv next to this file.
"""
import os
import time

import numpy as np

import qubitmaps as qm

qubit = qm.QubitParams(omega0=5.0, f1=1.0, f2=1.0)
bath = qm.REFERENCE_BATH

t0 = time.perf_counter()
grid = np.linspace(1.0, 50.0, 200)
table = []
for w in grid:
    sh = qm.shift_integrals(bath, w)
    q = qm.QubitParams(w, qubit.f1, qubit.f2)
    red = qm.closed_form_steady_state(q, bath, sh)
    lin = qm.steady_state(qm.lindblad_generator(q, bath, sh))
    table.append((w, red.rho_pp, red.rho_pm.real, lin.rho_pp,
                  qm.positivity_report(red).min_eigenvalue))
table = np.array(table)
print(f"200-point sweep in {time.perf_counter() - t0:.2f}s")

print(f"{'omega0':>8} {'red rho_pp':>12} {'red rho_pm':>12} {'lin rho_pp':>12} {'red min eig':>12}")
for row in table[::20]:
    print("{:8.3f} {:12.6f} {:12.6f} {:12.6f} {:12.6f}".format(*row))

w_star = qm.negativity_threshold(qubit, bath, "redfield", bracket=(1.0, 50.0))
print(f"\nRedfield rho_pp changes sign at omega0* = {w_star:.6f}")
try:
    qm.negativity_threshold(qubit, bath, "lindblad", bracket=(1.0, 50.0))
except qm.NoCrossingError as exc:
    print(f"Lindblad: {exc}")

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "population_sweep.csv")
np.savetxt(out, table, delimiter=",", comments="",
           header="omega0,redfield_rho_pp,redfield_rho_pm,lindblad_rho_pp,redfield_min_eig")
print(f"wrote {out}")
