"""Closed-form generators against the kernel evaluated from scratch.

The oracle builds every matrix element of the Born-Markov kernel from
regularised resolvent integrals at three values of eps and extrapolates to
eps -> 0. With the energy selection rule the same construction gives the
Lindblad generator.
"""
import numpy as np

import qubitmaps as qm

np.set_printoptions(precision=5, suppress=True, linewidth=120)

qubit = qm.QubitParams(omega0=5.0, f1=1.0, f2=1.0)
bath = qm.REFERENCE_BATH
sh = qm.shift_integrals(bath, qubit.omega0)
print("shift integrals:", {k: round(v, 10) for k, v in sh.as_dict().items()})
print("identity defect |2D - (D+ - D-)|:", sh.identity_defect())

for name, closed, rule in (("redfield", qm.redfield_generator(qubit, bath, sh), "none"),
                           ("lindblad", qm.lindblad_generator(qubit, bath, sh),
                            "energy-conserving")):
    oracle = qm.generic_generator(qubit, bath, rule)
    ref = closed.matrix
    rel = np.abs(oracle.matrix - ref) / (np.abs(ref) + 1e-8 * np.abs(ref).max())
    print(f"\n{name} generator, index order {qm.INDEX_ORDER}")
    print(ref)
    print(f"max entrywise relative difference to the oracle: {rel.max():.2e}")
    print(qm.validate_generator(closed))

# Without the f1 channel the two models share a Gibbs steady state, but the
# Redfield coherence block still couples rho_pm and rho_mp.
q0 = qm.QubitParams(5.0, 0.0, 1.0)
diff = qm.redfield_generator(q0, bath, sh).matrix - qm.lindblad_generator(q0, bath, sh).matrix
print("\nf1 = 0, Redfield - Lindblad:")
print(diff)
