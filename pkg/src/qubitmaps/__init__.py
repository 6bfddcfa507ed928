"""Steady states of a qubit coupled to a thermal bosonic bath.

Redfield and Lindblad generators for the composite coupling
``(f1 sigma_z + f2 sigma_x) E``, their shift integrals, steady states and
time evolution.
"""
from .bath import (REFERENCE_BATH, BathParams, Regime, ZeroFreqLimit, bath_correlation,
                   planck_occupation, spectral_density, zero_frequency_limit)
from .checks import CheckResult, run_checks
from .dynamics import (BlochVector, DecayRates, DensityMatrix, PositivityReport, Trajectory,
                       closed_form_steady_state, decay_rates, dephasing_damping_integral,
                       fit_decay_rates, from_bloch, negativity_threshold, positivity_report,
                       propagate, propagate_ode, relaxation_gap, steady_state,
                       sub_ohmic_limit_state, to_bloch)
from .errors import *  # noqa: F401,F403
from .integrals import (EPSILON_LADDER, QuadratureConfig, ShiftIntegrals, adaptive_quad,
                        scale_breakpoints,
                        epsilon_resolvent, extrapolate_to_zero, principal_value, shift_delta,
                        shift_delta_pm, shift_integrals)
from .kernels import (INDEX_ORDER, Generator, GeneratorReport, Model, QubitParams,
                      build_generator, coupling_matrix, energy_matrix, generic_generator,
                      lindblad_generator, redfield_generator, validate_generator)

__version__ = "0.1.0"
