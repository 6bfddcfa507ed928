"""Self-check suite run by ``qubitmaps validate``.

Each check returns a :class:`CheckResult`; :func:`run_checks` times them and
routes sub-ohmic baths to the limit-formula checks only.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bath import BathParams, Regime, ZeroFreqLimit, bath_correlation, planck_occupation
from .dynamics import (
    closed_form_steady_state,
    positivity_report,
    propagate,
    from_bloch,
    steady_state,
    sub_ohmic_limit_state,
)
from .errors import InconsistentLimitsError
from .integrals import (
    EPSILON_LADDER,
    QuadratureConfig,
    ShiftIntegrals,
    epsilon_resolvent,
    extrapolate_to_zero,
    shift_integrals,
)
from .kernels import (
    QubitParams,
    generic_generator,
    lindblad_generator,
    redfield_generator,
    validate_generator,
)


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    detail: str = ""
    seconds: float = 0.0


def _status(ok):
    return "pass" if ok else "fail"


def _draws(seed, n, bath, qubit):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        b = BathParams(g=rng.uniform(0.2, 2.0), s=bath.s, omega_c=bath.omega_c,
                       T=rng.uniform(1.0, 20.0))
        q = QubitParams(omega0=rng.uniform(0.5, 50.0), f1=rng.uniform(-2, 2),
                        f2=rng.uniform(-2, 2))
        yield q, b


def check_detailed_balance(qubit, bath, cfg, tol):
    w = np.geomspace(1e-6, 40.0, 200) * bath.T
    lhs = bath_correlation(-w, bath)
    rhs = np.exp(-w / bath.T) * bath_correlation(w, bath)
    err = float(np.max(np.abs(lhs - rhs) / bath_correlation(w, bath)))
    return _status(err <= tol), f"max rel defect {err:.2e}"


def check_planck(qubit, bath, cfg, tol):
    import mpmath as mp

    x = np.geomspace(1e-8, 50.0, 60)
    with mp.workdps(50):
        ref = np.array([float(1 / mp.expm1(mp.mpf(float(v)))) for v in x])
    err = float(np.max(np.abs(planck_occupation(x, 1.0) / ref - 1)))
    return _status(err <= tol * 1e-3), f"max rel error {err:.2e}"


def check_shift_identity(qubit, bath, cfg, tol):
    worst = 0.0
    for q, b in _draws(5, 5, bath, qubit):
        s = shift_integrals(b, q.omega0, cfg)
        worst = max(worst, s.identity_defect() / (abs(s.delta_plus) + abs(s.delta_minus) + 1))
    return _status(worst <= tol * 1e2), f"max scaled defect {worst:.2e}"


def check_pv_vs_resolvent(qubit, bath, cfg, tol):
    s = shift_integrals(bath, qubit.omega0, cfg)
    ladder = [1e-2 * qubit.omega0 * k for k in EPSILON_LADDER]
    re = [extrapolate_to_zero(ladder, [epsilon_resolvent(bath, x, e, cfg=cfg) for e in ladder]).real
          for x in (qubit.omega0, -qubit.omega0)]
    oracle = re[0] - re[1]
    err = abs(s.delta - oracle) / max(abs(oracle), 1e-300)
    return _status(err <= tol * 1e4), f"Delta={s.delta:.10g} oracle={oracle:.10g} rel {err:.1e}"


def check_generator_oracle(qubit, bath, cfg, tol):
    s = shift_integrals(bath, qubit.omega0, cfg)
    worst = 0.0
    for closed, rule in ((redfield_generator(qubit, bath, s), "none"),
                         (lindblad_generator(qubit, bath, s), "energy-conserving")):
        oracle = generic_generator(qubit, bath, rule, cfg=cfg).matrix
        ref = closed.matrix
        diff = np.abs(oracle - ref) / (np.abs(ref) + 1e-8 * np.abs(ref).max())
        worst = max(worst, float(diff.max()))
    return _status(worst <= tol * 1e6), f"max entrywise rel diff {worst:.2e}"


def check_generator_structure(qubit, bath, cfg, tol):
    s = shift_integrals(bath, qubit.omega0, cfg)
    reports = [validate_generator(g) for g in (redfield_generator(qubit, bath, s),
                                               lindblad_generator(qubit, bath, s))]
    ok = all(r.ok(tol=tol * 1e-2, det_tol=tol) for r in reports)
    return _status(ok), "; ".join(
        f"{r.model.value}: trace {r.trace_defect:.1e} herm {r.hermiticity_defect:.1e} "
        f"det {r.relative_determinant:.1e}" for r in reports)


def check_closed_vs_null_space(qubit, bath, cfg, tol):
    worst = 0.0
    for q, b in _draws(11, 10, bath, qubit):
        s = shift_integrals(b, q.omega0, cfg)
        a = steady_state(redfield_generator(q, b, s)).matrix
        c = closed_form_steady_state(q, b, s).matrix
        worst = max(worst, float(np.max(np.abs(a - c))))
    return _status(worst <= tol * 1e2), f"max entry diff {worst:.2e}"


def check_positivity(qubit, bath, cfg, tol):
    worst = np.inf
    for q, b in _draws(17, 10, bath, qubit):
        s = shift_integrals(b, q.omega0, cfg)
        gen = lindblad_generator(q, b, s)
        worst = min(worst, positivity_report(steady_state(gen)).min_eigenvalue)
        traj = propagate(gen, from_bloch((0.6, -0.3, 0.7)), np.linspace(0, 2.0, 9))
        worst = min(worst, min(positivity_report(r).min_eigenvalue for r in traj.states))
    neg = min(positivity_report(closed_form_steady_state(
        QubitParams(w, 1.0, 1.0), bath, shift_integrals(bath, w, cfg))).min_eigenvalue
        for w in (15.0, 25.0, 35.0))
    ok = worst >= -tol * 1e-2 and (bath.regime is not Regime.OHMIC or neg < -1e-3)
    return _status(ok), f"Lindblad min eig {worst:.2e}; Redfield (f1=f2=1) min eig {neg:.3f}"


def check_sub_ohmic_limits(qubit, bath, cfg, tol):
    rng = np.random.default_rng(23)
    for _ in range(10):
        dp, dm = rng.normal(size=2)
        s = ShiftIntegrals(g0=1.0, n0=1.0, D0=ZeroFreqLimit.infinite(), delta=0.5 * (dp - dm),
                           delta_plus=dp, delta_minus=dm)
        rho = sub_ohmic_limit_state(qubit, bath, s)
        if rho.rho_pm != 0 or abs(rho.rho_pp + rho.rho_mm - 1) > tol * 1e-5:
            return "fail", "limit state has coherence or wrong trace"
    try:
        sub_ohmic_limit_state(qubit, bath, ShiftIntegrals(1.0, 1.0, ZeroFreqLimit.infinite(), 1.0, 3.0, 0.0))
    except InconsistentLimitsError:
        return "pass", "unit trace and zero coherence; inconsistent limits rejected"
    return "fail", "inconsistent limits were accepted"


REGULAR_CHECKS: list[tuple[str, Callable]] = [
    ("detailed_balance", check_detailed_balance),
    ("planck_stability", check_planck),
    ("shift_identity", check_shift_identity),
    ("pv_vs_resolvent", check_pv_vs_resolvent),
    ("generator_oracle", check_generator_oracle),
    ("generator_structure", check_generator_structure),
    ("closed_form_vs_null_space", check_closed_vs_null_space),
    ("positivity", check_positivity),
]
SUB_OHMIC_CHECKS = [("sub_ohmic_limits", check_sub_ohmic_limits)]


def run_checks(qubit: QubitParams, bath: BathParams, cfg: QuadratureConfig = None,
               tolerance: float = 1e-10) -> list[CheckResult]:
    """Run the suite.

    ``tolerance`` (default 1e-10) scales every pass threshold: shift identity
    and closed form vs null space at ``100*tol``, generator oracle at
    ``1e6*tol``, positivity and structure at ``1e-2*tol``.
    """
    cfg = cfg or QuadratureConfig()
    sub = bath.regime is Regime.SUB_OHMIC
    results = []
    for name, fn in REGULAR_CHECKS + SUB_OHMIC_CHECKS:
        applicable = (name == "detailed_balance" or name == "planck_stability"
                      or (sub == (name == "sub_ohmic_limits")))
        if not applicable:
            results.append(CheckResult(name, "skipped",
                                       "not applicable to the sub-ohmic regime" if sub
                                       else "sub-ohmic only"))
            continue
        start = time.perf_counter()
        try:
            status, detail = fn(qubit, bath, cfg, tolerance)
        except Exception as exc:  # reported, not raised
            status, detail = "fail", f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, status, detail, time.perf_counter() - start))
    return results
