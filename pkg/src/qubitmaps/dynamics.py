"""Steady states, time evolution and quantum-map diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg, optimize
from scipy.integrate import solve_ivp

from .bath import BathParams, Regime
from .errors import (
    BracketError,
    DomainError,
    InconsistentLimitsError,
    InsufficientDecayError,
    NoCrossingError,
    QuadratureError,
    RankDeficiencyError,
)
from .integrals import (QuadratureConfig, ShiftIntegrals, adaptive_quad, scale_breakpoints,
                        shift_integrals)
from .kernels import Generator, Model, QubitParams, build_generator, validate_generator

__all__ = [
    "DensityMatrix",
    "BlochVector",
    "Trajectory",
    "DecayRates",
    "PositivityReport",
    "steady_state",
    "closed_form_steady_state",
    "sub_ohmic_limit_state",
    "propagate",
    "propagate_ode",
    "to_bloch",
    "from_bloch",
    "positivity_report",
    "negativity_threshold",
    "decay_rates",
    "fit_decay_rates",
    "relaxation_gap",
    "dephasing_damping_integral",
]

STATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 qubit state in the energy basis (row/column 0 is the upper level).

    Hermiticity and unit trace are checked on construction to ``tol``.
    Positivity is deliberately *not* required: Redfield steady states may
    violate it, see :func:`positivity_report`.
    """

    matrix: np.ndarray
    tol: float = STATE_TOL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.tol is not None:
            if abs(m[1, 0] - np.conj(m[0, 1])) > self.tol or abs(m[0, 0].imag) > self.tol \
                    or abs(m[1, 1].imag) > self.tol:
                raise DomainError("density matrix is not Hermitian")
            if abs(np.trace(m) - 1) > self.tol:
                raise DomainError(f"density matrix trace {np.trace(m)} differs from 1")

    @classmethod
    def from_vec(cls, v, tol=STATE_TOL) -> "DensityMatrix":
        v = np.asarray(v, dtype=complex)
        return cls(np.array([[v[0], v[2]], [v[3], v[1]]]), tol)

    def vec(self) -> np.ndarray:
        """Vectorised form ``[rho_pp, rho_mm, rho_pm, rho_mp]``."""
        m = self.matrix
        return np.array([m[0, 0], m[1, 1], m[0, 1], m[1, 0]])

    @property
    def rho_pp(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def rho_mm(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def rho_pm(self) -> complex:
        return complex(self.matrix[0, 1])


@dataclass(frozen=True)
class BlochVector:
    """``rho = (I + vx sx + vy sy + vz sz) / 2``; ``vz = rho_pp - rho_mm``."""

    vx: float
    vy: float
    vz: float

    def norm(self) -> float:
        return math.sqrt(self.vx**2 + self.vy**2 + self.vz**2)

    def as_array(self):
        return np.array([self.vx, self.vy, self.vz])


def to_bloch(rho: DensityMatrix) -> BlochVector:
    """``vx = 2 Re rho_pm``, ``vy = 2 Im rho_mp``, ``vz = rho_pp - rho_mm``."""
    m = rho.matrix
    return BlochVector(2 * m[0, 1].real, 2 * m[1, 0].imag, (m[0, 0] - m[1, 1]).real)


def from_bloch(v) -> DensityMatrix:
    vx, vy, vz = (v.vx, v.vy, v.vz) if isinstance(v, BlochVector) else map(float, v)
    return DensityMatrix(0.5 * np.array([[1 + vz, vx - 1j * vy], [vx + 1j * vy, 1 - vz]]))


@dataclass(frozen=True)
class PositivityReport:
    eigenvalues: tuple
    min_eigenvalue: float
    hermiticity_defect: float
    trace_defect: float

    def is_physical(self, tol: float = 1e-12) -> bool:
        return (self.min_eigenvalue >= -tol and self.hermiticity_defect <= tol
                and self.trace_defect <= tol)


def positivity_report(rho: DensityMatrix) -> PositivityReport:
    """Eigenvalues (descending) of the Hermitian part plus structural defects."""
    m = rho.matrix
    a, d = m[0, 0].real, m[1, 1].real
    b = 0.5 * (m[0, 1] + np.conj(m[1, 0]))
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(b))
    lo = mean - radius
    if lo != 0 and mean != 0 and abs(lo) < 1e-8 * abs(mean):
        # product of eigenvalues is det, avoids cancellation in mean - radius
        lo = (a * d - abs(b) ** 2) / (mean + radius)
    defect = max(abs(m[1, 0] - np.conj(m[0, 1])), abs(m[0, 0].imag), abs(m[1, 1].imag))
    return PositivityReport(
        eigenvalues=(mean + radius, lo),
        min_eigenvalue=lo,
        hermiticity_defect=float(defect),
        trace_defect=float(abs(np.trace(m) - 1)),
    )


def steady_state(gen: Generator, *, full_output: bool = False, trace_tol: float = 1e-12):
    """Null vector of ``gen`` normalised to unit trace.

    The ``rho_pp`` row of the homogeneous system is replaced by the trace
    condition ``rho_pp + rho_mm = 1``. The result is symmetrised to be exactly
    Hermitian; with ``full_output`` a dict with the residual and the
    pre-symmetrisation Hermiticity defect is returned as well.
    """
    report = validate_generator(gen)
    if report.trace_defect > trace_tol * max(1.0, np.abs(gen.matrix).max()):
        raise DomainError(f"generator is not trace preserving (defect {report.trace_defect:.3e})")
    L = np.array(gen.matrix)
    A = L.copy()
    A[0] = [1, 1, 0, 0]
    b = np.array([1, 0, 0, 0], dtype=complex)
    if np.linalg.cond(A) > 1e13:
        raise RankDeficiencyError("steady state is not unique (degenerate null space)")
    v = np.linalg.solve(A, b)
    residual = float(np.linalg.norm(L @ v))
    norm = float(np.linalg.norm(L, 2))
    if residual > 1e-10 * max(norm, 1.0):
        raise RankDeficiencyError(f"steady-state residual {residual:.3e} too large")
    raw = np.array([[v[0], v[2]], [v[3], v[1]]])
    herm_defect = float(np.max(np.abs(raw - raw.conj().T)))
    rho = DensityMatrix(0.5 * (raw + raw.conj().T), tol=None)
    if full_output:
        return rho, {"residual": residual, "hermiticity_defect": herm_defect}
    return rho


def closed_form_steady_state(qubit: QubitParams, bath: BathParams,
                             shifts: ShiftIntegrals) -> DensityMatrix:
    """Analytic Redfield steady state for ohmic or super-ohmic baths.

    ``rho_pp = [(w0 + 2 f2^2 Delta) g0 n0 + 2 f1^2 D0 Delta_plus] / den``,
    ``rho_mm = [(w0 + 2 f2^2 Delta) g0 (1+n0) - 2 f1^2 D0 Delta_minus] / den``,
    ``rho_pm = rho_mp = f1 f2 g0 [n0 Delta_minus + (1+n0) Delta_plus] / den``,
    with ``den = (w0 + 2 f2^2 Delta) g0 (1+2n0) + 4 f1^2 D0 Delta``.
    """
    if shifts.D0.is_infinite:
        raise DomainError("D0 is infinite (sub-ohmic bath); use sub_ohmic_limit_state")
    w0, f1, f2 = qubit.omega0, qubit.f1, qubit.f2
    g0, n0, D0 = shifts.g0, shifts.n0, shifts.D0.value
    d, dp, dm = shifts.delta, shifts.delta_plus, shifts.delta_minus
    a = (w0 + 2 * f2**2 * d) * g0
    den = a * (1 + 2 * n0) + 4 * f1**2 * D0 * d
    if den == 0:
        raise ZeroDivisionError("closed-form steady state: common denominator vanishes")
    pp = (a * n0 + 2 * f1**2 * D0 * dp) / den
    mm = (a * (1 + n0) - 2 * f1**2 * D0 * dm) / den
    pm = f1 * f2 * g0 * (n0 * dm + (1 + n0) * dp) / den
    return DensityMatrix(np.array([[pp, pm], [pm, mm]]), tol=1e-9)


def sub_ohmic_limit_state(qubit: QubitParams, bath: BathParams, shifts: ShiftIntegrals,
                          tol: float = 1e-8) -> DensityMatrix:
    """Steady state in the sub-ohmic limit ``D0 -> infinity``.

    ``rho_pp = Delta_plus / (2 Delta)``, ``rho_mm = -Delta_minus / (2 Delta)``
    and no coherence. The shift values are taken as given limits; they must
    satisfy ``2 Delta = Delta_plus - Delta_minus`` to ``tol`` (relative).
    """
    if bath.regime is not Regime.SUB_OHMIC:
        raise DomainError(f"sub-ohmic limit requested for s={bath.s} >= 1")
    d, dp, dm = shifts.delta, shifts.delta_plus, shifts.delta_minus
    if d == 0:
        raise InconsistentLimitsError("Delta = 0: the sub-ohmic limit state is undefined")
    defect = abs(2 * d - (dp - dm))
    if defect > tol * (abs(dp) + abs(dm) + abs(d)):
        raise InconsistentLimitsError(
            f"2*Delta - (Delta_plus - Delta_minus) = {2 * d - (dp - dm):.3e} violates the identity")
    pp = dp / (2 * d)
    return DensityMatrix(np.array([[pp, 0.0], [0.0, 1.0 - pp]]))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.states):
            raise ValueError("times and states must have the same length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", tuple(self.states))

    def vectors(self) -> np.ndarray:
        return np.array([s.vec() for s in self.states])

    def trace_drift(self) -> float:
        v = self.vectors()
        return float(np.max(np.abs(v[:, 0] + v[:, 1] - 1)))

    def coherence(self) -> np.ndarray:
        return np.array([s.rho_pm for s in self.states])


TRACE_DRIFT_TOL = 1e-10


def propagate(gen: Generator, rho0: DensityMatrix, times: Sequence[float]) -> Trajectory:
    """``vec(rho(t)) = expm(L t) vec(rho0)`` at each requested time."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise DomainError("propagation times must be >= 0")
    L = np.array(gen.matrix)
    v0 = rho0.vec()
    states = []
    for t in times:
        v = v0 if t == 0 else linalg.expm(L * t) @ v0
        states.append(DensityMatrix.from_vec(v, tol=TRACE_DRIFT_TOL))
    return Trajectory(times, states)


def propagate_ode(gen: Generator, rho0: DensityMatrix, times: Sequence[float],
                  rtol: float = 1e-10, atol: float = 1e-12) -> Trajectory:
    """Reference trajectory from an adaptive Runge-Kutta (DOP853) integrator."""
    times = np.asarray(times, dtype=float)
    L = np.array(gen.matrix)
    sol = solve_ivp(lambda _t, y: L @ y, (0.0, float(times[-1])), rho0.vec(),
                    method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"reference integrator failed: {sol.message}")
    return Trajectory(times, [DensityMatrix.from_vec(sol.y[:, k], tol=None)
                              for k in range(len(times))])


def relaxation_gap(gen: Generator) -> float:
    """Smallest decay rate ``min |Re lambda|`` over the non-stationary modes."""
    ev = np.linalg.eigvals(np.array(gen.matrix))
    order = np.argsort(np.abs(ev))
    rates = -ev[order[1:]].real
    return float(np.min(rates))


@dataclass(frozen=True)
class DecayRates:
    """Coherence decay ``gamma1`` (f2 channel) and pure dephasing ``gamma2``.

    A fitted estimate fills only the requested channel and carries the
    RMS residual of the log-linear fit.
    """

    gamma1: float | None = None
    gamma2: float | None = None
    residual: float = 0.0


def decay_rates(qubit: QubitParams, shifts: ShiftIntegrals) -> DecayRates:
    """Analytic ``gamma1 = f2^2 g0 (1 + 2 n0) / 2`` and ``gamma2 = 2 f1^2 D0``."""
    return DecayRates(0.5 * qubit.f2**2 * shifts.g0 * (1 + 2 * shifts.n0),
                      2 * qubit.f1**2 * shifts.D0.value)


def fit_decay_rates(traj: Trajectory, channel: str = "coherence") -> DecayRates:
    """Least-squares fit of ``log |rho_pm(t)|`` to a straight line.

    ``channel`` is ``"coherence"`` (result in ``gamma1``) or ``"dephasing"``
    (result in ``gamma2``). The coherence must fall by at least ``e^2``.
    """
    if channel not in ("coherence", "dephasing"):
        raise ValueError(f"unknown channel {channel!r}")
    amp = np.abs(traj.coherence())
    if amp[0] == 0:
        raise InsufficientDecayError("initial coherence is zero")
    keep = amp > 1e-250
    t, y = traj.times[keep], np.log(amp[keep])
    if len(t) < 3 or y[0] - y[-1] < 2.0:
        raise InsufficientDecayError("coherence decays by less than e^2 over the trajectory")
    slope, intercept = np.polyfit(t, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * t + intercept)) ** 2)))
    rate = float(-slope)
    if channel == "coherence":
        return DecayRates(gamma1=rate, residual=residual)
    return DecayRates(gamma2=rate, residual=residual)


def _population(model, qubit, bath, cfg):
    shifts = shift_integrals(bath, qubit.omega0, cfg)
    if Model(model) is Model.REDFIELD:
        return closed_form_steady_state(qubit, bath, shifts).rho_pp
    return steady_state(build_generator(model, qubit, bath, shifts=shifts)).rho_pp


def negativity_threshold(qubit: QubitParams, bath: BathParams, model="redfield",
                         bracket=(10.0, 40.0), cfg: QuadratureConfig = None,
                         xtol: float = 1e-6) -> float:
    """Splitting ``omega0*`` where the upper-level population changes sign.

    ``qubit.omega0`` is ignored; ``f1`` and ``f2`` are kept. Bisection stops
    once the bracket is narrower than ``xtol``.
    """
    lo, hi = map(float, bracket)
    if not (0 < lo < hi):
        raise BracketError(f"invalid bracket {bracket!r}")

    def pop(w):
        return _population(model, QubitParams(w, qubit.f1, qubit.f2), bath, cfg)

    p_lo, p_hi = pop(lo), pop(hi)
    if p_lo > 0 and p_hi < 0:
        return float(optimize.bisect(pop, lo, hi, xtol=xtol))
    if p_lo > 0 and p_hi > 0:
        raise NoCrossingError(f"no crossing: quantum map preserved (rho_pp > 0 on "
                              f"[{lo}, {hi}] for the {Model(model).value} model)")
    raise BracketError(f"rho_pp({lo})={p_lo:.6g}, rho_pp({hi})={p_hi:.6g} do not bracket "
                       f"a positive-to-negative crossing")


def dephasing_damping_integral(t: float, bath: BathParams, cfg: QuadratureConfig = None) -> float:
    """``int_0^inf dw exp(-w/w_c) coth(w/2T) (1 - cos w t)`` for an ohmic bath.

    Panels are split at multiples of ``pi/t`` so that each holds half a
    period of the oscillating factor. The upper limit is truncated at
    ``tail_cutoff_multiplier * omega_c``.
    """
    cfg = cfg or QuadratureConfig()
    if bath.regime is not Regime.OHMIC:
        raise DomainError("the damping integral is defined here for the ohmic bath (s = 1)")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    if t == 0:
        return 0.0
    upper = cfg.tail_cutoff_multiplier * bath.omega_c
    n_half_periods = int(math.ceil(upper * t / math.pi))
    if n_half_periods > cfg.max_panels:
        raise QuadratureError(f"t={t} needs {n_half_periods} half-period panels "
                              f"(limit {cfg.max_panels})", panels=n_half_periods)
    edges = np.minimum(np.arange(n_half_periods + 1) * (math.pi / t), upper)
    scale = [p for p in scale_breakpoints(bath, upper) if p > 0]
    edges = np.unique(np.concatenate([edges, scale]))

    def f(w):
        return np.exp(-w / bath.omega_c) / np.tanh(w / (2 * bath.T)) * 2 * np.sin(0.5 * w * t) ** 2

    value, _, _ = adaptive_quad(f, np.column_stack([edges[:-1], edges[1:]]),
                                rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                                max_panels=max(cfg.max_panels, 4 * n_half_periods))
    return value
