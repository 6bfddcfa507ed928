"""Principal-value quadrature and the Lamb-shift integrals.

Two independent routes to the same numbers live here:

* :func:`principal_value` excises each simple pole symmetrically, integrates
  the paired (even) combination ``f(x0+u) + f(x0-u)`` inside the excision and
  uses adaptive Gauss-Kronrod panels elsewhere. :func:`shift_delta` and
  :func:`shift_delta_pm` are built on it.
* :func:`epsilon_resolvent` evaluates the regularised integral
  ``int dw/2pi D(w) / (x - w + i eps)`` at finite ``eps`` with QUADPACK.
  Extrapolating a ladder of ``eps`` values to zero with
  :func:`extrapolate_to_zero` gives an oracle for the principal values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .bath import (
    BathParams,
    Regime,
    ZeroFreqLimit,
    bath_correlation,
    planck_occupation,
    spectral_density,
    zero_frequency_limit,
)
from .errors import DomainError, PoleCollisionError, QuadratureError, SubOhmicDivergenceError

__all__ = [
    "QuadratureConfig",
    "ShiftIntegrals",
    "adaptive_quad",
    "principal_value",
    "shift_delta",
    "shift_delta_pm",
    "shift_integrals",
    "epsilon_resolvent",
    "extrapolate_to_zero",
    "scale_breakpoints",
    "EPSILON_LADDER",
]

TWO_PI = 2.0 * math.pi

# Relative ladder used to extrapolate eps -> 0 (multiplied by a base eps).
EPSILON_LADDER = (1.0, 1e-1, 1e-2)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    tail_cutoff_multiplier: float = 50.0
    excision_halfwidth_factor: float = 1e-3
    max_panels: int = 20000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_cutoff_multiplier",
                     "excision_halfwidth_factor", "max_panels"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"QuadratureConfig.{name} must be > 0, got {value!r}")


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:15:2] = _WG[2::-1]


_ROUNDOFF = 100 * np.finfo(float).eps


def _gk15(f, lo, hi, magnitude):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    if magnitude:
        y, mag = f(x)
        mag = np.asarray(mag, dtype=float).reshape(-1, 15)
    else:
        y = f(x)
    y = np.asarray(y, dtype=float).reshape(-1, 15)
    if not magnitude:
        mag = np.abs(y)
    kron = half * (y @ _KRONROD)
    gauss = half * (y @ _GAUSS)
    return kron, np.abs(kron - gauss), np.abs(half) * (mag @ _KRONROD)


def adaptive_quad(f: Callable[[np.ndarray], np.ndarray], segments, *, rel_tol=1e-10,
                  abs_tol=1e-14, max_panels=20000, magnitude=False):
    """Globally adaptive Gauss-Kronrod (7/15) quadrature over a union of intervals.

    Parameters
    ----------
    f : callable
        Vectorised integrand, called with 1-d float arrays.
    segments : sequence of (lo, hi)
        Intervals to integrate over; their integrals are summed. Put known
        kinks or singular points on segment boundaries.
    rel_tol, abs_tol : float
        Stop when the summed error estimate is below ``max(abs_tol, rel_tol*|I|)``.
        Panels whose error estimate is at the roundoff level of
        ``integral |f|`` over the panel are not refined further, so for
        strongly cancelling integrands (principal values) the attainable
        accuracy is relative to ``integral |f|`` rather than ``|I|``.
    max_panels : int
        Hard limit on the number of live panels.
    magnitude : bool
        If true, ``f`` returns ``(values, scale)`` where ``scale`` bounds the
        size of the terms that were summed to form ``values``; it sets the
        roundoff floor for integrands computed with cancellation.

    Returns
    -------
    value, error, panels : float, float, int
    """
    seg = np.asarray(segments, dtype=float).reshape(-1, 2)
    seg = seg[seg[:, 1] > seg[:, 0]]
    if seg.size == 0:
        return 0.0, 0.0, 0
    lo, hi = seg[:, 0].copy(), seg[:, 1].copy()
    total_width = float(np.sum(hi - lo))
    done_val = 0.0
    done_err = 0.0
    n_done = 0
    while True:
        val, err, resabs = _gk15(f, lo, hi, magnitude)
        if not (np.all(np.isfinite(val)) and np.all(np.isfinite(err))):
            raise QuadratureError("integrand returned non-finite values",
                                  panels=n_done + lo.size)
        estimate = done_val + float(np.sum(val))
        error = done_err + float(np.sum(err))
        tol = max(abs_tol, rel_tol * abs(estimate))
        if error <= tol:
            return estimate, error, n_done + lo.size
        width = hi - lo
        # A panel that can no longer be halved in floating point is kept as is.
        tiny = width <= 64 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        roundoff = err <= _ROUNDOFF * resabs
        accept = (err <= tol * width / total_width) | tiny | roundoff
        if np.all(accept):
            return estimate, error, n_done + lo.size
        done_val += float(np.sum(val[accept]))
        done_err += float(np.sum(err[accept]))
        n_done += int(np.count_nonzero(accept))
        lo, hi = lo[~accept], hi[~accept]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        if n_done + lo.size > max_panels:
            raise QuadratureError(
                f"no convergence within {max_panels} panels: last estimate "
                f"{estimate:.16e}, error estimate {error:.3e}, tolerance {tol:.3e}",
                panels=n_done + lo.size, estimate=estimate, error=error)


def principal_value(integrand, poles: Sequence[float], domain, cfg: QuadratureConfig = None,
                    breakpoints: Sequence[float] = ()) -> float:
    """Cauchy principal value of ``integral integrand(x) dx`` over ``domain``.

    ``integrand`` is the full (vectorised) function including its simple
    poles at ``poles``. Around each pole ``x0`` a window of half-width
    ``excision_halfwidth_factor`` times the distance to the nearest other
    special point is integrated as ``int_0^h f(x0+u) + f(x0-u) du``, which
    removes the odd singular part exactly. ``breakpoints`` are extra points
    (kinks) where panels are split.
    """
    cfg = cfg or QuadratureConfig()
    a, b = map(float, domain)
    if not b > a:
        raise DomainError(f"empty integration domain {domain!r}")
    poles = sorted(float(p) for p in poles)
    for p in poles:
        if not a < p < b:
            raise DomainError(f"pole {p!r} is not interior to the domain [{a}, {b}]")
    brk = sorted({float(x) for x in breakpoints if a < x < b and x not in poles})

    halfwidths = []
    for i, p in enumerate(poles):
        others = [q for j, q in enumerate(poles) if j != i] + [a, b] + brk
        scale = min(abs(p - q) for q in others)
        if scale == 0.0:
            raise PoleCollisionError(f"pole at {p!r} coincides with another pole")
        halfwidths.append(cfg.excision_halfwidth_factor * scale)
    for (p, hp), (q, hq) in zip(zip(poles, halfwidths), zip(poles[1:], halfwidths[1:])):
        if q - p <= 2 * max(hp, hq):
            raise PoleCollisionError(
                f"poles {p!r} and {q!r} are closer than twice the excision half-width")

    edges = sorted({a, b, *brk, *(p - h for p, h in zip(poles, halfwidths)),
                    *(p + h for p, h in zip(poles, halfwidths))})
    windows = [(p - h, p + h) for p, h in zip(poles, halfwidths)]
    outer = [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])
             if not any(wl <= lo and hi <= wr for wl, wr in windows)]
    kwargs = dict(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_panels=cfg.max_panels)
    total, _, _ = adaptive_quad(integrand, outer, **kwargs)
    for p, h in zip(poles, halfwidths):
        def paired(u, p=p):
            # Round the node moving away from zero, then mirror the offset
            # actually realised; the mirrored node is exact, so the 1/u parts
            # cancel to the last bit.
            away = -1.0 if p < 0 else 1.0
            x_far = p + away * u
            x_near = p - (x_far - p)
            far, near = integrand(x_far), integrand(x_near)
            return far + near, np.abs(far) + np.abs(near)

        value, _, _ = adaptive_quad(paired, [(0.0, h)], magnitude=True, **kwargs)
        total += value
    return total


def _domain(bath: BathParams, omega0: float, cfg: QuadratureConfig):
    if not omega0 > 0:
        raise DomainError(f"omega0 must be > 0, got {omega0!r}")
    cutoff = cfg.tail_cutoff_multiplier * bath.omega_c
    if omega0 >= 0.5 * cutoff:
        raise DomainError(f"omega0={omega0} lies too close to the truncated tail at {cutoff}")
    return (-cutoff, cutoff)


def scale_breakpoints(bath: BathParams, limit: float, avoid: Sequence[float] = ()):
    """Points ``+-(T/4) 2^k`` up to ``limit``.

    D varies on the scale ``T`` near zero and on ``omega_c`` further out; a
    single wide panel can miss a narrow thermal feature entirely (both rules
    of the pair agree on a value near zero), so the domain is pre-split on a
    geometric grid anchored at zero. Grid points within a factor 1.5 of a
    pole in ``avoid`` are dropped: the excision window around a pole scales
    with the distance to its nearest neighbour.
    """
    base = 0.25 * min(bath.T, bath.omega_c)
    n = max(0, int(math.ceil(math.log2(limit / base))))
    pos = base * 2.0 ** np.arange(n)
    pos = pos[pos < limit]
    pts = np.concatenate([-pos[::-1], pos])
    for a in avoid:
        if a != 0:
            ratio = pts / a
            pts = pts[~((ratio > 2 / 3) & (ratio < 1.5))]
    return pts.tolist()


def shift_delta(bath: BathParams, omega0: float, cfg: QuadratureConfig = None) -> float:
    """Lamb shift ``P int dw/2pi D(w) [1/(w+w0) - 1/(w-w0)]``.

    Finite for every ``s > 0``; the point ``w = 0`` is a panel boundary so a
    sub-ohmic (integrable) singularity of D is never sampled.
    """
    cfg = cfg or QuadratureConfig()
    domain = _domain(bath, omega0, cfg)

    def f(w):
        return bath_correlation(w, bath) * (1.0 / (w + omega0) - 1.0 / (w - omega0))

    brk = [0.0] + scale_breakpoints(bath, domain[1], avoid=(omega0, -omega0))
    return principal_value(f, [-omega0, omega0], domain, cfg, breakpoints=brk) / TWO_PI


def shift_delta_pm(bath: BathParams, omega0: float, cfg: QuadratureConfig = None):
    """The pair ``(Delta_plus, Delta_minus)``.

    ``Delta_pm = 2 P int dw/2pi D(w) [1/(w +- w0) - 1/w]``. The pole at
    ``w = 0`` needs a finite D(0), so a sub-ohmic bath is rejected.
    """
    cfg = cfg or QuadratureConfig()
    if bath.regime is Regime.SUB_OHMIC:
        raise SubOhmicDivergenceError(
            f"Delta_pm diverges for a sub-ohmic bath (s={bath.s} < 1): D(0) is infinite")
    domain = _domain(bath, omega0, cfg)
    brk = scale_breakpoints(bath, domain[1], avoid=(omega0, -omega0))
    out = []
    for sign in (+1.0, -1.0):
        def f(w, sign=sign):
            return bath_correlation(w, bath) * (1.0 / (w + sign * omega0) - 1.0 / w)

        out.append(2.0 * principal_value(f, sorted([0.0, -sign * omega0]), domain, cfg, brk)
                   / TWO_PI)
    return out[0], out[1]


@dataclass(frozen=True)
class ShiftIntegrals:
    """Scalars entering the closed-form kernel blocks at a given omega0."""

    g0: float
    n0: float
    D0: ZeroFreqLimit
    delta: float
    delta_plus: float
    delta_minus: float

    def identity_defect(self) -> float:
        """``|2 Delta - (Delta_plus - Delta_minus)|``."""
        return abs(2.0 * self.delta - (self.delta_plus - self.delta_minus))

    def as_dict(self) -> dict:
        return {"g0": self.g0, "n0": self.n0, "D0": self.D0.value if not self.D0.is_infinite
                else math.inf, "Delta": self.delta, "Delta_plus": self.delta_plus,
                "Delta_minus": self.delta_minus}


def shift_integrals(bath: BathParams, omega0: float, cfg: QuadratureConfig = None) -> ShiftIntegrals:
    """Compute g0, n0, D0, Delta and Delta_pm for one qubit splitting."""
    cfg = cfg or QuadratureConfig()
    delta_plus, delta_minus = shift_delta_pm(bath, omega0, cfg)
    return ShiftIntegrals(
        g0=spectral_density(omega0, bath),
        n0=planck_occupation(omega0, bath.T),
        D0=zero_frequency_limit(bath),
        delta=shift_delta(bath, omega0, cfg),
        delta_plus=delta_plus,
        delta_minus=delta_minus,
    )


def epsilon_resolvent(bath: BathParams, x: float, epsilon: float, *, reflected: bool = False,
                      cfg: QuadratureConfig = None) -> complex:
    """Regularised resolvent ``int dw/2pi D(w) / (x - w + i*epsilon)``.

    With ``reflected=True`` the integrand uses ``D(-w)`` instead, which is the
    form appearing in the second and third terms of the Born-Markov kernel.
    As ``epsilon -> 0`` the imaginary part tends to ``-D(x)/2`` and the real
    part to the principal value divided by ``2 pi``.

    Uses QUADPACK on purpose, so that it shares no code with
    :func:`principal_value`.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon!r}")
    cfg = cfg or QuadratureConfig()
    cutoff = cfg.tail_cutoff_multiplier * bath.omega_c
    x = float(x)
    if not abs(x) < 0.5 * cutoff:
        raise DomainError(f"x={x} lies outside the integration window")
    if bath.regime is Regime.SUB_OHMIC and x == 0:
        raise SubOhmicDivergenceError("resolvent at x = 0 diverges for a sub-ohmic bath")

    sgn = -1.0 if reflected else 1.0

    def D(w):
        return bath_correlation(sgn * w, bath)

    opts = dict(limit=2000, epsabs=cfg.abs_tol, epsrel=max(cfg.rel_tol, 1e-12))
    eps = float(epsilon)
    h = abs(x) / 2 if x != 0 else min(bath.T, bath.omega_c)

    # Window |w - x| < h, folded onto u in (0, h).
    marks = [m for m in (eps, 10 * eps, 100 * eps) if m < h]
    re_in = integrate.quad(lambda u: (D(x - u) - D(x + u)) * u / (u * u + eps * eps),
                           0.0, h, points=marks or None, **opts)[0]
    theta_max = math.atan(h / eps)
    im_in = -integrate.quad(lambda t: D(x + eps * math.tan(t)) + D(x - eps * math.tan(t)),
                            0.0, theta_max, **opts)[0]

    def re_out(w):
        d = x - w
        return D(w) * d / (d * d + eps * eps)

    def im_out(w):
        d = x - w
        return -eps * D(w) / (d * d + eps * eps)

    re_tot, im_tot = re_in, im_in
    scale_pts = [0.0] + scale_breakpoints(bath, cutoff, avoid=(x,))
    for lo, hi in ((-cutoff, x - h), (x + h, cutoff)):
        pts = [p for p in scale_pts if lo < p < hi] or None
        re_tot += integrate.quad(re_out, lo, hi, points=pts, **opts)[0]
        im_tot += integrate.quad(im_out, lo, hi, points=pts, **opts)[0]
    return complex(re_tot, im_tot) / TWO_PI


def extrapolate_to_zero(eps, values):
    """Polynomial (Richardson/Neville) extrapolation of ``values(eps)`` to ``eps = 0``.

    ``values`` may be scalars or arrays of any common shape; complex is fine.
    """
    eps = [float(e) for e in eps]
    table = [np.asarray(v) for v in values]
    n = len(eps)
    if n != len(table) or n == 0:
        raise ValueError("need matching, non-empty eps and values sequences")
    for level in range(1, n):
        table = [(eps[i + level] * table[i] - eps[i] * table[i + 1]) / (eps[i + level] - eps[i])
                 for i in range(n - level)]
    out = table[0]
    return out.item() if out.ndim == 0 else out
