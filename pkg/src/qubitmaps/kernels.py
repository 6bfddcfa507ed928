"""Redfield and Lindblad generators for a qubit with composite coupling.

The qubit Hamiltonian is ``(omega0/2) sigma_z`` with levels ``+`` (upper) and
``-`` (lower); the system part of the coupling is
``S = f1 sigma_z + f2 sigma_x``. Density matrices are vectorised in the fixed
order ``[rho_pp, rho_mm, rho_pm, rho_mp]`` so the generator splits into a
population block (indices 0, 1), a coherence block (2, 3) and two
interference blocks::

    L = [[ pop    int_a ]
         [ int_b  coh   ]]

The generator ``L = E + K + i Delta`` satisfies ``d vec(rho)/dt = L vec(rho)``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .bath import BathParams
from .errors import DomainError, SubOhmicDivergenceError
from .integrals import (
    EPSILON_LADDER,
    QuadratureConfig,
    ShiftIntegrals,
    epsilon_resolvent,
    extrapolate_to_zero,
    shift_integrals,
)

__all__ = [
    "INDEX_ORDER",
    "QubitParams",
    "Model",
    "Generator",
    "GeneratorReport",
    "coupling_matrix",
    "energy_matrix",
    "redfield_generator",
    "lindblad_generator",
    "generic_generator",
    "build_generator",
    "validate_generator",
]

INDEX_ORDER = ("++", "--", "+-", "-+")
# (p, p') pairs for each vector slot; 0 is the upper level, 1 the lower one.
_PAIRS = ((0, 0), (1, 1), (0, 1), (1, 0))
# vec index of (p', p) for the slot holding (p, p').
_SWAP = np.array([0, 1, 3, 2])


@dataclass(frozen=True)
class QubitParams:
    omega0: float = 5.0
    f1: float = 1.0
    f2: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.omega0) and self.omega0 > 0):
            raise DomainError(f"omega0 must be > 0 (non-degenerate qubit), got {self.omega0!r}")
        if not (np.isfinite(self.f1) and np.isfinite(self.f2)):
            raise DomainError("coupling amplitudes must be finite")

    @property
    def energies(self):
        return (0.5 * self.omega0, -0.5 * self.omega0)


class Model(str, enum.Enum):
    REDFIELD = "redfield"
    LINDBLAD = "lindblad"
    GENERIC = "generic"


def coupling_matrix(qubit: QubitParams) -> np.ndarray:
    """Energy-basis matrix of ``S = f1 sigma_z + f2 sigma_x``."""
    f1, f2 = float(qubit.f1), float(qubit.f2)
    return np.array([[f1, f2], [f2, -f1]])


def energy_matrix(omega0: float) -> np.ndarray:
    """Free part ``-i E_pp'`` of the generator: zero on populations."""
    return np.diag([0.0, 0.0, -1j * omega0, 1j * omega0])


@dataclass(frozen=True, eq=False)
class Generator:
    """Immutable 4x4 generator acting on ``[rho_pp, rho_mm, rho_pm, rho_mp]``."""

    matrix: np.ndarray
    model: Model
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"generator must be 4x4, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "model", Model(self.model))

    @property
    def pop(self):
        return self.matrix[:2, :2]

    @property
    def coh(self):
        return self.matrix[2:, 2:]

    @property
    def int_a(self):
        return self.matrix[:2, 2:]

    @property
    def int_b(self):
        return self.matrix[2:, :2]

    def __matmul__(self, other):
        return self.matrix @ other

    def to_json(self) -> str:
        """Row-major ``[re, im]`` pairs in :data:`INDEX_ORDER`."""
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return json.dumps({"model": self.model.value, "index_order": list(INDEX_ORDER),
                           "params": self.params, "matrix": rows})

    @classmethod
    def from_json(cls, text: str) -> "Generator":
        data = json.loads(text)
        if list(data.get("index_order", INDEX_ORDER)) != list(INDEX_ORDER):
            raise ValueError(f"unsupported index order {data['index_order']!r}")
        m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return cls(m, data["model"], data.get("params", {}))


def _closed_form_blocks(qubit: QubitParams, shifts: ShiftIntegrals):
    if shifts.D0.is_infinite:
        raise SubOhmicDivergenceError(
            "closed-form generators need a finite D0; use the sub-ohmic limit formulas")
    f1, f2 = qubit.f1, qubit.f2
    g0, n0, D0 = shifts.g0, shifts.n0, shifts.D0.value
    K_pop = f2**2 * g0 * np.array([[-1 - n0, n0], [1 + n0, -n0]])
    gamma1 = 0.5 * f2**2 * g0 * (1 + 2 * n0)
    K_coh_diag = -(gamma1 + 2 * f1**2 * D0) * np.eye(2)
    return f1, f2, g0, n0, D0, gamma1, K_pop, K_coh_diag


def redfield_generator(qubit: QubitParams, bath: BathParams, shifts: ShiftIntegrals) -> Generator:
    """Closed-form Redfield generator ``E + K + i Delta``.

    The coherence block carries, besides the diagonal damping, the
    non-secular coupling ``+gamma1`` between ``rho_pm`` and ``rho_mp`` that
    the Born-Markov kernel produces for the ``f2 sigma_x`` channel; it is
    required for the steady state to match the closed-form populations.
    """
    f1, f2, g0, n0, D0, gamma1, K_pop, K_coh = _closed_form_blocks(qubit, shifts)
    K_coh = K_coh + gamma1 * np.array([[0.0, 1.0], [1.0, 0.0]])
    K_int_a = f1 * f2 * D0 * np.array([[1.0, 1.0], [-1.0, -1.0]])
    K_int_b = f1 * f2 * g0 * np.array([[1 + n0, -n0], [1 + n0, -n0]])
    d, dp, dm = shifts.delta, shifts.delta_plus, shifts.delta_minus
    shift_coh = f2**2 * np.array([[-d, -d], [d, d]])
    shift_int = f1 * f2 * np.array([[dm, dp], [-dm, -dp]])

    m = energy_matrix(qubit.omega0)
    m[:2, :2] += K_pop
    m[:2, 2:] += K_int_a
    m[2:, :2] += K_int_b + 1j * shift_int
    m[2:, 2:] += K_coh + 1j * shift_coh
    return Generator(m, Model.REDFIELD, _params(qubit, bath))


def lindblad_generator(qubit: QubitParams, bath: BathParams, shifts: ShiftIntegrals) -> Generator:
    """Closed-form Lindblad generator obtained with the energy selection rule.

    Same population block and diagonal coherence damping as Redfield, no
    interference blocks and a diagonal shift ``f2^2 diag(-Delta, +Delta)``.
    """
    _, f2, *_, K_pop, K_coh = _closed_form_blocks(qubit, shifts)
    m = energy_matrix(qubit.omega0)
    m[:2, :2] += K_pop
    m[2:, 2:] += K_coh + 1j * f2**2 * np.diag([-shifts.delta, shifts.delta])
    return Generator(m, Model.LINDBLAD, _params(qubit, bath))


def _params(qubit, bath):
    return {"omega0": qubit.omega0, "f1": qubit.f1, "f2": qubit.f2,
            "g": bath.g, "s": bath.s, "omega_c": bath.omega_c, "T": bath.T}


def build_generator(model, qubit: QubitParams, bath: BathParams,
                    cfg: QuadratureConfig = None, shifts: ShiftIntegrals = None) -> Generator:
    """Convenience: compute the shift integrals and assemble ``model``."""
    model = Model(model)
    shifts = shifts or shift_integrals(bath, qubit.omega0, cfg)
    if model is Model.REDFIELD:
        return redfield_generator(qubit, bath, shifts)
    if model is Model.LINDBLAD:
        return lindblad_generator(qubit, bath, shifts)
    raise ValueError("use generic_generator for the integral-based construction")


def _born_markov_matrix(qubit, resolvent, selection_rule):
    # Element-by-element Born-Markov kernel for a single channel S. resolvent(x,
    # reflected) returns int dw/2pi D(+-w)/(x - w + i eps).
    S = coupling_matrix(qubit)
    E = qubit.energies
    conserve = selection_rule == "energy-conserving"
    tol = 1e-12 * qubit.omega0

    def delta(x):
        return (abs(x) < tol) if conserve else True

    M = np.zeros((4, 4), dtype=complex)
    for r, (p, pp) in enumerate(_PAIRS):
        for c, (q, qq) in enumerate(_PAIRS):
            val = 0j
            if pp == qq and delta(E[p] - E[q]):
                for l in (0, 1):
                    w = S[p, l] * S[l, q]
                    if w:
                        val += -1j * w * resolvent(E[q] - E[l], False)
            if p == q and delta(E[pp] - E[qq]):
                for l in (0, 1):
                    w = S[qq, l] * S[l, pp]
                    if w:
                        val += -1j * w * resolvent(E[l] - E[qq], True)
            w = S[p, q] * S[qq, pp]
            if w and delta((E[p] - E[q]) - (E[pp] - E[qq])):
                val += 1j * w * resolvent(E[pp] - E[qq], True)
                val += 1j * w * resolvent(E[q] - E[p], False)
            M[r, c] = val
    return energy_matrix(qubit.omega0) + M


def generic_generator(qubit: QubitParams, bath: BathParams, selection_rule: str = "none",
                      epsilon: float = None, cfg: QuadratureConfig = None, *,
                      extrapolate: bool = True) -> Generator:
    """Generator evaluated directly from the Born-Markov kernel integrals.

    Every resolvent ``int dw/2pi D(+-w)/(x - w + i eps)`` is computed by
    quadrature at finite ``eps``. With ``extrapolate`` (default) the
    generator is built at ``eps * EPSILON_LADDER`` and extrapolated entrywise
    to ``eps -> 0``. ``epsilon`` defaults to ``1e-2 * omega0``.

    ``selection_rule="energy-conserving"`` multiplies each term by its
    energy delta (Kronecker deltas for the non-degenerate qubit), which
    gives the Lindblad generator.
    """
    if selection_rule not in ("none", "energy-conserving"):
        raise ValueError(f"unknown selection rule {selection_rule!r}")
    eps0 = 1e-2 * qubit.omega0 if epsilon is None else float(epsilon)
    if not eps0 > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon!r}")
    ladder = [eps0 * k for k in EPSILON_LADDER] if extrapolate else [eps0]

    mats = []
    for eps in ladder:
        cache = {}

        def resolvent(x, reflected, eps=eps, cache=cache):
            key = (float(x), reflected)
            if key not in cache:
                cache[key] = epsilon_resolvent(bath, x, eps, reflected=reflected, cfg=cfg)
            return cache[key]

        mats.append(_born_markov_matrix(qubit, resolvent, selection_rule))
    m = extrapolate_to_zero(ladder, mats) if extrapolate else mats[0]
    params = dict(_params(qubit, bath), selection_rule=selection_rule, epsilon=eps0,
                  extrapolated=extrapolate)
    return Generator(m, Model.GENERIC, params)


@dataclass(frozen=True)
class GeneratorReport:
    trace_defect: float
    hermiticity_defect: float
    determinant: complex
    relative_determinant: float
    interference_norm: float
    model: Model

    def ok(self, tol: float = 1e-12, det_tol: float = 1e-10) -> bool:
        fine = (self.trace_defect <= tol and self.hermiticity_defect <= tol
                and self.relative_determinant <= det_tol)
        if self.model is Model.LINDBLAD:
            fine = fine and self.interference_norm == 0.0
        return fine


def validate_generator(gen: Generator) -> GeneratorReport:
    """Structural diagnostics of a generator.

    * ``trace_defect``: max entry of ``row(++) + row(--)`` (zero for a
      trace-preserving generator),
    * ``hermiticity_defect``: max ``|L[pp',qq'] - conj(L[p'p,q'q])|``,
    * ``relative_determinant``: ``|det L| / ||L||^4`` (zero when a steady state
      exists),
    * ``interference_norm``: max entry of the interference blocks.
    """
    m = gen.matrix
    # det and |det|/||L||^4 from eigenvalues and singular values: LU pivots can
    # be subnormal for tiny couplings and turn det into nan.
    sv = np.linalg.svd(m, compute_uv=False)
    scale = max(sv[0], np.finfo(float).tiny)
    det = complex(np.prod(np.linalg.eigvals(m)))
    return GeneratorReport(
        trace_defect=float(np.max(np.abs(m[0] + m[1]))),
        hermiticity_defect=float(np.max(np.abs(m - np.conj(m[_SWAP][:, _SWAP])))),
        determinant=det,
        relative_determinant=float(np.prod(sv / scale)),
        interference_norm=float(max(np.max(np.abs(gen.int_a)), np.max(np.abs(gen.int_b)))),
        model=gen.model,
    )
