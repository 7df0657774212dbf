"""Analytic success probabilities of the universal unambiguous discriminator.

Registers: program A holds ``n_A`` copies of ``phi1``, program C holds ``n_C``
copies of ``phi2`` and the data register B holds ``n_B`` copies of one of them.
The measurement is block diagonal in the two-row Young diagrams ``[N-k, k]``;
block ``k`` has Jordan overlap ``O_k`` between the two input supports and a
pair of failure parameters ``(q1, q2)`` with ``q1 * q2 = O_k**2``.

The success probability for pure inputs with ``s = |<phi1|phi2>| = cos(beta/2)``
is assembled from block expectations ``E(u, v, k, beta)``: the weight of a
rotated spin ``v/2`` coupled to a stretched spin ``u/2`` in total spin
``(u+v)/2 - k``.  Side 1 uses ``(u, v) = (n1, n_C)``, side 2 ``(n_A, n2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .angmom import (
    AngmomDomainError,
    YoungTwoRow,
    binomial,
    clebsch_gordan,
    factorial,
    gauss_2f1_terminating,
    sym_dim,
    weyl_dim,
    wigner_6j,
    wigner_d_stretched_sq,
)

__all__ = [
    "DegeneratePriorError",
    "IllConditionedError",
    "CopyConfig",
    "Priors",
    "Overlap",
    "Regime",
    "BlockData",
    "BlockTerm",
    "PspBreakdown",
    "jordan_overlaps",
    "jordan_overlaps_exact",
    "dim_weights",
    "q_from_overlap",
    "optimal_q",
    "block_coefficients",
    "block_expectation",
    "block_expectation_2f1",
    "block_expectation_lemma",
    "psp",
    "psp_curve",
    "psp_components",
    "limit_data_infinite",
    "limit_program_infinite",
    "pascal_extract",
    "asp_monte_carlo",
]


class DegeneratePriorError(ValueError):
    """Priors with ``eta1`` in {0, 1}; the discrimination task degenerates."""


class IllConditionedError(ValueError):
    """A least-squares fit whose design matrix is numerically singular."""


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class CopyConfig:
    """Register sizes ``(n_A, n_B, n_C)`` and qudit dimension ``d``.

    The formulas assume ``n_A >= n_C``.  Building a config with ``n_A < n_C``
    stores A and C exchanged and flips ``swapped``.  Exchanging the program
    registers exchanges the roles of ``phi1`` and ``phi2``, hence of the
    priors; :meth:`canonical_priors` applies that.
    """

    n_A: int
    n_B: int
    n_C: int
    d: int = 2
    swapped: bool = False

    def __post_init__(self):
        for name in ("n_A", "n_B", "n_C", "d"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        if min(self.n_A, self.n_B, self.n_C) < 1:
            raise ValueError("every register needs at least one copy")
        if self.d < 2:
            raise ValueError("dimension d must be at least 2")
        if self.n_A < self.n_C:
            a, c = self.n_A, self.n_C
            object.__setattr__(self, "n_A", c)
            object.__setattr__(self, "n_C", a)
            object.__setattr__(self, "swapped", not self.swapped)

    @property
    def n1(self) -> int:
        return self.n_A + self.n_B

    @property
    def n2(self) -> int:
        return self.n_B + self.n_C

    @property
    def N(self) -> int:
        return self.n_A + self.n_B + self.n_C

    @property
    def k_max(self) -> int:
        """Largest block index on side 2, ``min(n_A, n2)``."""
        return min(self.n_A, self.n2)

    def canonical_priors(self, priors: Priors) -> Priors:
        return priors.exchanged() if self.swapped else priors

    def with_dim(self, d: int) -> CopyConfig:
        return CopyConfig(self.n_A, self.n_B, self.n_C, d, self.swapped)

    def key(self) -> tuple:
        return (self.n_A, self.n_B, self.n_C, self.d)


@dataclass(frozen=True)
class Priors:
    eta1: float
    eta2: float = None  # type: ignore[assignment]

    def __post_init__(self):
        eta1 = float(self.eta1)
        eta2 = 1.0 - eta1 if self.eta2 is None else float(self.eta2)
        if not (0.0 <= eta1 <= 1.0 and 0.0 <= eta2 <= 1.0):
            raise ValueError(f"priors must lie in [0, 1], got ({eta1}, {eta2})")
        if abs(eta1 + eta2 - 1.0) > 1e-12:
            raise ValueError(f"priors must sum to 1, got {eta1} + {eta2}")
        object.__setattr__(self, "eta1", eta1)
        object.__setattr__(self, "eta2", eta2)

    @property
    def degenerate(self) -> bool:
        return self.eta1 in (0.0, 1.0) or self.eta2 in (0.0, 1.0)

    def exchanged(self) -> Priors:
        return Priors(self.eta2, self.eta1)


@dataclass(frozen=True)
class Overlap:
    """Overlap of the two unknown states, ``s = |<phi1|phi2>| = cos(beta/2)``.

    Build with :meth:`from_beta` or :meth:`from_s`; the value given is kept
    as given and the other one derived once.  ``sin2 = sin(beta/2)**2`` is
    stored as well so that ``1 - s**2`` is never formed by cancellation when
    the caller supplied ``beta``.
    """

    beta: float
    s: float
    cos2: float
    sin2: float

    @classmethod
    def from_beta(cls, beta: float) -> Overlap:
        beta = float(beta)
        if not (0.0 <= beta <= math.pi):
            raise ValueError(f"beta must lie in [0, pi], got {beta}")
        c = math.cos(beta / 2.0)
        sn = math.sin(beta / 2.0)
        return cls(beta, c, c * c, sn * sn)

    @classmethod
    def from_s(cls, s: float) -> Overlap:
        s = float(s)
        if not (0.0 <= s <= 1.0):
            raise ValueError(f"s must lie in [0, 1], got {s}")
        beta = 2.0 * math.acos(s)
        sn = math.sqrt((1.0 - s) * (1.0 + s))
        return cls(beta, s, s * s, sn * sn)


class Regime(enum.Enum):
    Q1_SATURATED = "q1_saturated"
    INTERIOR = "interior"
    Q2_SATURATED = "q2_saturated"


@dataclass(frozen=True)
class BlockData:
    k: int
    diagram: YoungTwoRow
    dim_block: int
    overlap_O: float
    q1: float
    q2: float
    regime: Regime
    lower: float
    upper: float


@dataclass(frozen=True)
class BlockTerm:
    k: int
    side: int
    contribution: float


@dataclass
class PspBreakdown:
    """Coefficients and block contributions of one success probability.

    ``coeff_a``, ``coeff_b`` and ``coeff_c`` multiply ``(1 - s**2)**n_C`` and
    ``(1 - s**2)**n2``.  They diverge as ``s -> 1`` whenever a block has
    ``k < v``; at ``s == 1``, or once they overflow a double, they are
    reported as ``None``.
    """

    config: CopyConfig
    priors: Priors
    overlap: Overlap
    coeff_a: float | None
    coeff_b: float | None
    coeff_c: float | None
    per_block: list[BlockTerm] = field(default_factory=list)
    blocks: list[BlockData] = field(default_factory=list)
    total: float = 0.0


# --------------------------------------------------------------------------
# Jordan overlaps and failure parameters


@lru_cache(maxsize=None)
def _jordan_overlap_sq(n_A: int, n_B: int, n_C: int, k: int) -> Fraction:
    N = n_A + n_B + n_C
    n1, n2 = n_A + n_B, n_B + n_C
    tJ = N - 2 * k
    sixj = wigner_6j(
        Fraction(n_A, 2), Fraction(n_B, 2), Fraction(n1, 2),
        Fraction(n_C, 2), Fraction(tJ, 2), Fraction(n2, 2),
    )
    return (n1 + 1) * (n2 + 1) * sixj.square()


def jordan_overlaps_exact(config: CopyConfig) -> list[Fraction]:
    """Exact ``O_k**2`` for ``k = 1..n_C`` (recoupling of three spins)."""
    return [
        _jordan_overlap_sq(config.n_A, config.n_B, config.n_C, k)
        for k in range(1, config.n_C + 1)
    ]


def jordan_overlaps(config: CopyConfig) -> list[float]:
    """``O_k`` for ``k = 1..n_C``.

    ``O_k = sqrt((n1+1)(n2+1)) |{n_A/2 n_B/2 n1/2; n_C/2 N/2-k n2/2}|``,
    the overlap between the total-spin ``N/2-k`` states obtained by coupling
    (AB)C and A(BC).
    """
    return [math.sqrt(x) for x in jordan_overlaps_exact(config)]


def dim_weights(config: CopyConfig) -> tuple[int, int]:
    """Support dimensions ``(dim H1, dim H2)`` of the averaged input states."""
    d = config.d
    w1 = sym_dim(config.n1, d) * sym_dim(config.n_C, d)
    w2 = sym_dim(config.n_A, d) * sym_dim(config.n2, d)
    return w1, w2


def q_from_overlap(o: float, w1: float, w2: float, priors: Priors):
    """Optimal ``(q1, q2, regime, lower, upper)`` for one block."""
    eta1, eta2 = priors.eta1, priors.eta2
    o2 = o * o
    # only the ratio matters; forming it exactly first keeps the result
    # bit-identical across d whenever w1 == w2
    if isinstance(w1, (int, np.integer)) and isinstance(w2, (int, np.integer)):
        r = float(Fraction(int(w1), int(w2)))
    else:
        r = w1 / w2
    lower = r * o2 / (1.0 + r * o2)
    upper = r / (r + o2)
    if eta1 < lower:
        q1, regime = 1.0, Regime.Q1_SATURATED
    elif eta1 > upper:
        q1, regime = o2, Regime.Q2_SATURATED
    else:
        q1, regime = math.sqrt(eta2 / eta1 * r) * o, Regime.INTERIOR
    if q1 == 0.0:
        q2 = 1.0
    else:
        q2 = o2 / q1
    return q1, q2, regime, lower, upper


def optimal_q(config: CopyConfig, priors: Priors) -> list[BlockData]:
    """Block data for ``k = 1..n_C`` with the optimal failure parameters.

    ``priors`` are taken in the canonical labelling of ``config``.
    """
    if priors.degenerate:
        raise DegeneratePriorError(
            f"eta1 = {priors.eta1} makes the discrimination problem trivial"
        )
    w1, w2 = dim_weights(config)
    out = []
    for k, o in enumerate(jordan_overlaps(config), start=1):
        q1, q2, regime, lower, upper = q_from_overlap(o, w1, w2, priors)
        diagram = YoungTwoRow(config.N - k, k)
        out.append(
            BlockData(
                k=k,
                diagram=diagram,
                dim_block=weyl_dim(diagram, config.d),
                overlap_O=o,
                q1=q1,
                q2=q2,
                regime=regime,
                lower=lower,
                upper=upper,
            )
        )
    return out


# --------------------------------------------------------------------------
# block expectations


def _check_block_args(u: int, v: int, k: int):
    if k < 0:
        raise AngmomDomainError(f"block index must be non-negative, got {k}")
    if u < 0 or v < 0:
        raise AngmomDomainError("register sizes must be non-negative")


@lru_cache(maxsize=None)
def block_coefficients(u: int, v: int, k: int) -> tuple[Fraction, ...]:
    """Exact coefficients ``c_j`` with ``E = sum_j c_j cos2**j sin2**(v-j)``.

    ``c_j = (N-2k+1) u! v! / (k! (N-k+1)!) * C(u-k+j, j) * C(v-k, j)`` for
    ``j = 0..v-k``, ``N = u + v``.  Empty when the block does not exist.
    """
    _check_block_args(u, v, k)
    if k > min(u, v):
        return ()
    N = u + v
    pref = Fraction(
        (N - 2 * k + 1) * factorial(u) * factorial(v),
        factorial(k) * factorial(N - k + 1),
    )
    return tuple(
        pref * binomial(u - k + j, j) * binomial(v - k, j) for j in range(v - k + 1)
    )


@lru_cache(maxsize=None)
def _block_coefficients_f(u: int, v: int, k: int) -> tuple[float, ...]:
    return tuple(float(c) for c in block_coefficients(u, v, k))


def _halfangle(beta: float) -> tuple[float, float]:
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    return c * c, s * s


def block_expectation(u: int, v: int, k: int, beta: float) -> float:
    """``E(u, v, k, beta)``, all-positive polynomial form (production path)."""
    _check_block_args(u, v, k)
    coeffs = _block_coefficients_f(u, v, k)
    if not coeffs:
        return 0.0
    cos2, sin2 = _halfangle(beta)
    return kernels.block_poly(coeffs, v, cos2, sin2)


def block_expectation_2f1(u: int, v: int, k: int, beta: float) -> float:
    """``E`` through the literal ``sin2**v * 2F1(u-k+1, k-v; 1; -cot2)``.

    Singular at ``beta = 0``, where it is only defined as a limit; used as a
    cross-check away from that point.
    """
    _check_block_args(u, v, k)
    if k > min(u, v):
        return 0.0
    N = u + v
    pref = Fraction(
        (N - 2 * k + 1) * factorial(u) * factorial(v),
        factorial(k) * factorial(N - k + 1),
    )
    cos2, sin2 = _halfangle(beta)
    if sin2 == 0.0:
        return float(pref) if k == v else 0.0
    hyp = gauss_2f1_terminating(u - k + 1, k - v, -cos2 / sin2)
    return float(pref) * sin2**v * hyp


@lru_cache(maxsize=None)
def _lemma_weights(u: int, v: int, k: int) -> tuple[tuple[Fraction, float], ...]:
    """Pairs ``(l, CG**2)`` with non-zero squared Clebsch-Gordan coefficient."""
    j1 = Fraction(u, 2)
    j2 = Fraction(v, 2)
    J = Fraction(u + v - 2 * k, 2)
    out = []
    for tl in range(-v, v + 1, 2):
        l = Fraction(tl, 2)
        M = j1 + l
        if abs(M) > J:
            continue
        cg2 = clebsch_gordan(j1, j1, j2, l, J, M).square()
        if cg2:
            out.append((l, float(cg2)))
    return tuple(out)


def block_expectation_lemma(u: int, v: int, k: int, beta: float) -> float:
    """``E`` as a sum over ``l`` of ``|d|^2`` times squared Clebsch-Gordan.

    The rotated spin ``v/2`` has weight ``|d^{v/2}_{l, v/2}|^2`` on ``m = l``;
    coupled to the stretched spin ``u/2`` each ``l`` feeds exactly one total
    projection ``M = u/2 + l``, so no interference between different ``l``.
    """
    _check_block_args(u, v, k)
    if k > min(u, v):
        return 0.0
    j2 = Fraction(v, 2)
    return math.fsum(wigner_d_stretched_sq(j2, l, beta) * cg2 for l, cg2 in _lemma_weights(u, v, k))


# --------------------------------------------------------------------------
# success probability


@dataclass(frozen=True)
class _Plan:
    """Everything in the PSP that does not depend on the overlap."""

    config: CopyConfig
    priors: Priors
    blocks: tuple
    # one row per (side, k): (k, side, v, weight)
    rows: tuple
    coeffs: np.ndarray
    vexp: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=256)
def _plan(config: CopyConfig, priors: Priors) -> _Plan:
    """Weights and polynomial coefficients; priors in canonical labelling."""
    blocks = tuple(optimal_q(config, priors))
    n_A, n_C, n1, n2 = config.n_A, config.n_C, config.n1, config.n2
    rows = []
    for b in blocks:
        rows.append((b.k, 1, n1, n_C, priors.eta1 * (1.0 - b.q1)))
        rows.append((b.k, 2, n_A, n2, priors.eta2 * (1.0 - b.q2)))
    for k in range(n_C + 1, config.k_max + 1):
        rows.append((k, 2, n_A, n2, priors.eta2))
    width = max([len(_block_coefficients_f(u, v, k)) for k, _, u, v, _ in rows] + [1])
    coeffs = np.zeros((len(rows), width))
    for i, (k, _, u, v, _) in enumerate(rows):
        c = _block_coefficients_f(u, v, k)
        coeffs[i, : len(c)] = c
    vexp = np.array([r[3] for r in rows], dtype=np.int64)
    weights = np.array([r[4] for r in rows], dtype=np.float64)
    return _Plan(
        config=config,
        priors=priors,
        blocks=blocks,
        rows=tuple((k, side, u, v, w) for k, side, u, v, w in rows),
        coeffs=coeffs,
        vexp=vexp,
        weights=weights,
    )


def psp(config: CopyConfig, priors: Priors, ov: Overlap) -> PspBreakdown:
    """Pure-state success probability with its coefficient breakdown.

    ``total = a (1-s^2)^n_C + (b + c)(1-s^2)^n2`` where ``a`` collects side-1
    blocks, ``b`` side-2 blocks ``k <= n_C`` and ``c`` the side-2 blocks
    ``n_C < k <= min(n_A, n2)`` that lie outside the first input's support.
    """
    can = config.canonical_priors(priors)
    plan = _plan(config, can)
    cos2, sin2 = ov.cos2, ov.sin2
    per_block = [BlockTerm(0, 1, 0.0), BlockTerm(0, 2, 0.0)]
    sums = {"a": [], "b": [], "c": []}
    contribs = []
    for i, (k, side, u, v, w) in enumerate(plan.rows):
        e = kernels.block_poly(plan.coeffs[i], v, cos2, sin2)
        contrib = w * e
        contribs.append(contrib)
        per_block.append(BlockTerm(k, side, contrib))
        if sin2 > 0.0:
            # E / sin2**v = sum_j c_j cot2**j, the factored 2F1 form
            cot2 = cos2 / sin2
            try:
                hat = math.fsum(c * cot2**j for j, c in enumerate(_block_coefficients_f(u, v, k)))
            except OverflowError:
                hat = math.inf
            key = "a" if side == 1 else ("b" if k <= config.n_C else "c")
            sums[key].append(w * hat)
    total = math.fsum(contribs)
    if sin2 > 0.0:
        coeff = {}
        for key, vals in sums.items():
            val = math.fsum(vals) if all(map(math.isfinite, vals)) else math.inf
            coeff[key] = val if math.isfinite(val) else None
        a, b, c = coeff["a"], coeff["b"], coeff["c"]
    else:
        a = b = c = None
    return PspBreakdown(
        config=config,
        priors=priors,
        overlap=ov,
        coeff_a=a,
        coeff_b=b,
        coeff_c=c,
        per_block=per_block,
        blocks=list(plan.blocks),
        total=min(max(total, 0.0), 1.0),
    )


def psp_components(config: CopyConfig, priors: Priors, cos2, sin2):
    """Vectorized ``(side1, side2_jordan, side2_outside)`` contributions.

    The three arrays are ``a (1-s^2)^n_C``, ``b (1-s^2)^n2`` and
    ``c (1-s^2)^n2`` evaluated at every point; their sum is the PSP.
    """
    plan = _plan(config, config.canonical_priors(priors))
    cos2 = np.ascontiguousarray(cos2, dtype=np.float64)
    sin2 = np.ascontiguousarray(sin2, dtype=np.float64)
    side = np.array([r[1] for r in plan.rows])
    ks = np.array([r[0] for r in plan.rows])
    masks = (side == 1, (side == 2) & (ks <= config.n_C), (side == 2) & (ks > config.n_C))
    return tuple(
        kernels.weighted_blocks(plan.coeffs, plan.vexp, plan.weights * m, cos2, sin2)
        for m in masks
    )


def psp_curve(config: CopyConfig, priors: Priors, cos2, sin2) -> np.ndarray:
    """Total PSP at many overlaps at once (compiled kernel when available)."""
    plan = _plan(config, config.canonical_priors(priors))
    cos2 = np.ascontiguousarray(cos2, dtype=np.float64)
    sin2 = np.ascontiguousarray(sin2, dtype=np.float64)
    out = kernels.weighted_blocks(plan.coeffs, plan.vexp, plan.weights, cos2, sin2)
    return np.clip(out, 0.0, 1.0)


# --------------------------------------------------------------------------
# asymptotic limits


def limit_data_infinite(m: int, ov: Overlap) -> float:
    """Limit for an infinite data register, ``1 - s**(2m)``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return 1.0 - ov.cos2**m


def limit_program_infinite(n: int, priors: Priors, ov: Overlap) -> float:
    """Limit for infinite program registers: optimal UD of ``phi^{(x)n}`` pairs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    c2n = ov.cos2**n
    e = c2n / (1.0 + c2n)
    f = 1.0 / (1.0 + c2n)
    eta1, eta2 = priors.eta1, priors.eta2
    if eta1 < e:
        return eta2 * (1.0 - c2n)
    if eta1 > f:
        return eta1 * (1.0 - c2n)
    return 1.0 - 2.0 * math.sqrt(eta1 * eta2) * math.sqrt(c2n)


def pascal_extract(m: int, n_large: int, beta_grid, priors: Priors | None = None) -> list[float]:
    """Least-squares coefficients ``a_mk`` of the large-``n_B`` PSP.

    Fits ``P(beta) ~ sum_{k=1..m} a_k cos2**(m-k) sin2**k`` using the PSP of
    the config ``(m, n_large, m)`` on ``beta_grid``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    beta = np.asarray(beta_grid, dtype=np.float64)
    if beta.size < m:
        raise IllConditionedError(f"need at least {m} grid points, got {beta.size}")
    priors = priors if priors is not None else Priors(0.5)
    cos2 = np.cos(beta / 2.0) ** 2
    sin2 = np.sin(beta / 2.0) ** 2
    target = psp_curve(CopyConfig(m, n_large, m), priors, cos2, sin2)
    design = np.column_stack([cos2 ** (m - k) * sin2**k for k in range(1, m + 1)])
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise IllConditionedError("beta grid does not resolve the basis monomials")
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    return coef.tolist()


# --------------------------------------------------------------------------
# averaged success probability


def asp_monte_carlo(config: CopyConfig, priors: Priors, samples: int, seed: int):
    """Monte-Carlo average of the PSP over Haar-random state pairs.

    For Haar-random ``phi1, phi2`` in dimension ``d`` the squared overlap
    ``t = s**2`` has density ``(d-1)(1-t)**(d-2)`` on [0, 1]; it is drawn by
    inversion, ``t = 1 - U**(1/(d-1))``.  Returns ``(mean, stderr)``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(samples)
    sin2 = u ** (1.0 / (config.d - 1))
    cos2 = 1.0 - sin2
    vals = psp_curve(config, priors, cos2, sin2)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return mean, stderr
