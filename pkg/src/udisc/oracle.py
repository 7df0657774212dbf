"""Brute-force checks in the full ``2**N`` qubit Hilbert space.

Nothing here uses the closed forms of :mod:`udisc.discriminator`: states are
explicit tensor products, the coupled bases are built from Dicke states and
Clebsch-Gordan coefficients, the measurement is assembled from those vectors
and all probabilities are plain ``<psi|Pi|psi>`` with dense matrices.

Qubit ordering is A, B, C from most to least significant; ``|0>`` is spin up.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .angmom import HalfInt, YoungTwoRow, clebsch_gordan, weyl_dim
from .discriminator import BlockData, CopyConfig, Priors, dim_weights, q_from_overlap

DEFAULT_MAX_DIM = 2**14

__all__ = [
    "ResourceError",
    "DegenerateBlockError",
    "ConsistencyError",
    "PovmError",
    "DenseKet",
    "DenseOperator",
    "Scheme",
    "CoupledBasisVector",
    "Povm",
    "max_dim",
    "build_input_state",
    "euler_pair",
    "haar_state",
    "dicke_state",
    "coupled_basis",
    "gram_overlaps",
    "block_weight",
    "build_povm",
    "psp_direct",
    "support_projector",
    "asp_q_scan",
    "haar_average_state",
    "born_sample",
    "collective_spin_squared",
    "optimal_blocks_direct",
    "CheckResult",
    "verify_config",
]


class ResourceError(RuntimeError):
    """Requested Hilbert space exceeds the configured cap."""


class DegenerateBlockError(ValueError):
    """A Jordan block with ``1 - O**2`` too small to define the measurement."""


class ConsistencyError(AssertionError):
    """The brute-force construction contradicts one of its own invariants."""


class PovmError(ValueError):
    """Outcome probabilities that do not form a distribution."""


def max_dim() -> int:
    """Largest Hilbert-space dimension the oracle will build (``UDISC_MAX_DIM``)."""
    env = os.environ.get("UDISC_MAX_DIM")
    return int(env) if env else DEFAULT_MAX_DIM


def _check_cap(dim: int):
    cap = max_dim()
    if dim > cap:
        raise ResourceError(f"Hilbert space dimension {dim} exceeds cap {cap}")


@dataclass
class DenseKet:
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: DenseKet) -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass
class DenseOperator:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def expectation(self, ket: DenseKet) -> float:
        a = ket.amplitudes
        return float(np.real(np.vdot(a, self.entries @ a)))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2)[0])


# --------------------------------------------------------------------------
# input states


def build_input_state(phi1: DenseKet, phi2: DenseKet, config: CopyConfig, which: int) -> DenseKet:
    """``|phi1>^nA |phi_which>^nB |phi2>^nC`` in canonical register order."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    if phi1.dim != phi2.dim:
        raise ValueError("single-copy states must share a dimension")
    _check_cap(phi1.dim**config.N)
    data = phi1 if which == 1 else phi2
    factors = [phi1.amplitudes] * config.n_A + [data.amplitudes] * config.n_B + [phi2.amplitudes] * config.n_C
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return DenseKet(out)


def euler_pair(beta: float, alpha: float = 0.0, gamma: float = 0.0) -> tuple[DenseKet, DenseKet]:
    """``phi1 = |0>`` and a ``phi2`` at Euler angles ``(alpha, beta, gamma)``."""
    phi1 = np.array([1.0, 0.0], dtype=complex)
    phi2 = np.array(
        [
            np.exp(-0.5j * (alpha + gamma)) * math.cos(beta / 2.0),
            np.exp(0.5j * (alpha - gamma)) * math.sin(beta / 2.0),
        ]
    )
    return DenseKet(phi1), DenseKet(phi2)


def haar_state(d: int, rng: np.random.Generator) -> DenseKet:
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return DenseKet(z / np.linalg.norm(z))


# --------------------------------------------------------------------------
# coupled bases


class Scheme(enum.Enum):
    SIDE1 = "side1"  # (AB) coupled with C
    SIDE2 = "side2"  # A coupled with (BC)


@dataclass
class CoupledBasisVector:
    total_J: HalfInt
    total_M: HalfInt
    scheme: Scheme
    embedding: DenseKet


_popcount_cache: dict[int, np.ndarray] = {}


def _popcounts(n: int) -> np.ndarray:
    if n not in _popcount_cache:
        idx = np.arange(2**n, dtype=np.int64)
        counts = np.zeros(2**n, dtype=np.int64)
        for b in range(n):
            counts += (idx >> b) & 1
        _popcount_cache[n] = counts
    return _popcount_cache[n]


def dicke_state(n: int, twice_m: int) -> np.ndarray:
    """Symmetric ``n``-qubit state with spin ``n/2`` and projection ``twice_m/2``."""
    if abs(twice_m) > n or (n + twice_m) % 2:
        raise ValueError(f"invalid projection {twice_m}/2 for {n} qubits")
    down = (n - twice_m) // 2
    mask = _popcounts(n) == down
    vec = np.zeros(2**n)
    vec[mask] = 1.0 / math.sqrt(math.comb(n, down))
    return vec


def _scheme_split(config: CopyConfig, scheme: Scheme) -> tuple[int, int]:
    if scheme is Scheme.SIDE1:
        return config.n1, config.n_C
    return config.n_A, config.n2


def _scheme_ks(config: CopyConfig, scheme: Scheme) -> range:
    left, right = _scheme_split(config, scheme)
    return range(0, min(left, right) + 1)


def _coupled_vector(left: int, right: int, tJ: int, tM: int) -> np.ndarray:
    vec = np.zeros(2 ** (left + right))
    for tm1 in range(-left, left + 1, 2):
        tm2 = tM - tm1
        if abs(tm2) > right or (right + tm2) % 2:
            continue
        cg = clebsch_gordan(
            Fraction(left, 2), Fraction(tm1, 2), Fraction(right, 2), Fraction(tm2, 2),
            Fraction(tJ, 2), Fraction(tM, 2),
        )
        if cg.is_zero():
            continue
        vec += float(cg) * np.kron(dicke_state(left, tm1), dicke_state(right, tm2))
    return vec


def coupled_basis(config: CopyConfig, scheme: Scheme) -> list[CoupledBasisVector]:
    """Total-spin eigenbasis of the scheme's two symmetric registers."""
    if config.d != 2:
        raise NotImplementedError("the oracle works with qubits (d = 2) only")
    _check_cap(2**config.N)
    left, right = _scheme_split(config, scheme)
    out = []
    for k in _scheme_ks(config, scheme):
        tJ = config.N - 2 * k
        for tM in range(-tJ, tJ + 1, 2):
            vec = _coupled_vector(left, right, tJ, tM)
            out.append(CoupledBasisVector(HalfInt(tJ), HalfInt(tM), scheme, DenseKet(vec.astype(complex))))
    return out


def _basis_by_block(config: CopyConfig, scheme: Scheme) -> dict[int, dict[int, np.ndarray]]:
    out: dict[int, dict[int, np.ndarray]] = {}
    for v in coupled_basis(config, scheme):
        k = (config.N - v.total_J.twice) // 2
        out.setdefault(k, {})[v.total_M.twice] = v.embedding.amplitudes
    return out


def gram_overlaps(config: CopyConfig, tol: float = 1e-10) -> list[float]:
    """``|<J M|_1 |J M>_2|`` for ``k = 1..n_C``; checks M-independence."""
    side1 = _basis_by_block(config, Scheme.SIDE1)
    side2 = _basis_by_block(config, Scheme.SIDE2)
    out = []
    for k in range(1, config.n_C + 1):
        vals = [abs(np.vdot(side1[k][tM], side2[k][tM])) for tM in side1[k]]
        if max(vals) - min(vals) > tol:
            raise ConsistencyError(f"block {k}: overlap depends on M ({min(vals)}..{max(vals)})")
        out.append(float(np.mean(vals)))
    return out


def block_weight(config: CopyConfig, state: DenseKet, k: int, scheme: Scheme) -> float:
    """Weight of ``state`` in the scheme's total-spin ``N/2 - k`` subspace."""
    vecs = _basis_by_block(config, scheme).get(k, {})
    a = state.amplitudes
    return float(sum(abs(np.vdot(v, a)) ** 2 for v in vecs.values()))


def collective_spin_squared(n: int) -> np.ndarray:
    """Dense ``J**2`` for ``n`` qubits."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex) / 2
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
    sz = np.array([[1, 0], [0, -1]], dtype=complex) / 2
    dim = 2**n
    total = np.zeros((dim, dim), dtype=complex)
    for s in (sx, sy, sz):
        op = np.zeros((dim, dim), dtype=complex)
        for i in range(n):
            op += np.kron(np.kron(np.eye(2**i), s), np.eye(2 ** (n - i - 1)))
        total += op @ op
    return total


# --------------------------------------------------------------------------
# measurement


@dataclass
class Povm:
    pi1: DenseOperator
    pi2: DenseOperator
    pi0: DenseOperator
    support: DenseOperator  # projector onto span(H1 + H2)

    def completeness_residual(self) -> float:
        total = self.pi1.entries + self.pi2.entries + self.pi0.entries
        return float(np.max(np.abs(total - self.support.entries)))

    def min_eigenvalue(self) -> float:
        return min(p.min_eigenvalue() for p in (self.pi0, self.pi1, self.pi2))

    def hermiticity_residual(self) -> float:
        return max(p.hermiticity_residual() for p in (self.pi0, self.pi1, self.pi2))


def support_projector(config: CopyConfig) -> np.ndarray:
    """Orthogonal projector onto ``span(H1 + H2)`` via an SVD of both bases."""
    vecs = [v.embedding.amplitudes for s in Scheme for v in coupled_basis(config, s)]
    mat = np.column_stack(vecs)
    u, sv, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    u = u[:, :rank]
    return u @ u.conj().T


def _jordan_pieces(config: CopyConfig, phase_rng: np.random.Generator | None = None):
    """Column stacks for the measurement, per block ``k = 1..n_C``.

    Returns ``({k: (C2, C1)}, X)``.  Column ``M`` of ``C2`` is
    ``psi_perp_2 / sqrt(1 - O**2)`` where ``psi_perp_2`` is the unit vector of
    ``span(v1, v2)`` orthogonal to the side-2 vector ``v2``; ``C1`` likewise.
    So ``C2 @ C2^dag`` is the block's ``Pi1`` at ``q1 = 0``.  ``X`` stacks the
    side-2 vectors outside the first input's support.  With ``phase_rng`` the
    side-2 vectors get random phases instead of the real-positive convention.
    """
    side1 = _basis_by_block(config, Scheme.SIDE1)
    side2 = _basis_by_block(config, Scheme.SIDE2)
    dim = 2**config.N
    pieces = {}
    for k in range(1, config.n_C + 1):
        cols2, cols1 = [], []
        for tM, v1 in side1[k].items():
            v1 = v1.astype(complex)
            v2 = side2[k][tM].astype(complex)
            ov = np.vdot(v2, v1)
            if phase_rng is None:
                v2 = v2 * (ov / abs(ov)) if abs(ov) > 0 else v2
            else:
                v2 = v2 * np.exp(2j * math.pi * phase_rng.random())
            ov = np.vdot(v2, v1)
            gap = 1.0 - abs(ov) ** 2
            if gap < 1e-12:
                raise DegenerateBlockError(f"block {k} has 1 - O^2 = {gap}")
            cols2.append((v1 - ov * v2) / gap)
            cols1.append((v2 - np.conj(ov) * v1) / gap)
        pieces[k] = (np.column_stack(cols2), np.column_stack(cols1))
    extra = [v2.astype(complex) for k in range(config.n_C + 1, config.k_max + 1) for v2 in side2[k].values()]
    extra = np.column_stack(extra) if extra else np.zeros((dim, 0), dtype=complex)
    return pieces, extra


def _gram(cols: np.ndarray) -> np.ndarray:
    return cols @ cols.conj().T


def build_povm(config: CopyConfig, priors: Priors, blocks: list[BlockData], phase_seed: int | None = None) -> Povm:
    """Dense ``(Pi1, Pi2, Pi0)``; ``blocks`` supply ``q1, q2`` for ``k = 1..n_C``."""
    if config.d != 2:
        raise NotImplementedError("the oracle works with qubits (d = 2) only")
    _check_cap(2**config.N)
    rng = np.random.default_rng(phase_seed) if phase_seed is not None else None
    pieces, extra = _jordan_pieces(config, rng)
    pi1 = np.zeros((2**config.N,) * 2, dtype=complex)
    pi2 = _gram(extra)
    by_k = {b.k: b for b in blocks}
    for k, (c2, c1) in pieces.items():
        b = by_k[k]
        pi1 += (1.0 - b.q1) * _gram(c2)
        pi2 += (1.0 - b.q2) * _gram(c1)
    support = support_projector(config)
    pi0 = support - pi1 - pi2
    return Povm(DenseOperator(pi1), DenseOperator(pi2), DenseOperator(pi0), DenseOperator(support))


def psp_direct(povm: Povm, state1: DenseKet, state2: DenseKet, priors: Priors) -> float:
    """``eta1 <Phi1|Pi1|Phi1> + eta2 <Phi2|Pi2|Phi2>``."""
    return priors.eta1 * povm.pi1.expectation(state1) + priors.eta2 * povm.pi2.expectation(state2)


def _side_basis(config: CopyConfig, scheme: Scheme) -> np.ndarray:
    return np.column_stack([v.embedding.amplitudes for v in coupled_basis(config, scheme)])


def asp_q_scan(config: CopyConfig, priors: Priors, grid_steps: int):
    """Grid search of the averaged success probability over each ``q1``.

    The averaged inputs are the normalized projectors onto H1 and H2, so
    ``Tr(rho_i C C^dag) = |B_i^dag C|_F^2 / dim H_i`` with ``B_i`` an
    orthonormal basis of H_i.  The objective is a sum of per-block terms and
    each block is scanned on ``q1 in linspace(O_k**2, 1, grid_steps + 1)``.
    Returns ``(best_q1_per_block, best_asp)``.
    """
    if priors.degenerate:
        raise ValueError("priors must be non-degenerate")
    b1 = _side_basis(config, Scheme.SIDE1)
    b2 = _side_basis(config, Scheme.SIDE2)

    def tr(basis, cols):
        return float(np.sum(np.abs(basis.conj().T @ cols) ** 2)) / basis.shape[1]

    pieces, extra = _jordan_pieces(config)
    overlaps = gram_overlaps(config)
    best_q = []
    best = priors.eta2 * tr(b2, extra)
    for k, o in enumerate(overlaps, start=1):
        c2, c1 = pieces[k]
        t1 = tr(b1, c2)
        t2 = tr(b2, c1)
        grid = np.linspace(o * o, 1.0, grid_steps + 1)
        vals = priors.eta1 * (1.0 - grid) * t1 + priors.eta2 * (1.0 - o * o / grid) * t2
        i = int(np.argmax(vals))
        best_q.append(float(grid[i]))
        best += float(vals[i])
    return best_q, best


def haar_average_state(config: CopyConfig, which: int, samples: int, seed: int) -> np.ndarray:
    """Monte-Carlo average of ``|Phi_which><Phi_which|`` over Haar ``phi1, phi2``."""
    _check_cap(2**config.N)
    rng = np.random.default_rng(seed)
    dim = 2**config.N
    acc = np.zeros((dim, dim), dtype=complex)
    for _ in range(samples):
        phi1 = haar_state(2, rng)
        phi2 = haar_state(2, rng)
        a = build_input_state(phi1, phi2, config, which).amplitudes
        acc += np.outer(a, a.conj())
    return acc / samples


def born_sample(povm: Povm, state: DenseKet, shots: int, seed: int) -> tuple[int, int, int]:
    """Counts of outcomes (1, 2, 0) in ``shots`` measurements of ``state``.

    Probabilities within 1e-12 of zero are treated as exactly zero.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    probs = np.array([povm.pi1.expectation(state), povm.pi2.expectation(state), povm.pi0.expectation(state)])
    if abs(probs.sum() - 1.0) > 1e-9 or probs.min() < -1e-9:
        raise PovmError(f"outcome probabilities {probs} do not form a distribution")
    probs = np.where(np.abs(probs) <= 1e-12, 0.0, probs)
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return int(counts[0]), int(counts[1]), int(counts[2])


def optimal_blocks_direct(config: CopyConfig, priors: Priors) -> list[BlockData]:
    """Block data with ``O_k`` from :func:`gram_overlaps` instead of 6j symbols."""
    w1, w2 = dim_weights(config)
    out = []
    for k, o in enumerate(gram_overlaps(config), start=1):
        q1, q2, regime, lower, upper = q_from_overlap(o, w1, w2, priors)
        diagram = YoungTwoRow(config.N - k, k)
        out.append(BlockData(k, diagram, weyl_dim(diagram, config.d), o, q1, q2, regime, lower, upper))
    return out


# --------------------------------------------------------------------------
# verification suite


@dataclass
class CheckResult:
    name: str
    heading: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def verify_config(
    config: CopyConfig,
    priors: Priors,
    *,
    pairs: int = 50,
    seed: int = 0,
    shots: int = 100_000,
    grid_steps: int = 200,
) -> list[CheckResult]:
    """Run every brute-force check for one configuration.

    ``priors`` are in the canonical labelling.  Checks whose agreement relies
    on the averaged-state weights of the unequal-register case are filed
    under the ``reconstruction-dependent`` heading.
    """
    from .discriminator import Overlap, block_expectation, jordan_overlaps, optimal_q, psp

    core = "core"
    recon = "core" if config.n_A == config.n_C else "reconstruction-dependent"
    rng = np.random.default_rng(seed)
    results = []

    blocks = optimal_q(config, priors)
    povm = build_povm(config, priors, blocks)
    results.append(CheckResult("povm_positivity", core, max(0.0, -povm.min_eigenvalue()), 1e-10))
    results.append(CheckResult("povm_hermiticity", core, povm.hermiticity_residual(), 1e-12))
    results.append(CheckResult("povm_completeness", core, povm.completeness_residual(), 1e-10))

    rephased = build_povm(config, priors, blocks, phase_seed=seed + 1)
    phase_res = max(
        float(np.max(np.abs(a.entries - b.entries)))
        for a, b in ((povm.pi1, rephased.pi1), (povm.pi2, rephased.pi2), (povm.pi0, rephased.pi0))
    )
    results.append(CheckResult("jordan_phase_invariance", core, phase_res, 1e-10))

    gram = gram_overlaps(config)
    sixj = jordan_overlaps(config)
    dual = max((abs(a - b) for a, b in zip(gram, sixj)), default=0.0)
    results.append(CheckResult("jordan_dual_path", core, dual, 1e-10))

    unamb = 0.0
    equiv = 0.0
    phase = 0.0
    proj = 0.0
    for _ in range(pairs):
        beta = float(rng.uniform(0.0, math.pi))
        alpha, gamma = rng.uniform(0.0, 2 * math.pi, size=2)
        p1, p2 = euler_pair(beta, alpha, gamma)
        s1 = build_input_state(p1, p2, config, 1)
        s2 = build_input_state(p1, p2, config, 2)
        unamb = max(unamb, povm.pi1.expectation(s2), povm.pi2.expectation(s1))
        direct = psp_direct(povm, s1, s2, priors)
        # psp() takes physical-label priors and re-applies the swap itself
        analytic = psp(config, config.canonical_priors(priors), Overlap.from_beta(beta)).total
        equiv = max(equiv, abs(direct - analytic))
        q1, q2 = euler_pair(beta)
        plain = psp_direct(povm, build_input_state(q1, q2, config, 1), build_input_state(q1, q2, config, 2), priors)
        phase = max(phase, abs(direct - plain))
        for k in range(0, config.n_C + 1):
            w = block_weight(config, s1, k, Scheme.SIDE1)
            proj = max(proj, abs(w - block_expectation(config.n1, config.n_C, k, beta)))
    results.append(CheckResult("unambiguity", core, unamb, 1e-12))
    results.append(CheckResult("psp_equivalence", recon, equiv, 1e-8))
    results.append(CheckResult("euler_phase_independence", core, phase, 1e-10))
    results.append(CheckResult("block_projector", core, proj, 1e-9))

    best_q, _ = asp_q_scan(config, priors, grid_steps)
    steps = 0.0
    for b, q in zip(blocks, best_q):
        step = (1.0 - b.overlap_O**2) / grid_steps
        steps = max(steps, abs(q - b.q1) / step)
    results.append(CheckResult("q_scan_optimality", recon, steps, 1.0))

    beta = float(rng.uniform(0.1, math.pi))
    p1, p2 = euler_pair(beta, *rng.uniform(0.0, 2 * math.pi, size=2))
    zmax = 0.0
    wrong = 0
    for which, state in ((1, build_input_state(p1, p2, config, 1)), (2, build_input_state(p1, p2, config, 2))):
        counts = born_sample(povm, state, shots, seed + which)
        probs = [povm.pi1.expectation(state), povm.pi2.expectation(state), povm.pi0.expectation(state)]
        for c, p in zip(counts, probs):
            p = min(max(p, 0.0), 1.0)
            sd = math.sqrt(shots * p * (1 - p))
            if sd > 0:
                zmax = max(zmax, abs(c - shots * p) / sd)
        wrong += counts[1] if which == 1 else counts[0]
    results.append(CheckResult("born_frequencies", core, zmax, 4.0))
    results.append(CheckResult("born_unambiguity", core, float(wrong), 0.0))
    return results
