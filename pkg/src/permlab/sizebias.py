"""Size-biased coupling for the inversion count of the rank sequence.

W = sum over pairs i < j of 1(Z_i > Z_j) counts inversions of the best-of-i
score model.  A size-biased version W^s picks a pair (i, j) with probability
proportional to P(Z_i > Z_j) = i/(i+j), forces that pair into inverted order
(keeping the scores when they already are, else redrawing the two scores from
their conditional law by rejection), and recounts.  The coupling satisfies
E[W f(W)] = E[W] E[f(W^s)] and |W^s - W| <= 2n, which feeds a Wasserstein
bound of order n^(-1/2) on the normalized W via Stein's method:

    d_W((W - mu)/sigma, N(0,1))
        <= (mu/sigma^2) sqrt(2/pi) sqrt(Var E[W^s - W | W])
         + (mu/sigma^3) E[(W^s - W)^2].

Streams: outer replica r draws its scores from (seed, stream r, substream 0)
and completion c of that replica from substream 1 + c, so runs are
reproducible for any worker count.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .models import ScoreVector
from .rng import make_generator
from .stats import inversions_batch

__all__ = [
    "InsufficientReplicas",
    "AliasTable",
    "IndexDistribution",
    "index_distribution",
    "resample_conditional_pair",
    "CouplingDraw",
    "couple",
    "couple_batch",
    "IdentityCheckReport",
    "verify_size_bias_identity",
    "estimate_var_conditional",
    "SteinBoundReport",
    "stein_bound",
]

_TINY = 2.0 ** -53
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


class InsufficientReplicas(ValueError):
    """The replicate layout cannot support the requested estimator."""


class AliasTable:
    """Walker/Vose alias sampler: O(K) setup, O(1) per draw."""

    def __init__(self, probs: np.ndarray) -> None:
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < 0):
            raise ValueError("probs must be a non-empty nonnegative vector")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1 within 1e-12")
        k = p.size
        scaled = p * k
        self.accept = np.ones(k, dtype=float)
        self.alias = np.arange(k, dtype=np.int64)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        scaled = scaled.copy()
        while small and large:
            s = small.pop()
            l = large.pop()
            self.accept[s] = scaled[s]
            self.alias[s] = l
            scaled[l] = scaled[l] - (1.0 - scaled[s])
            (small if scaled[l] < 1.0 else large).append(l)
        for i in small + large:
            self.accept[i] = 1.0

    def draw1(self, rng: np.random.Generator) -> int:
        k = self.accept.size
        u1, u2 = rng.random(2)
        cell = min(int(u1 * k), k - 1)
        return cell if u2 < self.accept[cell] else int(self.alias[cell])

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        k = self.accept.size
        u = rng.random((size, 2))
        cell = np.minimum((u[:, 0] * k).astype(np.int64), k - 1)
        take = u[:, 1] < self.accept[cell]
        return np.where(take, cell, self.alias[cell])


@dataclass(frozen=True)
class IndexDistribution:
    """The size-bias index law: P(I = (i,j)) proportional to i/(i+j), i < j."""

    n: int
    pairs: np.ndarray = field(repr=False)  # (K, 2) int64, lexicographic
    probs: np.ndarray = field(repr=False)
    total_weight: float  # sum of i/(i+j) = E[W]
    table: AliasTable = field(repr=False)

    def draw_pair1(self, rng: np.random.Generator) -> tuple[int, int]:
        k = self.table.draw1(rng)
        return int(self.pairs[k, 0]), int(self.pairs[k, 1])


def index_distribution(n: int) -> IndexDistribution:
    if n < 2:
        raise ValueError("need n >= 2 for at least one pair")
    pairs = np.array([(i, j) for i in range(1, n) for j in range(i + 1, n + 1)], dtype=np.int64)
    weights = pairs[:, 0] / (pairs[:, 0] + pairs[:, 1])
    total = math.fsum(weights)
    probs = weights / total
    return IndexDistribution(n, pairs, probs, total, AliasTable(probs))


def resample_conditional_pair(
    i: int, j: int, rng: np.random.Generator
) -> tuple[float, float]:
    """(Z_i, Z_j) given Z_i > Z_j, by rejection from the unconditional pair.

    Acceptance probability is i/(i+j) per try, so the expected try count is
    (i+j)/i; averaged over the size-bias index law that is O(1).
    """
    if i < 1 or j < 1 or i == j:
        raise ValueError(f"need distinct indices >= 1, got ({i}, {j})")
    inv_i, inv_j = 1.0 / i, 1.0 / j
    while True:
        u = rng.random(2)
        zi = min(max(u[0], _TINY) ** inv_i, _BELOW_ONE)
        zj = min(max(u[1], _TINY) ** inv_j, _BELOW_ONE)
        if zi > zj:
            return zi, zj


def _pair_involvement(z: np.ndarray, i: int, j: int, zi: float, zj: float) -> int:
    """Inversions involving positions i or j if their scores were (zi, zj).

    Positions other than i and j keep their values from ``z``; the slices
    containing the other member of the pair are corrected with the stored
    array value, so the same function serves the old and the new scores.
    """
    a, b = i - 1, j - 1
    count = int(zi > zj)  # the (i, j) pair itself, i < j
    count += int(np.count_nonzero(z[:a] > zi))
    count += int(np.count_nonzero(z[a + 1 :] < zi)) - int(z[b] < zi)
    count += int(np.count_nonzero(z[:b] > zj)) - int(z[a] > zj)
    count += int(np.count_nonzero(z[b + 1 :] < zj))
    return count


@dataclass(frozen=True)
class CouplingDraw:
    """One coupled draw: ``scores`` is the original vector (w = its inversion
    count), ``scores_s`` the post-coupling vector (w_s = its inversion count;
    the two coincide when the chosen pair was already inverted)."""

    n: int
    scores: ScoreVector
    w: int
    i: int
    j: int
    w_s: int
    resampled: bool
    scores_s: ScoreVector


def couple(
    n: int,
    rng: np.random.Generator,
    recount: str = "full",
    _index: IndexDistribution | None = None,
) -> CouplingDraw:
    """One coupled draw (W, W^s) from a single generator.

    Draw order: n score uniforms, 2 alias uniforms, then rejection uniforms if
    the chosen pair needs resampling.  ``recount="full"`` recounts the
    modified score vector with the O(n log n) kernel; ``"incremental"``
    adjusts the four affected comparison sums in O(n).  Both agree exactly.
    """
    if recount not in ("full", "incremental"):
        raise ValueError("recount must be 'full' or 'incremental'")
    idx = _index if _index is not None and _index.n == n else index_distribution(n)
    u = rng.random(n)
    u[u == 0.0] = _TINY
    z = np.minimum(u ** (1.0 / np.arange(1, n + 1)), _BELOW_ONE)
    w = int(inversions_batch(z[None, :])[0])
    i, j = idx.draw_pair1(rng)
    a, b = i - 1, j - 1
    sv = ScoreVector(z)
    if z[a] > z[b]:
        return CouplingDraw(n, sv, w, i, j, w, False, sv)
    zi, zj = resample_conditional_pair(i, j, rng)
    zmod = z.copy()
    zmod[a], zmod[b] = zi, zj
    if recount == "incremental":
        w_s = w - _pair_involvement(z, i, j, z[a], z[b]) + _pair_involvement(z, i, j, zi, zj)
    else:
        w_s = int(inversions_batch(zmod[None, :])[0])
    return CouplingDraw(n, sv, w, i, j, w_s, True, ScoreVector(zmod))


def _score_rows(n: int, reps: int, seed: int, first_stream: int) -> np.ndarray:
    out = np.empty((reps, n), dtype=float)
    exponents = 1.0 / np.arange(1, n + 1)
    for r in range(reps):
        gen = make_generator(seed, first_stream + r, substream=0)
        u = gen.random(n)
        u[u == 0.0] = _TINY
        out[r] = np.minimum(u ** exponents, _BELOW_ONE)
    return out


def _complete(
    z: np.ndarray,
    w: np.ndarray,
    idx: IndexDistribution,
    seed: int,
    first_stream: int,
    completion: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One completion column: (i, j, w_s, resampled) per outer row."""
    reps, n = z.shape
    i_arr = np.empty(reps, dtype=np.int64)
    j_arr = np.empty(reps, dtype=np.int64)
    resampled = np.zeros(reps, dtype=bool)
    zmod = z.copy()
    for r in range(reps):
        gen = make_generator(seed, first_stream + r, substream=1 + completion)
        i, j = idx.draw_pair1(gen)
        i_arr[r], j_arr[r] = i, j
        if z[r, i - 1] <= z[r, j - 1]:
            resampled[r] = True
            zi, zj = resample_conditional_pair(i, j, gen)
            zmod[r, i - 1] = zi
            zmod[r, j - 1] = zj
    w_s = w.copy()
    if np.any(resampled):
        w_s[resampled] = inversions_batch(zmod[resampled])
    return i_arr, j_arr, w_s, resampled


def couple_batch(
    n: int, reps: int, seed: int, first_stream: int = 0
) -> dict[str, np.ndarray]:
    """Vectorized coupled draws; replica r uses stream first_stream + r.

    Returns arrays ``w``, ``w_s``, ``i``, ``j``, ``resampled``.
    """
    if n < 2 or reps < 1:
        raise ValueError("need n >= 2 and reps >= 1")
    idx = index_distribution(n)
    z = _score_rows(n, reps, seed, first_stream)
    w = inversions_batch(z)
    i_arr, j_arr, w_s, resampled = _complete(z, w, idx, seed, first_stream, 0)
    return {"w": w, "w_s": w_s, "i": i_arr, "j": j_arr, "resampled": resampled}


def _parse_f(f: str):
    if f == "identity":
        return (lambda x: np.asarray(x, dtype=float)), "identity"
    if f == "square":
        return (lambda x: np.asarray(x, dtype=float) ** 2), "square"
    if f.startswith("indicator:"):
        t = float(f.partition(":")[2])
        return (lambda x: (np.asarray(x, dtype=float) >= t).astype(float)), f
    raise ValueError(f"unknown test function {f!r}; use identity, square or indicator:t")


@dataclass(frozen=True)
class IdentityCheckReport:
    n: int
    reps: int
    seed: int
    f_name: str
    lhs: float  # E[W f(W)] from independent draws
    rhs: float  # E[W] E[f(W^s)] from coupled draws
    pooled_se: float
    wall_time: float = field(compare=False)

    @property
    def gap_in_se(self) -> float:
        return abs(self.lhs - self.rhs) / self.pooled_se if self.pooled_se > 0 else math.inf


def verify_size_bias_identity(
    n: int, f: str, reps: int, seed: int
) -> IdentityCheckReport:
    """Check E[W f(W)] = E[W] E[f(W^s)] by MC on both sides.

    The left side uses independent score draws (streams reps..2reps-1); the
    right side uses coupled draws (streams 0..reps-1); the pooled standard
    error combines the left sample with a delta-method error for the product
    of the two coupled means (their covariance included).
    """
    if reps < 2:
        raise InsufficientReplicas("need reps >= 2")
    func, name = _parse_f(f)
    t0 = time.perf_counter()
    draws = couple_batch(n, reps, seed, first_stream=0)
    w_ind = inversions_batch(_score_rows(n, reps, seed, first_stream=reps))
    a = w_ind.astype(float) * func(w_ind)
    lhs = float(np.mean(a))
    se_lhs_sq = float(np.var(a, ddof=1)) / reps
    wc = draws["w"].astype(float)
    fc = func(draws["w_s"])
    mean_w, mean_f = float(np.mean(wc)), float(np.mean(fc))
    cov = np.cov(wc, fc, ddof=1)  # 2x2
    var_prod = (
        mean_f ** 2 * cov[0, 0] + mean_w ** 2 * cov[1, 1] + 2 * mean_w * mean_f * cov[0, 1]
    ) / reps
    rhs = mean_w * mean_f
    pooled = math.sqrt(max(se_lhs_sq + var_prod, 0.0))
    return IdentityCheckReport(
        n=n,
        reps=reps,
        seed=seed,
        f_name=name,
        lhs=lhs,
        rhs=rhs,
        pooled_se=pooled,
        wall_time=time.perf_counter() - t0,
    )


def _conditional_variance_parts(
    n: int, outer_reps: int, inner_pairs: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(w, D matrix, resampled counts); D has shape (outer_reps, inner_pairs)."""
    if outer_reps < 2:
        raise InsufficientReplicas("need outer_reps >= 2 (a single outer draw "
                                   "cannot see between-draw variance)")
    if inner_pairs < 2:
        raise InsufficientReplicas("need inner_pairs >= 2 independent completions")
    idx = index_distribution(n)
    z = _score_rows(n, outer_reps, seed, first_stream=0)
    w = inversions_batch(z)
    d = np.empty((outer_reps, inner_pairs), dtype=float)
    for c in range(inner_pairs):
        _, _, w_s, _ = _complete(z, w, idx, seed, 0, c)
        d[:, c] = w_s - w
    return w, d, z


def estimate_var_conditional(
    n: int, outer_reps: int, inner_pairs: int, seed: int
) -> float:
    """Paired-replicate estimate of Var(E[W^s - W | Z]).

    Per outer score draw, ``inner_pairs`` independent completions D_c share
    the same Z; products over distinct completions estimate (E[D|Z])^2
    unbiasedly, and subtracting the squared grand mean leaves the variance of
    the conditional expectation.  Negative estimates (undersampling noise)
    clamp to 0 with a warning.
    """
    _, d, _ = _conditional_variance_parts(n, outer_reps, inner_pairs, seed)
    c = d.shape[1]
    row_sum = d.sum(axis=1)
    row_sq = (d ** 2).sum(axis=1)
    pair_products = (row_sum ** 2 - row_sq) / (c * (c - 1))
    est = float(np.mean(pair_products)) - float(np.mean(d)) ** 2
    if est < 0.0:
        warnings.warn(
            f"conditional-variance estimate {est:.3g} < 0 at n={n}; clamping to 0 "
            "(increase outer_reps/inner_pairs)"
        )
        return 0.0
    return est


@dataclass(frozen=True)
class SteinBoundReport:
    n: int
    outer_reps: int
    inner_pairs: int
    seed: int
    mu: float
    sigma2: float
    var_cond: float
    second_moment: float  # E[(W^s - W)^2]
    bound: float
    wall_time: float = field(compare=False)


def stein_bound(
    n: int, outer_reps: int, inner_pairs: int, seed: int
) -> SteinBoundReport:
    """MC assembly of the Wasserstein bound for the normalized inversion count.

    bound = (mu/sigma^2) sqrt(2/pi) sqrt(Var E[W^s - W | Z])
          + (mu/sigma^3) E[(W^s - W)^2],

    every ingredient estimated from the coupled draws (the conditional
    variance given Z upper-bounds the one given W, so the bound is
    conservative up to MC noise).
    """
    t0 = time.perf_counter()
    w, d, _ = _conditional_variance_parts(n, outer_reps, inner_pairs, seed)
    mu = float(np.mean(w))
    sigma2 = float(np.var(w.astype(float), ddof=1))
    if sigma2 <= 0.0:
        raise InsufficientReplicas("degenerate variance estimate; increase outer_reps")
    c = d.shape[1]
    row_sum = d.sum(axis=1)
    row_sq = (d ** 2).sum(axis=1)
    pair_products = (row_sum ** 2 - row_sq) / (c * (c - 1))
    var_cond = float(np.mean(pair_products)) - float(np.mean(d)) ** 2
    if var_cond < 0.0:
        warnings.warn(f"conditional-variance estimate {var_cond:.3g} < 0; clamping to 0")
        var_cond = 0.0
    second = float(np.mean(d ** 2))
    bound = (mu / sigma2) * math.sqrt(2.0 / math.pi) * math.sqrt(var_cond) + (
        mu / sigma2 ** 1.5
    ) * second
    return SteinBoundReport(
        n=n,
        outer_reps=outer_reps,
        inner_pairs=inner_pairs,
        seed=seed,
        mu=mu,
        sigma2=sigma2,
        var_cond=var_cond,
        second_moment=second,
        bound=bound,
        wall_time=time.perf_counter() - t0,
    )
