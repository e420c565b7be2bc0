"""Permutation statistics: inversions, m-descents, local maxima, alternating
and rising structure, increasing-subsequence counts.

Every statistic comes in two forms: a single-permutation function and a
``*_batch`` form operating on a (reps, n) matrix, one permutation (or score
vector) per row.  All statistics here are comparison-based, so the batch forms
accept either integer rank rows or raw score rows; row comparisons are what
matters.  The batch inversion counter is an O(n log n) level-wise merge count;
its brute-force O(n^2) oracle lives in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .perm import Permutation, as_entries

__all__ = [
    "StatisticKind",
    "parse_statistic",
    "inversions",
    "anti_inversions",
    "m_descents",
    "m_ascents",
    "local_maxima",
    "longest_alternating",
    "rising_sequences",
    "increasing_subsequences",
    "evaluate",
    "ranks_matrix",
    "inversions_batch",
    "anti_inversions_batch",
    "m_descents_batch",
    "m_ascents_batch",
    "local_maxima_batch",
    "longest_alternating_batch",
    "rising_sequences_batch",
    "evaluate_batch",
]

# Row chunking keeps transient memory of the batch merge count bounded
# (roughly 5 arrays of this many elements live at once).
_CHUNK_ELEMENTS = 8_000_000


# ---------------------------------------------------------------------------
# statistic kinds

_TAGS_WITH_M = {"desc", "asc", "rising", "incsub"}
_TAGS_PLAIN = {"inv", "ainv", "locmax", "las"}


@dataclass(frozen=True)
class StatisticKind:
    """A statistic selector: a tag plus a window/length parameter where used.

    Text forms: ``inv``, ``ainv``, ``desc:m``, ``asc:m``, ``locmax``, ``las``,
    ``rising:m``, ``incsub:m``.
    """

    tag: str
    m: int | None = None

    def __post_init__(self) -> None:
        if self.tag in _TAGS_WITH_M:
            if self.m is None or self.m < 1:
                raise ValueError(f"statistic {self.tag!r} needs a parameter m >= 1")
        elif self.tag in _TAGS_PLAIN:
            if self.m is not None:
                raise ValueError(f"statistic {self.tag!r} takes no parameter")
        else:
            raise ValueError(f"unknown statistic tag {self.tag!r}")

    def __str__(self) -> str:
        return self.tag if self.m is None else f"{self.tag}:{self.m}"


def parse_statistic(text: str) -> StatisticKind:
    """Parse ``"desc:3"``-style statistic selectors."""
    text = text.strip()
    if ":" in text:
        tag, _, mtext = text.partition(":")
        try:
            m = int(mtext)
        except ValueError as exc:
            raise ValueError(f"bad statistic parameter in {text!r}") from exc
        return StatisticKind(tag.strip(), m)
    return StatisticKind(text)


# ---------------------------------------------------------------------------
# single-permutation statistics

def _entries_array(p) -> np.ndarray:
    return np.asarray(as_entries(p), dtype=np.int64)


def inversions(p) -> int:
    """Number of pairs i < j with p(i) > p(j).  O(n log n)."""
    e = _entries_array(p)
    return int(inversions_batch(e[None, :], assume_ranks=True)[0])


def anti_inversions(p) -> int:
    """Number of pairs i < j with p(i) < p(j); complements inversions."""
    n = len(as_entries(p))
    return n * (n - 1) // 2 - inversions(p)


def m_descents(p, m: int) -> int:
    """Number of pairs (i, j) with 1 <= j - i <= m and p(i) > p(j).

    m = 1 gives classical descents; m >= n - 1 gives inversions.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    e = _entries_array(p)
    n = e.size
    if m >= n - 1:
        return inversions(p)
    return sum(int(np.count_nonzero(e[:-k] > e[k:])) for k in range(1, m + 1))


def m_ascents(p, m: int) -> int:
    """Number of pairs (i, j) with 1 <= j - i <= m and p(i) < p(j)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    e = _entries_array(p)
    n = e.size
    k_max = min(m, n - 1)
    return sum(int(np.count_nonzero(e[:-k] < e[k:])) for k in range(1, k_max + 1))


def local_maxima(p) -> int:
    """Number of interior positions 1 < i < n with p(i-1) < p(i) > p(i+1)."""
    e = _entries_array(p)
    if e.size < 3:
        return 0
    mid = e[1:-1]
    return int(np.count_nonzero((mid > e[:-2]) & (mid > e[2:])))


def longest_alternating(p, ascent_first: bool = False) -> int:
    """Length of the longest alternating subsequence.

    Default convention is descent-first: the subsequence satisfies
    a1 > a2 < a3 > a4 ...  With ``ascent_first=True`` the first comparison
    must be an ascent instead; the two differ by at most 1.  A single element
    counts as alternating, so the identity permutation scores 1 (descent-first)
    or 2 (ascent-first, n >= 2).
    """
    e = _entries_array(p)
    n = e.size
    if n == 1:
        return 1
    desc = e[:-1] > e[1:]
    blocks = 1 + int(np.count_nonzero(desc[1:] != desc[:-1]))
    first_matches = (not desc[0]) if ascent_first else bool(desc[0])
    return blocks + (1 if first_matches else 0)


def rising_sequences(p, m: int) -> int:
    """Number of windows of m consecutive positions that increase.

    Counts i <= n - m + 1 with p(i) < p(i+1) < ... < p(i+m-1); every position
    is a window for m = 1.
    """
    e = _entries_array(p)
    n = e.size
    if not 1 <= m <= n:
        raise ValueError(f"m={m} out of range 1..{n}")
    if m == 1:
        return n
    asc = e[:-1] < e[1:]
    if m == 2:
        return int(np.count_nonzero(asc))
    return int(np.count_nonzero(sliding_window_view(asc, m - 1).all(axis=-1)))


class _Fenwick:
    """Prefix-sum tree over values 1..n holding exact Python integers."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.tree = [0] * (n + 1)

    def add(self, i: int, delta: int) -> None:
        while i <= self.n:
            self.tree[i] += delta
            i += i & (-i)

    def prefix(self, i: int) -> int:
        s = 0
        while i > 0:
            s += self.tree[i]
            i -= i & (-i)
        return s


def increasing_subsequences(p, m: int) -> int:
    """Number of strictly increasing subsequences of length exactly m.

    Exact count as a Python integer (arbitrary precision, so values up to
    C(n, m) never overflow).  O(m n log n) via a Fenwick tree per length step.
    """
    e = as_entries(p)
    n = len(e)
    if not 1 <= m <= n:
        raise ValueError(f"m={m} out of range 1..{n}")
    cur = [1] * n
    for _ in range(2, m + 1):
        fen = _Fenwick(n)
        new = [0] * n
        for pos, v in enumerate(e):
            new[pos] = fen.prefix(v - 1)
            fen.add(v, cur[pos])
        cur = new
    return sum(cur)


def evaluate(kind: StatisticKind, p) -> int:
    """Evaluate a statistic selector on one permutation."""
    tag = kind.tag
    if tag == "inv":
        return inversions(p)
    if tag == "ainv":
        return anti_inversions(p)
    if tag == "desc":
        return m_descents(p, kind.m)
    if tag == "asc":
        return m_ascents(p, kind.m)
    if tag == "locmax":
        return local_maxima(p)
    if tag == "las":
        return longest_alternating(p)
    if tag == "rising":
        return rising_sequences(p, kind.m)
    if tag == "incsub":
        return increasing_subsequences(p, kind.m)
    raise ValueError(f"unknown statistic tag {tag!r}")


# ---------------------------------------------------------------------------
# batch statistics on (reps, n) matrices

def ranks_matrix(x: np.ndarray) -> np.ndarray:
    """Row-wise ranks (1 = smallest) with ties broken by column index."""
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    order = np.argsort(x, axis=1, kind="stable")
    r = np.empty((reps, n), dtype=np.int64)
    rows = np.arange(reps)[:, None]
    r[rows, order] = np.arange(1, n + 1)[None, :]
    return r


def inversions_batch(x: np.ndarray, assume_ranks: bool = False) -> np.ndarray:
    """Row-wise inversion counts of a (reps, n) matrix, O(n log n) per row.

    Level-wise merge count: at each block width the cross pairs between the
    two halves of every block are counted with one segmented argsort, and each
    inverted pair is counted exactly once, at the level where its positions
    first share a block.
    """
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    out = np.empty(reps, dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMENTS // max(n, 1))
    for lo in range(0, reps, chunk):
        hi = min(lo + chunk, reps)
        out[lo:hi] = _inversions_chunk(x[lo:hi], assume_ranks)
    return out


def _inversions_chunk(x: np.ndarray, assume_ranks: bool) -> np.ndarray:
    reps, n = x.shape
    total = np.zeros(reps, dtype=np.int64)
    if n < 2:
        return total
    r = x.astype(np.int64, copy=False) if assume_ranks else ranks_matrix(x)
    base = (r - 0.5) / n  # strictly increasing in rank, exact gaps >= 1/(2n)
    col = np.arange(n)
    w = 1
    while w < n:
        span = 2 * w
        bid = col // span
        in_right = (col % span) >= w
        starts = bid * span
        left_size = np.minimum(w, n - starts)  # L-half size of each block
        key = base + bid[None, :]
        order = np.argsort(key, axis=1)
        from_left = ~in_right[order]  # (reps, n): sorted slot holds an L element
        cum_left = np.cumsum(from_left, axis=1)
        baseline = np.zeros_like(cum_left)
        has_prev = starts > 0
        baseline[:, has_prev] = cum_left[:, starts[has_prev] - 1]
        # for each R element: (# L elements in its block) - (# L elements smaller)
        contrib = left_size[None, :] - (cum_left - baseline)
        total += np.sum(np.where(from_left, 0, contrib), axis=1)
        w = span
    return total


def anti_inversions_batch(x: np.ndarray, assume_ranks: bool = False) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x))
    n = x.shape[1]
    return n * (n - 1) // 2 - inversions_batch(x, assume_ranks)


def m_descents_batch(x: np.ndarray, m: int, assume_ranks: bool = False) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be >= 1")
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    if m >= n - 1:
        return inversions_batch(x, assume_ranks)
    out = np.zeros(reps, dtype=np.int64)
    for k in range(1, m + 1):
        out += np.count_nonzero(x[:, :-k] > x[:, k:], axis=1)
    return out


def m_ascents_batch(x: np.ndarray, m: int) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be >= 1")
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    out = np.zeros(reps, dtype=np.int64)
    for k in range(1, min(m, n - 1) + 1):
        out += np.count_nonzero(x[:, :-k] < x[:, k:], axis=1)
    return out


def local_maxima_batch(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    if n < 3:
        return np.zeros(reps, dtype=np.int64)
    mid = x[:, 1:-1]
    peaks = (mid > x[:, :-2]) & (mid > x[:, 2:])
    return np.count_nonzero(peaks, axis=1).astype(np.int64)


def longest_alternating_batch(x: np.ndarray, ascent_first: bool = False) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    if n == 1:
        return np.ones(reps, dtype=np.int64)
    desc = x[:, :-1] > x[:, 1:]
    blocks = 1 + np.count_nonzero(desc[:, 1:] != desc[:, :-1], axis=1)
    first = ~desc[:, 0] if ascent_first else desc[:, 0]
    return (blocks + first).astype(np.int64)


def rising_sequences_batch(x: np.ndarray, m: int) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x))
    reps, n = x.shape
    if not 1 <= m <= n:
        raise ValueError(f"m={m} out of range 1..{n}")
    if m == 1:
        return np.full(reps, n, dtype=np.int64)
    asc = x[:, :-1] < x[:, 1:]
    if m == 2:
        return np.count_nonzero(asc, axis=1).astype(np.int64)
    win = sliding_window_view(asc, m - 1, axis=1).all(axis=-1)
    return np.count_nonzero(win, axis=1).astype(np.int64)


def evaluate_batch(kind: StatisticKind, x: np.ndarray, assume_ranks: bool = False) -> np.ndarray:
    """Row-wise statistic values for a (reps, n) matrix.

    ``incsub`` falls back to a per-row loop (it needs integer values, not just
    comparisons); everything else is vectorized.
    """
    tag = kind.tag
    if tag == "inv":
        return inversions_batch(x, assume_ranks)
    if tag == "ainv":
        return anti_inversions_batch(x, assume_ranks)
    if tag == "desc":
        return m_descents_batch(x, kind.m, assume_ranks)
    if tag == "asc":
        return m_ascents_batch(x, kind.m)
    if tag == "locmax":
        return local_maxima_batch(x)
    if tag == "las":
        return longest_alternating_batch(x)
    if tag == "rising":
        return rising_sequences_batch(x, kind.m)
    if tag == "incsub":
        x = np.atleast_2d(np.asarray(x))
        r = x if assume_ranks else ranks_matrix(x)
        vals = [increasing_subsequences(tuple(int(v) for v in row), kind.m) for row in r]
        return np.asarray(vals, dtype=np.int64)
    raise ValueError(f"unknown statistic tag {tag!r}")
