"""Agreement and error metrics between rankings."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .compdata import ComparisonMatrix
from .errors import InvalidParameterError, InvalidSizeError
from .spectral import Ranking

__all__ = [
    "MetricReport",
    "TopKLoss",
    "count_inversions",
    "kendall_tau",
    "upsets_topk",
    "linf_displacement",
    "fiedler_l2_error",
    "metric_report",
]


def _ranks(r: Ranking | npt.ArrayLike) -> np.ndarray:
    return np.asarray(r.ranks if isinstance(r, Ranking) else r, dtype=np.int64)


def _same_size(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InvalidSizeError(f"rankings differ in size: {a.shape[0]} vs {b.shape[0]}")


def count_inversions(seq: npt.ArrayLike) -> int:
    """Pairs ``i < j`` with ``seq[i] > seq[j]``, by bottom-up merge sort."""
    a = list(np.asarray(seq).tolist())
    n = len(a)
    buf = [0] * n
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    inv += mid - i
                    j += 1
                k += 1
            buf[k:k + mid - i] = a[i:mid]
            k += mid - i
            buf[k:k + hi - j] = a[j:hi]
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return inv


def kendall_tau(a: Ranking | npt.ArrayLike, b: Ranking | npt.ArrayLike) -> float:
    """``(concordant - discordant) / (n (n - 1) / 2)`` for two tie-free rankings."""
    ra, rb = _ranks(a), _ranks(b)
    _same_size(ra, rb)
    n = ra.shape[0]
    if n < 2:
        return 1.0
    seq = rb[np.argsort(ra, kind="stable")]
    disc = count_inversions(seq)
    pairs = n * (n - 1) // 2
    return (pairs - 2 * disc) / pairs


@dataclass(frozen=True)
class TopKLoss:
    """Fraction of upsets among compared top-k pairs; ``pairs == 0`` means no such pair."""

    k: int
    value: float
    upsets: int
    pairs: int

    @property
    def empty(self) -> bool:
        return self.pairs == 0

    def __float__(self) -> float:
        return self.value


def upsets_topk(r: Ranking | npt.ArrayLike, c: ComparisonMatrix, k: int) -> TopKLoss:
    """Share of observed comparisons among the top ``k`` items that contradict ``r``.

    Draws (entries equal to 0) count in neither numerator nor denominator.
    """
    ranks = _ranks(r)
    if ranks.shape[0] != c.n:
        raise InvalidSizeError(f"ranking has {ranks.shape[0]} items, comparisons have {c.n}")
    if not 2 <= k <= c.n:
        raise InvalidParameterError(f"k must lie in [2, {c.n}], got {k}")
    iu, ju = c.observed_pairs()
    top = (ranks[iu] <= k) & (ranks[ju] <= k)
    sign = np.sign(c.entries[iu[top], ju[top]])
    decided = sign != 0
    ahead = np.sign(ranks[ju[top]] - ranks[iu[top]])
    ups = int(np.count_nonzero(sign * ahead < 0))
    pairs = int(np.count_nonzero(decided))
    return TopKLoss(k, ups / pairs if pairs else 0.0, ups, pairs)


def linf_displacement(a: Ranking | npt.ArrayLike, b: Ranking | npt.ArrayLike) -> int:
    ra, rb = _ranks(a), _ranks(b)
    _same_size(ra, rb)
    return int(np.max(np.abs(ra - rb))) if ra.size else 0


def fiedler_l2_error(f_clean: npt.ArrayLike, f_noisy: npt.ArrayLike, tol: float = 1e-8) -> float:
    """Sign-invariant distance ``min(||g - f||, ||g + f||)`` between unit vectors."""
    f = np.asarray(f_clean, dtype=float)
    g = np.asarray(f_noisy, dtype=float)
    if f.shape != g.shape:
        raise InvalidSizeError(f"vectors differ in size: {f.shape} vs {g.shape}")
    for name, v in (("f_clean", f), ("f_noisy", g)):
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise InvalidParameterError(f"{name} must have unit norm, got {np.linalg.norm(v):.6g}")
    return float(min(np.linalg.norm(g - f), np.linalg.norm(g + f)))


@dataclass(frozen=True)
class MetricReport:
    kendall_tau: float
    upsets_topk: dict[int, float]
    linf_displacement: int
    exact_recovery: bool
    fiedler_l2_error: float | None = None
    empty_topk: tuple[int, ...] = field(default=())


def metric_report(
    predicted: Ranking,
    truth: Ranking | None = None,
    c: ComparisonMatrix | None = None,
    ks: Iterable[int] = (),
    f_clean: npt.ArrayLike | None = None,
    f_noisy: npt.ArrayLike | None = None,
) -> MetricReport:
    """Bundle the metrics. Without ``truth`` the upset-only metrics are filled
    and the agreement fields compare ``predicted`` with itself."""
    ref = predicted if truth is None else truth
    tau = kendall_tau(predicted, ref)
    disp = linf_displacement(predicted, ref)
    lk: dict[int, float] = {}
    empty = []
    if c is not None:
        for k in sorted(set(int(x) for x in ks if 2 <= int(x) <= c.n)):
            loss = upsets_topk(predicted, c, k)
            lk[k] = loss.value
            if loss.empty:
                empty.append(k)
    l2 = None
    if f_clean is not None and f_noisy is not None:
        l2 = fiedler_l2_error(f_clean, f_noisy)
    return MetricReport(tau, lk, disp, disp == 0, l2, tuple(empty))
