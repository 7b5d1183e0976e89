"""Laplacians, Fiedler vectors and the SerialRank spectral ranking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._eigen import smallest_deflated
from .compdata import ComparisonMatrix, MultiComparison
from .errors import (
    ConnectivityError,
    DegenerateDegreeError,
    InvalidParameterError,
    InvalidSizeError,
)
from .similarity import (
    SimilarityMatrix,
    sim_cardinal,
    sim_contrast,
    sim_glm,
    sim_match,
)

__all__ = [
    "Ranking",
    "SpectralDiagnostics",
    "LAPLACIAN_KINDS",
    "SIMILARITY_KINDS",
    "count_upsets",
    "laplacian",
    "fiedler_vector",
    "build_similarity",
    "rank_by_fiedler",
    "serialrank",
    "hierarchical_refine",
    "asymptotic_fiedler",
    "asymptotic_fiedler_value",
    "components",
]

LAPLACIAN_KINDS = ("unnormalized", "normalized")
SIMILARITY_KINDS = ("match", "glm", "cardinal")

_KIND_ALIASES = {"unnorm": "unnormalized", "norm": "normalized"}


def _laplacian_kind(kind: str) -> str:
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in LAPLACIAN_KINDS:
        raise InvalidParameterError(f"unknown Laplacian kind {kind!r}")
    return kind


@dataclass(frozen=True, eq=False)
class Ranking:
    """A ranking of ``n`` items.

    ``ranks[i]`` is the 1-based rank of item ``i`` (1 is best). ``scores``
    holds whatever the ranker sorted (Fiedler entries, point scores, ...).
    """

    ranks: npt.NDArray[np.int64]
    orientation: str = "increasing"
    upsets: int | None = None
    scores: npt.NDArray[np.float64] | None = None
    flags: tuple[str, ...] = ()
    item_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        r = np.asarray(self.ranks, dtype=np.int64)
        n = r.shape[0]
        if r.ndim != 1 or not np.array_equal(np.sort(r), np.arange(1, n + 1)):
            raise InvalidParameterError("ranks must be a permutation of 1..n")
        if self.orientation not in ("increasing", "decreasing"):
            raise InvalidParameterError(f"orientation must be 'increasing' or 'decreasing', got {self.orientation!r}")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "ranks", r)
        if self.scores is not None:
            s = np.array(self.scores, dtype=float)
            s.setflags(write=False)
            object.__setattr__(self, "scores", s)
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def order(self) -> np.ndarray:
        """Item indices from best to worst."""
        return np.argsort(self.ranks, kind="stable")

    @classmethod
    def from_order(cls, order, **kwargs) -> "Ranking":
        order = np.asarray(order, dtype=np.int64)
        ranks = np.empty_like(order)
        ranks[order] = np.arange(1, order.shape[0] + 1)
        return cls(ranks, **kwargs)

    @classmethod
    def identity(cls, n: int) -> "Ranking":
        return cls(np.arange(1, n + 1))

    def reversed(self) -> "Ranking":
        return Ranking(self.n + 1 - self.ranks, self.orientation, None, self.scores, self.flags, self.item_labels)


@dataclass(frozen=True, eq=False)
class SpectralDiagnostics:
    """Smallest Laplacian eigenvalues and the Fiedler vector.

    ``eigenvalues`` holds ``(lambda_1, lambda_2, lambda_3)``; ``lambda_1`` is
    the Rayleigh quotient of the known null vector and ``lambda_2, lambda_3``
    are the two smallest eigenvalues on its orthogonal complement. For the
    normalized kind, ``fiedler`` is the right eigenvector of ``I - D^-1 S``
    scaled to unit norm.
    """

    laplacian_kind: str
    eigenvalues: npt.NDArray[np.float64]
    fiedler: npt.NDArray[np.float64]
    fiedler_simple: bool
    residual: float
    repeated_values: bool = False

    def to_dict(self) -> dict:
        return {
            "laplacian_kind": self.laplacian_kind,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "fiedler": [float(x) for x in self.fiedler],
            "fiedler_simple": self.fiedler_simple,
            "residual": self.residual,
            "repeated_values": self.repeated_values,
        }


def count_upsets(ranks: npt.ArrayLike, c: ComparisonMatrix) -> int:
    """Observed, non-draw pairs whose comparison sign contradicts ``ranks``."""
    r = np.asarray(ranks.ranks if isinstance(ranks, Ranking) else ranks)
    iu, ju = c.observed_pairs()
    sign = np.sign(c.entries[iu, ju])
    # positive when i is ranked ahead of j
    ahead = np.sign(r[ju] - r[iu])
    return int(np.count_nonzero(sign * ahead < 0))


def components(s: SimilarityMatrix | np.ndarray) -> list[list[int]]:
    """Connected components of the nonzero off-diagonal similarity support, largest first."""
    A = np.asarray(s.values if isinstance(s, SimilarityMatrix) else s)
    support = A != 0
    np.fill_diagonal(support, False)
    ncomp, lab = connected_components(csr_matrix(support), directed=False)
    comps = [np.flatnonzero(lab == k).tolist() for k in range(ncomp)]
    comps.sort(key=lambda x: (-len(x), x[0]))
    return comps


def _check_connected(s: SimilarityMatrix) -> None:
    comps = components(s)
    if len(comps) > 1:
        raise ConnectivityError(comps, list(s.labels) if s.item_labels is not None else None)


def _degrees(s: SimilarityMatrix) -> np.ndarray:
    d = s.values.sum(axis=1)
    bad = np.flatnonzero(d <= 0)
    if bad.size:
        i = int(bad[0])
        raise DegenerateDegreeError(i, s.item_labels[i] if s.item_labels is not None else None)
    return d


def laplacian(s: SimilarityMatrix, kind: str = "unnormalized") -> np.ndarray:
    """``diag(S 1) - S`` or the random-walk form ``I - D^-1 S``."""
    kind = _laplacian_kind(kind)
    S = s.values
    if kind == "unnormalized":
        return np.diag(S.sum(axis=1)) - S
    d = _degrees(s)
    return np.eye(s.n) - S / d[:, None]


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    big = np.flatnonzero(np.abs(v) > 1e-10 * max(np.abs(v).max(), 1e-300))
    if big.size and v[big[0]] < 0:
        return -v
    return v


def fiedler_vector(
    s: SimilarityMatrix,
    kind: str = "unnormalized",
    method: str = "auto",
    gap_tol: float = 1e-8,
) -> SpectralDiagnostics:
    """Fiedler value and vector of the similarity graph.

    Raises :class:`ConnectivityError` for a disconnected support. The sign is
    fixed so that the first non-negligible entry is positive. A gap
    ``lambda_3 - lambda_2`` below ``gap_tol`` (relative to ``max(1, |lambda_3|)``)
    sets ``fiedler_simple=False``.
    """
    kind = _laplacian_kind(kind)
    n = s.n
    if n < 2:
        raise InvalidSizeError("need at least two items")
    _check_connected(s)
    S = s.values
    if kind == "unnormalized":
        L = np.diag(S.sum(axis=1)) - S
        u = np.full(n, 1.0 / np.sqrt(n))
        vals, V = smallest_deflated(L, u, 2, method=method)
        lam1 = float(u @ L @ u)
        f = V[:, 0] / np.linalg.norm(V[:, 0])
        resid = float(np.linalg.norm(L @ f - vals[0] * f))
    else:
        d = _degrees(s)
        r = 1.0 / np.sqrt(d)
        M = np.eye(n) - (r[:, None] * S) * r[None, :]
        u = np.sqrt(d)
        vals, V = smallest_deflated(M, u, 2, method=method)
        lam1 = float(u @ M @ u / (u @ u))
        f = V[:, 0] * r
        f /= np.linalg.norm(f)
        Lrw = np.eye(n) - S / d[:, None]
        resid = float(np.linalg.norm(Lrw @ f - vals[0] * f))
    f = _canonical_sign(f)
    lam2 = float(vals[0])
    lam3 = float(vals[1]) if vals.shape[0] > 1 else np.nan
    simple = bool(np.isnan(lam3) or (lam3 - lam2) > gap_tol * max(1.0, abs(lam3)))
    sf = np.sort(f)
    repeated = bool(np.any(np.diff(sf) <= 1e-12 * max(1.0, np.abs(f).max())))
    return SpectralDiagnostics(kind, np.array([lam1, lam2, lam3]), f, simple, resid, repeated)


def build_similarity(
    c: ComparisonMatrix | MultiComparison,
    similarity_kind: str = "match",
    contrast_alpha: float | None = None,
) -> SimilarityMatrix:
    if similarity_kind == "match":
        if isinstance(c, MultiComparison):
            c = c.to_comparison()
        s = sim_match(c)
    elif similarity_kind == "glm":
        mc = c if isinstance(c, MultiComparison) else MultiComparison.from_comparison(c)
        s = sim_glm(mc)
    elif similarity_kind == "cardinal":
        if isinstance(c, MultiComparison):
            c = c.to_comparison()
        s = sim_cardinal(c)
    else:
        raise InvalidParameterError(f"unknown similarity kind {similarity_kind!r}; expected one of {SIMILARITY_KINDS}")
    if contrast_alpha is not None:
        s = sim_contrast(s, contrast_alpha)
    return s


def rank_by_fiedler(
    s: SimilarityMatrix,
    c: ComparisonMatrix,
    laplacian_kind: str = "unnormalized",
    method: str = "auto",
) -> tuple[Ranking, SpectralDiagnostics]:
    """Sort the Fiedler vector of ``s`` in whichever direction has fewer upsets
    against ``c`` (increasing on a tie). Equal entries keep index order."""
    diag = fiedler_vector(s, laplacian_kind, method=method)
    f = diag.fiedler
    inc = np.argsort(f, kind="stable")
    dec = np.argsort(-f, kind="stable")
    r_inc = np.empty(s.n, dtype=np.int64)
    r_inc[inc] = np.arange(1, s.n + 1)
    r_dec = np.empty(s.n, dtype=np.int64)
    r_dec[dec] = np.arange(1, s.n + 1)
    u_inc = count_upsets(r_inc, c)
    u_dec = count_upsets(r_dec, c)
    flags = []
    if diag.repeated_values:
        flags.append("repeated-fiedler-values")
    if not diag.fiedler_simple:
        flags.append("fiedler-not-simple")
    if u_dec < u_inc:
        r, orient, ups = r_dec, "decreasing", u_dec
    else:
        r, orient, ups = r_inc, "increasing", u_inc
    return Ranking(r, orient, ups, f, tuple(flags), c.item_labels), diag


def serialrank(
    c: ComparisonMatrix | MultiComparison,
    similarity_kind: str = "match",
    laplacian_kind: str = "unnormalized",
    contrast_alpha: float | None = None,
    method: str = "auto",
) -> Ranking:
    """Spectral ranking by seriation of a comparison-derived similarity.

    >>> from serialrank import full_consistent, serialrank
    >>> serialrank(full_consistent(5)).ranks.tolist()
    [1, 2, 3, 4, 5]
    """
    s = build_similarity(c, similarity_kind, contrast_alpha)
    cmp = c.to_comparison() if isinstance(c, MultiComparison) else c
    ranking, _ = rank_by_fiedler(s, cmp, laplacian_kind, method=method)
    return ranking


def hierarchical_refine(
    c: ComparisonMatrix,
    base: Ranking,
    k: int,
    similarity_kind: str = "match",
    laplacian_kind: str = "unnormalized",
    contrast_alpha: float | None = None,
) -> Ranking:
    """Re-rank the top ``k`` items of ``base`` using only their comparisons
    with each other; ranks below ``k`` are left as they are.

    If the top-k similarity graph is disconnected the base order is kept and
    the result carries the ``refine-fallback`` flag.
    """
    n = c.n
    if base.n != n:
        raise InvalidSizeError(f"ranking has {base.n} items, comparisons have {n}")
    if not 2 <= k <= n:
        raise InvalidParameterError(f"k must lie in [2, {n}], got {k}")
    top = base.order[:k]
    sub = c.submatrix(top)
    flags = list(base.flags)
    try:
        refined = serialrank(sub, similarity_kind, laplacian_kind, contrast_alpha)
    except ConnectivityError:
        flags.append("refine-fallback")
        return Ranking(base.ranks, base.orientation, count_upsets(base.ranks, c), base.scores, tuple(flags), base.item_labels)
    ranks = np.array(base.ranks)
    ranks[top] = refined.ranks
    scores = None
    if base.scores is not None:
        scores = np.array(base.scores, dtype=float)
    return Ranking(ranks, refined.orientation, count_upsets(ranks, c), scores, tuple(flags), c.item_labels)


def _roots(lam: float) -> tuple[float, float]:
    a = 0.5 - lam
    r = np.sqrt(1.0 + 4.0 * a)
    return (1.0 - r) / 2.0, (1.0 + r) / 2.0


def _asym_f(x: np.ndarray, lam: float) -> np.ndarray:
    g1, g2 = _roots(lam)
    return (1.0 / (g1 - g2) ** 2) * (1.0 / (g1 - x) + 1.0 / (g2 - x)) - (2.0 / (g1 - g2) ** 3) * (
        np.log(x - g1) - np.log(g2 - x)
    )


def _asym_df(x: np.ndarray, lam: float) -> np.ndarray:
    g1, g2 = _roots(lam)
    return 1.0 / ((x - g1) ** 2 * (x - g2) ** 2)


def asymptotic_fiedler_value() -> float:
    """Limit of ``lambda_2 / n^2`` for the unnormalized Laplacian of ``n - |i - j|``.

    The closed-form eigenfunction solves the second-order equation for any
    ``lambda``; the integral equation adds the boundary condition
    ``f'(0) (1/2 - lambda) + f(0) = 0``, whose root in ``(0, 1/2)`` is the
    Fiedler value.
    """
    def bc(lam: float) -> float:
        return float(_asym_df(np.array(0.0), lam) * (0.5 - lam) + _asym_f(np.array(0.0), lam))

    return float(brentq(bc, 0.2, 0.45, xtol=1e-15))


def asymptotic_fiedler(n: int, lam: float | None = None) -> np.ndarray:
    """Closed-form approximation of the unnormalized Fiedler vector.

    Samples the limit eigenfunction at the cell midpoints ``(i - 1/2) / n``
    and returns a unit vector, increasing in ``i``. ``lam`` is the eigenvalue
    divided by ``n^2``; by default the asymptotic value is used.
    """
    if n < 2:
        raise InvalidSizeError("need at least two items")
    if lam is None:
        lam = asymptotic_fiedler_value()
    if not lam < 0.5:
        raise InvalidParameterError(f"eigenvalue guess must be below 1/2, got {lam}")
    x = (np.arange(1, n + 1) - 0.5) / n
    f = _asym_f(x, lam)
    return f / np.linalg.norm(f)
