"""Reference rankers: point score, Rank Centrality and Bradley-Terry-Luce MLE."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .compdata import ComparisonMatrix, MultiComparison
from .errors import ConvergenceError, DegeneracyError, InvalidParameterError
from .spectral import Ranking, count_upsets

__all__ = [
    "ScoreVector",
    "point_score",
    "rank_centrality",
    "rank_centrality_chain",
    "btl_mle",
    "btl_log_likelihood",
    "find_ties",
]


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Per-item scores, higher is better.

    ``ties`` lists every pair ``(i, j)``, ``i < j``, whose scores agree within
    the tolerance used by the ranker.
    """

    scores: npt.NDArray[np.float64]
    ties: list[tuple[int, int]] = field(default_factory=list)
    flags: tuple[str, ...] = ()
    iterations: int = 0

    def ranking(self, c: ComparisonMatrix | None = None) -> Ranking:
        """Sort by decreasing score; ties keep index order."""
        order = np.argsort(-np.asarray(self.scores), kind="stable")
        r = Ranking.from_order(order, orientation="decreasing", scores=self.scores, flags=self.flags)
        if c is None:
            return r
        return Ranking(r.ranks, "decreasing", count_upsets(r.ranks, c), self.scores, self.flags, c.item_labels)


def find_ties(scores: npt.ArrayLike, tol: float = 0.0) -> list[tuple[int, int]]:
    """All index pairs whose scores are linked by gaps of at most ``tol``."""
    s = np.asarray(scores, dtype=float)
    order = np.argsort(s, kind="stable")
    ties: list[tuple[int, int]] = []
    group = [int(order[0])] if s.size else []
    for a, b in zip(order[:-1], order[1:]):
        if s[b] - s[a] <= tol:
            group.append(int(b))
            continue
        ties.extend(_pairs(group))
        group = [int(b)]
    ties.extend(_pairs(group))
    return sorted(ties)


def _pairs(group: list[int]) -> list[tuple[int, int]]:
    g = sorted(group)
    return [(g[x], g[y]) for x in range(len(g)) for y in range(x + 1, len(g))]


def point_score(c: ComparisonMatrix) -> ScoreVector:
    """Wins minus losses: ``sum_{k != i} C[i, k]`` over observed opponents."""
    C = np.array(c.entries)
    np.fill_diagonal(C, 0.0)
    scores = C.sum(axis=1)
    tol = 0.0 if c.is_ordinal else 1e-12 * max(1.0, float(np.abs(scores).max()))
    return ScoreVector(scores, find_ties(scores, tol))


def _beats_fraction(data: ComparisonMatrix | MultiComparison) -> tuple[np.ndarray, np.ndarray]:
    """``A[i, j]``: fraction of meetings ``j`` won against ``i``; ``met`` mask."""
    if isinstance(data, ComparisonMatrix):
        met = np.array(data.observed)
        np.fill_diagonal(met, False)
        A = np.where(met, (1.0 - data.entries) / 2.0, 0.0)
    else:
        met = data.counts > 0
        A = np.where(met, 1.0 - data.win_fraction, 0.0)
    return A, met


def _strongly_connected(adj: np.ndarray) -> bool:
    a = np.array(adj, dtype=bool)
    np.fill_diagonal(a, False)
    ncomp, _ = connected_components(csr_matrix(a), directed=True, connection="strong")
    return ncomp == 1


def rank_centrality_chain(
    data: ComparisonMatrix | MultiComparison,
    damping: float | None = None,
) -> tuple[np.ndarray, float]:
    """Row-stochastic transition matrix and the damping actually applied.

    From ``i`` the walk moves to ``j`` with probability ``A[i, j] / d_max``,
    where ``A[i, j]`` is the fraction of their meetings won by ``j`` and
    ``d_max`` the largest number of distinct opponents; the remaining mass
    stays on ``i``. ``damping=None`` adds 1% uniform teleportation only when
    the win graph is not strongly connected.
    """
    A, met = _beats_fraction(data)
    n = A.shape[0]
    dmax = max(int(met.sum(axis=1).max()), 1)
    P = A / dmax
    P[np.diag_indices(n)] = 1.0 - P.sum(axis=1)
    if damping is None:
        damping = 0.0 if _strongly_connected(P > 0) else 0.01
    if not 0.0 <= damping < 1.0:
        raise InvalidParameterError(f"damping must lie in [0, 1), got {damping}")
    if damping > 0:
        P = (1.0 - damping) * P + damping / n
    return P, float(damping)


def rank_centrality(
    data: ComparisonMatrix | MultiComparison,
    damping: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> ScoreVector:
    """Stationary distribution of the comparison Markov chain, by power iteration."""
    P, used = rank_centrality_chain(data, damping)
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    resid = np.inf
    for it in range(1, max_iter + 1):
        nxt = pi @ P
        nxt /= nxt.sum()
        resid = float(np.abs(nxt - pi).sum())
        pi = nxt
        if resid <= tol:
            flags = ("teleport",) if used > 0 else ()
            return ScoreVector(pi, find_ties(pi, 1e-15), flags, it)
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", resid)


def btl_log_likelihood(nu: np.ndarray, wins: np.ndarray) -> float:
    """``sum_{i != j} wins[i, j] log(nu_i / (nu_i + nu_j))``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = nu[:, None] / (nu[:, None] + nu[None, :])
        terms = np.where(wins > 0, wins * np.log(p), 0.0)
    np.fill_diagonal(terms, 0.0)
    return float(terms.sum())


def btl_mle(
    data: MultiComparison | ComparisonMatrix,
    tol: float = 1e-8,
    max_iter: int = 100_000,
    regularize: bool = True,
) -> ScoreVector:
    """Bradley-Terry-Luce maximum likelihood by minorization-maximization.

    Each sweep applies ``nu_i <- W_i / sum_j n_ij / (nu_i + nu_j)`` to all
    items and rescales so that ``sum(nu) = n``. Iteration stops once the
    largest relative change is at most ``tol``. Scores are ``log(nu)``.

    The MLE exists only if the win graph is strongly connected. Otherwise,
    with ``regularize=True``, half a win is added on both sides of every
    pair that met and the result is flagged ``smoothed``; with
    ``regularize=False`` a :class:`DegeneracyError` is raised.
    """
    mc = MultiComparison.from_comparison(data) if isinstance(data, ComparisonMatrix) else data
    N = mc.counts.astype(float)
    W = mc.wins
    n = mc.n
    if np.any(N.sum(axis=1) == 0):
        isolated = np.flatnonzero(N.sum(axis=1) == 0).tolist()
        raise DegeneracyError(f"items {isolated} were never compared")
    flags: tuple[str, ...] = ()
    if not _strongly_connected(W > 0):
        if not regularize:
            raise DegeneracyError("win graph is not strongly connected; maximum likelihood does not exist")
        met = N > 0
        W = W + 0.5 * met
        N = N + 1.0 * met
        flags = ("smoothed",)
    total_wins = W.sum(axis=1)
    nu = np.ones(n)
    ll = btl_log_likelihood(nu, W)
    change = np.inf
    for it in range(1, max_iter + 1):
        denom = (N / (nu[:, None] + nu[None, :])).sum(axis=1)
        new = total_wins / denom
        new *= n / new.sum()
        change = float(np.max(np.abs(new - nu) / nu))
        nu = new
        ll_new = btl_log_likelihood(nu, W)
        assert ll_new >= ll - 1e-9 * max(1.0, abs(ll)), "MM step decreased the likelihood"
        ll = ll_new
        if change <= tol:
            scores = np.log(nu)
            return ScoreVector(scores, find_ties(scores, 1e-12), flags, it)
    raise ConvergenceError(f"MM iteration did not converge in {max_iter} sweeps", change)
