"""Similarity matrices built from comparisons, and Robinson (R-matrix) checks."""

from __future__ import annotations

import csv
import itertools
import os
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
import numpy.typing as npt

from .compdata import ComparisonMatrix, MultiComparison
from .errors import DegenerateNoiseError, InvalidParameterError, InvalidSizeError

__all__ = [
    "SimilarityMatrix",
    "RMatrixReport",
    "sim_match",
    "sim_match_debiased",
    "sim_glm",
    "sim_cardinal",
    "sim_contrast",
    "check_R",
    "write_similarity_csv",
    "BRUTE_FORCE_MAX_N",
]

BRUTE_FORCE_MAX_N = 8


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Symmetric similarity between items.

    Entries are nonnegative unless ``allow_negative`` is set; the debiased
    estimator is the only constructor here that needs it.
    """

    values: npt.NDArray[np.float64]
    item_labels: tuple[str, ...] | None = None
    allow_negative: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        s = np.array(self.values, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 1:
            raise InvalidSizeError(f"similarity must be square and non-empty, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InvalidParameterError("similarity entries must be finite")
        scale = max(1.0, float(np.abs(s).max()))
        if np.abs(s - s.T).max() > 1e-12 * scale:
            raise InvalidParameterError("similarity must be symmetric")
        s = (s + s.T) / 2.0
        if not self.allow_negative and s.min() < 0:
            raise InvalidParameterError("similarity entries must be nonnegative")
        if self.item_labels is not None:
            labels = tuple(str(x) for x in self.item_labels)
            if len(labels) != s.shape[0]:
                raise InvalidSizeError(f"expected {s.shape[0]} labels, got {len(labels)}")
            object.__setattr__(self, "item_labels", labels)
        s.setflags(write=False)
        object.__setattr__(self, "values", s)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def labels(self) -> tuple[str, ...]:
        if self.item_labels is not None:
            return self.item_labels
        return tuple(str(i) for i in range(self.n))

    def permuted(self, perm) -> "SimilarityMatrix":
        p = np.asarray(perm, dtype=int)
        labels = tuple(self.labels[k] for k in p)
        return SimilarityMatrix(self.values[np.ix_(p, p)], labels, self.allow_negative)


@dataclass(frozen=True)
class RMatrixReport:
    """Outcome of :func:`check_R`.

    ``violations`` lists quadruples ``(i, j, k, l)`` for which the R-matrix
    rule requires ``A[i, j] <= A[k, l]`` but the matrix has the opposite.
    ``is_strict_R`` is ``None`` when the check was not run.
    """

    is_R: bool
    is_strict_R: bool | None
    violations: list[tuple[int, int, int, int]]
    method: str
    blocks: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.is_strict_R and not self.is_R:
            raise AssertionError("strict-R requires R")

    def to_dict(self) -> dict:
        return {
            "is_R": self.is_R,
            "is_strict_R": self.is_strict_R,
            "violations": [list(v) for v in self.violations],
            "method": self.method,
            "flippable_blocks": [list(b) for b in self.blocks],
        }


def sim_match(c: ComparisonMatrix) -> SimilarityMatrix:
    """Count matching comparisons: ``S = (n 11^T + C C^T) / 2``.

    Entry ``(i, j)`` equals ``sum_k (1 + C[i, k] C[j, k]) / 2``; an unobserved
    comparison contributes 1/2.
    """
    C = c.entries
    S = 0.5 * (c.n + C @ C.T)
    return SimilarityMatrix(S, c.item_labels)


def sim_match_debiased(c: ComparisonMatrix, q: float, p: float) -> SimilarityMatrix:
    """Debiased match similarity for comparisons observed with probability ``q``
    and correct with probability ``p``.

    Off the diagonal this is ``C C^T / (q (2p - 1))^2 + n``. The diagonal is
    pinned to its noiseless value ``2n``: self-similarity is a convention, and
    rescaling the squared observed entries would inflate it by ``1/q``. Entries
    can be negative under heavy subsampling, since the estimator is unbiased
    but not sign-constrained.
    """
    if not 0.0 < q <= 1.0:
        raise InvalidParameterError(f"q must lie in (0, 1], got {q}")
    if not 0.5 < p <= 1.0:
        raise DegenerateNoiseError(f"p must lie in (1/2, 1], got {p}; 2p - 1 must be positive")
    C = c.entries
    n = c.n
    S = (C @ C.T) / (q * (2.0 * p - 1.0)) ** 2 + n
    np.fill_diagonal(S, 2.0 * n)
    return SimilarityMatrix(S, c.item_labels, allow_negative=True)


def sim_glm(mc: MultiComparison) -> SimilarityMatrix:
    """Similarity of empirical win-probability profiles.

    ``S[i, j] = sum_k 1{m_ik m_jk > 0} (1 - |Q_ik - Q_jk|) + 1{m_ik m_jk = 0} / 2``.
    """
    n = mc.n
    Q = mc.win_fraction
    met = (mc.counts > 0).astype(float)
    S = np.zeros((n, n))
    # one reference item at a time keeps memory at O(n^2)
    for k in range(n):
        both = np.outer(met[:, k], met[:, k])
        diff = np.abs(Q[:, k][:, None] - Q[:, k][None, :])
        S += both * (1.0 - diff) + (1.0 - both) * 0.5
    return SimilarityMatrix(S, mc.item_labels)


def sim_cardinal(c: ComparisonMatrix) -> SimilarityMatrix:
    """``1 - |C|`` off the diagonal, 1 on it. Unobserved pairs get similarity 1."""
    S = 1.0 - np.abs(c.entries)
    np.fill_diagonal(S, 1.0)
    return SimilarityMatrix(S, c.item_labels)


def sim_contrast(s: SimilarityMatrix, alpha: float) -> SimilarityMatrix:
    """Entrywise power ``S ** alpha``."""
    if not alpha > 0:
        raise InvalidParameterError(f"contrast exponent must be positive, got {alpha}")
    if s.values.min() < 0:
        raise InvalidParameterError("contrast needs a nonnegative similarity")
    return SimilarityMatrix(np.power(s.values, alpha), s.item_labels)


def _default_tol(A: np.ndarray) -> float:
    return 1e-12 if np.all(A == np.round(A)) else 1e-9


def _r_violations(A: np.ndarray, tol: float, limit: int | None = None) -> list[tuple[int, int, int, int]]:
    n = A.shape[0]
    lower = np.tri(n, n - 1, -1, dtype=bool)  # (i, j) with j < i, j + 1 <= n - 1
    row_bad = (A[:, :-1] - A[:, 1:] > tol) & lower
    col_bad = (A[1:, :] - A[:-1, :] > tol) & np.tri(n - 1, n, -1, dtype=bool)
    out: list[tuple[int, int, int, int]] = []
    for i, j in zip(*np.nonzero(row_bad)):
        out.append((int(i), int(j), int(i), int(j + 1)))
    for i, j in zip(*np.nonzero(col_bad)):
        out.append((int(i + 1), int(j), int(i), int(j)))
    out.sort()
    return out if limit is None else out[:limit]


def _flippable_blocks(A: np.ndarray, tol: float) -> list[tuple[int, int]]:
    """Intervals ``[r, s]`` (other than the whole range) whose rows agree on
    every column outside the interval."""
    n = A.shape[0]
    # neq[t, k]: rows t and t+1 differ in column k
    neq = (np.abs(A[1:, :] - A[:-1, :]) > tol).astype(np.int64)
    P = np.vstack([np.zeros((1, n), dtype=np.int64), np.cumsum(neq, axis=0)])
    cols = np.arange(n)
    blocks = []
    for r in range(n - 1):
        s = np.arange(r + 1, n)
        # differences between consecutive rows r..s, per column
        diffs = P[s, :] - P[r, :]
        outside = (cols[None, :] < r) | (cols[None, :] > s[:, None])
        ok = ~np.any((diffs > 0) & outside, axis=1)
        for sv in s[ok]:
            if not (r == 0 and sv == n - 1):
                blocks.append((r, int(sv)))
    return blocks


def _is_R_batch(stack: np.ndarray, tol: float) -> np.ndarray:
    n = stack.shape[-1]
    lower = np.tri(n, n - 1, -1, dtype=bool)
    row_ok = ~np.any(((stack[:, :, :-1] - stack[:, :, 1:]) > tol) & lower, axis=(1, 2))
    col_ok = ~np.any(((stack[:, 1:, :] - stack[:, :-1, :]) > tol) & np.tri(n - 1, n, -1, dtype=bool), axis=(1, 2))
    return row_ok & col_ok


def check_R(s: SimilarityMatrix | np.ndarray, method: str = "scan", tol: float | None = None) -> RMatrixReport:
    """Check the Robinson property and strictness of a similarity in its current order.

    ``method="scan"`` decides strictness by searching for an interval of rows
    that agree on all outside columns (such a block can be reversed without
    breaking the R property). For an irreducible R-matrix this is equivalent
    to strictness and costs O(n^3).

    ``method="brute-force"`` enumerates all ``n!`` orderings and is limited
    to ``n <= 8``.
    """
    A = np.asarray(s.values if isinstance(s, SimilarityMatrix) else s, dtype=float)
    n = A.shape[0]
    if tol is None:
        tol = _default_tol(A)
    if method not in ("scan", "brute-force"):
        raise InvalidParameterError(f"unknown method {method!r}")
    if method == "brute-force" and n > BRUTE_FORCE_MAX_N:
        raise InvalidSizeError(f"brute-force strictness check limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n < 2:
        return RMatrixReport(True, True, [], method)

    violations = _r_violations(A, tol, limit=1000)
    is_R = not violations
    blocks: list[tuple[int, int]] = []
    if method == "scan":
        if is_R:
            blocks = _flippable_blocks(A, tol)
        strict = is_R and not blocks
    else:
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
        ok_count = 0
        chunk = 5040
        ident = tuple(range(n))
        rev = tuple(reversed(ident))
        others_ok = False
        for start in range(0, len(perms), chunk):
            P = perms[start:start + chunk]
            stack = A[P[:, :, None], P[:, None, :]]
            ok = _is_R_batch(stack, tol)
            ok_count += int(ok.sum())
            for row in P[ok]:
                t = tuple(int(x) for x in row)
                if t != ident and t != rev:
                    others_ok = True
        strict = is_R and not others_ok
    return RMatrixReport(is_R, strict, violations, method, blocks)


def write_similarity_csv(s: SimilarityMatrix, out: str | os.PathLike[str] | TextIO) -> None:
    """Header row of labels followed by the symmetric body."""
    def _write(fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(s.labels)
        for row in s.values:
            w.writerow(repr(float(x)) for x in row)

    if hasattr(out, "write"):
        _write(out)  # type: ignore[arg-type]
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
