"""Pairwise comparison data: containers, synthetic generators, file I/O.

Orientation convention used everywhere in the package: ``entries[i, j] = +1``
means item ``i`` is preferred to item ``j``, and rank 1 is the best item.
The diagonal is fixed to 1. Missing comparisons and draws both hold the value
0 and are told apart by the ``observed`` mask.

Random draws use numpy's PCG64 bit generator seeded with a 64-bit integer,
so a seed reproduces the same data on any platform.
"""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import numpy.typing as npt

from .errors import InvalidParameterError, InvalidSizeError, ParseError, RangeError

__all__ = [
    "ComparisonMatrix",
    "MultiComparison",
    "NoiseSpec",
    "NOISE_KINDS",
    "full_consistent",
    "flip_pairs",
    "delete_pairs",
    "apply_noise",
    "generate_glm",
    "logistic",
    "ingest_matchlist",
    "read_matchlist",
    "write_comparison_csv",
    "read_comparison_csv",
    "make_rng",
]

_ATOL = 1e-12

NOISE_KINDS = ("uniform-corrupt", "uniform-delete", "erdos-renyi", "local-range", "glm-btl")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a non-negative 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFF_FFFF_FFFF_FFFF))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    """Antisymmetric matrix of pairwise preferences with an observation mask.

    Parameters
    ----------
    entries : (n, n) array
        Values in [-1, 1]; ``entries[i, j] > 0`` means ``i`` beat ``j``.
    observed : (n, n) bool array, optional
        Symmetric mask. Defaults to "every nonzero entry plus the diagonal".
    item_labels : sequence of str, optional
        Display names, one per item.
    """

    entries: npt.NDArray[np.float64]
    observed: npt.NDArray[np.bool_] | None = None
    item_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.entries, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InvalidSizeError(f"comparison matrix must be square, got shape {c.shape}")
        n = c.shape[0]
        if n < 1:
            raise InvalidSizeError("comparison matrix must contain at least one item")
        if self.observed is None:
            obs = c != 0
        else:
            obs = np.asarray(self.observed, dtype=bool)
            if obs.shape != c.shape:
                raise InvalidSizeError("observed mask shape does not match entries")
        obs = obs.copy()
        np.fill_diagonal(obs, True)
        if not np.all(np.isfinite(c)):
            raise RangeError("comparison entries must be finite")
        if np.any(np.abs(c) > 1 + _ATOL):
            raise RangeError("comparison entries must lie in [-1, 1]")
        if not np.all(np.diag(c) == 1):
            raise InvalidParameterError("diagonal entries must equal 1")
        off = ~np.eye(n, dtype=bool)
        if np.any(np.abs(c + c.T)[off] > _ATOL):
            raise InvalidParameterError("comparison matrix must be antisymmetric off the diagonal")
        if not np.array_equal(obs, obs.T):
            raise InvalidParameterError("observed mask must be symmetric")
        if np.any(c[~obs] != 0):
            raise InvalidParameterError("unobserved entries must hold 0")
        labels = self.item_labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise InvalidSizeError(f"expected {n} labels, got {len(labels)}")
        object.__setattr__(self, "entries", _frozen(c))
        object.__setattr__(self, "observed", _frozen(obs))
        object.__setattr__(self, "item_labels", labels)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def labels(self) -> tuple[str, ...]:
        if self.item_labels is not None:
            return self.item_labels
        return tuple(str(i) for i in range(self.n))

    @property
    def is_ordinal(self) -> bool:
        return bool(np.all(np.isin(self.entries, (-1.0, 0.0, 1.0))))

    def observed_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Indices ``(i, j)`` with ``i < j`` of observed off-diagonal pairs."""
        iu, ju = np.triu_indices(self.n, 1)
        keep = self.observed[iu, ju]
        return iu[keep], ju[keep]

    def n_observed_pairs(self) -> int:
        return int(np.count_nonzero(np.triu(self.observed, 1)))

    def permuted(self, perm: Sequence[int]) -> "ComparisonMatrix":
        """Relabel items: item ``k`` of the result is item ``perm[k]`` of ``self``."""
        p = np.asarray(perm, dtype=int)
        if sorted(p.tolist()) != list(range(self.n)):
            raise InvalidParameterError("perm must be a permutation of range(n)")
        labels = None if self.item_labels is None else tuple(self.item_labels[k] for k in p)
        return ComparisonMatrix(self.entries[np.ix_(p, p)], self.observed[np.ix_(p, p)], labels)

    def submatrix(self, items: Sequence[int]) -> "ComparisonMatrix":
        idx = np.asarray(items, dtype=int)
        labels = tuple(self.labels[k] for k in idx)
        return ComparisonMatrix(self.entries[np.ix_(idx, idx)], self.observed[np.ix_(idx, idx)], labels)

    def reversed_signs(self) -> "ComparisonMatrix":
        c = -self.entries
        np.fill_diagonal(c, 1.0)
        return ComparisonMatrix(c, self.observed, self.item_labels)

    def _replace(self, entries: np.ndarray, observed: np.ndarray) -> "ComparisonMatrix":
        return ComparisonMatrix(entries, observed, self.item_labels)


@dataclass(frozen=True, eq=False)
class MultiComparison:
    """Repeated comparisons aggregated per pair.

    ``counts[i, j]`` is the number of times ``i`` and ``j`` met and
    ``win_fraction[i, j]`` the fraction of those meetings ``i`` won
    (1/2 when they never met).
    """

    counts: npt.NDArray[np.int64]
    win_fraction: npt.NDArray[np.float64]
    item_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.counts)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidSizeError(f"counts must be square, got shape {m.shape}")
        if np.any(m < 0):
            raise InvalidParameterError("counts must be nonnegative")
        if not np.all(np.equal(np.mod(m, 1), 0)):
            raise InvalidParameterError("counts must be integers")
        m = m.astype(np.int64)
        if not np.array_equal(m, m.T):
            raise InvalidParameterError("counts must be symmetric")
        if np.any(np.diag(m) != 0):
            raise InvalidParameterError("an item cannot be compared with itself")
        q = np.asarray(self.win_fraction, dtype=float)
        if q.shape != m.shape:
            raise InvalidSizeError("win_fraction shape does not match counts")
        if np.any((q < -_ATOL) | (q > 1 + _ATOL)):
            raise RangeError("win fractions must lie in [0, 1]")
        q = q.copy()
        q[m == 0] = 0.5
        met = m > 0
        if np.any(np.abs(q + q.T - 1)[met] > 1e-9):
            raise InvalidParameterError("win_fraction[i, j] + win_fraction[j, i] must equal 1")
        labels = self.item_labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != m.shape[0]:
                raise InvalidSizeError(f"expected {m.shape[0]} labels, got {len(labels)}")
        object.__setattr__(self, "counts", _frozen(m))
        object.__setattr__(self, "win_fraction", _frozen(q))
        object.__setattr__(self, "item_labels", labels)

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @property
    def wins(self) -> np.ndarray:
        """Expected-value win counts ``counts * win_fraction`` (ties count half)."""
        return self.counts * self.win_fraction

    @classmethod
    def from_wins(cls, wins: npt.ArrayLike, item_labels: Sequence[str] | None = None) -> "MultiComparison":
        """Build from a matrix where ``wins[i, j]`` counts victories of ``i`` over ``j``."""
        w = np.asarray(wins, dtype=float)
        if np.any(w < 0):
            raise InvalidParameterError("win counts must be nonnegative")
        tot = w + w.T
        np.fill_diagonal(tot, 0)
        counts = np.rint(tot).astype(np.int64)
        if np.any(np.abs(counts - tot) > 1e-9):
            raise InvalidParameterError("wins[i, j] + wins[j, i] must be an integer")
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(counts > 0, w / np.where(tot > 0, tot, 1), 0.5)
        return cls(counts, q, None if item_labels is None else tuple(item_labels))

    def to_comparison(self) -> ComparisonMatrix:
        """Average outcome ``2 Q - 1`` on every pair that met."""
        met = self.counts > 0
        e = np.where(met, 2.0 * self.win_fraction - 1.0, 0.0)
        np.fill_diagonal(e, 1.0)
        return ComparisonMatrix(e, met, self.item_labels)

    @classmethod
    def from_comparison(cls, c: ComparisonMatrix) -> "MultiComparison":
        """One meeting per observed pair; a cardinal entry ``x`` is a win fraction ``(1 + x) / 2``."""
        counts = c.observed.astype(np.int64)
        np.fill_diagonal(counts, 0)
        q = np.where(counts > 0, (1.0 + c.entries) / 2.0, 0.5)
        return cls(counts, q, c.item_labels)


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters for :func:`apply_noise`.

    Only the fields used by ``kind`` are read:

    * ``uniform-corrupt``: ``fraction`` of observed pairs get their sign flipped
    * ``uniform-delete``: ``fraction`` of observed pairs are removed
    * ``erdos-renyi``: keep each pair with probability ``q``, keep its sign with probability ``p``
    * ``local-range``: pairs with ``|i - j| <= m_range`` get a ``Unif[-1, 1]`` value
    * ``glm-btl``: each observed pair is re-drawn once from a logistic model with ``skills``
    """

    kind: str
    fraction: float = 0.0
    q: float = 1.0
    p: float = 1.0
    m_range: int = 0
    skills: tuple[float, ...] | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise InvalidParameterError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.kind in ("uniform-corrupt", "uniform-delete") and not 0.0 <= self.fraction <= 1.0:
            raise InvalidParameterError(f"fraction must lie in [0, 1], got {self.fraction}")
        if self.kind == "erdos-renyi":
            if not 0.0 < self.q <= 1.0:
                raise InvalidParameterError(f"q must lie in (0, 1], got {self.q}")
            if not 0.5 < self.p <= 1.0:
                raise InvalidParameterError(f"p must lie in (1/2, 1], got {self.p}")
        if self.kind == "local-range" and (int(self.m_range) != self.m_range or self.m_range < 0):
            raise InvalidParameterError(f"m_range must be a nonnegative integer, got {self.m_range}")
        if self.kind == "glm-btl" and self.skills is None:
            raise InvalidParameterError("glm-btl noise requires skills")
        if self.skills is not None:
            object.__setattr__(self, "skills", tuple(float(s) for s in self.skills))


def full_consistent(n: int, item_labels: Sequence[str] | None = None) -> ComparisonMatrix:
    """Complete tournament consistent with the order ``0 < 1 < ... < n-1`` (item 0 best)."""
    if int(n) != n or n < 2:
        raise InvalidSizeError(f"need at least 2 items, got {n}")
    n = int(n)
    c = np.triu(np.ones((n, n)), 1) - np.tril(np.ones((n, n)), -1)
    np.fill_diagonal(c, 1.0)
    return ComparisonMatrix(c, np.ones((n, n), dtype=bool), None if item_labels is None else tuple(item_labels))


def _pair_array(pairs: Iterable[tuple[int, int]], n: int) -> tuple[np.ndarray, np.ndarray]:
    pr = np.asarray(list(pairs), dtype=int).reshape(-1, 2)
    if pr.size and (pr.min() < 0 or pr.max() >= n or np.any(pr[:, 0] == pr[:, 1])):
        raise InvalidParameterError("pairs must hold distinct in-range item indices")
    return pr[:, 0], pr[:, 1]


def flip_pairs(c: ComparisonMatrix, pairs: Iterable[tuple[int, int]]) -> ComparisonMatrix:
    """Switch the sign of the listed comparisons (both ``(i, j)`` and ``(j, i)``)."""
    i, j = _pair_array(pairs, c.n)
    e = np.array(c.entries)
    e[i, j] = -e[i, j]
    e[j, i] = -e[j, i]
    return c._replace(e, c.observed)


def delete_pairs(c: ComparisonMatrix, pairs: Iterable[tuple[int, int]]) -> ComparisonMatrix:
    """Mark the listed comparisons as missing."""
    i, j = _pair_array(pairs, c.n)
    e = np.array(c.entries)
    obs = np.array(c.observed)
    e[i, j] = e[j, i] = 0.0
    obs[i, j] = obs[j, i] = False
    return c._replace(e, obs)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def logistic(x: npt.ArrayLike) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


def apply_noise(c: ComparisonMatrix, spec: NoiseSpec) -> ComparisonMatrix:
    """Return a noisy copy of ``c``; deterministic for a given ``spec.seed``.

    Pairs are visited in row-major upper-triangle order, so the same seed
    picks the same pairs on every platform.
    """
    rng = make_rng(spec.seed)
    n = c.n
    e = np.array(c.entries)
    obs = np.array(c.observed)
    iu, ju = c.observed_pairs()

    if spec.kind in ("uniform-corrupt", "uniform-delete"):
        if not c.is_ordinal:
            raise InvalidParameterError(f"{spec.kind} noise expects ordinal comparisons")
        k = _round_half_up(spec.fraction * iu.size)
        pick = rng.choice(iu.size, size=k, replace=False) if k else np.empty(0, dtype=int)
        i, j = iu[pick], ju[pick]
        if spec.kind == "uniform-corrupt":
            e[i, j] = -e[i, j]
            e[j, i] = -e[j, i]
        else:
            e[i, j] = e[j, i] = 0.0
            obs[i, j] = obs[j, i] = False

    elif spec.kind == "erdos-renyi":
        keep = rng.random(iu.size) < spec.q
        flip = rng.random(iu.size) >= spec.p
        sign = np.where(flip, -1.0, 1.0)
        drop_i, drop_j = iu[~keep], ju[~keep]
        e[iu, ju] = e[iu, ju] * sign
        e[ju, iu] = -e[iu, ju]
        e[drop_i, drop_j] = e[drop_j, drop_i] = 0.0
        obs[drop_i, drop_j] = obs[drop_j, drop_i] = False

    elif spec.kind == "local-range":
        near = (ju - iu) <= spec.m_range
        vals = rng.uniform(-1.0, 1.0, size=int(np.count_nonzero(near)))
        i, j = iu[near], ju[near]
        e[i, j] = vals
        e[j, i] = -vals

    elif spec.kind == "glm-btl":
        nu = np.asarray(spec.skills, dtype=float)
        if nu.shape != (n,):
            raise InvalidParameterError(f"expected {n} skills, got {nu.shape[0]}")
        win = rng.random(iu.size) < logistic(nu[iu] - nu[ju])
        vals = np.where(win, 1.0, -1.0)
        e[iu, ju] = vals
        e[ju, iu] = -vals

    return c._replace(e, obs)


def generate_glm(
    skills: npt.ArrayLike,
    counts: npt.ArrayLike,
    link: str = "logistic",
    seed: int = 0,
) -> MultiComparison:
    """Draw ``counts[i, j]`` outcomes per pair with ``P(i beats j) = H(skills[i] - skills[j])``."""
    if link != "logistic":
        raise InvalidParameterError(f"unsupported link {link!r}")
    nu = np.asarray(skills, dtype=float)
    m = np.asarray(counts)
    n = nu.shape[0]
    if m.shape != (n, n):
        raise InvalidSizeError(f"counts must be {n}x{n}")
    if np.any(m < 0):
        raise InvalidParameterError("counts must be nonnegative")
    if not np.array_equal(m, m.T):
        raise InvalidParameterError("counts must be symmetric")
    m = np.array(m, dtype=np.int64)
    np.fill_diagonal(m, 0)
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    w = rng.binomial(m[iu, ju], logistic(nu[iu] - nu[ju]))
    q = np.full((n, n), 0.5)
    met = m[iu, ju] > 0
    frac = np.where(met, w / np.maximum(m[iu, ju], 1), 0.5)
    q[iu, ju] = frac
    q[ju, iu] = 1.0 - frac
    return MultiComparison(m, q)


def _lines(stream: str | Iterable[str] | TextIO) -> Iterable[str]:
    if isinstance(stream, str):
        return io.StringIO(stream)
    return stream


def ingest_matchlist(stream: str | Iterable[str] | TextIO) -> ComparisonMatrix:
    """Parse ``label_a,label_b,outcome`` records into a comparison matrix.

    ``outcome`` is read from ``label_a``'s side (+1 win, -1 loss, 0 draw).
    All records about the same unordered pair are averaged. Blank lines and
    lines starting with ``#`` are skipped.
    """
    index: dict[str, int] = {}
    sums: dict[tuple[int, int], float] = {}
    nrec: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(_lines(stream), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = next(csv.reader([line]))
        except csv.Error as exc:
            raise ParseError(str(exc), lineno) from None
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields 'label_a,label_b,outcome', got {len(fields)}", lineno)
        a, b, out = (f.strip() for f in fields)
        if not a or not b:
            raise ParseError("empty item label", lineno)
        if a == b:
            raise ParseError(f"item {a!r} compared with itself", lineno)
        try:
            value = float(out.replace("−", "-"))
        except ValueError:
            raise ParseError(f"outcome {out!r} is not a number", lineno) from None
        if not np.isfinite(value) or not -1.0 <= value <= 1.0:
            raise RangeError(f"line {lineno}: outcome {value} outside [-1, 1]")
        ia = index.setdefault(a, len(index))
        ib = index.setdefault(b, len(index))
        key, sign = ((ia, ib), 1.0) if ia < ib else ((ib, ia), -1.0)
        sums[key] = sums.get(key, 0.0) + sign * value
        nrec[key] = nrec.get(key, 0) + 1
    n = len(index)
    if n < 2:
        raise ParseError("match list must mention at least two items")
    e = np.zeros((n, n))
    obs = np.zeros((n, n), dtype=bool)
    for (i, j), s in sums.items():
        v = s / nrec[(i, j)]
        e[i, j], e[j, i] = v, -v
        obs[i, j] = obs[j, i] = True
    np.fill_diagonal(e, 1.0)
    return ComparisonMatrix(e, obs, tuple(index))


def read_matchlist(path: str | os.PathLike[str]) -> ComparisonMatrix:
    with open(path, encoding="utf-8") as fh:
        return ingest_matchlist(fh)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_comparison_csv(c: ComparisonMatrix, out: str | os.PathLike[str] | TextIO) -> None:
    """Header row of labels, then one row per item; ``NA`` marks unobserved pairs."""
    def _write(fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(c.labels)
        for i in range(c.n):
            w.writerow(_fmt(c.entries[i, j]) if c.observed[i, j] else "NA" for j in range(c.n))

    if hasattr(out, "write"):
        _write(out)  # type: ignore[arg-type]
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            _write(fh)


def read_comparison_csv(source: str | os.PathLike[str] | TextIO) -> ComparisonMatrix:
    def _read(fh: TextIO) -> ComparisonMatrix:
        rows = list(csv.reader(fh))
        if not rows:
            raise ParseError("empty comparison CSV", 1)
        labels = rows[0]
        n = len(labels)
        body = rows[1:]
        if len(body) != n:
            raise ParseError(f"expected {n} data rows, got {len(body)}")
        e = np.zeros((n, n))
        obs = np.zeros((n, n), dtype=bool)
        for i, row in enumerate(body):
            if len(row) != n:
                raise ParseError(f"expected {n} fields, got {len(row)}", i + 2)
            for j, cell in enumerate(row):
                if cell.strip() == "NA":
                    continue
                try:
                    e[i, j] = float(cell)
                except ValueError:
                    raise ParseError(f"bad value {cell!r}", i + 2) from None
                obs[i, j] = True
        return ComparisonMatrix(e, obs, tuple(labels))

    if hasattr(source, "read"):
        return _read(source)  # type: ignore[arg-type]
    with open(source, encoding="utf-8", newline="") as fh:
        return _read(fh)
