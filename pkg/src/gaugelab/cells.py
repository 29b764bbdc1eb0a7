"""Half-open intervals, tagged cells, tagged divisions, and gauges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, GaugeContractError
from .exact import is_exact_scalar


@dataclass(frozen=True)
class Interval:
    """Half-open interval ]u, v] with u < v.

    The left endpoint is excluded.  Cells of a division abut without
    overlapping, and the length |I| = v - u is positive by construction.
    """

    u: object
    v: object

    def __post_init__(self):
        if not self.u < self.v:
            raise ArgumentError(f"interval needs u < v, got u={self.u!r}, v={self.v!r}")

    @property
    def length(self):
        return self.v - self.u

    def __contains__(self, s) -> bool:
        return self.u < s <= self.v

    def __str__(self) -> str:
        return f"]{self.u}, {self.v}]"


@dataclass(frozen=True)
class TaggedCell:
    """A cell with a sample point anywhere in its closure.

    Tags may sit at either endpoint of the closed hull [u, v]; in particular
    the left endpoint, which the half-open cell itself excludes, is a legal
    tag.  That freedom is what lets a gauge force specific tags.
    """

    tag: object
    cell: Interval

    def __post_init__(self):
        if not (self.cell.u <= self.tag <= self.cell.v):
            raise ArgumentError(
                f"tag {self.tag!r} outside closure of {self.cell}"
            )


class TaggedDivision:
    """Ordered tagged cells partitioning ]a, b].

    Stored as parallel sequences (numpy arrays in the float regime, tuples of
    exact scalars otherwise) so large uniform divisions stay cheap.  Adjacent
    cells may share a tag: a point can legally tag the cell on each side of
    itself, and sums are indifferent to the duplication.
    """

    __slots__ = ("domain", "tags", "lefts", "rights", "exact")

    def __init__(self, domain: Interval, tags, lefts, rights, *, validate: bool = True):
        self.domain = domain
        if isinstance(tags, np.ndarray):
            self.tags = np.asarray(tags, dtype=float)
            self.lefts = np.asarray(lefts, dtype=float)
            self.rights = np.asarray(rights, dtype=float)
            self.exact = False
        else:
            self.tags = tuple(tags)
            self.lefts = tuple(lefts)
            self.rights = tuple(rights)
            self.exact = True
        if validate:
            self._validate()

    @classmethod
    def from_cells(cls, cells: Sequence[TaggedCell], domain: Optional[Interval] = None):
        cells = list(cells)
        if not cells:
            raise ArgumentError("a division needs at least one cell")
        if domain is None:
            domain = Interval(cells[0].cell.u, cells[-1].cell.v)
        exact = all(
            is_exact_scalar(c.tag) and is_exact_scalar(c.cell.u) and is_exact_scalar(c.cell.v)
            for c in cells
        )
        tags = [c.tag for c in cells]
        lefts = [c.cell.u for c in cells]
        rights = [c.cell.v for c in cells]
        if not exact:
            tags = np.array([float(t) for t in tags])
            lefts = np.array([float(u) for u in lefts])
            rights = np.array([float(v) for v in rights])
        return cls(domain, tags, lefts, rights)

    def __len__(self) -> int:
        return len(self.tags)

    @property
    def n(self) -> int:
        return len(self.tags)

    def iter_cells(self) -> Iterator[TaggedCell]:
        if self.exact:
            for s, u, v in zip(self.tags, self.lefts, self.rights):
                yield TaggedCell(s, Interval(u, v))
            return
        # plain floats, so point functions see Python semantics (1/0 raises,
        # it does not return numpy inf)
        for s, u, v in zip(self.tags.tolist(), self.lefts.tolist(), self.rights.tolist()):
            yield TaggedCell(s, Interval(u, v))

    @property
    def cells(self) -> Tuple[TaggedCell, ...]:
        return tuple(self.iter_cells())

    def as_float_arrays(self):
        """(tags, lefts, rights) as numpy arrays, or None in the exact regime."""
        if self.exact:
            return None
        return self.tags, self.lefts, self.rights

    def _validate(self):
        n = len(self.tags)
        if n == 0 or len(self.lefts) != n or len(self.rights) != n:
            raise ArgumentError("division needs equal-length, non-empty cell data")
        a, b = self.domain.u, self.domain.v
        if self.exact:
            if not (self.lefts[0] == a and self.rights[-1] == b):
                raise ArgumentError("division does not span its domain")
            total = 0
            for i in range(n):
                u, v, s = self.lefts[i], self.rights[i], self.tags[i]
                if not u < v:
                    raise ArgumentError(f"degenerate cell ]{u!r}, {v!r}]")
                if not (u <= s <= v):
                    raise ArgumentError(f"tag {s!r} outside cell closure [{u!r}, {v!r}]")
                if i and not self.lefts[i] == self.rights[i - 1]:
                    raise ArgumentError("cells do not abut")
                total = total + (v - u)
            if not total == b - a:
                raise ArgumentError("cell lengths do not sum to the domain length")
        else:
            t, lo, hi = self.tags, self.lefts, self.rights
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise ArgumentError("division contains non-finite values")
            if lo[0] != a or hi[-1] != b:
                raise ArgumentError("division does not span its domain")
            if not np.all(lo < hi):
                raise ArgumentError("degenerate cell in division")
            if n > 1 and not np.array_equal(hi[:-1], lo[1:]):
                raise ArgumentError("cells do not abut")
            if not (np.all(lo <= t) and np.all(t <= hi)):
                raise ArgumentError("tag outside cell closure")
            span = b - a
            if abs(float(np.sum(hi - lo)) - span) > 1e-12 * max(1.0, abs(span)):
                raise ArgumentError("cell lengths do not sum to the domain length")

    def __repr__(self) -> str:
        return f"TaggedDivision(n={self.n}, domain={self.domain})"


class Gauge:
    """Strictly positive cell-width control delta(s).

    Constant gauges reproduce plain mesh-size control; functional gauges can
    shrink near awkward points (or refuse to shrink at an isolated point,
    forcing it to appear as a tag).  Evaluating to a non-positive width is a
    contract violation and raises, distinct from a cell merely failing to be
    fine.
    """

    __slots__ = ("name", "_constant", "_fn", "_batch")

    def __init__(self, *, constant=None, fn=None, batch=None, name: str = "gauge"):
        if (constant is None) == (fn is None):
            raise ArgumentError("a gauge is either constant or functional")
        self.name = name
        self._constant = constant
        self._fn = fn
        self._batch = batch

    @classmethod
    def constant(cls, delta, name: Optional[str] = None) -> "Gauge":
        if not delta > 0:
            raise GaugeContractError("(everywhere)", delta)
        return cls(constant=delta, name=name or f"constant({delta})")

    @classmethod
    def from_function(
        cls,
        fn: Callable,
        batch: Optional[Callable] = None,
        name: str = "gauge",
    ) -> "Gauge":
        return cls(fn=fn, batch=batch, name=name)

    @property
    def is_constant(self) -> bool:
        return self._constant is not None

    @property
    def constant_value(self):
        return self._constant

    def __call__(self, s):
        if self._constant is not None:
            return self._constant
        width = self._fn(s)
        if not width > 0:
            raise GaugeContractError(s, width)
        return width

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation with the same positivity contract."""
        points = np.asarray(points, dtype=float)
        if self._constant is not None:
            return np.full(points.shape, float(self._constant))
        if self._batch is not None:
            widths = np.asarray(self._batch(points), dtype=float)
        else:
            widths = np.array([float(self._fn(s)) for s in points])
        bad = ~(widths > 0)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise GaugeContractError(points[i], widths[i])
        return widths

    def __repr__(self) -> str:
        return f"Gauge({self.name})"
