"""Integral definitions driven by a shared finite-refinement controller.

"For every division finer than delta" is not something a program can check,
so every integrator here runs a ladder of refinement levels under several
independent division strategies and classifies what it sees:

* converged    - strategies agree with each other and with their own
                 previous level, for a window of consecutive levels;
* diverged     - some strategy's sums keep growing geometrically;
* oscillating  - each strategy is internally stable but they disagree by a
                 persistent gap (the signature of tag sensitivity);
* inconclusive - the schedule ended without any of the above.

The labels corroborate; only the Darboux integrator, whose upper and lower
sums genuinely bracket the integral, proves its tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .cells import Gauge, Interval, TaggedDivision
from .divisions import (
    RefinementSchedule,
    delta_fine_division,
    make_shifted_uniform,
    make_uniform,
    riemann_sum,
)
from .errors import ArgumentError, MonotonicityError, OracleInconsistencyError
from .integrand import BurkillIntegrand, IntervalFactor, increments_of, make_integrand
from .results import IntegralResult, Status, TraceRow


# --------------------------------------------------------------------------
# Division strategies
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GridStrategy:
    """A family of divisions for constant-mesh probing: grid kind + tag rule."""

    name: str
    family: str  # "uniform" | "shifted-uniform"
    tag_rule: str

    def build(self, a, b, n: int) -> TaggedDivision:
        if self.family == "uniform":
            return make_uniform(a, b, n, tag_rule=self.tag_rule)
        if self.family == "shifted-uniform":
            return make_shifted_uniform(a, b, n, tag_rule=self.tag_rule)
        raise ArgumentError(f"unknown grid family {self.family!r}")


RS_STRATEGIES = (
    GridStrategy("rational-left", "uniform", "left"),
    GridStrategy("rational-mid", "uniform", "midpoint"),
    GridStrategy("shifted-left", "shifted-uniform", "left"),
)


@dataclass(frozen=True)
class TagSelectorStrategy:
    """A tag-selector order injected into gauge-driven bisection."""

    name: str
    selectors: Tuple[str, ...]


GAUGE_STRATEGIES = (
    TagSelectorStrategy("left-tags", ("left",)),
    TagSelectorStrategy("mid-tags", ("midpoint",)),
    TagSelectorStrategy("right-tags", ("right",)),
)

# Selector orders that always include both endpoints; required when a gauge
# anchors tags at interval endpoints (each anchored cell accepts exactly one
# endpoint candidate).
ANCHORED_STRATEGIES = (
    TagSelectorStrategy("left-first", ("left", "midpoint", "right")),
    TagSelectorStrategy("right-first", ("right", "midpoint", "left")),
)


# --------------------------------------------------------------------------
# Controller
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceController:
    """Finite surrogate for the every-division quantifier.

    tolerance_abs/_rel combine into the stability tolerance; `window` is the
    number of consecutive stable levels demanded; `growth_factor` flags
    geometric growth; `oscillation_gap` is the persistent cross-strategy
    spread that marks tag sensitivity.
    """

    tolerance_abs: float = 1e-9
    tolerance_rel: float = 1e-9
    window: int = 3
    growth_factor: float = 1.5
    oscillation_gap: float = 1e-3
    schedule: RefinementSchedule = field(default_factory=RefinementSchedule)

    def __post_init__(self):
        if not self.tolerance_abs > 0 or not self.tolerance_rel >= 0:
            raise ArgumentError("tolerances must be positive")
        if self.window < 2:
            raise ArgumentError("stability window must be >= 2")
        if not self.growth_factor > 1:
            raise ArgumentError("growth factor must exceed 1")
        if not self.oscillation_gap > 0:
            raise ArgumentError("oscillation gap must be positive")

    def tolerance_at(self, scale: float) -> float:
        return self.tolerance_abs + self.tolerance_rel * abs(scale)


def _abs_value(x) -> float:
    return abs(float(x))


class _Classifier:
    """Incremental status tracking over one run's levels."""

    def __init__(self, ctrl: ConvergenceController, names: Sequence[str], *,
                 first_level_accept: bool = False):
        self.ctrl = ctrl
        self.names = list(names)
        self.first_level_accept = first_level_accept
        self.rows: list[TraceRow] = []
        self.history: dict[str, list] = {name: [] for name in self.names}
        self.stable_run = 0
        self.osc_run = 0
        self.growth_runs = {name: 0 for name in self.names}
        self.decided: Optional[Status] = None

    def observe(self, level: int, n: int, sums: dict) -> Optional[Status]:
        ctrl = self.ctrl
        values = [sums[name] for name in self.names]
        mn = min(values)
        mx = max(values)
        self.rows.append(TraceRow(level, n, mn, mx))
        scale = max(_abs_value(v) for v in values)
        tol = ctrl.tolerance_at(scale)
        spread = mx - mn
        spread_small = spread <= tol

        first = not self.history[self.names[0]]
        deltas_small = None
        if not first:
            deltas_small = True
            for name in self.names:
                prev = self.history[name][-1]
                if not abs(sums[name] - prev) <= tol:
                    deltas_small = False
                    break
        for name in self.names:
            self.history[name].append(sums[name])

        if first:
            if self.first_level_accept and len(self.names) >= 2 and spread_small:
                # Exact cross-family agreement on the coarsest grids is the
                # telescoping signature: the sums do not depend on the
                # division at all.
                self.decided = Status.CONVERGED
                return self.decided
            return None

        # stability
        if spread_small and deltas_small:
            self.stable_run += 1
        else:
            self.stable_run = 0
        # geometric growth
        for name in self.names:
            cur = _abs_value(self.history[name][-1])
            prev = _abs_value(self.history[name][-2])
            if cur >= ctrl.growth_factor * prev and cur > ctrl.tolerance_abs and prev > 0:
                self.growth_runs[name] += 1
            else:
                self.growth_runs[name] = 0
        # per-strategy stable but mutually apart
        if deltas_small and spread >= ctrl.oscillation_gap:
            self.osc_run += 1
        else:
            self.osc_run = 0

        if self.stable_run >= ctrl.window:
            self.decided = Status.CONVERGED
            return self.decided
        if any(run >= ctrl.window for run in self.growth_runs.values()):
            self.decided = Status.DIVERGED
            return self.decided
        # Oscillation is a negative claim; never exit early for it, more
        # levels only strengthen the evidence.
        return None

    def result(self) -> IntegralResult:
        status = self.decided
        if status is None:
            if self.osc_run >= self.ctrl.window:
                status = Status.OSCILLATING
            else:
                status = Status.INCONCLUSIVE
        last = self.rows[-1]
        estimate = None
        error_bound = None
        if status in (Status.CONVERGED, Status.INCONCLUSIVE):
            estimate = last.midpoint
            error_bound = _abs_value(last.spread)
        return IntegralResult(
            status=status,
            estimate=estimate,
            trace=tuple(self.rows),
            error_bound=error_bound,
            strategy_sums={name: tuple(vals) for name, vals in self.history.items()},
        )


# --------------------------------------------------------------------------
# Extrema oracles and distribution functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremaOracle:
    """Supplies true (inf, sup) of a function over any cell.

    Darboux sums are only as honest as this oracle, which is why it must be
    derived from structure (monotonicity, breakpoints), never from sampling.
    """

    bounds: Callable[[Interval], Tuple[float, float]]

    def __call__(self, cell: Interval) -> Tuple[float, float]:
        lo, hi = self.bounds(cell)
        if not lo <= hi:
            raise ArgumentError(f"oracle returned inf > sup on {cell}")
        return lo, hi

    @classmethod
    def monotone(cls, f: Callable) -> "ExtremaOracle":
        """Oracle for a function monotone on the whole domain of use."""

        def bounds(cell: Interval):
            fu, fv = f(cell.u), f(cell.v)
            return (fu, fv) if fu <= fv else (fv, fu)

        return cls(bounds)

    @classmethod
    def piecewise_monotone(cls, f: Callable, breakpoints: Sequence) -> "ExtremaOracle":
        """Oracle for a function monotone between the given breakpoints.

        Valid for continuous pieces and for jump functions whose one-sided
        limits are attained at the breakpoints themselves.
        """
        pts = tuple(sorted(breakpoints))

        def bounds(cell: Interval):
            candidates = [f(cell.u), f(cell.v)]
            for p in pts:
                if cell.u < p < cell.v:
                    candidates.append(f(p))
            return min(candidates), max(candidates)

        return cls(bounds)


@dataclass(frozen=True)
class DistributionFunction:
    """Monotone integrator g on [c, d], optionally with declared jumps.

    Only increments of g matter, so g is normalized to g(c) = 0; a point
    mass sitting exactly at c is folded into the first increment, which the
    half-open cells would otherwise never see.
    """

    name: str
    c: float
    d: float
    evaluate: Callable[[float], float]
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    jumps: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if not self.c < self.d:
            raise ArgumentError(f"domain needs c < d, got [{self.c}, {self.d}]")
        for pos, mass in self.jumps:
            if not (self.c <= pos <= self.d):
                raise ArgumentError(f"jump at {pos} outside [{self.c}, {self.d}]")
            if not mass > 0:
                raise ArgumentError(f"jump mass at {pos} must be positive")

    def spot_check_monotone(self, samples: int = 129):
        grid = np.linspace(self.c, self.d, samples)
        vals = np.array([float(self.evaluate(u)) for u in grid])
        if not np.all(np.isfinite(vals)):
            raise MonotonicityError(f"{self.name} is not finite on [{self.c}, {self.d}]")
        drops = np.diff(vals) < -1e-12 * max(1.0, float(np.max(np.abs(vals))))
        if np.any(drops):
            i = int(np.argmax(drops))
            raise MonotonicityError(
                f"{self.name} decreases between u={grid[i]} and u={grid[i+1]}"
            )

    def increments(self) -> IntervalFactor:
        return increments_of(
            self.evaluate, batch=self.batch, name=f"d({self.name})"
        )


def identity_distribution(c: float = 0.0, d: float = 1.0) -> DistributionFunction:
    return DistributionFunction(
        name="identity", c=c, d=d, evaluate=lambda u: u, batch=lambda u: u
    )


def square_distribution(c: float = 0.0, d: float = 1.0) -> DistributionFunction:
    if c < 0:
        raise ArgumentError("square distribution needs c >= 0 to stay monotone")
    return DistributionFunction(
        name="square", c=c, d=d, evaluate=lambda u: u * u, batch=lambda u: u * u
    )


def step_distribution(
    masses: Sequence[Tuple[float, float]], c: float, d: float, name: str = "step"
) -> DistributionFunction:
    """Pure point-mass distribution function on [c, d].

    g(u) accumulates every mass at positions <= u, with g(c) = 0 so that a
    mass at c itself lands in the first cell's increment.
    """
    masses = tuple(sorted((float(p), float(m)) for p, m in masses))
    positions = np.array([p for p, _ in masses])
    cumulative = np.cumsum([m for _, m in masses])

    def evaluate(u: float) -> float:
        if u <= c:
            return 0.0
        k = int(np.searchsorted(positions, u, side="right"))
        return float(cumulative[k - 1]) if k else 0.0

    def batch(us: np.ndarray) -> np.ndarray:
        ks = np.searchsorted(positions, us, side="right")
        padded = np.concatenate(([0.0], cumulative))
        out = padded[ks]
        return np.where(us <= c, 0.0, out)

    return DistributionFunction(
        name=name, c=c, d=d, evaluate=evaluate, batch=batch, jumps=masses
    )


# --------------------------------------------------------------------------
# Gauges for special occasions
# --------------------------------------------------------------------------


def jump_anchoring_gauge(jumps: Sequence[float], ceiling: float) -> Gauge:
    """Gauge that forces every declared jump to appear as a tag.

    Away from the jumps the width is the distance to the nearest jump (so no
    cell straddles one untagged); at a jump it is the ceiling, so cells
    tagged there can close over it.
    """
    pts = np.array(sorted(float(p) for p in jumps))
    if len(pts) == 0:
        raise ArgumentError("anchoring gauge needs at least one jump point")
    if not ceiling > 0:
        raise ArgumentError("ceiling must be positive")

    def fn(s: float) -> float:
        dist = float(np.min(np.abs(pts - s)))
        return ceiling if dist == 0.0 else min(dist, ceiling)

    def batch(ss: np.ndarray) -> np.ndarray:
        dist = np.min(np.abs(ss[:, None] - pts[None, :]), axis=1)
        return np.where(dist == 0.0, ceiling, np.minimum(dist, ceiling))

    return Gauge.from_function(fn, batch=batch, name=f"anchor({len(pts)} jumps)")


def singularity_gauge(ceiling: float, at_origin: float, origin: float = 0.0) -> Gauge:
    """Gauge delta(s) = min((s - origin)/2, ceiling) with a positive floor at
    the origin itself; forces the origin to tag its own shrinking first cell."""
    if not ceiling > 0 or not at_origin > 0:
        raise ArgumentError("gauge widths must be positive")

    def fn(s: float) -> float:
        if s <= origin:
            return at_origin
        return min((s - origin) / 2.0, ceiling)

    def batch(ss: np.ndarray) -> np.ndarray:
        return np.where(ss <= origin, at_origin, np.minimum((ss - origin) / 2.0, ceiling))

    return Gauge.from_function(fn, batch=batch, name="singularity")


# --------------------------------------------------------------------------
# Integrators
# --------------------------------------------------------------------------


def rs_integrate(
    h: BurkillIntegrand,
    a,
    b,
    ctrl: Optional[ConvergenceController] = None,
    strategies: Sequence[GridStrategy] = RS_STRATEGIES,
) -> IntegralResult:
    """Constant-mesh (Riemann-Stieltjes style) probe of lim sums of h.

    Each level builds one division per grid strategy with the same cell
    count and compares the sums.  Exact agreement across distinct grid
    families at the very first level is accepted immediately: constant point
    factors against additive interval factors telescope, so their sums never
    depended on the division to begin with.
    """
    ctrl = ctrl or ConvergenceController()
    if len(strategies) < 2:
        raise ArgumentError("constant-mesh probing needs at least two strategies")
    families = {s.family for s in strategies}
    classifier = _Classifier(
        ctrl, [s.name for s in strategies], first_level_accept=len(families) >= 2
    )
    for level in ctrl.schedule.levels():
        n = ctrl.schedule.cells_for(level)
        sums = {s.name: riemann_sum(h, s.build(a, b, n)) for s in strategies}
        if classifier.observe(level, n, sums) is not None:
            break
    return classifier.result()


def gauge_integrate(
    h: BurkillIntegrand,
    a,
    b,
    ctrl: Optional[ConvergenceController] = None,
    *,
    gauges: Optional[Callable[[int], Gauge]] = None,
    strategies: Sequence[TagSelectorStrategy] = GAUGE_STRATEGIES,
    depth_cap: int = 60,
) -> IntegralResult:
    """Gauge-fine probe: sums over delta_k-fine divisions, delta_k shrinking.

    By default delta_k is the constant (b - a) * 2**-level; a callable
    level -> Gauge can inject anything else (singularity-shrinking gauges,
    jump-anchoring gauges, ...).  Strategies are tag-selector orders handed
    to the bisection builder.
    """
    ctrl = ctrl or ConvergenceController()
    if not strategies:
        raise ArgumentError("need at least one tag-selector strategy")
    span = float(b) - float(a)

    def default_gauges(level: int) -> Gauge:
        return Gauge.constant(span * 2.0 ** (-level))

    gauge_for = gauges or default_gauges
    classifier = _Classifier(ctrl, [s.name for s in strategies])
    for level in ctrl.schedule.levels():
        gauge = gauge_for(level)
        sums = {}
        n = 0
        for strat in strategies:
            division = delta_fine_division(
                a, b, gauge, selectors=strat.selectors, depth_cap=depth_cap
            )
            n = max(n, division.n)
            sums[strat.name] = riemann_sum(h, division)
        if classifier.observe(level, n, sums) is not None:
            break
    return classifier.result()


def darboux_riemann(
    f: Callable,
    oracle: ExtremaOracle,
    a,
    b,
    ctrl: Optional[ConvergenceController] = None,
) -> IntegralResult:
    """Upper/lower (Darboux) sums over uniform partitions.

    Unlike the sampling probes this brackets the integral: convergence is
    declared exactly when U - L drops within tolerance, and the estimate
    (U + L) / 2 then carries a proven error bound of (U - L) / 2.  The
    oracle is spot-checked against sampled values of f each level; a value
    escaping [inf, sup] raises OracleInconsistencyError.
    """
    ctrl = ctrl or ConvergenceController()
    af, bf = float(a), float(b)
    rows = []
    history = {"lower": [], "upper": []}
    status = Status.INCONCLUSIVE
    estimate = None
    error_bound = None
    for level in ctrl.schedule.levels():
        n = ctrl.schedule.cells_for(level)
        division = make_uniform(af, bf, n, tag_rule="midpoint")
        upper = 0.0
        lower = 0.0
        for s, u, v in zip(division.tags, division.lefts, division.rights):
            cell = Interval(u, v)
            lo, hi = oracle(cell)
            sample = f(s)
            slack = 1e-12 * max(1.0, abs(lo), abs(hi))
            if not (lo - slack <= sample <= hi + slack):
                raise OracleInconsistencyError(s, sample, (lo, hi))
            width = v - u
            lower += lo * width
            upper += hi * width
        rows.append(TraceRow(level, n, lower, upper))
        history["lower"].append(lower)
        history["upper"].append(upper)
        gap = upper - lower
        tol = ctrl.tolerance_at(max(abs(upper), abs(lower)))
        if gap <= tol:
            status = Status.CONVERGED
            estimate = 0.5 * (upper + lower)
            error_bound = 0.5 * gap
            break
    if status is not Status.CONVERGED and rows:
        estimate = rows[-1].midpoint
        error_bound = float(rows[-1].spread)
    return IntegralResult(
        status=status,
        estimate=estimate,
        trace=tuple(rows),
        error_bound=error_bound,
        strategy_sums={k: tuple(v) for k, v in history.items()},
    )


def oscillation_probe(
    h: BurkillIntegrand,
    a,
    b,
    strategies: Sequence[GridStrategy] = RS_STRATEGIES,
    schedule: Optional[RefinementSchedule] = None,
) -> list:
    """Raw per-strategy sums per level, no classification.

    Returns rows (level, {strategy: sum}, spread) for side-by-side viewing
    of how division choice moves the sums.
    """
    if len(strategies) < 2:
        raise ArgumentError("an oscillation probe needs at least two strategies")
    schedule = schedule or RefinementSchedule()
    rows = []
    for level in schedule.levels():
        n = schedule.cells_for(level)
        sums = {s.name: riemann_sum(h, s.build(a, b, n)) for s in strategies}
        values = list(sums.values())
        rows.append((level, sums, max(values) - min(values)))
    return rows


def lebesgue_distribution_integrate(
    g: DistributionFunction,
    ctrl: Optional[ConvergenceController] = None,
) -> IntegralResult:
    """Integral of the identity against dg over [c, d], i.e. a mean of g.

    Runs the constant-mesh probe on u * dg first.  If that is inconclusive
    and g declares jumps, reruns under gauges that anchor tags at the jumps,
    where sums over anchored divisions become exact once cells separate the
    jumps.
    """
    ctrl = ctrl or ConvergenceController()
    g.spot_check_monotone()
    h = make_integrand(
        lambda u: u,
        g.increments(),
        convention="tag",
        point_batch=lambda u: u,
        name=f"u d({g.name})",
    )
    result = rs_integrate(h, g.c, g.d, ctrl)
    if result.status is Status.CONVERGED or not g.jumps:
        return result

    jump_points = [p for p, _ in g.jumps]
    interior = [p for p in jump_points if g.c < p < g.d]
    pieces = []
    edges = [g.c] + sorted(interior) + [g.d]
    for lo, hi in zip(edges[:-1], edges[1:]):
        anchors = tuple(p for p in jump_points if lo <= p <= hi)
        pieces.append((lo, hi, anchors or (lo, hi)))

    span = g.d - g.c

    classifier = _Classifier(ctrl, [s.name for s in ANCHORED_STRATEGIES])
    for level in ctrl.schedule.levels():
        ceiling = span * 2.0 ** (-level)
        sums = {}
        n = 0
        for strat in ANCHORED_STRATEGIES:
            total = 0.0
            count = 0
            for lo, hi, anchors in pieces:
                gauge = jump_anchoring_gauge(anchors, ceiling)
                division = delta_fine_division(lo, hi, gauge, selectors=strat.selectors)
                total += riemann_sum(h, division)
                count += division.n
            sums[strat.name] = total
            n = max(n, count)
        if classifier.observe(level, n, sums) is not None:
            break
    return classifier.result()
