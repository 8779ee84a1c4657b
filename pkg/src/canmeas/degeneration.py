"""Degenerating families of metric graphs and their measure limits.

A length family assigns every edge a positive monomial sum in t.  As
t -> 0+ the normalized length vector should approach a point of the
stratum named by the target layering: within each layer the normalized
ratios converge to the target coordinates, and each later layer shrinks
to nothing against each earlier one.  When that holds, the canonical
measures of the fibers converge edgewise to the tropical canonical
measure of the target curve, tree weights converge after rescaling by
per-layer totals, and integrals of fixed test functions converge.  All
limits here are computed symbolically from dominant exponents; grid
evaluations are exact rational arithmetic, with floats confined to
report rendering elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import FamilyError, InvalidGraph
from .families import ScaleFunction, product, ratio_limit
from .graphs import AugmentedGraph, SpanningTree, connected_components, spanning_trees
from .layerings import OrderedPartition, genus_decomposition, graded_minors
from .measures import (
    EdgeMeasure,
    MetricGraph,
    PiecewiseLinear,
    TropicalCurve,
    foster_by_trees,
    integrate,
    tropical_canonical_measure,
)

WITHIN_LAYER = "within_layer"
CROSS_LAYER = "cross_layer"


@dataclass(frozen=True)
class LengthFamily:
    """Edge lengths depending on a parameter t, with a declared limit.

    ``param_lengths`` maps each edge to a positive monomial sum; edges
    may also grow as t -> 0 (negative exponents), since every limit
    taken here depends only on length ratios.  ``target_point`` gives
    normalized limit coordinates: positive on every edge and summing to
    one within each layer of ``target_layering``.  Whether the family
    actually converges to that point is a separate question answered by
    :func:`check_convergence`.
    """

    graph: AugmentedGraph
    param_lengths: Mapping[str, ScaleFunction]
    target_layering: OrderedPartition
    target_point: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        edge_ids = frozenset(self.graph.edge_ids)
        lengths = dict(self.param_lengths)
        if set(lengths) != edge_ids:
            raise FamilyError("length family must cover exactly the edges of the graph")
        for eid, fn in lengths.items():
            if not isinstance(fn, ScaleFunction) or not fn:
                raise FamilyError(f"edge {eid!r} needs a nonzero scale function")
        if self.target_layering.edge_ids != edge_ids:
            raise FamilyError("target layering must cover exactly the edges of the graph")
        target = {e: Fraction(x) for e, x in self.target_point.items()}
        if set(target) != edge_ids:
            raise FamilyError("target point must give a coordinate for every edge")
        for eid, x in target.items():
            if x <= 0:
                raise FamilyError(
                    f"target coordinate of edge {eid!r} must be positive (interior point)"
                )
        for j, part in enumerate(self.target_layering.parts):
            s = sum((target[e] for e in part), Fraction(0))
            if s != 1:
                raise FamilyError(f"target coordinates of layer {j} sum to {s}, expected 1")
        object.__setattr__(self, "param_lengths", lengths)
        object.__setattr__(self, "target_point", target)

    def lengths_at(self, t: Fraction) -> dict[str, Fraction]:
        return {e: fn.evaluate(t) for e, fn in self.param_lengths.items()}

    def metric_at(self, t: Fraction) -> MetricGraph:
        return MetricGraph(self.graph, self.lengths_at(t))

    def layer_total(self, j: int) -> ScaleFunction:
        """Sum of the scale functions over layer j."""
        total = None
        for e in sorted(self.target_layering.parts[j]):
            fn = self.param_lengths[e]
            total = fn if total is None else total + fn
        assert total is not None
        return total

    def target_curve(self) -> TropicalCurve:
        return TropicalCurve(
            graph=self.graph,
            lengths=dict(self.target_point),
            layering=self.target_layering,
        )


@dataclass(frozen=True)
class ConvergenceFailure:
    """One violated convergence condition, with the edges that broke it."""

    condition: str
    edges: tuple[str, ...]
    detail: str


@dataclass(frozen=True)
class ConvergenceDiagnostics:
    ok: bool
    failures: tuple[ConvergenceFailure, ...]


def check_convergence(f: LengthFamily) -> ConvergenceDiagnostics:
    """Decide symbolically whether the family reaches its target.

    Two conditions, both read off dominant exponents.  Within each
    layer, each length divided by the layer total must tend to the
    declared target coordinate.  Across layers, each length in a later
    layer divided by each length in an earlier layer must tend to zero.
    Every violation is reported, tagged with which condition broke.
    """
    failures: list[ConvergenceFailure] = []
    parts = f.target_layering.parts
    for j, part in enumerate(parts):
        total = f.layer_total(j)
        d = total.dominant_exponent
        lead = total.leading_coefficient
        for e in sorted(part):
            limit = f.param_lengths[e].coefficient_at(d) / lead
            want = f.target_point[e]
            if limit != want:
                failures.append(
                    ConvergenceFailure(
                        condition=WITHIN_LAYER,
                        edges=(e,),
                        detail=(
                            f"normalized length of edge {e!r} in layer {j} tends to "
                            f"{limit}, target says {want}"
                        ),
                    )
                )
    for j, early in enumerate(parts):
        for jj in range(j + 1, len(parts)):
            for e in sorted(early):
                de = f.param_lengths[e].dominant_exponent
                for e2 in sorted(parts[jj]):
                    if f.param_lengths[e2].dominant_exponent <= de:
                        failures.append(
                            ConvergenceFailure(
                                condition=CROSS_LAYER,
                                edges=(e, e2),
                                detail=(
                                    f"length of edge {e2!r} (layer {jj}) does not vanish "
                                    f"against edge {e!r} (layer {j})"
                                ),
                            )
                        )
    return ConvergenceDiagnostics(ok=not failures, failures=tuple(failures))


def _require_convergent(f: LengthFamily) -> None:
    diag = check_convergence(f)
    if not diag.ok:
        first = diag.failures[0]
        raise FamilyError(
            f"family does not converge to its target ({first.condition}): {first.detail}"
        )


def _is_spanning_forest(g: AugmentedGraph, edge_ids: frozenset[str]) -> bool:
    parent: dict[str, str] = {v: v for v in g.vertices}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid in edge_ids:
        u, v = g.ends(eid)
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return len(edge_ids) == len(g.vertices) - len(connected_components(g))


def _validate_tree(g: AugmentedGraph, tree: SpanningTree) -> None:
    if not _is_spanning_forest(g, tree.edge_ids):
        raise InvalidGraph("edge set is not a spanning forest of the graph")


def omega_infinity(f: LengthFamily, tree: SpanningTree) -> Fraction:
    """Limit of the rescaled tree weight of one spanning tree.

    The raw weight (product of lengths over edges off the tree) is
    divided by each layer total raised to the layer's graded genus.  The
    limit is zero unless the tree restricts to a spanning forest of
    every graded minor, in which case it is the product of the minors'
    tree weights at the target coordinates.  Returned exactly.
    """
    _require_convergent(f)
    _validate_tree(f.graph, tree)
    numerator = product(
        f.param_lengths[e] for e in f.graph.edge_ids if e not in tree
    )
    genus_vector = genus_decomposition(f.graph, f.target_layering)
    denominator = product(
        f.layer_total(j) ** h for j, h in enumerate(genus_vector) if h > 0
    )
    return ratio_limit(numerator, denominator)


@dataclass(frozen=True)
class ConvergenceReport:
    """Edgewise measure trajectories along a decreasing grid.

    ``trajectories[e][i]`` is the canonical edge mass of e in the fiber
    at ``grid[i]``; ``targets[e]`` is the tropical edge mass it should
    approach.  All entries are exact rationals.
    """

    grid: tuple[Fraction, ...]
    targets: Mapping[str, Fraction]
    trajectories: Mapping[str, tuple[Fraction, ...]]
    max_deviations: tuple[Fraction, ...]
    edge_masses: tuple[Fraction, ...]
    monotone: bool

    @property
    def final_deviation(self) -> Fraction:
        return self.max_deviations[-1]


def _validate_grid(grid: Sequence[Fraction]) -> tuple[Fraction, ...]:
    pts = tuple(Fraction(t) for t in grid)
    if not pts:
        raise FamilyError("empty grid")
    if any(t <= 0 for t in pts):
        raise FamilyError("grid points must be positive")
    if any(b >= a for a, b in zip(pts, pts[1:])):
        raise FamilyError("grid must be strictly decreasing")
    return pts


def limit_foster(f: LengthFamily, grid: Sequence[Fraction]) -> ConvergenceReport:
    """Exact canonical measures along the grid against the tropical limit."""
    _require_convergent(f)
    pts = _validate_grid(grid)
    target = tropical_canonical_measure(f.target_curve())
    trajectories: dict[str, list[Fraction]] = {e: [] for e in f.graph.edge_ids}
    max_devs: list[Fraction] = []
    masses: list[Fraction] = []
    for t in pts:
        mu = foster_by_trees(f.metric_at(t))
        worst = Fraction(0)
        for e in f.graph.edge_ids:
            val = mu.edge_coeffs[e]
            trajectories[e].append(val)
            dev = abs(val - target.edge_coeffs[e])
            if dev > worst:
                worst = dev
        max_devs.append(worst)
        masses.append(mu.edge_mass)
    monotone = all(b <= a for a, b in zip(max_devs, max_devs[1:]))
    return ConvergenceReport(
        grid=pts,
        targets=dict(target.edge_coeffs),
        trajectories={e: tuple(v) for e, v in trajectories.items()},
        max_deviations=tuple(max_devs),
        edge_masses=tuple(masses),
        monotone=monotone,
    )


@dataclass(frozen=True)
class NormalizedTestFunction:
    """A piecewise linear function written in normalized edge coordinates.

    Breakpoint positions live in (0, 1) and are rescaled by each fiber's
    edge lengths, so one function makes sense on every fiber of a family
    and on the limit curve; that shared parametrization is what lets the
    same function be integrated across the whole degeneration.
    """

    vertex_values: Mapping[str, Fraction]
    normalized_breaks: Mapping[str, tuple[tuple[Fraction, Fraction], ...]] = field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        values = {v: Fraction(x) for v, x in self.vertex_values.items()}
        breaks = {}
        for e, pts in self.normalized_breaks.items():
            fixed = tuple((Fraction(u), Fraction(y)) for u, y in pts)
            for u, _ in fixed:
                if u <= 0 or u >= 1:
                    raise FamilyError(
                        f"normalized breakpoint {u} on edge {e!r} is outside (0, 1)"
                    )
            breaks[e] = fixed
        object.__setattr__(self, "vertex_values", values)
        object.__setattr__(self, "normalized_breaks", breaks)

    def on_metric(self, m: MetricGraph) -> PiecewiseLinear:
        return PiecewiseLinear(
            vertex_values=dict(self.vertex_values),
            breakpoints={
                e: tuple((u * m.length(e), y) for u, y in pts)
                for e, pts in self.normalized_breaks.items()
            },
        )


@dataclass(frozen=True)
class ProbeReport:
    """Integrals of one test function along the family, with their limit."""

    grid: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    limit: Fraction
    deviations: tuple[Fraction, ...]

    @property
    def final_deviation(self) -> Fraction:
        return self.deviations[-1]


def continuity_probe(
    f: LengthFamily, fn: NormalizedTestFunction, grid: Sequence[Fraction]
) -> ProbeReport:
    """Integrate one test function against every fiber and the limit.

    The limit integral is taken against the tropical canonical measure
    of the target curve; fibers use their own canonical measures.  All
    numbers are exact.
    """
    _require_convergent(f)
    pts = _validate_grid(grid)
    target_curve = f.target_curve()
    limit_value = integrate(
        tropical_canonical_measure(target_curve), fn.on_metric(target_curve.metric)
    )
    values: list[Fraction] = []
    for t in pts:
        m = f.metric_at(t)
        values.append(integrate(foster_by_trees(m), fn.on_metric(m)))
    deviations = tuple(abs(v - limit_value) for v in values)
    return ProbeReport(
        grid=pts, values=tuple(values), limit=limit_value, deviations=deviations
    )


def layered_tree_weight(f: LengthFamily, tree: SpanningTree) -> Fraction:
    """Product of graded-minor tree weights at the target coordinates.

    Zero when the tree is not layered, i.e. when some layer's slice of
    the tree fails to be a spanning forest of that layer's graded minor.
    This is the closed form the limit in :func:`omega_infinity` must
    match.
    """
    _validate_tree(f.graph, tree)
    report = graded_minors(f.graph, f.target_layering)
    for j, minor in enumerate(report.minors):
        slice_j = tree.edge_ids & f.target_layering.parts[j]
        if not _is_spanning_forest(minor, slice_j):
            return Fraction(0)
    weight = Fraction(1)
    for e in f.graph.edge_ids:
        if e not in tree:
            weight *= f.target_point[e]
    return weight


def all_tree_limits(f: LengthFamily) -> dict[frozenset[str], Fraction]:
    """omega_infinity over every spanning tree of the graph."""
    return {
        tree.edge_ids: omega_infinity(f, tree) for tree in spanning_trees(f.graph)
    }
