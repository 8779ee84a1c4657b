"""Canonical measures on metric graphs and tropical curves.

The canonical measure of a metric graph spreads mass h = |E| - |V| + 1
over the edges and puts an integer atom of size genus(v) at each vertex.
The edge density is constant on each edge; the number

    mu(e) = (weight of spanning trees avoiding e) / (total tree weight),

with tree weight equal to the product of the lengths of the edges the
tree leaves out, is that density times the edge length.  Three routes to
mu are implemented: direct tree enumeration, orthogonal projection of an
edge onto the cycle space, and the inverse of the cycle Gram matrix.
They agree; keeping all three is the point, since they cross-check one
another and the Laplacian oracle in :mod:`canmeas.kirchhoff` checks them
all from outside.

For a tropical curve (a metric graph whose edges come with an ordered
layering, unit total length per layer) the edge mass on layer j is the
canonical edge mass of graded minor j.  Everything here is exact; no
floats enter at any point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .errors import (
    BasisError,
    DisconnectedGraph,
    InvalidGraph,
    LayeringError,
    InvalidTestFunction,
    UnknownEdge,
)
from .graphs import (
    AugmentedGraph,
    CycleVector,
    cycle_basis,
    cycle_boundary,
    is_connected,
    spanning_trees,
)
from .layerings import OrderedPartition, graded_minors


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class MetricGraph:
    """An augmented graph with a positive rational length on every edge."""

    graph: AugmentedGraph
    lengths: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        lengths = {e: _as_fraction(x) for e, x in self.lengths.items()}
        for eid in lengths:
            if eid not in self.graph._ends:
                raise UnknownEdge(f"length given for unknown edge {eid!r}")
        for eid in self.graph.edge_ids:
            if eid not in lengths:
                raise InvalidGraph(f"edge {eid!r} has no length")
            if lengths[eid] <= 0:
                raise InvalidGraph(f"edge {eid!r} has nonpositive length")
        object.__setattr__(self, "lengths", lengths)

    def length(self, edge_id: str) -> Fraction:
        try:
            return self.lengths[edge_id]
        except KeyError:
            raise UnknownEdge(f"unknown edge {edge_id!r}") from None

    def scaled(self, factor: Fraction) -> "MetricGraph":
        f = _as_fraction(factor)
        if f <= 0:
            raise InvalidGraph("scale factor must be positive")
        return MetricGraph(self.graph, {e: x * f for e, x in self.lengths.items()})


@dataclass(frozen=True)
class TropicalCurve:
    """A layered metric graph, normalized to unit length per layer."""

    graph: AugmentedGraph
    lengths: Mapping[str, Fraction]
    layering: OrderedPartition

    def __post_init__(self) -> None:
        metric = MetricGraph(self.graph, self.lengths)
        object.__setattr__(self, "lengths", metric.lengths)
        if self.layering.edge_ids != frozenset(self.graph.edge_ids):
            raise LayeringError("layering must cover exactly the edges of the graph")
        for j, part in enumerate(self.layering.parts):
            total = sum((metric.lengths[e] for e in part), Fraction(0))
            if total != 1:
                raise LayeringError(
                    f"layer {j} has total length {total}, expected 1"
                )

    @property
    def metric(self) -> MetricGraph:
        return MetricGraph(self.graph, self.lengths)


@dataclass(frozen=True)
class EdgeMeasure:
    """A measure with a rational mass per edge and integer vertex atoms."""

    metric: MetricGraph
    edge_coeffs: Mapping[str, Fraction]
    vertex_atoms: Mapping[str, int]

    def __post_init__(self) -> None:
        coeffs = {e: _as_fraction(x) for e, x in self.edge_coeffs.items()}
        if set(coeffs) != set(self.metric.graph.edge_ids):
            raise InvalidGraph("edge coefficients must cover exactly the edges")
        for e, x in coeffs.items():
            if x < 0 or x > 1:
                raise InvalidGraph(f"edge mass {x} on {e!r} is outside [0, 1]")
        atoms = dict(self.vertex_atoms)
        if set(atoms) != set(self.metric.graph.vertices):
            raise InvalidGraph("vertex atoms must cover exactly the vertices")
        for v, a in atoms.items():
            if a < 0:
                raise InvalidGraph(f"negative atom at vertex {v!r}")
        object.__setattr__(self, "edge_coeffs", coeffs)
        object.__setattr__(self, "vertex_atoms", atoms)

    @property
    def edge_mass(self) -> Fraction:
        return sum(self.edge_coeffs.values(), Fraction(0))

    @property
    def total_mass(self) -> Fraction:
        return self.edge_mass + sum(self.vertex_atoms.values())


@dataclass(frozen=True)
class GramMatrix:
    """The length-weighted Gram matrix of a cycle basis.

    ``matrix[i][j]`` is the inner product of basis cycles i and j, where
    edges are orthogonal and edge e has squared norm length(e).  The per
    edge pieces (integer rank-one matrices) are kept so callers can
    reassemble the matrix under other length assignments.
    """

    basis: tuple[CycleVector, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    edge_matrices: Mapping[str, tuple[tuple[int, ...], ...]]


def _forest_edge_masses(
    graph: AugmentedGraph, lengths: Mapping[str, Fraction]
) -> dict[str, Fraction]:
    # Works per connected component through spanning forests, so callers
    # may pass disconnected graphs (graded minors often are).
    trees = spanning_trees(graph)
    total = Fraction(0)
    inside: dict[str, Fraction] = {e: Fraction(0) for e in graph.edge_ids}
    for tree in trees:
        weight = Fraction(1)
        for eid in graph.edge_ids:
            if eid not in tree:
                weight *= lengths[eid]
        total += weight
        for eid in tree.edge_ids:
            inside[eid] += weight
    return {e: 1 - inside[e] / total for e in graph.edge_ids}


def foster_by_trees(m: MetricGraph) -> EdgeMeasure:
    """Canonical measure by direct spanning tree enumeration."""
    if not is_connected(m.graph):
        raise DisconnectedGraph("canonical measure requires a connected graph")
    coeffs = _forest_edge_masses(m.graph, m.lengths)
    return EdgeMeasure(metric=m, edge_coeffs=coeffs, vertex_atoms=dict(m.graph.genus))


def gram_matrices(m: MetricGraph, basis: Sequence[CycleVector] | None = None) -> GramMatrix:
    """Gram data of a cycle basis under the length inner product.

    Uses the canonical fundamental cycle basis when none is given.  The
    assembled matrix must be positive definite (checked exactly); a
    dependent family fails that check.
    """
    if basis is None:
        basis = cycle_basis(m.graph)
    basis = tuple(basis)
    for gamma in basis:
        for eid in gamma.support:
            if eid not in m.graph._ends:
                raise UnknownEdge(f"cycle uses unknown edge {eid!r}")
        if any(b != 0 for b in cycle_boundary(m.graph, gamma).values()):
            raise BasisError("basis element has nonzero boundary")
    h = len(basis)
    edge_matrices: dict[str, tuple[tuple[int, ...], ...]] = {}
    matrix = [[Fraction(0)] * h for _ in range(h)]
    for eid in m.graph.edge_ids:
        coeffs = [gamma[eid] for gamma in basis]
        block = tuple(tuple(ci * cj for cj in coeffs) for ci in coeffs)
        edge_matrices[eid] = block
        le = m.lengths[eid]
        for i in range(h):
            if coeffs[i] == 0:
                continue
            for j in range(h):
                if coeffs[j] != 0:
                    matrix[i][j] += le * block[i][j]
    gram = tuple(tuple(row) for row in matrix)
    if h and not linalg.is_positive_definite([list(row) for row in gram]):
        raise BasisError("cycle family is dependent; Gram matrix is not positive definite")
    return GramMatrix(basis=basis, matrix=gram, edge_matrices=edge_matrices)


def foster_by_projection(m: MetricGraph) -> EdgeMeasure:
    """Canonical measure via orthogonal projection onto the cycle space.

    The mass of edge e is the squared length of the projection of e onto
    the cycle space, divided by the length of e.  The projection is
    found by solving the normal equations exactly.
    """
    if not is_connected(m.graph):
        raise DisconnectedGraph("canonical measure requires a connected graph")
    basis = cycle_basis(m.graph)
    h = len(basis)
    coeffs: dict[str, Fraction] = {}
    if h == 0:
        coeffs = {e: Fraction(0) for e in m.graph.edge_ids}
    else:
        gram = gram_matrices(m, basis)
        rows = [list(row) for row in gram.matrix]
        for eid in m.graph.edge_ids:
            le = m.lengths[eid]
            rhs = [le * gamma[eid] for gamma in basis]
            if all(x == 0 for x in rhs):
                coeffs[eid] = Fraction(0)
                continue
            a = linalg.solve(rows, rhs)
            q = sum((ai * ri for ai, ri in zip(a, rhs)), Fraction(0))
            coeffs[eid] = q / le
    return EdgeMeasure(metric=m, edge_coeffs=coeffs, vertex_atoms=dict(m.graph.genus))


def foster_by_matrix(m: MetricGraph) -> EdgeMeasure:
    """Canonical measure from the inverse of the cycle Gram matrix.

    mu(e) = length(e) * sum_{i,j} inv(G)[i][j] * c_i(e) * c_j(e), with
    c_i(e) the coefficient of e in the i-th basis cycle.  The inverse is
    computed by fraction-free elimination; a singular matrix (dependent
    basis) raises BasisError.
    """
    if not is_connected(m.graph):
        raise DisconnectedGraph("canonical measure requires a connected graph")
    basis = cycle_basis(m.graph)
    h = len(basis)
    if h == 0:
        coeffs = {e: Fraction(0) for e in m.graph.edge_ids}
        return EdgeMeasure(metric=m, edge_coeffs=coeffs, vertex_atoms=dict(m.graph.genus))
    gram = gram_matrices(m, basis)
    inv = linalg.inverse([list(row) for row in gram.matrix])
    coeffs = {}
    for eid in m.graph.edge_ids:
        c = [gamma[eid] for gamma in basis]
        s = Fraction(0)
        for i in range(h):
            if c[i] == 0:
                continue
            for j in range(h):
                if c[j] != 0:
                    s += inv[i][j] * c[i] * c[j]
        coeffs[eid] = m.lengths[eid] * s
    return EdgeMeasure(metric=m, edge_coeffs=coeffs, vertex_atoms=dict(m.graph.genus))


def tropical_canonical_measure(t: TropicalCurve) -> EdgeMeasure:
    """Canonical measure of a tropical curve, layer by layer.

    The mass of an edge in layer j is its canonical edge mass inside
    graded minor j, with lengths restricted to that layer.  Minors may
    be disconnected; each of their components contributes independently
    through its spanning forests.  Vertex atoms are the vertex genera.
    """
    if not is_connected(t.graph):
        raise DisconnectedGraph("tropical curves must be connected")
    report = graded_minors(t.graph, t.layering)
    coeffs: dict[str, Fraction] = {}
    for minor in report.minors:
        restricted = {e: t.lengths[e] for e in minor.edge_ids}
        coeffs.update(_forest_edge_masses(minor, restricted))
    return EdgeMeasure(
        metric=t.metric, edge_coeffs=coeffs, vertex_atoms=dict(t.graph.genus)
    )


def hybrid_mass_profile(t: TropicalCurve) -> EdgeMeasure:
    """Mass profile of the limit object the tropical curve stands for.

    In the limit, each layer-j edge carries a one-dimensional piece of
    mass equal to its graded-minor edge mass, and each vertex stands for
    a component soaking up mass equal to its genus.  Those numbers are
    exactly the tropical canonical measure, so this returns it
    unchanged; total mass is the total genus.
    """
    return tropical_canonical_measure(t)


@dataclass(frozen=True)
class PiecewiseLinear:
    """A continuous piecewise linear function on a metric graph.

    Values are pinned at the vertices; each edge may add interior
    breakpoints as (position, value) pairs with positions measured from
    the edge's tail.  Between pins the function interpolates linearly.
    """

    vertex_values: Mapping[str, Fraction]
    breakpoints: Mapping[str, tuple[tuple[Fraction, Fraction], ...]] = field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        values = {v: _as_fraction(x) for v, x in self.vertex_values.items()}
        breaks = {
            e: tuple((_as_fraction(p), _as_fraction(y)) for p, y in pts)
            for e, pts in self.breakpoints.items()
        }
        object.__setattr__(self, "vertex_values", values)
        object.__setattr__(self, "breakpoints", breaks)

    def edge_profile(self, m: MetricGraph, edge_id: str) -> list[tuple[Fraction, Fraction]]:
        """Pins on one edge, endpoints included, validated against m."""
        u, v = m.graph.ends(edge_id)
        try:
            fu, fv = self.vertex_values[u], self.vertex_values[v]
        except KeyError as missing:
            raise InvalidTestFunction(f"no value at vertex {missing.args[0]!r}") from None
        le = m.length(edge_id)
        pts = [(Fraction(0), fu)]
        last = Fraction(0)
        for pos, val in self.breakpoints.get(edge_id, ()):
            if pos <= 0 or pos >= le:
                raise InvalidTestFunction(
                    f"breakpoint at {pos} on edge {edge_id!r} is outside [0, {le}]"
                )
            if pos <= last:
                raise InvalidTestFunction(
                    f"breakpoints on edge {edge_id!r} must be strictly increasing"
                )
            pts.append((pos, val))
            last = pos
        pts.append((le, fv))
        return pts


def integrate(mu: EdgeMeasure, f: PiecewiseLinear) -> Fraction:
    """Exact integral of a piecewise linear function against a measure.

    Each edge contributes its mass times the mean of f along the edge;
    each vertex atom contributes the atom times the vertex value.
    """
    m = mu.metric
    total = Fraction(0)
    for eid in m.graph.edge_ids:
        pts = f.edge_profile(m, eid)
        area = Fraction(0)
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            area += (x1 - x0) * (y0 + y1) / 2
        total += mu.edge_coeffs[eid] * area / m.length(eid)
    for v, atom in mu.vertex_atoms.items():
        if atom:
            try:
                total += atom * f.vertex_values[v]
            except KeyError:
                raise InvalidTestFunction(f"no value at vertex {v!r}") from None
    return total
