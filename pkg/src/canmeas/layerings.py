"""Ordered partitions of an edge set and the graded minors they induce.

An ordered partition splits the edges into consecutive layers.  Layer j
determines a graded minor: keep the edges of layer j and later, then
contract everything strictly later than j.  The graph genus distributes
over the graded minors, spanning trees factor layer by layer, and the
cycle space admits bases adapted to the layers; this module materializes
all three constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping

from .errors import LayeringError
from .graphs import (
    AugmentedGraph,
    CycleVector,
    SpanningTree,
    canonical_spanning_forest,
    connected_components,
    contract_set_with_map,
    delete,
    fundamental_cycles,
    graph_genus,
    spanning_trees,
)


@dataclass(frozen=True)
class OrderedPartition:
    """A tuple of pairwise disjoint, nonempty edge id sets.

    The empty partition (no parts) is allowed and is the unique
    partition of the empty edge set.
    """

    parts: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        parts = tuple(frozenset(p) for p in self.parts)
        seen: set[str] = set()
        for p in parts:
            if not p:
                raise LayeringError("ordered partitions may not contain empty parts")
            if p & seen:
                raise LayeringError("ordered partition parts must be disjoint")
            seen |= p
        object.__setattr__(self, "parts", parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.parts)

    @cached_property
    def edge_ids(self) -> frozenset[str]:
        out: set[str] = set()
        for p in self.parts:
            out |= p
        return frozenset(out)

    def layer_of(self, edge_id: str) -> int:
        """0-based index of the part containing an edge."""
        for j, p in enumerate(self.parts):
            if edge_id in p:
                return j
        raise LayeringError(f"edge {edge_id!r} is not covered by the partition")

    @classmethod
    def trivial(cls, edge_ids) -> "OrderedPartition":
        ids = frozenset(edge_ids)
        return cls(parts=(ids,) if ids else ())


def to_filtration(p: OrderedPartition) -> tuple[frozenset[str], ...]:
    """Increasing unions of initial segments of the parts."""
    out: list[frozenset[str]] = []
    acc: frozenset[str] = frozenset()
    for part in p.parts:
        acc = acc | part
        out.append(acc)
    return tuple(out)


def refines(p: OrderedPartition, q: OrderedPartition) -> bool:
    """True if p refines q, i.e. q's filtration is a subset of p's.

    Both partitions must cover the same edge set.  Every partition
    refines itself, and the empty partition is refined by nothing but
    itself (it covers no edges).
    """
    if p.edge_ids != q.edge_ids:
        raise LayeringError("refinement compares partitions of the same edge set")
    return set(to_filtration(q)) <= set(to_filtration(p))


def _validate_covering(g: AugmentedGraph, p: OrderedPartition) -> None:
    have = p.edge_ids
    want = frozenset(g.edge_ids)
    if have != want:
        missing = sorted(want - have)
        extra = sorted(have - want)
        if missing:
            raise LayeringError(f"partition does not cover edges {missing}")
        raise LayeringError(f"partition mentions unknown edges {extra}")


@dataclass(frozen=True)
class GradedMinorReport:
    """The graded minors of a layered graph, with projection data.

    ``minors[j]`` has edge set equal to layer j.  ``vertex_maps[j]``
    sends each original vertex to its image in minor j, i.e. to its
    connected component in the subgraph of strictly later edges.
    """

    layering: OrderedPartition
    minors: tuple[AugmentedGraph, ...]
    genus_vector: tuple[int, ...]
    vertex_maps: tuple[Mapping[str, str], ...]


def graded_minors(g: AugmentedGraph, p: OrderedPartition) -> GradedMinorReport:
    """Build every graded minor of g along p.

    Layer j keeps the spanning subgraph on layers j..r and contracts
    the edges of layers j+1..r.  Contraction folds vertex genera, so
    each minor is again a valid augmented graph.
    """
    _validate_covering(g, p)
    minors: list[AugmentedGraph] = []
    maps: list[Mapping[str, str]] = []
    r = len(p.parts)
    for j in range(r):
        later: set[str] = set()
        for part in p.parts[j + 1 :]:
            later |= part
        keep = p.parts[j] | later
        stage = delete(g, [eid for eid in g.edge_ids if eid not in keep])
        minor, vmap = contract_set_with_map(stage, later)
        minors.append(minor)
        maps.append(vmap)
    return GradedMinorReport(
        layering=p,
        minors=tuple(minors),
        genus_vector=tuple(graph_genus(m) for m in minors),
        vertex_maps=tuple(maps),
    )


def genus_decomposition(g: AugmentedGraph, p: OrderedPartition) -> tuple[int, ...]:
    """Graph genus of each graded minor.  These sum to the genus of g."""
    return graded_minors(g, p).genus_vector


def layered_spanning_trees(g: AugmentedGraph, p: OrderedPartition) -> list[SpanningTree]:
    """Spanning trees assembled layer by layer.

    Takes one spanning forest of each graded minor and returns every
    union.  Each union is a spanning forest of g, and the count is the
    product of the per-minor counts.  Output is in the canonical sorted
    order used by :func:`canmeas.graphs.spanning_trees`.
    """
    report = graded_minors(g, p)
    combos: list[frozenset[str]] = [frozenset()]
    for minor in report.minors:
        layer_trees = spanning_trees(minor)
        combos = [c | t.edge_ids for c in combos for t in layer_trees]
    combos.sort(key=lambda t: tuple(sorted(t)))
    return [SpanningTree(t) for t in combos]


@dataclass(frozen=True)
class AdmissibleBasis:
    """A cycle basis grouped into one block per layer.

    Block j has one cycle per independent cycle of graded minor j; each
    of its cycles is supported on layers j..r, and restricting block j
    to layer j recovers a cycle basis of minor j.
    """

    layering: OrderedPartition
    blocks: tuple[tuple[CycleVector, ...], ...]

    @property
    def flat(self) -> tuple[CycleVector, ...]:
        return tuple(c for block in self.blocks for c in block)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(block) for block in self.blocks)


def restrict_cycle(cycle: CycleVector, edge_ids: frozenset[str]) -> CycleVector:
    """Keep only the coefficients on the given edges."""
    return CycleVector({e: c for e, c in cycle.coeffs.items() if e in edge_ids})


def admissible_cycle_basis(g: AugmentedGraph, p: OrderedPartition) -> AdmissibleBasis:
    """Lift the canonical bases of the graded minors to a basis for g.

    A cycle of minor j, read as a chain in g on layer-j edges, need not
    close up: its boundary sits inside the contraction fibers, which are
    the components of the subgraph of strictly later edges.  Routing the
    boundary through a spanning forest of those fibers kills it without
    leaving layers j+1..r, so the lift stays supported on layers j..r
    and still restricts to the original cycle on layer j.
    """
    _validate_covering(g, p)
    report = graded_minors(g, p)
    blocks: list[tuple[CycleVector, ...]] = []
    for j, minor in enumerate(report.minors):
        later: set[str] = set()
        for part in p.parts[j + 1 :]:
            later |= part
        later_graph = delete(g, [eid for eid in g.edge_ids if eid not in later])
        forest = canonical_spanning_forest(later_graph)
        children: dict[str, list[tuple[str, str]]] = {v: [] for v in g.vertices}
        for eid in forest:
            u, v = g.ends(eid)
            children[u].append((eid, v))
            children[v].append((eid, u))

        lifted: list[CycleVector] = []
        for gamma in fundamental_cycles(minor):
            coeffs = dict(gamma.coeffs)
            residual = {v: 0 for v in g.vertices}
            for eid, c in gamma.coeffs.items():
                u, v = g.ends(eid)
                residual[v] += c
                residual[u] -= c
            for fiber in connected_components(later_graph):
                root = min(fiber)
                order: list[str] = [root]
                parent_edge: dict[str, tuple[str, str]] = {}
                seen = {root}
                i = 0
                while i < len(order):
                    w = order[i]
                    i += 1
                    for eid, x in children[w]:
                        if x in fiber and x not in seen:
                            seen.add(x)
                            parent_edge[x] = (eid, w)
                            order.append(x)
                for w in reversed(order[1:]):
                    s = residual[w]
                    if s == 0:
                        continue
                    eid, par = parent_edge[w]
                    tail, _ = g.ends(eid)
                    coeffs[eid] = coeffs.get(eid, 0) + (s if tail == w else -s)
                    residual[par] += s
                    residual[w] = 0
                if residual[root] != 0:
                    raise LayeringError(
                        "graded minor cycle does not lift; partition is inconsistent"
                    )
            lifted.append(CycleVector(coeffs))
        blocks.append(tuple(lifted))
    return AdmissibleBasis(layering=p, blocks=tuple(blocks))
