"""Vertex-space Laplacian oracles: tree counting and effective resistance.

These work entirely in the weighted vertex Laplacian, so they share no
code path with the tree enumeration or cycle-space routes they are used
to cross-check.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from . import linalg
from .errors import DisconnectedGraph
from .graphs import AugmentedGraph, connected_components


def tree_count(g: AugmentedGraph) -> int:
    """Number of spanning forests with one tree per component.

    Computed per component as a principal minor determinant of the
    unweighted Laplacian; loops drop out of the Laplacian and never
    enter a tree.
    """
    total = 1
    for comp in connected_components(g):
        verts = sorted(comp)
        if len(verts) == 1:
            continue
        index = {v: i for i, v in enumerate(verts)}
        n = len(verts)
        lap = [[0] * n for _ in range(n)]
        for _, (u, v) in g.edges:
            if u not in index or u == v:
                continue
            i, j = index[u], index[v]
            lap[i][i] += 1
            lap[j][j] += 1
            lap[i][j] -= 1
            lap[j][i] -= 1
        minor = [row[:-1] for row in lap[:-1]]
        total *= linalg.integer_determinant(minor)
    return total


def effective_resistance(
    g: AugmentedGraph, lengths: Mapping[str, Fraction], edge_id: str
) -> Fraction:
    """Effective resistance across an edge's endpoints, edge included.

    Each edge conducts 1/length.  Injects a unit current at the tail and
    extracts it at the head, grounding one vertex, and reads off the
    potential difference.  A loop has resistance zero.  Raises
    DisconnectedGraph if the endpoints lie in different components.
    """
    u, v = g.ends(edge_id)
    if u == v:
        return Fraction(0)
    comp = next(c for c in connected_components(g) if u in c)
    if v not in comp:
        raise DisconnectedGraph(
            f"endpoints of edge {edge_id!r} lie in different components"
        )
    verts = sorted(comp)
    ground = verts[-1]
    free = [w for w in verts if w != ground]
    index = {w: i for i, w in enumerate(free)}
    n = len(free)
    lap = [[Fraction(0)] * n for _ in range(n)]
    for eid, (a, b) in g.edges:
        if a == b or a not in comp:
            continue
        c = Fraction(1) / Fraction(lengths[eid])
        if a != ground and b != ground:
            i, j = index[a], index[b]
            lap[i][i] += c
            lap[j][j] += c
            lap[i][j] -= c
            lap[j][i] -= c
        else:
            w = a if b == ground else b
            lap[index[w]][index[w]] += c
    rhs = [Fraction(0)] * n
    if u != ground:
        rhs[index[u]] += 1
    if v != ground:
        rhs[index[v]] -= 1
    potential = linalg.solve(lap, rhs)
    pu = potential[index[u]] if u != ground else Fraction(0)
    pv = potential[index[v]] if v != ground else Fraction(0)
    return pu - pv
