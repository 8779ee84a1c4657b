"""Model period matrices for degenerating families and their inverses.

The imaginary part of a degenerating period matrix is modeled as a fixed
symmetric base plus, for every edge, the edge's length times a padded
rank-one integer matrix built from a cycle basis.  When the basis is
admissible for a layering and the lengths scale layerwise, the model is
a graded block matrix: block (k, l) is the slower of the two layer
scales times a fixed limit block.  The inverse then has the transposed
grading, and the rescaled diagonal blocks converge to the inverses of
exactly computable layer matrices; the trailing block converges to the
inverse of the base's pad block.

This module is the package's one floating point lane.  Verification
routines sample a decreasing grid, invert in binary64, rescale, and
compare against targets that are computed exactly first and rounded
once.  A recursive Schur-complement inverter provides an independent
oracle for every direct inversion, and grid points whose condition
number estimate exceeds 1e12 are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .degeneration import LengthFamily
from .errors import BasisError, FamilyError, NotPositiveDefinite
from .families import ScaleFunction, geometric_grid
from .graphs import AugmentedGraph, CycleVector, graph_genus
from .layerings import AdmissibleBasis
from .measures import MetricGraph, gram_matrices

CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class MonodromySet:
    """Integer cycle data of a basis, edge by edge.

    ``edge_rows[e]`` lists the coefficient of edge e in each basis
    cycle.  The matrix of an edge is the outer product of its row with
    itself; padded variants append ``pad`` zero rows and columns for the
    vertex directions.
    """

    basis: tuple[CycleVector, ...]
    block_sizes: tuple[int, ...]
    pad: int
    edge_rows: Mapping[str, tuple[int, ...]]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def total_size(self) -> int:
        return self.rank + self.pad

    def edge_matrix(self, edge_id: str) -> np.ndarray:
        row = np.array(self.edge_rows[edge_id], dtype=float)
        return np.outer(row, row)

    def padded_edge_matrix(self, edge_id: str) -> np.ndarray:
        out = np.zeros((self.total_size, self.total_size))
        h = self.rank
        out[:h, :h] = self.edge_matrix(edge_id)
        return out

    def assemble_gram(self, lengths: Mapping[str, Fraction]) -> list[list[Fraction]]:
        """Exact sum of length(e) times the matrix of e, for cross-checks."""
        h = self.rank
        out = [[Fraction(0)] * h for _ in range(h)]
        for eid, row in self.edge_rows.items():
            le = Fraction(lengths[eid])
            for i in range(h):
                if row[i] == 0:
                    continue
                for j in range(h):
                    if row[j] != 0:
                        out[i][j] += le * row[i] * row[j]
        return out


def monodromy_from_basis(
    g: AugmentedGraph,
    basis: AdmissibleBasis | Sequence[CycleVector],
    pad: int | None = None,
) -> MonodromySet:
    """Extract per-edge integer matrices from a cycle basis.

    Accepts either an admissible basis (keeping its block structure) or
    a flat sequence (treated as a single block).  The basis must have
    one cycle per independent cycle of the graph and be independent;
    independence is checked exactly through the unit-length Gram matrix.
    Pad defaults to the total vertex genus.
    """
    if isinstance(basis, AdmissibleBasis):
        flat = list(basis.flat)
        block_sizes = basis.block_sizes
    else:
        flat = list(basis)
        block_sizes = (len(flat),)
    h = graph_genus(g)
    if len(flat) != h:
        raise BasisError(f"expected {h} basis cycles, got {len(flat)}")
    if h:
        unit = MetricGraph(g, {e: Fraction(1) for e in g.edge_ids})
        gram_matrices(unit, flat)
    if pad is None:
        pad = sum(g.genus.values())
    if pad < 0:
        raise FamilyError("pad must be nonnegative")
    rows = {
        eid: tuple(gamma[eid] for gamma in flat) for eid in g.edge_ids
    }
    return MonodromySet(basis=tuple(flat), block_sizes=block_sizes, pad=pad, edge_rows=rows)


def _pad_block_layout(g: AugmentedGraph, offset: int) -> list[tuple[str, int, int]]:
    # (vertex, start, stop) for each positive-genus vertex, sorted by id.
    layout = []
    pos = offset
    for v in g.vertices:
        size = g.genus[v]
        if size > 0:
            layout.append((v, pos, pos + size))
            pos += size
    return layout


@dataclass(frozen=True, eq=False)
class ModelPeriodFamily:
    """A base matrix plus length-weighted padded cycle matrices.

    The base must be symmetric, with its pad region block diagonal
    along the positive-genus vertices (in sorted vertex order) and each
    vertex block positive definite.  The top-left rank block and the
    cross terms between rank and pad regions are unconstrained.
    """

    monodromy: MonodromySet
    lengths: LengthFamily
    base_im: np.ndarray

    def __post_init__(self) -> None:
        base = np.array(self.base_im, dtype=float)
        n = self.monodromy.total_size
        if base.shape != (n, n):
            raise FamilyError(f"base matrix must be {n}x{n}, got {base.shape}")
        if not np.array_equal(base, base.T):
            raise FamilyError("base matrix must be symmetric")
        g = self.lengths.graph
        if self.monodromy.pad != sum(g.genus.values()):
            raise FamilyError("pad must equal the total vertex genus of the graph")
        layout = _pad_block_layout(g, self.monodromy.rank)
        for i, (_, s1, e1) in enumerate(layout):
            for _, s2, e2 in layout[i + 1 :]:
                if np.any(base[s1:e1, s2:e2] != 0):
                    raise FamilyError(
                        "base matrix couples distinct vertex blocks in the pad region"
                    )
        if self.monodromy.pad:
            h = self.monodromy.rank
            pad_block = base[h:, h:]
            if np.linalg.eigvalsh(pad_block).min() <= 0:
                raise NotPositiveDefinite("pad block of the base matrix must be positive definite")
        object.__setattr__(self, "base_im", base)

    @property
    def pad_target(self) -> np.ndarray | None:
        """Inverse of the base's pad block, or None without a pad."""
        if not self.monodromy.pad:
            return None
        h = self.monodromy.rank
        return np.linalg.inv(self.base_im[h:, h:])


def assemble_base(
    monodromy: MonodromySet,
    g: AugmentedGraph,
    vertex_blocks: Mapping[str, Sequence[Sequence[float]]],
    rank_block: Sequence[Sequence[float]] | None = None,
    cross: Sequence[Sequence[float]] | None = None,
) -> np.ndarray:
    """Build a base matrix from its constituent blocks.

    ``vertex_blocks`` maps each positive-genus vertex to a symmetric
    positive definite genus-by-genus matrix.  ``rank_block`` (default
    zero) fills the top-left; ``cross`` (default zero) fills the rank
    rows of the pad columns.
    """
    n = monodromy.total_size
    h = monodromy.rank
    base = np.zeros((n, n))
    if rank_block is not None:
        block = np.array(rank_block, dtype=float)
        if block.shape != (h, h):
            raise FamilyError(f"rank block must be {h}x{h}")
        base[:h, :h] = block
    for v, start, stop in _pad_block_layout(g, h):
        try:
            vb = np.array(vertex_blocks[v], dtype=float)
        except KeyError:
            raise FamilyError(f"vertex {v!r} has positive genus but no base block") from None
        if vb.shape != (stop - start, stop - start):
            raise FamilyError(f"base block of vertex {v!r} has the wrong shape")
        base[start:stop, start:stop] = vb
    if cross is not None:
        cb = np.array(cross, dtype=float)
        if cb.shape != (h, n - h):
            raise FamilyError(f"cross block must be {h}x{n - h}")
        base[:h, h:] = cb
        base[h:, :h] = cb.T
    return base


def model_period(f: ModelPeriodFamily, t: Fraction) -> np.ndarray:
    """Imaginary part of the model period matrix at parameter t.

    Lengths are evaluated exactly and rounded once.  Raises
    NotPositiveDefinite, naming t, if the result fails to be positive
    definite.
    """
    out = f.base_im.copy()
    h = f.monodromy.rank
    for eid, fn in f.lengths.param_lengths.items():
        le = float(fn.evaluate(Fraction(t)))
        row = np.array(f.monodromy.edge_rows[eid], dtype=float)
        out[:h, :h] += le * np.outer(row, row)
    if np.linalg.eigvalsh(out).min() <= 0:
        raise NotPositiveDefinite(f"model period matrix is not positive definite at t = {t}")
    return out


def schur_block_inverse(m: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    """Invert a block matrix by the two-by-two Schur recursion.

    Peels the first block: with M = [[P11, P12], [P21, P22]],

        inv(M) = [[inv(S),            -inv(S) P12 inv(P22)],
                  [-inv(P22) P21 inv(S),  inv(P22 - P21 inv(P11) P12)]]

    with S = P11 - P12 inv(P22) P21, recursing into the trailing blocks.
    This is an independent path to the inverse used as an oracle against
    direct inversion.
    """
    sizes = [s for s in sizes]
    if sum(sizes) != m.shape[0]:
        raise FamilyError("block sizes do not sum to the matrix size")
    if len(sizes) <= 1:
        return np.linalg.inv(m)
    n1 = sizes[0]
    p11 = m[:n1, :n1]
    p12 = m[:n1, n1:]
    p21 = m[n1:, :n1]
    p22 = m[n1:, n1:]
    inv22 = schur_block_inverse(p22, sizes[1:])
    s = p11 - p12 @ inv22 @ p21
    inv_s = np.linalg.inv(s)
    trailing = schur_block_inverse(p22 - p21 @ np.linalg.inv(p11) @ p12, sizes[1:])
    out = np.zeros_like(m, dtype=float)
    out[:n1, :n1] = inv_s
    out[:n1, n1:] = -inv_s @ p12 @ inv22
    out[n1:, :n1] = -inv22 @ p21 @ inv_s
    out[n1:, n1:] = trailing
    return out


@dataclass(frozen=True)
class NoiseSpec:
    """Entrywise decaying perturbation amplitude * t^exponent.

    The perturbation direction is a fixed matrix per block with entries
    drawn once, uniformly from [-1, 1], from the given seed.
    """

    amplitude: float = 1e-4
    exponent: float = 1.0
    seed: int = 0


@dataclass(frozen=True, eq=False)
class BlockScaleProfile:
    """Scales and limit blocks of a graded block matrix.

    Block (k, l) of the matrix is y_max(k,l) times ``limits[k][l]`` (up
    to perturbation), where the scales y_k are scale functions whose
    consecutive ratios vanish as t -> 0, i.e. strictly increasing
    dominant exponents.  Diagonal limit blocks must be invertible.
    """

    block_sizes: tuple[int, ...]
    scales: tuple[ScaleFunction, ...]
    limits: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "block_sizes", tuple(int(s) for s in self.block_sizes))
        object.__setattr__(self, "scales", tuple(self.scales))
        r = len(self.block_sizes)
        if len(self.scales) != r or len(self.limits) != r:
            raise FamilyError("profile needs one scale and one limit row per block")
        exps = [s.dominant_exponent for s in self.scales]
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise FamilyError("consecutive scale ratios must vanish as t -> 0")
        limits = []
        for k in range(r):
            if len(self.limits[k]) != r:
                raise FamilyError("limit grid must be square")
            row = []
            for l in range(r):
                block = np.array(self.limits[k][l], dtype=float)
                if block.shape != (self.block_sizes[k], self.block_sizes[l]):
                    raise FamilyError(f"limit block ({k}, {l}) has the wrong shape")
                row.append(block)
            limits.append(tuple(row))
        for k in range(r):
            if self.block_sizes[k] and np.linalg.cond(limits[k][k]) > CONDITION_LIMIT:
                raise FamilyError(f"diagonal limit block {k} is numerically singular")
        object.__setattr__(self, "limits", tuple(limits))

    @property
    def total_size(self) -> int:
        return sum(self.block_sizes)

    def offsets(self) -> list[tuple[int, int]]:
        out = []
        pos = 0
        for s in self.block_sizes:
            out.append((pos, pos + s))
            pos += s
        return out


@dataclass(frozen=True)
class BlockSample:
    """Measurements at one grid point of a block-inverse verification."""

    t: Fraction
    diag_deviations: tuple[float, ...]
    offdiag_norms: Mapping[tuple[int, int], float]
    oracle_gap: float
    condition: float
    flagged: bool


@dataclass(frozen=True, eq=False)
class InverseLemmaReport:
    """Grid verification that rescaled inverse blocks reach their limits.

    ``diag_deviations[i][k]`` is the Frobenius distance, at grid point
    i, between the rescaled (k, k) block of the inverse and the inverse
    of the limit block.  Off-diagonal blocks are only rescaled and
    measured, never assigned a limit.
    """

    grid: tuple[Fraction, ...]
    samples: tuple[BlockSample, ...]
    targets: tuple[np.ndarray, ...]

    @property
    def final_diag_deviations(self) -> tuple[float, ...]:
        return self.samples[-1].diag_deviations

    @property
    def max_oracle_gap(self) -> float:
        return max(s.oracle_gap for s in self.samples)

    @property
    def offdiag_sup(self) -> float:
        sup = 0.0
        for s in self.samples:
            for norm in s.offdiag_norms.values():
                sup = max(sup, norm)
        return sup


def _verify_grid(grid: Sequence[Fraction] | None, default_last: int) -> tuple[Fraction, ...]:
    if grid is None:
        return geometric_grid(1, default_last)
    pts = tuple(Fraction(t) for t in grid)
    if not pts or any(t <= 0 for t in pts):
        raise FamilyError("grid points must be positive")
    if any(b >= a for a, b in zip(pts, pts[1:])):
        raise FamilyError("grid must be strictly decreasing")
    return pts


def verify_inverse_lemma(
    profile: BlockScaleProfile,
    noise: NoiseSpec | None = None,
    grid: Sequence[Fraction] | None = None,
) -> InverseLemmaReport:
    """Sample a graded matrix family and check its inverse's grading.

    At each grid point the matrix with blocks y_max(k,l) * (limit + o(1))
    is inverted directly; block (k, l) of the inverse is rescaled by
    y_min(k,l).  Diagonal blocks are compared against the inverses of
    the diagonal limits; off-diagonal norms are recorded.  Every
    inversion is cross-checked against the Schur recursion oracle, and
    points with condition estimate beyond 1e12 are flagged.
    """
    if noise is None:
        noise = NoiseSpec()
    pts = _verify_grid(grid, default_last=4)
    r = len(profile.block_sizes)
    rng = np.random.default_rng(noise.seed)
    directions = [
        [rng.uniform(-1.0, 1.0, size=(profile.block_sizes[k], profile.block_sizes[l])) for l in range(r)]
        for k in range(r)
    ]
    targets = tuple(
        np.linalg.inv(profile.limits[k][k]) if profile.block_sizes[k] else np.zeros((0, 0))
        for k in range(r)
    )
    offsets = profile.offsets()
    samples = []
    for t in pts:
        tf = float(t)
        y = [float(s.evaluate(t)) for s in profile.scales]
        eps = noise.amplitude * tf**noise.exponent
        m = np.zeros((profile.total_size, profile.total_size))
        for k in range(r):
            for l in range(r):
                scale = y[max(k, l)]
                block = profile.limits[k][l] + eps * directions[k][l]
                m[offsets[k][0] : offsets[k][1], offsets[l][0] : offsets[l][1]] = scale * block
        condition = float(np.linalg.cond(m))
        direct = np.linalg.inv(m)
        oracle = schur_block_inverse(m, profile.block_sizes)
        oracle_gap = float(np.max(np.abs(direct - oracle))) if m.size else 0.0
        diag_devs = []
        off_norms: dict[tuple[int, int], float] = {}
        for k in range(r):
            sk = slice(*offsets[k])
            rescaled = y[k] * direct[sk, sk]
            diag_devs.append(float(np.linalg.norm(rescaled - targets[k])))
            for l in range(r):
                if l == k:
                    continue
                sl = slice(*offsets[l])
                off_norms[(k, l)] = float(
                    np.linalg.norm(y[min(k, l)] * direct[sk, sl])
                )
        samples.append(
            BlockSample(
                t=t,
                diag_deviations=tuple(diag_devs),
                offdiag_norms=off_norms,
                oracle_gap=oracle_gap,
                condition=condition,
                flagged=condition > CONDITION_LIMIT,
            )
        )
    return InverseLemmaReport(grid=pts, samples=tuple(samples), targets=targets)


@dataclass(frozen=True, eq=False)
class GradedLimitReport:
    """Verification that a model family's inverse follows its layering.

    The layer targets are the inverses of the exact layer matrices
    (computed with rational arithmetic and rounded once); the pad target
    is the inverse of the base's pad block.  The pad deviation sits in
    the last entry of each sample's diagonal deviations when a pad is
    present.
    """

    grid: tuple[Fraction, ...]
    block_sizes: tuple[int, ...]
    samples: tuple[BlockSample, ...]
    layer_targets_exact: tuple[tuple[tuple[Fraction, ...], ...], ...]
    layer_targets: tuple[np.ndarray, ...]
    pad_target: np.ndarray | None

    @property
    def final_deviations(self) -> tuple[float, ...]:
        return self.samples[-1].diag_deviations


def layer_matrix(f: ModelPeriodFamily, k: int) -> list[list[Fraction]]:
    """Exact layer matrix: sum over layer-k edges of x_e times the
    block-k square of the edge's cycle coefficients."""
    layering = f.lengths.target_layering
    sizes = f.monodromy.block_sizes
    start = sum(sizes[:k])
    stop = start + sizes[k]
    out = [[Fraction(0)] * sizes[k] for _ in range(sizes[k])]
    for e in sorted(layering.parts[k]):
        x = f.lengths.target_point[e]
        row = f.monodromy.edge_rows[e][start:stop]
        for i in range(sizes[k]):
            if row[i] == 0:
                continue
            for j in range(sizes[k]):
                if row[j] != 0:
                    out[i][j] += x * row[i] * row[j]
    return out


def graded_inverse_limits(
    f: ModelPeriodFamily, grid: Sequence[Fraction] | None = None
) -> GradedLimitReport:
    """Check the layerwise limits of the inverse model period matrix.

    Requires the family's lengths to factor as (layer total) * (target
    coordinate) on every edge, and the monodromy blocks to match the
    layering.  Diagonal block k of the inverse, rescaled by the layer-k
    total, must approach the inverse of the exact layer matrix; the pad
    block, unrescaled, must approach the inverse of the base pad block.
    """
    layering = f.lengths.target_layering
    r = len(layering.parts)
    if len(f.monodromy.block_sizes) != r:
        raise FamilyError(
            "monodromy must carry one block per layer (use an admissible basis)"
        )
    scales = [f.lengths.layer_total(j) for j in range(r)]
    for j, part in enumerate(layering.parts):
        for e in sorted(part):
            if f.lengths.param_lengths[e] != scales[j].scaled(f.lengths.target_point[e]):
                raise FamilyError(
                    f"length of edge {e!r} does not factor as layer scale times target coordinate"
                )
    pts = _verify_grid(grid, default_last=6)
    exact_targets = []
    float_targets = []
    for k in range(r):
        mk = layer_matrix(f, k)
        inv = linalg.inverse(mk)
        exact_targets.append(tuple(tuple(row) for row in inv))
        fm = np.zeros((len(inv), len(inv)))
        for i, row in enumerate(inv):
            for j, x in enumerate(row):
                fm[i, j] = float(x)
        float_targets.append(fm)
    pad_target = f.pad_target
    sizes = f.monodromy.block_sizes + ((f.monodromy.pad,) if f.monodromy.pad else ())
    offsets = []
    pos = 0
    for s in sizes:
        offsets.append((pos, pos + s))
        pos += s
    samples = []
    for t in pts:
        im = model_period(f, t)
        condition = float(np.linalg.cond(im))
        direct = np.linalg.inv(im)
        oracle = schur_block_inverse(im, sizes)
        oracle_gap = float(np.max(np.abs(direct - oracle)))
        y = [float(s.evaluate(t)) for s in scales] + ([1.0] if f.monodromy.pad else [])
        diag_devs = []
        off_norms: dict[tuple[int, int], float] = {}
        for k in range(len(sizes)):
            sk = slice(*offsets[k])
            rescaled = y[k] * direct[sk, sk]
            target = float_targets[k] if k < r else pad_target
            diag_devs.append(float(np.linalg.norm(rescaled - target)))
            for l in range(len(sizes)):
                if l == k:
                    continue
                sl = slice(*offsets[l])
                off_norms[(k, l)] = float(np.linalg.norm(y[min(k, l)] * direct[sk, sl]))
        samples.append(
            BlockSample(
                t=t,
                diag_deviations=tuple(diag_devs),
                offdiag_norms=off_norms,
                oracle_gap=oracle_gap,
                condition=condition,
                flagged=condition > CONDITION_LIMIT,
            )
        )
    return GradedLimitReport(
        grid=pts,
        block_sizes=sizes,
        samples=tuple(samples),
        layer_targets_exact=tuple(exact_targets),
        layer_targets=tuple(float_targets),
        pad_target=pad_target,
    )
