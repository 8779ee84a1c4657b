"""Small named examples used by documentation, self tests, and demos.

The two stock degenerations keep one edge of unit length while the
remaining edges shrink linearly in t toward prescribed normalized
coordinates; both have closed-form canonical measures, which makes them
good calibration targets.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .degeneration import LengthFamily
from .families import ScaleFunction
from .graphs import AugmentedGraph
from .layerings import OrderedPartition, admissible_cycle_basis
from .periods import ModelPeriodFamily, MonodromySet, assemble_base, monodromy_from_basis


def theta_graph(genus: tuple[int, int] = (0, 0)) -> AugmentedGraph:
    """Two vertices joined by three parallel edges."""
    return AugmentedGraph(
        vertices=("u", "v"),
        edges=(("e1", ("u", "v")), ("e2", ("u", "v")), ("e3", ("u", "v"))),
        genus={"u": genus[0], "v": genus[1]},
    )


def triangle_graph(genus: tuple[int, int, int] = (0, 0, 0)) -> AugmentedGraph:
    """Three vertices joined in a cycle."""
    return AugmentedGraph(
        vertices=("v1", "v2", "v3"),
        edges=(("e1", ("v2", "v3")), ("e2", ("v1", "v3")), ("e3", ("v1", "v2"))),
        genus={"v1": genus[0], "v2": genus[1], "v3": genus[2]},
    )


def _two_layer_family(
    g: AugmentedGraph, x2: Fraction, x3: Fraction
) -> LengthFamily:
    # e1 stays at length 1; e2, e3 shrink linearly with ratio x2 : x3.
    x2, x3 = Fraction(x2), Fraction(x3)
    return LengthFamily(
        graph=g,
        param_lengths={
            "e1": ScaleFunction.constant(1),
            "e2": ScaleFunction.power(1, x2),
            "e3": ScaleFunction.power(1, x3),
        },
        target_layering=OrderedPartition(
            parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
        ),
        target_point={"e1": Fraction(1), "e2": x2, "e3": x3},
    )


def theta_family(x2=Fraction(1, 2), x3=Fraction(1, 2)) -> LengthFamily:
    """Theta graph with lengths (1, x2*t, x3*t)."""
    return _two_layer_family(theta_graph(), x2, x3)


def triangle_family(x2=Fraction(1, 2), x3=Fraction(1, 2)) -> LengthFamily:
    """Triangle with lengths (1, x2*t, x3*t); its measure limit puts all
    mass on the surviving loop edge."""
    return _two_layer_family(triangle_graph(), x2, x3)


def theta_monodromy(genus: tuple[int, int] = (0, 0)) -> MonodromySet:
    g = theta_graph(genus)
    layering = OrderedPartition(parts=(frozenset({"e1"}), frozenset({"e2", "e3"})))
    return monodromy_from_basis(g, admissible_cycle_basis(g, layering))


def theta_period_family(
    exponents: tuple[int, int] = (2, 1),
    genus: tuple[int, int] = (0, 0),
    vertex_blocks=None,
) -> ModelPeriodFamily:
    """Layered theta period model with lengths y_j(t) * x_e.

    Layer scales are t^-exponents[j]; coordinates are x = (1, 1/2, 1/2).
    With positive vertex genera, ``vertex_blocks`` (default identity)
    fills the pad of the base matrix.
    """
    a1, a2 = exponents
    if a1 <= a2:
        raise ValueError("layer scales must decrease strictly")
    g = theta_graph(genus)
    layering = OrderedPartition(parts=(frozenset({"e1"}), frozenset({"e2", "e3"})))
    family = LengthFamily(
        graph=g,
        param_lengths={
            "e1": ScaleFunction.power(-a1),
            "e2": ScaleFunction.power(-a2, Fraction(1, 2)),
            "e3": ScaleFunction.power(-a2, Fraction(1, 2)),
        },
        target_layering=layering,
        target_point={
            "e1": Fraction(1),
            "e2": Fraction(1, 2),
            "e3": Fraction(1, 2),
        },
    )
    monodromy = theta_monodromy(genus)
    if monodromy.pad:
        if vertex_blocks is None:
            vertex_blocks = {
                v: np.eye(g.genus[v]) for v in g.vertices if g.genus[v] > 0
            }
        base = assemble_base(monodromy, g, vertex_blocks)
    else:
        n = monodromy.total_size
        base = np.zeros((n, n))
    return ModelPeriodFamily(monodromy=monodromy, lengths=family, base_im=base)
