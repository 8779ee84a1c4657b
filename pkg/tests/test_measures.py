from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canmeas import (
    BasisError,
    DisconnectedGraph,
    EdgeMeasure,
    InvalidGraph,
    LayeringError,
    MetricGraph,
    OrderedPartition,
    PiecewiseLinear,
    InvalidTestFunction,
    TropicalCurve,
    cycle_basis,
    effective_resistance,
    foster_by_matrix,
    foster_by_projection,
    foster_by_trees,
    gram_matrices,
    graph_genus,
    hybrid_mass_profile,
    integrate,
    total_genus,
    tropical_canonical_measure,
)
from canmeas.corpus import random_graph, random_layering, random_metric, random_rational
from canmeas.gallery import theta_graph, triangle_graph
from canmeas.graphs import AugmentedGraph, CycleVector

seeds = st.integers(min_value=0, max_value=10**9)

F = Fraction


def theta_metric():
    return MetricGraph(theta_graph(), {"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)})


class TestMetricGraph:
    def test_lengths_must_cover_edges(self):
        with pytest.raises(InvalidGraph):
            MetricGraph(theta_graph(), {"e1": F(1)})

    def test_lengths_must_be_positive(self):
        with pytest.raises(InvalidGraph):
            MetricGraph(
                theta_graph(), {"e1": F(1), "e2": F(0), "e3": F(1)}
            )

    def test_scaled(self):
        m = theta_metric().scaled(F(2))
        assert m.length("e2") == F(1)
        with pytest.raises(InvalidGraph):
            theta_metric().scaled(F(-1))


class TestCanonicalMeasure:
    def test_theta_by_all_routes(self):
        m = theta_metric()
        want = {"e1": F(4, 5), "e2": F(3, 5), "e3": F(3, 5)}
        for route in (foster_by_trees, foster_by_projection, foster_by_matrix):
            assert route(m).edge_coeffs == want

    def test_triangle(self):
        m = MetricGraph(triangle_graph(), {"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)})
        # A cycle's edge masses are proportional to the lengths.
        assert foster_by_trees(m).edge_coeffs == {
            "e1": F(1, 2),
            "e2": F(1, 4),
            "e3": F(1, 4),
        }

    def test_bridge_carries_no_mass(self):
        g = AugmentedGraph(
            vertices=("a", "b"),
            edges=(("l", ("a", "a")), ("m", ("a", "b"))),
        )
        mu = foster_by_trees(MetricGraph(g, {"l": F(3), "m": F(7)}))
        assert mu.edge_coeffs == {"l": F(1), "m": F(0)}

    def test_tree_graph_measure_vanishes(self):
        g = AugmentedGraph(vertices=("a", "b"), edges=(("m", ("a", "b")),))
        m = MetricGraph(g, {"m": F(5)})
        for route in (foster_by_trees, foster_by_projection, foster_by_matrix):
            assert route(m).edge_coeffs == {"m": F(0)}

    def test_disconnected_rejected(self):
        g = AugmentedGraph(
            vertices=("a", "b", "c"), edges=(("e", ("a", "b")),)
        )
        with pytest.raises(DisconnectedGraph):
            foster_by_trees(MetricGraph(g, {"e": F(1)}))

    def test_atoms_come_from_vertex_genus(self):
        m = MetricGraph(
            theta_graph(genus=(2, 0)), {"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)}
        )
        mu = foster_by_trees(m)
        assert mu.vertex_atoms == {"u": 2, "v": 0}
        assert mu.total_mass == mu.edge_mass + 2

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_three_routes_agree(self, seed):
        rng = Random(seed)
        m = random_metric(rng, random_graph(rng, max_vertices=6, max_edges=9))
        a = foster_by_trees(m).edge_coeffs
        assert foster_by_projection(m).edge_coeffs == a
        assert foster_by_matrix(m).edge_coeffs == a

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_total_edge_mass_is_genus(self, seed):
        rng = Random(seed)
        g = random_graph(rng, max_vertices=6, max_edges=9)
        m = random_metric(rng, g)
        assert foster_by_trees(m).edge_mass == graph_genus(g)

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_resistance_identity(self, seed):
        rng = Random(seed)
        g = random_graph(rng, max_vertices=6, max_edges=9)
        m = random_metric(rng, g)
        mu = foster_by_trees(m)
        for e in g.edge_ids:
            drop = effective_resistance(g, m.lengths, e) / m.lengths[e]
            assert mu.edge_coeffs[e] == 1 - drop

    @given(seeds)
    @settings(max_examples=40, deadline=None)
    def test_rescaling_lengths_changes_nothing(self, seed):
        rng = Random(seed)
        m = random_metric(rng, random_graph(rng, max_vertices=6, max_edges=9))
        factor = random_rational(rng, 30, 30)
        assert foster_by_trees(m.scaled(factor)).edge_coeffs == foster_by_trees(m).edge_coeffs


class TestEdgeMeasureValidation:
    def test_coefficients_must_lie_in_unit_interval(self):
        m = theta_metric()
        with pytest.raises(InvalidGraph):
            EdgeMeasure(
                metric=m,
                edge_coeffs={"e1": F(2), "e2": F(0), "e3": F(0)},
                vertex_atoms={},
            )

    def test_atoms_must_be_nonnegative(self):
        m = theta_metric()
        with pytest.raises(InvalidGraph):
            EdgeMeasure(
                metric=m,
                edge_coeffs={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
                vertex_atoms={"u": -1},
            )


class TestGramMatrix:
    def test_theta_matrix(self):
        m = theta_metric()
        gram = gram_matrices(m)
        # Cycles e2 - e1 and e3 - e1 share the edge e1.
        assert gram.matrix == (
            (F(3, 2), F(1)),
            (F(1), F(3, 2)),
        )

    def test_edge_matrices_assemble_the_gram_matrix(self):
        m = theta_metric()
        gram = gram_matrices(m)
        h = len(gram.basis)
        assembled = [[F(0)] * h for _ in range(h)]
        for eid, block in gram.edge_matrices.items():
            for i in range(h):
                for j in range(h):
                    assembled[i][j] += m.lengths[eid] * block[i][j]
        assert tuple(tuple(row) for row in assembled) == gram.matrix

    def test_dependent_cycles_rejected(self):
        m = theta_metric()
        gamma = cycle_basis(m.graph)[0]
        doubled = CycleVector({e: 2 * c for e, c in gamma.coeffs.items()})
        with pytest.raises(BasisError):
            gram_matrices(m, [gamma, doubled])

    def test_non_cycle_rejected(self):
        m = theta_metric()
        chain = CycleVector({"e1": 1})
        with pytest.raises(BasisError):
            gram_matrices(m, [chain, cycle_basis(m.graph)[0]])


class TestTropical:
    def curve(self, graph=None):
        return TropicalCurve(
            graph=graph or theta_graph(),
            lengths={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
            layering=OrderedPartition(
                parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
            ),
        )

    def test_layer_sums_must_be_one(self):
        with pytest.raises(LayeringError):
            TropicalCurve(
                graph=theta_graph(),
                lengths={"e1": F(1), "e2": F(1, 2), "e3": F(1, 3)},
                layering=OrderedPartition(
                    parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
                ),
            )

    def test_theta_measure(self):
        mu = tropical_canonical_measure(self.curve())
        assert mu.edge_coeffs == {"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)}

    def test_triangle_measure_concentrates_on_loop(self):
        curve = TropicalCurve(
            graph=triangle_graph(),
            lengths={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
            layering=OrderedPartition(
                parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
            ),
        )
        mu = tropical_canonical_measure(curve)
        assert mu.edge_coeffs == {"e1": F(1), "e2": F(0), "e3": F(0)}

    def test_hybrid_total_is_total_genus(self):
        curve = self.curve(theta_graph(genus=(1, 1)))
        assert hybrid_mass_profile(curve).total_mass == total_genus(curve.graph) == 4

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_random_tropical_mass_decomposes(self, seed):
        from canmeas.corpus import normalized_coordinates

        rng = Random(seed)
        g = random_graph(rng, max_vertices=6, max_edges=9)
        if not g.edge_ids:
            return
        q = random_layering(rng, g)
        curve = TropicalCurve(
            graph=g, lengths=normalized_coordinates(rng, q), layering=q
        )
        mu = tropical_canonical_measure(curve)
        assert mu.edge_mass == graph_genus(g)
        assert hybrid_mass_profile(curve).total_mass == total_genus(g)


class TestIntegration:
    def test_constant_function_integrates_to_total_mass(self):
        m = theta_metric()
        mu = foster_by_trees(m)
        f = PiecewiseLinear(vertex_values={"u": F(3), "v": F(3)})
        assert integrate(mu, f) == 3 * mu.total_mass

    def test_linear_ramp_uses_edge_means(self):
        g = AugmentedGraph(
            vertices=("a", "b"), edges=(("e1", ("a", "b")), ("e2", ("a", "b")))
        )
        m = MetricGraph(g, {"e1": F(1), "e2": F(1)})
        mu = foster_by_trees(m)
        f = PiecewiseLinear(vertex_values={"a": F(0), "b": F(1)})
        # Both edges carry mass 1/2 and the average value along each is 1/2.
        assert integrate(mu, f) == F(1, 2)

    def test_breakpoints_shift_the_average(self):
        g = AugmentedGraph(vertices=("a",), edges=(("l", ("a", "a")),))
        m = MetricGraph(g, {"l": F(1)})
        mu = foster_by_trees(m)
        tent = PiecewiseLinear(
            vertex_values={"a": F(0)},
            breakpoints={"l": ((F(1, 2), F(1)),)},
        )
        assert integrate(mu, tent) == F(1, 2)

    def test_atoms_sample_vertex_values(self):
        g = AugmentedGraph(vertices=("a",), edges=(("l", ("a", "a")),), genus={"a": 2})
        m = MetricGraph(g, {"l": F(1)})
        mu = foster_by_trees(m)
        f = PiecewiseLinear(vertex_values={"a": F(5)})
        assert integrate(mu, f) == 5 * 1 + 5 * 2

    def test_breakpoints_must_sit_inside_the_edge(self):
        g = AugmentedGraph(vertices=("a",), edges=(("l", ("a", "a")),))
        m = MetricGraph(g, {"l": F(1)})
        mu = foster_by_trees(m)
        outside = PiecewiseLinear(
            vertex_values={"a": F(0)},
            breakpoints={"l": ((F(2), F(1)),)},
        )
        with pytest.raises(InvalidTestFunction):
            integrate(mu, outside)

    def test_breakpoints_must_increase(self):
        g = AugmentedGraph(vertices=("a",), edges=(("l", ("a", "a")),))
        m = MetricGraph(g, {"l": F(1)})
        mu = foster_by_trees(m)
        bad = PiecewiseLinear(
            vertex_values={"a": F(0)},
            breakpoints={"l": ((F(1, 2), F(1)), (F(1, 4), F(2)))},
        )
        with pytest.raises(InvalidTestFunction):
            integrate(mu, bad)
