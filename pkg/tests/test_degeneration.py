from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canmeas import (
    CROSS_LAYER,
    WITHIN_LAYER,
    FamilyError,
    InvalidGraph,
    LengthFamily,
    NormalizedTestFunction,
    OrderedPartition,
    ScaleFunction,
    SpanningTree,
    all_tree_limits,
    check_convergence,
    continuity_probe,
    geometric_grid,
    layered_tree_weight,
    limit_foster,
    omega_infinity,
    spanning_trees,
    tropical_canonical_measure,
)
from canmeas.corpus import random_family, random_graph
from canmeas.gallery import theta_family, theta_graph, triangle_family

seeds = st.integers(min_value=0, max_value=10**9)

F = Fraction


class TestLengthFamily:
    def test_must_cover_edges(self):
        with pytest.raises(FamilyError):
            LengthFamily(
                graph=theta_graph(),
                param_lengths={"e1": ScaleFunction.constant(1)},
                target_layering=OrderedPartition.trivial(["e1", "e2", "e3"]),
                target_point={"e1": F(1), "e2": F(1), "e3": F(1)},
            )

    def test_target_must_be_interior(self):
        with pytest.raises(FamilyError, match="positive"):
            LengthFamily(
                graph=theta_graph(),
                param_lengths={
                    "e1": ScaleFunction.constant(1),
                    "e2": ScaleFunction.power(1),
                    "e3": ScaleFunction.power(1),
                },
                target_layering=OrderedPartition(
                    parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
                ),
                target_point={"e1": F(1), "e2": F(0), "e3": F(1)},
            )

    def test_layer_sums_must_be_one(self):
        with pytest.raises(FamilyError, match="sum"):
            LengthFamily(
                graph=theta_graph(),
                param_lengths={
                    "e1": ScaleFunction.constant(1),
                    "e2": ScaleFunction.power(1),
                    "e3": ScaleFunction.power(1),
                },
                target_layering=OrderedPartition(
                    parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
                ),
                target_point={"e1": F(1), "e2": F(1, 2), "e3": F(1, 3)},
            )

    def test_lengths_at(self):
        f = theta_family()
        assert f.lengths_at(F(1, 10)) == {
            "e1": F(1),
            "e2": F(1, 20),
            "e3": F(1, 20),
        }
        assert f.layer_total(1).terms == ((1, F(1)),)

    def test_growing_lengths_are_allowed(self):
        f = LengthFamily(
            graph=theta_graph(),
            param_lengths={
                "e1": ScaleFunction.power(-2),
                "e2": ScaleFunction.power(-1, F(1, 2)),
                "e3": ScaleFunction.power(-1, F(1, 2)),
            },
            target_layering=OrderedPartition(
                parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
            ),
            target_point={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
        )
        assert check_convergence(f).ok


class TestConvergenceConditions:
    def test_gallery_families_converge(self):
        assert check_convergence(theta_family()).ok
        assert check_convergence(triangle_family()).ok

    def test_wrong_ratio_within_a_layer(self):
        f = LengthFamily(
            graph=theta_graph(),
            param_lengths={
                "e1": ScaleFunction.constant(1),
                "e2": ScaleFunction.power(1, F(1, 3)),
                "e3": ScaleFunction.power(1, F(1, 2)),
            },
            target_layering=OrderedPartition(
                parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
            ),
            target_point={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
        )
        diag = check_convergence(f)
        assert not diag.ok
        assert {fail.condition for fail in diag.failures} == {WITHIN_LAYER}
        assert {fail.edges for fail in diag.failures} == {("e2",), ("e3",)}

    def test_layer_that_fails_to_shrink(self):
        f = LengthFamily(
            graph=theta_graph(),
            param_lengths={
                "e1": ScaleFunction.constant(1),
                "e2": ScaleFunction.constant(F(1, 2)),
                "e3": ScaleFunction.constant(F(1, 2)),
            },
            target_layering=OrderedPartition(
                parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
            ),
            target_point={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
        )
        diag = check_convergence(f)
        assert not diag.ok
        assert {fail.condition for fail in diag.failures} == {CROSS_LAYER}
        assert ("e1", "e2") in {fail.edges for fail in diag.failures}

    def test_refusal_names_the_condition(self):
        f = LengthFamily(
            graph=theta_graph(),
            param_lengths={
                "e1": ScaleFunction.constant(1),
                "e2": ScaleFunction.constant(F(1, 2)),
                "e3": ScaleFunction.constant(F(1, 2)),
            },
            target_layering=OrderedPartition(
                parts=(frozenset({"e1"}), frozenset({"e2", "e3"}))
            ),
            target_point={"e1": F(1), "e2": F(1, 2), "e3": F(1, 2)},
        )
        with pytest.raises(FamilyError, match=CROSS_LAYER):
            limit_foster(f, geometric_grid(1, 2))
        with pytest.raises(FamilyError, match=CROSS_LAYER):
            omega_infinity(f, spanning_trees(f.graph)[0])

    @given(seeds)
    @settings(max_examples=40, deadline=None)
    def test_corpus_families_converge_by_construction(self, seed):
        rng = Random(seed)
        g = random_graph(rng, max_vertices=6, max_edges=8)
        if not g.edge_ids:
            return
        assert check_convergence(random_family(rng, g)).ok


class TestTreeWeightLimits:
    def test_theta_limits(self):
        limits = all_tree_limits(theta_family())
        assert limits == {
            frozenset({"e1"}): F(0),
            frozenset({"e2"}): F(1, 2),
            frozenset({"e3"}): F(1, 2),
        }

    def test_triangle_limits(self):
        limits = all_tree_limits(triangle_family())
        assert limits == {
            frozenset({"e1", "e2"}): F(0),
            frozenset({"e1", "e3"}): F(0),
            frozenset({"e2", "e3"}): F(1),
        }

    def test_non_tree_rejected(self):
        with pytest.raises(InvalidGraph):
            omega_infinity(theta_family(), SpanningTree(frozenset({"e1", "e2"})))
        with pytest.raises(InvalidGraph):
            layered_tree_weight(theta_family(), SpanningTree(frozenset()))

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_limit_equals_layered_weight(self, seed):
        rng = Random(seed)
        g = random_graph(rng, max_vertices=5, max_edges=7)
        if not g.edge_ids:
            return
        f = random_family(rng, g)
        for tree in spanning_trees(g):
            assert omega_infinity(f, tree) == layered_tree_weight(f, tree)

    @given(seeds)
    @settings(max_examples=40, deadline=None)
    def test_limits_sum_to_product_of_layer_totals(self, seed):
        rng = Random(seed)
        g = random_graph(rng, max_vertices=5, max_edges=7)
        if not g.edge_ids:
            return
        f = random_family(rng, g)
        from canmeas import graded_minors

        total = sum(all_tree_limits(f).values(), F(0))
        product = F(1)
        for minor in graded_minors(g, f.target_layering).minors:
            layer_sum = F(0)
            for t in spanning_trees(minor):
                w = F(1)
                for e in minor.edge_ids:
                    if e not in t:
                        w *= f.target_point[e]
                layer_sum += w
            product *= layer_sum
        assert total == product


class TestMeasureTrajectories:
    def test_triangle_closed_form(self):
        report = limit_foster(triangle_family(), geometric_grid(1, 4))
        for t, val in zip(report.grid, report.trajectories["e1"]):
            assert val == 1 / (1 + t)
        assert report.targets == {"e1": F(1), "e2": F(0), "e3": F(0)}
        assert report.monotone

    def test_theta_closed_form(self):
        x2 = F(1, 3)
        x3 = F(2, 3)
        report = limit_foster(theta_family(x2, x3), geometric_grid(1, 4))
        for t, val in zip(report.grid, report.trajectories["e2"]):
            assert val == x2 * (1 + x3 * t) / (1 + x2 * x3 * t)
        assert report.targets["e2"] == x2
        assert report.final_deviation == report.max_deviations[-1]

    def test_targets_match_tropical_measure(self):
        f = theta_family()
        report = limit_foster(f, geometric_grid(1, 2))
        mu = tropical_canonical_measure(f.target_curve())
        assert report.targets == mu.edge_coeffs

    def test_masses_stay_at_genus(self):
        report = limit_foster(theta_family(), geometric_grid(1, 3))
        assert report.edge_masses == (F(2), F(2), F(2))

    def test_grid_validation(self):
        f = theta_family()
        with pytest.raises(FamilyError):
            limit_foster(f, [])
        with pytest.raises(FamilyError):
            limit_foster(f, [F(1, 10), F(1, 10)])
        with pytest.raises(FamilyError):
            limit_foster(f, [F(-1, 10)])

    @given(seeds)
    @settings(max_examples=15, deadline=None)
    def test_random_families_approach_their_targets(self, seed):
        rng = Random(seed)
        g = random_graph(rng, max_vertices=5, max_edges=7)
        if not g.edge_ids:
            return
        f = random_family(rng, g)
        report = limit_foster(f, geometric_grid(1, 5))
        assert report.max_deviations[-1] <= report.max_deviations[0]
        assert report.max_deviations[-1] < F(1, 1000)


class TestContinuityProbe:
    def test_tent_on_surviving_edge(self):
        f = theta_family()
        tent = NormalizedTestFunction(
            vertex_values={"u": F(0), "v": F(0)},
            normalized_breaks={"e1": ((F(1, 2), F(1)),)},
        )
        report = continuity_probe(f, tent, geometric_grid(1, 4))
        assert report.limit == F(1, 2)
        # The probe integral is half the canonical mass of the long edge.
        foster = limit_foster(f, geometric_grid(1, 4))
        for val, mass in zip(report.values, foster.trajectories["e1"]):
            assert val == mass / 2
        assert report.final_deviation == report.deviations[-1]

    def test_linear_ramps_are_exactly_constant(self):
        # Vertex-linear functions integrate to (sum of masses) / 2, which
        # the mass identity pins to the genus at every t.
        f = theta_family()
        ramp = NormalizedTestFunction(vertex_values={"u": F(0), "v": F(1)})
        report = continuity_probe(f, ramp, geometric_grid(1, 3))
        assert report.limit == F(1)
        assert all(v == F(1) for v in report.values)
        assert all(d == 0 for d in report.deviations)

    def test_breaks_must_be_interior(self):
        with pytest.raises(FamilyError):
            NormalizedTestFunction(
                vertex_values={"u": F(0)},
                normalized_breaks={"e1": ((F(1), F(2)),)},
            )

    def test_on_metric_rescales_breaks(self):
        f = theta_family()
        tent = NormalizedTestFunction(
            vertex_values={"u": F(0), "v": F(0)},
            normalized_breaks={"e2": ((F(1, 2), F(1)),)},
        )
        pinned = tent.on_metric(f.metric_at(F(1, 10)))
        assert pinned.breakpoints["e2"] == ((F(1, 40), F(1)),)

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_random_probes_converge(self, seed):
        from canmeas.corpus import random_test_function

        rng = Random(seed)
        g = random_graph(rng, max_vertices=5, max_edges=7)
        if not g.edge_ids:
            return
        f = random_family(rng, g)
        fn = random_test_function(rng, g)
        report = continuity_probe(f, fn, geometric_grid(2, 5))
        assert report.deviations[-1] < F(1, 100)
