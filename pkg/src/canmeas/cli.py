"""Command line front end.

Exit codes: 0 all requested checks passed, 2 malformed document, 3
violated precondition (disconnected graph, missing section, family that
does not converge, ...), 4 an assertion computed fine but failed.
Reports go to stdout as canonical JSON (or a plain table with --table)
and are byte-identical for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from random import Random
from typing import Any

import numpy as np

from . import corpus, gallery
from .degeneration import (
    LengthFamily,
    all_tree_limits,
    layered_tree_weight,
    limit_foster,
)
from .documents import (
    DocumentError,
    dump_report,
    exact_field,
    float_field,
    load_document,
    measure_section,
    render_table,
)
from .errors import CanmeasError, FamilyError
from .families import ScaleFunction, geometric_grid
from .graphs import (
    connected_components,
    graph_genus,
    is_stable,
    spanning_trees,
    total_genus,
)
from .kirchhoff import effective_resistance, tree_count
from .layerings import admissible_cycle_basis, graded_minors, layered_spanning_trees
from .measures import (
    MetricGraph,
    foster_by_matrix,
    foster_by_projection,
    foster_by_trees,
    gram_matrices,
    hybrid_mass_profile,
    tropical_canonical_measure,
)
from .periods import (
    BlockScaleProfile,
    ModelPeriodFamily,
    NoiseSpec,
    assemble_base,
    graded_inverse_limits,
    monodromy_from_basis,
    verify_inverse_lemma,
)

_FORMULATIONS = {
    "trees": foster_by_trees,
    "projection": foster_by_projection,
    "matrix": foster_by_matrix,
}


def _parse_grid(text: str | None, default: tuple[int, int]) -> tuple[Fraction, ...]:
    if text is None:
        return geometric_grid(*default)
    decades = re.fullmatch(r"1e-(\d+)\s*\.\.\s*1e-(\d+)", text.strip())
    if decades:
        return geometric_grid(int(decades.group(1)), int(decades.group(2)))
    points = []
    for token in text.split(","):
        token = token.strip()
        try:
            points.append(Fraction(token))
        except (ValueError, ZeroDivisionError):
            raise DocumentError(f"cannot parse grid point {token!r}") from None
    if not points or any(t <= 0 for t in points) or any(
        b >= a for a, b in zip(points, points[1:])
    ):
        raise DocumentError("grid must be a strictly decreasing list of positive rationals")
    return tuple(points)


def _graph_section(g) -> dict[str, Any]:
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "components": len(connected_components(g)),
        "genus": graph_genus(g),
        "total_genus": total_genus(g),
        "stable": is_stable(g),
    }


def _assertion(name: str, passed: bool, **extra: Any) -> dict[str, Any]:
    out: dict[str, Any] = {"name": name, "passed": bool(passed)}
    out.update(extra)
    return out


def _finish(report: dict[str, Any], assertions: list[dict[str, Any]]) -> tuple[dict[str, Any], bool]:
    ok = all(a["passed"] for a in assertions)
    report["assertions"] = assertions
    report["ok"] = ok
    return report, ok


def cmd_measure(args: argparse.Namespace) -> tuple[dict[str, Any], bool]:
    doc = load_document(args.input)
    metric = doc.metric()
    names = list(_FORMULATIONS) if args.formulation == "all" else [args.formulation]
    measures = {name: _FORMULATIONS[name](metric) for name in names}
    report: dict[str, Any] = {
        "command": "measure",
        "formulation": args.formulation,
        "graph": _graph_section(doc.graph),
        "measures": {name: measure_section(mu) for name, mu in measures.items()},
    }
    assertions = []
    h = graph_genus(doc.graph)
    first = measures[names[0]]
    if len(names) > 1:
        agree = all(
            measures[n].edge_coeffs == first.edge_coeffs for n in names[1:]
        )
        assertions.append(_assertion("formulations_agree", agree))
    assertions.append(
        _assertion(
            "edge_mass_equals_genus",
            first.edge_mass == h,
            edge_mass=exact_field(first.edge_mass),
            genus=h,
        )
    )
    oracle_ok = all(
        first.edge_coeffs[e]
        == 1 - effective_resistance(doc.graph, metric.lengths, e) / metric.lengths[e]
        for e in doc.graph.edge_ids
    )
    assertions.append(_assertion("resistance_oracle", oracle_ok))
    return _finish(report, assertions)


def cmd_trees(args: argparse.Namespace) -> tuple[dict[str, Any], bool]:
    doc = load_document(args.input)
    trees = spanning_trees(doc.graph)
    oracle = tree_count(doc.graph)
    report = {
        "command": "trees",
        "graph": _graph_section(doc.graph),
        "count": len(trees),
        "matrix_tree_count": oracle,
        "trees": [list(t.sorted_ids) for t in trees],
    }
    assertions = [_assertion("count_matches_matrix_tree", len(trees) == oracle)]
    return _finish(report, assertions)


def cmd_minors(args: argparse.Namespace) -> tuple[dict[str, Any], bool]:
    doc = load_document(args.input)
    layering = doc.require_layering()
    report_data = graded_minors(doc.graph, layering)
    basis = admissible_cycle_basis(doc.graph, layering)
    layered = layered_spanning_trees(doc.graph, layering)
    per_layer = []
    product = 1
    for j, minor in enumerate(report_data.minors):
        count = len(spanning_trees(minor))
        product *= count
        per_layer.append(
            {
                "layer": j,
                "edges": sorted(minor.edge_ids),
                "vertices": len(minor.vertices),
                "genus": report_data.genus_vector[j],
                "tree_count": count,
                "vertex_map": dict(sorted(report_data.vertex_maps[j].items())),
            }
        )
    report: dict[str, Any] = {
        "command": "minors",
        "graph": _graph_section(doc.graph),
        "layers": per_layer,
        "genus_vector": list(report_data.genus_vector),
        "layered_tree_count": len(layered),
        "admissible_basis": [
            [dict(sorted(c.coeffs.items())) for c in block] for block in basis.blocks
        ],
    }
    h = graph_genus(doc.graph)
    assertions = [
        _assertion(
            "genus_decomposition_sums",
            sum(report_data.genus_vector) == h,
            genus_vector=list(report_data.genus_vector),
            genus=h,
        ),
        _assertion(
            "layered_tree_count_matches_product",
            len(layered) == product,
            count=len(layered),
            product=product,
        ),
    ]
    if doc.lengths is not None:
        normalized = all(
            sum((doc.lengths[e] for e in part), Fraction(0)) == 1
            for part in layering.parts
        )
        if normalized:
            tropical = tropical_canonical_measure(doc.tropical())
            hybrid = hybrid_mass_profile(doc.tropical())
            report["tropical_measure"] = measure_section(tropical)
            assertions.append(
                _assertion(
                    "hybrid_total_mass_equals_total_genus",
                    hybrid.total_mass == total_genus(doc.graph),
                    total_mass=exact_field(hybrid.total_mass),
                    total_genus=total_genus(doc.graph),
                )
            )
    return _finish(report, assertions)


def cmd_limit(args: argparse.Namespace) -> tuple[dict[str, Any], bool]:
    doc = load_document(args.input)
    family = doc.length_family()
    grid = _parse_grid(args.grid, (1, 6))
    limits = all_tree_limits(family)
    dichotomy = all(
        limits[t.edge_ids] == layered_tree_weight(family, t)
        for t in spanning_trees(doc.graph)
    )
    foster = limit_foster(family, grid)
    h = graph_genus(doc.graph)
    report: dict[str, Any] = {
        "command": "limit",
        "graph": _graph_section(doc.graph),
        "grid": [exact_field(t) for t in grid],
        "targets": {e: exact_field(x) for e, x in sorted(foster.targets.items())},
        "trajectories": {
            e: [float_field(v) for v in vals]
            for e, vals in sorted(foster.trajectories.items())
        },
        "max_deviations": [float_field(d) for d in foster.max_deviations],
        "final_deviation": float_field(foster.final_deviation),
        "tree_limits": [
            {
                "tree": sorted(t),
                "limit": exact_field(limits[frozenset(t)]),
            }
            for t in sorted(tuple(sorted(k)) for k in limits)
        ],
    }
    assertions = [
        _assertion(
            "edge_mass_equals_genus_on_grid",
            all(mass == h for mass in foster.edge_masses),
            genus=h,
        ),
        _assertion("deviations_monotone", foster.monotone),
        _assertion("tree_weight_dichotomy", dichotomy),
    ]
    return _finish(report, assertions)


def _load_lambda0(path: str | None, monodromy, graph) -> np.ndarray:
    if path is None:
        vertex_blocks = {
            v: np.eye(graph.genus[v]) for v in graph.vertices if graph.genus[v] > 0
        }
        return assemble_base(monodromy, graph, vertex_blocks)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as err:
        raise DocumentError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise DocumentError(f"invalid JSON in {path}: {err}") from None
    if not isinstance(data, dict):
        raise DocumentError("base matrix document must be a JSON object")
    unknown = sorted(set(data) - {"vertex_blocks", "rank_block", "cross"})
    if unknown:
        raise DocumentError(f"unknown base matrix keys {unknown}")
    return assemble_base(
        monodromy,
        graph,
        {str(v): block for v, block in data.get("vertex_blocks", {}).items()},
        rank_block=data.get("rank_block"),
        cross=data.get("cross"),
    )


def cmd_periods(args: argparse.Namespace) -> tuple[dict[str, Any], bool]:
    doc = load_document(args.input)
    layering = doc.require_layering()
    if doc.target is None:
        raise FamilyError("period models need a target point in the document")
    r = len(layering.parts)
    if args.scales is None:
        exponents = [2 * (r - j) for j in range(r)]
    else:
        try:
            exponents = [int(tok) for tok in args.scales.split(",")]
        except ValueError:
            raise DocumentError("scales must be a comma list of integers") from None
        if len(exponents) != r or any(
            b >= a for a, b in zip(exponents, exponents[1:])
        ) or exponents[-1] <= 0:
            raise FamilyError(
                "need one strictly decreasing positive exponent per layer"
            )
    target = {e: Fraction(x) for e, x in doc.target.items()}
    param_lengths = {}
    for j, part in enumerate(layering.parts):
        for e in part:
            param_lengths[e] = ScaleFunction.power(-exponents[j], target[e])
    family = LengthFamily(
        graph=doc.graph,
        param_lengths=param_lengths,
        target_layering=layering,
        target_point=target,
    )
    basis = admissible_cycle_basis(doc.graph, layering)
    monodromy = monodromy_from_basis(doc.graph, basis)
    base = _load_lambda0(args.lambda0, monodromy, doc.graph)
    model = ModelPeriodFamily(monodromy=monodromy, lengths=family, base_im=base)
    grid = _parse_grid(args.grid, (1, 5))
    limits = graded_inverse_limits(model, grid)
    unit = {e: Fraction(1) for e in doc.graph.edge_ids}
    gram_ok = monodromy.assemble_gram(unit) == [
        list(row) for row in gram_matrices(MetricGraph(doc.graph, unit), monodromy.basis).matrix
    ]
    report: dict[str, Any] = {
        "command": "periods",
        "graph": _graph_section(doc.graph),
        "scales": [f"t^-{a}" for a in exponents],
        "block_sizes": list(limits.block_sizes),
        "monodromy": {
            e: [list(map(int, row)) for row in np.outer(rowv, rowv).astype(int)]
            for e, rowv in sorted(monodromy.edge_rows.items())
        },
        "layer_targets": [
            [[exact_field(x) for x in row] for row in target_k]
            for target_k in limits.layer_targets_exact
        ],
        "grid": [exact_field(t) for t in grid],
        "samples": [
            {
                "t": exact_field(s.t),
                "diag_deviations": [float_field(d) for d in s.diag_deviations],
                "offdiag_max": float_field(
                    max(s.offdiag_norms.values()) if s.offdiag_norms else 0.0
                ),
                "oracle_gap": float_field(s.oracle_gap),
                "condition": float_field(s.condition),
                "flagged": s.flagged,
            }
            for s in limits.samples
        ],
    }
    final = limits.final_deviations
    pad = monodromy.pad
    assertions = [
        _assertion("gram_consistency", gram_ok),
        _assertion(
            "oracle_agreement",
            max(s.oracle_gap for s in limits.samples) <= 1e-9,
        ),
        _assertion(
            "diagonal_limits",
            all(d <= 1e-6 for d in (final[:-1] if pad else final)),
            final_deviations=[float_field(d) for d in final],
        ),
    ]
    if pad:
        assertions.append(_assertion("pad_limit", final[-1] <= 1e-9))
    return _finish(report, assertions)


def _selftest_measures(rng: Random, cases: int) -> dict[str, Any]:
    agree = mass = oracle = scale = 0
    for _ in range(cases):
        g = corpus.random_graph(rng, max_vertices=6, max_edges=9)
        m = corpus.random_metric(rng, g)
        by_trees = foster_by_trees(m)
        if (
            by_trees.edge_coeffs == foster_by_projection(m).edge_coeffs
            and by_trees.edge_coeffs == foster_by_matrix(m).edge_coeffs
        ):
            agree += 1
        if by_trees.edge_mass == graph_genus(g):
            mass += 1
        if all(
            by_trees.edge_coeffs[e]
            == 1 - effective_resistance(g, m.lengths, e) / m.lengths[e]
            for e in g.edge_ids
        ):
            oracle += 1
        factor = corpus.random_rational(rng, 20, 20)
        if foster_by_trees(m.scaled(factor)).edge_coeffs == by_trees.edge_coeffs:
            scale += 1
    return {
        "cases": cases,
        "formulations_agree": agree,
        "mass_identity": mass,
        "resistance_oracle": oracle,
        "scale_invariance": scale,
        "passed": agree == mass == oracle == scale == cases,
    }


def _selftest_layerings(rng: Random, cases: int) -> dict[str, Any]:
    genus_ok = count_ok = dichotomy_ok = 0
    for _ in range(cases):
        g = corpus.random_graph(rng, max_vertices=5, max_edges=7)
        p = corpus.random_layering(rng, g)
        vector = graded_minors(g, p).genus_vector
        if sum(vector) == graph_genus(g):
            genus_ok += 1
        layered = layered_spanning_trees(g, p)
        product = 1
        for minor in graded_minors(g, p).minors:
            product *= len(spanning_trees(minor))
        if len(layered) == product:
            count_ok += 1
        family = corpus.layered_family(g, p, corpus.normalized_coordinates(rng, p))
        if all(
            all_tree_limits(family)[t.edge_ids] == layered_tree_weight(family, t)
            for t in spanning_trees(g)
        ):
            dichotomy_ok += 1
    return {
        "cases": cases,
        "genus_decomposition": genus_ok,
        "layered_tree_counts": count_ok,
        "tree_weight_dichotomy": dichotomy_ok,
        "passed": genus_ok == count_ok == dichotomy_ok == cases,
    }


def _selftest_limits() -> dict[str, Any]:
    grid = geometric_grid(1, 3)
    theta = limit_foster(gallery.theta_family(), grid)
    triangle = limit_foster(gallery.triangle_family(), grid)
    passed = (
        theta.monotone
        and triangle.monotone
        and theta.targets["e2"] == Fraction(1, 2)
        and triangle.targets["e1"] == 1
    )
    return {
        "theta_final_deviation": float_field(theta.final_deviation),
        "triangle_final_deviation": float_field(triangle.final_deviation),
        "passed": passed,
    }


def _selftest_periods(seed: int) -> dict[str, Any]:
    model = gallery.theta_period_family()
    limits = graded_inverse_limits(model, geometric_grid(1, 4))
    gen = np.random.default_rng(seed + 1)
    profile = corpus.random_block_profile(gen, n_blocks=3)
    lemma = verify_inverse_lemma(profile, NoiseSpec(seed=seed), geometric_grid(1, 4))
    passed = (
        max(s.oracle_gap for s in limits.samples) <= 1e-9
        and all(d <= 1e-4 for d in limits.final_deviations)
        and lemma.max_oracle_gap <= 1e-9
        and all(d <= 1e-6 for d in lemma.final_diag_deviations)
    )
    return {
        "model_final_deviations": [float_field(d) for d in limits.final_deviations],
        "lemma_final_deviations": [float_field(d) for d in lemma.final_diag_deviations],
        "max_oracle_gap": float_field(
            max(lemma.max_oracle_gap, max(s.oracle_gap for s in limits.samples))
        ),
        "passed": passed,
    }


def cmd_selftest(args: argparse.Namespace) -> tuple[dict[str, Any], bool]:
    rng = Random(args.seed)
    sections = {
        "measures": _selftest_measures(rng, cases=10),
        "layerings": _selftest_layerings(rng, cases=10),
        "limits": _selftest_limits(),
        "periods": _selftest_periods(args.seed),
    }
    report: dict[str, Any] = {"command": "selftest", "seed": args.seed}
    report.update(sections)
    assertions = [
        _assertion(name, section["passed"]) for name, section in sections.items()
    ]
    return _finish(report, assertions)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canmeas",
        description="canonical measures on layered metric graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, needs_input: bool = True):
        p = sub.add_parser(name, help=help_text)
        if needs_input:
            p.add_argument("--input", required=True, help="path to a graph document")
        p.add_argument(
            "--json", action="store_true", help="JSON report (the default)"
        )
        p.add_argument(
            "--table", action="store_true", help="plain text table instead of JSON"
        )
        p.set_defaults(func=func)
        return p

    p = add("measure", cmd_measure, "canonical measure of a metric graph")
    p.add_argument(
        "--formulation",
        choices=["trees", "projection", "matrix", "all"],
        default="all",
    )
    add("trees", cmd_trees, "spanning trees and the matrix-tree cross-check")
    add("minors", cmd_minors, "graded minors, layered trees, admissible basis")
    p = add("limit", cmd_limit, "measure limits of a degenerating family")
    p.add_argument("--grid", help="'1e-1..1e-6' or comma list of rationals")
    p = add("periods", cmd_periods, "block limits of the model period matrix")
    p.add_argument("--grid", help="'1e-1..1e-5' or comma list of rationals")
    p.add_argument("--scales", help="comma list of layer scale exponents")
    p.add_argument("--lambda0", help="JSON file with base matrix blocks")
    p = add("selftest", cmd_selftest, "seeded randomized self checks", needs_input=False)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, ok = args.func(args)
    except DocumentError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except CanmeasError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    text = render_table(report) if args.table else dump_report(report)
    sys.stdout.write(text)
    return 0 if ok else 4


if __name__ == "__main__":
    sys.exit(main())
