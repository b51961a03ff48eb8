import json

import pytest

from datascaffold.dataset import ingest
from datascaffold.diagnostics import DiagnosticCode
from datascaffold.errors import InvalidScaffoldError, UnknownFieldError
from datascaffold.gateway import GenerationConfig, MockBackendConfig, Task, generate_validated
from datascaffold.predicate import And, Leaf, Not, Or, parse_predicate, select
from datascaffold.scaffold import ScaffoldSet, SemanticScaffold
from datascaffold.structure import (
    build_structure,
    from_json,
    render_outline,
    render_predicate_text,
    structure_to_jsonable,
    to_json,
)

from oracles import naive_select


@pytest.fixture(scope="module")
def cars_highlights(cars):
    scaffold_set, diags, _ = generate_validated(
        cars, Task.highlights(), GenerationConfig(backend=MockBackendConfig("cars-highlights"))
    )
    assert diags == []
    return scaffold_set


@pytest.fixture(scope="module")
def cars_mpg_bins(cars):
    scaffold_set, diags, _ = generate_validated(
        cars,
        Task.bins("Miles_per_Gallon"),
        GenerationConfig(backend=MockBackendConfig("cars-mpg-bins")),
    )
    assert diags == []
    return scaffold_set


@pytest.fixture(scope="module")
def cars_tree(cars, cars_highlights, cars_mpg_bins):
    return build_structure(
        cars, bins={"Miles_per_Gallon": cars_mpg_bins}, highlights=cars_highlights
    )


def walk(node):
    yield node
    for child in node.children:
        yield from walk(child)


class TestRenderPredicateText:
    def test_teaser(self):
        p = parse_predicate(
            '{"and":[{"field":"Miles_per_Gallon","gte":25},{"field":"Origin","equal":"Japan"}]}'
        )
        assert render_predicate_text(p) == (
            "Miles_per_Gallon is at least 25 and Origin is Japan"
        )

    def test_reference_conjunction(self):
        p = parse_predicate(
            '{"and":[{"field":"symbol","equal":"AAPL"},{"field":"price","gte":150},'
            '{"field":"date","range":["2008-08-31","2012-12-31"]}]}'
        )
        assert render_predicate_text(p) == (
            "symbol is AAPL and price is at least 150 and "
            "date is between 2008-08-31 and 2012-12-31"
        )

    def test_empty_compositions(self):
        assert render_predicate_text(And(())) == "all records"
        assert render_predicate_text(Or(())) == "no records"

    def test_leaf_templates(self):
        assert render_predicate_text(Leaf("a", "lt", 5)) == "a is less than 5"
        assert render_predicate_text(Leaf("a", "lte", 5)) == "a is at most 5"
        assert render_predicate_text(Leaf("a", "gt", 5)) == "a is more than 5"
        assert render_predicate_text(Leaf("a", "oneOf", ("x", "y"))) == "a is one of x, y"
        assert render_predicate_text(Leaf("a", "valid", True)) == "a has a value"
        assert render_predicate_text(Leaf("a", "valid", False)) == "a is missing"

    def test_mixed_nesting_parenthesized(self):
        p = Or((And((Leaf("a", "gte", 1), Leaf("b", "equal", "x"))), Leaf("c", "lt", 2)))
        assert render_predicate_text(p) == "(a is at least 1 and b is x) or c is less than 2"

    def test_not_wraps_compositions_only(self):
        assert render_predicate_text(Not(Leaf("a", "equal", "x"))) == "not a is x"
        p = Not(And((Leaf("a", "gte", 1), Leaf("b", "lt", 2))))
        assert render_predicate_text(p) == "not (a is at least 1 and b is less than 2)"


class TestBuildStructure:
    def test_root_shape(self, cars, cars_tree):
        assert cars_tree.kind == "root"
        assert cars_tree.description == (
            "Dataset with 128 records and 3 fields: "
            "Horsepower, Miles_per_Gallon, Origin."
        )
        kinds = [c.kind for c in cars_tree.children]
        assert kinds == ["highlightList", "field", "field", "field"]
        assert [c.label for c in cars_tree.children[1:]] == [
            "Horsepower",
            "Miles_per_Gallon",
            "Origin",
        ]

    def test_highlight_labels(self, cars_tree):
        highlight_list = cars_tree.children[0]
        assert [h.label for h in highlight_list.children] == [
            "Fuel Efficient Japanese Cars",
            "High Horsepower American Muscle",
            "Low Horsepower European Cars",
        ]

    def test_highlight_description_format(self, cars, cars_tree):
        node = cars_tree.children[0].children[0]
        assert node.description.endswith(
            "35 of 128 records. Criteria: Miles_per_Gallon is at least 25 "
            "and Origin is Japan."
        )
        assert node.description.startswith("This group represents cars from Japan")

    def test_selection_counts_match_oracle(self, cars, cars_tree):
        from datascaffold.predicate import to_jsonable

        for node in walk(cars_tree):
            if node.predicate is None:
                continue
            oracle = naive_select(to_jsonable(node.predicate), cars.records)
            assert node.selection_count == len(oracle)

    def test_ids_unique(self, cars_tree):
        ids = [n.id for n in walk(cars_tree)]
        assert len(ids) == len(set(ids))

    def test_depth_at_most_four_levels(self, cars_tree):
        def depth(node):
            return 1 if not node.children else 1 + max(depth(c) for c in node.children)

        assert depth(cars_tree) <= 4

    def test_semantic_bins_used_for_mpg(self, cars_tree):
        mpg = next(c for c in cars_tree.children if c.label == "Miles_per_Gallon")
        labels = [b.label for b in mpg.children]
        assert labels[:3] == ["Gas Guzzlers", "Average Economy", "Fuel Sippers"]
        assert labels[-1] == "Missing values"

    def test_partition_consistency_semantic(self, cars, cars_tree):
        mpg = next(c for c in cars_tree.children if c.label == "Miles_per_Gallon")
        assert sum(b.selection_count for b in mpg.children) == cars.row_count

    def test_partition_consistency_fallback(self, cars, cars_tree):
        hp = next(c for c in cars_tree.children if c.label == "Horsepower")
        assert sum(b.selection_count for b in hp.children) == cars.row_count
        assert len(hp.children) == 10  # no nulls, no missing bin

    def test_partition_consistency_nominal(self, cars, cars_tree):
        origin = next(c for c in cars_tree.children if c.label == "Origin")
        assert [b.label for b in origin.children] == ["Japan", "USA", "Europe"]
        assert sum(b.selection_count for b in origin.children) == cars.row_count

    def test_record_pages_paginated_at_20(self, cars_tree):
        highlight = cars_tree.children[0].children[0]  # 35 records
        assert [p.selection_count for p in highlight.children] == [20, 15]
        assert [p.kind for p in highlight.children] == ["recordPage", "recordPage"]

    def test_fallback_only_tree(self, cars):
        root = build_structure(cars)
        assert root.children[0].children == ()
        mpg = next(c for c in root.children if c.label == "Miles_per_Gallon")
        assert len(mpg.children) == 11  # 10 equal-width bins + missing values

    def test_unvalidated_scaffold_rejected(self, cars):
        bad = ScaffoldSet(
            kind="highlights",
            groups=(
                SemanticScaffold("broken", "references a typo field",
                                 parse_predicate('{"field":"Horsepowerr","gte":1}')),
            ),
        )
        with pytest.raises(InvalidScaffoldError):
            build_structure(cars, highlights=bad)

    def test_unknown_bin_field_rejected(self, cars, cars_mpg_bins):
        with pytest.raises(UnknownFieldError):
            build_structure(cars, bins={"nope": cars_mpg_bins})

    def test_warnings_attach_to_nodes(self, unemployment):
        scaffold_set, diags, _ = generate_validated(
            unemployment,
            Task.highlights(),
            GenerationConfig(backend=MockBackendConfig("unemployment-covid")),
        )
        assert [d.code for d in diags] == [DiagnosticCode.TEMPORAL_OUT_OF_SCOPE]
        root = build_structure(unemployment, highlights=scaffold_set)
        node = root.children[0].children[0]
        assert [d.code for d in node.diagnostics] == [
            DiagnosticCode.TEMPORAL_OUT_OF_SCOPE
        ]


class TestRenderOutline:
    def test_depth_one_is_exactly_the_root_line(self, cars_tree):
        outline = render_outline(cars_tree, 1)
        assert len(outline.splitlines()) == 1
        assert outline.startswith("Dataset — Dataset with 128 records")
        assert "more level" in outline

    def test_full_depth_has_no_marker(self, cars_tree):
        outline = render_outline(cars_tree, 10)
        assert "more level" not in outline
        assert len(outline.splitlines()) == len(list(walk(cars_tree)))

    def test_byte_stable_across_builds(self, cars, cars_highlights, cars_mpg_bins):
        trees = [
            build_structure(
                cars, bins={"Miles_per_Gallon": cars_mpg_bins}, highlights=cars_highlights
            )
            for _ in range(2)
        ]
        assert render_outline(trees[0], 3) == render_outline(trees[1], 3)

    def test_indentation_is_two_spaces_per_level(self, cars_tree):
        lines = render_outline(cars_tree, 3).splitlines()
        assert lines[1].startswith("  Highlights — ")
        assert lines[2].startswith("    Fuel Efficient Japanese Cars — ")


class TestStructureJson:
    def test_roundtrip(self, cars_tree):
        assert from_json(to_json(cars_tree)) == cars_tree

    def test_fixed_key_order(self, cars_tree):
        obj = json.loads(to_json(cars_tree))
        assert list(obj.keys()) == [
            "id", "kind", "label", "description", "predicate",
            "selectionCount", "diagnostics", "children",
        ]

    def test_empty_diagnostics_serialized(self, cars_tree):
        text = to_json(cars_tree)
        assert '"diagnostics":[]' in text

    def test_leaf_node_shape(self):
        d = ingest(b"v\n1\n2", "csv")
        root = build_structure(d)
        page = root.children[1].children[0].children[0]
        obj = structure_to_jsonable(page)
        assert obj["children"] == []
        assert obj["predicate"] is None
        assert obj["kind"] == "recordPage"

    def test_byte_identical_rebuilds(self, cars, cars_highlights, cars_mpg_bins):
        payloads = [
            to_json(
                build_structure(
                    cars,
                    bins={"Miles_per_Gallon": cars_mpg_bins},
                    highlights=cars_highlights,
                )
            )
            for _ in range(2)
        ]
        assert payloads[0] == payloads[1]
