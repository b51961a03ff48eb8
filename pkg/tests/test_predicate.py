import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datascaffold.diagnostics import DiagnosticCode
from datascaffold.errors import (
    MissingFieldError,
    MissingOperatorError,
    MultipleOperatorsError,
    PredicateSyntaxError,
    UnknownFieldError,
    UnknownOperatorError,
)
from datascaffold.predicate import (
    And,
    Leaf,
    Not,
    Or,
    canonical_json,
    evaluate,
    parse_predicate,
    parse_predicate_obj,
    referenced_fields,
    select,
    typecheck,
)

from oracles import naive_evaluate, naive_select
from predgen import random_predicate

FIG4_SOURCE = (
    '{"and":[{"field":"symbol","equal":"AAPL"},{"field":"price","gte":150},'
    '{"field":"date","range":["2008-08-31","2012-12-31"]}]}'
)
TEASER_SOURCE = (
    '{"and":[{"field":"Miles_per_Gallon","gte":25},{"field":"Origin","equal":"Japan"}]}'
)


class TestParse:
    def test_three_leaf_conjunction(self):
        p = parse_predicate(FIG4_SOURCE)
        assert isinstance(p, And)
        assert len(p.items) == 3
        assert all(isinstance(leaf, Leaf) for leaf in p.items)
        assert p.items[0] == Leaf("symbol", "equal", "AAPL")

    def test_single_leaf(self):
        p = parse_predicate('{"field":"Origin","equal":"Japan"}')
        assert p == Leaf("Origin", "equal", "Japan")

    def test_missing_operator(self):
        with pytest.raises(MissingOperatorError):
            parse_predicate('{"field":"price"}')

    def test_missing_field(self):
        with pytest.raises(MissingFieldError):
            parse_predicate('{"equal": 1}')

    def test_multiple_operators(self):
        with pytest.raises(MultipleOperatorsError):
            parse_predicate('{"field":"price","equal":1,"lt":2}')

    def test_unknown_key_rejected(self):
        with pytest.raises(UnknownOperatorError):
            parse_predicate('{"field":"price","gte":1,"bogus":2}')

    def test_unknown_key_on_composition(self):
        with pytest.raises(UnknownOperatorError):
            parse_predicate('{"and":[],"extra":1}')

    def test_bad_json(self):
        with pytest.raises(PredicateSyntaxError):
            parse_predicate("{nope")

    def test_range_must_have_two_bounds(self):
        with pytest.raises(PredicateSyntaxError):
            parse_predicate('{"field":"a","range":[1,2,3]}')

    def test_valid_takes_boolean(self):
        with pytest.raises(PredicateSyntaxError):
            parse_predicate('{"field":"a","valid":"yes"}')

    def test_empty_compositions(self):
        assert parse_predicate('{"and":[]}') == And(())
        assert parse_predicate('{"or":[]}') == Or(())


class TestCanonicalJson:
    def test_leaf(self):
        assert (
            canonical_json(Leaf("Origin", "equal", "Japan"))
            == '{"field":"Origin","equal":"Japan"}'
        )

    def test_reference_predicate_stable(self):
        once = canonical_json(parse_predicate(FIG4_SOURCE))
        twice = canonical_json(parse_predicate(once))
        assert once == twice == FIG4_SOURCE

    def test_empty_and(self):
        assert canonical_json(And(())) == '{"and":[]}'

    def test_int_literals_stay_ints(self):
        assert canonical_json(Leaf("price", "gte", 150)) == '{"field":"price","gte":150}'
        assert (
            canonical_json(Leaf("price", "gte", 150.5)) == '{"field":"price","gte":150.5}'
        )


class TestTypecheck:
    def test_reference_predicate_is_clean(self, stocks):
        assert typecheck(parse_predicate(FIG4_SOURCE), stocks.fields) == []

    def test_inverted_range_is_malformed(self, fertility):
        p = parse_predicate('{"field":"fertility","range":[2000,3]}')
        diags = typecheck(p, fertility.fields)
        assert [d.code for d in diags] == [DiagnosticCode.MALFORMED_RANGE]
        assert "2000" in diags[0].message and "fertility" in diags[0].message

    def test_misspelled_field(self, cars):
        p = parse_predicate('{"field":"Horsepowerr","gte":100}')
        diags = typecheck(p, cars.fields)
        assert [d.code for d in diags] == [DiagnosticCode.UNKNOWN_FIELD]
        assert "Horsepowerr" in diags[0].message

    def test_ordering_on_nominal_is_mismatch(self, cars):
        p = parse_predicate('{"field":"Origin","lt":"Japan"}')
        assert [d.code for d in typecheck(p, cars.fields)] == [
            DiagnosticCode.TYPE_MISMATCH
        ]

    def test_text_on_quantitative_is_mismatch(self, cars):
        p = parse_predicate('{"field":"Horsepower","equal":"fast"}')
        assert [d.code for d in typecheck(p, cars.fields)] == [
            DiagnosticCode.TYPE_MISMATCH
        ]

    def test_unparseable_temporal_literal_is_mismatch(self, stocks):
        p = parse_predicate('{"field":"date","gte":"whenever"}')
        assert [d.code for d in typecheck(p, stocks.fields)] == [
            DiagnosticCode.TYPE_MISMATCH
        ]

    def test_temporal_range_order_checked_after_parsing(self, stocks):
        p = parse_predicate('{"field":"date","range":["2012-12-31","2008-08-31"]}')
        assert [d.code for d in typecheck(p, stocks.fields)] == [
            DiagnosticCode.MALFORMED_RANGE
        ]


class TestEvaluate:
    def test_teaser_true(self):
        p = parse_predicate(TEASER_SOURCE)
        assert evaluate(p, {"Miles_per_Gallon": 30.0, "Origin": "Japan"}) is True

    def test_teaser_false_below_threshold(self):
        p = parse_predicate(TEASER_SOURCE)
        assert evaluate(p, {"Miles_per_Gallon": 20.0, "Origin": "Japan"}) is False

    def test_empty_and_is_true(self):
        assert evaluate(And(()), {"x": 1.0}) is True

    def test_empty_or_is_false(self):
        assert evaluate(Or(()), {"x": 1.0}) is False

    def test_null_comparisons_false(self):
        assert evaluate(Leaf("x", "gte", 1), {"x": None}) is False
        assert evaluate(Leaf("x", "equal", "a"), {"x": None}) is False

    def test_valid_operator(self):
        assert evaluate(Leaf("x", "valid", True), {"x": 1.0}) is True
        assert evaluate(Leaf("x", "valid", False), {"x": None}) is True
        assert evaluate(Leaf("x", "valid", False), {"x": 1.0}) is False

    def test_range_inclusive_both_ends(self):
        p = Leaf("x", "range", (1, 3))
        assert evaluate(p, {"x": 1.0}) and evaluate(p, {"x": 3.0})
        assert not evaluate(p, {"x": 0.999}) and not evaluate(p, {"x": 3.001})

    def test_unknown_field_reads_null(self):
        assert evaluate(Leaf("nope", "gte", 1), {"x": 1.0}) is False
        assert evaluate(Leaf("nope", "valid", False), {"x": 1.0}) is True


class TestSelect:
    def test_teaser_over_cars(self, cars):
        p = parse_predicate(TEASER_SOURCE)
        selection = select(p, cars)
        oracle = naive_select(json.loads(TEASER_SOURCE), cars.records)
        assert list(selection.row_indices) == oracle
        assert 0 < selection.count < cars.row_count

    def test_inverted_range_selects_nothing(self, fertility):
        p = parse_predicate('{"field":"fertility","range":[2000,3]}')
        assert select(p, fertility).count == 0

    def test_empty_or_selects_nothing(self, cars):
        assert select(Or(()), cars).count == 0

    def test_strict_rejects_unknown_fields(self, cars):
        with pytest.raises(UnknownFieldError):
            select(Leaf("nope", "gte", 1), cars, strict=True)

    def test_indices_ascending(self, synthetic):
        p = parse_predicate('{"field":"amount","gte":10}')
        indices = select(p, synthetic).row_indices
        assert list(indices) == sorted(indices)


class TestReferencedFields:
    def test_teaser(self):
        p = parse_predicate(TEASER_SOURCE)
        assert referenced_fields(p) == {"Miles_per_Gallon", "Origin"}

    def test_single_leaf(self):
        assert referenced_fields(Leaf("a", "gte", 1)) == {"a"}

    def test_empty_and(self):
        assert referenced_fields(And(())) == set()


# --- property tests ----------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_oracle_equivalence(synthetic, seed):
    rng = random.Random(seed)
    pred_json = random_predicate(rng)
    p = parse_predicate_obj(pred_json)
    for record in synthetic.records[:40]:
        assert evaluate(p, record) == naive_evaluate(pred_json, record)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_de_morgan(synthetic, seed):
    rng = random.Random(seed)
    a = parse_predicate_obj(random_predicate(rng, max_depth=2))
    b = parse_predicate_obj(random_predicate(rng, max_depth=2))
    lhs = Not(And((a, b)))
    rhs = Or((Not(a), Not(b)))
    for record in synthetic.records[:25]:
        assert evaluate(lhs, record) == evaluate(rhs, record)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_parse_canonical_roundtrip(seed):
    rng = random.Random(seed)
    p = parse_predicate_obj(random_predicate(rng))
    assert parse_predicate(canonical_json(p)) == p


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_monotonicity(synthetic, seed):
    rng = random.Random(seed)
    p = parse_predicate_obj(random_predicate(rng, max_depth=2))
    q = parse_predicate_obj(random_predicate(rng, max_depth=2))
    both = set(select(And((p, q)), synthetic).row_indices)
    just_p = set(select(p, synthetic).row_indices)
    either = set(select(Or((p, q)), synthetic).row_indices)
    assert both <= just_p <= either
