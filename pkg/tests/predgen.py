"""Seeded random generator of grammar-valid predicates over the synthetic schema.

Used by the hypothesis property tests and by the bulk oracle-equivalence run;
the generator produces JSON dicts so both the real parser and the naive
interpreter consume the exact same source.
"""

from __future__ import annotations

import random

# (field, measure) pairs match tests' synthetic dataset; "ghost" exercises
# the unknown-field-reads-null rule.
FIELDS = [
    ("amount", "quantitative"),
    ("score", "quantitative"),
    ("when", "temporal"),
    ("year", "temporal"),
    ("label", "nominal"),
    ("ghost", "unknown"),
]

_CATEGORIES = ["alpha", "beta", "gamma", "delta", "epsilon"]
_DATES = ["2001-03-15", "2005-06-15", "2008-08-31", "2012-12-31", "2015-01-01"]
_YEARS = ["2001", "2005", "2008", "2015"]
_GARBAGE = ["not-a-date", "abc", "", "99x"]

OPERATORS = ("equal", "lt", "lte", "gt", "gte", "range", "oneOf", "valid")


def _literal(rng: random.Random, measure: str):
    roll = rng.random()
    if measure == "quantitative":
        if roll < 0.75:
            return rng.choice([0, 1, 5, 10, 42, 50, 99, -3, 250, 2008])
        if roll < 0.85:
            return round(rng.uniform(-10, 110), 2)
        return rng.choice(_GARBAGE + _DATES)
    if measure == "temporal":
        if roll < 0.5:
            return rng.choice(_DATES)
        if roll < 0.7:
            return rng.choice(_YEARS)
        if roll < 0.85:
            return rng.choice([2001, 2008, 2015, 1999])
        return rng.choice(_GARBAGE + [123.45, 50])
    # nominal / unknown
    if roll < 0.7:
        return rng.choice(_CATEGORIES)
    if roll < 0.85:
        return rng.choice(["ghost-category", "Alpha", "ALPHA"])
    return rng.choice([0, 42, "abc"])


def random_leaf(rng: random.Random) -> dict:
    field, measure = rng.choice(FIELDS)
    op = rng.choice(OPERATORS)
    if op == "valid":
        return {"field": field, "valid": rng.random() < 0.5}
    if op == "range":
        a, b = _literal(rng, measure), _literal(rng, measure)
        return {"field": field, "range": [a, b]}
    if op == "oneOf":
        n = rng.randint(1, 4)
        return {"field": field, "oneOf": [_literal(rng, measure) for _ in range(n)]}
    return {"field": field, op: _literal(rng, measure)}


def random_predicate(rng: random.Random, depth: int = 0, max_depth: int = 3) -> dict:
    if depth >= max_depth or rng.random() < 0.55:
        return random_leaf(rng)
    kind = rng.choice(["and", "or", "not"])
    if kind == "not":
        return {"not": random_predicate(rng, depth + 1, max_depth)}
    size = rng.choice([0, 1, 2, 2, 3])
    return {kind: [random_predicate(rng, depth + 1, max_depth) for _ in range(size)]}
