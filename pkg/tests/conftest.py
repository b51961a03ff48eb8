from __future__ import annotations

import random
from pathlib import Path

import pytest

from datascaffold.dataset import Dataset, ingest

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "datascaffold" / "fixtures"
DATA_DIR = FIXTURES / "data"
LLM_DIR = FIXTURES / "llm"
SCAFFOLDS_DIR = FIXTURES / "scaffolds"
SNAPSHOT_DIR = Path(__file__).resolve().parent / "snapshots"


def load_dataset(name: str) -> Dataset:
    return ingest((DATA_DIR / f"{name}.csv").read_bytes(), "csv")


@pytest.fixture(scope="session")
def cars() -> Dataset:
    return load_dataset("cars")


@pytest.fixture(scope="session")
def stocks() -> Dataset:
    return load_dataset("stocks")


@pytest.fixture(scope="session")
def wheat() -> Dataset:
    return load_dataset("wheat")


@pytest.fixture(scope="session")
def barley() -> Dataset:
    return load_dataset("barley")


@pytest.fixture(scope="session")
def fertility() -> Dataset:
    return load_dataset("fertility")


@pytest.fixture(scope="session")
def unemployment() -> Dataset:
    return load_dataset("unemployment")


@pytest.fixture(scope="session")
def generic() -> Dataset:
    return load_dataset("generic")


def synthetic_csv(rows: int = 200, seed: int = 1234) -> bytes:
    """Null-bearing mixed-measure table for the oracle-equivalence suites."""
    rng = random.Random(seed)
    categories = ["alpha", "beta", "gamma", "delta", "epsilon"]
    lines = ["amount,score,when,year,label"]
    for _ in range(rows):
        amount = "" if rng.random() < 0.12 else str(rng.choice(
            [0, 1, 5, 10, 42, 50, 99, 250, rng.randint(-20, 120)]
        ))
        score = "" if rng.random() < 0.1 else str(round(rng.uniform(-10, 110), 2))
        when = "" if rng.random() < 0.15 else (
            f"{rng.randint(2001, 2015):04d}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        )
        year = "" if rng.random() < 0.1 else str(rng.randint(1999, 2016))
        label = "" if rng.random() < 0.08 else rng.choice(categories)
        lines.append(f"{amount},{score},{when},{year},{label}")
    return "\n".join(lines).encode("utf-8")


@pytest.fixture(scope="session")
def synthetic() -> Dataset:
    return ingest(synthetic_csv(), "csv")
