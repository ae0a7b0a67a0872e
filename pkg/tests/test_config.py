"""Tests for budgets, file formats and the corpus."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from ntypes.config import Budget
from ntypes.config import resolve
from ntypes.corpus import FIBRATIONS
from ntypes.corpus import corpus_fibration
from ntypes.corpus import corpus_groupoid
from ntypes.corpus import corpus_object
from ntypes.exceptions import DimBudgetExceeded
from ntypes.exceptions import MalformedSpec
from ntypes.exceptions import UnknownObject
from ntypes.formats import file_digest
from ntypes.formats import parse_arrow
from ntypes.formats import read_json


def test_budget_defaults() -> None:
    """Test the default budget."""
    assert resolve(None) == Budget()
    assert Budget().as_dict() == {
        "dim_bound": 6,
        "search_nodes": 200000,
        "coset_limit": 4000,
        "hom_order": 6,
        "word_length": 2,
    }


def test_budget_overrides() -> None:
    """Test partial overrides and their validation."""
    budget = Budget.from_mapping({"dim_bound": 3})
    assert budget.dim_bound == 3
    assert budget.search_nodes == Budget().search_nodes
    with pytest.raises(MalformedSpec):
        Budget.from_mapping({"dim_bound": 0})
    with pytest.raises(MalformedSpec):
        Budget.from_mapping({"depth": 2})


def test_check_dim() -> None:
    """Test the dimension bound."""
    Budget(dim_bound=3).check_dim(3)
    with pytest.raises(DimBudgetExceeded) as err:
        Budget(dim_bound=3).check_dim(4)
    assert (err.value.requested, err.value.bound) == (4, 3)


def test_parse_arrow() -> None:
    """Test arrow declarations."""
    assert parse_arrow("V -> U") == ("V", "U")
    with pytest.raises(MalformedSpec):
        parse_arrow("V U")


def test_read_json(tmp_path: Path, write_json: Callable[[str, Any], Path]) -> None:
    """Test reading records and their digests."""
    path = write_json("x.json", {"name": "x"})
    assert read_json(path) == {"name": "x"}
    assert file_digest(path).startswith("sha256:")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(MalformedSpec):
        read_json(broken)


@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_corpus_maps_are_simplicial(name: str) -> None:
    """Test that every corpus map respects faces."""
    f = corpus_fibration(name)
    assert f.validate() is f


def test_corpus_lookup() -> None:
    """Test corpus names."""
    assert corpus_object("S1").cell_counts() == [1, 1]
    assert corpus_groupoid("V4").name == "V4"
    with pytest.raises(UnknownObject):
        corpus_object("torus")
