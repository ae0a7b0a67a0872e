"""Fixtures for ntypes tests."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from ntypes.config import Budget
from ntypes.corpus import circle
from ntypes.corpus import cyclic_nerve
from ntypes.corpus import point
from ntypes.corpus import two_points
from ntypes.scomplex import SSet
from ntypes.sgpd import ConstantSGpd
from ntypes.sgpd import FiniteGroupoid
from ntypes.site import FiniteCat


@pytest.fixture
def delta0() -> SSet:
    """Return the standard 0-simplex."""
    return point()


@pytest.fixture
def s1() -> SSet:
    """Return the one-edge circle."""
    return circle()


@pytest.fixture
def d0_plus_d0() -> SSet:
    """Return two disjoint points."""
    return two_points()


@pytest.fixture
def nerve_z2() -> SSet:
    """Return the 4-skeleton of the nerve of Z/2."""
    return cyclic_nerve(2)


@pytest.fixture
def z2() -> FiniteGroupoid:
    """Return Z/2 as a one-object groupoid."""
    return FiniteGroupoid.cyclic(2)


@pytest.fixture
def const_z2(z2: FiniteGroupoid) -> ConstantSGpd:
    """Return the constant simplicial groupoid on Z/2."""
    return ConstantSGpd(z2)


@pytest.fixture
def site_single() -> FiniteCat:
    """Return the one-object site."""
    return FiniteCat.single()


@pytest.fixture
def site_arrow() -> FiniteCat:
    """Return the site V -> U."""
    return FiniteCat.arrow()


@pytest.fixture
def small_budget() -> Budget:
    """Return a budget with a tight node limit."""
    return Budget(search_nodes=50)


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    """Return a helper that writes a JSON record under tmp_path."""

    def write(name: str, data: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
