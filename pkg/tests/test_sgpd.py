"""Tests for groupoids, loop groupoids and their realizations."""

from __future__ import annotations

import asyncio
from typing import Any

import pytest

from ntypes.config import Budget
from ntypes.const import VERDICT_CERTIFIED
from ntypes.const import VERDICT_UNKNOWN
from ntypes.corpus import corpus_groupoid
from ntypes.corpus import corpus_object
from ntypes.exceptions import DimBudgetExceeded
from ntypes.exceptions import MalformedSpec
from ntypes.exceptions import NotFibrant
from ntypes.exceptions import UnknownObject
from ntypes.pi import EquivalenceVerdict
from ntypes.scomplex import SimplexRef
from ntypes.scomplex import SMap
from ntypes.scomplex import SSet
from ntypes.scomplex import boundary
from ntypes.scomplex import standard
from ntypes.sgpd import ConstantSGpd
from ntypes.sgpd import FiniteGroupoid
from ntypes.sgpd import GroupoidFunctor
from ntypes.sgpd import adjunction_bijection
from ntypes.sgpd import build_groupoid
from ntypes.sgpd import diag_nerve
from ntypes.sgpd import hom_space
from ntypes.sgpd import loop_functors
from ntypes.sgpd import loop_groupoid
from ntypes.sgpd import morphism_pullback_check
from ntypes.sgpd import nerve
from ntypes.sgpd import nerve_map
from ntypes.sgpd import postnikov_gpd
from ntypes.sgpd import roundtrip_check
from ntypes.sgpd import shift_check
from ntypes.sgpd import transpose_left
from ntypes.sgpd import transpose_right
from ntypes.sgpd import truncation_check
from ntypes.sgpd import unit_check
from ntypes.sgpd import unit_map
from ntypes.sgpd import wbar
from ntypes.truncate import postnikov


def test_wbar_of_constant_group_is_nerve(const_z2: ConstantSGpd, z2: FiniteGroupoid) -> None:
    """Test that W of a constant group is its nerve."""
    obj = wbar(const_z2, 3)
    assert [len(obj.simplices(n)) for n in range(4)] == [1, 2, 4, 8]
    assert obj == nerve(z2, 3)
    assert diag_nerve(const_z2, 3) == obj


def test_nerve_name(z2: FiniteGroupoid) -> None:
    """Test the display name of a nerve."""
    assert nerve(z2, 2).name == "N(Z2)"


def test_nerve_map_of_quotient() -> None:
    """Test the nerve of Z/4 -> Z/2."""
    z4, z2 = FiniteGroupoid.cyclic(4), FiniteGroupoid.cyclic(2)
    functor = GroupoidFunctor(z4, z2, {"*": "*"}, {"e": "e", "g": "g", "g2": "e", "g3": "g"})
    f = nerve_map(functor, 2)
    assert f.validate() is f


def test_group_table_must_be_a_group() -> None:
    """Test that tables without inverses or of the wrong shape are refused."""
    with pytest.raises(MalformedSpec):
        FiniteGroupoid.from_group("bad", ["a", "b"], [["a", "b"], ["b", "b"]])
    with pytest.raises(MalformedSpec):
        FiniteGroupoid.from_group("bad", ["a", "b"], [["a", "b"]])


def test_build_groupoid_from_presentation() -> None:
    """Test that a presented finite group is enumerated."""
    gpd = build_groupoid({"name": "Z3", "presentation": "gens: g; rels: g g g;"})
    assert len(gpd.arrows("*", "*")[0]) == 3


def test_build_groupoid_from_table() -> None:
    """Test the explicit arrow-table form."""
    gpd = build_groupoid(
        {
            "name": "pair",
            "objects": ["x", "y"],
            "arrows": {"1x": "x -> x", "1y": "y -> y"},
            "identities": {"x": "1x", "y": "1y"},
            "compose": {"1x 1x": "1x", "1y 1y": "1y"},
        }
    )
    assert gpd.arrows("x", "y")[0] == []


def test_loop_groupoid_generators(delta0: SSet, s1: SSet) -> None:
    """Test that generators skip s_0-degenerate simplices."""
    assert loop_groupoid(delta0).generators(0) == {}
    assert loop_groupoid(s1).generators(0) == {"e": SimplexRef(1, "e")}


def test_adjunction_bijection(s1: SSet, delta0: SSet, const_z2: ConstantSGpd) -> None:
    """Test Hom(G(X), Z/2) = Hom(X, W(Z/2)) by enumeration."""
    count = adjunction_bijection(s1, const_z2)
    assert (count.left, count.right, count.bijective) == (2, 2, True)
    count = adjunction_bijection(delta0, const_z2)
    assert (count.left, count.right, count.bijective) == (1, 1, True)


def test_shift_of_constant_group(const_z2: ConstantSGpd) -> None:
    """Test that pi_1 of the diagonal nerve is pi_0 of the vertex group."""
    assert shift_check(const_z2, "*", 1).is_isomorphic


def test_shift_unknown_object(const_z2: ConstantSGpd) -> None:
    """Test that the base object is checked."""
    with pytest.raises(UnknownObject):
        shift_check(const_z2, "x", 1)


@pytest.mark.parametrize("fixture", ["delta0", "d0_plus_d0", "s1"])
def test_unit_is_equivalence(fixture: str, request: pytest.FixtureRequest) -> None:
    """Test that X -> W(G(X)) keeps pi_0 and pi_1."""
    assert unit_check(request.getfixturevalue(fixture)).is_certified


def test_unit_on_hollow_triangle() -> None:
    """Test the unit on the boundary of Delta^2."""
    f = unit_map(boundary(2))
    assert f.validate() is f
    assert unit_check(boundary(2)).is_certified


def test_unit_on_nerve(nerve_z2: SSet) -> None:
    """Test the unit on the 2-skeleton of N(Z/2)."""
    assert unit_check(nerve_z2, max_dim=2).is_certified


def test_hom_space_of_discrete_groupoid() -> None:
    """Test that distinct objects of a discrete groupoid have no arrows."""
    gpd = ConstantSGpd(FiniteGroupoid.discrete(["x", "y"]))
    assert hom_space(gpd, "x", "y", 1).sset.is_empty()
    assert hom_space(gpd, "x", "x", 1).sset.cell_counts() == [1]
    with pytest.raises(UnknownObject):
        hom_space(gpd, "x", "z", 1)


def test_morphisms_are_a_pullback() -> None:
    """Test that hom-spaces are the fibres of (source, target)."""
    gpd = ConstantSGpd(FiniteGroupoid.indiscrete(["x", "y"]))
    assert morphism_pullback_check(gpd, 2)


def test_postnikov_gpd_keeps_objects(const_z2: ConstantSGpd) -> None:
    """Test P_0 of a constant group."""
    truncated = postnikov_gpd(const_z2, 0, 2)
    assert truncated.objects == ("*",)
    assert len(truncated.arrows(0, "*", "*")[0]) == 2


@pytest.mark.parametrize("n", [0, 1])
def test_truncation_check(const_z2: ConstantSGpd, n: int) -> None:
    """Test that truncating a constant group changes nothing."""
    assert truncation_check(const_z2, n, 3).is_certified


def test_roundtrip_of_nerve(nerve_z2: SSet) -> None:
    """Test that W(P_0 G(X)) and P_1 W(G(X)) agree on pi_0 and pi_1 for N(Z/2)."""
    verdict = roundtrip_check(nerve_z2, 1, 2)
    assert verdict.is_certified
    assert verdict.evidence["pi0"] == [1, 1]


def test_roundtrip_of_circle_is_undecided(s1: SSet) -> None:
    """Test that S1 has no finite Kan model to compare against."""
    verdict = roundtrip_check(s1, 1, 2)
    assert verdict.verdict == VERDICT_UNKNOWN
    assert "fibrancy" in verdict.evidence
    assert verdict.evidence["unit"]["verdict"] == VERDICT_CERTIFIED
    assert "source_fibrancy" in verdict.evidence


def _failing_on_classifying_space(
    sset: SSet, n: int, max_dim: int, fibrancy_dim: int | None = None, **kwargs: Any
) -> tuple[SSet, SMap]:
    if sset.name.startswith("W(G("):
        raise NotFibrant(f"{sset.name} refused", witness={"dim": 2, "index": 0})
    return postnikov(sset, n, max_dim, fibrancy_dim=fibrancy_dim, **kwargs)


def test_roundtrip_through_unit(nerve_z2: SSet, monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that P_1(X) stands in for P_1 W(G(X)) when the unit is certified."""
    monkeypatch.setattr("ntypes.sgpd.postnikov", _failing_on_classifying_space)
    verdict = roundtrip_check(nerve_z2, 1, 2)
    assert verdict.is_certified
    assert verdict.evidence["fibrancy"]["witness"] == {"dim": 2, "index": 0}
    assert verdict.evidence["right"].endswith("through the unit")


def test_roundtrip_without_unit(nerve_z2: SSet, monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that the verdict stays unknown when neither side can be certified."""
    monkeypatch.setattr("ntypes.sgpd.postnikov", _failing_on_classifying_space)
    monkeypatch.setattr(
        "ntypes.sgpd.unit_check", lambda *_args: EquivalenceVerdict(VERDICT_UNKNOWN)
    )
    verdict = roundtrip_check(nerve_z2, 1, 2)
    assert verdict.verdict == VERDICT_UNKNOWN
    assert verdict.evidence["fibrancy"]["witness"] == {"dim": 2, "index": 0}
    assert verdict.evidence["unit"]["verdict"] == VERDICT_UNKNOWN


def test_unit_respects_dimension_bound() -> None:
    """Test that the unit refuses a source above the dimension bound."""
    with pytest.raises(DimBudgetExceeded):
        unit_map(standard(3), budget=Budget(dim_bound=2))


async def test_hom_space_lookups_from_threads(const_z2: ConstantSGpd) -> None:
    """Test that arrow lookups agree when run from worker threads."""
    hom = hom_space(const_z2, "*", "*", 2)
    pairs = [(f, ref) for table in hom.tables for f, ref in table.items()]
    found = await asyncio.gather(*(asyncio.to_thread(hom.arrow_of, ref) for _, ref in pairs))
    assert found == [f for f, _ in pairs]


@pytest.mark.parametrize("group", ["trivial", "Z2", "Z3"])
@pytest.mark.parametrize("obj", ["Delta0", "S1", "dDelta2"])
def test_adjunction_on_corpus(obj: str, group: str) -> None:
    """Test the G -| W bijection over small groups."""
    count = adjunction_bijection(corpus_object(obj), ConstantSGpd(corpus_groupoid(group)))
    assert count.bijective
    assert count.left == count.right


def test_transposes_are_inverse(s1: SSet, const_z2: ConstantSGpd) -> None:
    """Test that transposing a functor G(S1) -> Z/2 and back returns it."""
    functors = loop_functors(s1, const_z2)
    assert len(functors) == 2
    for phi in functors:
        g = transpose_right(phi)
        assert g.validate() is g
        assert transpose_left(g, const_z2).key() == phi.key()
