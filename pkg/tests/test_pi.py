"""Tests for components, fundamental groups and group comparison."""

from __future__ import annotations

import pytest

from ntypes.const import COMPARE_ISOMORPHIC
from ntypes.const import COMPARE_NOT_ISOMORPHIC
from ntypes.corpus import corpus_fibration
from ntypes.exceptions import MalformedSpec
from ntypes.exceptions import NotFibrant
from ntypes.exceptions import VertexNotFound
from ntypes.pi import GroupPresentation
from ntypes.pi import abelian_invariants
from ntypes.pi import compare_groups
from ntypes.pi import fiber_exactness_check
from ntypes.pi import group_order
from ntypes.pi import pi0
from ntypes.pi import pi1
from ntypes.pi import pi1_table
from ntypes.pi import pi_n_classes
from ntypes.pi import weak_equivalence_check
from ntypes.scomplex import SSet
from ntypes.scomplex import boundary
from ntypes.scomplex import identity_map
from ntypes.scomplex import standard
from ntypes.scomplex import terminal_map

Z2_TEXT = "gens: g; rels: g g;"


def test_pi0_counts(d0_plus_d0: SSet, s1: SSet) -> None:
    """Test path components of small simplicial sets."""
    assert pi0(d0_plus_d0) == [["0:0"], ["1:0"]]
    assert len(pi0(boundary(2))) == 1
    assert len(pi0(s1)) == 1


def test_pi1_of_circle(s1: SSet) -> None:
    """Test that the circle has a free fundamental group of rank 1."""
    group = pi1(s1, "v")
    assert group.is_free
    assert group.rank == 1
    assert group.basepoint == "v"


def test_pi1_of_nerve(nerve_z2: SSet) -> None:
    """Test that pi_1 N(Z/2) is Z/2."""
    verdict = compare_groups(pi1(nerve_z2, "*"), GroupPresentation.from_text(Z2_TEXT))
    assert verdict.verdict == COMPARE_ISOMORPHIC


def test_pi1_of_simplex_is_trivial() -> None:
    """Test that a contractible simplex has trivial fundamental group."""
    group = pi1(standard(2), "0").simplified()
    assert abelian_invariants(group) == []
    assert group_order(group) == 1


def test_pi1_table(d0_plus_d0: SSet) -> None:
    """Test that pi1_table has an entry per vertex."""
    assert sorted(pi1_table(d0_plus_d0)) == ["0:0", "1:0"]


def test_pi1_unknown_vertex(s1: SSet) -> None:
    """Test that an unknown basepoint is reported."""
    with pytest.raises(VertexNotFound):
        pi1(s1, "w")


def test_presentation_text() -> None:
    """Test the text form of presentations."""
    group = GroupPresentation.from_text("gens: a b; rels: a a, a b A B;")
    assert group.rank == 2
    assert group.relators[1] == (("a", 1), ("b", 1), ("a", -1), ("b", -1))
    assert group.to_text() == "gens: a b; rels: a a, a b A B;"


def test_presentation_text_errors() -> None:
    """Test that malformed presentations are rejected."""
    with pytest.raises(MalformedSpec):
        GroupPresentation.from_text("rels: a a;")
    with pytest.raises(MalformedSpec):
        GroupPresentation.from_text("gens: a; rels: b;")


def test_abelian_invariants() -> None:
    """Test abelianization invariants."""
    assert abelian_invariants(GroupPresentation.from_text("gens: a b; rels: a a;")) == [0, 2]
    assert abelian_invariants(GroupPresentation.from_text("gens: a b;")) == [0, 0]


def test_group_order() -> None:
    """Test orders found by coset enumeration."""
    klein = GroupPresentation.from_text("gens: a b; rels: a a, b b, a b A B;")
    assert group_order(klein) == 4
    assert group_order(GroupPresentation.from_text("gens: a;")) is None


def test_compare_separates_orders() -> None:
    """Test that Z/3 and Z/2 are separated by abelianization."""
    verdict = compare_groups(
        GroupPresentation.from_text("gens: a; rels: a a a;"),
        GroupPresentation.from_text(Z2_TEXT),
    )
    assert verdict.verdict == COMPARE_NOT_ISOMORPHIC
    assert verdict.evidence["invariant"] == "abelianization"


def test_compare_free_groups() -> None:
    """Test free groups of different ranks."""
    verdict = compare_groups(
        GroupPresentation.from_text("gens: a b;"), GroupPresentation.from_text("gens: a;")
    )
    assert verdict.is_not_isomorphic


def test_compare_two_presentations_of_s3() -> None:
    """Test that two presentations of the symmetric group are isomorphic."""
    verdict = compare_groups(
        GroupPresentation.from_text("gens: a b; rels: a a, b b b, a b a b;"),
        GroupPresentation.from_text("gens: x y; rels: x x, y y, x y x y x y;"),
    )
    assert verdict.is_isomorphic


def test_pi_n_classes_of_nerve(nerve_z2: SSet) -> None:
    """Test loop and 2-sphere classes of N(Z/2)."""
    loops = pi_n_classes(nerve_z2, "*", 1)
    assert loops.count == 2
    assert loops.pi1_order == 2
    assert pi_n_classes(nerve_z2, "*", 2).count == 1
    assert loops.to_dict()["count"] == 2


def test_pi_n_classes_needs_kan(s1: SSet) -> None:
    """Test that sphere classes are only computed for Kan inputs."""
    with pytest.raises(NotFibrant):
        pi_n_classes(s1, "v", 1)


def test_weak_equivalences(nerve_z2: SSet, d0_plus_d0: SSet) -> None:
    """Test the low-degree equivalence check."""
    assert weak_equivalence_check(identity_map(nerve_z2)).is_certified
    assert weak_equivalence_check(terminal_map(standard(1))).is_certified
    refuted = weak_equivalence_check(terminal_map(d0_plus_d0))
    assert refuted.is_refuted
    assert refuted.evidence["invariant"] == "pi0"


def test_weak_equivalence_sees_pi1(nerve_z2: SSet) -> None:
    """Test that collapsing N(Z/2) fails on pi_1."""
    verdict = weak_equivalence_check(terminal_map(nerve_z2))
    assert verdict.is_refuted
    assert verdict.evidence["invariant"] == "pi1"


def test_fiber_exactness() -> None:
    """Test the fibre sequence of N(Z/4) -> N(Z/2)."""
    report = fiber_exactness_check(corpus_fibration("N(Z4)->N(Z2)"), "*")
    assert report.fiber_components == 1
    assert report.exact
    assert report.to_dict()["exact_at_base_pi1"] is True
