"""Tests for finite simplicial sets and maps."""

from __future__ import annotations

import pytest

from ntypes.config import Budget
from ntypes.corpus import corpus_fibration
from ntypes.exceptions import DimBudgetExceeded
from ntypes.exceptions import MalformedSpec
from ntypes.exceptions import NonInjectiveGlue
from ntypes.exceptions import NonSimplicialMap
from ntypes.exceptions import PreconditionFailed
from ntypes.exceptions import SearchBudgetExceeded
from ntypes.exceptions import SimplicialIdentityViolation
from ntypes.scomplex import SimplexRef
from ntypes.scomplex import SMap
from ntypes.scomplex import SSet
from ntypes.scomplex import boundary
from ntypes.scomplex import build_smap
from ntypes.scomplex import build_sset
from ntypes.scomplex import compose
from ntypes.scomplex import coproduct
from ntypes.scomplex import degenerate_vertex
from ntypes.scomplex import disjoint_union
from ntypes.scomplex import fiber
from ntypes.scomplex import from_simplicial_object
from ntypes.scomplex import hom_enumerate
from ntypes.scomplex import horn
from ntypes.scomplex import identity_map
from ntypes.scomplex import inclusion
from ntypes.scomplex import is_isomorphism
from ntypes.scomplex import iter_homs
from ntypes.scomplex import parse_ref
from ntypes.scomplex import product
from ntypes.scomplex import pullback
from ntypes.scomplex import pushout
from ntypes.scomplex import skeleton
from ntypes.scomplex import standard
from ntypes.scomplex import standard_map
from ntypes.scomplex import terminal_map


def test_standard_simplex_cells() -> None:
    """Test the cells of the standard 2-simplex."""
    delta2 = standard(2)
    assert delta2.cell_counts() == [3, 3, 1]
    assert delta2.nondegenerate(1) == ("01", "02", "12")
    assert delta2.boundary(SimplexRef(2, "012")) == (
        SimplexRef(1, "12"),
        SimplexRef(1, "02"),
        SimplexRef(1, "01"),
    )


def test_boundary_counts_degenerate_simplices() -> None:
    """Test that simplices() of the hollow triangle lists its 9 degenerate 2-simplices."""
    hollow = boundary(2)
    assert hollow.cell_counts() == [3, 3]
    assert len(hollow.simplices(2)) == 9
    assert all(ref.is_degenerate for ref in hollow.simplices(2))


def test_horn_omits_opposite_face() -> None:
    """Test that the horn misses exactly the face opposite its vertex."""
    lam = horn(2, 1)
    assert lam.has_cell("01")
    assert lam.has_cell("12")
    assert not lam.has_cell("02")
    assert not lam.has_cell("012")


def test_horn_out_of_range() -> None:
    """Test that an undefined horn is rejected."""
    with pytest.raises(PreconditionFailed, match="undefined"):
        horn(2, 3)


def test_simplex_ref_text_form() -> None:
    """Test the face-ref syntax in both directions."""
    ref = SimplexRef(2, "e", (1,))
    assert str(ref) == "s[1] e"
    assert parse_ref("s[1] e", 2) == ref
    assert str(degenerate_vertex("v", 2)) == "s[1,0] v"


def test_vertex_and_degeneracy() -> None:
    """Test vertex lookup and the simplicial identity s_j on a degenerate simplex."""
    delta2 = standard(2)
    assert delta2.vertex(SimplexRef(2, "012"), 1) == "1"
    edge = SimplexRef(1, "01")
    assert delta2.face(edge.degeneracy(0), 0) == edge
    assert delta2.face(edge.degeneracy(0), 1) == edge


def test_identity_violation_is_reported() -> None:
    """Test that inconsistent face data raises with the failing pair."""
    a, b = SimplexRef(0, "a"), SimplexRef(0, "b")
    e = SimplexRef(1, "e")
    with pytest.raises(SimplicialIdentityViolation) as err:
        SSet.build("bad", {0: ["a", "b"], 1: ["e"], 2: ["t"]}, {"e": [b, a], "t": [e, e, e]})
    assert err.value.simplex == "t"


def test_wrong_face_arity() -> None:
    """Test that a cell with the wrong number of faces is malformed."""
    v = SimplexRef(0, "v")
    with pytest.raises(MalformedSpec):
        SSet.build("bad", {0: ["v"], 1: ["e"]}, {"e": [v]})


def test_build_sset_from_record(s1: SSet) -> None:
    """Test that the textual description reproduces the simplicial set."""
    assert build_sset(s1.to_dict()) == s1


def test_build_sset_requires_faces() -> None:
    """Test that a positive-dimensional cell without faces is rejected."""
    with pytest.raises(MalformedSpec):
        build_sset({"name": "x", "cells": {"0": ["a"], "1": ["e"]}})


def test_build_sset_rejects_unknown_fields() -> None:
    """Test that unknown record fields are rejected."""
    with pytest.raises(MalformedSpec):
        build_sset({"name": "x", "cells": {"0": ["a"]}, "colour": "red"})


def test_map_validation_catches_faces(d0_plus_d0: SSet) -> None:
    """Test that a map breaking a face square is rejected."""
    f = SMap(
        standard(1),
        d0_plus_d0,
        {
            "0": SimplexRef(0, "0:0"),
            "1": SimplexRef(0, "1:0"),
            "01": degenerate_vertex("0:0", 1),
        },
    )
    with pytest.raises(NonSimplicialMap) as err:
        f.validate()
    assert err.value.cell == "01"


def test_map_validation_catches_missing_image(s1: SSet) -> None:
    """Test that a map without an image for some cell is malformed."""
    with pytest.raises(MalformedSpec):
        SMap(standard(1), s1, {"0": SimplexRef(0, "v")}).validate()


def test_build_smap(s1: SSet) -> None:
    """Test building a map from its record."""
    record = {"source": "d1", "target": "s1", "assignment": {"0": "v", "1": "v", "01": "e"}}
    f = build_smap(record, standard(1), s1)
    assert f(SimplexRef(1, "01")) == SimplexRef(1, "e")
    assert f(SimplexRef(2, "01", (1,))) == SimplexRef(2, "e", (1,))


def test_iter_homs_into_circle(s1: SSet) -> None:
    """Test that an edge maps to the circle in exactly two ways."""
    maps = list(iter_homs(standard(1), s1))
    assert len(maps) == 2
    images = sorted(str(f.assignment["01"]) for f in maps)
    assert images == ["e", "s[0] v"]


def test_iter_homs_with_fixed_cells(s1: SSet) -> None:
    """Test that prescribed images restrict the search."""
    maps = list(iter_homs(standard(1), s1, fixed={"01": SimplexRef(1, "e")}))
    assert len(maps) == 1


def test_iter_homs_over_a_base() -> None:
    """Test enumeration of maps commuting with two given maps to a base."""
    f = corpus_fibration("N(Z2)+D0->D0+D0")
    section = SMap(standard(0), f.target, {"0": SimplexRef(0, "1:0")})
    lifts = list(iter_homs(standard(0), f.source, over=(f, section)))
    assert [str(h.assignment["0"]) for h in lifts] == ["1:0"]


def test_iter_homs_budget(s1: SSet) -> None:
    """Test that the node budget stops the search."""
    with pytest.raises(SearchBudgetExceeded):
        list(iter_homs(standard(1), s1, budget=Budget(search_nodes=1)))


def test_compose_with_identity(s1: SSet) -> None:
    """Test that composing with identities does nothing."""
    f = next(iter_homs(standard(1), s1))
    assert compose(identity_map(s1), f).assignment == f.assignment
    assert compose(f, identity_map(standard(1))).assignment == f.assignment


def test_standard_map_degenerates() -> None:
    """Test the map induced by a non-injective operator."""
    f = standard_map((0, 0, 1), 1).validate()
    assert f.assignment["012"] == SimplexRef(2, "01", (0,))
    assert f.assignment["02"] == SimplexRef(1, "01")


def test_skeleton() -> None:
    """Test the 1-skeleton of the 3-simplex."""
    assert skeleton(standard(3), 1).cell_counts() == [4, 6]


def test_coproduct_names(delta0: SSet) -> None:
    """Test that coproduct cells are tagged by their summand."""
    union, legs = coproduct([delta0, standard(1)], "sum")
    assert union.nondegenerate(0) == ("0:0", "1:0", "1:1")
    assert legs[1].assignment["01"] == SimplexRef(1, "1:01")


def test_product_of_intervals() -> None:
    """Test the prism Delta^1 x Delta^1."""
    square = product(standard(1), standard(1), 2)
    assert square.obj.cell_counts() == [4, 5, 2]
    assert square.first.validate() is square.first
    assert square.second.validate() is square.second


def test_product_respects_dimension_bound() -> None:
    """Test that products beyond the dimension bound are refused."""
    with pytest.raises(DimBudgetExceeded):
        product(standard(1), standard(1), 4, Budget(dim_bound=3))


def test_pullback_over_point() -> None:
    """Test that a pullback over the point is the product."""
    d1 = standard(1)
    square = pullback(terminal_map(d1), terminal_map(d1), 2)
    assert square.obj == product(d1, d1, 2).obj


def test_fiber() -> None:
    """Test the strict fibre of a corpus map."""
    f = corpus_fibration("N(Z2)+D0->D0+D0")
    assert fiber(f, "1:0").cell_counts() == [1]
    assert fiber(f, "0:0").cell_counts() == [1, 1, 1, 1, 1]


def test_pushout_glues_endpoints() -> None:
    """Test that collapsing the ends of an interval gives a loop."""
    ends = boundary(1)
    glued = pushout(inclusion(ends, standard(1)), terminal_map(ends))
    assert glued.obj.cell_counts() == [1, 1]
    assert glued.right.validate() is glued.right


def test_pushout_needs_injective_leg() -> None:
    """Test that two collapsing legs are refused."""
    d1 = standard(1)
    collapse = terminal_map(d1)
    with pytest.raises(NonInjectiveGlue):
        pushout(collapse, collapse)


def test_from_simplicial_object_detects_degeneracies() -> None:
    """Test that a constant simplicial set has only vertices."""
    obj, tables = from_simplicial_object(
        "const",
        3,
        lambda _n: ["a", "b"],
        lambda _n, _i, x: x,
        lambda _n, _j, x: x,
        lambda _n, x: x,
    )
    assert obj.cell_counts() == [2]
    assert tables[2]["a"] == degenerate_vertex("a", 2)


def test_from_simplicial_object_closed() -> None:
    """Test that closed enumeration drops simplices with missing faces."""

    def elements(n: int) -> list[str]:
        return ["a"] if n == 0 else ["a", "x"]

    def face(_n: int, _i: int, x: str) -> str:
        return "z" if x == "x" else x

    args = ("cut", 1, elements, face, lambda _n, _j, x: x, lambda _n, x: x)
    obj, _ = from_simplicial_object(*args, closed=True)
    assert obj.cell_counts() == [1]
    assert obj.truncated
    with pytest.raises(MalformedSpec):
        from_simplicial_object(*args)


def test_is_isomorphism(s1: SSet) -> None:
    """Test isomorphism detection on nondegenerate cells."""
    assert is_isomorphism(identity_map(s1))
    assert not is_isomorphism(terminal_map(s1))


def test_disjoint_union(delta0: SSet) -> None:
    """Test the two-point space."""
    assert disjoint_union(delta0, delta0).nondegenerate(0) == ("0:0", "1:0")


def test_hom_enumerate(s1: SSet) -> None:
    """Test that the enumeration lists what the iterator yields."""
    maps = hom_enumerate(standard(1), s1)
    assert [f.assignment for f in maps] == [f.assignment for f in iter_homs(standard(1), s1)]
    assert len(hom_enumerate(standard(1), standard(1))) == 3
