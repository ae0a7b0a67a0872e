"""Tests for coskeleta, Postnikov sections and n-fibrations."""

from __future__ import annotations

import pytest

from ntypes.const import VERDICT_REFUTED
from ntypes.corpus import corpus_fibration
from ntypes.exceptions import NotFibrant
from ntypes.exceptions import PreconditionFailed
from ntypes.scomplex import SimplexRef
from ntypes.scomplex import SSet
from ntypes.scomplex import boundary
from ntypes.scomplex import is_isomorphism
from ntypes.scomplex import standard
from ntypes.scomplex import terminal_map
from ntypes.truncate import cosk
from ntypes.truncate import cosk_map
from ntypes.truncate import is_n_fibration
from ntypes.truncate import is_n_type
from ntypes.truncate import matching_map
from ntypes.truncate import matching_set
from ntypes.truncate import postnikov
from ntypes.truncate import postnikov_idempotence_check
from ntypes.truncate import q_fibration_square_check
from ntypes.truncate import sphere_unhit
from ntypes.truncate import truncate_at
from ntypes.truncate import truncation_adjunction_check


def test_matching_set_of_hollow_triangle() -> None:
    """Test that the hollow triangle has its own boundary as a 2-sphere."""
    hollow = boundary(2)
    spheres = {element.faces for element in matching_set(hollow, 2)}
    assert (SimplexRef(1, "12"), SimplexRef(1, "02"), SimplexRef(1, "01")) in spheres


def test_matching_set_starts_at_one(delta0: SSet) -> None:
    """Test that M_0 is refused."""
    with pytest.raises(PreconditionFailed):
        matching_set(delta0, 0)


def test_cosk_of_point(delta0: SSet) -> None:
    """Test that the coskeleton of the point is the point."""
    obj, coaugmentation = cosk(delta0, 0, 3)
    assert obj.cell_counts() == [1]
    assert is_isomorphism(coaugmentation)


def test_cosk_fills_hollow_triangle() -> None:
    """Test that cosk_1 fills the hollow triangle and is idempotent."""
    obj, coaugmentation = cosk(boundary(2), 1, 3)
    hollow = (SimplexRef(1, "12"), SimplexRef(1, "02"), SimplexRef(1, "01"))
    assert hollow in obj.boundary_index(2)
    assert coaugmentation.validate() is coaugmentation
    again, unit = cosk(obj, 1, 3)
    assert again == obj
    assert is_isomorphism(unit)


def test_cosk_rejects_negative_level(delta0: SSet) -> None:
    """Test that cosk_n needs n >= 0."""
    with pytest.raises(PreconditionFailed):
        cosk(delta0, -1, 2)


def test_cosk_map_to_point(nerve_z2: SSet) -> None:
    """Test that cosk of the terminal map lands in the point."""
    f = cosk_map(terminal_map(nerve_z2), 1, 3)
    assert f.target.cell_counts() == [1]
    assert f.validate() is f


def test_truncation_adjunction(nerve_z2: SSet) -> None:
    """Test Hom(sk_1 Delta^2, T) = Hom(Delta^2, cosk T) for T the 1-truncated nerve."""
    count = truncation_adjunction_check(standard(2), truncate_at(nerve_z2, 1), 3)
    assert count.to_dict() == {"left": 8, "right": 8, "bijective": True}


def test_nerve_is_one_type(nerve_z2: SSet) -> None:
    """Test that N(Z/2) is a 1-type."""
    assert is_n_type(nerve_z2, 1, 3).is_certified


def test_nerve_is_not_zero_type(nerve_z2: SSet) -> None:
    """Test that N(Z/2) is not a 0-type and the witness re-checks."""
    certificate = is_n_type(nerve_z2, 0, 3)
    assert certificate.verdict == VERDICT_REFUTED
    assert certificate.witness is not None
    assert sphere_unhit(terminal_map(nerve_z2), certificate.witness)


def test_discrete_set_is_zero_type(d0_plus_d0: SSet) -> None:
    """Test that two points form a 0-type."""
    assert is_n_type(d0_plus_d0, 0, 2).is_certified


def test_n_fibration_needs_room(nerve_z2: SSet) -> None:
    """Test that up_to_dim must reach n + 2."""
    with pytest.raises(PreconditionFailed):
        is_n_fibration(terminal_map(nerve_z2), 1, 2)


def test_n_fibration_needs_fibration() -> None:
    """Test that a map that is not a Kan fibration is refused."""
    with pytest.raises(PreconditionFailed):
        is_n_fibration(terminal_map(standard(1)), 0, 2)


def test_quotient_map_levels() -> None:
    """Test N(Z/4) -> N(Z/2), whose fibre is N(Z/2)."""
    f = corpus_fibration("N(Z4)->N(Z2)")
    assert is_n_fibration(f, 1, 3).is_certified
    refuted = is_n_fibration(f, 0, 3)
    assert refuted.is_refuted
    assert sphere_unhit(f, refuted.witness or {})


def test_postnikov_of_one_type(nerve_z2: SSet) -> None:
    """Test that P_1 of a 1-type is the same simplicial set."""
    obj, p_1 = postnikov(nerve_z2, 1, 3)
    assert obj.cell_counts() == [1, 1, 1, 1]
    assert is_isomorphism(p_1)


def test_postnikov_needs_kan(s1: SSet) -> None:
    """Test that P_n of a non-Kan input raises with the witness."""
    with pytest.raises(NotFibrant) as err:
        postnikov(s1, 0, 2)
    assert err.value.witness is not None


def test_postnikov_idempotence(nerve_z2: SSet) -> None:
    """Test that p_n(P_n X) and P_n(p_n) are isomorphisms."""
    assert postnikov_idempotence_check(nerve_z2, 0, 3) == {
        "unit_on_section": True,
        "section_of_unit": True,
    }


@pytest.mark.parametrize("name", ["D0+D0->*", "N(Z2)->*", "id(N(Z2))"])
@pytest.mark.parametrize("n", [0, 1])
def test_square_check_agrees_with_matching_criterion(name: str, n: int) -> None:
    """Test that the Postnikov square and the matching-set criterion agree."""
    f = corpus_fibration(name)
    square = q_fibration_square_check(f, n, 3)
    matching = is_n_fibration(f, n, 3)
    assert square.verdict == matching.verdict


def test_matching_map_of_hollow_triangle() -> None:
    """Test that every 1-simplex goes to its pair of endpoints."""
    boundaries = matching_map(boundary(2), 1)
    assert len(boundaries) == 6
    assert boundaries[SimplexRef(1, "01")].to_list() == ["1", "0"]
