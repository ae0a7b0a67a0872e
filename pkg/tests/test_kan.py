"""Tests for horn filling, fibrations and Ex."""

from __future__ import annotations

import pytest

from ntypes.config import Budget
from ntypes.const import VERDICT_CERTIFIED
from ntypes.const import VERDICT_REFUTED
from ntypes.const import VERDICT_UNKNOWN
from ntypes.corpus import KAN_OBJECTS
from ntypes.corpus import corpus_object
from ntypes.exceptions import PreconditionFailed
from ntypes.kan import KanCertificate
from ntypes.kan import LiftProblem
from ntypes.kan import ex
from ntypes.kan import ex_iterate
from ntypes.kan import ex_map
from ntypes.kan import ex_map_iterate
from ntypes.kan import is_fibration
from ntypes.kan import is_kan
from ntypes.kan import last_vertex_map
from ntypes.kan import sd
from ntypes.kan import solve_lift
from ntypes.kan import subdivided_simplex
from ntypes.kan import witness_holds
from ntypes.pi import pi0
from ntypes.scomplex import SSet
from ntypes.scomplex import compose
from ntypes.scomplex import horn
from ntypes.scomplex import identity_map
from ntypes.scomplex import inclusion
from ntypes.scomplex import is_isomorphism
from ntypes.scomplex import iter_homs
from ntypes.scomplex import standard
from ntypes.scomplex import terminal_map


@pytest.mark.parametrize("name", KAN_OBJECTS)
def test_corpus_kan_objects(name: str) -> None:
    """Test that the Kan corpus objects are certified."""
    assert is_kan(corpus_object(name), 3).verdict == VERDICT_CERTIFIED


def test_interval_is_not_kan() -> None:
    """Test that Delta^1 has an unfillable horn and that the witness re-checks."""
    interval = standard(1)
    certificate = is_kan(interval, 2)
    assert certificate.is_refuted
    assert certificate.witness is not None
    assert certificate.witness["n"] == 2
    assert witness_holds(interval, certificate.witness)


def test_circle_is_not_kan(s1: SSet) -> None:
    """Test that the one-edge circle cannot compose its loop."""
    certificate = is_kan(s1, 2)
    assert certificate.verdict == VERDICT_REFUTED
    assert witness_holds(s1, certificate.witness or {})


def test_is_kan_preconditions(delta0: SSet) -> None:
    """Test that is_kan rejects dimension 0 and the empty set."""
    with pytest.raises(PreconditionFailed):
        is_kan(delta0, 0)
    with pytest.raises(PreconditionFailed):
        is_kan(SSet.empty(), 1)


def test_is_kan_budget(nerve_z2: SSet) -> None:
    """Test that an exhausted budget gives an Unknown verdict."""
    certificate = is_kan(nerve_z2, 3, Budget(search_nodes=3))
    assert certificate.verdict == VERDICT_UNKNOWN
    assert "exceeded" in certificate.detail


def test_certificate_record() -> None:
    """Test the report record of a certificate."""
    record = KanCertificate.refuted("X", 2, {"n": 2}).to_dict()
    assert record == {"subject": "X", "checked_dim": 2, "verdict": "refuted", "witness": {"n": 2}}
    assert "witness" not in KanCertificate.certified("X", 2).to_dict()


def test_terminal_map_of_nerve_is_fibration(nerve_z2: SSet) -> None:
    """Test that a Kan complex fibres over the point."""
    assert is_fibration(terminal_map(nerve_z2), 2).is_certified


def test_collapse_of_interval_is_not_fibration() -> None:
    """Test that Delta^1 -> Delta^0 is not a Kan fibration."""
    certificate = is_fibration(terminal_map(standard(1)), 2)
    assert certificate.is_refuted
    assert set(certificate.witness or {}) == {"n", "k", "top", "bottom"}


def test_solve_lift_fills_horn(nerve_z2: SSet) -> None:
    """Test that a horn in the nerve lifts through the terminal map."""
    i = inclusion(horn(2, 1), standard(2))
    f = terminal_map(nerve_z2)
    top = next(iter_homs(horn(2, 1), nerve_z2))
    problem = LiftProblem(i, f, top, terminal_map(standard(2))).validate()
    lift = solve_lift(problem)
    assert lift is not None
    assert compose(lift, i).assignment == top.assignment


def test_lift_problem_needs_injective_i(delta0: SSet) -> None:
    """Test that a lift problem along a collapse is refused."""
    collapse = terminal_map(standard(1))
    problem = LiftProblem(collapse, identity_map(delta0), collapse, identity_map(delta0))
    with pytest.raises(PreconditionFailed):
        problem.validate()


def test_subdivision_counts() -> None:
    """Test the cell counts of subdivided simplices."""
    assert subdivided_simplex(1).cell_counts() == [3, 2]
    assert subdivided_simplex(2).cell_counts() == [7, 12, 6]
    assert sd(standard(2)).cell_counts() == [7, 12, 6]


def test_last_vertex_map_is_simplicial() -> None:
    """Test that the last-vertex map respects faces."""
    f = last_vertex_map(2)
    assert f.validate() is f


def test_ex_of_point(delta0: SSet) -> None:
    """Test that Ex of the point is the point."""
    obj, coaugmentation = ex(delta0, 2)
    assert obj.cell_counts() == [1]
    assert is_isomorphism(coaugmentation)


def test_ex_of_interval() -> None:
    """Test the low cells of Ex(Delta^1)."""
    obj, coaugmentation = ex(standard(1), 1)
    assert obj.cell_counts() == [2, 3]
    assert coaugmentation.validate() is coaugmentation


def test_ex_keeps_components(d0_plus_d0: SSet) -> None:
    """Test that Ex of a discrete set is the same discrete set."""
    obj, _ = ex(d0_plus_d0, 2)
    assert obj == d0_plus_d0
    assert len(pi0(obj)) == 2


def test_ex_map_and_iterate(d0_plus_d0: SSet) -> None:
    """Test Ex on maps and iterated Ex."""
    f = ex_map(terminal_map(d0_plus_d0), 1)
    assert f.validate() is f
    obj, total = ex_iterate(d0_plus_d0, 2, 1)
    assert obj == d0_plus_d0
    assert is_isomorphism(total)


def test_ex_map_iterate() -> None:
    """Test that Ex^k on maps runs between the objects of iterated Ex."""
    f = ex_map_iterate(terminal_map(standard(1)), 2, 1)
    assert f.validate() is f
    assert f.source == ex_iterate(standard(1), 2, 1)[0]
    assert f.target.cell_counts() == [1]
