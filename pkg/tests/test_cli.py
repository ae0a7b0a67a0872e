"""Tests for the command line front end."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from ntypes.cli import main
from ntypes.cli import run
from ntypes.const import EXIT_CERTIFIED
from ntypes.const import EXIT_INPUT_ERROR
from ntypes.const import EXIT_REFUTED
from ntypes.const import EXIT_UNKNOWN
from ntypes.const import REPORT_SCHEMA
from ntypes.corpus import circle
from ntypes.corpus import cyclic_nerve
from ntypes.kan import ex_iterate
from ntypes.scomplex import standard

WriteJson = Callable[[str, Any], Path]


@pytest.fixture
def nerve_file(write_json: WriteJson) -> Path:
    """Return a file holding the nerve of Z/2."""
    return write_json("nerve.json", cyclic_nerve(2).to_dict())


def test_ntype_check(nerve_file: Path) -> None:
    """Test that N(Z/2) is reported a 1-type."""
    code, report = run(["ntype-check", str(nerve_file), "--n", "1", "--no-time"])
    assert code == EXIT_CERTIFIED
    assert report["schema"] == REPORT_SCHEMA
    assert report["verdict"] == "certified"
    assert list(report["inputs"]) == [str(nerve_file)]
    assert report["inputs"][str(nerve_file)].startswith("sha256:")


def test_ntype_check_refuted(nerve_file: Path) -> None:
    """Test that a refutation carries its witness."""
    code, report = run(["ntype-check", str(nerve_file), "--n", "0", "--no-time"])
    assert code == EXIT_REFUTED
    assert report["result"]["witness"]


def test_report_is_deterministic(nerve_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that two runs without wall time print the same report."""
    argv = ["pi1", str(nerve_file), "--no-time"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first
    assert "wall_time" not in json.loads(first)


def test_wall_time_is_reported() -> None:
    """Test that the wall time is reported by default."""
    _, report = run(["pi0", "corpus:Delta0"])
    assert "wall_time" in report


def test_text_format(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the human readable output."""
    code, _ = run(["pi0", "corpus:D0+D0", "--format", "text"])
    out = capsys.readouterr().out
    assert code == EXIT_CERTIFIED
    assert out.startswith("pi0: ok (exit 0)")
    assert "2 components" in out


def test_out_file(tmp_path: Path) -> None:
    """Test that --out receives the report."""
    target = tmp_path / "report.json"
    run(["cosk", "corpus:dDelta2", "--n", "1", "--out", str(target), "--no-time"])
    report = json.loads(target.read_text(encoding="utf-8"))
    assert report["result"]["cell_counts"] == [3, 3, 1]


def test_kan_check_exit_codes() -> None:
    """Test certified and refuted horn filling."""
    assert run(["kan-check", "corpus:N(Z2)"])[0] == EXIT_CERTIFIED
    assert run(["kan-check", "corpus:Delta1"])[0] == EXIT_REFUTED


def test_budget_exhaustion() -> None:
    """Test that an exhausted budget exits with the unknown code."""
    code, report = run(["kan-check", "corpus:N(Z2)", "--budget", "search_nodes=3"])
    assert code == EXIT_UNKNOWN
    assert report["budget"]["search_nodes"] == 3


def test_bad_budget() -> None:
    """Test that malformed budgets are input errors."""
    assert run(["pi0", "corpus:Delta0", "--budget", "search_nodes=lots"])[0] == EXIT_INPUT_ERROR
    assert run(["pi0", "corpus:Delta0", "--budget", "colour=3"])[0] == EXIT_INPUT_ERROR


def test_postnikov_of_non_kan() -> None:
    """Test that P_n of a non-Kan input is refuted with a witness."""
    code, report = run(["postnikov", "corpus:S1", "--max-dim", "2"])
    assert code == EXIT_REFUTED
    assert report["result"]["witness"] is not None


def test_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
    """Test unknown commands."""
    code, _ = run(["homotopy"])
    assert code == EXIT_INPUT_ERROR
    assert "ntypes:" in capsys.readouterr().err


def test_missing_file(tmp_path: Path) -> None:
    """Test that an unreadable input is an input error."""
    code, report = run(["pi0", str(tmp_path / "missing.json")])
    assert code == EXIT_INPUT_ERROR
    assert report["error"]["type"] == "MalformedSpec"


def test_unknown_corpus_name() -> None:
    """Test that unknown corpus references are reported."""
    code, report = run(["pi0", "corpus:torus"])
    assert code == EXIT_INPUT_ERROR
    assert report["error"]["type"] == "UnknownObject"


def test_map_file(write_json: WriteJson) -> None:
    """Test a map file whose ends are resolved next to it."""
    write_json("s1.json", circle().to_dict())
    path = write_json(
        "collapse.json",
        {"source": "s1.json", "target": "corpus:Delta0", "assignment": {"v": "0", "e": "s[0] 0"}},
    )
    code, report = run(["fib-check", str(path), "--max-dim", "2"])
    assert code == EXIT_REFUTED
    assert len(report["inputs"]) == 2


def test_groupoid_commands(write_json: WriteJson) -> None:
    """Test W and the shift check on a groupoid file."""
    path = write_json("z3.json", {"name": "Z3", "presentation": "gens: g; rels: g g g;"})
    code, report = run(["wbar", str(path), "--max-dim", "2"])
    assert code == EXIT_CERTIFIED
    assert report["result"]["cell_counts"] == [1, 2, 4]
    assert run(["shift-check", "corpus:Z2"])[0] == EXIT_CERTIFIED


def test_adjunction_check() -> None:
    """Test the hom-set bijection of G and W."""
    code, report = run(["adjunction-check", "corpus:S1", "corpus:Z2"])
    assert code == EXIT_CERTIFIED
    assert report["result"] == {"left": 2, "right": 2, "bijective": True}


def test_gen_sets() -> None:
    """Test the generating set labels."""
    code, report = run(["gen-sets", "--n", "0", "--max-dim", "2"])
    assert code == EXIT_CERTIFIED
    assert report["result"]["J_n_extension"] == ["L_U(dD2->D2)", "L_U(*->dD2)"]


def test_loopgpd() -> None:
    """Test the loop groupoid listing."""
    _, report = run(["loopgpd", "corpus:S1", "--max-dim", "1"])
    assert report["result"]["levels"]["0"] == {"e": "v -> v"}


def test_main_returns_code() -> None:
    """Test the console entry point."""
    assert main(["pi0", "corpus:Delta0"]) == EXIT_CERTIFIED


def test_ex_rounds_on_presheaf(write_json: WriteJson) -> None:
    """Test that --rounds sets the number of Ex rounds on a presheaf file."""
    write_json("site.json", {"name": "pt", "objects": ["U"]})
    write_json("interval.json", standard(1).to_dict())
    path = write_json(
        "presheaf.json", {"name": "I", "site": "site.json", "sections": {"U": "interval.json"}}
    )
    _, report = run(["ex", str(path), "--rounds", "2", "--max-dim", "1", "--no-time"])
    assert report["result"]["sections"]["U"] == ex_iterate(standard(1), 2, 1)[0].to_dict()


def test_roundtrip_verdicts(nerve_file: Path) -> None:
    """Test that the roundtrip is certified for N(Z/2) and undecided for S1."""
    assert run(["roundtrip", str(nerve_file), "--max-dim", "2"])[0] == EXIT_CERTIFIED
    code, report = run(["roundtrip", "corpus:S1", "--max-dim", "2"])
    assert code == EXIT_UNKNOWN
    assert "fibrancy" in report["result"]["evidence"]
