"""Batch command line front end.

Every subcommand reads its inputs, runs one operation and emits a report.
Inputs are JSON files or ``corpus:<name>`` references to the built-in
corpus. Exit codes: 0 certified or positive, 1 refuted or negative,
2 unknown or out of budget, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import Any

from .config import Budget
from .const import COMPARE_ISOMORPHIC
from .const import COMPARE_NOT_ISOMORPHIC
from .const import DEFAULT_MAX_DIM
from .const import EXIT_CERTIFIED
from .const import EXIT_INPUT_ERROR
from .const import EXIT_REFUTED
from .const import EXIT_UNKNOWN
from .const import LOGGER_NAME
from .const import REPORT_SCHEMA
from .const import RESULT_OK
from .const import TAG_COSK
from .const import TAG_EX
from .const import TAG_POSTNIKOV
from .const import VERDICT_CERTIFIED
from .const import VERDICT_REFUTED
from .const import VERDICT_UNKNOWN
from .corpus import corpus_fibration
from .corpus import corpus_groupoid
from .corpus import corpus_object
from .corpus import corpus_site
from .exceptions import DimBudgetExceeded
from .exceptions import MalformedSpec
from .exceptions import NotFibrant
from .exceptions import NTypesError
from .exceptions import SearchBudgetExceeded
from .formats import LIFT_SCHEMA
from .formats import SMAP_SCHEMA
from .formats import file_digest
from .formats import read_json
from .formats import validate_schema
from .kan import KanCertificate
from .kan import LiftProblem
from .kan import ex_iterate
from .kan import is_fibration
from .kan import is_kan
from .kan import solve_lift
from .pi import CompareVerdict
from .pi import EquivalenceVerdict
from .pi import pi0
from .pi import pi1
from .pi import pi1_table
from .pi import pi_n_classes
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import build_smap
from .scomplex import build_sset
from .scomplex import standard
from .scomplex import terminal_map
from .sgpd import ConstantSGpd
from .sgpd import SGpd
from .sgpd import adjunction_bijection
from .sgpd import build_groupoid
from .sgpd import diag_nerve
from .sgpd import loop_groupoid
from .sgpd import roundtrip_check
from .sgpd import shift_check
from .sgpd import truncation_check
from .sgpd import unit_check
from .sgpd import wbar
from .site import FiniteCat
from .site import Presheaf
from .site import PresheafMap
from .site import constant_presheaf
from .site import constant_presheaf_map
from .site import free_adjunction_check
from .site import generating_sets
from .site import is_n_fibration_presheaf
from .site import is_projective_fibration
from .site import load_presheaf
from .site import load_presheaf_map
from .site import load_site
from .site import rlp_against
from .site import roundtrip_check as presheaf_roundtrip_check
from .site import sectionwise
from .truncate import cosk
from .truncate import is_n_fibration
from .truncate import is_n_type
from .truncate import postnikov

_LOGGER = logging.getLogger(__name__)

CORPUS_PREFIX = "corpus:"

VERDICT_EXIT = {
    VERDICT_CERTIFIED: EXIT_CERTIFIED,
    VERDICT_REFUTED: EXIT_REFUTED,
    VERDICT_UNKNOWN: EXIT_UNKNOWN,
    RESULT_OK: EXIT_CERTIFIED,
    COMPARE_ISOMORPHIC: EXIT_CERTIFIED,
    COMPARE_NOT_ISOMORPHIC: EXIT_REFUTED,
}


class UsageError(Exception):
    """Command line arguments could not be parsed."""


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


@dataclass
class Outcome:
    """Verdict, machine-readable result and human-readable lines of one run."""

    verdict: str
    result: dict[str, Any]
    lines: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        """Return the process exit code of the verdict."""
        return VERDICT_EXIT[self.verdict]


class Inputs:
    """Loads inputs and records the digest of every file read."""

    def __init__(self, budget: Budget) -> None:
        """Initialize with the run budget."""
        self.budget = budget
        self.digests: dict[str, str] = {}

    def record(self, reference: str | Path) -> tuple[Path, Any]:
        """Read a JSON file and note its digest."""
        path = Path(reference)
        data = read_json(path)
        self.digests[str(path)] = file_digest(path)
        return path, data

    def kind(self, reference: str) -> str:
        """Return sset, smap, presheaf, presheaf_map, groupoid or lift."""
        if reference.startswith(CORPUS_PREFIX):
            name = reference[len(CORPUS_PREFIX) :]
            return "smap" if "->" in name or name.startswith("id(") else "sset"
        data = read_json(Path(reference))
        if not isinstance(data, dict):
            raise MalformedSpec(f"{reference} must hold a JSON record")
        for key, kind in (
            ("cells", "sset"),
            ("assignment", "smap"),
            ("components", "presheaf_map"),
            ("sections", "presheaf"),
            ("top", "lift"),
        ):
            if key in data:
                return kind
        return "groupoid"

    def sset(self, reference: str) -> SSet:
        """Load a simplicial set."""
        if reference.startswith(CORPUS_PREFIX):
            return corpus_object(reference[len(CORPUS_PREFIX) :])
        _, data = self.record(reference)
        return build_sset(data)

    def smap(self, reference: str) -> SMap:
        """Load a simplicial map; its ends are resolved next to the map file."""
        if reference.startswith(CORPUS_PREFIX):
            return corpus_fibration(reference[len(CORPUS_PREFIX) :])
        path, data = self.record(reference)
        checked = validate_schema(SMAP_SCHEMA, data, "simplicial map")
        source = self.sset(self.beside(path, checked["source"]))
        target = self.sset(self.beside(path, checked["target"]))
        return build_smap(checked, source, target)

    @staticmethod
    def beside(path: Path, reference: str) -> str:
        """Resolve a reference relative to the file that names it."""
        if reference.startswith(CORPUS_PREFIX):
            return reference
        return str(path.parent / reference)

    def sgpd(self, reference: str) -> SGpd:
        """Load a simplicial groupoid: G of a simplicial set or a constant groupoid."""
        if reference.startswith(CORPUS_PREFIX):
            name = reference[len(CORPUS_PREFIX) :]
            if name.startswith("G(") and name.endswith(")"):
                return loop_groupoid(corpus_object(name[2:-1]), self.budget)
            return ConstantSGpd(corpus_groupoid(name))
        if self.kind(reference) == "sset":
            return loop_groupoid(self.sset(reference), self.budget)
        _, data = self.record(reference)
        return ConstantSGpd(build_groupoid(data, self.budget))

    def site(self, reference: str | None) -> FiniteCat:
        """Load a site; the one-object site by default."""
        if reference is None:
            return corpus_site("single")
        if reference.startswith(CORPUS_PREFIX):
            return corpus_site(reference[len(CORPUS_PREFIX) :])
        self.record(reference)
        return load_site(Path(reference))

    def presheaf(self, reference: str) -> Presheaf:
        """Load a presheaf file."""
        self.record(reference)
        return load_presheaf(Path(reference))

    def presheaf_map(self, reference: str, site: str | None = None) -> PresheafMap:
        """Load a presheaf map, promoting a plain map to a constant one over the site."""
        if self.kind(reference) == "presheaf_map":
            self.record(reference)
            return load_presheaf_map(Path(reference))
        return constant_presheaf_map(self.site(site), self.smap(reference))


def _certificate(certificate: KanCertificate) -> Outcome:
    lines = [f"{certificate.subject}: {certificate.verdict} up to {certificate.checked_dim}"]
    if certificate.witness is not None:
        lines.append(f"witness: {json.dumps(certificate.witness, sort_keys=True)}")
    if certificate.detail:
        lines.append(certificate.detail)
    return Outcome(certificate.verdict, certificate.to_dict(), lines)


def _equivalence(verdict: EquivalenceVerdict) -> Outcome:
    return Outcome(verdict.verdict, verdict.to_dict(), [f"verdict: {verdict.verdict}"])


def _comparison(verdict: CompareVerdict) -> Outcome:
    return Outcome(verdict.verdict, verdict.to_dict(), [f"groups are {verdict.verdict}"])


def _construction(obj: SSet, extra: dict[str, Any] | None = None) -> Outcome:
    result = {"object": obj.to_dict(), "cell_counts": obj.cell_counts(), **(extra or {})}
    lines = [f"{obj.name}: cell counts {obj.cell_counts()}"]
    if obj.truncated:
        lines.append("enumeration cut at the word bound")
        result["truncated"] = True
    return Outcome(RESULT_OK, result, lines)


def _presheaf_construction(presheaf: Presheaf) -> Outcome:
    result = {
        "name": presheaf.name,
        "sections": {x: s.to_dict() for x, s in presheaf.sections.items()},
        "restrictions": {
            a: f.to_dict()
            for a, f in presheaf.restrictions.items()
            if not presheaf.site.is_identity(a)
        },
    }
    lines = [f"{x}: cell counts {s.cell_counts()}" for x, s in presheaf.sections.items()]
    return Outcome(RESULT_OK, result, lines)


def _cmd_sset_functor(tag: str) -> Callable[[argparse.Namespace, Inputs], Outcome]:
    def run(args: argparse.Namespace, inputs: Inputs) -> Outcome:
        if inputs.kind(args.input) == "presheaf":
            level = args.rounds if tag == TAG_EX else args.n
            presheaf = sectionwise(
                tag, inputs.presheaf(args.input), level, args.max_dim, inputs.budget
            )
            assert isinstance(presheaf, Presheaf)
            return _presheaf_construction(presheaf)
        sset = inputs.sset(args.input)
        if tag == TAG_COSK:
            obj, unit = cosk(sset, args.n, args.max_dim, inputs.budget)
        elif tag == TAG_POSTNIKOV:
            obj, unit = postnikov(
                sset,
                args.n,
                args.max_dim,
                fibrancy_dim=args.fibrancy_dim,
                ex_rounds=args.ex_rounds,
                budget=inputs.budget,
            )
        else:
            obj, unit = ex_iterate(sset, args.rounds, args.max_dim, inputs.budget)
        return _construction(obj, {"map": unit.to_dict()})

    return run


def _cmd_kan_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    return _certificate(is_kan(inputs.sset(args.input), args.max_dim, inputs.budget))


def _cmd_fib_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    if inputs.kind(args.input) == "presheaf_map":
        f = inputs.presheaf_map(args.input)
        return _certificate(is_projective_fibration(f, args.max_dim, inputs.budget))
    return _certificate(is_fibration(inputs.smap(args.input), args.max_dim, inputs.budget))


def _cmd_nfib_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    if inputs.kind(args.input) == "presheaf_map":
        f = inputs.presheaf_map(args.input)
        return _certificate(is_n_fibration_presheaf(f, args.n, args.max_dim, inputs.budget))
    f = inputs.smap(args.input)
    return _certificate(is_n_fibration(f, args.n, args.max_dim, inputs.budget))


def _cmd_ntype_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    if inputs.kind(args.input) == "presheaf":
        presheaf = inputs.presheaf(args.input)
        site = presheaf.site
        point = constant_presheaf(site, standard(0))
        f = PresheafMap(
            presheaf,
            point,
            {x: terminal_map(presheaf.sections[x]) for x in site.objects},
            f"{presheaf.name}->*",
        ).validate()
        return _certificate(is_n_fibration_presheaf(f, args.n, args.max_dim, inputs.budget))
    return _certificate(is_n_type(inputs.sset(args.input), args.n, args.max_dim, inputs.budget))


def _cmd_pi0(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    components = pi0(inputs.sset(args.input))
    return Outcome(
        RESULT_OK,
        {"components": components, "count": len(components)},
        [f"{len(components)} components"] + [" ".join(c) for c in components],
    )


def _cmd_pi1(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    sset = inputs.sset(args.input)
    if args.vertex is not None:
        table = {args.vertex: pi1(sset, args.vertex)}
    else:
        table = pi1_table(sset)
    return Outcome(
        RESULT_OK,
        {"groups": {v: p.to_dict() for v, p in table.items()}},
        [f"{v}: {p.to_text()}" for v, p in table.items()],
    )


def _cmd_pin(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    sset = inputs.sset(args.input)
    vertex = args.vertex if args.vertex is not None else sset.nondegenerate(0)[0]
    classes = pi_n_classes(sset, vertex, args.n, inputs.budget)
    return Outcome(
        RESULT_OK, classes.to_dict(), [f"pi_{args.n} at {vertex}: {classes.count} classes"]
    )


def _cmd_loopgpd(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    gpd = loop_groupoid(inputs.sset(args.input), inputs.budget)
    levels = {}
    lines = [f"{gpd.name}: objects {' '.join(gpd.objects)}"]
    for n in range(args.max_dim + 1):
        generators = {
            name: f"{gpd.sset.vertex(ref, 0)} -> {gpd.sset.vertex(ref, 1)}"
            for name, ref in gpd.generators(n).items()
        }
        levels[str(n)] = generators
        lines.append(f"level {n}: {len(generators)} generators")
    result = {"name": gpd.name, "objects": list(gpd.objects), "levels": levels}
    return Outcome(RESULT_OK, result, lines)


def _cmd_wbar(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    return _construction(wbar(inputs.sgpd(args.input), args.max_dim, inputs.budget))


def _cmd_dnerve(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    return _construction(diag_nerve(inputs.sgpd(args.input), args.max_dim, inputs.budget))


def _cmd_unit_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    return _equivalence(unit_check(inputs.sset(args.input), args.max_dim, inputs.budget))


def _cmd_adjunction_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    sset = inputs.sset(args.input)
    if args.free is not None:
        presheaf = inputs.presheaf(args.other)
        count = free_adjunction_check(args.free, sset, presheaf, inputs.budget)
    else:
        count = adjunction_bijection(sset, inputs.sgpd(args.other), inputs.budget)
    verdict = VERDICT_CERTIFIED if count.bijective else VERDICT_REFUTED
    return Outcome(
        verdict,
        count.to_dict(),
        [f"left {count.left}, right {count.right}, bijective {count.bijective}"],
    )


def _cmd_shift_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    gpd = inputs.sgpd(args.input)
    vertex = args.vertex if args.vertex is not None else gpd.objects[0]
    return _comparison(shift_check(gpd, vertex, args.s, inputs.budget))


def _cmd_truncation_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    gpd = inputs.sgpd(args.input)
    return _equivalence(truncation_check(gpd, args.n, args.max_dim, inputs.budget))


def _cmd_roundtrip(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    if inputs.kind(args.input) == "presheaf":
        presheaf = inputs.presheaf(args.input)
        return _equivalence(
            presheaf_roundtrip_check(presheaf, args.n, args.max_dim, inputs.budget)
        )
    return _equivalence(
        roundtrip_check(inputs.sset(args.input), args.n, args.max_dim, inputs.budget)
    )


def _cmd_gen_sets(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    sets = generating_sets(inputs.site(args.site), args.n, args.max_dim)
    record = sets.to_dict()
    return Outcome(
        RESULT_OK, record, [f"{family}: {len(labels)} maps" for family, labels in record.items()]
    )


def _cmd_rlp_check(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    f = inputs.presheaf_map(args.input, args.site)
    sets = generating_sets(f.source.site, args.n, args.max_dim)
    family = {"I": sets.i_proj, "J": sets.j_proj, "Jn": sets.j_n}[args.family]
    certificate = rlp_against(
        f, family, inputs.budget, max_squares=args.max_squares, seed=args.seed
    )
    return _certificate(certificate)


def _cmd_lift(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    path, data = inputs.record(args.input)
    checked = validate_schema(LIFT_SCHEMA, data, "lift problem")
    maps = {
        key: inputs.smap(inputs.beside(path, checked[key])) for key in ("i", "f", "top", "bottom")
    }
    problem = LiftProblem(maps["i"], maps["f"], maps["top"], maps["bottom"]).validate()
    lift = solve_lift(problem, inputs.budget)
    if lift is None:
        return Outcome(VERDICT_REFUTED, {"lift": None}, ["no lift exists"])
    return Outcome(VERDICT_CERTIFIED, {"lift": lift.to_dict()}, ["lift found"])


COMMANDS: dict[str, tuple[Callable[[argparse.Namespace, Inputs], Outcome], str]] = {
    "cosk": (_cmd_sset_functor(TAG_COSK), "coskeleton cosk_n"),
    "postnikov": (_cmd_sset_functor(TAG_POSTNIKOV), "Postnikov section P_n"),
    "ex": (_cmd_sset_functor(TAG_EX), "Kan's Ex functor"),
    "kan-check": (_cmd_kan_check, "horn filling up to --max-dim"),
    "fib-check": (_cmd_fib_check, "Kan or projective fibration check"),
    "nfib-check": (_cmd_nfib_check, "n-fibration check"),
    "ntype-check": (_cmd_ntype_check, "n-type check"),
    "pi0": (_cmd_pi0, "connected components"),
    "pi1": (_cmd_pi1, "fundamental group presentations"),
    "pin": (_cmd_pin, "classes of based n-spheres"),
    "loopgpd": (_cmd_loopgpd, "loop groupoid generators"),
    "wbar": (_cmd_wbar, "classifying space W"),
    "dnerve": (_cmd_dnerve, "diagonal nerve dB"),
    "unit-check": (_cmd_unit_check, "unit X -> W G X"),
    "adjunction-check": (_cmd_adjunction_check, "hom-set bijection of G and W or of L_U"),
    "shift-check": (_cmd_shift_check, "pi_s dB H against pi_{s-1} H(x, x)"),
    "truncation-check": (_cmd_truncation_check, "homotopy of dB P_n H"),
    "roundtrip": (_cmd_roundtrip, "W P_{n-1} G against P_n W G"),
    "gen-sets": (_cmd_gen_sets, "generating set labels"),
    "rlp-check": (_cmd_rlp_check, "right lifting against a generating set"),
    "lift": (_cmd_lift, "solve a lifting problem"),
}

_TWO_INPUTS = ("adjunction-check",)
_NO_INPUT = ("gen-sets",)


def _budget(text: str | None) -> Budget:
    """Parse ``key=value,...`` or a JSON file of budget overrides."""
    if text is None:
        return Budget()
    if "=" not in text:
        return Budget.from_mapping(read_json(Path(text)))
    overrides: dict[str, Any] = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        try:
            overrides[key.strip()] = int(value)
        except ValueError as err:
            raise MalformedSpec(f"Budget value for {key!r} must be an integer") from err
    return Budget.from_mapping(overrides)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with every subcommand."""
    parser = _Parser(prog="ntypes", description="Truncated simplicial homotopy kernel.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, summary) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=summary, description=summary)
        if name not in _NO_INPUT:
            sub.add_argument("input", help="input file or corpus:<name>")
        if name in _TWO_INPUTS:
            sub.add_argument("other", help="groupoid, or presheaf with --free")
            sub.add_argument("--free", help="site object U for the L_U adjunction")
        sub.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
        sub.add_argument("--n", type=int, default=1 if name == "roundtrip" else 0)
        sub.add_argument("--budget", help="key=value,... or a JSON file")
        sub.add_argument("--site", help="site file or corpus:single / corpus:arrow")
        sub.add_argument("--format", choices=("json", "text"), default="json")
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--out", type=Path)
        sub.add_argument("--no-time", action="store_true", help="omit the wall time")
        sub.add_argument("--vertex")
        sub.add_argument("--s", type=int, default=1)
        sub.add_argument("--rounds", type=int, default=1)
        sub.add_argument("--ex-rounds", type=int, default=0)
        sub.add_argument("--fibrancy-dim", type=int)
        sub.add_argument("--family", choices=("I", "J", "Jn"), default="Jn")
        sub.add_argument("--max-squares", type=int)
    return parser


def _outcome(args: argparse.Namespace, inputs: Inputs) -> Outcome:
    handler, _ = COMMANDS[args.command]
    try:
        return handler(args, inputs)
    except NotFibrant as err:
        return Outcome(VERDICT_REFUTED, {"error": str(err), "witness": err.witness}, [str(err)])
    except (SearchBudgetExceeded, DimBudgetExceeded) as err:
        _LOGGER.warning("%s stopped: %s", args.command, err)
        return Outcome(VERDICT_UNKNOWN, {"error": str(err)}, [str(err)])


def _render(report: dict[str, Any], lines: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    header = [f"{report['command']}: {report['verdict']} (exit {report['exit_code']})"]
    return "\n".join(header + list(lines)) + "\n"


def run(argv: Sequence[str]) -> tuple[int, dict[str, Any]]:
    """Run one command and return its exit code and report.

    The report is also written to stdout or --out.
    """
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as err:
        print(f"ntypes: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR, {"schema": REPORT_SCHEMA, "error": str(err)}
    _configure_logging(args.verbose)
    started = time.perf_counter()
    report: dict[str, Any] = {"schema": REPORT_SCHEMA, "command": args.command, "argv": list(argv)}
    lines: list[str]
    try:
        inputs = Inputs(_budget(args.budget))
        report["budget"] = inputs.budget.as_dict()
        outcome = _outcome(args, inputs)
        report["inputs"] = dict(sorted(inputs.digests.items()))
        report["verdict"] = outcome.verdict
        report["result"] = outcome.result
        code = outcome.exit_code
        lines = outcome.lines
    except NTypesError as err:
        _LOGGER.error("%s failed: %s", args.command, err)
        report["verdict"] = "error"
        report["error"] = {"type": type(err).__name__, "message": str(err)}
        code = EXIT_INPUT_ERROR
        lines = [f"{type(err).__name__}: {err}"]
    report["exit_code"] = code
    if not args.no_time:
        report["wall_time"] = round(time.perf_counter() - started, 3)
    text = _render(report, lines, args.format)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code, report


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger(LOGGER_NAME).setLevel(level)


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point."""
    try:
        code, _ = run(sys.argv[1:] if argv is None else argv)
    except Exception:  # pylint: disable=broad-except
        _LOGGER.exception("Unexpected error")
        return EXIT_INPUT_ERROR
    return code
