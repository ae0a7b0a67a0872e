"""Presheaves over a finite site with the trivial topology.

Under the trivial topology sheafification is the identity, so local weak
equivalences are sectionwise ones and every functor of the kernel lifts to
presheaves by applying it at each object. Sections are independent and are
computed concurrently; results are always collected in site-object order.
"""

from __future__ import annotations

import asyncio
import logging
import random
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import Any
from typing import TypeVar

from .config import Budget
from .config import resolve
from .const import TAG_COSK
from .const import TAG_DIAG_NERVE
from .const import TAG_EX
from .const import TAG_LOOP_GROUPOID
from .const import TAG_POSTNIKOV
from .const import TAG_POSTNIKOV_GPD
from .const import TAG_WBAR
from .const import VERDICT_CERTIFIED
from .const import VERDICT_REFUTED
from .const import VERDICT_UNKNOWN
from .exceptions import MalformedSpec
from .exceptions import NonSimplicialMap
from .exceptions import NTypesError
from .exceptions import SearchBudgetExceeded
from .exceptions import SectionError
from .exceptions import UnknownObject
from .formats import PRESHEAF_MAP_SCHEMA
from .formats import PRESHEAF_SCHEMA
from .formats import SITE_SCHEMA
from .formats import parse_arrow
from .formats import read_json
from .formats import validate_schema
from .kan import KanCertificate
from .kan import ex_iterate
from .kan import ex_map_iterate
from .kan import is_fibration
from .pi import EquivalenceVerdict
from .pi import weak_equivalence_check
from .scomplex import Product
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import boundary
from .scomplex import build_smap
from .scomplex import build_sset
from .scomplex import codegeneracy
from .scomplex import coface
from .scomplex import compose
from .scomplex import coproduct
from .scomplex import from_simplicial_object
from .scomplex import horn
from .scomplex import identity_map
from .scomplex import inclusion
from .scomplex import iter_homs
from .scomplex import product
from .scomplex import product_map
from .scomplex import standard
from .scomplex import standard_map
from .sgpd import SGpd
from .sgpd import SGpdMap
from .sgpd import diag_nerve
from .sgpd import diag_nerve_map
from .sgpd import loop_groupoid
from .sgpd import loop_groupoid_map
from .sgpd import postnikov_gpd
from .sgpd import postnikov_gpd_map
from .sgpd import roundtrip_check as sset_roundtrip_check
from .sgpd import wbar
from .sgpd import wbar_map
from .truncate import AdjunctionCount
from .truncate import cosk
from .truncate import cosk_map
from .truncate import is_n_fibration
from .truncate import postnikov

_LOGGER = logging.getLogger(__name__)

T = TypeVar("T")

SECTIONWISE_TAGS = (
    TAG_COSK,
    TAG_POSTNIKOV,
    TAG_EX,
    TAG_LOOP_GROUPOID,
    TAG_WBAR,
    TAG_DIAG_NERVE,
    TAG_POSTNIKOV_GPD,
)


class FiniteCat:
    """A finite category given by arrows and a composition table."""

    def __init__(
        self,
        name: str,
        objects: Iterable[str],
        arrows: Mapping[str, tuple[str, str]],
        table: Mapping[tuple[str, str], str],
        identities: Mapping[str, str] | None = None,
    ) -> None:
        """Initialize and validate the category.

        Identities default to ``1_<object>`` and their composites are filled in.

        Raises:
            MalformedSpec: If a category law fails.
        """
        self.name = name
        self.objects = tuple(objects)
        self.identities = {x: f"1_{x}" for x in self.objects} | dict(identities or {})
        self.ends = dict(arrows)
        for x, ident in self.identities.items():
            self.ends[ident] = (x, x)
        self.table = dict(table)
        for f, (x, y) in self.ends.items():
            self.table.setdefault((self.identities[y], f), f)
            self.table.setdefault((f, self.identities[x]), f)
        self.validate()

    def validate(self) -> None:
        """Check closure, identity laws and associativity of the full table."""
        names = sorted(self.ends)
        for f in names:
            x, y = self.ends[f]
            if x not in self.objects or y not in self.objects:
                raise MalformedSpec(f"{self.name}: arrow {f!r} has an unknown end")
            if self.table[(self.identities[y], f)] != f or self.table[(f, self.identities[x])] != f:
                raise MalformedSpec(f"{self.name}: identity law fails at {f!r}")
        for g in names:
            for f in names:
                if self.ends[f][1] != self.ends[g][0]:
                    continue
                h = self.table.get((g, f))
                if h is None or self.ends.get(h) != (self.ends[f][0], self.ends[g][1]):
                    raise MalformedSpec(f"{self.name}: {g} after {f} is missing or ill-typed")
        for f in names:
            for g in self.arrows_from(self.ends[f][1]):
                for h in self.arrows_from(self.ends[g][1]):
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        raise MalformedSpec(f"{self.name}: composition is not associative")

    @classmethod
    def single(cls, obj: str = "U") -> FiniteCat:
        """Return the category with one object and only its identity."""
        return cls("pt", [obj], {}, {})

    @classmethod
    def arrow(cls, source: str = "V", target: str = "U", name: str = "a") -> FiniteCat:
        """Return the category with two objects and one arrow source -> target."""
        return cls("arrow", [target, source], {name: (source, target)}, {})

    @classmethod
    def from_spec(cls, spec: Mapping[str, Any]) -> FiniteCat:
        """Build a site from its description.

        Raises:
            MalformedSpec: If the record is malformed or a category law fails.
        """
        data = validate_schema(SITE_SCHEMA, spec, "site")
        table: dict[tuple[str, str], str] = {}
        for pair, result in data["compose"].items():
            parts = pair.split()
            if len(parts) != 2:
                raise MalformedSpec(f"Composition key {pair!r} must name two arrows")
            table[(parts[0], parts[1])] = result
        arrows = {f: parse_arrow(text) for f, text in data["arrows"].items()}
        return cls(data["name"], data["objects"], arrows, table, data["identities"])

    def check_object(self, x: str) -> None:
        """Raise UnknownObject unless x is an object."""
        if x not in self.objects:
            raise UnknownObject(f"{x!r} is not an object of site {self.name}")

    def hom(self, x: str, y: str) -> list[str]:
        """Return the arrows x -> y."""
        return sorted(f for f, ends in self.ends.items() if ends == (x, y))

    def arrows_from(self, x: str) -> list[str]:
        """Return the arrows with source x."""
        return sorted(f for f, ends in self.ends.items() if ends[0] == x)

    def compose(self, g: str, f: str) -> str:
        """Return g after f."""
        return self.table[(g, f)]

    def is_identity(self, f: str) -> bool:
        """Return True for identity arrows."""
        return f in self.identities.values()


@dataclass(frozen=True)
class Presheaf:
    """A simplicial presheaf: a section per object and a restriction per arrow.

    The restriction along a: V -> U is a map X(U) -> X(V).
    """

    site: FiniteCat
    name: str
    sections: Mapping[str, SSet]
    restrictions: Mapping[str, SMap]

    @classmethod
    def build(
        cls,
        site: FiniteCat,
        name: str,
        sections: Mapping[str, SSet],
        restrictions: Mapping[str, SMap] | None = None,
    ) -> Presheaf:
        """Build a presheaf, filling identity restrictions, and validate it."""
        for x in sections:
            site.check_object(x)
        maps = dict(restrictions or {})
        for x, ident in site.identities.items():
            maps.setdefault(ident, identity_map(sections[x]))
        presheaf = cls(site, name, dict(sections), maps)
        presheaf.validate()
        return presheaf

    def validate(self) -> None:
        """Check sections, restriction ends and functoriality.

        Raises:
            MalformedSpec: If a section or restriction is missing or ill-typed.
            NonSimplicialMap: If the composition law fails.
        """
        for x in self.site.objects:
            if x not in self.sections:
                raise MalformedSpec(f"{self.name}: no section at {x!r}")
        for a, (v, u) in self.site.ends.items():
            restriction = self.restrictions.get(a)
            if restriction is None:
                raise MalformedSpec(f"{self.name}: no restriction along {a!r}")
            if restriction.source != self.sections[u] or restriction.target != self.sections[v]:
                raise MalformedSpec(f"{self.name}: restriction along {a!r} has the wrong ends")
        for f in self.site.ends:
            for g in self.site.arrows_from(self.site.ends[f][1]):
                expected = compose(self.restrictions[f], self.restrictions[g])
                actual = self.restrictions[self.site.compose(g, f)]
                if actual.assignment != expected.assignment:
                    raise NonSimplicialMap(
                        f"{self.name}: restriction along {g} after {f} is not functorial",
                        cell=self.site.compose(g, f),
                    )

    def at(self, x: str) -> SSet:
        """Return the section at x."""
        self.site.check_object(x)
        return self.sections[x]


@dataclass(frozen=True)
class PresheafMap:
    """A natural transformation between simplicial presheaves."""

    source: Presheaf
    target: Presheaf
    components: Mapping[str, SMap]
    name: str = ""

    def validate(self) -> PresheafMap:
        """Check component ends and every naturality square.

        Raises:
            MalformedSpec: If a component is missing or ill-typed.
            NonSimplicialMap: If a naturality square does not commute.
        """
        for x in self.source.site.objects:
            component = self.components.get(x)
            if component is None:
                raise MalformedSpec(f"{self.label}: no component at {x!r}")
            if component.source != self.source.sections[x] or (
                component.target != self.target.sections[x]
            ):
                raise MalformedSpec(f"{self.label}: component at {x!r} has the wrong ends")
        for a, (v, u) in self.source.site.ends.items():
            left = compose(self.target.restrictions[a], self.components[u])
            right = compose(self.components[v], self.source.restrictions[a])
            if left.assignment != right.assignment:
                raise NonSimplicialMap(f"{self.label}: not natural along {a!r}", cell=a)
        return self

    @property
    def label(self) -> str:
        """Return a display name."""
        return self.name or f"{self.source.name}->{self.target.name}"

    def key(self) -> tuple[Any, ...]:
        """Return a hashable identity of the components."""
        return tuple(
            (x, tuple(sorted(self.components[x].assignment.items())))
            for x in self.source.site.objects
        )


@dataclass(frozen=True)
class GpdPresheaf:
    """A presheaf of simplicial groupoids; restrictions are simplicial functors."""

    site: FiniteCat
    name: str
    sections: Mapping[str, SGpd]
    restrictions: Mapping[str, SGpdMap]

    def restriction(self, a: str) -> SGpdMap:
        """Return the functor along a, the identity functor for identities."""
        if a in self.restrictions:
            return self.restrictions[a]
        if not self.site.is_identity(a):
            raise MalformedSpec(f"{self.name}: no restriction along {a!r}")
        section = self.sections[self.site.ends[a][0]]
        return SGpdMap(section, section, {x: x for x in section.objects}, lambda _n, f: f)

    def validate(self, max_level: int = 0) -> None:
        """Check functoriality on objects and on arrows of levels 0..max_level.

        Arrows are taken from the enumerated part of each level.

        Raises:
            NonSimplicialMap: If a composite of restrictions differs from the
                restriction along the composite.
        """
        for f in self.site.ends:
            for g in self.site.arrows_from(self.site.ends[f][1]):
                outer, inner = self.restriction(f), self.restriction(g)
                total = self.restriction(self.site.compose(g, f))
                section = self.sections[self.site.ends[g][1]]
                for x in section.objects:
                    if outer.objects[inner.objects[x]] != total.objects[x]:
                        raise NonSimplicialMap(
                            f"{self.name}: object map along {g} after {f} is not functorial",
                            cell=x,
                        )
                    for y in section.objects:
                        for level in range(max_level + 1):
                            arrows = section.arrows(level, x, y)[0]
                            for arrow in arrows:
                                if outer(level, inner(level, arrow)) == total(level, arrow):
                                    continue
                                raise NonSimplicialMap(
                                    f"{self.name}: level-{level} arrow map along {g} after "
                                    f"{f} is not functorial",
                                    cell=arrow.label,
                                )


@dataclass(frozen=True)
class GpdPresheafMap:
    """A natural transformation between presheaves of simplicial groupoids."""

    source: GpdPresheaf
    target: GpdPresheaf
    components: Mapping[str, SGpdMap]
    name: str = ""


def constant_presheaf(site: FiniteCat, sset: SSet, name: str | None = None) -> Presheaf:
    """Return the presheaf with every section sset and identity restrictions."""
    return Presheaf.build(
        site,
        name or f"const({sset.name})",
        {x: sset for x in site.objects},
        {a: identity_map(sset) for a in site.ends},
    )


def constant_presheaf_map(site: FiniteCat, f: SMap) -> PresheafMap:
    """Return the map of constant presheaves with every component f."""
    return PresheafMap(
        constant_presheaf(site, f.source),
        constant_presheaf(site, f.target),
        {x: f for x in site.objects},
        f"const({f.source.name}->{f.target.name})",
    )


def _free_sections(site: FiniteCat, obj: str, sset: SSet) -> dict[str, tuple[SSet, list[str]]]:
    sections = {}
    for v in site.objects:
        tags = site.hom(v, obj)
        union, _ = coproduct([sset] * len(tags), f"L_{obj}({sset.name})({v})", tags)
        sections[v] = (union, tags)
    return sections


def free_presheaf(site: FiniteCat, obj: str, sset: SSet) -> Presheaf:
    """Return L_U(K): one copy of K per arrow V -> U, restricted by composition.

    Cells of the copy indexed by a: V -> U are named ``<a>:<cell>``.

    Raises:
        UnknownObject: If obj is not in the site.
    """
    site.check_object(obj)
    sections = _free_sections(site, obj, sset)
    restrictions = {}
    for b, (w, v) in site.ends.items():
        restrictions[b] = SMap(
            sections[v][0],
            sections[w][0],
            {
                f"{a}:{cell}": SimplexRef(d, f"{site.compose(a, b)}:{cell}")
                for a in sections[v][1]
                for d, cell in sset.all_cells()
            },
        )
    return Presheaf.build(
        site, f"L_{obj}({sset.name})", {v: sections[v][0] for v in site.objects}, restrictions
    )


def free_presheaf_map(site: FiniteCat, obj: str, f: SMap) -> PresheafMap:
    """Return L_U(f) copy by copy."""
    source = free_presheaf(site, obj, f.source)
    target = free_presheaf(site, obj, f.target)
    components = {}
    for v in site.objects:
        assignment = {}
        for a in site.hom(v, obj):
            for cell, ref in f.assignment.items():
                assignment[f"{a}:{cell}"] = SimplexRef(
                    ref.dim, f"{a}:{ref.base}", ref.degeneracies
                )
        components[v] = SMap(source.sections[v], target.sections[v], assignment)
    return PresheafMap(
        source, target, components, f"L_{obj}({f.source.name}->{f.target.name})"
    )


def iter_presheaf_homs(
    source: Presheaf,
    target: Presheaf,
    *,
    fixed: Mapping[str, Mapping[str, SimplexRef]] | None = None,
    over: tuple[PresheafMap, PresheafMap] | None = None,
    budget: Budget | None = None,
) -> Iterator[PresheafMap]:
    """Yield the natural maps source -> target.

    Components are chosen object by object and every naturality square
    between chosen objects is checked as soon as both ends are placed.

    Args:
        source: Domain presheaf.
        target: Codomain presheaf.
        fixed: Prescribed cell images per object.
        over: Pair (p, q) with p: target -> B and q: source -> B; only maps h
            with p after h equal to q are produced.
        budget: Search budget.

    Raises:
        SearchBudgetExceeded: If a sectionwise search runs out of nodes.
    """
    site = source.site
    objects = list(site.objects)
    chosen: dict[str, SMap] = {}

    def natural(x: str) -> bool:
        for a, (v, u) in site.ends.items():
            if x not in (u, v) or u not in chosen or v not in chosen:
                continue
            left = compose(target.restrictions[a], chosen[u])
            right = compose(chosen[v], source.restrictions[a])
            if left.assignment != right.assignment:
                return False
        return True

    def extend(index: int) -> Iterator[PresheafMap]:
        if index == len(objects):
            yield PresheafMap(source, target, dict(chosen))
            return
        x = objects[index]
        section_over = None
        if over is not None:
            section_over = (over[0].components[x], over[1].components[x])
        for component in iter_homs(
            source.sections[x],
            target.sections[x],
            fixed=(fixed or {}).get(x),
            over=section_over,
            budget=budget,
        ):
            chosen[x] = component
            if natural(x):
                yield from extend(index + 1)
            del chosen[x]

    yield from extend(0)


def presheaf_homs(
    source: Presheaf, target: Presheaf, budget: Budget | None = None
) -> list[PresheafMap]:
    """Return every natural map source -> target."""
    maps = list(iter_presheaf_homs(source, target, budget=budget))
    _LOGGER.debug("Found %d presheaf maps %s -> %s", len(maps), source.name, target.name)
    return maps


def free_adjunction_check(
    obj: str, sset: SSet, presheaf: Presheaf, budget: Budget | None = None
) -> AdjunctionCount:
    """Compare Hom(L_U K, X) with Hom(K, X(U)) and check both transposes.

    A map out of L_U K is sent to its component at U on the identity copy;
    a map g: K -> X(U) is sent to the map with copy a going to X(a) after g.
    """
    site = presheaf.site
    free = free_presheaf(site, obj, sset)
    ident = site.identities[obj]
    left = presheaf_homs(free, presheaf, budget)
    right = list(iter_homs(sset, presheaf.sections[obj], budget=budget))

    def restrict_to_unit(h: PresheafMap) -> dict[str, SimplexRef]:
        component = h.components[obj].assignment
        return {cell: component[f"{ident}:{cell}"] for _, cell in sset.all_cells()}

    def extend(g: SMap) -> PresheafMap:
        components = {}
        for v in site.objects:
            assignment = {}
            for a in site.hom(v, obj):
                restriction = presheaf.restrictions[a]
                for d, cell in sset.all_cells():
                    assignment[f"{a}:{cell}"] = restriction(g(SimplexRef(d, cell)))
            components[v] = SMap(free.sections[v], presheaf.sections[v], assignment)
        return PresheafMap(free, presheaf, components)

    transposed = {tuple(sorted(restrict_to_unit(h).items())) for h in left}
    right_keys = {tuple(sorted(g.assignment.items())) for g in right}
    round_trip = all(
        restrict_to_unit(extend(g).validate()) == g.assignment for g in right
    )
    round_trip = round_trip and all(
        extend(SMap(sset, presheaf.sections[obj], restrict_to_unit(h))).key() == h.key()
        for h in left
    )
    bijective = round_trip and transposed == right_keys and len(left) == len(right)
    _LOGGER.info(
        "Hom(L_%s %s, %s) has %d elements, Hom(%s, X(%s)) has %d",
        obj,
        sset.name,
        presheaf.name,
        len(left),
        sset.name,
        obj,
        len(right),
    )
    return AdjunctionCount(len(left), len(right), bijective)


async def _fan_out(site: FiniteCat, work: Callable[[str], T]) -> dict[str, T]:
    """Run work at every object in worker threads, keyed in site order."""

    async def run(x: str) -> T:
        try:
            return await asyncio.to_thread(work, x)
        except SectionError:
            raise
        except NTypesError as err:
            raise SectionError(f"Section {x}: {err}", section=x) from err

    results = await asyncio.gather(*(run(x) for x in site.objects))
    return dict(zip(site.objects, results))


@dataclass(frozen=True)
class _Functor:
    on_section: Callable[[Any], Any]
    on_restriction: Callable[[Any, Any, Any], Any]
    groupoids_in: bool = False
    groupoids_out: bool = False


def _functor(tag: str, n: int, max_dim: int, budget: Budget | None) -> _Functor:
    if tag == TAG_COSK:
        return _Functor(
            lambda x: cosk(x, n, max_dim, budget)[0],
            lambda f, _s, _t: cosk_map(f, n, max_dim, budget),
        )
    if tag == TAG_POSTNIKOV:
        return _Functor(
            lambda x: postnikov(x, n, max_dim, budget=budget)[0],
            lambda f, _s, _t: cosk_map(f, n + 1, max_dim, budget),
        )
    if tag == TAG_EX:
        return _Functor(
            lambda x: ex_iterate(x, n, max_dim, budget)[0],
            lambda f, _s, _t: ex_map_iterate(f, n, max_dim, budget),
        )
    if tag == TAG_LOOP_GROUPOID:
        return _Functor(
            lambda x: loop_groupoid(x, budget),
            lambda f, _s, _t: loop_groupoid_map(f, budget),
            groupoids_out=True,
        )
    if tag == TAG_WBAR:
        return _Functor(
            lambda h: wbar(h, max_dim, budget),
            lambda phi, _s, _t: wbar_map(phi, max_dim, budget),
            groupoids_in=True,
        )
    if tag == TAG_DIAG_NERVE:
        return _Functor(
            lambda h: diag_nerve(h, max_dim, budget),
            lambda phi, _s, _t: diag_nerve_map(phi, max_dim, budget),
            groupoids_in=True,
        )
    if tag == TAG_POSTNIKOV_GPD:
        return _Functor(
            lambda h: postnikov_gpd(h, n, max_dim, budget=budget),
            lambda phi, s, t: postnikov_gpd_map(phi, s, t),
            groupoids_in=True,
            groupoids_out=True,
        )
    raise MalformedSpec(f"Unknown sectionwise functor {tag!r}; expected one of {SECTIONWISE_TAGS}")


async def async_sectionwise(
    tag: str,
    presheaf: Presheaf | GpdPresheaf,
    n: int = 0,
    max_dim: int = 3,
    budget: Budget | None = None,
) -> Presheaf | GpdPresheaf:
    """Apply a functor at every section and to every restriction.

    Args:
        tag: One of SECTIONWISE_TAGS.
        presheaf: Input presheaf of simplicial sets or of simplicial groupoids.
        n: Truncation level for cosk, postnikov and postnikov_gpd, and the
            number of rounds for ex.
        max_dim: Highest dimension built.
        budget: Search budget.

    Raises:
        MalformedSpec: If the tag is unknown or does not fit the input kind.
        SectionError: If the functor fails at some object.
    """
    functor = _functor(tag, n, max_dim, budget)
    if functor.groupoids_in != isinstance(presheaf, GpdPresheaf):
        raise MalformedSpec(f"{tag} does not apply to {presheaf.name}")
    site = presheaf.site
    sections = await _fan_out(site, lambda x: functor.on_section(presheaf.sections[x]))
    arrows = [a for a in site.ends if not site.is_identity(a)]

    def restrict(a: str) -> Any:
        v, u = site.ends[a]
        return functor.on_restriction(presheaf.restrictions[a], sections[u], sections[v])

    results = await asyncio.gather(*(asyncio.to_thread(restrict, a) for a in arrows))
    restrictions = dict(zip(arrows, results))
    name = f"{tag}({presheaf.name})"
    if functor.groupoids_out:
        result = GpdPresheaf(site, name, sections, restrictions)
        result.validate(max_level=max(max_dim - 1, 0))
        return result
    return Presheaf.build(site, name, sections, restrictions)


def sectionwise(
    tag: str,
    presheaf: Presheaf | GpdPresheaf,
    n: int = 0,
    max_dim: int = 3,
    budget: Budget | None = None,
) -> Presheaf | GpdPresheaf:
    """Apply a functor sectionwise; see async_sectionwise."""
    return asyncio.run(async_sectionwise(tag, presheaf, n, max_dim, budget))


def sectionwise_map(
    tag: str, f: PresheafMap, n: int = 0, max_dim: int = 3, budget: Budget | None = None
) -> PresheafMap:
    """Apply cosk, postnikov or ex to a map of simplicial presheaves."""
    functor = _functor(tag, n, max_dim, budget)
    if functor.groupoids_in or functor.groupoids_out:
        raise MalformedSpec(f"{tag} does not produce maps of simplicial presheaves")
    source = sectionwise(tag, f.source, n, max_dim, budget)
    target = sectionwise(tag, f.target, n, max_dim, budget)
    assert isinstance(source, Presheaf) and isinstance(target, Presheaf)
    components = {
        x: functor.on_restriction(f.components[x], source.sections[x], target.sections[x])
        for x in f.source.site.objects
    }
    return PresheafMap(source, target, components, f"{tag}({f.label})")


def _aggregate_certificates(
    subject: str, dim: int, certificates: Mapping[str, KanCertificate]
) -> KanCertificate:
    for x, certificate in certificates.items():
        if certificate.is_refuted:
            witness = {"section": x, **(certificate.witness or {})}
            detail = f"section {x}: {certificate.detail}"
            return KanCertificate.refuted(subject, dim, witness, detail)
    unknown = [x for x, c in certificates.items() if not c.is_certified]
    if unknown:
        _LOGGER.warning("%s is undecided at sections %s", subject, unknown)
        return KanCertificate.unknown(subject, dim, f"undecided at {', '.join(unknown)}")
    return KanCertificate.certified(subject, dim, f"{len(certificates)} sections")


async def async_is_projective_fibration(
    f: PresheafMap, up_to_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Decide sectionwise Kan fibrancy of f; a refutation names its section."""
    certificates = await _fan_out(
        f.source.site, lambda x: is_fibration(f.components[x], up_to_dim, budget)
    )
    return _aggregate_certificates(f.label, up_to_dim, certificates)


def is_projective_fibration(
    f: PresheafMap, up_to_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Decide whether f is a projective fibration up to up_to_dim."""
    return asyncio.run(async_is_projective_fibration(f, up_to_dim, budget))


async def async_is_n_fibration_presheaf(
    f: PresheafMap, n: int, up_to_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Run the matching-set n-fibration criterion at every section."""
    certificates = await _fan_out(
        f.source.site, lambda x: is_n_fibration(f.components[x], n, up_to_dim, budget)
    )
    return _aggregate_certificates(f.label, up_to_dim, certificates)


def is_n_fibration_presheaf(
    f: PresheafMap, n: int, up_to_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Decide whether f is an n-fibration of presheaves."""
    return asyncio.run(async_is_n_fibration_presheaf(f, n, up_to_dim, budget))


def _aggregate_verdicts(verdicts: Mapping[str, EquivalenceVerdict]) -> EquivalenceVerdict:
    evidence = {x: v.to_dict() for x, v in verdicts.items()}
    if any(v.is_refuted for v in verdicts.values()):
        return EquivalenceVerdict(VERDICT_REFUTED, evidence)
    if all(v.is_certified for v in verdicts.values()):
        return EquivalenceVerdict(VERDICT_CERTIFIED, evidence)
    return EquivalenceVerdict(VERDICT_UNKNOWN, evidence)


async def async_is_local_weq(
    f: PresheafMap, max_s: int = 1, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Test f for a sectionwise weak equivalence in low degrees."""
    verdicts = await _fan_out(
        f.source.site, lambda x: weak_equivalence_check(f.components[x], max_s, budget)
    )
    return _aggregate_verdicts(verdicts)


def is_local_weq(
    f: PresheafMap, max_s: int = 1, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Test whether f is a local weak equivalence for the trivial topology."""
    verdict = asyncio.run(async_is_local_weq(f, max_s, budget))
    _LOGGER.info("%s: local weak equivalence verdict %s", f.label, verdict.verdict)
    return verdict


def is_n_equivalence(
    f: PresheafMap, n: int, max_dim: int, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Test whether P_n(f) is a local weak equivalence.

    Raises:
        SectionError: If a section is not certified Kan.
    """
    truncated = sectionwise_map(TAG_POSTNIKOV, f, n, max_dim, budget)
    return is_local_weq(truncated, max_s=min(n, max_dim - 1), budget=budget)


def equivalence_monotonicity_check(
    f: PresheafMap, n: int, max_dim: int, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Check that an n-equivalence is also an (n-1)-equivalence.

    Certified when both levels are certified, refuted when level n is
    certified and level n-1 is refuted, unknown otherwise. Both verdicts
    are kept as evidence.

    Raises:
        MalformedSpec: If n < 1.
    """
    if n < 1:
        raise MalformedSpec(f"monotonicity needs n >= 1, got {n}")
    upper = is_n_equivalence(f, n, max_dim, budget)
    lower = is_n_equivalence(f, n - 1, max_dim, budget)
    evidence = {str(n): upper.to_dict(), str(n - 1): lower.to_dict()}
    if not upper.is_certified:
        return EquivalenceVerdict(VERDICT_UNKNOWN, evidence)
    if lower.is_refuted:
        _LOGGER.warning("%s: %d-equivalence but not a %d-equivalence", f.label, n, n - 1)
    return EquivalenceVerdict(lower.verdict, evidence)


@dataclass(frozen=True)
class GeneratingSets:
    """Finite slices of the generating families, labelled."""

    i_proj: list[tuple[str, PresheafMap]]
    j_proj: list[tuple[str, PresheafMap]]
    extension: list[tuple[str, PresheafMap]] = field(default_factory=list)

    @property
    def j_n(self) -> list[tuple[str, PresheafMap]]:
        """Return J_proj together with the n-extension."""
        return self.j_proj + self.extension

    def to_dict(self) -> dict[str, list[str]]:
        """Return the labels as a report record."""
        return {
            "I_proj": [label for label, _ in self.i_proj],
            "J_proj": [label for label, _ in self.j_proj],
            "J_n_extension": [label for label, _ in self.extension],
        }


def _vertex_inclusion(s: int) -> SMap:
    return SMap(standard(0), boundary(s), {"0": SimplexRef(0, "0")})


def generating_sets(site: FiniteCat, n: int, dim_bound: int) -> GeneratingSets:
    """Return I_proj, J_proj and the n-extension up to dim_bound.

    I_proj holds L_U(dDelta^s -> Delta^s) for s <= dim_bound, J_proj holds
    L_U(Lambda^s_k -> Delta^s) for 1 <= s <= dim_bound, and the n-extension
    adds L_U(dDelta^s -> Delta^s) for n + 2 <= s <= dim_bound together with
    the vertex L_U(Delta^0 -> dDelta^{n+2}).
    """
    i_proj, j_proj, extension = [], [], []
    for obj in site.objects:
        for s in range(dim_bound + 1):
            cell = inclusion(boundary(s), standard(s))
            i_proj.append((f"L_{obj}(dD{s}->D{s})", free_presheaf_map(site, obj, cell)))
        for s in range(1, dim_bound + 1):
            for k in range(s + 1):
                cell = inclusion(horn(s, k), standard(s))
                j_proj.append((f"L_{obj}(L{s},{k}->D{s})", free_presheaf_map(site, obj, cell)))
        for s in range(n + 2, dim_bound + 1):
            cell = inclusion(boundary(s), standard(s))
            extension.append((f"L_{obj}(dD{s}->D{s})", free_presheaf_map(site, obj, cell)))
        if n + 2 <= dim_bound:
            extension.append(
                (f"L_{obj}(*->dD{n + 2})", free_presheaf_map(site, obj, _vertex_inclusion(n + 2)))
            )
    return GeneratingSets(i_proj, j_proj, extension)


def transferred_generating_sets(
    site: FiniteCat, n: int, dim_bound: int, budget: Budget | None = None
) -> dict[str, list[tuple[str, GpdPresheafMap]]]:
    """Apply G sectionwise to I_proj and J_n, giving the groupoid-side generators."""
    sets = generating_sets(site, n, dim_bound)
    result: dict[str, list[tuple[str, GpdPresheafMap]]] = {}
    for family, members in (("I_proj", sets.i_proj), ("J_n", sets.j_n)):
        transferred = []
        for label, j in members:
            source = sectionwise(TAG_LOOP_GROUPOID, j.source, budget=budget)
            target = sectionwise(TAG_LOOP_GROUPOID, j.target, budget=budget)
            assert isinstance(source, GpdPresheaf) and isinstance(target, GpdPresheaf)
            components = {x: loop_groupoid_map(j.components[x], budget) for x in site.objects}
            transferred.append((f"G{label}", GpdPresheafMap(source, target, components)))
        result[family] = transferred
    return result


def is_transferred_fibration(
    phi: GpdPresheafMap, up_to_dim: int, max_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Detect a fibration of groupoid presheaves through W applied sectionwise."""
    source = sectionwise(TAG_WBAR, phi.source, max_dim=max_dim, budget=budget)
    target = sectionwise(TAG_WBAR, phi.target, max_dim=max_dim, budget=budget)
    assert isinstance(source, Presheaf) and isinstance(target, Presheaf)
    components = {
        x: wbar_map(phi.components[x], max_dim, budget) for x in phi.source.site.objects
    }
    return is_projective_fibration(
        PresheafMap(source, target, components, f"W({phi.name})"), up_to_dim, budget
    )


def solve_presheaf_lift(
    j: PresheafMap,
    f: PresheafMap,
    top: PresheafMap,
    bottom: PresheafMap,
    budget: Budget | None = None,
) -> PresheafMap | None:
    """Find a natural lift B -> X in the square top: A -> X, bottom: B -> Y.

    Returns:
        A lift with lift after j = top and f after lift = bottom, or None.
    """
    fixed: dict[str, dict[str, SimplexRef]] = {}
    for x, component in j.components.items():
        fixed[x] = {
            ref.base: top.components[x](SimplexRef(ref.dim, cell))
            for cell, ref in component.assignment.items()
            if not ref.is_degenerate
        }
    lifts = iter_presheaf_homs(
        j.target, f.source, fixed=fixed, over=(f, bottom), budget=budget
    )
    for lift in lifts:
        if all(
            compose(lift.components[x], j.components[x]).assignment == top.components[x].assignment
            for x in j.source.site.objects
        ):
            return lift
    return None


def _commutes(j: PresheafMap, f: PresheafMap, top: PresheafMap, bottom: PresheafMap) -> bool:
    return all(
        compose(f.components[x], top.components[x]).assignment
        == compose(bottom.components[x], j.components[x]).assignment
        for x in j.source.site.objects
    )


def rlp_against(
    f: PresheafMap,
    maps: Iterable[tuple[str, PresheafMap]],
    budget: Budget | None = None,
    max_squares: int | None = None,
    seed: int = 0,
) -> KanCertificate:
    """Test the right lifting property of f against every labelled map.

    Every commuting square is tried unless max_squares is set, in which case
    a seeded sample of that many squares per map is tried.

    Returns:
        Certified if every square lifts, Refuted with the first failing
        square, Unknown if a search ran out of nodes.
    """
    rng = random.Random(seed)
    labels = []
    try:
        for label, j in maps:
            labels.append(label)
            squares = [
                (top, bottom)
                for bottom in presheaf_homs(j.target, f.target, budget)
                for top in presheaf_homs(j.source, f.source, budget)
                if _commutes(j, f, top, bottom)
            ]
            if max_squares is not None and len(squares) > max_squares:
                squares = rng.sample(squares, max_squares)
            _LOGGER.debug("%s against %s: %d squares", f.label, label, len(squares))
            for top, bottom in squares:
                if solve_presheaf_lift(j, f, top, bottom, budget) is None:
                    witness = {
                        "generator": label,
                        "top": {x: c.to_dict() for x, c in top.components.items()},
                        "bottom": {x: c.to_dict() for x, c in bottom.components.items()},
                    }
                    return KanCertificate.refuted(
                        f.label, 0, witness, f"no lift against {label}"
                    )
    except SearchBudgetExceeded as err:
        _LOGGER.warning("Lifting search for %s ran out of nodes: %s", f.label, err)
        return KanCertificate.unknown(f.label, 0, str(err))
    return KanCertificate.certified(f.label, 0, f"lifts against {len(labels)} maps")


def _tensor_products(
    presheaf: Presheaf, sset: SSet, budget: Budget | None
) -> dict[str, Product]:
    return {
        x: product(section, sset, section.top_dim + sset.top_dim, budget)
        for x, section in presheaf.sections.items()
    }


def _tensor(presheaf: Presheaf, sset: SSet, products: Mapping[str, Product]) -> Presheaf:
    unit = identity_map(sset)
    restrictions = {
        a: product_map(presheaf.restrictions[a], unit, products[u], products[v])
        for a, (v, u) in presheaf.site.ends.items()
    }
    return Presheaf.build(
        presheaf.site,
        f"{presheaf.name}(x){sset.name}",
        {x: products[x].obj for x in presheaf.site.objects},
        restrictions,
    )


def tensor(presheaf: Presheaf, sset: SSet, budget: Budget | None = None) -> Presheaf:
    """Return X (x) K, sectionwise X(U) x K.

    Raises:
        DimBudgetExceeded: If a product would pass the dimension bound.
    """
    return _tensor(presheaf, sset, _tensor_products(presheaf, sset, budget))


def _mapping_space(
    name: str,
    max_dim: int,
    homs: Callable[[int], Iterable[Any]],
    precompose: Callable[[Any, int, tuple[int, ...]], Any],
    budget: Budget | None,
) -> tuple[SSet, list[dict[Any, SimplexRef]]]:
    """Build the simplicial set with n-simplices homs(n); operators act by precomposition."""
    resolve(budget).check_dim(max_dim)
    counters: dict[int, int] = {}

    def label(n: int, _key: Any) -> str:
        counters[n] = counters.get(n, 0) + 1
        return f"m{n}.{counters[n]}"

    return from_simplicial_object(
        name,
        max_dim,
        homs,
        lambda n, i, key: precompose(key, n, coface(n, i)),
        lambda n, j, key: precompose(key, n, codegeneracy(n, j)),
        label,
    )


def _key(f: SMap) -> tuple[tuple[str, SimplexRef], ...]:
    return tuple(sorted(f.assignment.items()))


def sset_mapping_space(
    source: SSet, target: SSet, max_dim: int, budget: Budget | None = None
) -> tuple[SSet, list[dict[Any, SimplexRef]]]:
    """Return map(K, Y) up to max_dim with its level tables.

    An n-simplex is a map K x Delta^n -> Y, keyed by its sorted assignment.
    """
    prisms = {
        n: product(source, standard(n), source.top_dim + n, budget) for n in range(max_dim + 1)
    }
    unit = identity_map(source)

    def homs(n: int) -> list[Any]:
        return [_key(h) for h in iter_homs(prisms[n].obj, target, budget=budget)]

    def precompose(key: Any, n: int, alpha: tuple[int, ...]) -> Any:
        along = product_map(unit, standard_map(alpha, n), prisms[len(alpha) - 1], prisms[n])
        return _key(compose(SMap(prisms[n].obj, target, dict(key)), along))

    return _mapping_space(f"map({source.name},{target.name})", max_dim, homs, precompose, budget)


def cotensor(
    sset: SSet, presheaf: Presheaf, max_dim: int, budget: Budget | None = None
) -> Presheaf:
    """Return hom(K, X), sectionwise map(K, X(U)) up to max_dim."""
    site = presheaf.site
    spaces = {
        x: sset_mapping_space(sset, presheaf.sections[x], max_dim, budget) for x in site.objects
    }
    restrictions = {}
    for a, (v, u) in site.ends.items():
        restriction = presheaf.restrictions[a]
        source_obj, source_tables = spaces[u]
        target_obj, target_tables = spaces[v]
        assignment = {}
        for n, table in enumerate(source_tables):
            for key, ref in table.items():
                if ref.is_degenerate:
                    continue
                image = {cell: restriction(value) for cell, value in key}
                assignment[ref.base] = target_tables[n][tuple(sorted(image.items()))]
        restrictions[a] = SMap(source_obj, target_obj, assignment)
    return Presheaf.build(
        site,
        f"hom({sset.name},{presheaf.name})",
        {x: spaces[x][0] for x in site.objects},
        restrictions,
    )


def mapping_space(
    source: Presheaf, target: Presheaf, max_dim: int, budget: Budget | None = None
) -> SSet:
    """Return map(X, Y) up to max_dim; an n-simplex is a natural map X (x) Delta^n -> Y."""
    products = {n: _tensor_products(source, standard(n), budget) for n in range(max_dim + 1)}
    tensors = {n: _tensor(source, standard(n), products[n]) for n in products}
    units = {x: identity_map(section) for x, section in source.sections.items()}

    def homs(n: int) -> list[Any]:
        return [h.key() for h in iter_presheaf_homs(tensors[n], target, budget=budget)]

    def precompose(key: Any, n: int, alpha: tuple[int, ...]) -> Any:
        m = len(alpha) - 1
        parts = []
        for x, assignment in key:
            along = product_map(units[x], standard_map(alpha, n), products[m][x], products[n][x])
            h = SMap(tensors[n].sections[x], target.sections[x], dict(assignment))
            parts.append((x, _key(compose(h, along))))
        return tuple(parts)

    obj, _ = _mapping_space(
        f"map({source.name},{target.name})", max_dim, homs, precompose, budget
    )
    return obj


def roundtrip_check(
    presheaf: Presheaf, n: int, max_dim: int, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Compare W P_{n-1} G X with P_n W G X at every section."""

    async def run() -> dict[str, EquivalenceVerdict]:
        return await _fan_out(
            presheaf.site,
            lambda x: sset_roundtrip_check(presheaf.sections[x], n, max_dim, budget),
        )

    verdict = _aggregate_verdicts(asyncio.run(run()))
    _LOGGER.info("%s: roundtrip verdict %s", presheaf.name, verdict.verdict)
    return verdict


def load_site(path: Path) -> FiniteCat:
    """Read a site file."""
    return FiniteCat.from_spec(read_json(path))


def load_presheaf(path: Path) -> Presheaf:
    """Read a presheaf file; site, section and restriction paths are relative to it."""
    data = validate_schema(PRESHEAF_SCHEMA, read_json(path), "presheaf")
    base = path.parent
    site = load_site(base / data["site"])
    sections = {x: build_sset(read_json(base / file)) for x, file in data["sections"].items()}
    restrictions = {}
    for a, file in data["restrictions"].items():
        if a not in site.ends:
            raise UnknownObject(f"{a!r} is not an arrow of site {site.name}")
        v, u = site.ends[a]
        restrictions[a] = build_smap(read_json(base / file), sections[u], sections[v])
    return Presheaf.build(site, data["name"], sections, restrictions)


def load_presheaf_map(path: Path) -> PresheafMap:
    """Read a presheaf map file; paths are relative to it."""
    data = validate_schema(PRESHEAF_MAP_SCHEMA, read_json(path), "presheaf map")
    base = path.parent
    source = load_presheaf(base / data["source"])
    target = load_presheaf(base / data["target"])
    components = {
        x: build_smap(read_json(base / file), source.sections[x], target.sections[x])
        for x, file in data["components"].items()
    }
    return PresheafMap(source, target, components, data.get("name", "")).validate()
