"""File formats for the ntypes kernel.

Every input file is a UTF-8 JSON record validated by one of the schemas
below. Unknown fields are rejected. Group presentations additionally have a
one-line text form, ``gens: a b; rels: a a, a b A B;``, where an uppercase
letter (or a trailing ``^-1``) denotes an inverse.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import voluptuous as vol

from .exceptions import MalformedSpec

_LOGGER = logging.getLogger(__name__)

ARROW_PATTERN = re.compile(r"^\s*(\S+)\s*->\s*(\S+)\s*$")

_DIM_KEY = vol.Match(r"^\d+$")
_ARROW = vol.Match(ARROW_PATTERN)
_NAMES = [str]

SSET_SCHEMA = vol.Schema(
    {
        vol.Required("name"): str,
        vol.Required("cells"): {_DIM_KEY: _NAMES},
        vol.Optional("faces", default={}): {str: _NAMES},
    }
)

SMAP_SCHEMA = vol.Schema(
    {
        vol.Optional("name"): str,
        vol.Required("source"): str,
        vol.Required("target"): str,
        vol.Required("assignment"): {str: str},
    }
)

GROUP_TABLE_SCHEMA = vol.Schema(
    {
        vol.Required("elements"): vol.All(_NAMES, vol.Length(min=1)),
        vol.Required("table"): [_NAMES],
    }
)

GROUPOID_SCHEMA = vol.Schema(
    vol.Any(
        {
            vol.Required("name"): str,
            vol.Required("group"): GROUP_TABLE_SCHEMA,
        },
        {
            vol.Required("name"): str,
            vol.Required("presentation"): str,
        },
        {
            vol.Required("name"): str,
            vol.Required("objects"): _NAMES,
            vol.Required("arrows"): {str: _ARROW},
            vol.Required("identities"): {str: str},
            vol.Required("compose"): {str: str},
        },
        {
            vol.Required("name"): str,
            vol.Required("objects"): _NAMES,
            vol.Required("generators"): {str: _ARROW},
        },
    )
)

SITE_SCHEMA = vol.Schema(
    {
        vol.Required("name"): str,
        vol.Required("objects"): vol.All(_NAMES, vol.Length(min=1)),
        vol.Optional("arrows", default={}): {str: _ARROW},
        vol.Optional("identities", default={}): {str: str},
        vol.Optional("compose", default={}): {str: str},
        vol.Optional("topology", default="trivial"): vol.In(
            ["trivial"], msg="only the trivial topology is supported"
        ),
        vol.Optional("covers"): vol.All(
            dict, vol.Length(max=0, msg="covering families are not supported")
        ),
    }
)

PRESHEAF_SCHEMA = vol.Schema(
    {
        vol.Required("name"): str,
        vol.Required("site"): str,
        vol.Required("sections"): {str: str},
        vol.Optional("restrictions", default={}): {str: str},
    }
)

PRESHEAF_MAP_SCHEMA = vol.Schema(
    {
        vol.Optional("name"): str,
        vol.Required("source"): str,
        vol.Required("target"): str,
        vol.Required("components"): {str: str},
    }
)

LIFT_SCHEMA = vol.Schema(
    {
        vol.Required("i"): str,
        vol.Required("f"): str,
        vol.Required("top"): str,
        vol.Required("bottom"): str,
    }
)


def validate_schema(schema: vol.Schema, data: Any, what: str) -> dict[str, Any]:
    """Validate a decoded record.

    Args:
        schema: Voluptuous schema.
        data: Decoded JSON value.
        what: Human readable kind of record, used in messages.

    Returns:
        The validated record with defaults filled in.

    Raises:
        MalformedSpec: If the record does not match the schema.
    """
    if not isinstance(data, Mapping):
        raise MalformedSpec(f"A {what} must be a record, got {type(data).__name__}")
    try:
        checked: dict[str, Any] = schema(dict(data))
    except vol.Invalid as err:
        raise MalformedSpec(f"Invalid {what}: {err}") from err
    return checked


def parse_arrow(text: str) -> tuple[str, str]:
    """Split ``x -> y`` into (x, y).

    Raises:
        MalformedSpec: If the text is not an arrow declaration.
    """
    match = ARROW_PATTERN.match(text)
    if match is None:
        raise MalformedSpec(f"Expected 'source -> target', got {text!r}")
    return match.group(1), match.group(2)


def read_json(path: Path) -> Any:
    """Read a UTF-8 JSON file.

    Raises:
        MalformedSpec: If the file cannot be read or decoded.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise MalformedSpec(f"Cannot read {path}: {err}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedSpec(f"{path} is not valid JSON: {err}") from err


def file_digest(path: Path) -> str:
    """Return the sha256 digest of a file as ``sha256:<hex>``."""
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def _parse_letter(token: str, generators: list[str]) -> tuple[str, int]:
    if token.endswith("^-1"):
        name, sign = token[:-3], -1
    elif token in generators:
        name, sign = token, 1
    elif token.lower() in generators and token != token.lower():
        name, sign = token.lower(), -1
    else:
        name, sign = token, 1
    if name not in generators:
        raise MalformedSpec(f"Unknown generator {token!r} in relator")
    return name, sign


def parse_presentation_text(text: str) -> tuple[list[str], list[list[tuple[str, int]]]]:
    """Parse ``gens: a b; rels: a a, a b A B;``.

    Returns:
        The generator names and the relators as lists of (generator, +1 or -1).

    Raises:
        MalformedSpec: If a section is missing or a letter is unknown.
    """
    sections: dict[str, str] = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        key, sep, value = chunk.partition(":")
        if not sep or key.strip() not in ("gens", "rels"):
            raise MalformedSpec(f"Bad presentation section {chunk.strip()!r}")
        sections[key.strip()] = value
    if "gens" not in sections:
        raise MalformedSpec("Presentation has no 'gens' section")
    generators = sections["gens"].split()
    if len(set(generators)) != len(generators):
        raise MalformedSpec("Presentation repeats a generator")
    relators = [
        [_parse_letter(token, generators) for token in word.split()]
        for word in sections.get("rels", "").split(",")
        if word.strip()
    ]
    return generators, relators


def format_presentation_text(
    generators: list[str], relators: list[list[tuple[str, int]]]
) -> str:
    """Render generators and relators in the presentation text form."""

    def letter(name: str, sign: int) -> str:
        if sign > 0:
            return name
        upper = name.upper()
        if upper != name and upper not in generators:
            return upper
        return f"{name}^-1"

    rels = ", ".join(" ".join(letter(n, s) for n, s in word) for word in relators)
    return f"gens: {' '.join(generators)}; rels: {rels};"
