"""Bundled corpus fixtures in the entailment-pair XML schema."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..errors import UnknownGraphName

_ALIASES = {
    "twelve_angry_men": "twelve_angry_men.xml",
    "12angrymen": "twelve_angry_men.xml",
    "debatepedia": "debatepedia.xml",
    "sobrietytest": "sobrietytest.xml",
}


def fixture_names() -> list[str]:
    return sorted({name.removesuffix(".xml") for name in _ALIASES.values()})


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled corpus ("twelve_angry_men", "debatepedia",
    or "sobrietytest")."""
    key = name.strip().lower()
    if key not in _ALIASES:
        raise UnknownGraphName(
            f"no bundled corpus named {name!r}; available: {', '.join(fixture_names())}"
        )
    return Path(str(resources.files(__package__) / _ALIASES[key]))
