"""Shared helpers for the atom text used in reports and golden traces."""

import re

from kb.terms import Term

_ATOM = re.compile(r"^(occurs|map)\((.*),(\d+)\)$")


def occurs_atom(action: Term, step: int) -> str:
    """``occurs(order(nicole,lentil_soup,waitress),11)`` (no spaces)."""
    return f"occurs({action},{step})"


def map_atom(story_step: int, step: int) -> str:
    return f"map({story_step},{step})"


def atom_step(atom: str) -> int:
    """Reasoning step of an ``occurs``/``map`` atom; -1 if it is neither."""
    match = _ATOM.match(atom.strip())
    return int(match.group(3)) if match else -1


def atom_sort_key(atom: str) -> tuple[int, str, str]:
    """Sort by atom kind (map first), then step, then text."""
    kind = 0 if atom.startswith("map(") else 1
    return (kind, f"{atom_step(atom):06d}", atom)
