"""Golden trace files: expected ``map``/``occurs`` atoms, one block per model."""

import logging
from pathlib import Path
from typing import Iterable

from errors import NarrativeError
from narrative.report import GoldenDiff
from reader.history import Model
from utils import atom_sort_key

logger = logging.getLogger(__name__)

BLOCK_MARK = "% model"


def parse_golden(text: str, source: str = "<golden>") -> list[frozenset[str]]:
    """Blocks of atoms; ``% model <n>`` starts a block, other ``%`` lines are comments."""
    blocks: list[set[str]] = []
    current: set[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(BLOCK_MARK):
            current = set()
            blocks.append(current)
            continue
        if line.startswith("%"):
            continue
        if not (line.startswith("occurs(") or line.startswith("map(")) or not line.endswith(")"):
            raise NarrativeError(f"Not an occurs/map atom: {line!r}", source, lineno)
        if current is None:
            current = set()
            blocks.append(current)
        current.add(line.replace(" ", ""))
    return [frozenset(b) for b in blocks]


def load_golden(path: str | Path) -> list[frozenset[str]]:
    path = Path(path)
    if not path.exists():
        raise NarrativeError(f"Golden trace not found: {path}", source=str(path))
    return parse_golden(path.read_text(), source=str(path))


def model_atoms(model: Model) -> frozenset[str]:
    return frozenset(model.atoms)


def write_golden(models: Iterable[Model]) -> str:
    """Golden-file text for ``models``."""
    models = list(models)
    lines = []
    for model in models:
        if len(models) > 1:
            lines.append(f"{BLOCK_MARK} {model.id}")
        lines.extend(sorted(model.atoms, key=atom_sort_key))
    return "\n".join(lines) + "\n"


def diff_golden(models: Iterable[Model], golden: list[frozenset[str]], path: str = "") -> GoldenDiff:
    """Match when the set of model atom sets equals the set of golden blocks."""
    actual = {model_atoms(m) for m in models}
    expected = set(golden)
    missing_blocks = expected - actual
    unexpected_blocks = actual - expected
    missing = frozenset().union(*missing_blocks) if missing_blocks else frozenset()
    unexpected = frozenset().union(*unexpected_blocks) if unexpected_blocks else frozenset()
    diff = GoldenDiff(
        path=path,
        matched=actual == expected,
        expected_blocks=len(expected),
        actual_blocks=len(actual),
        missing=sorted(missing - unexpected, key=atom_sort_key),
        unexpected=sorted(unexpected - missing, key=atom_sort_key),
    )
    if not diff.matched:
        logger.warning("Golden mismatch against %s: %d missing, %d unexpected atoms",
                       path or "<golden>", len(diff.missing), len(diff.unexpected))
    return diff
