"""Run report: everything produced by one interpretation run."""

import json
from dataclasses import dataclass, field

import pandas as pd

from kb.domain import Domain
from qa.answers import Answer
from reader.history import Model

SCHEMA_VERSION = 1


@dataclass
class GoldenDiff:
    """Comparison of a run's model atoms against a golden trace."""
    path: str
    matched: bool
    expected_blocks: int = 0
    actual_blocks: int = 0
    missing: list[str] = field(default_factory=list)     # atoms only in unmatched golden blocks
    unexpected: list[str] = field(default_factory=list)  # atoms only in unmatched models


@dataclass
class Report:
    narrative: str
    horizon: int
    models: list[Model] = field(default_factory=list)
    answers: list[Answer] = field(default_factory=list)
    diagnostic: str | None = None
    # Not serialised: differs between runs
    elapsed: float = 0.0
    skipped_frames: list[str] = field(default_factory=list)
    minted: dict[str, str] = field(default_factory=dict)
    golden: GoldenDiff | None = None

    @property
    def model_count(self) -> int:
        return len(self.models)


def model_to_dict(model: Model) -> dict:
    return {
        "id": model.id,
        "mapping": {str(s): i for s, i in model.mapping.as_dict().items()},
        "last_assigned": model.mapping.last_assigned,
        "quiescent": model.quiescent,
        "occurrences": [
            {"step": i, "actions": sorted(str(a) for a in occ)}
            for i, occ in enumerate(model.occurrences)
        ],
        "abduced": [{"step": i, "action": str(a)} for i, a in model.abduced],
        "activity_choices": [
            {"step": c.step, "agent": str(c.agent), "goal": str(c.goal), "activity": str(c.activity)}
            for c in model.choices
        ],
    }


def to_dict(report: Report) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "narrative": report.narrative,
        "horizon": report.horizon,
        "model_count": report.model_count,
        "models": [model_to_dict(m) for m in report.models],
        "answers": [a.to_dict() for a in report.answers],
        "diagnostic": report.diagnostic,
    }


def to_json(report: Report) -> str:
    """Machine report; identical inputs give byte-identical output."""
    return json.dumps(to_dict(report), indent=2)


def timeline_frame(domain: Domain, model: Model) -> pd.DataFrame:
    """One row per reasoning step, one column per agent plus ``other`` for everyone else."""
    agents = [str(a) for a in sorted(domain.agents)]
    rows = []
    for i, occ in enumerate(model.occurrences):
        row = {"step": i, "story": model.mapping.story_step_at(i)}
        cells: dict[str, list[str]] = {name: [] for name in [*agents, "other"]}
        for action in sorted(occ):
            owners = [str(a) for a in domain.actors.get(action, ()) if str(a) in cells]
            for owner in owners or ["other"]:
                cells[owner].append(str(action))
        row.update({name: "; ".join(actions) for name, actions in cells.items()})
        rows.append(row)
    frame = pd.DataFrame(rows, columns=["step", "story", *agents, "other"])
    frame["story"] = frame["story"].map(lambda s: "" if pd.isna(s) else str(int(s)))
    return frame.set_index("step")


def render_text(report: Report, domain: Domain | None = None, timeline: bool = False) -> str:
    """Human-readable report in the CLI's banner style."""
    out = [f"\n{'=' * 50}", f"Narrative: {report.narrative}", f"{'=' * 50}"]
    out.append(f"  Horizon: {report.horizon}")
    out.append(f"  {report.model_count} model{'s' if report.model_count != 1 else ''}"
               f"  ({report.elapsed:.2f}s)")
    for name in report.skipped_frames:
        out.append(f"  skipped frame: {name}")
    for name, sort in sorted(report.minted.items()):
        out.append(f"  minted constant: {name} ({sort})")
    if report.diagnostic:
        out.append(f"  No interpretation: {report.diagnostic}")

    for model in report.models:
        out.append(f"\n  -- Model {model.id} " + "-" * 30)
        mapping = ", ".join(f"{s}->{i}" for s, i in model.mapping.as_dict().items())
        out.append(f"  Mapping: {mapping}")
        if model.abduced:
            out.append("  Abduced: " + ", ".join(f"{a}@{i}" for i, a in model.abduced))
        if timeline and domain is not None:
            out.append(timeline_frame(domain, model).to_string())
            continue
        for i, occ in enumerate(model.occurrences):
            story = model.mapping.story_step_at(i)
            mark = f"  [story {story}]" if story is not None else ""
            out.append(f"    {i:>3}  {', '.join(sorted(map(str, occ)))}{mark}")
        if model.quiescent:
            out.append(f"    {model.last_step:>3}  (quiescent)")

    if report.answers:
        out.append(f"\n{'=' * 50}")
        out.append("Answers")
        out.append(f"{'=' * 50}")
        for answer in report.answers:
            out.append(f"  {answer.question}: {answer.text()}")

    if report.golden:
        g = report.golden
        out.append(f"\n  Golden {g.path}: {'match' if g.matched else 'MISMATCH'}")
        if not g.matched:
            out.append(f"    {g.expected_blocks} golden model(s), {g.actual_blocks} found")
        for atom in g.missing:
            out.append(f"    missing: {atom}")
        for atom in g.unexpected:
            out.append(f"    unexpected: {atom}")
    return "\n".join(out) + "\n"
