"""Line-oriented narrative (``*.story``) files: parse, print, convert to a ``History``."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from pyparsing import Group, ParseException, QuotedString, Suppress, Word, ZeroOrMore, one_of, printables

from errors import NarrativeError, QuestionError
from kb.domain import Literal
from kb.parser import _column, _kw, _one, _strip_comment
from kb.terms import IDENT, INTEGER, TERM, Term
from narrative.frames import (
    DRS_ATOM,
    VALUE,
    DrsAtom,
    EventFrame,
    FrameMapping,
    FrameRules,
    frames_from_drs,
    map_frames,
)
from qa.questions import Question, parse_question
from reader.history import History, StoryFact

logger = logging.getLogger(__name__)

TRUTH = one_of("true false", as_keyword=True)
ROLE = Group(IDENT + Suppress("=") + VALUE)
PATH = QuotedString('"') | Word(printables)

STATEMENTS = {
    "instance": _kw("instance") + IDENT("name") + IDENT("sort"),
    "hpd": _kw("hpd") + TERM("term") + TRUTH("value") + INTEGER("step"),
    "obs": _kw("obs") + TERM("term") + TRUTH("value") + INTEGER("step"),
    "next": _kw("next") + INTEGER("step") + INTEGER("next"),
    "initially": _kw("initially") + TERM("term") + TRUTH("value"),
    "frame": (
        _kw("frame") + IDENT("id") + IDENT("sense")
        + Group(ZeroOrMore(ROLE))("roles") + _kw("step") + Suppress("=") + INTEGER("step")
    ),
    "drs": _kw("drs") + DRS_ATOM("atom"),
    "rules": _kw("rules") + PATH("path"),
}


@dataclass
class NarrativeFile:
    instances: dict[str, str] = field(default_factory=dict)
    hpd: list[StoryFact] = field(default_factory=list)
    obs: list[StoryFact] = field(default_factory=list)
    next_st: list[tuple[int, int]] = field(default_factory=list)
    initially: list[Literal] = field(default_factory=list)
    frames: list[EventFrame] = field(default_factory=list)
    drs: list[DrsAtom] = field(default_factory=list)
    rules: str | None = None
    questions: list[Question] = field(default_factory=list)
    source: str | None = field(default=None, compare=False)

    def error(self, message: str, line: int | None = None, column: int | None = None) -> NarrativeError:
        return NarrativeError(message, source=self.source, line=line, column=column)

    @property
    def rules_path(self) -> Path | None:
        """The mapping-rule file, relative to the narrative file."""
        if self.rules is None:
            return None
        path = Path(self.rules)
        if not path.is_absolute() and self.source and Path(self.source).exists():
            path = Path(self.source).resolve().parent / path
        return path


def parse_narrative(text: str, source: str | None = None) -> NarrativeFile:
    """Parse a narrative file.

    Raises:
        NarrativeError: on a syntax error (with line and column), an instance
            declared with two sorts, contradictory facts for the same step.
    """
    nf = NarrativeFile(source=source)
    seen: dict[tuple[str, Term, int | None], tuple[bool, int]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        keyword = stripped.split(None, 1)[0]

        if keyword == "question":
            try:
                nf.questions.append(parse_question(stripped[len("question"):]))
            except QuestionError as e:
                raise nf.error(str(e), lineno, _column(raw, stripped)) from None
            continue

        grammar = STATEMENTS.get(keyword)
        if grammar is None:
            raise nf.error(f"Unknown statement {keyword!r}", lineno, _column(raw, stripped))
        try:
            r = grammar.parse_string(line, parse_all=True)
        except ParseException as e:
            raise nf.error(f"Malformed {keyword} line: {e.msg}", lineno, e.col) from None

        match keyword:
            case "instance":
                sort = nf.instances.setdefault(r["name"], r["sort"])
                if sort != r["sort"]:
                    raise nf.error(f"Instance {r['name']} declared as {sort} and {r['sort']}", lineno)
            case "hpd" | "obs" | "initially":
                fact_term = _one(r, "term")
                value = r["value"] == "true"
                step = r["step"] if keyword != "initially" else None
                key = (keyword, fact_term, step)
                if key in seen and seen[key][0] != value:
                    raise nf.error(f"Contradicts line {seen[key][1]}: {keyword} {fact_term}", lineno)
                if key in seen:
                    continue
                seen[key] = (value, lineno)
                if keyword == "initially":
                    nf.initially.append(Literal(fact_term, value))
                else:
                    getattr(nf, keyword).append(StoryFact(fact_term, value, step, lineno))
            case "next":
                if r["next"] != r["step"] + 1:
                    raise nf.error(f"next {r['step']} {r['next']} must name adjacent story steps", lineno)
                nf.next_st.append((r["step"], r["next"]))
            case "frame":
                roles = tuple(sorted((role[0], role[1]) for role in r["roles"]))
                nf.frames.append(EventFrame(r["id"], r["sense"], roles, r["step"], lineno))
            case "drs":
                nf.drs.append(_one(r, "atom"))
            case "rules":
                nf.rules = r["path"]

    logger.debug("Parsed narrative %s: %d hpd, %d obs, %d frames",
                 source or "<text>", len(nf.hpd), len(nf.obs), len(nf.frames))
    return nf


def load_narrative(path: str | Path) -> NarrativeFile:
    path = Path(path)
    if not path.exists():
        raise NarrativeError(f"Narrative file not found: {path}", source=str(path))
    return parse_narrative(path.read_text(), source=str(path))


def _truth(value: bool) -> str:
    return "true" if value else "false"


def print_narrative(nf: NarrativeFile) -> str:
    """Canonical text of a narrative; ``parse_narrative`` reads it back unchanged."""
    lines = [f"instance {name} {sort}" for name, sort in nf.instances.items()]
    lines += [f"initially {lit.fluent} {_truth(lit.positive)}" for lit in nf.initially]
    lines += [f"hpd {f.term} {_truth(f.value)} {f.step}" for f in nf.hpd]
    lines += [f"obs {f.term} {_truth(f.value)} {f.step}" for f in nf.obs]
    lines += [f"next {s} {s1}" for s, s1 in nf.next_st]
    if nf.rules is not None:
        lines.append(f"rules \"{nf.rules}\"" if " " in nf.rules else f"rules {nf.rules}")
    lines += [str(frame) for frame in nf.frames]
    lines += [f"drs {atom}" for atom in nf.drs]
    lines += [f"question {q}" for q in nf.questions]
    return "\n".join(lines) + "\n"


def to_history(nf: NarrativeFile, rules: FrameRules | None = None,
               action_sorts: dict[str, tuple[str, ...]] | None = None,
               strict: bool = False,
               sort_parents: dict[str, str | None] | None = None) -> tuple[History, FrameMapping]:
    """The ``History`` a narrative describes, with frames and DRS events mapped to facts.

    Raises:
        NarrativeError: when frames are present but no rules are given, or in
            strict mode for an unmatched frame.
    """
    frames = list(nf.frames)
    if nf.drs:
        frames += frames_from_drs(nf.drs)
    mapped = FrameMapping()
    if frames:
        if rules is None:
            raise nf.error("narrative has frames but no mapping rules")
        mapped = map_frames(frames, rules, action_sorts, nf.instances, strict, sort_parents)

    instances = dict(nf.instances)
    instances.update(mapped.minted)
    hpd = list(nf.hpd)
    known = {(f.term, f.step) for f in hpd}
    hpd += [f for f in mapped.facts if (f.term, f.step) not in known]

    history = History(
        instances=instances,
        hpd=hpd,
        obs=list(nf.obs),
        next_st=list(nf.next_st),
        initially=list(nf.initially),
        questions=list(nf.questions),
    )
    return history, mapped
