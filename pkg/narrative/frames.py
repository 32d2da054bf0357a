"""Event frames and the rules that turn them into story actions.

A frame is one verb occurrence with its semantic roles, e.g.
``go_01 a1=nicole a4=veg_r`` at story step 0. A mapping rule such as

    go_01 -> go(A1, A4) requires a1, a4

turns it into ``hpd go(nicole,veg_r) true 0``. Role ``aN`` fills template
variable ``AN``. A variable whose role is missing (and not required) names an
entity the text never introduced; it is filled with the one instance of the
argument's sort the story declares, or else with a fresh constant such as
``cook1``.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from pyparsing import DelimitedList, Group, Opt, ParseException, QuotedString

from errors import NarrativeError
from kb.parser import ARROW, _column, _kw, _one, _strip_comment
from kb.terms import IDENT, INTEGER, LPAR, RPAR, TERM, Term
from reader.history import StoryFact

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EventFrame:
    id: str
    sense: str
    roles: tuple[tuple[str, str], ...]
    step: int
    line: int | None = field(default=None, compare=False)

    def role(self, name: str) -> str | None:
        return dict(self.roles).get(name)

    def __str__(self) -> str:
        roles = " ".join(f"{k}={_quote(v)}" for k, v in self.roles)
        return f"frame {self.id} {self.sense} {roles} step={self.step}".replace("  ", " ")


class DrsAtom(NamedTuple):
    """One DRS condition, e.g. ``eventArgs(e1,a1,r1)``."""
    predicate: str
    args: tuple[str | int, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(_quote(a) if isinstance(a, str) else str(a) for a in self.args)})"


@dataclass(frozen=True)
class MappingRule:
    sense: str
    template: Term
    requires: tuple[str, ...] = ()


@dataclass
class FrameRules:
    rules: dict[str, MappingRule] = field(default_factory=dict)
    aliases: dict[str, str] = field(default_factory=dict)


@dataclass
class FrameMapping:
    """Facts produced from frames, constants minted, frames skipped with the reason."""
    facts: list[StoryFact] = field(default_factory=list)
    minted: dict[str, str] = field(default_factory=dict)
    skipped: list[tuple[EventFrame, str]] = field(default_factory=list)


def _quote(value: str) -> str:
    return value if IDENT.matches(value) else f"\"{value}\""


# -- rules file -----------------------------------------------------------------

VALUE = QuotedString('"') | IDENT
DRS_ATOM = (IDENT + LPAR + Group(DelimitedList(VALUE | INTEGER)) + RPAR).set_parse_action(
    lambda t: [DrsAtom(t[0], tuple(t[1]))])

RULE = IDENT("sense") + ARROW + TERM("template") + Opt(_kw("requires") + Group(DelimitedList(IDENT))("requires"))
ALIAS = _kw("alias") + VALUE("text") + IDENT("constant")


def parse_rules(text: str, source: str = "<rules>") -> FrameRules:
    """Parse a mapping-rule file.

    Raises:
        NarrativeError: on a malformed line or a verb sense mapped twice.
    """
    result = FrameRules()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        try:
            if line.startswith("alias"):
                r = ALIAS.parse_string(line, parse_all=True)
                result.aliases[r["text"]] = r["constant"]
                continue
            r = RULE.parse_string(line, parse_all=True)
        except ParseException as e:
            raise NarrativeError(f"Malformed mapping rule: {e.msg}", source, lineno, e.col) from None
        sense = r["sense"]
        if sense in result.rules:
            raise NarrativeError(f"Verb sense {sense} mapped twice", source, lineno, _column(raw, line))
        result.rules[sense] = MappingRule(sense, _one(r, "template"), tuple(r.get("requires", ())))
    logger.debug("Loaded %d mapping rules from %s", len(result.rules), source)
    return result


def load_rules(path: str | Path) -> FrameRules:
    path = Path(path)
    if not path.exists():
        raise NarrativeError(f"Mapping rules not found: {path}", source=str(path))
    return parse_rules(path.read_text(), source=str(path))


# -- frames -> facts ------------------------------------------------------------

def _within(sort: str | None, target: str, parents: dict[str, str | None]) -> bool:
    seen = set()
    while sort is not None and sort not in seen:
        if sort == target:
            return True
        seen.add(sort)
        sort = parents.get(sort)
    return False


def _role_of(variable: str) -> str | None:
    """``A4`` -> ``a4``; other variables have no role."""
    if len(variable) > 1 and variable[0] == "A" and variable[1:].isdigit():
        return variable.lower()
    return None


def map_frames(frames: Iterable[EventFrame], rules: FrameRules,
               action_sorts: dict[str, tuple[str, ...]] | None = None,
               instances: dict[str, str] | None = None,
               strict: bool = False,
               sort_parents: dict[str, str | None] | None = None) -> FrameMapping:
    """Turn event frames into ``hpd ... true`` story facts.

    ``action_sorts`` gives each action's argument sorts (needed to fill
    missing roles); ``instances`` are the story's declared instances.
    A missing role takes the only instance of its sort or a sub-sort
    (``sort_parents``), else a fresh constant is minted.

    Raises:
        NarrativeError: in strict mode, for a frame no rule matches.
    """
    instances = dict(instances or {})
    action_sorts = action_sorts or {}
    sort_parents = sort_parents or {}
    result = FrameMapping()

    def skip(frame: EventFrame, reason: str) -> None:
        if strict:
            raise NarrativeError(f"frame {frame.id}: {reason}", line=frame.line)
        logger.warning("Skipping frame %s: %s", frame.id, reason)
        result.skipped.append((frame, reason))

    def fill(sort: str) -> str:
        declared = [name for name, s in instances.items() if _within(s, sort, sort_parents)]
        if len(declared) == 1:
            return declared[0]
        k = 1
        while f"{sort}{k}" in instances:
            k += 1
        name = f"{sort}{k}"
        instances[name] = sort
        result.minted[name] = sort
        logger.info("Minted constant %s of sort %s", name, sort)
        return name

    for frame in frames:
        rule = rules.rules.get(frame.sense)
        if rule is None:
            skip(frame, f"no mapping rule for {frame.sense}")
            continue
        missing = [role for role in rule.requires if frame.role(role) is None]
        if missing:
            skip(frame, f"missing role(s) {', '.join(missing)} for {frame.sense}")
            continue

        sorts = action_sorts.get(rule.template.name, ())
        args = []
        for pos, arg in enumerate(rule.template.args):
            if not arg.is_variable:
                args.append(arg)
                continue
            role = _role_of(arg.name)
            value = frame.role(role) if role else None
            if value is not None:
                args.append(Term(rules.aliases.get(value, value)))
            elif pos < len(sorts):
                args.append(Term(fill(sorts[pos])))
            else:
                args = None
                break
        if args is None:
            skip(frame, f"cannot fill {rule.template} from the frame")
            continue
        action = Term(rule.template.name, tuple(args))
        result.facts.append(StoryFact(action, True, frame.step, frame.line))
    return result


def frames_from_drs(atoms: Iterable[DrsAtom], first_line: int | None = None) -> list[EventFrame]:
    """Build event frames from DRS conditions.

    Events without an ``eventTime`` are numbered in order of appearance
    after the highest explicit step.
    """
    atoms = list(atoms)
    names = {a.args[0]: a.args[1] for a in atoms if a.predicate == "property" and len(a.args) == 2}
    events: dict[str, dict] = {}
    for a in atoms:
        if a.predicate in ("event", "eventType", "eventArgs", "eventTime") and a.args:
            event = events.setdefault(a.args[0], {"roles": [], "sense": None, "step": None})
            if a.predicate == "eventType" and len(a.args) == 2:
                event["sense"] = a.args[1]
            elif a.predicate == "eventArgs" and len(a.args) == 3:
                role, ref = a.args[1], a.args[2]
                event["roles"].append((role, str(names.get(ref, ref))))
            elif a.predicate == "eventTime" and len(a.args) == 2:
                event["step"] = int(a.args[1])

    explicit = [e["step"] for e in events.values() if e["step"] is not None]
    next_step = max(explicit) + 1 if explicit else 0
    frames = []
    for event_id, event in events.items():
        if event["sense"] is None:
            continue
        step = event["step"]
        if step is None:
            step, next_step = next_step, next_step + 1
        frames.append(EventFrame(event_id, event["sense"], tuple(sorted(event["roles"])), step, first_line))
    return frames
