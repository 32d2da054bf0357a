"""Line-oriented parser for ``*.domain`` files.

Each non-blank line is one statement introduced by a keyword. ``actor``,
``goal`` and ``component`` lines belong to the most recent ``activity``.
The result is a ``SchematicDomain``: declarations and laws still containing
variables, each remembering the line it came from so the grounder can report
errors against the file.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from pyparsing import (
    DelimitedList,
    Group,
    Keyword,
    Literal as Lit,
    Opt,
    ParseException,
    ParseResults,
    Suppress,
    ZeroOrMore,
    one_of,
)

from config.constants import ActionKind, FluentKind, Layer
from errors import DomainError
from kb.domain import ActionDecl, FluentDecl, Literal
from kb.terms import IDENT, INTEGER, LPAR, RPAR, TERM, Term

logger = logging.getLogger(__name__)


class Guard(NamedTuple):
    """``left = right`` (equal) or ``left != right``."""
    left: Term
    right: Term
    equal: bool

    def __str__(self) -> str:
        return f"{self.left} {'=' if self.equal else '!='} {self.right}"


Condition = Literal | Guard


# -- schematic statements -----------------------------------------------------

@dataclass
class SchemaCauses:
    triggers: list[Term]
    heads: list[Literal]
    body: list[Condition]
    defeasible: bool
    line: int


@dataclass
class SchemaDefinition:
    head: Term
    body: list[Condition]
    line: int


@dataclass
class SchemaImpossible:
    action: Term
    body: list[Condition]
    line: int


@dataclass
class SchemaChoice:
    triggers: list[Term]
    member: Term
    generator: Term
    body: list[Condition]
    line: int


@dataclass
class SchemaStatic:
    head: Term
    body: list[Condition]
    line: int


@dataclass
class SchemaActivity:
    id: Term
    line: int
    actor: Term | None = None
    goal: Term | None = None
    components: dict[int, Term] = field(default_factory=dict)


@dataclass
class SchemaSelect:
    agent: Term
    goal: Term
    trigger: Term | None
    line: int


@dataclass
class SchemaFutile:
    activity: Term
    fluent: Term
    value: bool
    line: int


@dataclass
class SchemaInitially:
    literal: Literal
    line: int


@dataclass
class SchematicDomain:
    source: str
    sorts: dict[str, str | None] = field(default_factory=dict)
    instances: dict[str, str] = field(default_factory=dict)
    variables: dict[str, str] = field(default_factory=dict)
    required: list[str] = field(default_factory=list)
    fluent_decls: dict[str, FluentDecl] = field(default_factory=dict)
    action_decls: dict[str, ActionDecl] = field(default_factory=dict)
    statics: list[SchemaStatic] = field(default_factory=list)
    causes: list[SchemaCauses] = field(default_factory=list)
    definitions: list[SchemaDefinition] = field(default_factory=list)
    impossible: list[SchemaImpossible] = field(default_factory=list)
    choices: list[SchemaChoice] = field(default_factory=list)
    activities: list[SchemaActivity] = field(default_factory=list)
    selections: list[SchemaSelect] = field(default_factory=list)
    futility: list[SchemaFutile] = field(default_factory=list)
    initially: list[SchemaInitially] = field(default_factory=list)
    lines: dict[str, int] = field(default_factory=dict)   # declaration name -> line

    def error(self, message: str, line: int | None = None, column: int | None = None) -> DomainError:
        return DomainError(message, source=self.source, line=line, column=column)


# -- grammar ------------------------------------------------------------------

LITERAL = (Opt(Lit("-")) + TERM).set_parse_action(
    lambda t: [Literal(t[-1], len(t) == 1)])
GUARD = (TERM + one_of("!= =") + TERM).set_parse_action(
    lambda t: [Guard(t[0], t[2], t[1] == "=")])
COND = GUARD | LITERAL
CONDS = Group(DelimitedList(COND))
TRIGGERS = Group(TERM + ZeroOrMore(Suppress("+") + TERM))
SORT_LIST = Group(LPAR + DelimitedList(IDENT) + RPAR)
ARROW, BACK_ARROW = Suppress("->"), Suppress("<-")


def _kw(word: str):
    return Suppress(Keyword(word))


STATEMENTS = {
    "sort": _kw("sort") + IDENT("name"),
    "subsort": _kw("subsort") + IDENT("child") + IDENT("parent"),
    "instance": _kw("instance") + IDENT("name") + IDENT("sort"),
    "var": _kw("var") + Group(DelimitedList(IDENT))("names") + IDENT("sort"),
    "require": _kw("require") + IDENT("sort"),
    "static": _kw("static") + TERM("head") + Opt(BACK_ARROW + CONDS("body")),
    "fluent": (
        _kw("fluent") + IDENT("name") + SORT_LIST("sorts")
        + one_of("inertial defined", as_keyword=True)("kind")
        + one_of("physical mental", as_keyword=True)("layer")
        + Opt(Suppress("functional=") + INTEGER("functional"))
    ),
    "action": (
        _kw("action") + IDENT("name") + Opt(SORT_LIST("sorts"))
        + one_of("agent mental exogenous", as_keyword=True)("kind")
        + Opt(Suppress("actor=") + Group(DelimitedList(INTEGER))("actors"))
    ),
    "causes": (
        _kw("causes") + TRIGGERS("triggers") + ARROW
        + Group(DelimitedList(LITERAL))("heads")
        + Opt(_kw("if") + CONDS("body"))
        + Opt(Keyword("default")("default"))
    ),
    "if": _kw("if") + TERM("head") + BACK_ARROW + CONDS("body"),
    "impossible_if": _kw("impossible_if") + TERM("action") + BACK_ARROW + CONDS("body"),
    "choice": (
        _kw("choice") + TRIGGERS("triggers") + ARROW + TERM("member")
        + _kw("for") + TERM("generator") + Opt(_kw("if") + CONDS("body"))
    ),
    "activity": _kw("activity") + TERM("id"),
    "actor": _kw("actor") + TERM("agent"),
    "goal": _kw("goal") + TERM("goal"),
    "component": _kw("component") + INTEGER("index") + TERM("component"),
    "initially": _kw("initially") + LITERAL("literal"),
    "select": _kw("select") + TERM("agent") + TERM("goal") + Opt(_kw("when") + TERM("trigger")),
    "futile": (
        _kw("futile") + TERM("activity") + _kw("when") + TERM("fluent")
        + one_of("true false", as_keyword=True)("value")
    ),
}

_ACTIVITY_LINES = ("actor", "goal", "component")


def _one(r, name: str, default=None):
    """Scalar value of a named result; named sub-expressions may come back wrapped."""
    value = r.get(name, default)
    if isinstance(value, ParseResults):
        return value[0] if len(value) else default
    return value


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


def _column(raw: str, stripped: str) -> int:
    return len(raw) - len(raw.lstrip()) + 1 if stripped else 1


# -- parsing ------------------------------------------------------------------

def parse_domain(text: str, source: str = "<domain>") -> SchematicDomain:
    """Parse a domain description into its schematic form.

    Raises:
        DomainError: on a syntax error or a statement out of place, with the
            line and column of the offending text.
    """
    schema = SchematicDomain(source=source)
    current: SchemaActivity | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        stripped = line.strip()
        if not stripped:
            continue

        keyword = stripped.split(None, 1)[0].split("(", 1)[0]
        grammar = STATEMENTS.get(keyword)
        if grammar is None:
            raise schema.error(f"Unknown statement {keyword!r}", lineno, _column(raw, stripped))

        try:
            result = grammar.parse_string(line, parse_all=True)
        except ParseException as e:
            raise schema.error(f"Malformed {keyword} statement: {e.msg}", lineno, e.col) from None

        if keyword in _ACTIVITY_LINES:
            if current is None:
                raise schema.error(f"'{keyword}' outside an activity block", lineno, _column(raw, stripped))
            _activity_line(schema, current, keyword, result, lineno)
            continue
        current = None
        if keyword == "activity":
            current = SchemaActivity(id=_one(result, "id"), line=lineno)
            schema.activities.append(current)
            continue
        _statement(schema, keyword, result, lineno)

    logger.debug("Parsed %s: %d causal laws, %d activities",
                 source, len(schema.causes), len(schema.activities))
    return schema


def load_domain(path: str | Path) -> SchematicDomain:
    path = Path(path)
    if not path.exists():
        raise DomainError(f"Domain file not found: {path}", source=str(path))
    return parse_domain(path.read_text(), source=str(path))


def _activity_line(schema, activity: SchemaActivity, keyword: str, r, lineno: int) -> None:
    if keyword == "actor":
        activity.actor = _one(r, "agent")
    elif keyword == "goal":
        activity.goal = _one(r, "goal")
    else:
        index = _one(r, "index")
        if index in activity.components:
            raise schema.error(f"Duplicate component {index} of {activity.id}", lineno)
        activity.components[index] = _one(r, "component")


def _declare(schema: SchematicDomain, name: str, lineno: int) -> None:
    if name in schema.lines:
        raise schema.error(f"'{name}' already declared on line {schema.lines[name]}", lineno)
    schema.lines[name] = lineno


def _statement(schema: SchematicDomain, keyword: str, r, lineno: int) -> None:
    body = list(r["body"]) if "body" in r else []

    match keyword:
        case "sort":
            _declare(schema, r["name"], lineno)
            schema.sorts[r["name"]] = None
        case "subsort":
            schema.sorts.setdefault(r["child"], None)
            if schema.sorts[r["child"]] not in (None, r["parent"]):
                raise schema.error(f"Sort {r['child']} already has a parent", lineno)
            schema.sorts[r["child"]] = r["parent"]
            schema.lines.setdefault(r["child"], lineno)
        case "instance":
            if r["name"] in schema.instances:
                raise schema.error(f"Duplicate instance {r['name']}", lineno)
            schema.instances[r["name"]] = r["sort"]
            schema.lines.setdefault(r["name"], lineno)
        case "var":
            for name in r["names"]:
                if not name[:1].isupper():
                    raise schema.error(f"Variable {name} must start with an upper-case letter", lineno)
                schema.variables[name] = r["sort"]
        case "require":
            schema.required.append(r["sort"])
        case "static":
            schema.statics.append(SchemaStatic(_one(r, "head"), body, lineno))
        case "fluent":
            _declare(schema, r["name"], lineno)
            schema.fluent_decls[r["name"]] = FluentDecl(
                name=r["name"],
                sorts=tuple(r["sorts"]),
                kind=FluentKind(r["kind"]),
                layer=Layer(r["layer"]),
                functional=_one(r, "functional"),
            )
        case "action":
            _declare(schema, r["name"], lineno)
            schema.action_decls[r["name"]] = ActionDecl(
                name=r["name"],
                sorts=tuple(r["sorts"]) if "sorts" in r else (),
                kind=ActionKind(r["kind"]),
                actors=tuple(r["actors"]) if "actors" in r else (),
            )
        case "causes":
            schema.causes.append(SchemaCauses(
                triggers=list(r["triggers"]),
                heads=list(r["heads"]),
                body=body,
                defeasible="default" in r,
                line=lineno,
            ))
        case "if":
            schema.definitions.append(SchemaDefinition(_one(r, "head"), body, lineno))
        case "impossible_if":
            schema.impossible.append(SchemaImpossible(_one(r, "action"), body, lineno))
        case "choice":
            schema.choices.append(SchemaChoice(
                triggers=list(r["triggers"]),
                member=_one(r, "member"),
                generator=_one(r, "generator"),
                body=body,
                line=lineno,
            ))
        case "initially":
            schema.initially.append(SchemaInitially(_one(r, "literal"), lineno))
        case "select":
            schema.selections.append(SchemaSelect(_one(r, "agent"), _one(r, "goal"), _one(r, "trigger"), lineno))
        case "futile":
            schema.futility.append(SchemaFutile(_one(r, "activity"), _one(r, "fluent"), _one(r, "value") == "true", lineno))
