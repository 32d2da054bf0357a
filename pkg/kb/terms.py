"""Ground and schematic terms in prefix form, e.g. ``order(nicole,lentil_soup,waitress)``."""

import re
from dataclasses import dataclass
from typing import Iterator, Mapping

from pyparsing import (
    DelimitedList,
    Forward,
    Literal,
    Opt,
    ParseException,
    QuotedString,
    Suppress,
    Word,
    alphanums,
    alphas,
    nums,
)

OPEN_SLOT = "?"
_PLAIN = re.compile(r"^(?:[A-Za-z_][A-Za-z0-9_]*|\?)$")


@dataclass(frozen=True, order=True)
class Term:
    """A function-free-or-nested term. Variables start with an upper-case letter."""
    name: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name if _PLAIN.match(self.name) else f"\"{self.name}\""
        return f"{self.name}({','.join(str(a) for a in self.args)})"

    def __repr__(self) -> str:
        return f"Term({str(self)!r})"

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_variable(self) -> bool:
        return not self.args and self.name[:1].isupper()

    @property
    def is_open_slot(self) -> bool:
        return self.name == OPEN_SLOT and not self.args

    @property
    def is_ground(self) -> bool:
        return not self.is_variable and all(a.is_ground for a in self.args)

    def variables(self) -> Iterator[str]:
        if self.is_variable:
            yield self.name
        for a in self.args:
            yield from a.variables()

    def substitute(self, binding: Mapping[str, "Term"]) -> "Term":
        if self.is_variable:
            return binding.get(self.name, self)
        if not self.args:
            return self
        return Term(self.name, tuple(a.substitute(binding) for a in self.args))


def term(name: str, *args: "Term | str") -> Term:
    """Shorthand: term("eat", "nicole", "lentil_soup")."""
    return Term(name, tuple(a if isinstance(a, Term) else Term(a) for a in args))


# -- grammar ------------------------------------------------------------------

IDENT = Word(alphas + "_", alphanums + "_")
INTEGER = Word(nums).set_parse_action(lambda t: int(t[0]))
LPAR, RPAR = Suppress("("), Suppress(")")


def _to_term(tokens) -> Term:
    return Term(tokens[0], tuple(tokens[1:]))


TERM = Forward()
TERM <<= (
    (IDENT + Opt(LPAR + DelimitedList(TERM) + RPAR)).set_parse_action(_to_term)
    | Literal(OPEN_SLOT).set_parse_action(lambda t: Term(OPEN_SLOT))
    | QuotedString('"').set_parse_action(lambda t: Term(t[0]))
)
TERM.set_name("term")


def parse_term(text: str) -> Term:
    """Parse one term; raises ValueError on malformed input."""
    try:
        return TERM.parse_string(text.strip(), parse_all=True)[0]
    except ParseException as e:
        raise ValueError(f"Malformed term {text!r} (column {e.col}): {e.msg}") from None
