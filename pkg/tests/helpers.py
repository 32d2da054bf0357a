"""Helpers shared by test modules."""

from kb.grounding import ground_domain
from kb.parser import parse_domain
from kb.terms import term


def ground(text: str):
    """Ground a domain description given as text."""
    return ground_domain(parse_domain(text, source="<test>"))


def c_act(food: str = "lentil_soup"):
    return term("c_act", "nicole", "veg_r", "waitress", food)


def w_act(asked: str = "lentil_soup", served: str = "lentil_soup"):
    return term("w_act", "waitress", "nicole", asked, served)
