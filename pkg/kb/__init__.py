"""Action-language core: terms, domain descriptions, grounding, transitions."""

from .terms import Term, term, parse_term
from .domain import Activity, Domain, Literal, State
from .parser import parse_domain, load_domain
from .grounding import ground_domain
from .transition import closure, initial_state, is_impossible, legal, successors
from .restaurant import (
    RESTAURANT_DOMAIN,
    action_sorts,
    build_domain,
    load_schema,
    candidate_activities,
    default_selections,
    futile,
    futile_goal,
)
