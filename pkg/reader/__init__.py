"""The reader: timeline mapping, intended occurrences, diagnosis and model search."""

from .history import ActivityChoice, History, Model, StoryFact, TimelineMapping
from .mapping import enumerate_mappings, mapping_allowed
from .categories import Category, agent_intentions, categorize, intended_occurrences, justified
from .diagnosis import Diagnoser
from .engine import (
    Decisions,
    Interpretation,
    Reader,
    check_branch,
    interpret,
    replay,
    story_initial_state,
)
