"""Theory of intentions over the action-language core."""

from kb.domain import Activity
from .mental import (
    MentalView,
    active_goal,
    apply_mental,
    derived_mental,
    initial_mental,
    mental,
    mental_impossible,
    mental_legal,
    next_action,
    next_step,
    progress,
    replanned,
)
