"""Question answering over interpretations."""

from .questions import Question, parse_question, validate, who_candidates
from .answers import (
    Answer,
    ModelAnswer,
    aggregate,
    answer,
    answer_model,
    answer_occur,
    answer_when,
    answer_where,
    answer_who,
)
