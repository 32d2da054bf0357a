"""Answering questions over models, one model at a time and across all of them."""

import logging
from dataclasses import dataclass, field
from typing import Sequence

from config.constants import QuestionKind, Verdict
from kb.domain import Domain
from kb.terms import Term
from kb.transition import is_impossible
from qa.questions import Question, validate, who_candidates
from reader.categories import justified
from reader.history import Model

logger = logging.getLogger(__name__)

LOCATION_FLUENTS = ("at_loc", "in")


@dataclass(frozen=True)
class ModelAnswer:
    """One model's answer: a verdict and, for when/who/where, the values found."""
    verdict: Verdict
    values: tuple = ()

    def text(self) -> str:
        if not self.values:
            return self.verdict.value
        return ", ".join(_value_text(v) for v in self.values)


def _value_text(value) -> str:
    if isinstance(value, tuple):
        step, story_step = value
        return f"{step}" if story_step is None else f"{step} (story step {story_step})"
    return str(value)


@dataclass(frozen=True)
class Answer:
    question: Question
    per_model: dict[int, ModelAnswer] = field(default_factory=dict)
    verdict: Verdict = Verdict.NO_MODEL
    values: tuple = ()

    @property
    def groups(self) -> dict[str, list[int]]:
        """Answer text -> ids of the models giving it."""
        result: dict[str, list[int]] = {}
        for model_id, answer in sorted(self.per_model.items()):
            result.setdefault(answer.text(), []).append(model_id)
        return result

    def text(self) -> str:
        if self.verdict == Verdict.DEPENDS:
            cases = "; ".join(f"models {','.join(map(str, ids))}: {text}"
                              for text, ids in self.groups.items())
            return f"depends ({cases})"
        return ModelAnswer(self.verdict, self.values).text()

    def to_dict(self) -> dict:
        return {
            "question": str(self.question),
            "aggregate": self.verdict.value,
            "answer": self.text(),
            "per_model": {str(k): {"verdict": v.verdict.value, "answer": v.text()}
                          for k, v in sorted(self.per_model.items())},
        }


# -- per model ----------------------------------------------------------------

def answer_occur(domain: Domain, model: Model, action: Term) -> Verdict:
    """yes if it occurs; no if it could never have occurred; unknown otherwise.

    An agent's action could never have occurred when it is not the next
    action of any activity the agent has in progress at any step; any action
    could never have occurred when it is impossible in every state.
    """
    if model.steps_of(action):
        return Verdict.YES
    states = model.states
    if all(is_impossible(domain, s, action) for s in states):
        return Verdict.NO
    agents = domain.agent_actors(action)
    if agents and not any(justified(domain, s, agent, action) for s in states for agent in agents):
        return Verdict.NO
    return Verdict.UNKNOWN


def answer_when(domain: Domain, model: Model, action: Term) -> ModelAnswer:
    steps = tuple((i, model.mapping.story_step_at(i)) for i in model.steps_of(action))
    if steps:
        return ModelAnswer(Verdict.YES, steps)
    occur = answer_occur(domain, model, action)
    return ModelAnswer(Verdict.NEVER if occur == Verdict.NO else Verdict.UNKNOWN)


def answer_who(domain: Domain, model: Model, question: Question) -> ModelAnswer:
    actors = sorted({actor for actor, action in who_candidates(domain, question)
                     if model.steps_of(action)})
    if actors:
        return ModelAnswer(Verdict.YES, tuple(str(a) for a in actors))
    return ModelAnswer(Verdict.UNKNOWN)


def answer_where(model: Model, person: Term, story_step: int | None = None) -> ModelAnswer:
    """Locations of ``person`` at the step ``story_step`` was read, else at the end."""
    if story_step is None:
        state = model.states[-1]
    elif story_step < len(model.mapping):
        state = model.states[model.mapping[story_step]]
    else:
        return ModelAnswer(Verdict.UNKNOWN)
    places = sorted(str(f.args[1]) for f in state.holds
                    if f.name in LOCATION_FLUENTS and f.arity == 2 and f.args[0] == person)
    if places:
        return ModelAnswer(Verdict.YES, tuple(places))
    return ModelAnswer(Verdict.UNKNOWN)


def answer_model(domain: Domain, model: Model, question: Question) -> ModelAnswer:
    match question.kind:
        case QuestionKind.OCCUR:
            return ModelAnswer(answer_occur(domain, model, question.subject))
        case QuestionKind.WHEN:
            return answer_when(domain, model, question.subject)
        case QuestionKind.WHO:
            return answer_who(domain, model, question)
        case QuestionKind.WHERE:
            return answer_where(model, question.subject, question.story_step)


# -- across models --------------------------------------------------------------

def aggregate(question: Question, per_model: dict[int, ModelAnswer]) -> Answer:
    """Unanimous answers stand; otherwise the answer depends on the model."""
    if not per_model:
        return Answer(question, {}, Verdict.NO_MODEL)
    distinct = set(per_model.values())
    if len(distinct) == 1:
        only = distinct.pop()
        return Answer(question, dict(per_model), only.verdict, only.values)
    return Answer(question, dict(per_model), Verdict.DEPENDS)


def answer(domain: Domain, models: Sequence[Model], question: Question,
           story_length: int | None = None) -> Answer:
    """Validate ``question`` and answer it over ``models``.

    Raises:
        QuestionError: when the question does not fit the domain.
    """
    validate(domain, question, story_length)
    per_model = {m.id: answer_model(domain, m, question) for m in models}
    result = aggregate(question, per_model)
    logger.debug("%s -> %s", question, result.text())
    return result
