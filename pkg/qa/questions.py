"""Questions a reader can be asked about a story, and their validation."""

from dataclasses import dataclass

from pyparsing import Opt, ParseException, one_of

from config.constants import QuestionKind
from errors import QuestionError
from kb.domain import Domain
from kb.terms import INTEGER, TERM, Term

KIND = one_of([k.value for k in QuestionKind], as_keyword=True)
QUESTION = KIND + TERM + Opt(INTEGER)


@dataclass(frozen=True)
class Question:
    kind: QuestionKind
    subject: Term
    story_step: int | None = None

    def __str__(self) -> str:
        text = f"{self.kind.value} {self.subject}"
        return text if self.story_step is None else f"{text} {self.story_step}"

    @property
    def open_slots(self) -> list[int]:
        return [i for i, a in enumerate(self.subject.args) if a.is_open_slot]


def parse_question(text: str) -> Question:
    """Parse ``occur pay(nicole,b)``, ``who pay(?,b)``, ``where nicole 3``.

    Raises:
        QuestionError: on malformed text.
    """
    try:
        tokens = QUESTION.parse_string(text.strip(), parse_all=True)
    except ParseException as e:
        raise QuestionError(f"Malformed question {text.strip()!r} (column {e.col})") from None
    kind = QuestionKind(tokens[0])
    step = tokens[2] if len(tokens) > 2 else None
    if step is not None and kind != QuestionKind.WHERE:
        raise QuestionError(f"Only where-questions take a story step: {text.strip()!r}")
    return Question(kind, tokens[1], step)


def who_candidates(domain: Domain, question: Question) -> list[tuple[Term, Term]]:
    """(actor, ground action) pairs a who-pattern can stand for."""
    slot = question.open_slots[0]
    found = []
    for action in sorted(domain.actions):
        if action.name != question.subject.name or action.arity != question.subject.arity:
            continue
        if all(a == b for k, (a, b) in enumerate(zip(action.args, question.subject.args)) if k != slot):
            if action.args[slot] in domain.actors.get(action, ()):
                found.append((action.args[slot], action))
    return found


def validate(domain: Domain, question: Question, story_length: int | None = None) -> None:
    """Check a question against a grounded domain.

    Raises:
        QuestionError: undeclared or mental action, wrong number of open slots,
            unknown person, story step out of range.
    """
    subject = question.subject
    match question.kind:
        case QuestionKind.OCCUR | QuestionKind.WHEN:
            if question.open_slots:
                raise QuestionError(f"{question.kind.value} needs a ground action: {subject}")
            if subject not in domain.actions or domain.is_mental(subject):
                raise QuestionError(f"Undeclared action {subject}")
        case QuestionKind.WHO:
            if len(question.open_slots) != 1:
                raise QuestionError(f"who needs exactly one open slot '?': {subject}")
            if not who_candidates(domain, question):
                raise QuestionError(f"No declared action with an actor matches {subject}")
        case QuestionKind.WHERE:
            if subject.args or subject.name not in domain.members("person"):
                raise QuestionError(f"Unknown person {subject}")
            if question.story_step is not None and story_length is not None \
                    and not 0 <= question.story_step < story_length:
                raise QuestionError(f"Story step {question.story_step} out of range")
