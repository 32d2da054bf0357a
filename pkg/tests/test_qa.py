import random

import pytest

from config.constants import QuestionKind, Verdict
from errors import QuestionError
from kb.terms import Term, term
from kb.transition import legal
from qa.answers import aggregate, answer, answer_occur, answer_where, ModelAnswer
from qa.questions import parse_question, validate, who_candidates
from reader.categories import justified


def answers_of(scenario_run, slug):
    return {str(a.question): a for a in scenario_run(slug).report.answers}


class TestParseQuestion:
    def test_kinds(self):
        q = parse_question("occur pay(nicole,b)")
        assert q.kind == QuestionKind.OCCUR
        assert q.subject == term("pay", "nicole", "b")
        assert parse_question("who pay(?,b)").open_slots == [0]
        where = parse_question("where nicole 3")
        assert where.subject == Term("nicole")
        assert where.story_step == 3
        assert str(where) == "where nicole 3"

    @pytest.mark.parametrize("text", ["", "why pay(nicole,b)", "occur pay(nicole,", "occur pay(nicole,b) 2"])
    def test_malformed(self, text):
        with pytest.raises(QuestionError):
            parse_question(text)


class TestValidate:
    def test_undeclared_action(self, domain):
        with pytest.raises(QuestionError, match="Undeclared"):
            validate(domain, parse_question("occur fly(nicole)"))

    def test_mental_actions_cannot_be_asked(self, domain):
        with pytest.raises(QuestionError):
            validate(domain, parse_question("occur wait(nicole)"))

    def test_who_needs_one_slot(self, domain):
        with pytest.raises(QuestionError, match="exactly one"):
            validate(domain, parse_question("who order(?,?,waitress)"))

    def test_occur_needs_ground_action(self, domain):
        with pytest.raises(QuestionError, match="ground"):
            validate(domain, parse_question("occur pay(?,b)"))

    def test_where_needs_a_person(self, domain):
        with pytest.raises(QuestionError, match="Unknown person"):
            validate(domain, parse_question("where m"))

    def test_where_step_in_range(self, domain):
        validate(domain, parse_question("where nicole 4"), story_length=5)
        with pytest.raises(QuestionError, match="out of range"):
            validate(domain, parse_question("where nicole 5"), story_length=5)

    def test_who_candidates(self, domain):
        actors = [str(a) for a, _ in who_candidates(domain, parse_question("who pay(?,b)"))]
        assert actors == ["cook1", "nicole", "waitress"]


class TestScenarioAnswers:
    def test_normal_story(self, scenario_run):
        answers = answers_of(scenario_run, "example1")
        assert answers["occur leave(nicole)"].verdict == Verdict.YES
        assert answers["occur pay(nicole,b)"].verdict == Verdict.YES
        assert answers["when eat(nicole,lentil_soup)"].text() == "20 (story step 3)"
        assert answers["who pay(?,b)"].text() == "nicole"
        assert answers["where nicole"].text() == "outside"

    def test_serendipity(self, scenario_run):
        answers = answers_of(scenario_run, "example2")
        assert answers["occur leave(nicole)"].verdict == Verdict.YES
        assert answers["occur pay(nicole,b)"].verdict == Verdict.NO
        assert answers["who pay(?,b)"].text() == "owner"

    def test_futility(self, scenario_run):
        answers = answers_of(scenario_run, "example3")
        assert answers["occur eat(nicole,lentil_soup)"].verdict == Verdict.NO
        assert answers["occur leave(nicole)"].verdict == Verdict.NO
        assert answers["who pay(?,b)"].verdict == Verdict.UNKNOWN

    def test_diagnosis_depends(self, scenario_run):
        a = answers_of(scenario_run, "example4")["occur request(waitress,lentil_soup,cook1)"]
        assert a.verdict == Verdict.DEPENDS
        assert a.groups == {"no": [1], "yes": [2]}
        assert a.text() == "depends (models 1: no; models 2: yes)"
        assert a.to_dict()["aggregate"] == "depends"

    def test_where_at_story_step(self, scenario_run):
        (model,) = scenario_run("example1").report.models
        assert answer_where(model, Term("nicole"), 1).values == ("t", "veg_r")
        assert answer_where(model, Term("nicole"), 9).verdict == Verdict.UNKNOWN

    def test_no_models(self, domain):
        result = answer(domain, [], parse_question("occur leave(nicole)"))
        assert result.verdict == Verdict.NO_MODEL
        assert result.text() == "no consistent interpretation"


def test_aggregate_unanimous():
    q = parse_question("occur leave(nicole)")
    result = aggregate(q, {1: ModelAnswer(Verdict.YES), 2: ModelAnswer(Verdict.YES)})
    assert result.verdict == Verdict.YES


def test_occur_answers_are_exclusive(scenario_run):
    """yes exactly when the action occurs; no never when it occurs."""
    runs = [scenario_run(slug) for slug in ("example1", "example2", "example3", "example4")]
    rng = random.Random(11)
    for _ in range(500):
        result = rng.choice(runs)
        model = rng.choice(result.report.models)
        action = rng.choice(sorted(a for a in result.domain.actions if result.domain.is_physical(a)))
        verdict = answer_occur(result.domain, model, action)
        assert verdict in (Verdict.YES, Verdict.NO, Verdict.UNKNOWN)
        assert (verdict == Verdict.YES) == bool(model.steps_of(action))


@pytest.mark.parametrize("slug", ["example1", "example2", "example3", "example4"])
def test_no_means_the_reader_rejects_it_everywhere(scenario_run, slug):
    """Adding an action answered no at any step makes that step illegal or unintended."""
    result = scenario_run(slug)
    domain = result.domain
    actions = sorted(a for a in domain.actions if domain.is_physical(a))
    for model in result.report.models:
        for action in actions:
            if answer_occur(domain, model, action) != Verdict.NO:
                continue
            agents = domain.agent_actors(action)
            for i, occ in enumerate(model.occurrences):
                state = model.states[i]
                rejected = (not legal(domain, state, occ | {action})
                            or any(not justified(domain, state, agent, action) for agent in agents))
                assert rejected, (slug, model.id, i, action)
