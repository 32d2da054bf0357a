import itertools
import random

import pytest

from kb.terms import term
from reader.history import History, StoryFact, TimelineMapping
from narrative.parser import parse_narrative, to_history
from reader.engine import interpret
from reader.mapping import enumerate_mappings, mapping_allowed


def story(n: int, next_st=()) -> History:
    return History(
        instances={"nicole": "customer"},
        hpd=[StoryFact(term("leave", "nicole"), True, s) for s in range(n)],
        next_st=list(next_st),
    )


def exhaustive(history: History, horizon: int) -> list[TimelineMapping]:
    n = len(history.story_steps)
    found = []
    for steps in itertools.combinations(range(horizon + 1), n):
        if all(steps[s] == steps[s - 1] + 1 for s in range(1, n) if history.forced_next(s)):
            found.append(TimelineMapping(steps))
    return found


class TestTimelineMapping:
    def test_accessors(self):
        m = TimelineMapping((2, 11, 19))
        assert len(m) == 3
        assert m[1] == 11
        assert m.last_assigned == 19
        assert m.story_step_at(19) == 2
        assert m.story_step_at(5) is None
        assert m.as_dict() == {0: 2, 1: 11, 2: 19}
        assert m.extend(20).steps == (2, 11, 19, 20)
        assert m.truncate(11).steps == (2,)

    def test_empty(self):
        assert TimelineMapping().last_assigned == -1


class TestMappingAllowed:
    def test_monotone(self):
        h = story(3)
        m = TimelineMapping((2,))
        assert mapping_allowed(h, m, 1, 3)
        assert not mapping_allowed(h, m, 1, 2)
        assert not mapping_allowed(h, m, 2, 5)

    def test_forced_next(self):
        h = story(4, [(2, 3)])
        m = TimelineMapping((2, 7, 9))
        assert mapping_allowed(h, m, 3, 10)
        assert not mapping_allowed(h, m, 3, 11)


class TestEnumerate:
    def test_empty_story(self):
        assert list(enumerate_mappings(story(0), 5)) == [TimelineMapping()]

    def test_horizon_too_small(self, caplog):
        assert list(enumerate_mappings(story(3), 1)) == []
        assert "too small" in caplog.text

    def test_small_case(self):
        got = [m.steps for m in enumerate_mappings(story(2), 2)]
        assert got == [(0, 1), (0, 2), (1, 2)]

    @pytest.mark.parametrize("seed", range(1000))
    def test_against_exhaustive(self, seed):
        rng = random.Random(seed)
        n = rng.randint(0, 3)
        horizon = rng.randint(1, 8)
        next_st = [(s - 1, s) for s in range(1, n) if rng.random() < 0.4]
        h = story(n, next_st)

        got = list(enumerate_mappings(h, horizon))
        assert got == exhaustive(h, horizon)
        for m in got:
            assert len(m) == n
            assert all(a < b for a, b in zip(m.steps, m.steps[1:]))
            assert all(m[s] == m[s - 1] + 1 for s in range(1, n) if (s - 1, s) in next_st)


INSTANCES = """
instance nicole customer
instance veg_r restaurant
instance lentil_soup food
instance waitress waiter
instance cook1 cook
"""


def tiny_story(rng: random.Random) -> str:
    lines = [INSTANCES, "hpd go(nicole,veg_r) true 0"]
    if rng.random() < 0.3:
        lines += ["initially open(veg_r) false", "obs open(veg_r) false 1"]
        n = 2
    else:
        later = ["hpd order(nicole,lentil_soup,waitress) true 1", "hpd put_down(waitress,lentil_soup,t) true 2"]
        extra = later[:rng.randint(0, 2)]
        lines += extra
        n = 1 + len(extra)
    lines += [f"next {s} {s + 1}" for s in range(n - 1) if rng.random() < 0.5]
    return "\n".join(lines) + "\n"


class TestReaderMappings:
    def test_models_respect_the_story_order(self, domain):
        with_models = 0
        for seed in range(12):
            history, _ = to_history(parse_narrative(tiny_story(random.Random(seed))))
            n = len(history.story_steps)
            for model in interpret(domain, history, horizon=25):
                with_models += 1
                m = model.mapping
                assert len(m) == n, seed
                assert all(a < b for a, b in zip(m.steps, m.steps[1:])), seed
                assert all(m[s1] == m[s] + 1 for s, s1 in history.next_st), seed
                assert all(model.occurrences[i] for i in range(m.last_assigned)), seed
        assert with_models
