import json
from pathlib import Path

import pytest

from config import EXIT_GOLDEN, EXIT_NO_MODEL, EXIT_PARSE, get_scenario_by_slug
from errors import NarrativeError
from kb.restaurant import action_sorts, sort_parents
from kb.terms import term
from narrative.frames import DrsAtom, EventFrame, frames_from_drs, map_frames, parse_rules
from narrative.golden import diff_golden, load_golden, parse_golden, write_golden
from narrative.parser import load_narrative, parse_narrative, print_narrative
from narrative.report import SCHEMA_VERSION, timeline_frame, to_json
from narrative.runner import RunOptions, run, run_text

STORIES = Path(__file__).resolve().parent.parent / "stories"

RULES = parse_rules("""
go_01 -> go(A1, A4) requires a1, a4
lead_01 -> lead_to(A0, A1, t) requires a1
order_02 -> order(A0, A1, A2) requires a0, a1
request_01 -> request(A0, A1, A2) requires a0, a1
alias "vegetarian restaurant" veg_r
""")


class TestParseNarrative:
    def test_example1(self):
        nf = load_narrative(STORIES / "example1.story")
        assert len(nf.instances) == 5
        assert len(nf.hpd) == 5
        assert sorted({f.step for f in nf.hpd}) == [0, 1, 2, 3, 4]
        assert len(nf.questions) == 5
        assert nf.hpd[0].term == term("go", "nicole", "veg_r")
        assert nf.hpd[0].line == 9

    @pytest.mark.parametrize("path", sorted(STORIES.glob("*.story")), ids=lambda p: p.stem)
    def test_print_reads_back(self, path):
        nf = load_narrative(path)
        assert parse_narrative(print_narrative(nf)) == nf

    def test_contradiction(self):
        with pytest.raises(NarrativeError, match="Contradicts line 1") as e:
            parse_narrative("hpd leave(nicole) true 0\nhpd leave(nicole) false 0\n")
        assert e.value.line == 2

    def test_repeated_fact_is_kept_once(self):
        nf = parse_narrative("hpd leave(nicole) true 0\nhpd leave(nicole) true 0\n")
        assert len(nf.hpd) == 1

    def test_unknown_statement(self):
        with pytest.raises(NarrativeError, match="Unknown statement 'happens'"):
            parse_narrative("instance nicole customer\n  happens leave(nicole) 0\n")

    def test_next_must_be_adjacent(self):
        with pytest.raises(NarrativeError, match="adjacent"):
            parse_narrative("next 0 2\n")

    def test_instance_with_two_sorts(self):
        with pytest.raises(NarrativeError, match="declared as customer and waiter"):
            parse_narrative("instance nicole customer\ninstance nicole waiter\n")

    def test_bad_question(self):
        with pytest.raises(NarrativeError) as e:
            parse_narrative("instance nicole customer\nquestion why leave(nicole)\n")
        assert e.value.line == 2

    def test_empty_story_has_no_customer(self):
        result = run_text("")
        assert result.exit_code == EXIT_PARSE
        assert "no customer declared" in result.error


class TestFrames:
    def test_roles_and_aliases(self):
        frame = EventFrame("e1", "go_01", (("a1", "nicole"), ("a4", "vegetarian restaurant")), 0)
        mapped = map_frames([frame], RULES, action_sorts(), {"nicole": "customer"})
        assert [(f.term, f.step) for f in mapped.facts] == [(term("go", "nicole", "veg_r"), 0)]
        assert mapped.minted == {}

    def test_unknown_sense_is_skipped(self, caplog):
        frame = EventFrame("e9", "dance_01", (("a0", "nicole"),), 3)
        mapped = map_frames([frame], RULES, action_sorts(), {"nicole": "customer"})
        assert mapped.facts == []
        assert mapped.skipped == [(frame, "no mapping rule for dance_01")]
        assert "Skipping frame e9" in caplog.text

    def test_missing_required_role(self):
        frame = EventFrame("e2", "order_02", (("a0", "nicole"),), 1)
        mapped = map_frames([frame], RULES, action_sorts())
        assert "missing role(s) a1" in mapped.skipped[0][1]

    def test_strict_mode_raises(self):
        frame = EventFrame("e9", "dance_01", (), 3)
        with pytest.raises(NarrativeError, match="e9"):
            map_frames([frame], RULES, action_sorts(), strict=True)

    def test_missing_role_uses_the_only_instance(self):
        frame = EventFrame("e3", "lead_01", (("a1", "nicole"),), 1)
        mapped = map_frames([frame], RULES, action_sorts(), {"nicole": "customer", "waitress": "waiter"})
        assert mapped.facts[0].term == term("lead_to", "waitress", "nicole", "t")
        assert mapped.minted == {}

    def test_missing_role_mints_a_constant(self):
        frame = EventFrame("e3", "lead_01", (("a1", "nicole"),), 1)
        mapped = map_frames([frame], RULES, action_sorts(), {"nicole": "customer"})
        assert mapped.facts[0].term == term("lead_to", "waiter1", "nicole", "t")
        assert mapped.minted == {"waiter1": "waiter"}

    def test_missing_role_uses_the_only_instance_of_a_sub_sort(self):
        frame = EventFrame("e5", "request_01", (("a0", "waitress"), ("a1", "lentil_soup")), 3)
        instances = {"waitress": "waiter", "lentil_soup": "food"}
        mapped = map_frames([frame], RULES, action_sorts(), instances, sort_parents=sort_parents())
        assert mapped.facts[0].term == term("request", "waitress", "lentil_soup", "waitress")
        assert mapped.minted == {}

    def test_two_sub_sort_instances_mint_a_constant(self):
        frame = EventFrame("e5", "request_01", (("a0", "waitress"), ("a1", "lentil_soup")), 3)
        instances = {"waitress": "waiter", "cook1": "cook", "lentil_soup": "food"}
        mapped = map_frames([frame], RULES, action_sorts(), instances, sort_parents=sort_parents())
        assert mapped.facts[0].term == term("request", "waitress", "lentil_soup", "person1")
        assert mapped.minted == {"person1": "person"}

    def test_rule_mapped_twice(self):
        with pytest.raises(NarrativeError, match="mapped twice"):
            parse_rules("go_01 -> go(A1, A4)\ngo_01 -> go(A0, A4)\n")

    def test_frames_from_drs(self):
        atoms = [
            DrsAtom("property", ("r1", "nicole")),
            DrsAtom("event", ("e4",)),
            DrsAtom("eventType", ("e4", "eat_01")),
            DrsAtom("eventArgs", ("e4", "a0", "r1")),
            DrsAtom("eventArgs", ("e4", "a1", "lentil soup")),
            DrsAtom("eventTime", ("e4", 3)),
            DrsAtom("eventType", ("e5", "leave_01")),
            DrsAtom("eventArgs", ("e5", "a0", "r1")),
        ]
        eat, leave = frames_from_drs(atoms)
        assert eat == EventFrame("e4", "eat_01", (("a0", "nicole"), ("a1", "lentil soup")), 3)
        assert leave.step == 4
        assert leave.role("a0") == "nicole"

    def test_frames_scenario_reads_like_example1(self, scenario_run):
        result = scenario_run("example1-frames")
        assert result.report.golden.matched
        (model,) = result.report.models
        assert model.mapping.as_dict() == {0: 2, 1: 11, 2: 19, 3: 20, 4: 31}
        assert result.report.skipped_frames == []


class TestGolden:
    def test_parse_blocks(self):
        blocks = parse_golden("% comment\n% model 1\nmap(0, 2)\noccurs(go(nicole,veg_r),2)\n% model 2\nmap(0,3)\n")
        assert blocks == [frozenset({"map(0,2)", "occurs(go(nicole,veg_r),2)"}), frozenset({"map(0,3)"})]

    def test_single_block_without_marker(self):
        assert parse_golden("map(0,2)\n") == [frozenset({"map(0,2)"})]

    def test_bad_atom(self):
        with pytest.raises(NarrativeError, match="Not an occurs/map atom") as e:
            parse_golden("map(0,2)\nholds(in(nicole,veg_r),3)\n")
        assert e.value.line == 2

    def test_written_trace_matches(self, scenario_run):
        models = scenario_run("example2").report.models
        text = write_golden(models)
        assert text.count("% model") == 7
        assert diff_golden(models, parse_golden(text)).matched

    def test_diff_reports_atoms(self, scenario_run):
        models = scenario_run("example1").report.models
        golden = load_golden(get_scenario_by_slug("example4").golden_path)
        diff = diff_golden(models, golden)
        assert not diff.matched
        assert (diff.expected_blocks, diff.actual_blocks) == (2, 1)
        assert "occurs(eat(nicole,lentil_soup),20)" in diff.unexpected
        assert "occurs(interference,13)" in diff.missing


class TestReport:
    def test_json_is_deterministic(self, scenario_run):
        cached = scenario_run("example1")
        fresh = run(get_scenario_by_slug("example1").story_path)
        assert to_json(fresh.report) == to_json(cached.report)
        data = json.loads(to_json(fresh.report))
        assert data["schema"] == SCHEMA_VERSION
        assert data["model_count"] == 1
        assert "elapsed" not in data
        assert data["models"][0]["mapping"]["3"] == 20

    def test_timeline_frame(self, scenario_run):
        result = scenario_run("example1")
        (model,) = result.report.models
        frame = timeline_frame(result.domain, model)
        assert list(frame.columns) == ["story", "cook1", "nicole", "waitress", "other"]
        assert len(frame) == 33
        assert frame.loc[2, "nicole"] == "go(nicole,veg_r)"
        assert frame.loc[2, "story"] == "0"
        assert frame.loc[0, "story"] == ""


class TestQuestions:
    def test_asked_question_in_story_is_answered_once(self):
        story = get_scenario_by_slug("example1").story_path
        result = run(story, RunOptions(ask=["occur pay(nicole,b)", "occur eat(nicole,lentil_soup)"]))
        asked = [str(a.question) for a in result.report.answers]
        assert asked == ["occur leave(nicole)", "occur pay(nicole,b)", "when eat(nicole,lentil_soup)",
                         "who pay(?,b)", "where nicole", "occur eat(nicole,lentil_soup)"]


class TestExitCodes:
    def test_golden_mismatch(self):
        scenario = get_scenario_by_slug("example1")
        golden = get_scenario_by_slug("example2").golden_path
        result = run(scenario.story_path, RunOptions(golden=str(golden)))
        assert result.exit_code == EXIT_GOLDEN
        assert not result.report.golden.matched

    def test_no_model(self):
        result = run(get_scenario_by_slug("example1").story_path, RunOptions(horizon=5))
        assert result.exit_code == EXIT_NO_MODEL
        assert result.report.models == []
        assert result.report.diagnostic

    def test_missing_file(self, tmp_path):
        result = run(tmp_path / "missing.story")
        assert result.exit_code == EXIT_PARSE
        assert "not found" in result.error

    def test_unknown_action(self):
        result = run_text("instance nicole customer\nhpd fly(nicole) true 0\n")
        assert result.exit_code == EXIT_PARSE
        assert "unknown action fly(nicole)" in result.error
