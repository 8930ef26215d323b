import pytest

from photoguard.policy import ContentCategory
from photoguard.classifier.handles import StubClassifier
from photoguard.simulator import (
    EventKind,
    ScenarioError,
    generate_decision_table_scenario,
    parse_scenario,
    run_scenario,
)
from photoguard.store import ContentStore


@pytest.fixture
def photo(tmp_path):
    p = tmp_path / "p.jpg"
    p.write_bytes(b"photo bytes")
    return p


class TestParseScenario:
    def test_directives_map_to_events(self):
        script = parse_scenario(
            "SET_SYSTEM locked\n"
            "SET_APP gallery foreground\n"
            "WHITELIST backup\n"
            "ADD_PHOTO /p/a.jpg nude\n"
            "ACCESS gallery /p/a.jpg\n"
            "USER_DECISION allow\n"
            "EXPECT deny screen_locked\n"
        )
        assert [e.kind for e in script.events] == [
            EventKind.SET_SYSTEM,
            EventKind.SET_APP,
            EventKind.WHITELIST,
            EventKind.ADD_PHOTO,
            EventKind.ACCESS,
            EventKind.USER_DECISION,
            EventKind.EXPECT,
        ]

    def test_comments_and_blank_lines_ignored(self):
        script = parse_scenario("# comment\n\nSET_SYSTEM unlocked\n")
        assert len(script.events) == 1
        assert script.events[0].line_no == 3

    def test_unknown_directive_names_line(self):
        with pytest.raises(ScenarioError, match="line 2"):
            parse_scenario("SET_SYSTEM locked\nFLY_TO_MOON now\n")

    def test_malformed_arguments_rejected(self):
        with pytest.raises(ScenarioError):
            parse_scenario("SET_SYSTEM sideways\n")
        with pytest.raises(ScenarioError):
            parse_scenario("EXPECT allow not_a_reason\n")
        with pytest.raises(ScenarioError):
            parse_scenario("ADD_PHOTO p.jpg not_a_label\n")


class TestRunScenario:
    def test_locked_access_denied(self, photo):
        script = parse_scenario(
            f"SET_SYSTEM locked\nADD_PHOTO {photo} public\nACCESS app {photo}\nEXPECT deny screen_locked\n"
        )
        trace = run_scenario(script)
        assert trace.passed

    def test_unlocked_foreground_public_allowed(self, photo):
        script = parse_scenario(
            "SET_SYSTEM unlocked\n"
            "SET_APP app foreground\n"
            f"ADD_PHOTO {photo} public\n"
            f"ACCESS app {photo}\n"
            "EXPECT allow public_content\n"
        )
        assert run_scenario(script).passed

    def test_user_decision_resolves_prompt(self, photo):
        script = parse_scenario(
            "SET_SYSTEM unlocked\n"
            "SET_APP app foreground\n"
            f"ADD_PHOTO {photo} nude\n"
            f"ACCESS app {photo}\n"
            "EXPECT prompt private_content\n"
            "USER_DECISION allow\n"
            "EXPECT allow user_allowed\n"
        )
        assert run_scenario(script).passed

    def test_user_decision_without_prompt_is_script_error(self, photo):
        script = parse_scenario(
            "SET_SYSTEM unlocked\n"
            "SET_APP app foreground\n"
            f"ADD_PHOTO {photo} public\n"
            f"ACCESS app {photo}\n"
            "USER_DECISION allow\n"
        )
        with pytest.raises(ScenarioError, match="pending prompt"):
            run_scenario(script)

    def test_non_photo_access_bypasses_policy(self, tmp_path):
        doc = tmp_path / "song.mp3"
        doc.write_bytes(b"mp3")
        script = parse_scenario(f"SET_SYSTEM locked\nACCESS app {doc}\nEXPECT allow not_a_photo\n")
        assert run_scenario(script).passed

    def test_mismatch_marks_failed_line(self, photo):
        script = parse_scenario(
            f"SET_SYSTEM locked\nADD_PHOTO {photo} public\nACCESS app {photo}\nEXPECT allow public_content\n"
        )
        trace = run_scenario(script)
        assert not trace.passed
        assert trace.failed_at == 4

    def test_default_app_state_is_background(self, photo):
        # no SET_APP: fail-closed means background, not foreground
        script = parse_scenario(
            f"SET_SYSTEM unlocked\nADD_PHOTO {photo} public\nACCESS app {photo}\nEXPECT deny app_in_background\n"
        )
        assert run_scenario(script).passed

    def test_classify_on_miss_uses_classifier(self, photo):
        stub = StubClassifier({photo.name: ContentCategory.NUDE})
        script = parse_scenario(
            f"SET_SYSTEM unlocked\nSET_APP app foreground\nACCESS app {photo}\nEXPECT prompt private_content\n"
        )
        trace = run_scenario(script, classifier=stub)
        assert trace.passed
        assert stub.calls == 1

    def test_unclassifiable_access_fails_closed(self, tmp_path):
        # photo never added, no classifier available: treated as private
        script = parse_scenario(
            "SET_SYSTEM unlocked\n"
            "SET_APP app foreground\n"
            f"ACCESS app {tmp_path / 'ghost.jpg'}\n"
            "EXPECT prompt private_content\n"
        )
        assert run_scenario(script).passed

    def test_missing_fixture_file_is_error(self, tmp_path):
        script = parse_scenario(f"ADD_PHOTO {tmp_path / 'none.jpg'} public\n")
        with pytest.raises(ScenarioError, match="fixture"):
            run_scenario(script)


class TestDeterminism:
    def test_identical_runs_render_identically(self, photo):
        text = (
            "SET_SYSTEM unlocked\n"
            "SET_APP app foreground\n"
            f"ADD_PHOTO {photo} family\n"
            f"ACCESS app {photo}\n"
            "EXPECT prompt private_content\n"
            "USER_DECISION deny\n"
            "EXPECT deny user_denied\n"
        )
        first = run_scenario(parse_scenario(text), store=ContentStore())
        second = run_scenario(parse_scenario(text), store=ContentStore())
        assert first.render() == second.render()

    def test_trace_uses_logical_steps(self, photo):
        script = parse_scenario(f"ADD_PHOTO {photo} public\nSET_SYSTEM unlocked\n")
        trace = run_scenario(script)
        assert [e.step for e in trace.entries] == [0, 1]


class TestGeneratedDecisionTable:
    def test_generated_scenario_passes_all_40_rows(self, tmp_path):
        text = generate_decision_table_scenario(tmp_path / "fixtures")
        script = parse_scenario(text)
        trace = run_scenario(script, store=ContentStore())
        assert trace.passed
        expects = [e for e in script.events if e.kind is EventKind.EXPECT]
        assert len(expects) == 40
