"""Synthetic-scenario tests: frame generation, reports, policy comparison."""
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spotlight import (
    AudienceMember,
    ExpressionVector,
    ComparisonReport,
    Policy,
    Reason,
    ScenarioSpec,
    SessionConfig,
    SessionReport,
    archetype,
    compare_policies,
    gen_frames,
    load_scenario,
    run_scenario,
    scenario_from_doc,
)

from oracle_reference import RefRng


def members(*names, arch=None):
    arch = arch or archetype("stoic")
    return tuple(AudienceMember(n, arch) for n in names)


def quiet_stoic():
    # zero sensor noise: every member emits bit-identical signals
    return archetype("stoic", noise_std_y=0.0, noise_std_yaw=0.0)


# --- frame generation ---------------------------------------------------------


def test_stoic_constant_signals():
    scenario = ScenarioSpec(
        duration_ms=10_000, fps=15.0, audience=members("a", arch=quiet_stoic())
    )
    frames = gen_frames(scenario)
    assert len(frames) == 150
    for f in frames:
        assert f.face_detected
        assert f.head.y == 0.5
        assert f.head.yaw_deg == 0.0
        assert f.head.roll_deg == 0.0
        assert f.expressions == ExpressionVector()


def test_camera_off_emits_no_face():
    scenario = ScenarioSpec(
        duration_ms=4_000, fps=10.0, audience=members("a", arch=archetype("camera_off"))
    )
    frames = gen_frames(scenario)
    assert len(frames) == 40
    assert all(not f.face_detected for f in frames)
    assert all(f.expressions is None and f.head is None for f in frames)


def test_frame_timing_and_interleave_order():
    scenario = ScenarioSpec(duration_ms=2_000, fps=3.0, audience=members("x", "y", "z"))
    frames = gen_frames(scenario)
    # floor(2000*3/1000) = 6 ticks, 3 members each
    assert len(frames) == 18
    ticks = [int(i * 1000.0 / 3.0) for i in range(6)]
    assert ticks == [0, 333, 666, 1000, 1333, 1666]
    for i, f in enumerate(frames):
        assert f.t_ms == ticks[i // 3]
        assert f.participant == "xyz"[i % 3]


def test_gen_frames_deterministic():
    scenario = ScenarioSpec(
        duration_ms=30_000,
        fps=5.0,
        audience=members("a", arch=archetype("nodder")) + members("b", arch=archetype("mixed")),
        seed=11,
    )
    assert gen_frames(scenario) == gen_frames(scenario)


def test_seed_changes_frames():
    aud = members("a", arch=archetype("nodder"))
    one = gen_frames(ScenarioSpec(duration_ms=30_000, fps=5.0, audience=aud, seed=1))
    two = gen_frames(ScenarioSpec(duration_ms=30_000, fps=5.0, audience=aud, seed=2))
    assert one != two


def test_sleeper_baseline_carries_through():
    scenario = ScenarioSpec(
        duration_ms=2_000, fps=5.0, audience=members("a", arch=archetype("sleeper"))
    )
    for f in gen_frames(scenario):
        assert f.expressions.neutral == 0.7
        assert f.expressions.sadness == 0.4


def test_smiler_episode_spikes_happiness():
    arch = archetype("smiler", event_rate=30.0, noise_std_y=0.0, noise_std_yaw=0.0)
    scenario = ScenarioSpec(duration_ms=60_000, fps=5.0, audience=members("a", arch=arch))
    values = {f.expressions.happiness for f in gen_frames(scenario)}
    # baseline frames plus in-episode spikes
    assert 0.2 in values
    assert 0.9 in values


def test_nodder_moves_y_not_yaw():
    arch = archetype("nodder", event_rate=30.0, noise_std_y=0.0, noise_std_yaw=0.0)
    scenario = ScenarioSpec(duration_ms=60_000, fps=15.0, audience=members("a", arch=arch))
    frames = gen_frames(scenario)
    assert any(f.head.y != 0.5 for f in frames)
    assert all(f.head.yaw_deg == 0.0 for f in frames)
    assert max(abs(f.head.y - 0.5) for f in frames) <= arch.nod_amplitude + 1e-9


def test_signals_stay_in_range():
    arch = archetype("mixed", noise_std_y=0.4, noise_std_yaw=40.0)
    scenario = ScenarioSpec(duration_ms=20_000, fps=10.0, audience=members("a", arch=arch), seed=5)
    for f in gen_frames(scenario):
        assert 0.0 <= f.head.y <= 1.0
        assert -90.0 <= f.head.yaw_deg <= 90.0
        assert -90.0 <= f.head.roll_deg <= 90.0


@settings(max_examples=25, deadline=None)
@given(
    duration_ms=st.integers(min_value=500, max_value=20_000),
    fps=st.sampled_from([1.0, 3.0, 7.5, 15.0]),
    n_members=st.integers(min_value=1, max_value=4),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_frame_stream_shape(duration_ms, fps, n_members, seed):
    names = [f"p{i}" for i in range(n_members)]
    scenario = ScenarioSpec(
        duration_ms=duration_ms, fps=fps, audience=members(*names), seed=seed
    )
    frames = gen_frames(scenario)
    per_member = int(duration_ms * fps // 1000)
    assert len(frames) == per_member * n_members
    assert all(a.t_ms <= b.t_ms for a, b in zip(frames, frames[1:]))
    assert all(f.t_ms < duration_ms for f in frames)


# --- scenario validation ------------------------------------------------------


def test_scenario_rejects_bad_shapes():
    aud = members("a")
    with pytest.raises(ValueError):
        ScenarioSpec(duration_ms=0, fps=5.0, audience=aud)
    with pytest.raises(ValueError):
        ScenarioSpec(duration_ms=1000, fps=0.0, audience=aud)
    with pytest.raises(ValueError):
        ScenarioSpec(duration_ms=1000, fps=5.0, audience=())
    with pytest.raises(ValueError):
        ScenarioSpec(duration_ms=1000, fps=5.0, audience=members("a", "a"))
    with pytest.raises(ValueError):
        ScenarioSpec(duration_ms=1000, fps=5.0, audience=aud, presenter="a")


def test_archetype_validation():
    with pytest.raises(ValueError):
        archetype("extrovert")
    with pytest.raises(ValueError):
        archetype("nodder", kind="wave")
    with pytest.raises(ValueError):
        archetype("nodder", event_rate=-1.0)
    with pytest.raises(ValueError):
        archetype("nodder", noise_std_y=-0.1)


def test_archetype_overrides():
    arch = archetype("nodder", event_rate=12.0, baseline=dict(happiness=0.3))
    assert arch.event_rate == 12.0
    assert arch.baseline.happiness == 0.3
    assert arch.kind == "nod"


# --- scenario documents -------------------------------------------------------


def test_scenario_doc_round_trip(tmp_path):
    doc = {
        "presenter": "host",
        "duration_ms": 45_000,
        "fps": 10.0,
        "seed": 4,
        "audience": [
            {"participant": "n1", "archetype": "nodder", "event_rate": 8.0},
            {"participant": "s1", "archetype": "stoic", "noise_std_y": 0.0},
            {"participant": "c1", "archetype": "confused", "baseline": {"brow_furrow": 0.25}},
        ],
    }
    scenario = scenario_from_doc(doc)
    assert scenario.presenter == "host"
    assert scenario.duration_ms == 45_000
    assert scenario.fps == 10.0
    assert scenario.seed == 4
    assert [m.participant for m in scenario.audience] == ["n1", "s1", "c1"]
    assert scenario.audience[0].archetype.event_rate == 8.0
    assert scenario.audience[1].archetype.noise_std_y == 0.0
    assert scenario.audience[2].archetype.baseline.brow_furrow == 0.25

    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_scenario(path) == scenario


def test_scenario_doc_defaults():
    doc = {"duration_ms": 1000, "audience": [{"participant": "a", "archetype": "stoic"}]}
    scenario = scenario_from_doc(doc)
    assert scenario.presenter == "presenter"
    assert scenario.fps == 15.0
    assert scenario.seed == 0


def test_scenario_doc_unknown_archetype():
    doc = {"duration_ms": 1000, "audience": [{"participant": "a", "archetype": "ghost"}]}
    with pytest.raises(ValueError, match="ghost"):
        scenario_from_doc(doc)


# --- session reports ----------------------------------------------------------


def test_run_scenario_report_consistency():
    scenario = ScenarioSpec(
        duration_ms=60_000,
        fps=5.0,
        audience=members("a", arch=archetype("nodder")) + members("b", "c"),
        seed=2,
    )
    config = SessionConfig(window_ms=15_000, seed=9)
    report = run_scenario(scenario, config)
    assert report.decisions == 4
    assert report.window_ms == 15_000
    assert report.seed == 9
    assert report.policy is Policy.AFFECTIVE
    assert set(report.dwell) == {"a", "b", "c"}
    none_windows = sum(1 for d in report.log if d.participant is None)
    assert sum(report.dwell.values()) + none_windows == report.decisions
    shown = [p for p, n in report.dwell.items() if n > 0]
    assert report.distinct_shown == len(shown)
    assert report.coverage == len(shown) / 3
    assert [d.window_index for d in report.log] == [0, 1, 2, 3]


def test_run_scenario_truncates_to_complete_windows():
    scenario = ScenarioSpec(duration_ms=300_000, fps=2.0, audience=members("a", "b"))
    report = run_scenario(scenario, SessionConfig(window_ms=15_000))
    assert report.decisions == 20
    assert len(report.log) == 20


def test_run_scenario_uses_scenario_presenter():
    scenario = ScenarioSpec(
        duration_ms=30_000, fps=5.0, audience=members("a", "b"), presenter="host"
    )
    report = run_scenario(scenario, SessionConfig(window_ms=15_000, presenter="other"))
    assert all(d.participant != "host" for d in report.log)
    assert sum(report.dwell.values()) == report.decisions


def test_roundrobin_covers_everyone():
    scenario = ScenarioSpec(
        duration_ms=90_000, fps=3.0, audience=members("a", "b", "c", "d"), seed=1
    )
    config = SessionConfig(window_ms=15_000, policy=Policy.ROUND_ROBIN)
    report = run_scenario(scenario, config)
    assert report.decisions == 6
    assert report.coverage == 1.0
    assert min(report.dwell.values()) >= 1


def test_all_tied_audience_follows_seeded_draws():
    # identical members force an exact score tie every window, so the
    # whole decision sequence reduces to the seeded draw stream
    names = ["m0", "m1", "m2", "m3", "m4"]
    scenario = ScenarioSpec(
        duration_ms=120_000, fps=5.0, audience=members(*names, arch=quiet_stoic()), seed=3
    )
    report = run_scenario(scenario, SessionConfig(window_ms=15_000, seed=7))
    assert report.decisions == 8

    rng = RefRng(7)
    current = None
    expected = []
    for _ in range(8):
        pick = rng.pick(names)
        if pick == current:
            pick = rng.pick([p for p in names if p != current])
        expected.append(pick)
        current = pick
    assert [d.participant for d in report.log] == expected
    assert expected == ["m2", "m4", "m1", "m3", "m4", "m0", "m3", "m2"]
    assert {d.reason for d in report.log} <= {
        Reason.TIE_BREAK,
        Reason.SECOND_HIGHEST_NO_REPEAT,
    }
    assert report.coverage == 1.0


def test_expressive_member_dominates_random_baseline():
    # one reactive member among stoics: the weighted policy should give
    # them at least as much time as uniform choice in nearly every run
    scenario = ScenarioSpec(
        duration_ms=150_000,
        fps=3.0,
        audience=members("nodder", arch=archetype("nodder"))
        + members("s1", "s2", "s3", arch=archetype("stoic")),
        seed=0,
    )
    config = SessionConfig(window_ms=15_000, seed=0)
    comparison = compare_policies(
        scenario, [Policy.AFFECTIVE, Policy.RANDOM], n_seeds=100, config=config
    )
    affective, random_ = comparison.policies
    assert affective.policy is Policy.AFFECTIVE
    wins = sum(
        a.dwell["nodder"] >= r.dwell["nodder"]
        for a, r in zip(affective.runs, random_.runs)
    )
    assert wins >= 90


def test_dwell_entropy():
    report = SessionReport(
        policy=Policy.RANDOM, seed=0, window_ms=1000, decisions=4,
        distinct_shown=2, coverage=1.0, dwell={"a": 2, "b": 2}, log=[],
    )
    assert report.dwell_entropy() == pytest.approx(math.log(2))
    report.dwell = {"a": 0, "b": 0}
    assert report.dwell_entropy() == 0.0


def test_session_report_doc_shape():
    scenario = ScenarioSpec(duration_ms=30_000, fps=5.0, audience=members("a", "b"))
    doc = run_scenario(scenario, SessionConfig(window_ms=15_000)).as_doc()
    assert doc["type"] == "session_report"
    assert doc["policy"] == "affective"
    assert doc["decisions"] == 2
    assert len(doc["windows"]) == 2
    assert doc["windows"][0]["type"] == "spotlight"
    assert doc["dwell"] == dict(sorted(doc["dwell"].items()))
    json.dumps(doc)  # doc must be plain JSON


# --- policy comparison --------------------------------------------------------


def small_scenario():
    return ScenarioSpec(
        duration_ms=30_000,
        fps=3.0,
        audience=members("a", arch=archetype("nodder")) + members("b", "c"),
        seed=6,
    )


def test_compare_policies_is_deterministic():
    config = SessionConfig(window_ms=15_000, seed=1)
    one = compare_policies(small_scenario(), [Policy.AFFECTIVE, Policy.RANDOM], 4, config)
    two = compare_policies(small_scenario(), [Policy.AFFECTIVE, Policy.RANDOM], 4, config)
    assert one.as_doc() == two.as_doc()


def test_compare_policies_same_policy_twice():
    comparison = compare_policies(small_scenario(), [Policy.RANDOM, Policy.RANDOM], 3)
    first, second = comparison.policies
    assert first.as_doc() == second.as_doc()
    for a, b in zip(first.runs, second.runs):
        assert a.dwell == b.dwell
        assert a.log == b.log


def test_compare_policies_seed_ladder():
    config = SessionConfig(window_ms=15_000, seed=40)
    comparison = compare_policies(small_scenario(), [Policy.RANDOM], 3, config)
    (summary,) = comparison.policies
    assert [r.seed for r in summary.runs] == [40, 41, 42]
    for run in summary.runs:
        direct = run_scenario(small_scenario(), SessionConfig(
            window_ms=15_000, seed=run.seed, policy=Policy.RANDOM))
        assert run.log == direct.log


def test_compare_policies_single_seed_medians():
    comparison = compare_policies(small_scenario(), [Policy.AFFECTIVE], 1)
    (summary,) = comparison.policies
    run = summary.runs[0]
    assert summary.coverage_median == run.coverage
    assert summary.entropy_median == pytest.approx(run.dwell_entropy())
    assert summary.decisions_median == float(run.decisions)
    assert summary.coverage_iqr == (run.coverage, run.coverage)


def test_compare_policies_rejects_bad_seed_count():
    with pytest.raises(ValueError):
        compare_policies(small_scenario(), [Policy.RANDOM], 0)
    with pytest.raises(ValueError):
        compare_policies(small_scenario(), [Policy.RANDOM], -2)


def test_comparison_doc_shape():
    doc = compare_policies(small_scenario(), [Policy.AFFECTIVE, Policy.ROUND_ROBIN], 2).as_doc()
    assert doc["type"] == "comparison_report"
    assert [p["policy"] for p in doc["policies"]] == ["affective", "roundrobin"]
    for p in doc["policies"]:
        assert p["seeds"] == 2
        assert len(p["runs"]) == 2
        assert set(p["coverage"]) == {"median", "iqr"}
    json.dumps(doc)
