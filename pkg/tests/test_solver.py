"""Branch-and-bound solver: frozen optima, budgets, determinism, certification."""

import dataclasses
import random

import pytest

import teamforge as tf

from conftest import make_instance, random_small_instance

# Hand-checked lexicographic optima for the five-student fixture, keyed by
# catalog id. Adaptation drops the O3 stages whose value never occurs there
# (-2, -1, 1), so several strategies collapse to the same stage list.
FIVE_STUDENT_OPTIMA = {
    "S1.1": (0,),
    "S1.2": (0,),
    "S2.1": (16,),
    "S2.2": (5, 0),
    "S3.1": (0, 12),
    "S3.2": (0, 2, 2),
    "S3.3": (0, 12),
    "S3.4": (0, 2, 2),
    "S4.1": (0, 2, 12),
    "S4.2": (0, 2, 2),
}


def test_solve_config_validation():
    cfg = tf.SolveConfig()
    assert cfg.time_limit == 60.0
    assert cfg.time_mode == "global"
    assert cfg.node_rate == tf.NODES_PER_SECOND
    assert cfg.symmetry_breaking
    with pytest.raises(ValueError):
        tf.SolveConfig(time_limit=0.0)
    with pytest.raises(ValueError):
        tf.SolveConfig(time_mode="stagewise")
    with pytest.raises(ValueError):
        tf.SolveConfig(node_rate=0)


def test_catalog_frozen_values(five_student_instance):
    inst = five_student_instance
    for sid, strat in tf.catalog().items():
        adapted = tf.adapt_to_instance(strat, inst)
        outcome = tf.solve(inst, adapted)
        values = tuple(r.value for r in outcome.stages)
        assert values == FIVE_STUDENT_OPTIMA[sid], sid
        assert outcome.status == "optimal", sid
        assert all(r.status == "optimal" for r in outcome.stages), sid
        assert tf.certify(inst, adapted, outcome).ok


def test_o1_optimum_assignment(five_student_instance):
    strat = tf.catalog()["S2.1"]
    outcome = tf.solve(five_student_instance, strat)
    assert outcome.assignment == tf.Assignment(((3, 4), (0, 1, 2)))
    assert tf.eval_o1(five_student_instance, outcome.assignment) == 16


def test_min_pair_zero_optimum(four_student_instance):
    outcome = tf.solve(four_student_instance, tf.catalog()["S1.1"])
    assert outcome.status == "optimal"
    assert outcome.stages[0].value == 0
    team0 = outcome.assignment.teams[0]
    assert 0 in team0 and 1 not in team0  # the -2 pair must be split up


def test_singleton_teams_hit_sentinel():
    p = [[0, 2, 0], [1, 0, 0], [0, 0, 0]]
    inst = make_instance(3, 3, 1, 1, p)
    assert inst.max_pref == 2
    outcome = tf.solve(inst, tf.catalog()["S1.1"])
    assert outcome.status == "optimal"
    assert outcome.stages[0].value == 3  # max(p) + 1: no pair realized at all
    assert outcome.assignment.teams == ((0,), (1,), (2,))


def test_one_student_instance():
    inst = make_instance(1, 1, 1, 1, [[0]])
    assert inst.max_pref == 0
    outcome = tf.solve(inst, tf.catalog()["S1.1"])
    assert outcome.status == "optimal"
    assert outcome.stages[0].value == 1


def test_infeasible_instance_is_proven():
    # Two skills demanded per team but every student has only skill 0.
    inst = make_instance(
        4, 2, 2, 2,
        skills=(0, 1),
        skill_sets=[{0}, {0}, {0}, {0}],
        c=2,
    )
    outcome = tf.solve(inst, tf.catalog()["S2.1"])
    assert outcome.status == "infeasible"
    assert outcome.assignment is None
    assert tf.certify(inst, tf.catalog()["S2.1"], outcome).ok

    feas = tf.solve_feasibility(inst)
    assert feas.status == "infeasible"
    assert feas.assignment is None


def test_solve_feasibility_finds_assignment(five_student_instance):
    outcome = tf.solve_feasibility(five_student_instance)
    assert outcome.status == "optimal"
    assert tf.is_feasible(five_student_instance, outcome.assignment).ok


def test_repeat_solves_are_identical(five_student_instance):
    """Same inputs, same search: node counts and traces must match exactly."""
    strat = tf.adapt_to_instance(tf.catalog()["S3.2"], five_student_instance)
    cfg = tf.SolveConfig(time_limit=5.0, seed=3)
    a = tf.solve(five_student_instance, strat, cfg)
    b = tf.solve(five_student_instance, strat, cfg)
    assert a.assignment == b.assignment
    assert a.nodes == b.nodes
    assert [(r.value, r.status, r.nodes, r.best_at_node) for r in a.stages] == [
        (r.value, r.status, r.nodes, r.best_at_node) for r in b.stages
    ]
    assert [(t.nodes, t.o1) for t in a.quality_trace] == [
        (t.nodes, t.o1) for t in b.quality_trace
    ]


def test_seed_changes_branch_order_not_values(five_student_instance):
    inst = five_student_instance
    strat = tf.adapt_to_instance(tf.catalog()["S4.1"], inst)
    baseline = tf.solve(inst, strat, tf.SolveConfig(seed=0))
    for seed in (1, 2, 5):
        other = tf.solve(inst, strat, tf.SolveConfig(seed=seed))
        assert other.status == "optimal"
        assert [r.value for r in other.stages] == [r.value for r in baseline.stages]


def test_starved_budget_never_claims_infeasible():
    rng = random.Random(11)
    starved = tf.SolveConfig(time_limit=1.0, node_rate=1)
    seen = set()
    for _ in range(12):
        inst = random_small_instance(rng)
        if tf.solve_feasibility(inst).status != "optimal":
            continue  # only feasible instances can expose a false proof
        for strat in tf.catalog().values():
            try:
                adapted = tf.adapt_to_instance(strat, inst)
            except tf.EmptyAfterAdaptation:
                continue
            outcome = tf.solve(inst, adapted, starved)
            assert outcome.status in ("feasible", "unknown")
            seen.add(outcome.status)
            if outcome.assignment is not None:
                assert tf.certify(inst, adapted, outcome).ok
    assert "unknown" in seen


def test_budget_exhaustion_skips_later_stages(five_student_instance):
    strat = tf.adapt_to_instance(tf.catalog()["S4.1"], five_student_instance)
    outcome = tf.solve(five_student_instance, strat, tf.SolveConfig(time_limit=1.0, node_rate=1))
    assert outcome.status == "unknown"
    assert outcome.assignment is None
    assert outcome.stages[0].status == "unknown"
    assert [r.status for r in outcome.stages[1:]] == ["skipped", "skipped"]
    assert all(r.value is None for r in outcome.stages)


def test_wall_clock_backstop():
    """A wildly overestimated node rate must still respect the wall clock."""
    inst = tf.generate(tf.PRESETS["D4"], seed=0)
    cfg = tf.SolveConfig(time_limit=0.25, node_rate=10**9)
    outcome = tf.solve(inst, tf.catalog()["S2.1"], cfg)
    assert outcome.wall_time < 5.0
    assert outcome.nodes < 10**8
    if outcome.assignment is not None:
        assert tf.certify(inst, tf.catalog()["S2.1"], outcome).ok


def test_symmetry_breaking_preserves_optima(five_student_instance, four_student_instance):
    rng = random.Random(7)
    instances = [five_student_instance, four_student_instance]
    instances += [random_small_instance(rng, max_m=7) for _ in range(6)]
    for inst in instances:
        for sid in ("S2.1", "S3.1"):
            strat = tf.adapt_to_instance(tf.catalog()[sid], inst)
            on = tf.solve(inst, strat)
            off = tf.solve(inst, strat, tf.SolveConfig(symmetry_breaking=False))
            assert on.status == off.status
            assert [r.value for r in on.stages] == [r.value for r in off.stages]


def test_quality_trace_is_monotone(five_student_instance):
    outcome = tf.solve(five_student_instance, tf.catalog()["S2.1"])
    trace = outcome.quality_trace
    assert trace, "an improving search must leave a trace"
    o1s = [t.o1 for t in trace]
    assert o1s == sorted(o1s) and len(set(o1s)) == len(o1s)
    assert o1s[-1] == 16
    nodes = [t.nodes for t in trace]
    assert nodes == sorted(nodes)
    assert all(t.elapsed >= 0.0 for t in trace)


def test_certify_rejects_tampered_assignment(five_student_instance):
    strat = tf.catalog()["S2.1"]
    outcome = tf.solve(five_student_instance, strat)
    tampered = dataclasses.replace(
        outcome, assignment=tf.Assignment(((0, 2), (1, 3, 4)))
    )
    with pytest.raises(tf.CertificationFailure) as exc:
        tf.certify(five_student_instance, strat, tampered)
    assert not exc.value.report.ok
    assert any(not c.ok for c in exc.value.report.checks)


def test_certify_rejects_missing_assignment(five_student_instance):
    strat = tf.catalog()["S2.1"]
    outcome = tf.solve(five_student_instance, strat)
    tampered = dataclasses.replace(outcome, assignment=None)
    with pytest.raises(tf.CertificationFailure):
        tf.certify(five_student_instance, strat, tampered)


def test_certify_rejects_infeasible_teams(five_student_instance):
    strat = tf.catalog()["S2.1"]
    outcome = tf.solve(five_student_instance, strat)
    lopsided = dataclasses.replace(
        outcome, assignment=tf.Assignment(((0,), (1, 2, 3, 4)))
    )
    with pytest.raises(tf.CertificationFailure) as exc:
        tf.certify(five_student_instance, strat, lopsided)
    failed = [c for c in exc.value.report.checks if not c.ok]
    assert any(c.name == "assignment" for c in failed)


def test_stage_value_checks_directions(five_student_instance):
    inst = five_student_instance
    asg = tf.Assignment(((3, 4), (0, 1, 2)))  # o1 = 16, one -4 pair
    checks = tf.stage_value_checks(
        inst,
        [
            (tf.o3_min(-4), 2, "feasible"),  # threshold <= 2, actual 1
            (tf.O1, 16, "optimal"),
        ],
        asg,
    )
    assert all(c.ok for c in checks)
    checks = tf.stage_value_checks(inst, [(tf.o3_min(-4), 0, "feasible"), (tf.O1, 16, "optimal")], asg)
    assert not checks[0].ok  # promised no -4 pairs, assignment realizes one


def test_timeboxed_mode_bounds_stage_time(five_student_instance):
    strat = tf.adapt_to_instance(tf.catalog()["S4.2"], five_student_instance)
    cfg = tf.SolveConfig(time_limit=3.0, time_mode="timeboxed")
    outcome = tf.solve(five_student_instance, strat, cfg)
    per_stage = cfg.time_limit / len(strat.stages)
    assert outcome.status == "optimal"
    for r in outcome.stages:
        assert r.time_total <= per_stage + 0.1
