"""Instance validation, assignment structure, and feasibility checking."""

import pytest

import teamforge as tf

from conftest import make_instance


def test_instance_accepts_valid_input():
    inst = make_instance(4, 2, 2, 2, skills=(0, 1), c=1)
    assert inst.m == 4 and inst.n == 2
    assert inst.skills == frozenset({0, 1})
    assert inst.skill_masks == (0b11,) * 4


def test_instance_coerces_collections():
    inst = tf.validate_instance(
        m=2, n=1, k_min=2, k_max=2,
        skills=[1, 0], skill_sets=[[0], [1, 0]],
        c=0, d=1, preferences=[[0, 1], [-1, 0]],
    )
    assert isinstance(inst.skill_sets[0], frozenset)
    assert inst.p == ((0, 1), (-1, 0))
    assert inst.values_present() == frozenset({1, -1})
    assert inst.max_pref == 1


def test_max_pref_single_student():
    inst = make_instance(1, 1, 1, 1)
    assert inst.max_pref == 0
    assert inst.values_present() == frozenset()


def test_size_bounds_rejected():
    with pytest.raises(tf.SizeBoundsInfeasible):
        make_instance(4, 2, 3, 2)  # k_min > k_max
    with pytest.raises(tf.SizeBoundsInfeasible):
        make_instance(5, 2, 1, 2)  # m > n * k_max
    with pytest.raises(tf.SizeBoundsInfeasible):
        make_instance(3, 2, 2, 3)  # m < n * k_min


def test_coverage_out_of_range():
    with pytest.raises(tf.CoverageOutOfRange):
        make_instance(2, 1, 2, 2, skills=(0,), c=2)
    with pytest.raises(tf.CoverageOutOfRange):
        make_instance(2, 1, 2, 2, c=-1)


def test_preference_matrix_validation():
    with pytest.raises(tf.NonZeroDiagonal):
        make_instance(2, 1, 2, 2, p=[[1, 0], [0, 0]])
    with pytest.raises(tf.PreferenceOutOfRange):
        make_instance(2, 1, 2, 2, p=[[0, 5], [0, 0]])
    with pytest.raises(tf.InstanceError):
        make_instance(2, 1, 2, 2, p=[[0, 1]])
    with pytest.raises(tf.InstanceError):
        make_instance(2, 1, 2, 2, p=[[0, 0.5], [0, 0]])


def test_undeclared_skill_rejected():
    with pytest.raises(tf.SkillNotDeclared):
        make_instance(2, 1, 2, 2, skills=(0,), skill_sets=[{0}, {7}])


def test_non_integer_shape_params_rejected():
    with pytest.raises(tf.InstanceError):
        make_instance(0, 1, 1, 1)
    with pytest.raises(tf.InstanceError):
        tf.validate_instance(
            m=2, n=1, k_min=2, k_max=2, skills=(), skill_sets=[set(), set()],
            c=0, d=True, preferences=[[0, 0], [0, 0]],
        )


def test_assignment_canonicalizes():
    asg = tf.Assignment([(3, 1), (0, 2)])
    assert asg.teams == ((0, 2), (1, 3))
    assert asg.m == 4 and asg.n == 2
    assert asg == tf.Assignment([[2, 0], [1, 3]])


def test_assignment_rejects_bad_structure():
    with pytest.raises(tf.StructuralMismatch):
        tf.Assignment([(0, 1), ()])
    with pytest.raises(tf.StructuralMismatch):
        tf.Assignment([(0, 1), (1, 2)])
    with pytest.raises(tf.StructuralMismatch):
        tf.Assignment([(0, 1), (3, 4)])  # student 2 missing


def test_realized_pairs_both_directions():
    asg = tf.Assignment([(0, 1, 2), (3,)])
    pairs = tf.realized_pairs(asg)
    assert (0, 1) in pairs and (1, 0) in pairs
    assert (2, 1) in pairs
    assert (0, 3) not in pairs
    assert len(pairs) == 6


def test_team_coverage_counts_distinct_skills():
    inst = make_instance(
        3, 1, 3, 3, skills=(0, 1, 2), skill_sets=[{0}, {0, 1}, {1}], c=0
    )
    assert tf.team_coverage(inst, (0, 1, 2)) == 2
    assert tf.team_coverage(inst, (0,)) == 1


def test_is_feasible_reports_violations():
    inst = make_instance(
        4, 2, 2, 2, skills=(0, 1), skill_sets=[{0}, {0}, {0, 1}, {1}], c=2
    )
    good = tf.Assignment([(0, 2), (1, 3)])
    report = tf.is_feasible(inst, good)
    assert report.ok and bool(report)

    bad = tf.Assignment([(0, 1), (2, 3)])  # team 0 covers only skill 0
    report = tf.is_feasible(inst, bad)
    assert not report.ok
    assert [v.constraint for v in report.violations] == ["team-skill"]


def test_is_feasible_flags_size_violations():
    inst = make_instance(4, 2, 2, 2)
    lopsided = tf.Assignment([(0, 1, 2), (3,)])
    report = tf.is_feasible(inst, lopsided)
    constraints = {v.constraint for v in report.violations}
    assert constraints == {"team-size"}
    assert len(report.violations) == 2


def test_is_feasible_rejects_shape_mismatch():
    inst = make_instance(4, 2, 2, 2)
    with pytest.raises(tf.StructuralMismatch):
        tf.is_feasible(inst, tf.Assignment([(0, 1), (2, 3), (4,)]))
    with pytest.raises(tf.StructuralMismatch):
        tf.is_feasible(inst, tf.Assignment([(0, 1, 2, 3)]))
