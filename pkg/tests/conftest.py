"""Shared instance builders for the test suite."""

from __future__ import annotations

import random

import pytest

import teamforge as tf

PREF_VALUES = (-4, -2, -1, 0, 0, 1, 2, 4)


def make_instance(
    m: int,
    n: int,
    k_min: int,
    k_max: int,
    p=None,
    *,
    skills=(0,),
    skill_sets=None,
    c=0,
    d=4,
):
    """Tiny-instance builder with permissive defaults."""
    if p is None:
        p = [[0] * m for _ in range(m)]
    if skill_sets is None:
        skill_sets = [set(skills) for _ in range(m)]
    return tf.validate_instance(
        m=m, n=n, k_min=k_min, k_max=k_max,
        skills=skills, skill_sets=skill_sets, c=c, d=d, preferences=p,
    )


def random_small_instance(rng: random.Random, max_m: int = 9) -> tf.Instance:
    """Random instance small enough for the brute-force oracle."""
    while True:
        n = rng.randint(2, 3)
        k_min = rng.randint(1, 3)
        k_max = rng.randint(k_min, 4)
        lo, hi = max(n * k_min, 4), min(n * k_max, max_m)
        if lo <= hi:
            m = rng.randint(lo, hi)
            break
    n_skills = rng.randint(1, 4)
    c = rng.randint(0, n_skills)
    sets = [
        {s for s in range(n_skills) if rng.random() < 0.6} for _ in range(m)
    ]
    p = [
        [0 if a == b else rng.choice(PREF_VALUES) for b in range(m)]
        for a in range(m)
    ]
    return tf.validate_instance(
        m=m, n=n, k_min=k_min, k_max=k_max,
        skills=range(n_skills), skill_sets=sets, c=c, d=4, preferences=p,
    )


@pytest.fixture
def five_student_instance() -> tf.Instance:
    """Five students where the best preference sum needs a -4 pair.

    Unconstrained O1 peaks at 16 by realizing the (0, 1) pair; demanding
    zero -4 pairs first caps O1 at 12. Pins the lexicographic chaining.
    """
    p = [
        [0, -4, 4, 0, 0],
        [4, 0, 4, 2, 0],
        [4, 4, 0, 0, 0],
        [0, 2, 0, 0, 0],
        [0, 0, 0, 0, 0],
    ]
    return tf.validate_instance(
        m=5, n=2, k_min=2, k_max=3,
        skills=[0, 1], skill_sets=[{0}, {1}, {0, 1}, {0}, {1}],
        c=1, d=4, preferences=p,
    )


@pytest.fixture
def four_student_instance() -> tf.Instance:
    """One hostile pair among four students; splitting it is optimal."""
    p = [[0] * 4 for _ in range(4)]
    p[0][1] = p[1][0] = -2
    return tf.validate_instance(
        m=4, n=2, k_min=2, k_max=2,
        skills=[0], skill_sets=[{0}] * 4, c=1, d=4, preferences=p,
    )
