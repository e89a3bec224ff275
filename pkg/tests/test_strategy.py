"""Strategy text parsing, the catalog, and instance adaptation."""

import pytest

import teamforge as tf
from teamforge import o3_max, o3_min

from conftest import make_instance


def test_parse_bare_and_wrapped_forms():
    assert tf.parse_strategy("O2, O1").stages == (tf.O2, tf.O1)
    assert tf.parse_strategy("EDU-TF(O2, O1)").stages == (tf.O2, tf.O1)
    assert tf.parse_strategy("  EDU-TF( O2 ,O1 )  ").stages == (tf.O2, tf.O1)


def test_parse_o3_tokens():
    strat = tf.parse_strategy("O3-(-4), O3+(2), O3+(-1)")
    assert strat.stages == (o3_min(-4), o3_max(2), o3_max(-1))
    assert tf.parse_strategy("O3 - ( -4 )").stages == (o3_min(-4),)


def test_parse_errors():
    with pytest.raises(tf.UnknownObjective):
        tf.parse_strategy("O7")
    with pytest.raises(tf.UnknownObjective):
        tf.parse_strategy("O3+(x)")
    with pytest.raises(tf.ParseError):
        tf.parse_strategy("")
    with pytest.raises(tf.ParseError):
        tf.parse_strategy("O1,,O2")
    with pytest.raises(tf.ParseError):
        tf.parse_strategy("EDU-TF(O1")
    with pytest.raises(tf.ParseError):
        tf.parse_strategy("EDU-TF O1")
    with pytest.raises(tf.ParseError):
        tf.parse_strategy("O1)")
    err = None
    try:
        tf.parse_strategy("O1, O9")
    except tf.ParseError as exc:
        err = exc
    assert err is not None and err.position > 0


def test_duplicate_stage_rejected():
    with pytest.raises(tf.DuplicateStage):
        tf.parse_strategy("O1, O2, O1")
    with pytest.raises(tf.DuplicateStage):
        tf.Strategy((tf.O2, tf.O2))
    # same value, opposite directions: distinct stages, allowed
    tf.Strategy((o3_min(1), o3_max(1)))


def test_empty_strategy_rejected():
    with pytest.raises(ValueError):
        tf.Strategy(())


def test_render_round_trips_catalog():
    for sid, strat in tf.catalog().items():
        text = tf.render(strat)
        assert text.startswith("EDU-TF(") and text.endswith(")")
        again = tf.parse_strategy(text)
        assert again.stages == strat.stages


def test_catalog_contents():
    cat = tf.catalog()
    assert sorted(cat) == [
        "S1.1", "S1.2", "S2.1", "S2.2", "S3.1",
        "S3.2", "S3.3", "S3.4", "S4.1", "S4.2",
    ]
    assert cat["S1.1"].stages == (tf.O2,)
    assert cat["S1.2"].stages == (o3_min(-4), o3_min(-2), o3_min(-1))
    assert cat["S2.1"].stages == (tf.O1,)
    assert cat["S2.2"].stages == (o3_max(4), o3_max(2), o3_max(1))
    assert cat["S3.1"].stages == (tf.O2, tf.O1)
    assert cat["S3.2"].stages == (tf.O2, o3_max(4), o3_max(2), o3_max(1))
    assert cat["S3.3"].stages == (o3_min(-4), o3_min(-2), o3_min(-1), tf.O1)
    assert cat["S3.4"].stages == (
        o3_min(-4), o3_min(-2), o3_min(-1), o3_max(4), o3_max(2), o3_max(1)
    )
    assert cat["S4.1"].stages == (o3_min(-4), o3_max(4), tf.O1)
    assert cat["S4.2"].stages == (
        o3_min(-4), o3_max(4), o3_min(-2), o3_max(2), o3_min(-1), o3_max(1)
    )
    assert all(cat[sid].id == sid for sid in cat)


def _with_values(values):
    """A 4-student instance whose off-diagonal entries use exactly values."""
    m = 4
    p = [[0] * m for _ in range(m)]
    cells = [(a, b) for a in range(m) for b in range(m) if a != b]
    for (a, b), v in zip(cells, values):
        p[a][b] = v
    return make_instance(m, 2, 2, 2, p=p)


def test_adaptation_drops_absent_values():
    inst = _with_values([-4, 1, 1, 1])  # -2 and -1 never occur
    adapted = tf.adapt_to_instance(tf.catalog()["S1.2"], inst)
    assert adapted.stages == (o3_min(-4),)
    assert adapted.id == "S1.2"

    # values judged by occurrence, not by the scale bound d
    inst2 = _with_values([-4, -2, -1, 1])
    kept = tf.adapt_to_instance(tf.catalog()["S1.2"], inst2)
    assert kept.stages == (o3_min(-4), o3_min(-2), o3_min(-1))


def test_adaptation_keeps_non_o3_stages():
    inst = _with_values([1, 1, 1, 1])
    adapted = tf.adapt_to_instance(tf.catalog()["S3.1"], inst)
    assert adapted is tf.catalog()["S3.1"] or adapted.stages == (tf.O2, tf.O1)

    s32 = tf.adapt_to_instance(tf.catalog()["S3.2"], inst)
    assert s32.stages == (tf.O2, o3_max(1))


def test_adaptation_returns_same_object_when_unchanged():
    inst = _with_values([-4, -2, -1, 1])
    strat = tf.catalog()["S1.2"]
    assert tf.adapt_to_instance(strat, inst) is strat


def test_adaptation_can_empty_a_strategy():
    inst = _with_values([1, 1, 1, 1])
    with pytest.raises(tf.EmptyAfterAdaptation):
        tf.adapt_to_instance(tf.catalog()["S1.2"], inst)


def test_adaptation_zero_tracking():
    """A stage tracking value 0 survives only when some off-diagonal cell is 0."""
    m = 3
    p = [[0 if a == b else 1 for b in range(m)] for a in range(m)]
    inst = make_instance(3, 1, 3, 3, p=p)
    with pytest.raises(tf.EmptyAfterAdaptation):
        tf.adapt_to_instance(tf.Strategy((o3_max(0),)), inst)
    inst2 = _with_values([1, 1, 1, 1])  # other cells are 0
    assert tf.adapt_to_instance(
        tf.Strategy((o3_max(0),)), inst2
    ).stages == (o3_max(0),)
