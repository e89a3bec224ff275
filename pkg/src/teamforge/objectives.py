"""Objective evaluators over assignments, plus admissible bounds for search.

Three objective families are supported. O1 maximizes the sum of realized
preferences over all ordered teammate pairs. O2 maximizes the smallest
realized preference; an assignment realizing no pair at all (all teams are
singletons) scores max(p) + 1 so that it dominates every other value. O3
counts realized ordered pairs carrying one fixed preference value p0 and is
used in both directions, maximizing desirable values and minimizing
undesirable ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .model import Assignment, Instance

__all__ = [
    "Objective",
    "O1",
    "O2",
    "o3_max",
    "o3_min",
    "render_objective",
    "eval_o1",
    "eval_o2",
    "eval_o3",
    "evaluate",
    "PartialAssignment",
    "optimistic_bound",
]

_KINDS = ("O1", "O2", "O3")
_DIRECTIONS = ("max", "min")


@dataclass(frozen=True)
class Objective:
    """One stage objective: a kind, an optimization direction, and for O3 the
    tracked preference value p0."""

    kind: str
    direction: str
    p0: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.kind == "O3":
            if not isinstance(self.p0, int):
                raise ValueError("O3 requires an integer target value p0")
        else:
            if self.p0 is not None:
                raise ValueError(f"{self.kind} does not take a target value")
            if self.direction != "max":
                raise ValueError(f"{self.kind} is only used in direction 'max'")

    @property
    def maximize(self) -> bool:
        return self.direction == "max"


O1 = Objective("O1", "max")
O2 = Objective("O2", "max")


def o3_max(p0: int) -> Objective:
    """Maximize the number of realized ordered pairs with preference p0."""
    return Objective("O3", "max", p0)


def o3_min(p0: int) -> Objective:
    """Minimize the number of realized ordered pairs with preference p0."""
    return Objective("O3", "min", p0)


def render_objective(obj: Objective) -> str:
    if obj.kind == "O3":
        sign = "+" if obj.maximize else "-"
        return f"O3{sign}({obj.p0})"
    return obj.kind


def eval_o1(inst: Instance, asg: Assignment) -> int:
    """Sum of p[a][b] over all realized ordered pairs (a, b)."""
    total = 0
    p = inst.p
    for team in asg.teams:
        for a, b in itertools.combinations(team, 2):
            total += p[a][b] + p[b][a]
    return total


def eval_o2(inst: Instance, asg: Assignment) -> int:
    """Minimum realized preference, or max(p) + 1 when no pair is realized."""
    worst: int | None = None
    p = inst.p
    for team in asg.teams:
        for a, b in itertools.combinations(team, 2):
            lo = min(p[a][b], p[b][a])
            if worst is None or lo < worst:
                worst = lo
    if worst is None:
        return inst.max_pref + 1
    return worst


def eval_o3(inst: Instance, asg: Assignment, p0: int) -> int:
    """Number of realized ordered pairs (a, b) with p[a][b] == p0."""
    count = 0
    p = inst.p
    for team in asg.teams:
        for a, b in itertools.combinations(team, 2):
            if p[a][b] == p0:
                count += 1
            if p[b][a] == p0:
                count += 1
    return count


def evaluate(obj: Objective, inst: Instance, asg: Assignment) -> int:
    if obj.kind == "O1":
        return eval_o1(inst, asg)
    if obj.kind == "O2":
        return eval_o2(inst, asg)
    assert obj.p0 is not None
    return eval_o3(inst, asg, obj.p0)


@dataclass(frozen=True)
class PartialAssignment:
    """A partially built assignment: team_of[a] is a team index or -1.

    Used by optimistic_bound; the solver keeps its own incremental mirror of
    this state but must agree with the bounds computed here.
    """

    instance: Instance
    team_of: tuple[int, ...]

    def __post_init__(self) -> None:
        inst = self.instance
        object.__setattr__(self, "team_of", tuple(self.team_of))
        if len(self.team_of) != inst.m:
            raise ValueError(f"team_of must have {inst.m} entries")
        for a, t in enumerate(self.team_of):
            if not isinstance(t, int) or not -1 <= t < inst.n:
                raise ValueError(f"team_of[{a}]={t!r} is not a team index or -1")
        for j, size in enumerate(self.team_sizes()):
            if size > inst.k_max:
                raise ValueError(
                    f"team {j} holds {size} students, k_max is {inst.k_max}"
                )

    def team_sizes(self) -> list[int]:
        sizes = [0] * self.instance.n
        for t in self.team_of:
            if t >= 0:
                sizes[t] += 1
        return sizes


def _pair_status(partial: PartialAssignment, sizes: Sequence[int], a: int, b: int) -> str:
    """Classify the unordered pair {a, b} as realized, separated, or open.

    A pair is separated once the two students sit in different teams, or once
    one of them is unassigned while the other's team is already full.
    """
    k_max = partial.instance.k_max
    ta, tb = partial.team_of[a], partial.team_of[b]
    if ta >= 0 and tb >= 0:
        return "realized" if ta == tb else "separated"
    if ta < 0 and tb < 0:
        return "open"
    t = ta if ta >= 0 else tb
    return "open" if sizes[t] < k_max else "separated"


def optimistic_bound(obj: Objective, inst: Instance, partial: PartialAssignment) -> int:
    """Admissible bound on obj over every completion of the partial state.

    For maximized objectives the bound is an upper bound, for minimized ones
    a lower bound. On a fully assigned state the bound equals the exact
    objective value.
    """
    if partial.instance is not inst and partial.instance != inst:
        raise ValueError("partial state belongs to a different instance")
    sizes = partial.team_sizes()
    p = inst.p
    m = inst.m

    if obj.kind == "O1":
        total = 0
        for a in range(m):
            for b in range(a + 1, m):
                status = _pair_status(partial, sizes, a, b)
                if status == "realized":
                    total += p[a][b] + p[b][a]
                elif status == "open":
                    if p[a][b] > 0:
                        total += p[a][b]
                    if p[b][a] > 0:
                        total += p[b][a]
        return total

    if obj.kind == "O2":
        worst: int | None = None
        for a in range(m):
            for b in range(a + 1, m):
                if _pair_status(partial, sizes, a, b) == "realized":
                    lo = min(p[a][b], p[b][a])
                    if worst is None or lo < worst:
                        worst = lo
        return inst.max_pref + 1 if worst is None else worst

    assert obj.p0 is not None
    p0 = obj.p0
    realized = 0
    open_pairs = 0
    for a in range(m):
        for b in range(a + 1, m):
            status = _pair_status(partial, sizes, a, b)
            if status == "separated":
                continue
            hits = (1 if p[a][b] == p0 else 0) + (1 if p[b][a] == p0 else 0)
            if status == "realized":
                realized += hits
            else:
                open_pairs += hits
    if obj.maximize:
        return realized + open_pairs
    return realized
