"""Problem data and feasibility checks for student team formation.

Students and skills are dense 0-based integers internally; external names are
mapped at the I/O boundary. Every type in this module is immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "InstanceError",
    "SizeBoundsInfeasible",
    "CoverageOutOfRange",
    "PreferenceOutOfRange",
    "NonZeroDiagonal",
    "SkillNotDeclared",
    "StructuralMismatch",
    "Instance",
    "validate_instance",
    "Assignment",
    "realized_pairs",
    "team_coverage",
    "TeamViolation",
    "FeasibilityReport",
    "is_feasible",
]


class InstanceError(ValueError):
    """A problem instance violates one of its construction invariants."""


class SizeBoundsInfeasible(InstanceError):
    """No partition into n teams can satisfy the team size window."""


class CoverageOutOfRange(InstanceError):
    """Required coverage c is negative or exceeds the number of skills."""


class PreferenceOutOfRange(InstanceError):
    """A preference entry lies outside [-d, d]."""


class NonZeroDiagonal(InstanceError):
    """A student has a nonzero preference toward itself."""


class SkillNotDeclared(InstanceError):
    """A student's skill set mentions a skill missing from the skill universe."""


class StructuralMismatch(ValueError):
    """Teams do not partition the expected student index range."""


@dataclass(frozen=True)
class Instance:
    """One team formation problem.

    m students (indices 0..m-1) must be split into exactly n teams. Every
    team needs between k_min and k_max members and must jointly cover at
    least c distinct skills. p is the full m x m integer preference matrix
    with zero diagonal and entries bounded by d in absolute value; p[a][b]
    is how much student a wants to work with student b and is not assumed
    to be symmetric.
    """

    m: int
    n: int
    k_min: int
    k_max: int
    skills: frozenset[int]
    skill_sets: tuple[frozenset[int], ...]
    c: int
    d: int
    p: tuple[tuple[int, ...], ...]
    # Derived, filled in post-init: one bit per skill for fast coverage math.
    skill_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _values: frozenset[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "skills", frozenset(self.skills))
        object.__setattr__(
            self, "skill_sets", tuple(frozenset(s) for s in self.skill_sets)
        )
        object.__setattr__(self, "p", tuple(tuple(row) for row in self.p))
        self._check()
        bit_of = {s: i for i, s in enumerate(sorted(self.skills))}
        masks = []
        for owned in self.skill_sets:
            mask = 0
            for s in owned:
                mask |= 1 << bit_of[s]
            masks.append(mask)
        object.__setattr__(self, "skill_masks", tuple(masks))
        seen = frozenset(
            v for a, row in enumerate(self.p) for b, v in enumerate(row) if a != b
        )
        object.__setattr__(self, "_values", seen)

    def _check(self) -> None:
        for name in ("m", "n", "k_min", "k_max", "d"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InstanceError(f"{name} must be a positive integer, got {v!r}")
        if self.k_min > self.k_max:
            raise SizeBoundsInfeasible(
                f"k_min={self.k_min} exceeds k_max={self.k_max}"
            )
        if not (self.n * self.k_min <= self.m <= self.n * self.k_max):
            raise SizeBoundsInfeasible(
                f"m/n={self.m}/{self.n} lies outside [{self.k_min}, {self.k_max}]"
            )
        for s in self.skills:
            if not isinstance(s, int) or s < 0:
                raise InstanceError(f"skill ids must be non-negative integers, got {s!r}")
        if (
            isinstance(self.c, bool)
            or not isinstance(self.c, int)
            or not 0 <= self.c <= len(self.skills)
        ):
            raise CoverageOutOfRange(
                f"c={self.c} not in [0, {len(self.skills)}]"
            )
        if len(self.skill_sets) != self.m:
            raise InstanceError(
                f"expected {self.m} skill sets, got {len(self.skill_sets)}"
            )
        for a, owned in enumerate(self.skill_sets):
            for s in owned:
                if s not in self.skills:
                    raise SkillNotDeclared(f"student {a} lists undeclared skill {s!r}")
        if len(self.p) != self.m:
            raise InstanceError(f"preference matrix must have {self.m} rows")
        for a, row in enumerate(self.p):
            if len(row) != self.m:
                raise InstanceError(f"preference row {a} must have {self.m} entries")
            for b, v in enumerate(row):
                if isinstance(v, bool) or not isinstance(v, int):
                    raise InstanceError(f"p[{a}][{b}]={v!r} is not an integer")
                if a == b and v != 0:
                    raise NonZeroDiagonal(f"p[{a}][{a}]={v} must be 0")
                if abs(v) > self.d:
                    raise PreferenceOutOfRange(
                        f"p[{a}][{b}]={v} outside [-{self.d}, {self.d}]"
                    )

    @property
    def max_pref(self) -> int:
        """Largest off-diagonal preference entry (0 for a one-student instance)."""
        return max(self._values) if self._values else 0

    def values_present(self) -> frozenset[int]:
        """Distinct off-diagonal preference values occurring in p."""
        return self._values


def validate_instance(
    m: int,
    n: int,
    k_min: int,
    k_max: int,
    skills: Iterable[int],
    skill_sets: Sequence[Iterable[int]],
    c: int,
    d: int,
    preferences: Sequence[Sequence[int]],
) -> Instance:
    """Build an Instance from raw parts, raising on the first violated invariant."""
    return Instance(
        m=m,
        n=n,
        k_min=k_min,
        k_max=k_max,
        skills=frozenset(skills),
        skill_sets=tuple(frozenset(s) for s in skill_sets),
        c=c,
        d=d,
        p=tuple(tuple(row) for row in preferences),
    )


@dataclass(frozen=True)
class Assignment:
    """A partition of students into teams.

    Teams are stored canonically: members sorted ascending, teams ordered by
    their smallest member. Two assignments therefore compare equal exactly
    when they induce the same partition, regardless of team labels.
    """

    teams: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        raw = [tuple(sorted(t)) for t in self.teams]
        if any(not t for t in raw):
            raise StructuralMismatch("empty team")
        members: list[int] = []
        for t in raw:
            members.extend(t)
        if len(members) != len(set(members)):
            raise StructuralMismatch("teams overlap")
        if set(members) != set(range(len(members))):
            raise StructuralMismatch(
                "team members must be exactly the indices 0..m-1"
            )
        raw.sort(key=lambda t: t[0])
        object.__setattr__(self, "teams", tuple(raw))

    @property
    def m(self) -> int:
        return sum(len(t) for t in self.teams)

    @property
    def n(self) -> int:
        return len(self.teams)


def realized_pairs(asg: Assignment) -> frozenset[tuple[int, int]]:
    """Ordered pairs (a, b), a != b, whose members share a team."""
    pairs = []
    for team in asg.teams:
        for a, b in itertools.permutations(team, 2):
            pairs.append((a, b))
    return frozenset(pairs)


def team_coverage(inst: Instance, team: Iterable[int]) -> int:
    """Number of distinct skills collectively held by the given students."""
    covered: set[int] = set()
    for a in team:
        covered |= inst.skill_sets[a]
    return len(covered)


@dataclass(frozen=True)
class TeamViolation:
    team: int
    constraint: str  # "team-size" | "team-skill"
    detail: str


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple[TeamViolation, ...]

    def __bool__(self) -> bool:
        return self.ok


def is_feasible(inst: Instance, asg: Assignment) -> FeasibilityReport:
    """Check every team against the size window and the skill coverage floor.

    Raises StructuralMismatch when asg does not partition exactly the
    students 0..m-1 into n teams; constraint violations are reported, not
    raised, so callers can show all of them at once.
    """
    if asg.m != inst.m or asg.n != inst.n:
        raise StructuralMismatch(
            f"assignment partitions {asg.m} students into {asg.n} teams, "
            f"instance expects {inst.m} into {inst.n}"
        )
    violations = []
    for idx, team in enumerate(asg.teams):
        size = len(team)
        if not inst.k_min <= size <= inst.k_max:
            violations.append(
                TeamViolation(
                    idx,
                    "team-size",
                    f"size {size} outside [{inst.k_min}, {inst.k_max}]",
                )
            )
        covered = team_coverage(inst, team)
        if covered < inst.c:
            violations.append(
                TeamViolation(
                    idx,
                    "team-skill",
                    f"covers {covered} of the required {inst.c} skills",
                )
            )
    return FeasibilityReport(not violations, tuple(violations))
