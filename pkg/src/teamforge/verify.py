"""Ground truth and test material: brute-force oracle, a hardness reduction,
seeded instance generation, and a random feasible baseline.

Everything here favors obviousness over speed. The oracle enumerates every
feasible assignment outright, so it only runs on small instances, but its
answers are trustworthy enough to pin down the optimized solver's behavior
in tests. The generator reproduces the shape of a small corpus of course
datasets from published size, skill, and preference-histogram summaries so
benchmarks have realistic inputs without shipping any student data.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Mapping, Sequence

from .model import Assignment, Instance, is_feasible, team_coverage, validate_instance
from .objectives import Objective, eval_o2
from .solver import SolveConfig, SolveOutcome, StageResult, solve_feasibility
from .strategy import Strategy

__all__ = [
    "AssumptionViolated",
    "InstanceTooLarge",
    "HistogramOverflow",
    "GenerationError",
    "SetCoverInstance",
    "set_cover_brute",
    "reduce_set_cover",
    "extract_cover",
    "ORACLE_STUDENT_LIMIT",
    "enumerate_assignments",
    "assignment_profile",
    "oracle_solve",
    "GeneratorPreset",
    "PRESETS",
    "generate",
    "random_feasible",
]


class AssumptionViolated(ValueError):
    """Input falls outside what a reduction is defined for."""


class InstanceTooLarge(ValueError):
    """The brute-force oracle refuses instances it cannot enumerate."""


class HistogramOverflow(ValueError):
    """A preference histogram asks for more entries than the matrix has."""


class GenerationError(RuntimeError):
    """No feasible instance came out within the attempt budget."""


# ---------------------------------------------------------------------------
# Hardness reduction: covering a universe with at most k subsets maps to a
# pure feasibility question about team formation.


@dataclass(frozen=True)
class SetCoverInstance:
    """Does some choice of at most k subsets cover the universe?

    Requires at least two subsets, 2 <= k <= number of subsets, and subsets
    drawn from a non-empty universe; outside that range the reduction's
    team-count arithmetic is not defined.
    """

    universe: frozenset[int]
    subsets: tuple[frozenset[int], ...]
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(
            self, "subsets", tuple(frozenset(s) for s in self.subsets)
        )
        if not self.universe:
            raise AssumptionViolated("universe must be non-empty")
        if len(self.subsets) < 2:
            raise AssumptionViolated("need at least two subsets")
        if not 2 <= self.k <= len(self.subsets):
            raise AssumptionViolated(
                f"k={self.k} not in [2, {len(self.subsets)}]"
            )
        for i, s in enumerate(self.subsets):
            if not s <= self.universe:
                raise AssumptionViolated(f"subset {i} leaves the universe")


def set_cover_brute(sc: SetCoverInstance) -> tuple[int, ...] | None:
    """Smallest-first exhaustive search; None when no cover of size <= k exists."""
    indices = range(len(sc.subsets))
    for size in range(1, sc.k + 1):
        for combo in itertools.combinations(indices, size):
            united: set[int] = set()
            for i in combo:
                united |= sc.subsets[i]
            if united >= sc.universe:
                return combo
    return None


def reduce_set_cover(sc: SetCoverInstance) -> Instance:
    """Build a team-formation instance feasible exactly when a cover of at
    most k subsets exists.

    Each subset becomes a student owning those skills; n - 1 extra students
    own every skill. With full coverage demanded of every one of the
    n = ceil((s - 1) / (k - 1)) teams and team sizes in [1, k], some team
    must consist purely of subset-students, and its members form a cover.
    """
    base = len(sc.subsets)
    n = math.ceil((base - 1) / (sc.k - 1))
    m = base + n - 1
    skill_sets = list(sc.subsets) + [sc.universe] * (n - 1)
    zeros = [[0] * m for _ in range(m)]
    return validate_instance(
        m=m,
        n=n,
        k_min=1,
        k_max=sc.k,
        skills=sc.universe,
        skill_sets=skill_sets,
        c=len(sc.universe),
        d=1,
        preferences=zeros,
    )


def extract_cover(sc: SetCoverInstance, asg: Assignment) -> tuple[int, ...]:
    """Read a cover back out of a feasible assignment of reduce_set_cover(sc).

    There are fewer all-skill students than teams, so some team has none;
    full coverage makes that team's members a cover of size <= k.
    """
    base = len(sc.subsets)
    for team in asg.teams:
        if all(s < base for s in team):
            return team
    raise AssumptionViolated("assignment does not come from this reduction")


# ---------------------------------------------------------------------------
# Brute-force oracle.


ORACLE_STUDENT_LIMIT = 10


def _partitions(
    m: int, n: int, k_min: int, k_max: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of range(m) into n blocks with sizes in [k_min, k_max],
    each emitted exactly once (blocks ordered by their first member)."""
    blocks: list[list[int]] = [[] for _ in range(n)]
    sizes = [0] * n

    def rec(s: int, opened: int, deficit: int, capacity: int):
        if s == m:
            yield tuple(tuple(b) for b in blocks)
            return
        remaining = m - s - 1
        for j in range(min(opened + 1, n)):
            size = sizes[j]
            if size >= k_max:
                continue
            ndef = deficit - 1 if size < k_min else deficit
            if ndef > remaining or remaining > capacity - 1:
                continue
            blocks[j].append(s)
            sizes[j] = size + 1
            yield from rec(
                s + 1, opened + 1 if j == opened else opened, ndef, capacity - 1
            )
            blocks[j].pop()
            sizes[j] = size

    yield from rec(0, 0, n * k_min, n * k_max)


def enumerate_assignments(
    inst: Instance, limit: int = ORACLE_STUDENT_LIMIT
) -> list[Assignment]:
    """Every feasible assignment of the instance; guarded by a student cap
    because the count grows superexponentially."""
    if inst.m > limit:
        raise InstanceTooLarge(
            f"m={inst.m} exceeds the enumeration cap of {limit}"
        )
    out = []
    for blocks in _partitions(inst.m, inst.n, inst.k_min, inst.k_max):
        if all(team_coverage(inst, team) >= inst.c for team in blocks):
            out.append(Assignment(blocks))
    return out


def assignment_profile(
    inst: Instance, asg: Assignment
) -> tuple[int, int, dict[int, int]]:
    """(preference sum, minimum realized preference, per-value realized
    counts) of one assignment; every stage objective reads off this."""
    p = inst.p
    total = 0
    counts: dict[int, int] = {}
    minimum: int | None = None
    for team in asg.teams:
        for a, b in itertools.combinations(team, 2):
            vab, vba = p[a][b], p[b][a]
            total += vab + vba
            counts[vab] = counts.get(vab, 0) + 1
            counts[vba] = counts.get(vba, 0) + 1
            low = vab if vab < vba else vba
            if minimum is None or low < minimum:
                minimum = low
    if minimum is None:
        minimum = inst.max_pref + 1
    return total, minimum, counts


def oracle_solve(
    inst: Instance,
    strat: Strategy,
    *,
    assignments: Sequence[Assignment] | None = None,
    profiles: Sequence[tuple[int, int, dict[int, int]]] | None = None,
    limit: int = ORACLE_STUDENT_LIMIT,
) -> SolveOutcome:
    """Exact lexicographic optimum by scoring every feasible assignment.

    Pass precomputed assignments (and optionally their profiles) to reuse
    one enumeration across many strategies on the same instance.
    """
    t0 = time.monotonic()
    if assignments is None:
        assignments = enumerate_assignments(inst, limit)
    if profiles is None:
        profiles = [assignment_profile(inst, a) for a in assignments]
    if not assignments:
        stages = (StageResult(strat.stages[0], None, "unknown"),)
        return SolveOutcome(
            status="infeasible",
            assignment=None,
            stages=stages,
            quality_trace=(),
            strategy=strat,
            nodes=0,
            wall_time=time.monotonic() - t0,
        )

    def stage_score(profile, obj: Objective) -> int:
        o1, o2, counts = profile
        if obj.kind == "O1":
            return o1
        if obj.kind == "O2":
            return o2
        hits = counts.get(obj.p0, 0)
        return hits if obj.maximize else -hits

    objs = strat.stages
    best_i = max(
        range(len(assignments)),
        key=lambda i: tuple(stage_score(profiles[i], o) for o in objs),
    )
    best = assignments[best_i]
    best_profile = profiles[best_i]
    stages = []
    for obj in objs:
        score = stage_score(best_profile, obj)
        value = -score if (obj.kind == "O3" and not obj.maximize) else score
        stages.append(StageResult(obj, value, "optimal"))
    return SolveOutcome(
        status="optimal",
        assignment=best,
        stages=tuple(stages),
        quality_trace=(),
        strategy=strat,
        nodes=len(assignments),
        wall_time=time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# Seeded generation from published dataset summaries.


@dataclass(frozen=True)
class GeneratorPreset:
    """Shape of one course dataset: sizes, skill pool, coverage demand, and
    the histogram of non-zero preference values (unlisted cells are 0).
    profiles records whether the original collected self-description
    attributes in addition to explicit votes; generation itself draws the
    final merged matrix either way."""

    name: str
    m: int
    n: int
    k_min: int
    k_max: int
    n_skills: int
    c: int
    d: int
    profiles: bool
    histogram: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        cells = self.m * (self.m - 1)
        total = sum(count for _, count in self.histogram)
        if total > cells:
            raise HistogramOverflow(
                f"{self.name}: histogram places {total} entries in {cells} cells"
            )
        for value, count in self.histogram:
            if abs(value) > self.d:
                raise HistogramOverflow(
                    f"{self.name}: value {value} outside [-{self.d}, {self.d}]"
                )
            if value == 0 or count < 0:
                raise HistogramOverflow(
                    f"{self.name}: histogram rows must pair non-zero values "
                    f"with non-negative counts"
                )

    def histogram_dict(self) -> dict[int, int]:
        return dict(self.histogram)


def _load_presets() -> dict[str, GeneratorPreset]:
    raw = (
        resources.files("teamforge").joinpath("data/presets.json").read_text("utf-8")
    )
    presets = {}
    for row in json.loads(raw)["presets"]:
        hist = tuple(
            sorted(
                ((int(v), int(c)) for v, c in row["histogram"].items()),
                key=lambda vc: -vc[0],
            )
        )
        preset = GeneratorPreset(
            name=row["name"],
            m=row["m"],
            n=row["n"],
            k_min=row["k_min"],
            k_max=row["k_max"],
            n_skills=row["n_skills"],
            c=row["c"],
            d=row["d"],
            profiles=row["profiles"],
            histogram=hist,
        )
        presets[preset.name] = preset
    return presets


PRESETS: dict[str, GeneratorPreset] = _load_presets()


def _draw_instance(preset: GeneratorPreset, rng: random.Random) -> Instance:
    m = preset.m
    skills = range(preset.n_skills)
    skill_sets = []
    for _ in range(m):
        owned = {s for s in skills if rng.random() < 0.5}
        if not owned:
            # A skill-less student adds nothing to any team's coverage and
            # mostly produces throwaway infeasible draws.
            owned = {rng.randrange(preset.n_skills)}
        skill_sets.append(owned)

    cells = [(a, b) for a in range(m) for b in range(m) if a != b]
    rng.shuffle(cells)
    p = [[0] * m for _ in range(m)]
    pos = 0
    for value, count in preset.histogram:
        for a, b in cells[pos:pos + count]:
            p[a][b] = value
        pos += count
    return validate_instance(
        m=m,
        n=preset.n,
        k_min=preset.k_min,
        k_max=preset.k_max,
        skills=skills,
        skill_sets=skill_sets,
        c=preset.c,
        d=preset.d,
        preferences=p,
    )


def generate(
    preset: GeneratorPreset,
    seed: int,
    *,
    ensure_feasible: bool = False,
    max_attempts: int = 20,
) -> Instance:
    """Draw an instance matching the preset's published shape.

    Skill sets are independent coin flips per skill (topped up to one skill
    so no student is pure dead weight); the preference histogram lands on a
    seeded shuffle of the off-diagonal cells. With ensure_feasible the draw
    repeats, reseeded per attempt, until a quick search run finds a feasible
    assignment, so results stay reproducible for a given (preset, seed).
    """
    attempts = max_attempts if ensure_feasible else 1
    for attempt in range(attempts):
        rng = random.Random(f"{preset.name}:{seed}:{attempt}")
        inst = _draw_instance(preset, rng)
        if not ensure_feasible:
            return inst
        probe = solve_feasibility(inst, SolveConfig(time_limit=2.0))
        if probe.status == "optimal":
            return inst
    raise GenerationError(
        f"{preset.name}: no feasible draw in {attempts} attempts for seed {seed}"
    )


def random_feasible(
    inst: Instance, seed: int, max_attempts: int = 200
) -> Assignment | None:
    """Preference-blind feasible baseline, deterministic in (inst, seed).

    First tries rejection sampling: shuffle students into random legal team
    sizes and keep the first draw that also meets skill coverage. On tightly
    coverage-constrained instances such a draw is vanishingly rare, so when
    every attempt fails a randomized backtracking search takes over: random
    student and team orders fed through the constraint propagation that the
    solver's feasibility probes use, never looking at preferences. Returns
    None only when no feasible assignment was found at all.
    """
    rng = random.Random(f"baseline:{seed}")
    for _ in range(max_attempts):
        sizes = [inst.k_min] * inst.n
        spare = inst.m - inst.n * inst.k_min
        for _ in range(spare):
            open_teams = [j for j in range(inst.n) if sizes[j] < inst.k_max]
            sizes[open_teams[rng.randrange(len(open_teams))]] += 1
        students = list(range(inst.m))
        rng.shuffle(students)
        teams = []
        at = 0
        for size in sizes:
            teams.append(students[at:at + size])
            at += size
        asg = Assignment(teams)
        if is_feasible(inst, asg):
            return asg

    from .solver import _FEAS, _SolveContext, _StageSearch

    for _ in range(20):
        order = list(range(inst.m))
        rng.shuffle(order)
        prio = list(range(inst.n))
        rng.shuffle(prio)
        ctx = _SolveContext(time.monotonic())
        search = _StageSearch(
            inst, ctx, tuple(order), tuple(prio),
            mode=_FEAS,
            vi=0,
            priors=(),
            forbid=[0] * inst.m,
            node_limit=200_000,  # node-counted, so the result is wall-clock free
            wall_deadline=float("inf"),
        )
        search.run()
        if search.found is not None:
            return Assignment(search.found)
    return None
