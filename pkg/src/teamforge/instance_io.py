"""Instance and solution documents: canonical JSON on disk.

Instances carry external student ids and skill names so files stay readable
next to a course roster; the in-memory model works purely in indices. A
document's fingerprint is a sha256 over its semantic content only, so a
sparse and a dense spelling of the same matrix fingerprint identically, and
solution files name the instance they answer by that fingerprint instead of
by path.

Solution files record search work in node counts, never wall-clock readings,
which keeps repeated runs of the same configuration byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .model import Assignment, Instance, validate_instance
from .objectives import Objective, render_objective
from .solver import SolveConfig, SolveOutcome
from .strategy import Strategy, parse_strategy, render

__all__ = [
    "SchemaError",
    "INSTANCE_SCHEMA",
    "SOLUTION_SCHEMA",
    "InstanceDocument",
    "document_from_instance",
    "instance_to_json_dict",
    "instance_from_json_dict",
    "save_instance",
    "load_instance",
    "instance_fingerprint",
    "SolutionStage",
    "SolutionDocument",
    "build_solution_document",
    "solution_to_json_dict",
    "solution_from_json_dict",
    "save_solution",
    "load_solution",
    "to_canonical_json",
]

INSTANCE_SCHEMA = "teamforge-instance/1"
SOLUTION_SCHEMA = "teamforge-solution/1"


class SchemaError(ValueError):
    """A document does not have the shape its schema tag promises."""


def to_canonical_json(payload: Mapping[str, Any]) -> str:
    """One spelling per document: sorted keys, two-space indent, newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _default_student_ids(m: int) -> tuple[str, ...]:
    width = len(str(m - 1)) if m > 1 else 1
    return tuple(f"s{i:0{width}d}" for i in range(m))


@dataclass(frozen=True)
class InstanceDocument:
    """An instance plus its external naming.

    student_ids[i] names student i; skill_names[j] names the j-th skill in
    sorted id order. Loading always yields contiguous skill ids 0..S-1, so
    an instance built with gaps in its skill ids round-trips to a relabeled
    twin; coverage and every objective are blind to skill labels, so the
    twin behaves identically.
    """

    instance: Instance
    name: str = ""
    student_ids: tuple[str, ...] = ()
    skill_names: tuple[str, ...] = ()
    preference_format: str = "dense"

    def __post_init__(self) -> None:
        inst = self.instance
        ids = tuple(self.student_ids) or _default_student_ids(inst.m)
        names = tuple(self.skill_names) or tuple(
            f"skill{i}" for i in range(len(inst.skills))
        )
        object.__setattr__(self, "student_ids", ids)
        object.__setattr__(self, "skill_names", names)
        if len(ids) != inst.m:
            raise SchemaError(f"expected {inst.m} student ids, got {len(ids)}")
        if len(set(ids)) != len(ids):
            raise SchemaError("student ids must be unique")
        if len(names) != len(inst.skills):
            raise SchemaError(
                f"expected {len(inst.skills)} skill names, got {len(names)}"
            )
        if len(set(names)) != len(names):
            raise SchemaError("skill names must be unique")
        if self.preference_format not in ("dense", "sparse"):
            raise SchemaError(
                f"unknown preference format {self.preference_format!r}"
            )

    def student_index(self, student_id: str) -> int:
        try:
            return self.student_ids.index(student_id)
        except ValueError:
            raise SchemaError(f"unknown student id {student_id!r}") from None


def document_from_instance(
    inst: Instance,
    name: str = "",
    student_ids: Sequence[str] | None = None,
    skill_names: Sequence[str] | None = None,
) -> InstanceDocument:
    return InstanceDocument(
        instance=inst,
        name=name,
        student_ids=tuple(student_ids or ()),
        skill_names=tuple(skill_names or ()),
    )


def _skill_name_sets(doc: InstanceDocument) -> list[list[str]]:
    """Per-student owned skills as sorted name lists."""
    by_id = dict(zip(sorted(doc.instance.skills), doc.skill_names))
    return [
        sorted(by_id[s] for s in owned) for owned in doc.instance.skill_sets
    ]


def instance_to_json_dict(doc: InstanceDocument) -> dict[str, Any]:
    inst = doc.instance
    owned_names = _skill_name_sets(doc)
    students = [
        {"id": sid, "skills": owned_names[i]}
        for i, sid in enumerate(doc.student_ids)
    ]
    if doc.preference_format == "dense":
        preferences: dict[str, Any] = {
            "format": "dense",
            "rows": [list(row) for row in inst.p],
        }
    else:
        entries = [
            [doc.student_ids[a], doc.student_ids[b], v]
            for a, row in enumerate(inst.p)
            for b, v in enumerate(row)
            if v != 0
        ]
        preferences = {"format": "sparse", "entries": entries}
    return {
        "schema": INSTANCE_SCHEMA,
        "name": doc.name,
        "teams": {"n": inst.n, "k_min": inst.k_min, "k_max": inst.k_max},
        "coverage": inst.c,
        "scale": inst.d,
        "skills": list(doc.skill_names),
        "students": students,
        "preferences": preferences,
    }


def _require(data: Mapping[str, Any], key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in data:
        raise SchemaError(f"missing field {key!r}")
    value = data[key]
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if int in kinds and bool not in kinds and isinstance(value, bool):
        raise SchemaError(f"field {key!r} must be an integer")
    if not isinstance(value, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise SchemaError(f"field {key!r} must be {names}")
    return value


def instance_from_json_dict(data: Mapping[str, Any]) -> InstanceDocument:
    if data.get("schema") != INSTANCE_SCHEMA:
        raise SchemaError(
            f"expected schema {INSTANCE_SCHEMA!r}, got {data.get('schema')!r}"
        )
    teams = _require(data, "teams", dict)
    skills = _require(data, "skills", list)
    students = _require(data, "students", list)
    if not students:
        raise SchemaError("at least one student is required")
    if len(set(skills)) != len(skills):
        raise SchemaError("skill names must be unique")
    name_to_id = {s: i for i, s in enumerate(skills)}

    ids: list[str] = []
    skill_sets: list[set[int]] = []
    for row in students:
        if not isinstance(row, dict):
            raise SchemaError("each student must be an object")
        sid = _require(row, "id", str)
        owned = _require(row, "skills", list)
        ids.append(sid)
        try:
            skill_sets.append({name_to_id[s] for s in owned})
        except KeyError as exc:
            raise SchemaError(
                f"student {sid!r} lists unknown skill {exc.args[0]!r}"
            ) from None
    if len(set(ids)) != len(ids):
        raise SchemaError("student ids must be unique")
    m = len(ids)
    index_of = {sid: i for i, sid in enumerate(ids)}

    prefs = _require(data, "preferences", dict)
    fmt = prefs.get("format")
    if fmt == "dense":
        rows = _require(prefs, "rows", list)
        if len(rows) != m or any(
            not isinstance(r, list) or len(r) != m for r in rows
        ):
            raise SchemaError(f"dense preferences must be a {m}x{m} matrix")
        p = [list(r) for r in rows]
    elif fmt == "sparse":
        entries = _require(prefs, "entries", list)
        p = [[0] * m for _ in range(m)]
        seen: set[tuple[int, int]] = set()
        for entry in entries:
            if not isinstance(entry, list) or len(entry) != 3:
                raise SchemaError("sparse entries are [from, to, value] triples")
            src, dst, value = entry
            if src not in index_of or dst not in index_of:
                raise SchemaError(f"sparse entry names unknown student: {entry}")
            a, b = index_of[src], index_of[dst]
            if (a, b) in seen:
                raise SchemaError(f"duplicate sparse entry for ({src}, {dst})")
            seen.add((a, b))
            p[a][b] = value
    else:
        raise SchemaError(f"unknown preference format {fmt!r}")

    inst = validate_instance(
        m=m,
        n=_require(teams, "n", int),
        k_min=_require(teams, "k_min", int),
        k_max=_require(teams, "k_max", int),
        skills=range(len(skills)),
        skill_sets=skill_sets,
        c=_require(data, "coverage", int),
        d=_require(data, "scale", int),
        preferences=p,
    )
    return InstanceDocument(
        instance=inst,
        name=str(data.get("name", "")),
        student_ids=tuple(ids),
        skill_names=tuple(skills),
        preference_format=fmt,
    )


def instance_fingerprint(doc: InstanceDocument) -> str:
    """sha256 of the semantic content: naming and constraints and the dense
    matrix, but not the on-disk spelling (format, cosmetic name)."""
    inst = doc.instance
    projection = {
        "teams": [inst.n, inst.k_min, inst.k_max],
        "coverage": inst.c,
        "scale": inst.d,
        "skills": list(doc.skill_names),
        "students": [
            [sid, owned]
            for sid, owned in zip(doc.student_ids, _skill_name_sets(doc))
        ],
        "preferences": [list(row) for row in inst.p],
    }
    blob = json.dumps(
        projection, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def save_instance(doc: InstanceDocument, path: str | Path) -> None:
    Path(path).write_text(to_canonical_json(instance_to_json_dict(doc)), "utf-8")


def load_instance(path: str | Path) -> InstanceDocument:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return instance_from_json_dict(data)


@dataclass(frozen=True)
class SolutionStage:
    objective: Objective
    value: int | None
    status: str
    nodes: int = 0
    best_at_node: int | None = None


@dataclass(frozen=True)
class SolutionDocument:
    instance_fingerprint: str
    requested: str
    adapted: Strategy
    config: SolveConfig
    status: str
    teams: tuple[tuple[str, ...], ...] | None
    stages: tuple[SolutionStage, ...]
    quality_trace: tuple[tuple[int, int], ...]


def build_solution_document(
    doc: InstanceDocument,
    requested: str,
    adapted: Strategy,
    cfg: SolveConfig,
    outcome: SolveOutcome,
) -> SolutionDocument:
    if outcome.assignment is None:
        teams = None
    else:
        ids = doc.student_ids
        teams = tuple(
            tuple(ids[s] for s in team) for team in outcome.assignment.teams
        )
    stages = tuple(
        SolutionStage(r.objective, r.value, r.status, r.nodes, r.best_at_node)
        for r in outcome.stages
    )
    trace = tuple((tp.nodes, tp.o1) for tp in outcome.quality_trace)
    return SolutionDocument(
        instance_fingerprint=instance_fingerprint(doc),
        requested=requested,
        adapted=adapted,
        config=cfg,
        status=outcome.status,
        teams=teams,
        stages=stages,
        quality_trace=trace,
    )


def solution_to_json_dict(sol: SolutionDocument) -> dict[str, Any]:
    cfg = sol.config
    return {
        "schema": SOLUTION_SCHEMA,
        "instance_fingerprint": sol.instance_fingerprint,
        "strategy": {"requested": sol.requested, "adapted": render(sol.adapted)},
        "config": {
            "time_limit_s": cfg.time_limit,
            "time_mode": cfg.time_mode,
            "seed": cfg.seed,
            "node_rate": cfg.node_rate,
            "symmetry_breaking": cfg.symmetry_breaking,
        },
        "status": sol.status,
        "teams": [list(t) for t in sol.teams] if sol.teams is not None else None,
        "stages": [
            {
                "objective": render_objective(st.objective),
                "value": st.value,
                "status": st.status,
                "nodes": st.nodes,
                "best_at_node": st.best_at_node,
            }
            for st in sol.stages
        ],
        "quality_trace": [[nodes, o1] for nodes, o1 in sol.quality_trace],
    }


def _parse_single_objective(text: str) -> Objective:
    strat = parse_strategy(text)
    if len(strat.stages) != 1:
        raise SchemaError(f"expected a single objective, got {text!r}")
    return strat.stages[0]


def solution_from_json_dict(data: Mapping[str, Any]) -> SolutionDocument:
    if data.get("schema") != SOLUTION_SCHEMA:
        raise SchemaError(
            f"expected schema {SOLUTION_SCHEMA!r}, got {data.get('schema')!r}"
        )
    strategy = _require(data, "strategy", dict)
    config = _require(data, "config", dict)
    cfg = SolveConfig(
        time_limit=float(_require(config, "time_limit_s", (int, float))),
        time_mode=_require(config, "time_mode", str),
        seed=_require(config, "seed", int),
        node_rate=_require(config, "node_rate", int),
        symmetry_breaking=_require(config, "symmetry_breaking", bool),
    )
    raw_teams = data.get("teams")
    if raw_teams is None:
        teams = None
    elif isinstance(raw_teams, list):
        teams = tuple(tuple(map(str, t)) for t in raw_teams)
    else:
        raise SchemaError("teams must be null or a list of lists")
    stages = []
    for row in _require(data, "stages", list):
        if not isinstance(row, dict):
            raise SchemaError("each stage must be an object")
        value = row.get("value")
        if value is not None and not isinstance(value, int):
            raise SchemaError("stage value must be an integer or null")
        stages.append(
            SolutionStage(
                objective=_parse_single_objective(_require(row, "objective", str)),
                value=value,
                status=_require(row, "status", str),
                nodes=int(row.get("nodes", 0)),
                best_at_node=row.get("best_at_node"),
            )
        )
    trace = []
    for pair in _require(data, "quality_trace", list):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError("quality_trace entries are [nodes, sum] pairs")
        trace.append((int(pair[0]), int(pair[1])))
    return SolutionDocument(
        instance_fingerprint=_require(data, "instance_fingerprint", str),
        requested=_require(strategy, "requested", str),
        adapted=parse_strategy(_require(strategy, "adapted", str)),
        config=cfg,
        status=_require(data, "status", str),
        teams=teams,
        stages=tuple(stages),
        quality_trace=tuple(trace),
    )


def save_solution(sol: SolutionDocument, path: str | Path) -> None:
    Path(path).write_text(to_canonical_json(solution_to_json_dict(sol)), "utf-8")


def load_solution(path: str | Path) -> SolutionDocument:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return solution_from_json_dict(data)
