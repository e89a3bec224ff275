"""Command line front end.

Subcommands: solve an instance file with a strategy, validate a solution
file against its instance, generate seeded instances from the bundled
dataset presets, run the benchmark grid with its figures, and build a
preference matrix from vote and survey CSVs.

Exit codes: 0 solved or valid, 1 invalid solution, 2 usage error, 3 proven
infeasible, 4 budget exhausted with nothing found, 5 bad input or I/O.
Set TEAMFORGE_LOG=DEBUG (or INFO, ...) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys
from pathlib import Path

from .instance_io import (
    InstanceDocument,
    SchemaError,
    build_solution_document,
    document_from_instance,
    instance_fingerprint,
    load_instance,
    load_solution,
    save_instance,
    save_solution,
    to_canonical_json,
)
from .model import (
    Assignment,
    InstanceError,
    StructuralMismatch,
    is_feasible,
    team_coverage,
)
from .objectives import eval_o1, eval_o2, render_objective
from .preferences import (
    ExplicitPreferences,
    PreferenceError,
    ProfileAttribute,
    ProfileSet,
    merge_preferences,
    profile_preference_matrix,
    remap_team_dating,
)
from .report import run_bench, write_report
from .solver import (
    CertificationFailure,
    SolveConfig,
    certify,
    solve,
    stage_value_checks,
)
from .strategy import (
    EmptyAfterAdaptation,
    ParseError,
    Strategy,
    adapt_to_instance,
    catalog,
    parse_strategy,
    render,
)
from .verify import PRESETS, GenerationError, generate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_UNKNOWN = 4
EXIT_ERROR = 5

log = logging.getLogger("teamforge")

_DURATION = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*(ms|s|m|h)?\s*$")
_UNIT_SECONDS = {None: 1.0, "ms": 0.001, "s": 1.0, "m": 60.0, "h": 3600.0}


def parse_duration(text: str) -> float:
    """Duration like '500ms', '5s', '2m', '1h'; a bare number means seconds."""
    match = _DURATION.match(text)
    if not match:
        raise argparse.ArgumentTypeError(
            f"{text!r} is not a duration (try 500ms, 5s, 2m, 1h)"
        )
    seconds = float(match.group(1)) * _UNIT_SECONDS[match.group(2)]
    if seconds <= 0:
        raise argparse.ArgumentTypeError("duration must be positive")
    return seconds


def resolve_strategy(text: str) -> Strategy:
    """A catalog id like S3.1, or strategy text like 'O2, O1'."""
    by_id = catalog()
    if text in by_id:
        return by_id[text]
    return parse_strategy(text)


def _status_exit(status: str) -> int:
    if status in ("optimal", "feasible"):
        return EXIT_OK
    if status == "infeasible":
        return EXIT_INFEASIBLE
    return EXIT_UNKNOWN


def cmd_solve(args: argparse.Namespace) -> int:
    doc = load_instance(args.instance)
    inst = doc.instance
    strat = resolve_strategy(args.strategy)
    adapted = adapt_to_instance(strat, inst)
    if adapted is not strat:
        log.info("adapted %s to %s", render(strat), render(adapted))
    cfg = SolveConfig(
        time_limit=args.time_limit,
        time_mode=args.time_mode,
        seed=args.seed,
    )
    outcome = solve(inst, adapted, cfg)
    certify(inst, adapted, outcome)

    name = doc.name or Path(args.instance).stem
    print(
        f"{name}: m={inst.m} n={inst.n} sizes=[{inst.k_min},{inst.k_max}] "
        f"coverage {inst.c} of {len(inst.skills)} skills"
    )
    print(f"strategy: {args.strategy} -> {render(adapted)}")
    print(
        f"status: {outcome.status} "
        f"(nodes {outcome.nodes}, wall {outcome.wall_time:.2f}s)"
    )
    for r in outcome.stages:
        value = "-" if r.value is None else r.value
        print(
            f"  {render_objective(r.objective)}: value {value} ({r.status}, "
            f"nodes {r.nodes})"
        )
    if outcome.assignment is not None:
        o1 = eval_o1(inst, outcome.assignment)
        o2 = eval_o2(inst, outcome.assignment)
        print(f"preference sum {o1}, minimum realized pair {o2}")
        for i, team in enumerate(outcome.assignment.teams):
            ids = ", ".join(doc.student_ids[s] for s in team)
            print(f"  team {i}: {ids} (skills covered {team_coverage(inst, team)})")
    if args.out:
        sol = build_solution_document(doc, args.strategy, adapted, cfg, outcome)
        save_solution(sol, args.out)
        print(f"wrote {args.out}")
    return _status_exit(outcome.status)


def cmd_validate(args: argparse.Namespace) -> int:
    doc = load_instance(args.instance)
    sol = load_solution(args.solution)
    inst = doc.instance
    failures = 0

    def check(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failures += 1

    expected = instance_fingerprint(doc)
    check(
        "fingerprint",
        sol.instance_fingerprint == expected,
        "solution matches this instance"
        if sol.instance_fingerprint == expected
        else f"solution answers {sol.instance_fingerprint[:12]}..., "
        f"instance is {expected[:12]}...",
    )

    if sol.teams is None:
        check(
            "assignment",
            sol.status in ("infeasible", "unknown"),
            f"no teams recorded with status {sol.status}",
        )
        return EXIT_OK if failures == 0 else EXIT_INVALID

    try:
        teams = tuple(
            tuple(doc.student_index(sid) for sid in team) for team in sol.teams
        )
        asg = Assignment(teams)
    except (SchemaError, StructuralMismatch) as exc:
        check("assignment", False, str(exc))
        return EXIT_INVALID
    report = is_feasible(inst, asg)
    check(
        "feasibility",
        report.ok,
        "all team sizes and skill coverage hold"
        if report.ok
        else "; ".join(f"team {v.team}: {v.detail}" for v in report.violations),
    )

    stage_objs = [st.objective for st in sol.stages]
    adapted_objs = list(sol.adapted.stages)
    check(
        "strategy",
        stage_objs == adapted_objs[: len(stage_objs)],
        "stages follow the adapted strategy",
    )
    stage_info = [(st.objective, st.value, st.status) for st in sol.stages]
    for c in stage_value_checks(inst, stage_info, asg):
        check(c.name, c.ok, c.detail)
    return EXIT_OK if failures == 0 else EXIT_INVALID


def cmd_generate(args: argparse.Namespace) -> int:
    if args.list:
        print(f"{'name':<6} {'m':>3} {'n':>3} {'sizes':<7} {'skills':>6} {'c':>2} nonzero-cells")
        for preset in PRESETS.values():
            filled = sum(c for _, c in preset.histogram)
            print(
                f"{preset.name:<6} {preset.m:>3} {preset.n:>3} "
                f"[{preset.k_min},{preset.k_max}]{'':<2} {preset.n_skills:>6} "
                f"{preset.c:>2} {filled}"
            )
        return EXIT_OK
    if not args.preset:
        print("error: a preset name (or --list) is required", file=sys.stderr)
        return EXIT_USAGE
    preset = PRESETS.get(args.preset)
    if preset is None:
        print(
            f"error: unknown preset {args.preset!r} "
            f"(have {', '.join(PRESETS)})",
            file=sys.stderr,
        )
        return EXIT_ERROR
    inst = generate(preset, args.seed, ensure_feasible=args.ensure_feasible)
    name = f"{preset.name}-s{args.seed}"
    doc = document_from_instance(inst, name=name)
    out = args.out or f"{name}.json"
    save_instance(doc, out)
    print(
        f"wrote {out} (m={inst.m}, n={inst.n}, "
        f"fingerprint {instance_fingerprint(doc)[:12]}...)"
    )
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    docs: list[InstanceDocument] = []
    if args.presets:
        names = list(PRESETS) if args.presets == "all" else [
            p.strip() for p in args.presets.split(",") if p.strip()
        ]
        for name in names:
            preset = PRESETS.get(name)
            if preset is None:
                print(f"error: unknown preset {name!r}", file=sys.stderr)
                return EXIT_ERROR
            print(f"generating {name} (seed {args.seed})...", file=sys.stderr)
            inst = generate(preset, args.seed, ensure_feasible=True)
            docs.append(
                document_from_instance(inst, name=f"{name}-s{args.seed}")
            )
    for path in args.instance:
        doc = load_instance(path)
        if not doc.name:
            doc = InstanceDocument(
                instance=doc.instance,
                name=Path(path).stem,
                student_ids=doc.student_ids,
                skill_names=doc.skill_names,
                preference_format=doc.preference_format,
            )
        docs.append(doc)
    if not docs:
        print("error: nothing to bench (give --presets or --instance)", file=sys.stderr)
        return EXIT_USAGE
    report = run_bench(
        docs,
        time_per_objective=args.time_per_objective,
        seed=args.seed,
        jobs=args.jobs,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    for path in write_report(report, args.out_dir):
        print(f"wrote {path}")
    return EXIT_OK


def _read_roster(path: str) -> list[str]:
    ids = []
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.append(line)
    if len(set(ids)) != len(ids):
        raise PreferenceError(f"{path}: duplicate roster ids")
    return ids


def _read_votes(path: str):
    """CSV with header from,to,value,kind; kind is weak, strong, or rating
    (a 1..5 answer remapped onto the weak scale)."""
    weak: dict[tuple[str, str], int] = {}
    strong_pos: set[tuple[str, str]] = set()
    strong_neg: set[tuple[str, str]] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"from", "to", "value", "kind"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise PreferenceError(
                f"{path}: header must name the columns {sorted(required)}"
            )
        for lineno, row in enumerate(reader, start=2):
            src, dst = row["from"].strip(), row["to"].strip()
            kind = row["kind"].strip().lower()
            try:
                value = int(row["value"])
            except ValueError:
                raise PreferenceError(
                    f"{path}:{lineno}: value {row['value']!r} is not an integer"
                ) from None
            pair = (src, dst)
            if kind == "rating":
                weak[pair] = remap_team_dating(value)
            elif kind == "weak":
                weak[pair] = value
            elif kind == "strong":
                if value == 4:
                    strong_pos.add(pair)
                elif value == -4:
                    strong_neg.add(pair)
                else:
                    raise PreferenceError(
                        f"{path}:{lineno}: strong votes are -4 or 4, got {value}"
                    )
            else:
                raise PreferenceError(
                    f"{path}:{lineno}: unknown kind {kind!r} "
                    "(weak, strong, rating)"
                )
    return weak, strong_pos, strong_neg


def _parse_attr_spec(name: str, spec: str) -> ProfileAttribute:
    spec = spec.strip().lower()
    if spec == "binary":
        return ProfileAttribute(name, "binary")
    parts = spec.split(":")
    if len(parts) == 3 and parts[0] == "likert":
        return ProfileAttribute(name, "likert", int(parts[1]), int(parts[2]))
    raise PreferenceError(
        f"attribute {name!r}: spec {spec!r} must be binary or likert:LO:HI"
    )


def _read_profiles(path: str):
    """CSV with header student,<attr>,...; the second line is '#kind' plus a
    scale spec per attribute; data rows follow."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 3:
        raise PreferenceError(f"{path}: need a header, a #kind line, and data")
    header, kinds = rows[0], rows[1]
    if header[0].strip() != "student" or len(header) < 2:
        raise PreferenceError(f"{path}: first header column must be 'student'")
    if kinds[0].strip() != "#kind" or len(kinds) != len(header):
        raise PreferenceError(
            f"{path}: second line must start with #kind and cover every column"
        )
    attrs = tuple(
        _parse_attr_spec(name.strip(), spec)
        for name, spec in zip(header[1:], kinds[1:])
    )
    values: dict[str, tuple[int, ...]] = {}
    order: list[str] = []
    for lineno, row in enumerate(rows[2:], start=3):
        if len(row) != len(header):
            raise PreferenceError(f"{path}:{lineno}: expected {len(header)} cells")
        sid = row[0].strip()
        if sid in values:
            raise PreferenceError(f"{path}:{lineno}: duplicate student {sid!r}")
        try:
            ratings = tuple(int(cell) for cell in row[1:])
        except ValueError:
            raise PreferenceError(
                f"{path}:{lineno}: ratings must be integers"
            ) from None
        values[sid] = ratings
        order.append(sid)
    return attrs, values, order


def cmd_build_prefs(args: argparse.Namespace) -> int:
    if not args.votes and not args.profiles:
        print("error: give --votes and/or --profiles", file=sys.stderr)
        return EXIT_USAGE

    weak_ids: dict[tuple[str, str], int] = {}
    strong_pos_ids: set[tuple[str, str]] = set()
    strong_neg_ids: set[tuple[str, str]] = set()
    if args.votes:
        weak_ids, strong_pos_ids, strong_neg_ids = _read_votes(args.votes)

    attrs: tuple[ProfileAttribute, ...] = ()
    profile_values: dict[str, tuple[int, ...]] = {}
    profile_order: list[str] = []
    if args.profiles:
        attrs, profile_values, profile_order = _read_profiles(args.profiles)

    if args.roster:
        ids = _read_roster(args.roster)
    elif profile_order:
        ids = profile_order
    else:
        mentioned = {s for pair in weak_ids for s in pair}
        mentioned |= {s for pair in strong_pos_ids | strong_neg_ids for s in pair}
        ids = sorted(mentioned)
    if len(ids) < 2:
        raise PreferenceError("need at least two students")
    index_of = {sid: i for i, sid in enumerate(ids)}

    def to_index_pair(pair: tuple[str, str]) -> tuple[int, int]:
        for sid in pair:
            if sid not in index_of:
                raise PreferenceError(f"vote names unknown student {sid!r}")
        return index_of[pair[0]], index_of[pair[1]]

    explicit = ExplicitPreferences(
        weak={to_index_pair(p): v for p, v in weak_ids.items()},
        strong_positive=frozenset(to_index_pair(p) for p in strong_pos_ids),
        strong_negative=frozenset(to_index_pair(p) for p in strong_neg_ids),
    )

    profile_prefs = None
    if args.profiles:
        missing = [sid for sid in ids if sid not in profile_values]
        if missing:
            raise PreferenceError(
                f"no profile row for: {', '.join(missing)}"
            )
        profiles = ProfileSet(
            attributes=attrs,
            values=tuple(profile_values[sid] for sid in ids),
        )
        # Profile-derived values stay inside the explicit weak band, and
        # inside an even narrower one when real weak votes exist.
        target = (-1, 1) if explicit.has_weak() else (-2, 2)
        profile_prefs = profile_preference_matrix(profiles, target)

    merged = merge_preferences(len(ids), explicit, profile_prefs, d=args.scale)

    out = Path(args.out)
    fragment = {
        "schema": "teamforge-preferences/1",
        "scale": args.scale,
        "students": ids,
        "preferences": {
            "format": "dense",
            "rows": [list(row) for row in merged.matrix],
        },
    }
    out.write_text(to_canonical_json(fragment), "utf-8")
    sidecar = out.with_name(out.stem + ".provenance.json")
    entries = sorted(
        [ids[a], ids[b], source, merged.matrix[a][b]]
        for (a, b), source in merged.provenance.items()
    )
    sidecar.write_text(
        to_canonical_json(
            {"schema": "teamforge-provenance/1", "entries": entries}
        ),
        "utf-8",
    )
    print(f"wrote {out}")
    print(f"wrote {sidecar}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamforge",
        description="Skill-constrained team formation from teammate preferences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("instance", help="instance JSON file")
    p_solve.add_argument(
        "--strategy", required=True,
        help="catalog id (S1.1 .. S4.2) or objective list like 'O2, O1'",
    )
    p_solve.add_argument(
        "--time-limit", type=parse_duration, default=60.0,
        help="total budget, e.g. 500ms, 30s, 2m (default 60s)",
    )
    p_solve.add_argument(
        "--time-mode", choices=("global", "timeboxed"), default="global",
        help="share the budget across stages or box each stage evenly",
    )
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--out", help="write a solution JSON here")
    p_solve.set_defaults(func=cmd_solve)

    p_val = sub.add_parser("validate", help="check a solution file")
    p_val.add_argument("instance")
    p_val.add_argument("solution")
    p_val.set_defaults(func=cmd_validate)

    p_gen = sub.add_parser("generate", help="draw an instance from a preset")
    p_gen.add_argument("preset", nargs="?", help="preset name, see --list")
    p_gen.add_argument("--list", action="store_true", help="list presets")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument(
        "--ensure-feasible", action="store_true",
        help="redraw until a quick search finds a feasible assignment",
    )
    p_gen.add_argument("--out", help="output path (default <preset>-s<seed>.json)")
    p_gen.set_defaults(func=cmd_generate)

    p_bench = sub.add_parser(
        "bench", help="run the strategy catalog and write reports + figures"
    )
    p_bench.add_argument(
        "--presets", default="all",
        help="comma-separated preset names, or 'all' (default), or '' for none",
    )
    p_bench.add_argument(
        "--instance", action="append", default=[],
        help="additional instance file (repeatable)",
    )
    p_bench.add_argument(
        "--time-per-objective", type=parse_duration, default=10.0,
        help="budget per adapted stage (default 10s)",
    )
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out-dir", default="bench-out")
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    p_prefs = sub.add_parser(
        "build-prefs", help="merge vote and survey CSVs into a preference matrix"
    )
    p_prefs.add_argument("--votes", help="CSV: from,to,value,kind")
    p_prefs.add_argument(
        "--profiles", help="CSV: student,<attr>,... with a #kind scale line"
    )
    p_prefs.add_argument("--roster", help="text file, one student id per line")
    p_prefs.add_argument("--scale", type=int, default=4, help="bound d (default 4)")
    p_prefs.add_argument("--out", default="preferences.json")
    p_prefs.set_defaults(func=cmd_build_prefs)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("TEAMFORGE_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CertificationFailure as exc:
        print(f"error: result failed self-certification: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (
        SchemaError,
        InstanceError,
        StructuralMismatch,
        PreferenceError,
        ParseError,
        EmptyAfterAdaptation,
        GenerationError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
