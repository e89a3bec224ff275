"""Benchmark harness: the strategy catalog against a set of instances.

One cell per (instance, strategy): final status, the per-stage values, the
realized preference-sum and per-value pair counts of the final assignment,
and how it compares to a seeded random feasible baseline. Writers emit a
machine JSON, a flat CSV, a human-readable text table, and one PNG per
instance plotting every strategy's preference sum over elapsed time.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from .instance_io import InstanceDocument, instance_fingerprint, to_canonical_json
from .model import Assignment
from .objectives import eval_o1, render_objective
from .solver import SolveConfig, solve
from .strategy import EmptyAfterAdaptation, Strategy, adapt_to_instance, catalog, render
from .verify import assignment_profile, random_feasible

__all__ = [
    "BenchCell",
    "BenchInstance",
    "BenchReport",
    "run_bench",
    "write_report",
]


@dataclass(frozen=True)
class BenchInstance:
    name: str
    fingerprint: str
    m: int
    n: int
    k_min: int
    k_max: int
    n_skills: int
    c: int
    baseline_o1: int | None


@dataclass(frozen=True)
class BenchCell:
    instance: str
    strategy_id: str
    requested: str
    adapted: str
    status: str
    stage_values: tuple[tuple[str, int | None, str], ...]
    o1: int | None
    min_pair: int | None
    counts: tuple[tuple[int, int], ...]
    baseline_o1: int | None
    meets_baseline: bool | None
    nodes: int
    wall_time: float
    time_to_best: float
    trace: tuple[tuple[float, int, int], ...]


@dataclass(frozen=True)
class BenchReport:
    time_per_objective: float
    seed: int
    instances: tuple[BenchInstance, ...]
    cells: tuple[BenchCell, ...]
    wall_time: float

    def value_columns(self) -> list[int]:
        seen: set[int] = set()
        for cell in self.cells:
            seen.update(v for v, _ in cell.counts)
        return sorted(seen, reverse=True)


def _bench_one(task: tuple) -> BenchCell:
    doc, sid, strat, time_per_objective, seed, baseline_o1 = task
    inst = doc.instance
    requested = render(strat)
    try:
        adapted = adapt_to_instance(strat, inst)
    except EmptyAfterAdaptation:
        return BenchCell(
            instance=doc.name,
            strategy_id=sid,
            requested=requested,
            adapted="",
            status="empty-after-adaptation",
            stage_values=(),
            o1=None,
            min_pair=None,
            counts=(),
            baseline_o1=baseline_o1,
            meets_baseline=None,
            nodes=0,
            wall_time=0.0,
            time_to_best=0.0,
            trace=(),
        )
    cfg = SolveConfig(
        time_limit=time_per_objective * len(adapted.stages),
        time_mode="timeboxed",
        seed=seed,
    )
    outcome = solve(inst, adapted, cfg)
    if outcome.assignment is not None:
        o1, min_pair, count_map = assignment_profile(inst, outcome.assignment)
        counts = tuple(sorted(count_map.items(), key=lambda vc: -vc[0]))
        meets = None if baseline_o1 is None else o1 >= baseline_o1
    else:
        o1 = min_pair = None
        counts = ()
        meets = None
    trace = tuple((tp.elapsed, tp.nodes, tp.o1) for tp in outcome.quality_trace)
    return BenchCell(
        instance=doc.name,
        strategy_id=sid,
        requested=requested,
        adapted=render(adapted),
        status=outcome.status,
        stage_values=tuple(
            (render_objective(r.objective), r.value, r.status)
            for r in outcome.stages
        ),
        o1=o1,
        min_pair=min_pair,
        counts=counts,
        baseline_o1=baseline_o1,
        meets_baseline=meets,
        nodes=outcome.nodes,
        wall_time=outcome.wall_time,
        time_to_best=trace[-1][0] if trace else 0.0,
        trace=trace,
    )


def run_bench(
    docs: Sequence[InstanceDocument],
    *,
    strategies: Mapping[str, Strategy] | None = None,
    time_per_objective: float = 10.0,
    seed: int = 0,
    jobs: int = 1,
    include_baseline: bool = True,
    progress: Callable[[str], None] | None = None,
) -> BenchReport:
    """Solve every strategy on every instance and collect the grid.

    Each run gets time_per_objective seconds per adapted stage in timeboxed
    mode, so deeper strategies get proportionally more total budget, the
    same way a fixed per-stage allowance would be spent interactively.
    """
    if strategies is None:
        strategies = catalog()
    t0 = time.monotonic()
    say = progress or (lambda msg: None)

    metas: list[BenchInstance] = []
    baselines: dict[str, int | None] = {}
    for doc in docs:
        inst = doc.instance
        baseline_o1: int | None = None
        if include_baseline:
            asg = random_feasible(inst, seed)
            baseline_o1 = eval_o1(inst, asg) if asg is not None else None
        baselines[doc.name] = baseline_o1
        metas.append(
            BenchInstance(
                name=doc.name,
                fingerprint=instance_fingerprint(doc),
                m=inst.m,
                n=inst.n,
                k_min=inst.k_min,
                k_max=inst.k_max,
                n_skills=len(inst.skills),
                c=inst.c,
                baseline_o1=baseline_o1,
            )
        )

    tasks = [
        (doc, sid, strat, time_per_objective, seed, baselines[doc.name])
        for doc in docs
        for sid, strat in strategies.items()
    ]
    cells: list[BenchCell] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for cell in pool.map(_bench_one, tasks):
                say(f"{cell.instance} {cell.strategy_id}: {cell.status}")
                cells.append(cell)
    else:
        for task in tasks:
            cell = _bench_one(task)
            say(f"{cell.instance} {cell.strategy_id}: {cell.status}")
            cells.append(cell)
    return BenchReport(
        time_per_objective=time_per_objective,
        seed=seed,
        instances=tuple(metas),
        cells=tuple(cells),
        wall_time=time.monotonic() - t0,
    )


def _cell_json(cell: BenchCell) -> dict[str, Any]:
    return {
        "instance": cell.instance,
        "strategy": cell.strategy_id,
        "requested": cell.requested,
        "adapted": cell.adapted,
        "status": cell.status,
        "stages": [
            {"objective": o, "value": v, "status": s}
            for o, v, s in cell.stage_values
        ],
        "o1": cell.o1,
        "min_pair": cell.min_pair,
        "counts": {str(v): c for v, c in cell.counts},
        "baseline_o1": cell.baseline_o1,
        "meets_baseline": cell.meets_baseline,
        "nodes": cell.nodes,
        "wall_s": round(cell.wall_time, 3),
        "time_to_best_s": round(cell.time_to_best, 3),
    }


def _write_json(report: BenchReport, path: Path) -> None:
    payload = {
        "schema": "teamforge-bench/1",
        "config": {
            "time_per_objective_s": report.time_per_objective,
            "seed": report.seed,
        },
        "instances": [
            {
                "name": mi.name,
                "fingerprint": mi.fingerprint,
                "m": mi.m,
                "n": mi.n,
                "k_min": mi.k_min,
                "k_max": mi.k_max,
                "skills": mi.n_skills,
                "coverage": mi.c,
                "baseline_o1": mi.baseline_o1,
            }
            for mi in report.instances
        ],
        "cells": [_cell_json(c) for c in report.cells],
        "wall_s": round(report.wall_time, 3),
    }
    path.write_text(to_canonical_json(payload), "utf-8")


def _write_csv(report: BenchReport, path: Path) -> None:
    values = report.value_columns()
    header = [
        "instance", "strategy", "status", "o1", "min_pair",
        *[f"pairs[{v}]" for v in values],
        "baseline_o1", "meets_baseline", "nodes", "wall_s", "time_to_best_s",
        "stages",
    ]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for cell in report.cells:
            count_map = dict(cell.counts)
            stages = "|".join(
                f"{o}={v if v is not None else '-'}({s})"
                for o, v, s in cell.stage_values
            )
            writer.writerow([
                cell.instance,
                cell.strategy_id,
                cell.status,
                cell.o1 if cell.o1 is not None else "",
                cell.min_pair if cell.min_pair is not None else "",
                *[count_map.get(v, 0) if cell.o1 is not None else "" for v in values],
                cell.baseline_o1 if cell.baseline_o1 is not None else "",
                "" if cell.meets_baseline is None else str(cell.meets_baseline).lower(),
                cell.nodes,
                f"{cell.wall_time:.3f}",
                f"{cell.time_to_best:.3f}",
                stages,
            ])


def _write_text(report: BenchReport, path: Path) -> None:
    lines: list[str] = []
    lines.append(
        f"strategy catalog benchmark: {len(report.instances)} instances, "
        f"{report.time_per_objective:g}s per objective, seed {report.seed}, "
        f"total {report.wall_time:.1f}s"
    )
    by_instance: dict[str, list[BenchCell]] = {}
    for cell in report.cells:
        by_instance.setdefault(cell.instance, []).append(cell)
    for mi in report.instances:
        lines.append("")
        lines.append(
            f"== {mi.name}  m={mi.m} n={mi.n} sizes=[{mi.k_min},{mi.k_max}] "
            f"skills={mi.n_skills} c={mi.c} baseline_o1="
            f"{mi.baseline_o1 if mi.baseline_o1 is not None else '-'}"
        )
        values = sorted(
            {v for cell in by_instance.get(mi.name, []) for v, _ in cell.counts},
            reverse=True,
        )
        head = (
            f"{'strategy':<8} {'status':<10} {'o1':>6} {'min':>5} "
            + " ".join(f"{f'#{v}':>6}" for v in values)
            + f" {'meets':>5} {'wall_s':>8}  stages"
        )
        lines.append(head)
        for cell in by_instance.get(mi.name, []):
            count_map = dict(cell.counts)
            stages = " | ".join(
                f"{o}={v if v is not None else '-'} {s}"
                for o, v, s in cell.stage_values
            )
            lines.append(
                f"{cell.strategy_id:<8} {cell.status:<10} "
                f"{cell.o1 if cell.o1 is not None else '-':>6} "
                f"{cell.min_pair if cell.min_pair is not None else '-':>5} "
                + " ".join(f"{count_map.get(v, 0) if cell.o1 is not None else '-':>6}" for v in values)
                + f" {'' if cell.meets_baseline is None else ('yes' if cell.meets_baseline else 'NO'):>5}"
                f" {cell.wall_time:>8.2f}  {stages}"
            )
    path.write_text("\n".join(lines) + "\n", "utf-8")


def _safe_name(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._" else "-" for ch in name)


def _write_figures(report: BenchReport, out_dir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written: list[Path] = []
    by_instance: dict[str, list[BenchCell]] = {}
    for cell in report.cells:
        by_instance.setdefault(cell.instance, []).append(cell)
    for mi in report.instances:
        cells = by_instance.get(mi.name, [])
        fig, ax = plt.subplots(figsize=(8.0, 4.5), dpi=120)
        for cell in cells:
            if not cell.trace:
                continue
            xs = [t for t, _, _ in cell.trace]
            ys = [o1 for _, _, o1 in cell.trace]
            ax.plot(xs, ys, drawstyle="steps-post", linewidth=1.2,
                    marker=".", markersize=3, label=cell.strategy_id)
        if mi.baseline_o1 is not None:
            ax.axhline(mi.baseline_o1, color="gray", linestyle="--",
                       linewidth=1.0, label="random baseline")
        ax.set_xlabel("elapsed seconds")
        ax.set_ylabel("realized preference sum")
        ax.set_title(f"{mi.name}: solution quality over time")
        ax.set_xlim(left=0)
        ax.grid(True, alpha=0.3)
        if cells:
            ax.legend(fontsize=7, ncol=2, loc="lower right")
        fig.tight_layout()
        out = out_dir / f"quality_{_safe_name(mi.name)}.png"
        fig.savefig(out)
        plt.close(fig)
        written.append(out)
    return written


def write_report(report: BenchReport, out_dir: str | Path) -> list[Path]:
    """Write bench.json, bench.csv, bench.txt, and one quality PNG per
    instance into out_dir; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "bench.json", out / "bench.csv", out / "bench.txt"]
    _write_json(report, paths[0])
    _write_csv(report, paths[1])
    _write_text(report, paths[2])
    paths.extend(_write_figures(report, out))
    return paths
