"""Optimization strategies: ordered objective chains, their text syntax, the
built-in catalog, and per-instance adaptation."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import Instance
from .objectives import O1, O2, Objective, o3_max, o3_min, render_objective

__all__ = [
    "ParseError",
    "UnknownObjective",
    "DuplicateStage",
    "EmptyAfterAdaptation",
    "Strategy",
    "parse_strategy",
    "render",
    "catalog",
    "adapt_to_instance",
]


class ParseError(ValueError):
    """Strategy text could not be parsed; position points at the offender."""

    def __init__(self, message: str, position: int = 0) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownObjective(ParseError):
    """A token names no known objective."""


class DuplicateStage(ValueError):
    """The same objective appears twice in one strategy."""


class EmptyAfterAdaptation(ValueError):
    """Adaptation removed every stage; the strategy cannot run on this instance."""


@dataclass(frozen=True)
class Strategy:
    """An ordered, duplicate-free chain of objectives, optionally named."""

    stages: tuple[Objective, ...]
    id: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ValueError("a strategy needs at least one stage")
        seen = set()
        for obj in self.stages:
            key = (obj.kind, obj.direction, obj.p0)
            if key in seen:
                raise DuplicateStage(f"objective {render_objective(obj)} repeated")
            seen.add(key)


_O3_TOKEN = re.compile(r"^O3([+-])\((-?\d+)\)$")


def _parse_objective(token: str, position: int) -> Objective:
    compact = "".join(token.split())
    if compact == "O1":
        return O1
    if compact == "O2":
        return O2
    match = _O3_TOKEN.match(compact)
    if match:
        value = int(match.group(2))
        return o3_max(value) if match.group(1) == "+" else o3_min(value)
    raise UnknownObjective(f"unknown objective {token.strip()!r}", position)


def _split_stages(body: str, offset: int) -> list[tuple[str, int]]:
    """Split on top-level commas, keeping each token's offset in the input."""
    tokens = []
    depth = 0
    start = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", offset + i)
        elif ch == "," and depth == 0:
            tokens.append((body[start:i], offset + start))
            start = i + 1
    if depth != 0:
        raise ParseError("unbalanced '('", offset + len(body))
    tokens.append((body[start:], offset + start))
    return tokens


def parse_strategy(text: str) -> Strategy:
    """Parse strategy text such as "EDU-TF(O2, O1)" or bare "O3-(-4), O1".

    Whitespace is ignored. O3 stages use the forms "O3+(v)" and "O3-(v)"
    where v is the tracked preference value.
    """
    stripped = text.strip()
    body = stripped
    offset = text.find(stripped) if stripped else 0
    if stripped.startswith("EDU-TF"):
        rest = stripped[len("EDU-TF"):].strip()
        if not (rest.startswith("(") and rest.endswith(")")):
            raise ParseError("expected parentheses after EDU-TF", offset)
        body = rest[1:-1]
        offset += stripped.index("(") + 1
    if not body.strip():
        raise ParseError("empty strategy", offset)
    stages = []
    for token, pos in _split_stages(body, offset):
        if not token.strip():
            raise ParseError("empty stage", pos)
        stages.append(_parse_objective(token, pos))
    return Strategy(tuple(stages))


def render(strat: Strategy) -> str:
    """Canonical text form; parse_strategy(render(s)) reproduces s's stages."""
    return "EDU-TF(" + ", ".join(render_objective(o) for o in strat.stages) + ")"


def catalog() -> dict[str, Strategy]:
    """The ten built-in strategies, keyed by their catalog ids."""
    o3m = o3_min
    o3p = o3_max
    entries = {
        "S1.1": (O2,),
        "S1.2": (o3m(-4), o3m(-2), o3m(-1)),
        "S2.1": (O1,),
        "S2.2": (o3p(4), o3p(2), o3p(1)),
        "S3.1": (O2, O1),
        "S3.2": (O2, o3p(4), o3p(2), o3p(1)),
        "S3.3": (o3m(-4), o3m(-2), o3m(-1), O1),
        "S3.4": (o3m(-4), o3m(-2), o3m(-1), o3p(4), o3p(2), o3p(1)),
        "S4.1": (o3m(-4), o3p(4), O1),
        "S4.2": (o3m(-4), o3p(4), o3m(-2), o3p(2), o3m(-1), o3p(1)),
    }
    return {name: Strategy(stages, id=name) for name, stages in entries.items()}


def adapt_to_instance(strat: Strategy, inst: Instance) -> Strategy:
    """Drop O3 stages whose target value never occurs off-diagonal in inst.p.

    Idempotent. Raises EmptyAfterAdaptation when nothing remains.
    """
    present = inst.values_present()
    kept = tuple(
        obj for obj in strat.stages if obj.kind != "O3" or obj.p0 in present
    )
    if not kept:
        raise EmptyAfterAdaptation(
            f"no stage of {strat.id or render(strat)} applies: "
            f"none of its tracked values occur in the instance"
        )
    if len(kept) == len(strat.stages):
        return strat
    return Strategy(kept, id=strat.id)
