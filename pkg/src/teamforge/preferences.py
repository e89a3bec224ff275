"""Build preference matrices from explicit statements and profile surveys.

Explicit preferences come in two tiers: strong vetoes and wishes valued -4
or +4, and weak ratings in [-2, 2]. Profile-derived preferences fill the
remaining pairs: per-attribute ratings are rescaled to [0, 1] by the
observed range, pairwise Euclidean distances are turned into similarities,
and similarities are bucketed onto a small integer interval. When explicit
weak preferences exist the profile values are confined to [-1, 1] so a
stated preference always outweighs an inferred one of the same tier.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "PreferenceError",
    "PreferenceExceedsBound",
    "DegenerateAttributeWarning",
    "AllProfilesIdenticalWarning",
    "STRONG_POSITIVE",
    "STRONG_NEGATIVE",
    "remap_team_dating",
    "ExplicitPreferences",
    "ProfileAttribute",
    "ProfileSet",
    "NormalizedProfiles",
    "normalize_profiles",
    "profile_similarity",
    "BucketMap",
    "bucketize",
    "MergedPreferences",
    "merge_preferences",
    "profile_preference_matrix",
]

STRONG_POSITIVE = 4
STRONG_NEGATIVE = -4


class PreferenceError(ValueError):
    """Preference inputs violate their schema."""


class PreferenceExceedsBound(PreferenceError):
    """A merged preference value falls outside [-d, d]."""


class DegenerateAttributeWarning(UserWarning):
    """Every student gave the same rating; the attribute carries no signal."""


class AllProfilesIdenticalWarning(UserWarning):
    """All profiles coincide; every pairwise similarity defaults to 1."""


def remap_team_dating(rating: int) -> int:
    """Map a 1..5 team-dating rating onto the weak preference scale [-2, 2]."""
    if not 1 <= rating <= 5:
        raise PreferenceError(f"team-dating rating {rating} outside 1..5")
    return rating - 3


@dataclass(frozen=True)
class ExplicitPreferences:
    """Directly stated preferences on ordered student pairs.

    weak maps (a, b) to a value in [-2, 2]; strong_positive and
    strong_negative hold pairs pinned to +4 and -4. The three groups must
    not overlap and no pair may point at its own student.
    """

    weak: Mapping[tuple[int, int], int] = field(default_factory=dict)
    strong_positive: frozenset[tuple[int, int]] = frozenset()
    strong_negative: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "weak", dict(self.weak))
        object.__setattr__(self, "strong_positive", frozenset(self.strong_positive))
        object.__setattr__(self, "strong_negative", frozenset(self.strong_negative))
        for (a, b), v in self.weak.items():
            if a == b:
                raise PreferenceError(f"weak preference on self pair ({a}, {b})")
            if not -2 <= v <= 2:
                raise PreferenceError(f"weak value {v} for ({a}, {b}) outside [-2, 2]")
        for pair in self.strong_positive | self.strong_negative:
            if pair[0] == pair[1]:
                raise PreferenceError(f"strong preference on self pair {pair}")
        if self.strong_positive & self.strong_negative:
            raise PreferenceError("a pair is both strongly positive and negative")
        strong = self.strong_positive | self.strong_negative
        overlap = strong & set(self.weak)
        if overlap:
            raise PreferenceError(f"pairs carry both strong and weak values: {sorted(overlap)}")

    def has_weak(self) -> bool:
        return bool(self.weak)


@dataclass(frozen=True)
class ProfileAttribute:
    """One survey attribute: a Likert scale lo..hi or a binary flag."""

    name: str
    kind: str  # "likert" | "binary"
    lo: int = 0
    hi: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("likert", "binary"):
            raise PreferenceError(f"unknown attribute kind {self.kind!r}")
        if self.kind == "binary":
            object.__setattr__(self, "lo", 0)
            object.__setattr__(self, "hi", 1)
        if self.lo >= self.hi:
            raise PreferenceError(f"attribute {self.name}: empty scale {self.lo}..{self.hi}")


@dataclass(frozen=True)
class ProfileSet:
    """Per-student ratings for a fixed attribute list (m rows, one per student)."""

    attributes: tuple[ProfileAttribute, ...]
    values: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "values", tuple(tuple(r) for r in self.values))
        k = len(self.attributes)
        for i, row in enumerate(self.values):
            if len(row) != k:
                raise PreferenceError(f"profile row {i} has {len(row)} of {k} ratings")
            for attr, v in zip(self.attributes, row):
                if not attr.lo <= v <= attr.hi:
                    raise PreferenceError(
                        f"rating {v} for {attr.name!r} outside {attr.lo}..{attr.hi}"
                    )

    @property
    def m(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class NormalizedProfiles:
    """Observed-range normalized ratings; degenerate attributes are dropped."""

    values: np.ndarray
    attributes: tuple[str, ...]


def normalize_profiles(profiles: ProfileSet) -> NormalizedProfiles:
    """Rescale each attribute to [0, 1] using the observed min and max.

    The declared scale bounds do not matter here, only the ratings actually
    given. An attribute where everyone answered the same is dropped with a
    DegenerateAttributeWarning since it cannot separate any two students.
    """
    if profiles.m < 2:
        raise PreferenceError("need at least 2 profiles to compare")
    raw = np.asarray(profiles.values, dtype=float)
    kept_cols = []
    kept_names = []
    for j, attr in enumerate(profiles.attributes):
        col = raw[:, j]
        lo, hi = col.min(), col.max()
        if hi == lo:
            warnings.warn(
                f"attribute {attr.name!r} is constant and was dropped",
                DegenerateAttributeWarning,
                stacklevel=2,
            )
            continue
        kept_cols.append((col - lo) / (hi - lo))
        kept_names.append(attr.name)
    if kept_cols:
        values = np.column_stack(kept_cols)
    else:
        values = np.zeros((profiles.m, 0))
    return NormalizedProfiles(values, tuple(kept_names))


def profile_similarity(normalized: np.ndarray) -> np.ndarray:
    """Pairwise similarity in [0, 1] from Euclidean profile distances.

    Distances are rescaled by the largest observed pairwise distance, and
    similarity is one minus that. Identical profiles across the board give
    similarity 1 everywhere, with an AllProfilesIdenticalWarning.
    """
    values = np.asarray(normalized, dtype=float)
    m = values.shape[0]
    diff = values[:, None, :] - values[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    max_dist = dist.max() if m else 0.0
    if max_dist == 0.0:
        warnings.warn(
            "all profiles are identical; similarities default to 1",
            AllProfilesIdenticalWarning,
            stacklevel=2,
        )
        return np.ones((m, m))
    return 1.0 - dist / max_dist


@dataclass(frozen=True)
class BucketMap:
    """Equal-width similarity buckets mapped onto the integers lo..hi."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo >= self.hi:
            raise PreferenceError(f"bucket interval {self.lo}..{self.hi} is empty")

    @property
    def bucket_count(self) -> int:
        return self.hi - self.lo + 1


def bucketize(similarity: np.ndarray, buckets: BucketMap) -> np.ndarray:
    """Map similarities onto integer preferences, higher similarity never lower.

    [0, 1] splits into bucket_count equal-width intervals, half-open except
    the last; bucket i (ascending) maps to lo + i. The diagonal is forced
    to 0 since self-preferences are meaningless.
    """
    sim = np.asarray(similarity, dtype=float)
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise PreferenceError("similarity must be a square matrix")
    if (sim < -1e-9).any() or (sim > 1 + 1e-9).any():
        raise PreferenceError("similarities must lie in [0, 1]")
    sim = np.clip(sim, 0.0, 1.0)
    count = buckets.bucket_count
    idx = np.minimum((sim * count).astype(int), count - 1)
    prefs = buckets.lo + idx
    np.fill_diagonal(prefs, 0)
    return prefs


@dataclass(frozen=True)
class MergedPreferences:
    """Final matrix plus, per nonzero cell, which tier produced it."""

    matrix: tuple[tuple[int, ...], ...]
    provenance: Mapping[tuple[int, int], str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "provenance", dict(self.provenance))


def merge_preferences(
    m: int,
    explicit: ExplicitPreferences,
    profile_prefs: np.ndarray | None = None,
    *,
    d: int = 4,
) -> MergedPreferences:
    """Combine tiers cell by cell: strong beats weak beats profile beats 0.

    profile_prefs, when given, must already target the interval agreed with
    the explicit data ([-1, 1] when weak preferences exist, else [-2, 2]).
    """
    if profile_prefs is not None:
        profile_prefs = np.asarray(profile_prefs)
        if profile_prefs.shape != (m, m):
            raise PreferenceError(
                f"profile preferences are {profile_prefs.shape}, expected ({m}, {m})"
            )
    matrix = [[0] * m for _ in range(m)]
    provenance: dict[tuple[int, int], str] = {}

    def put(a: int, b: int, value: int, source: str) -> None:
        if not 0 <= a < m or not 0 <= b < m:
            raise PreferenceError(f"pair ({a}, {b}) outside the student range 0..{m - 1}")
        if abs(value) > d:
            raise PreferenceExceedsBound(
                f"merged value {value} for ({a}, {b}) exceeds the bound {d}"
            )
        matrix[a][b] = value
        provenance[(a, b)] = source

    if profile_prefs is not None:
        for a in range(m):
            for b in range(m):
                if a != b:
                    v = int(profile_prefs[a][b])
                    if v:
                        put(a, b, v, "profile")
    for (a, b), v in sorted(explicit.weak.items()):
        put(a, b, v, "weak")
    for a, b in sorted(explicit.strong_positive):
        put(a, b, STRONG_POSITIVE, "strong")
    for a, b in sorted(explicit.strong_negative):
        put(a, b, STRONG_NEGATIVE, "strong")
    return MergedPreferences(tuple(tuple(row) for row in matrix), provenance)


def profile_preference_matrix(
    profiles: ProfileSet, target: tuple[int, int]
) -> np.ndarray:
    """Full pipeline for profile data: normalize, compare, bucketize onto target."""
    normalized = normalize_profiles(profiles)
    sim = profile_similarity(normalized.values)
    return bucketize(sim, BucketMap(*target))
