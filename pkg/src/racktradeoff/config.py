"""Cluster descriptions: parsing, validation and derived degrees.

All scalar quantities are exact rationals (`fractions.Fraction`); no floating
point enters the core computations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import InvalidConfig, SchemaError

__all__ = ["RackSpec", "SystemConfig", "parse_and_validate", "load_config"]


@dataclass(frozen=True)
class RackSpec:
    """One rack: node count and the same-rack helper degree of its newcomers."""

    nodes: int
    cheap_degree: int


@dataclass(frozen=True)
class SystemConfig:
    """Validated cluster description.

    Racks are stored sorted ascending by cheap_degree; the expensive helper
    degree of rack j is derived as d - cheap_degree_j.
    """

    file_size: Fraction
    k: int
    d: int
    tau: Fraction
    cheap_cost: Fraction
    expensive_cost: Fraction
    racks: tuple[RackSpec, ...]

    @property
    def num_racks(self) -> int:
        return len(self.racks)

    @property
    def total_nodes(self) -> int:
        return sum(r.nodes for r in self.racks)

    @property
    def cheap_degrees(self) -> tuple[int, ...]:
        return tuple(r.cheap_degree for r in self.racks)

    @property
    def expensive_degrees(self) -> tuple[int, ...]:
        return tuple(self.d - r.cheap_degree for r in self.racks)

    def rack_nodes(self) -> tuple[int, ...]:
        return tuple(r.nodes for r in self.racks)


_RATIONAL_FIELDS = ("file_size", "tau", "cheap_cost", "expensive_cost")
_INT_FIELDS = ("k", "d")


def _as_rational(value: Any, field: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise SchemaError(f"field '{field}' must be an integer or a 'p/q' string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"field '{field}' is not a valid rational: {value!r}") from exc
    raise SchemaError(f"field '{field}' must be an integer or a 'p/q' string")


def _as_int(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field '{field}' must be an integer")
    return value


def parse_and_validate(raw: Mapping[str, Any]) -> SystemConfig:
    """Parse a config document and enforce every system invariant.

    Raises SchemaError for structural problems and InvalidConfig with the
    violated invariant named for semantic ones.
    """
    if not isinstance(raw, Mapping):
        raise SchemaError("config root must be a mapping")
    for field in _RATIONAL_FIELDS + _INT_FIELDS + ("racks",):
        if field not in raw:
            raise SchemaError(f"missing field '{field}'")

    file_size = _as_rational(raw["file_size"], "file_size")
    tau = _as_rational(raw["tau"], "tau")
    cheap_cost = _as_rational(raw["cheap_cost"], "cheap_cost")
    expensive_cost = _as_rational(raw["expensive_cost"], "expensive_cost")
    k = _as_int(raw["k"], "k")
    d = _as_int(raw["d"], "d")

    racks_raw = raw["racks"]
    if not isinstance(racks_raw, Sequence) or isinstance(racks_raw, (str, bytes)) or not racks_raw:
        raise SchemaError("field 'racks' must be a non-empty list")
    racks = []
    for idx, entry in enumerate(racks_raw):
        if not isinstance(entry, Mapping):
            raise SchemaError(f"racks[{idx}] must be a mapping")
        for field in ("nodes", "cheap_degree"):
            if field not in entry:
                raise SchemaError(f"racks[{idx}] missing field '{field}'")
        racks.append(
            RackSpec(
                nodes=_as_int(entry["nodes"], f"racks[{idx}].nodes"),
                cheap_degree=_as_int(entry["cheap_degree"], f"racks[{idx}].cheap_degree"),
            )
        )
    racks.sort(key=lambda r: r.cheap_degree)

    if file_size <= 0:
        raise InvalidConfig("file_size must be positive")
    if k <= 0:
        raise InvalidConfig("k must be positive")
    if d <= 0:
        raise InvalidConfig("d must be positive")
    if tau < 1:
        raise InvalidConfig("tau < 1")
    if cheap_cost < 0:
        raise InvalidConfig("cheap_cost must be non-negative")
    if expensive_cost < cheap_cost:
        raise InvalidConfig("expensive_cost must be at least cheap_cost")

    n = sum(r.nodes for r in racks)
    for j, rack in enumerate(racks):
        if rack.nodes <= 0:
            raise InvalidConfig(f"rack {j}: nodes must be positive")
        if rack.cheap_degree < 0:
            raise InvalidConfig(f"rack {j}: cheap_degree must be non-negative")
        if rack.cheap_degree > rack.nodes - 1:
            raise InvalidConfig(
                f"rack {j}: cheap_degree {rack.cheap_degree} exceeds nodes-1 = {rack.nodes - 1}"
            )
        d_e = d - rack.cheap_degree
        if len(racks) >= 2 and d_e <= 0:
            raise InvalidConfig(f"rack {j}: expensive degree d - cheap_degree = {d_e} must be positive")
        if d_e < 0:
            raise InvalidConfig(f"rack {j}: cheap_degree {rack.cheap_degree} exceeds d = {d}")
        if d_e > n - rack.nodes:
            raise InvalidConfig(
                f"rack {j}: expensive degree {d_e} exceeds nodes outside the rack = {n - rack.nodes}"
            )
    if k > n:
        raise InvalidConfig(f"k = {k} exceeds total nodes = {n}")
    if d > n - 1:
        raise InvalidConfig(f"d = {d} exceeds total nodes - 1 = {n - 1}")
    if k > d:
        raise InvalidConfig("k > d unsupported")

    return SystemConfig(
        file_size=file_size,
        k=k,
        d=d,
        tau=tau,
        cheap_cost=cheap_cost,
        expensive_cost=expensive_cost,
        racks=tuple(racks),
    )


def load_config(path: str) -> SystemConfig:
    """Read a JSON config file and validate it."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config is not valid JSON: {exc}") from exc
    return parse_and_validate(raw)
