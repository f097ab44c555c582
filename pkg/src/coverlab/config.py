"""Run configuration: the plane configuration, its building data and output options.

Config files are TOML.  Every coefficient is an integer or a ``"p/q"``
string; floats are rejected.  Conic coefficients are listed in the order
x^2, xy, xz, y^2, yz, z^2 and line coefficients as (a, b, c) for
``a*x + b*y + c*z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cover import BuildingData
from .field import as_fraction
from .group import GroupElement
from .plane import (ConfigurationError, ConicPencil, DegeneracyError, PlaneCurve,
                    ProjectivePoint, intersection_multiplicity, tangent_conic_pencil)

LINE_LABELS = ("T1", "T2", "T3", "T4")

DEFAULT_LINES = {
    "T1": (1, 0, -1),
    "T2": (1, 0, 1),
    "T3": (0, 1, -1),
    "T4": (0, 1, 1),
}
DEFAULT_H1 = (1, 0, 0, 1, 0, -1)
DEFAULT_PENCIL_PARAMETER = Fraction(1)
DEFAULT_BUILDING_DATA = (
    ("D1", "xyz", ("H1",)),
    ("D2", "z", ("H2",)),
    ("D3", "y", ("T1", "T2")),
    ("D4", "x", ("T3", "T4")),
)
DEFAULT_GENERATORS = ("x", "y", "z")


@dataclass(frozen=True)
class RunConfig:
    lines: Mapping[str, tuple[Fraction, ...]] = field(
        default_factory=lambda: {k: tuple(map(Fraction, v)) for k, v in DEFAULT_LINES.items()})
    h1: tuple[Fraction, ...] = tuple(map(Fraction, DEFAULT_H1))
    pencil_parameter: Fraction | None = DEFAULT_PENCIL_PARAMETER
    h2: tuple[Fraction, ...] | None = None
    building_data: tuple[tuple[str, str, tuple[str, ...]], ...] = DEFAULT_BUILDING_DATA
    generators: tuple[str, ...] = DEFAULT_GENERATORS
    report: str | None = None
    dump_matrix: str | None = None
    verbose: bool = False
    source: str = "default"

    def with_options(self, **changes) -> RunConfig:
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return RunConfig(**data)


def default_config() -> RunConfig:
    return RunConfig()


# parsing ------------------------------------------------------------------------

def _exact(value: Any, where: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"{where}: {exc}") from None


def _vector(value: Any, n: int, where: str) -> tuple[Fraction, ...]:
    if not isinstance(value, list) or len(value) != n:
        raise ConfigurationError(f"{where}: expected a list of {n} coefficients")
    vec = tuple(_exact(v, f"{where}[{i}]") for i, v in enumerate(value))
    if not any(vec):
        raise ConfigurationError(f"{where}: all coefficients are zero")
    return vec


def _check_keys(table: Mapping, allowed: set[str], where: str) -> None:
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigurationError(f"{where}: unknown key(s) {', '.join(extra)}")


def parse_config(data: Mapping[str, Any], source: str = "<config>") -> RunConfig:
    """Build a :class:`RunConfig` from parsed TOML; missing tables keep defaults."""
    _check_keys(data, {"lines", "conics", "pencil", "building_data", "output"}, source)
    cfg = default_config()
    changes: dict[str, Any] = {"source": source}
    if "lines" in data:
        lines = data["lines"]
        _check_keys(lines, set(LINE_LABELS), "[lines]")
        merged = dict(cfg.lines)
        for k, v in lines.items():
            merged[k] = _vector(v, 3, f"[lines].{k}")
        changes["lines"] = merged
    conics = data.get("conics", {})
    _check_keys(conics, {"H1", "H2"}, "[conics]")
    if "H1" in conics:
        changes["h1"] = _vector(conics["H1"], 6, "[conics].H1")
    pencil = data.get("pencil", {})
    _check_keys(pencil, {"parameter"}, "[pencil]")
    if "H2" in conics and "parameter" in pencil:
        raise ConfigurationError("give either [conics].H2 or [pencil].parameter, not both")
    if "H2" in conics:
        changes["h2"] = _vector(conics["H2"], 6, "[conics].H2")
        changes["pencil_parameter"] = None
    if "parameter" in pencil:
        changes["pencil_parameter"] = _exact(pencil["parameter"], "[pencil].parameter")
    if "building_data" in data:
        changes.update(_parse_building_data(data["building_data"]))
    out = data.get("output", {})
    _check_keys(out, {"report", "dump_matrix", "verbose"}, "[output]")
    for key in ("report", "dump_matrix"):
        if key in out:
            if not isinstance(out[key], str):
                raise ConfigurationError(f"[output].{key}: expected a path string")
            changes[key] = out[key]
    if "verbose" in out:
        if not isinstance(out["verbose"], bool):
            raise ConfigurationError("[output].verbose: expected true or false")
        changes["verbose"] = out["verbose"]
    return cfg.with_options(**changes)


def _parse_building_data(table: Mapping[str, Any]) -> dict[str, Any]:
    gens = table.get("generators", list(DEFAULT_GENERATORS))
    if not isinstance(gens, list) or not all(isinstance(g, str) and len(g) == 1 for g in gens):
        raise ConfigurationError("[building_data].generators: expected single-letter names")
    divisors = []
    for name, entry in table.items():
        if name == "generators":
            continue
        where = f"[building_data].{name}"
        if not isinstance(entry, Mapping):
            raise ConfigurationError(f"{where}: expected a table with sigma and components")
        _check_keys(entry, {"sigma", "components"}, where)
        sigma, comps = entry.get("sigma"), entry.get("components")
        if not isinstance(sigma, str) or not isinstance(comps, list) or not comps:
            raise ConfigurationError(f"{where}: sigma must be a word and components a nonempty list")
        divisors.append((name, sigma, tuple(str(c) for c in comps)))
    if not divisors:
        raise ConfigurationError("[building_data]: no divisors given")
    return {"building_data": tuple(divisors), "generators": tuple(gens)}


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    return parse_config(data, str(path))


# building the geometry --------------------------------------------------------------

@dataclass
class Configuration:
    """The curves H1, H2, T1..T4 and the building data they define."""

    lines: dict[str, PlaneCurve]
    h1: PlaneCurve
    h2: PlaneCurve
    pencil: ConicPencil
    pencil_parameter: Fraction | None
    building_data: BuildingData
    base_points: dict[str, tuple[Fraction, ...]]

    @property
    def curves(self) -> dict[str, PlaneCurve]:
        return {"H1": self.h1, "H2": self.h2, **self.lines}

    @property
    def octic(self) -> list[PlaneCurve]:
        return [self.h1, self.h2, *self.lines.values()]


def tangency_point(conic: PlaneCurve, line: PlaneCurve) -> ProjectivePoint:
    """The point where a tangent line touches a smooth conic (the pole of the line)."""
    m = conic.matrix()
    a = line.line_vector()
    adj = [[m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
            - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3]
            for j in range(3)] for i in range(3)]
    return ProjectivePoint([sum(adj[i][j] * a[j] for j in range(3)) for i in range(3)])


def _check_tangent(conic: PlaneCurve, line: PlaneCurve) -> None:
    if not conic.is_smooth():
        raise ConfigurationError(f"{conic.label} is not a smooth conic")
    p = tangency_point(conic, line)
    if not line.contains(p) or intersection_multiplicity(conic, line, p) != 2:
        raise ConfigurationError(f"line {line.label} is not tangent to {conic.label}")


def build_configuration(cfg: RunConfig) -> Configuration:
    lines = {k: PlaneCurve.line(*cfg.lines[k], label=k) for k in LINE_LABELS}
    pencil = tangent_conic_pencil(list(lines.values()))
    h1 = PlaneCurve.conic(cfg.h1, "H1")
    for line in lines.values():
        _check_tangent(h1, line)
    if cfg.h2 is not None:
        h2 = PlaneCurve.conic(cfg.h2, "H2")
    else:
        try:
            h2 = pencil.member(cfg.pencil_parameter, "H2")
        except DegeneracyError as exc:
            raise ConfigurationError(str(exc)) from None
    for line in lines.values():
        _check_tangent(h2, line)
    if h1.same_curve(h2):
        raise ConfigurationError("H2 coincides with H1")
    curves = {"H1": h1, "H2": h2, **lines}
    first = lines[LINE_LABELS[0]]
    base_points = {c.label: tangency_point(c, first).rational_coords() for c in (h1, h2)}
    bd = building_data_from(cfg, curves, base_points)
    return Configuration(lines, h1, h2, pencil, cfg.pencil_parameter, bd, base_points)


def building_data_from(cfg: RunConfig, curves: Mapping[str, PlaneCurve],
                       base_points: Mapping | None = None) -> BuildingData:
    from .cover import BranchDivisor

    r = len(cfg.generators)
    divisors = []
    used: set[str] = set()
    for name, word, comps in cfg.building_data:
        try:
            sigma = GroupElement.from_word(word, cfg.generators)
        except ValueError as exc:
            raise ConfigurationError(f"[building_data].{name}: {exc}") from None
        for c in comps:
            if c not in curves:
                raise ConfigurationError(f"[building_data].{name}: unknown curve {c}")
            if c in used:
                raise ConfigurationError(f"[building_data].{name}: curve {c} used twice")
            used.add(c)
        divisors.append(BranchDivisor(name, sigma, tuple(curves[c] for c in comps)))
    return BuildingData(r, tuple(divisors), tuple(cfg.generators), dict(base_points or {}))
