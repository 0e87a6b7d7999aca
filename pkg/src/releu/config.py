"""Run configuration: flat INI sections mapping one-to-one onto the module
parameters, with every violation collected before reporting.

Sections and keys (all optional; defaults give the standard desk-scale run):

    [grid]         n1, n2, n3
    [eos]          gamma
    [data]         eps, pert_amp, velocity_amp
    [run]          t_end, cfl_safety, dt_min, renormalize, output_every, seed
    [diagnostics]  p_max, report_path
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """One or more configuration violations; carries all of them."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__(
            "invalid configuration:\n" + "\n".join(f"  - {v}" for v in violations)
        )


@dataclass(frozen=True)
class GridConfig:
    n1: int = 16
    n2: int = 16
    n3: int = 17


@dataclass(frozen=True)
class EosConfig:
    gamma: float = 2.0


@dataclass(frozen=True)
class DataConfig:
    eps: float = 0.01
    pert_amp: float = 0.0
    velocity_amp: float = 0.04


@dataclass(frozen=True)
class RunConfig:
    t_end: float = 0.1
    cfl_safety: float = 0.4
    dt_min: float = 1e-6
    renormalize: bool = False
    output_every: int = 10
    seed: int = 0


@dataclass(frozen=True)
class DiagnosticsConfig:
    p_max: int = 2
    report_path: str = "reports"


@dataclass(frozen=True)
class SimConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    eos: EosConfig = field(default_factory=EosConfig)
    data: DataConfig = field(default_factory=DataConfig)
    run: RunConfig = field(default_factory=RunConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)


_SECTIONS = {
    "grid": GridConfig,
    "eos": EosConfig,
    "data": DataConfig,
    "run": RunConfig,
    "diagnostics": DiagnosticsConfig,
}

_PARSERS = {int: int, float: float, str: str}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _coerce(section: str, key: str, text: str, target_type, violations):
    if target_type is bool:
        parser = _parse_bool
    else:
        parser = _PARSERS[target_type]
    try:
        return parser(text)
    except ValueError:
        violations.append(
            f"[{section}] {key}: expected {target_type.__name__}, got {text!r}"
        )
        return None


def _validate(cfg: SimConfig, violations: list[str]) -> None:
    g, e, d, r, diag = cfg.grid, cfg.eos, cfg.data, cfg.run, cfg.diagnostics
    if g.n1 < 8 or g.n2 < 8:
        violations.append(
            f"[grid] n1/n2: horizontal node counts must be >= 8 for the "
            f"5-point interior stencils, got n1={g.n1}, n2={g.n2}"
        )
    if g.n3 < 9:
        violations.append(
            f"[grid] n3: vertical node count must be >= 9 for the 5-point "
            f"one-sided stencils, got {g.n3}"
        )
    if e.gamma <= 1.0:
        violations.append(
            f"[eos] gamma: the adiabatic index must exceed 1 (the linear "
            f"law has no finite enthalpy normalization), got {e.gamma}"
        )
    if not 0.0 < d.eps < 1.0 / 3.0:
        violations.append(
            f"[data] eps: must lie in (0, 1/3), the admissible rest-mass "
            f"density bound, got {d.eps}"
        )
    if abs(d.pert_amp) >= 0.5:
        violations.append(
            f"[data] pert_amp: |pert_amp| must be below 1/2 to keep the "
            f"density profile positive, got {d.pert_amp}"
        )
    if d.velocity_amp < 0.0:
        violations.append(
            f"[data] velocity_amp: must be nonnegative, got {d.velocity_amp}"
        )
    if r.t_end < 0.0:
        violations.append(f"[run] t_end: must be nonnegative, got {r.t_end}")
    if not 0.0 < r.cfl_safety <= 1.0:
        violations.append(
            f"[run] cfl_safety: must lie in (0, 1], got {r.cfl_safety}"
        )
    if r.dt_min <= 0.0:
        violations.append(f"[run] dt_min: must be positive, got {r.dt_min}")
    if r.output_every < 1:
        violations.append(
            f"[run] output_every: must be a positive step count, got "
            f"{r.output_every}"
        )
    if not 0 <= diag.p_max <= 4:
        violations.append(
            f"[diagnostics] p_max: truncation order must lie in 0..4, got "
            f"{diag.p_max}"
        )


def parse_config(text: str) -> SimConfig:
    """Parse and validate configuration text.

    Collects every violation (unknown sections and keys, type errors, range
    errors) and raises a single ConfigError carrying the full list; an empty
    document yields the defaults.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    violations: list[str] = []
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError([f"unparseable configuration text: {err}"]) from err

    section_values: dict[str, dict] = {}
    for section in parser.sections():
        cls = _SECTIONS.get(section)
        if cls is None:
            violations.append(
                f"unknown section [{section}] (expected one of "
                f"{', '.join(sorted(_SECTIONS))})"
            )
            continue
        known = {f.name: f.type for f in fields(cls)}
        typed = {f.name: f for f in fields(cls)}
        values = {}
        for key, raw in parser.items(section):
            if key not in known:
                violations.append(
                    f"unknown key '{key}' in section [{section}] (expected "
                    f"one of {', '.join(sorted(known))})"
                )
                continue
            target_type = type(typed[key].default)
            value = _coerce(section, key, raw, target_type, violations)
            if value is not None:
                values[key] = value
        section_values[section] = values

    cfg = SimConfig(
        **{
            name: cls(**section_values.get(name, {}))
            for name, cls in _SECTIONS.items()
        }
    )
    _validate(cfg, violations)
    if violations:
        raise ConfigError(violations)
    return cfg


def load_config(path) -> SimConfig:
    """Read and parse a configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
