"""Run configuration: flat key = value text with section prefixes.

Unknown keys are rejected so typos cannot silently change a run.  The
``meta.`` section is reserved for manifest bookkeeping (versions, command)
and is accepted on re-read, which lets a written manifest be fed back in as
a config file to reproduce a run bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

__all__ = ["ConfigError", "RunConfig", "write_manifest"]


class ConfigError(ValueError):
    """Malformed configuration input."""


def _parse_int3(text: str) -> tuple[int, int, int]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3:
        raise ConfigError(f"expected 1 or 3 integers, got {text!r}")
    return tuple(int(p) for p in parts)


def _parse_float3(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3:
        raise ConfigError(f"expected 1 or 3 floats, got {text!r}")
    return tuple(float(p) for p in parts)


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def _parse_int_list(text: str) -> tuple[int, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    return tuple(int(p) for p in parts)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class RunConfig:
    """Fully resolved run parameters; one attribute per config key."""

    grid_n: tuple = (16, 16, 16)
    grid_box: tuple = (10.0, 11.5, 13.0)
    grid_alpha: float = 1.0
    model_potential: str = "harmonic:base=1,strength=1"
    model_nonlinearity: str = "log_quartic"
    solver_tol: float = 1e-6
    solver_seed: int = 1234
    solver_modes: int = 24
    solver_count: int = 3
    solver_max_restarts: int = 24
    solver_max_iters: int = 2000
    solver_separation: float = 1e-2
    solver_energy_gap: float = 1e-3
    solver_require_energy_gap: bool = False
    geometry_k: int = 6
    geometry_rays: int = 20
    geometry_rho: tuple = (0.3, 0.5, 0.8)
    geometry_samples: int = 300
    geometry_m_samples: int = 500
    geometry_beta_k: tuple = (5, 10, 20, 35)
    geometry_t_max: float = 60.0
    geometry_t_count: int = 40
    check_u_max: float = 50.0
    check_u_count: int = 101
    check_x_stride: int = 4
    check_ladder_start: float = 1e-2
    check_ladder_stop: float = 1e6
    check_ladder_count: int = 81
    check_divergence_factor: float = 1e3
    poisson_input: str = ""
    run_out: str = "out"
    run_format: str = "json"
    run_threads: int = 1
    run_oracle: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.run_format not in ("json", "csv"):
            raise ConfigError(f"run.format must be json or csv, got {self.run_format!r}")
        if self.run_threads < 1:
            raise ConfigError("run.threads must be >= 1")


_KEY_PARSERS = {
    "grid.n": ("grid_n", _parse_int3),
    "grid.box": ("grid_box", _parse_float3),
    "grid.alpha": ("grid_alpha", float),
    "model.potential": ("model_potential", str),
    "model.nonlinearity": ("model_nonlinearity", str),
    "solver.tol": ("solver_tol", float),
    "solver.seed": ("solver_seed", int),
    "solver.modes": ("solver_modes", int),
    "solver.count": ("solver_count", int),
    "solver.max_restarts": ("solver_max_restarts", int),
    "solver.max_iters": ("solver_max_iters", int),
    "solver.separation": ("solver_separation", float),
    "solver.energy_gap": ("solver_energy_gap", float),
    "solver.require_energy_gap": ("solver_require_energy_gap", _parse_bool),
    "geometry.k": ("geometry_k", int),
    "geometry.rays": ("geometry_rays", int),
    "geometry.rho": ("geometry_rho", _parse_float_list),
    "geometry.samples": ("geometry_samples", int),
    "geometry.m_samples": ("geometry_m_samples", int),
    "geometry.beta_k": ("geometry_beta_k", _parse_int_list),
    "geometry.t_max": ("geometry_t_max", float),
    "geometry.t_count": ("geometry_t_count", int),
    "check.u_max": ("check_u_max", float),
    "check.u_count": ("check_u_count", int),
    "check.x_stride": ("check_x_stride", int),
    "check.ladder_start": ("check_ladder_start", float),
    "check.ladder_stop": ("check_ladder_stop", float),
    "check.ladder_count": ("check_ladder_count", int),
    "check.divergence_factor": ("check_divergence_factor", float),
    "poisson.input": ("poisson_input", str),
    "run.out": ("run_out", str),
    "run.format": ("run_format", str),
    "run.threads": ("run_threads", int),
    "run.oracle": ("run_oracle", _parse_bool),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in _KEY_PARSERS.items()}


def parse_config_text(text: str) -> dict:
    """Parse 'key = value' lines; '#' starts a comment, blanks are skipped."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        raw[key] = value
    return raw


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Resolve a RunConfig from an optional file plus override pairs.

    Overrides use the same dotted keys as the file and win over it.
    Unknown non-meta keys raise ConfigError.
    """
    raw: dict = {}
    if path is not None:
        raw.update(parse_config_text(Path(path).read_text()))
    if overrides:
        raw.update({k: str(v) for k, v in overrides.items()})
    cfg = RunConfig()
    for key, value in raw.items():
        if key.startswith("meta."):
            cfg.meta[key[5:]] = value
            continue
        if key not in _KEY_PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        attr, parser = _KEY_PARSERS[key]
        try:
            setattr(cfg, attr, parser(value))
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc
    cfg.__post_init__()
    return cfg


def resolved_items(cfg: RunConfig) -> list[tuple[str, str]]:
    items = []
    for f in dc_fields(cfg):
        if f.name == "meta":
            continue
        items.append((_ATTR_TO_KEY[f.name], _fmt(getattr(cfg, f.name))))
    return items


def write_manifest(path, cfg: RunConfig, command: str) -> None:
    """Echo the resolved config plus versions; reproducible byte-for-byte."""
    import numpy
    import scipy

    from . import __version__

    lines = ["# fsptools run manifest"]
    lines.append(f"meta.command = {command}")
    lines.append(f"meta.fsptools_version = {__version__}")
    lines.append(f"meta.numpy_version = {numpy.__version__}")
    lines.append(f"meta.scipy_version = {scipy.__version__}")
    for key, value in resolved_items(cfg):
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")
