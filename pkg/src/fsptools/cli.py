"""Command-line front end: poisson, check, geometry, and solve runs.

Exit codes: 0 success, 1 check/target failure, 2 I/O or file-format error,
3 validation/configuration error.  Every command writes a manifest with the
resolved configuration; re-running a manifest reproduces all numeric outputs
bit-exactly at a fixed thread count.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, write_manifest
from .eigen import EigenConvergenceError, schrodinger_eigenbasis
from .energy import Problem
from .fieldio import FieldFormatError, read_field, write_field
from .geometry import (
    GeometryReport,
    SelectionError,
    beta_k_estimate,
    coercivity_scan,
    ring_check,
    select_m,
)
from .model import SamplingPlan, check_hypotheses, make_nonlinearity, make_potential
from .riesz import riesz_potential_direct, solve_poisson, DIRECT_SUM_MAX_POINTS
from .solver import find_solutions, verify_solution
from .spectral import GridSpec

__all__ = ["main", "entry"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_IO = 2
EXIT_VALIDATION = 3


def _parse_spec_string(spec: str):
    """Split 'name:k=v,k=v' into (name, params) with numeric coercion."""
    if ":" not in spec:
        return spec, {}
    name, _, tail = spec.partition(":")
    params = {}
    for item in tail.split(","):
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"malformed parameter {item!r} in {spec!r}")
        key, _, val = item.partition("=")
        try:
            params[key.strip()] = float(val)
        except ValueError as exc:
            raise ConfigError(f"non-numeric parameter {item!r} in {spec!r}") from exc
    return name.strip(), params


def _grid_from_config(cfg: RunConfig) -> GridSpec:
    return GridSpec(cfg.grid_n, cfg.grid_box, cfg.grid_alpha)


def _model_from_config(cfg: RunConfig):
    pot_name, pot_params = _parse_spec_string(cfg.model_potential)
    nl_name, nl_params = _parse_spec_string(cfg.model_nonlinearity)
    return make_potential(pot_name, **pot_params), make_nonlinearity(nl_name, **nl_params)


def _json_dump(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _prepare_out(cfg: RunConfig, command: str) -> Path:
    out = Path(cfg.run_out)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out / "manifest.txt", cfg, command)
    return out


def cmd_poisson(cfg: RunConfig) -> int:
    if not cfg.poisson_input:
        raise ConfigError("poisson needs an input field (positional argument or poisson.input)")
    u = read_field(cfg.poisson_input)
    out = _prepare_out(cfg, "poisson")
    solution = solve_poisson(u)
    report = solution.metadata()
    report["input"] = cfg.poisson_input
    report["grid_n"] = list(u.grid.n)
    report["grid_l"] = list(u.grid.l)
    if cfg.run_oracle:
        if u.grid.num_points > DIRECT_SUM_MAX_POINTS:
            raise ConfigError(
                f"--oracle needs a grid with at most {DIRECT_SUM_MAX_POINTS} points"
            )
        oracle = riesz_potential_direct(u)
        scale = float(np.max(np.abs(oracle.phi.values)))
        defect = float(np.max(np.abs(solution.phi.values - oracle.phi.values)))
        report["oracle_max_abs_defect"] = defect
        report["oracle_max_rel_defect"] = defect / scale if scale > 0 else 0.0
    write_field(out / "phi.fld", solution.phi)
    _json_dump(out / "poisson_report.json", report)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    grid = _grid_from_config(cfg)
    potential, nl = _model_from_config(cfg)
    plan = SamplingPlan(
        u_max=cfg.check_u_max,
        u_count=cfg.check_u_count,
        x_stride=cfg.check_x_stride,
        seed=cfg.solver_seed,
        ladder_start=cfg.check_ladder_start,
        ladder_stop=cfg.check_ladder_stop,
        ladder_count=cfg.check_ladder_count,
        divergence_factor=cfg.check_divergence_factor,
    )
    report = check_hypotheses(nl, potential, grid, plan)
    out = _prepare_out(cfg, "check")
    _json_dump(out / "hypothesis_report.json", report.to_dict())
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_geometry(cfg: RunConfig) -> int:
    grid = _grid_from_config(cfg)
    potential, nl = _model_from_config(cfg)
    if cfg.solver_modes <= cfg.geometry_k:
        raise ConfigError(
            f"geometry.k = {cfg.geometry_k} needs solver.modes > k, got {cfg.solver_modes}"
        )
    if any(k >= cfg.solver_modes for k in cfg.geometry_beta_k):
        raise ConfigError("geometry.beta_k entries must be below solver.modes")
    problem = Problem(grid, potential, nl)
    basis = schrodinger_eigenbasis(
        grid, problem.v_field, grid.alpha, k=cfg.solver_modes, seed=cfg.solver_seed
    )
    report = GeometryReport()
    report.notes["basis_k"] = basis.k
    report.notes["truncation"] = "tail spans truncated to the computed basis"
    failed = False

    try:
        selection = select_m(
            basis, nl, problem, samples=cfg.geometry_m_samples, seed=cfg.solver_seed
        )
        report.selection = selection
        m = selection.m
    except SelectionError as exc:
        report.notes["selection_error"] = str(exc)
        failed = True
        m = 1

    for rho in cfg.geometry_rho:
        entry = ring_check(
            problem, basis, m, rho, samples=cfg.geometry_samples, seed=cfg.solver_seed
        )
        report.ring.append(entry)
        failed = failed or not entry.passed

    t_grid = np.geomspace(0.25, cfg.geometry_t_max, cfg.geometry_t_count)
    rays = coercivity_scan(
        problem, basis, cfg.geometry_k, rays=cfg.geometry_rays, t_grid=t_grid,
        seed=cfg.solver_seed,
    )
    report.coercivity = rays
    failed = failed or any(r.r_negative is None or not r.decreasing_tail for r in rays)

    for k in cfg.geometry_beta_k:
        report.beta.append(
            beta_k_estimate(basis, k, 2.0, problem, trials=200, seed=cfg.solver_seed)
        )

    out = _prepare_out(cfg, "geometry")
    _json_dump(out / "geometry_summary.json", report.to_dict())
    _write_csv(
        out / "coercivity_rays.csv",
        ["index", "k", "r_negative", "j_end", "decreasing_tail"],
        [
            [r.index, r.k, "" if r.r_negative is None else repr(r.r_negative),
             repr(r.j_end), r.decreasing_tail]
            for r in rays
        ],
    )
    _write_csv(
        out / "ring_checks.csv",
        ["rho", "delta", "p", "m", "samples", "min_j", "passed", "near_binding"],
        [
            [repr(r.rho), repr(r.delta), repr(r.p), r.m, r.samples, repr(r.min_j),
             r.passed, r.near_binding]
            for r in report.ring
        ],
    )
    _write_csv(
        out / "beta_table.csv",
        ["k", "r", "estimate", "trials"],
        [[b.k, repr(b.r), repr(b.estimate), b.trials] for b in report.beta],
    )
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    grid = _grid_from_config(cfg)
    potential, nl = _model_from_config(cfg)
    problem = Problem(grid, potential, nl)
    basis = schrodinger_eigenbasis(
        grid, problem.v_field, grid.alpha, k=cfg.solver_modes, seed=cfg.solver_seed
    )
    solutions = find_solutions(
        problem,
        basis,
        count_target=cfg.solver_count,
        tol=cfg.solver_tol,
        seed=cfg.solver_seed,
        max_restarts=cfg.solver_max_restarts,
        max_iters=cfg.solver_max_iters,
        separation=cfg.solver_separation,
        energy_gap=cfg.solver_energy_gap,
        require_energy_gap=cfg.solver_require_energy_gap,
    )
    out = _prepare_out(cfg, "solve")
    sol_dir = out / "solutions"
    sol_dir.mkdir(exist_ok=True)
    payload = solutions.to_dict()
    payload["verification"] = []
    for i, rec in enumerate(solutions.records):
        write_field(sol_dir / f"solution_{i:03d}.fld", rec.u)
        verification = verify_solution(problem, rec.u, seed=cfg.solver_seed)
        payload["verification"].append(verification.to_dict())
    _json_dump(out / "solution_set.json", payload)
    return EXIT_CHECK_FAILED if solutions.shortfall else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsptools",
        description="Pseudospectral toolkit for a fractional Schrodinger-Poisson system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("poisson", "solve the nonlocal field equation for an input FLD1 field"),
        ("check", "certify the model hypotheses numerically"),
        ("geometry", "run the subspace geometry checks"),
        ("solve", "find multiple distinct critical points"),
    ]:
        p = sub.add_parser(name, help=helptext)
        if name == "poisson":
            p.add_argument("input", nargs="?", default=None, help="input FLD1 field file")
        p.add_argument("--config", default=None, help="config file (key = value lines)")
        p.add_argument("--grid", default=None, help="points per axis, e.g. 16 or 16,16,16")
        p.add_argument("--box", default=None, help="box side lengths")
        p.add_argument("--alpha", default=None, help="fractional order in (0, 1]")
        p.add_argument("--potential", default=None, help="potential spec NAME[:k=v,...]")
        p.add_argument("--nonlinearity", default=None, help="nonlinearity spec NAME[:k=v,...]")
        p.add_argument("--tol", default=None, help="solver residual tolerance")
        p.add_argument("--seed", default=None, help="seed for all randomized sweeps")
        p.add_argument("--threads", default=None, help="thread count recorded in the manifest")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", default=None, choices=["json", "csv"], help="report format")
        p.add_argument("--modes", default=None, help="eigenbasis size K")
        p.add_argument("--count", default=None, help="solution count target")
        p.add_argument("--oracle", action="store_true", help="run the small-grid cross-check")
    return parser


_FLAG_TO_KEY = {
    "grid": "grid.n",
    "box": "grid.box",
    "alpha": "grid.alpha",
    "potential": "model.potential",
    "nonlinearity": "model.nonlinearity",
    "tol": "solver.tol",
    "seed": "solver.seed",
    "threads": "run.threads",
    "out": "run.out",
    "format": "run.format",
    "modes": "solver.modes",
    "count": "solver.count",
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {}
    for flag, key in _FLAG_TO_KEY.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if args.oracle:
        overrides["run.oracle"] = "true"
    if args.command == "poisson" and args.input is not None:
        overrides["poisson.input"] = args.input
    handler = {
        "poisson": cmd_poisson,
        "check": cmd_check,
        "geometry": cmd_geometry,
        "solve": cmd_solve,
    }[args.command]
    try:
        cfg = load_config(args.config, overrides)
        return handler(cfg)
    except (FieldFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, EigenConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    sys.exit(main())
