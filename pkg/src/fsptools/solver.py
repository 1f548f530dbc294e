"""Multi-solution finder: Nehari projection plus deflated preconditioned descent.

Each restart draws a start from eigenmode combinations, E-orthogonalizes it
against already-found solution directions, projects onto the Nehari-type set
{t*u : d/dt J(t*u) = 0, t > 0} by 1-D root finding, and then descends along
the preconditioned gradient with re-projection after every step.  Iterates
stop when the preconditioned residual drops below tol * (1 + ||u||_E).

The found set is a desk-scale lower bound on the solution count, never a
claim about the full critical-value sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .eigen import EigenBasis
from .energy import EnergyBreakdown, Problem
from .riesz import coupling_integral, k_alpha
from .spectral import RealField, _k_squared, seminorm_dalpha

__all__ = [
    "SolutionRecord",
    "SolutionSet",
    "SolutionVerification",
    "nehari_scale",
    "find_solutions",
    "verify_solution",
]

NEHARI_T_MAX = 1e3


@dataclass(eq=False)
class SolutionRecord:
    u: RealField
    energy: EnergyBreakdown
    residual_l2: float
    residual_pre: float
    norm_E: float
    iterations: int
    start_id: str
    nehari_t: float
    partner_residual_pre: float

    def to_dict(self) -> dict:
        return {
            "energy": self.energy.to_dict(),
            "residual_l2": self.residual_l2,
            "residual_pre": self.residual_pre,
            "norm_E": self.norm_E,
            "iterations": self.iterations,
            "start_id": self.start_id,
            "nehari_t": self.nehari_t,
            "partner_residual_pre": self.partner_residual_pre,
        }


@dataclass(eq=False)
class SolutionSet:
    records: list
    distances: np.ndarray
    target: int
    tol: float
    seed: int
    shortfall: bool
    separation: float
    energy_gap: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "count": len(self.records),
            "target": self.target,
            "tol": self.tol,
            "seed": self.seed,
            "shortfall": self.shortfall,
            "separation": self.separation,
            "energy_gap": self.energy_gap,
            "records": [r.to_dict() for r in self.records],
            "pairwise_E_distances": self.distances.tolist(),
            "notes": list(self.notes),
            "truncation_note": "solution count is a lower bound at this resolution",
        }


def _precondition(values: np.ndarray, problem: Problem) -> np.ndarray:
    """Spectral application of ((-Lap)^alpha + mean V)^(-1)."""
    grid = problem.grid
    k2 = _k_squared(grid)
    mult = k2 if problem.alpha == 1.0 else k2**problem.alpha
    return np.fft.irfftn(np.fft.rfftn(values) / (mult + problem.vbar), s=grid.n, axes=(0, 1, 2))


def nehari_scale(problem: Problem, w: RealField, phi_w=None):
    """Positive root t of psi(t) = t ||w||^2 + t^3 K int phi(w) w^2 - int f(x,tw) w.

    psi is the fiber derivative d/dt J(t w); bracketed bisection over
    (0, NEHARI_T_MAX].  Returns None when no sign change exists in range.
    """
    if phi_w is None:
        phi_w = problem.solve_phi(w)
    a = problem.inner_E(w, w)
    b = problem.k_alpha * coupling_integral(w, phi_w)
    nl = problem.nonlinearity
    coords = problem.coords
    cellvol = problem.grid.cell_volume
    w_vals = w.values

    def psi(t):
        force = float(np.sum(nl.f(coords, t * w_vals) * w_vals)) * cellvol
        return t * a + t**3 * b - force

    ts = np.geomspace(1e-4, NEHARI_T_MAX, 57)
    prev_t = None
    prev_v = None
    for t in ts:
        v = psi(t)
        if prev_v is not None and prev_v > 0.0 and v <= 0.0:
            root = brentq(psi, prev_t, t, xtol=1e-12, rtol=1e-15, maxiter=200)
            return float(root)
        prev_t, prev_v = t, v
    return None


def _nehari_rescale(problem: Problem, w: RealField, phi_w, t_hint: float | None):
    """Warm-started projection: bracket around the previous fiber root."""
    if t_hint is None:
        return nehari_scale(problem, w, phi_w)
    a = problem.inner_E(w, w)
    b = problem.k_alpha * coupling_integral(w, phi_w)
    nl = problem.nonlinearity
    coords = problem.coords
    cellvol = problem.grid.cell_volume
    w_vals = w.values

    def psi(t):
        force = float(np.sum(nl.f(coords, t * w_vals) * w_vals)) * cellvol
        return t * a + t**3 * b - force

    lo = hi = t_hint
    v = psi(t_hint)
    for _ in range(60):
        if v > 0.0:
            lo = hi
            hi *= 1.6
            if hi > NEHARI_T_MAX:
                return nehari_scale(problem, w, phi_w)
            v_new = psi(hi)
            if v_new <= 0.0:
                return float(brentq(psi, lo, hi, xtol=1e-12, rtol=1e-15, maxiter=200))
            v = v_new
        else:
            hi = lo
            lo /= 1.6
            if lo < 1e-8:
                return None
            v_new = psi(lo)
            if v_new > 0.0:
                return float(brentq(psi, lo, hi, xtol=1e-12, rtol=1e-15, maxiter=200))
            v = v_new
    return None


def _scaled_solution(problem: Problem, w_values: np.ndarray, t: float, phi_w):
    """Evaluate at u = t*w reusing phi(w): phi(t*w) = t^2 phi(w)."""
    u = problem.field(t * w_values)
    phi = problem.field(t * t * phi_w.phi.values)
    e, g = problem.energy_and_gradient(u, phi=phi)
    return u, phi, e, g


def _descend(problem: Problem, w0_values: np.ndarray, tol: float, max_iters: int, start_id: str):
    """Run one Nehari-constrained descent; returns (record | None, note)."""
    w = problem.field(w0_values)
    nrm = problem.norm_E(w)
    if nrm == 0.0:
        return None, f"{start_id}: zero start"
    w = problem.field(w.values / nrm)
    phi_w = problem.solve_phi(w)
    t = nehari_scale(problem, w, phi_w)
    if t is None:
        return None, f"{start_id}: no Nehari root in (0, {NEHARI_T_MAX}]"
    u, phi, e, g = _scaled_solution(problem, w.values, t, phi_w)
    eta = 1.0
    iters = 0
    for iters in range(1, max_iters + 1):
        norm_u = problem.norm_E(u)
        if g.residual_preconditioned <= tol * (1.0 + norm_u):
            rec = SolutionRecord(
                u=u,
                energy=e,
                residual_l2=g.residual_l2,
                residual_pre=g.residual_preconditioned,
                norm_E=norm_u,
                iterations=iters - 1,
                start_id=start_id,
                nehari_t=t,
                partner_residual_pre=problem.gradient(
                    problem.field(-u.values), phi=phi
                ).residual_preconditioned,
            )
            return rec, f"{start_id}: converged in {iters - 1} iterations"
        direction = -_precondition(g.g.values, problem)
        accepted = False
        for _ in range(30):
            trial = u.values + eta * direction
            w_trial = problem.field(trial)
            phi_trial = problem.solve_phi(w_trial)
            t_new = _nehari_rescale(problem, w_trial, phi_trial, 1.0)
            if t_new is None:
                eta *= 0.5
                continue
            u_new, phi_new, e_new, g_new = _scaled_solution(
                problem, w_trial.values, t_new, phi_trial
            )
            if e_new.total <= e.total + 1e-13 * (1.0 + abs(e.total)):
                u, phi, e, g, t = u_new, phi_new, e_new, g_new, t_new
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            return None, f"{start_id}: stagnated at residual {g.residual_preconditioned:.3e}"
        eta = min(eta * 1.3, 8.0)
    return None, f"{start_id}: iteration budget exhausted at residual {g.residual_preconditioned:.3e}"


def _start_coefficients(k: int, max_restarts: int, seed: int):
    """Deterministic schedule of start directions in coefficient space."""
    rng = np.random.default_rng(seed)
    singles = min(k, 6)
    starts = []
    for j in range(singles):
        c = np.zeros(k)
        c[j] = 1.0
        starts.append((f"mode{j}", c))
    for i in range(min(k, 4)):
        for j in range(i + 1, min(k, 4)):
            for s in (1.0, -1.0):
                c = np.zeros(k)
                c[i] = 1.0
                c[j] = s
                starts.append((f"pair{i}{'p' if s > 0 else 'm'}{j}", c))
    idx = 0
    while len(starts) < max_restarts:
        c = rng.standard_normal(k)
        starts.append((f"rand{idx}", c))
        idx += 1
    return starts[:max_restarts]


def _is_duplicate(problem, rec, found, separation, energy_gap, require_energy_gap):
    for other in found:
        dist = problem.norm_E(problem.field(rec.u.values - other.u.values))
        dist_mirror = problem.norm_E(problem.field(rec.u.values + other.u.values))
        dist = min(dist, dist_mirror)
        gap = abs(rec.energy.total - other.energy.total)
        close = dist <= separation * max(rec.norm_E, other.norm_E)
        degenerate = gap <= energy_gap
        if close and degenerate:
            return True
        if require_energy_gap and degenerate:
            return True
    return False


def find_solutions(
    problem: Problem,
    basis: EigenBasis,
    count_target: int = 3,
    tol: float = 1e-6,
    seed: int = 0,
    max_restarts: int = 24,
    max_iters: int = 2000,
    separation: float = 1e-2,
    energy_gap: float = 1e-3,
    require_energy_gap: bool = False,
    nontrivial_norm: float = 1e-3,
) -> SolutionSet:
    """Collect distinct nontrivial critical points by deflated restarts.

    A solution and its odd partner -u count once; distinctness is E-distance
    beyond ``separation`` (mod sign) or an energy gap beyond ``energy_gap``.
    Falling short of ``count_target`` sets the shortfall flag instead of
    raising.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    found: list[SolutionRecord] = []
    notes: list[str] = []
    n_modes = min(basis.k, 12)
    for start_id, c in _start_coefficients(n_modes, max_restarts, seed):
        if len(found) >= count_target:
            break
        coeffs = np.zeros(basis.k)
        coeffs[:n_modes] = c
        w0 = basis.combine(coeffs).reshape(basis.grid.shape)
        # deflation: strip the span of found solution directions
        u0 = problem.field(w0)
        for other in found:
            direction = problem.field(other.u.values / other.norm_E)
            proj = problem.inner_E(u0, direction)
            u0 = problem.field(u0.values - proj * direction.values)
        if problem.norm_E(u0) < 1e-8:
            notes.append(f"{start_id}: fully deflated, skipped")
            continue
        rec, note = _descend(problem, u0.values, tol, max_iters, start_id)
        notes.append(note)
        if rec is None:
            continue
        if rec.norm_E <= nontrivial_norm:
            notes.append(f"{start_id}: converged to trivial solution, discarded")
            continue
        if _is_duplicate(problem, rec, found, separation, energy_gap, require_energy_gap):
            notes.append(f"{start_id}: duplicate of an existing solution, discarded")
            continue
        found.append(rec)
    found.sort(key=lambda r: r.energy.total)
    n = len(found)
    distances = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = problem.norm_E(problem.field(found[i].u.values - found[j].u.values))
            distances[i, j] = distances[j, i] = d
    return SolutionSet(
        records=found,
        distances=distances,
        target=count_target,
        tol=tol,
        seed=seed,
        shortfall=n < count_target,
        separation=separation,
        energy_gap=energy_gap,
        notes=notes,
    )


@dataclass(frozen=True)
class SolutionVerification:
    """Dual-route residual diagnostics for a candidate critical point."""

    weak_form_max: float
    residual_l2: float
    residual_pre: float
    poisson_consistency: float
    norm_E: float
    test_fields: int

    def to_dict(self) -> dict:
        return {
            "weak_form_max": self.weak_form_max,
            "residual_l2": self.residual_l2,
            "residual_pre": self.residual_pre,
            "poisson_consistency": self.poisson_consistency,
            "norm_E": self.norm_E,
            "test_fields": self.test_fields,
        }


def verify_solution(
    problem: Problem,
    u: RealField,
    n_test_fields: int = 50,
    seed: int = 0,
) -> SolutionVerification:
    """Check both critical-point characterizations.

    Weak form: J'(u)[v] assembled from the four-term pairing (independent of
    the strong-form residual field) against random E-unit test fields.
    Strong form: residual norms of the gradient field.  Also reports the
    kernel-vs-multiplier consistency of the recovered phi(u).
    """
    grid = problem.grid
    rng = np.random.default_rng(seed)
    phi = problem.solve_phi(u)
    nl = problem.nonlinearity
    cellvol = grid.cell_volume
    g = problem.gradient(u, phi=phi)
    norm_u = problem.norm_E(u)
    weak_max = 0.0
    f_u = nl.f(problem.coords, u.values)
    # first test direction: the preconditioned gradient, a sharp witness for
    # the dual norm; the rest are random fields
    directions = [_precondition(g.g.values, problem)]
    directions += [rng.standard_normal(grid.shape) for _ in range(max(0, n_test_fields - 1))]
    for v_vals in directions:
        v = problem.field(v_vals)
        v_norm = problem.norm_E(v)
        if v_norm == 0.0:
            continue
        pairing = (
            problem.inner_E(u, v)
            + problem.k_alpha
            * float(np.sum(phi.phi.values * u.values * v_vals))
            * cellvol
            - float(np.sum(f_u * v_vals)) * cellvol
        )
        weak_max = max(weak_max, abs(pairing) / v_norm)
    if norm_u == 0.0:
        consistency = 0.0
    else:
        sem = seminorm_dalpha(phi.phi, problem.alpha)
        cpl = k_alpha(problem.alpha) * coupling_integral(u, phi)
        consistency = abs(sem * phi.calibration / cpl - 1.0) if cpl > 0 else 0.0
    return SolutionVerification(
        weak_form_max=float(weak_max),
        residual_l2=g.residual_l2,
        residual_pre=g.residual_preconditioned,
        poisson_consistency=float(consistency),
        norm_E=float(norm_u),
        test_fields=n_test_fields,
    )
