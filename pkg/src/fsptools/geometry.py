"""Numerical verification of the fountain geometry on eigenmode subspaces.

All checks run on the truncated decomposition supplied by an EigenBasis:
Y_k = span{e_1..e_k} and the tail Z_k = span{e_{k+1}..e_K}.  Sampling the
tail of a K-mode basis under-represents the true infinite tail; every report
carries K so that bias direction stays visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import EigenBasis
from .energy import Problem
from .spectral import RealField, lp_norm

__all__ = [
    "CoercivityRay",
    "RingCheckResult",
    "ModeSelection",
    "BetaEstimate",
    "GeometryReport",
    "SelectionError",
    "coercivity_scan",
    "select_m",
    "beta_k_estimate",
    "ring_check",
]


@dataclass(frozen=True)
class CoercivityRay:
    """Energy trace along one random direction in Y_k."""

    index: int
    k: int
    r_negative: float | None
    j_end: float
    decreasing_tail: bool
    t_values: tuple
    j_values: tuple

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "k": self.k,
            "r_negative": self.r_negative,
            "j_end": self.j_end,
            "decreasing_tail": self.decreasing_tail,
            "t_values": list(self.t_values),
            "j_values": list(self.j_values),
        }


@dataclass(frozen=True)
class RingCheckResult:
    """Sampled minimum of J on the sphere of radius rho inside the tail span."""

    rho: float
    delta: float
    p: float
    m: int
    samples: int
    min_j: float
    passed: bool
    near_binding: bool

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "delta": self.delta,
            "p": self.p,
            "m": self.m,
            "samples": self.samples,
            "min_j": self.min_j,
            "passed": self.passed,
            "near_binding": self.near_binding,
        }


@dataclass(frozen=True)
class ModeSelection:
    """Smallest tail index m whose sampled norms satisfy both inequalities."""

    m: int
    sup_l2_sq: float
    sup_lp_p: float
    bound_l2_sq: float
    bound_lp_p: float
    samples: int
    basis_k: int

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "sup_l2_sq": self.sup_l2_sq,
            "sup_lp_p": self.sup_lp_p,
            "bound_l2_sq": self.bound_l2_sq,
            "bound_lp_p": self.bound_lp_p,
            "samples": self.samples,
            "basis_k": self.basis_k,
        }


@dataclass(frozen=True)
class BetaEstimate:
    """Lower estimate of sup ||u||_r over E-unit vectors of the tail span."""

    k: int
    r: float
    estimate: float
    trials: int
    ascent_steps: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "estimate": self.estimate,
            "trials": self.trials,
            "ascent_steps": self.ascent_steps,
        }


@dataclass
class GeometryReport:
    coercivity: list = field(default_factory=list)
    ring: list = field(default_factory=list)
    selection: ModeSelection | None = None
    beta: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "coercivity": [r.to_dict() for r in self.coercivity],
            "ring": [r.to_dict() for r in self.ring],
            "selection": None if self.selection is None else self.selection.to_dict(),
            "beta": [r.to_dict() for r in self.beta],
            "notes": self.notes,
        }


class SelectionError(Exception):
    """No admissible tail index within the truncated basis."""

    def __init__(self, message: str, best: dict):
        super().__init__(message)
        self.best = best


def _unit_field(problem: Problem, values: np.ndarray) -> tuple[RealField, float]:
    u = problem.field(values)
    nrm = problem.norm_E(u)
    return problem.field(values / nrm), nrm


def coercivity_scan(
    problem: Problem,
    basis: EigenBasis,
    k: int,
    rays: int = 20,
    t_grid: np.ndarray | None = None,
    seed: int = 0,
) -> list[CoercivityRay]:
    """Scan J(t*w) along random unit rays of Y_k.

    Homogeneity splits the scan: per ray one Poisson solve gives the t^2 and
    t^4 coefficients exactly, and only the nonlinear term is re-evaluated for
    each t.  Records the smallest sampled radius beyond which J stays <= 0 and
    whether the sampled tail is strictly decreasing; rays without a sign
    change report r_negative = None (inconclusive) with the full trace.
    """
    if not 1 <= k <= basis.k:
        raise ValueError(f"need 1 <= k <= K = {basis.k}, got k = {k}")
    if t_grid is None:
        t_grid = np.geomspace(0.25, 60.0, 40)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    rng = np.random.default_rng(seed)
    nl = problem.nonlinearity
    cellvol = problem.grid.cell_volume
    out = []
    for i in range(rays):
        c = rng.standard_normal(k)
        c /= np.linalg.norm(c)
        coeffs = np.zeros(basis.k)
        coeffs[:k] = c
        w, _ = _unit_field(problem, basis.combine(coeffs))
        quad = 0.5 * problem.inner_E(w, w)
        phi_w = problem.solve_phi(w)
        cpl = 0.25 * problem.k_alpha * float(
            np.sum(phi_w.phi.values * np.square(w.values)) * cellvol
        )
        j_vals = np.array(
            [
                quad * t**2
                + cpl * t**4
                - float(np.sum(nl.F(problem.coords, t * w.values))) * cellvol
                for t in t_grid
            ]
        )
        nonpos = j_vals <= 0.0
        r_neg = None
        decreasing = False
        if nonpos.any():
            # first index from which J stays nonpositive through t_max
            idx = len(j_vals)
            for j in range(len(j_vals) - 1, -1, -1):
                if nonpos[j]:
                    idx = j
                else:
                    break
            if idx < len(j_vals):
                r_neg = float(t_grid[idx])
                tail = j_vals[idx:]
                decreasing = bool(np.all(np.diff(tail) < 0.0)) if tail.size > 1 else True
        out.append(
            CoercivityRay(
                index=i,
                k=k,
                r_negative=r_neg,
                j_end=float(j_vals[-1]),
                decreasing_tail=decreasing,
                t_values=tuple(float(t) for t in t_grid),
                j_values=tuple(float(v) for v in j_vals),
            )
        )
    return out


def select_m(
    basis: EigenBasis,
    nl,
    problem: Problem,
    samples: int = 500,
    seed: int = 0,
) -> ModeSelection:
    """Smallest m with ||u||_2^2 <= 1/(2 c1) and ||u||_p^p <= p/(4 c2) sampled
    over E-unit vectors of the truncated tail Z_m."""
    if nl.c1 < 0 or nl.c2 < 0:
        raise ValueError("growth constants must be nonnegative")
    bound_l2 = np.inf if nl.c1 == 0 else 1.0 / (2.0 * nl.c1)
    bound_lp = np.inf if nl.c2 == 0 else nl.p / (4.0 * nl.c2)
    rng = np.random.default_rng(seed)
    best = {"m": None, "sup_l2_sq": np.inf, "sup_lp_p": np.inf}
    for m in range(1, basis.k):
        coeffs = basis.tail_sample(m, rng, samples)
        fields = basis.combine(coeffs)  # (samples, N)
        sup2 = 0.0
        supp = 0.0
        for row in fields:
            u, nrm = _unit_field(problem, row.reshape(basis.grid.shape))
            sup2 = max(sup2, lp_norm(u, 2.0) ** 2)
            supp = max(supp, lp_norm(u, nl.p) ** nl.p)
        if sup2 < best["sup_l2_sq"]:
            best = {"m": m, "sup_l2_sq": sup2, "sup_lp_p": supp}
        if sup2 <= bound_l2 and supp <= bound_lp:
            return ModeSelection(
                m=m,
                sup_l2_sq=float(sup2),
                sup_lp_p=float(supp),
                bound_l2_sq=float(bound_l2),
                bound_lp_p=float(bound_lp),
                samples=samples,
                basis_k=basis.k,
            )
    raise SelectionError(
        f"no tail index m <= {basis.k - 1} satisfies the sampled inequalities",
        best=best,
    )


def beta_k_estimate(
    basis: EigenBasis,
    k: int,
    r: float,
    problem: Problem,
    trials: int = 200,
    ascent_steps: int = 10,
    seed: int = 0,
) -> BetaEstimate:
    """Maximize ||u||_r over sampled E-unit tail vectors, refined by projected
    gradient ascent in coefficient space."""
    if r < 2.0:
        raise ValueError(f"Lebesgue exponent must be >= 2, got {r}")
    if not 0 < k < basis.k:
        raise ValueError(f"need 0 < k < K = {basis.k}")
    rng = np.random.default_rng(seed)
    coeffs = basis.tail_sample(k, rng, trials)
    norms = np.empty(trials)
    for i, row in enumerate(coeffs):
        u, nrm = _unit_field(problem, basis.combine(row).reshape(basis.grid.shape))
        norms[i] = lp_norm(u, r)
        coeffs[i] = row / nrm
    best = float(norms.max())
    cellvol = basis.grid.cell_volume
    # refine the best few candidates by sphere-projected ascent
    for idx in np.argsort(norms)[-3:]:
        c = coeffs[idx].copy()
        val = norms[idx]
        step = 0.5
        for _ in range(ascent_steps):
            u_vals = basis.combine(c).reshape(basis.grid.shape)
            u = problem.field(u_vals)
            cur = lp_norm(u, r)
            grad_field = np.abs(u_vals) ** (r - 1.0) * np.sign(u_vals) * cur ** (1.0 - r)
            grad_c = basis.vectors @ grad_field.ravel() * cellvol
            grad_c[:k] = 0.0
            cand = c + step * grad_c
            u_cand, nrm = _unit_field(problem, basis.combine(cand).reshape(basis.grid.shape))
            cand /= nrm
            new = lp_norm(u_cand, r)
            if new > cur:
                c, val = cand, new
                step *= 1.5
            else:
                step *= 0.5
        best = max(best, float(val))
    return BetaEstimate(k=k, r=float(r), estimate=best, trials=trials, ascent_steps=ascent_steps)


def ring_check(
    problem: Problem,
    basis: EigenBasis,
    m: int,
    rho: float,
    samples: int = 500,
    seed: int = 0,
) -> RingCheckResult:
    """Verify the sampled minimum of J on the radius-rho sphere of Z_m against
    delta = (rho^2 - rho^p)/4."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"ring radius must satisfy 0 < rho < 1, got {rho}")
    p = problem.nonlinearity.p
    delta = 0.25 * (rho**2 - rho**p)
    rng = np.random.default_rng(seed)
    coeffs = basis.tail_sample(m, rng, samples)
    min_j = np.inf
    for row in coeffs:
        w, _ = _unit_field(problem, basis.combine(row).reshape(basis.grid.shape))
        u = problem.field(rho * w.values)
        min_j = min(min_j, problem.energy(u).total)
    passed = bool(min_j >= delta)
    near_binding = bool(passed and (min_j - delta) < 0.1 * delta)
    return RingCheckResult(
        rho=float(rho),
        delta=float(delta),
        p=float(p),
        m=int(m),
        samples=int(samples),
        min_j=float(min_j),
        passed=passed,
        near_binding=near_binding,
    )
