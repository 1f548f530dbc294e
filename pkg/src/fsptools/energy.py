"""Reduced energy functional, its gradient field, and algebraic identities.

J(u) = 1/2 * (seminorm + int V u^2) + (K/4) * int u^2 phi(u) - int F(x, u)
with phi(u) from the kernel convolution.  The strong-form gradient is

    g = (-Lap)^alpha u + V u + K phi(u) u - f(x, u),

and int g v equals the directional derivative of the discrete J exactly (the
discrete kernel is symmetric), which the finite-difference tests exploit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import Nonlinearity, Potential, critical_exponent
from .riesz import PoissonSolution, k_alpha, solve_poisson
from .spectral import (
    GridSpec,
    RealField,
    _hermitian_weights,
    _k_squared,
    _spectral_scale,
    frac_laplacian,
    inner_E,
    norm_E,
    require_admissible_potential,
    seminorm_dalpha,
    validate_alpha,
)

__all__ = [
    "RegimeWarning",
    "EnergyBreakdown",
    "GradientField",
    "energy",
    "gradient_field",
    "energy_and_gradient",
    "cerami_identity_check",
    "evenness_check",
    "Problem",
]


class RegimeWarning(UserWarning):
    """The variational hypotheses do not cover this parameter regime."""


def _warn_regime(alpha: float, nl: Nonlinearity) -> None:
    if alpha <= 0.75:
        warnings.warn(
            f"alpha = {alpha} is outside the embedding regime alpha > 3/4; "
            "proceeding in diagnostics mode",
            RegimeWarning,
            stacklevel=3,
        )
    elif not (4.0 < nl.p < critical_exponent(alpha)) and nl.name != "none":
        warnings.warn(
            f"growth exponent p = {nl.p} is outside (4, {critical_exponent(alpha):.4f}) "
            f"for alpha = {alpha}; proceeding in diagnostics mode",
            RegimeWarning,
            stacklevel=3,
        )


def _as_potential_field(V, grid: GridSpec) -> RealField:
    if isinstance(V, Potential):
        return V.evaluate(grid)
    if isinstance(V, RealField):
        if V.grid != grid:
            raise ValueError("potential field lives on a different grid")
        require_admissible_potential(V)
        return V
    raise TypeError(f"potential must be a Potential or RealField, got {type(V)!r}")


@dataclass(frozen=True)
class EnergyBreakdown:
    """The three terms of the reduced functional plus their signed total."""

    quadratic: float
    coupling: float
    nonlinear: float
    total: float

    def __post_init__(self):
        scale = 1.0 + abs(self.quadratic) + abs(self.coupling) + abs(self.nonlinear)
        if self.quadratic < -1e-12 * scale or self.coupling < -1e-12 * scale:
            raise ValueError("quadratic and coupling terms must be nonnegative")
        if abs(self.total - (self.quadratic + self.coupling - self.nonlinear)) > 1e-13 * scale:
            raise ValueError("total does not match quadratic + coupling - nonlinear")

    @classmethod
    def assemble(cls, quadratic: float, coupling: float, nonlinear: float) -> "EnergyBreakdown":
        return cls(
            quadratic=float(quadratic),
            coupling=float(coupling),
            nonlinear=float(nonlinear),
            total=float(quadratic + coupling - nonlinear),
        )

    def to_dict(self) -> dict:
        return {
            "quadratic": self.quadratic,
            "coupling": self.coupling,
            "nonlinear": self.nonlinear,
            "total": self.total,
        }


@dataclass(frozen=True, eq=False)
class GradientField:
    """Strong-form representation g of the derivative: J'(u)[v] = int g v."""

    g: RealField
    residual_l2: float
    residual_preconditioned: float


def _preconditioned_norm(g_values: np.ndarray, grid: GridSpec, alpha: float, vbar: float) -> float:
    """||((-Lap)^alpha + vbar)^(-1/2) g||_L2, a computable dual-norm proxy."""
    c = np.fft.rfftn(g_values) * _spectral_scale(grid)
    k2 = _k_squared(grid)
    mult = k2 if alpha == 1.0 else k2**alpha
    w = _hermitian_weights(grid)
    return float(np.sqrt(np.sum(w * (c.real**2 + c.imag**2) / (mult + vbar))))


def _energy_terms(u, v_field, nl, alpha, phi_values, coords):
    grid = u.grid
    cellvol = grid.cell_volume
    u2 = np.square(u.values)
    quadratic = 0.5 * (seminorm_dalpha(u, alpha) + float(np.sum(v_field.values * u2)) * cellvol)
    coupling = 0.25 * k_alpha(alpha) * float(np.sum(phi_values * u2)) * cellvol
    nonlinear = float(np.sum(nl.F(coords, u.values))) * cellvol
    return EnergyBreakdown.assemble(quadratic, coupling, nonlinear)


def _gradient_terms(u, v_field, nl, alpha, phi_values, coords, vbar):
    grid = u.grid
    g = (
        frac_laplacian(u, alpha).values
        + v_field.values * u.values
        + k_alpha(alpha) * phi_values * u.values
        - nl.f(coords, u.values)
    )
    res_l2 = float(np.sqrt(np.sum(g**2) * grid.cell_volume))
    res_pre = _preconditioned_norm(g, grid, alpha, vbar)
    return GradientField(RealField(grid, g), res_l2, res_pre)


def energy(u: RealField, V, nl: Nonlinearity, alpha: float | None = None, phi=None) -> EnergyBreakdown:
    """Evaluate the reduced functional term by term."""
    grid = u.grid
    a = grid.alpha if alpha is None else validate_alpha(alpha)
    _warn_regime(a, nl)
    v_field = _as_potential_field(V, grid)
    if phi is None:
        phi = solve_poisson(u, a)
    phi_values = phi.phi.values if isinstance(phi, PoissonSolution) else phi.values
    coords = grid.mesh(centered=True)
    return _energy_terms(u, v_field, nl, a, phi_values, coords)


def gradient_field(u: RealField, V, nl: Nonlinearity, alpha: float | None = None, phi=None) -> GradientField:
    """Strong-form gradient with L2 and preconditioned residual norms."""
    grid = u.grid
    a = grid.alpha if alpha is None else validate_alpha(alpha)
    _warn_regime(a, nl)
    v_field = _as_potential_field(V, grid)
    if phi is None:
        phi = solve_poisson(u, a)
    phi_values = phi.phi.values if isinstance(phi, PoissonSolution) else phi.values
    coords = grid.mesh(centered=True)
    return _gradient_terms(u, v_field, nl, a, phi_values, coords, float(v_field.values.mean()))


def energy_and_gradient(u: RealField, V, nl: Nonlinearity, alpha: float | None = None, phi=None):
    """Energy and gradient sharing one Poisson solve."""
    grid = u.grid
    a = grid.alpha if alpha is None else validate_alpha(alpha)
    v_field = _as_potential_field(V, grid)
    if phi is None:
        phi = solve_poisson(u, a)
    phi_values = phi.phi.values if isinstance(phi, PoissonSolution) else phi.values
    coords = grid.mesh(centered=True)
    e = _energy_terms(u, v_field, nl, a, phi_values, coords)
    g = _gradient_terms(u, v_field, nl, a, phi_values, coords, float(v_field.values.mean()))
    return e, g


def cerami_identity_check(u: RealField, V, nl: Nonlinearity, alpha: float | None = None) -> float:
    """Relative defect of J(u) - J'(u)[u]/4 == ||u||_E^2/4 + int G(x,u).

    The quartic coupling cancels exactly in the discretization, so the defect
    must sit at rounding level.
    """
    grid = u.grid
    a = grid.alpha if alpha is None else validate_alpha(alpha)
    v_field = _as_potential_field(V, grid)
    e, g = energy_and_gradient(u, v_field, nl, a)
    pairing = float(np.sum(g.g.values * u.values)) * grid.cell_volume
    lhs = e.total - 0.25 * pairing
    coords = grid.mesh(centered=True)
    rhs = 0.25 * inner_E(u, u, v_field, a) + float(np.sum(nl.G(coords, u.values))) * grid.cell_volume
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def evenness_check(u: RealField, V, nl: Nonlinearity, alpha: float | None = None) -> float:
    """Relative defect |J(u) - J(-u)| / (1 + |J(u)|) under odd f."""
    grid = u.grid
    a = grid.alpha if alpha is None else validate_alpha(alpha)
    v_field = _as_potential_field(V, grid)
    j_plus = energy(u, v_field, nl, a).total
    j_minus = energy(RealField(grid, -u.values), v_field, nl, a).total
    return abs(j_plus - j_minus) / (1.0 + abs(j_plus))


class Problem:
    """Assembled instance: grid + potential + nonlinearity + fractional order.

    Caches the evaluated potential, coordinates, and constants so repeated
    energy/gradient evaluations only pay for the Poisson solve.
    """

    def __init__(self, grid: GridSpec, potential, nonlinearity: Nonlinearity, alpha: float | None = None):
        self.grid = grid
        self.potential = potential
        self.nonlinearity = nonlinearity
        self.alpha = grid.alpha if alpha is None else validate_alpha(alpha)

    @cached_property
    def v_field(self) -> RealField:
        return _as_potential_field(self.potential, self.grid)

    @cached_property
    def coords(self):
        return self.grid.mesh(centered=True)

    @cached_property
    def k_alpha(self) -> float:
        return k_alpha(self.alpha)

    @cached_property
    def vbar(self) -> float:
        return float(self.v_field.values.mean())

    def field(self, values: np.ndarray) -> RealField:
        return RealField(self.grid, values)

    def inner_E(self, u: RealField, v: RealField) -> float:
        return inner_E(u, v, self.v_field, self.alpha)

    def norm_E(self, u: RealField) -> float:
        return norm_E(u, self.v_field, self.alpha)

    def solve_phi(self, u: RealField) -> PoissonSolution:
        return solve_poisson(u, self.alpha)

    def energy(self, u: RealField, phi=None) -> EnergyBreakdown:
        return energy(u, self.v_field, self.nonlinearity, self.alpha, phi=phi)

    def gradient(self, u: RealField, phi=None) -> GradientField:
        return gradient_field(u, self.v_field, self.nonlinearity, self.alpha, phi=phi)

    def energy_and_gradient(self, u: RealField, phi=None):
        return energy_and_gradient(u, self.v_field, self.nonlinearity, self.alpha, phi=phi)

    def describe(self) -> dict:
        pot = self.potential.describe() if isinstance(self.potential, Potential) else "raw field"
        return {
            "grid_n": list(self.grid.n),
            "grid_l": list(self.grid.l),
            "alpha": self.alpha,
            "potential": pot,
            "nonlinearity": self.nonlinearity.describe(),
        }
