"""Potentials, nonlinearities, and numerical certification of the standing
hypotheses on them.

A nonlinearity is the triple (f, F, G) with G = f*u/4 - F, together with the
growth parameters (p, c1, c2), the lower-bound data (a0, weight g), and an
optional explicit primitive F.  Coordinates handed to x-dependent terms are
always relative to the box center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectral import GridSpec, RealField

__all__ = [
    "Potential",
    "harmonic_potential",
    "constant_potential",
    "tabulated_potential",
    "Nonlinearity",
    "builtin_log_quartic",
    "builtin_exp_weighted_power",
    "counterexample_cubic",
    "counterexample_linear",
    "zero_nonlinearity",
    "NONLINEARITIES",
    "POTENTIALS",
    "make_nonlinearity",
    "make_potential",
    "SamplingPlan",
    "Witness",
    "CheckResult",
    "HypothesisReport",
    "check_hypotheses",
    "primitive_by_quadrature",
    "QuadratureError",
    "critical_exponent",
]


def critical_exponent(alpha: float) -> float:
    """Upper Lebesgue exponent 6/(3 - 2*alpha) of the embedding range."""
    return 6.0 / (3.0 - 2.0 * float(alpha))


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Confining potential with a strictly positive lower bound.

    ``constant_plus_radial`` kinds evaluate base + strength*|x - center|^exponent
    on any grid; ``user_tabulated`` wraps a precomputed field and carries a
    user-declared coercivity flag.
    """

    kind: str
    base: float = 1.0
    strength: float = 1.0
    exponent: float = 2.0
    table: RealField | None = None
    coercive: bool = True

    def __post_init__(self):
        if self.kind not in ("constant_plus_radial", "user_tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "user_tabulated" and self.table is None:
            raise ValueError("user_tabulated potential needs a table field")
        if self.kind == "constant_plus_radial":
            if self.base <= 0.0:
                raise ValueError(f"potential base must be positive, got {self.base}")
            if self.strength < 0.0:
                raise ValueError(f"radial strength must be nonnegative, got {self.strength}")

    def evaluate(self, grid: GridSpec) -> RealField:
        if self.kind == "user_tabulated":
            if self.table.grid != grid:
                raise ValueError("tabulated potential lives on a different grid")
            out = self.table
        else:
            x, y, z = grid.mesh(centered=True)
            r = np.sqrt(x**2 + y**2 + z**2)
            out = RealField(grid, self.base + self.strength * r**self.exponent)
        if float(out.values.min()) <= 0.0:
            raise ValueError("potential is not strictly positive on this grid")
        return out

    def describe(self) -> str:
        if self.kind == "user_tabulated":
            return "tabulated"
        return f"{self.kind}(base={self.base},strength={self.strength},exponent={self.exponent})"


def harmonic_potential(base: float = 1.0, strength: float = 1.0) -> Potential:
    """Default confinement 1 + |x - center|^2 (coercive, smooth)."""
    return Potential(kind="constant_plus_radial", base=base, strength=strength, exponent=2.0)


def constant_potential(value: float = 1.0) -> Potential:
    return Potential(kind="constant_plus_radial", base=value, strength=0.0, coercive=False)


def tabulated_potential(table: RealField, coercive: bool = False) -> Potential:
    return Potential(kind="user_tabulated", table=table, coercive=coercive)


# ---------------------------------------------------------------------------
# quadrature primitive
# ---------------------------------------------------------------------------


class QuadratureError(Exception):
    """Adaptive quadrature ran out of budget; carries the best estimate."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def _gl_panel(fn, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.sum(_GL_WEIGHTS * fn(mid + half * _GL_NODES)))


def primitive_by_quadrature(f, x, u: float, abs_tol: float = 1e-10, max_panels: int = 4000) -> float:
    """Primitive F(x, u) = integral of f(x, t) dt from 0 to u.

    Adaptive Gauss-Legendre: a panel is accepted when the 15-point rule and
    its bisected refinement agree to the locally apportioned tolerance.
    """
    u = float(u)
    if u == 0.0:
        return 0.0

    def fn(t):
        return np.asarray(f(x, t), dtype=np.float64)

    lo, hi = (0.0, u) if u > 0.0 else (u, 0.0)
    sign = 1.0 if u > 0.0 else -1.0
    stack = [(lo, hi, _gl_panel(fn, lo, hi))]
    total = 0.0
    panels = 0
    while stack:
        a, b, coarse = stack.pop()
        panels += 1
        if panels > max_panels:
            remaining = coarse + sum(c for _, _, c in stack)
            raise QuadratureError(
                f"quadrature tolerance {abs_tol} not reached within {max_panels} panels",
                achieved=sign * (total + remaining),
            )
        m = 0.5 * (a + b)
        left = _gl_panel(fn, a, m)
        right = _gl_panel(fn, m, b)
        fine = left + right
        if abs(fine - coarse) <= abs_tol * max((b - a) / (hi - lo), 1e-3):
            total += fine
        else:
            stack.append((a, m, left))
            stack.append((m, b, right))
    return sign * total


# ---------------------------------------------------------------------------
# nonlinearities
# ---------------------------------------------------------------------------


def _zeros_like_u(coords, u):
    return np.zeros_like(np.asarray(u, dtype=np.float64))


@dataclass(frozen=True)
class Nonlinearity:
    """Nonlinear term f with primitive F and the combination G = f*u/4 - F.

    ``f_closed``/``F_closed``/``G_closed`` take (coords, u) where coords is a
    tuple of center-relative coordinate arrays broadcastable against u.  When
    F_closed is missing the primitive falls back to adaptive quadrature.
    """

    name: str
    f_closed: Callable
    F_closed: Callable | None = None
    G_closed: Callable | None = None
    p: float = 5.0
    c1: float = 1.0
    c2: float = 1.0
    a0: float = 0.0
    weight: Callable | None = None
    x_dependent: bool = False
    params: dict = field(default_factory=dict)

    def f(self, coords, u):
        return np.asarray(self.f_closed(coords, np.asarray(u, dtype=np.float64)))

    def F(self, coords, u, abs_tol: float = 1e-10):
        u = np.asarray(u, dtype=np.float64)
        if self.F_closed is not None:
            return np.asarray(self.F_closed(coords, u))
        flat_u = np.ravel(u)
        if self.x_dependent:
            raise ValueError(
                "x-dependent nonlinearities must provide a closed-form primitive"
            )
        out = np.array(
            [primitive_by_quadrature(lambda _x, t: self.f_closed(coords, t), None, v, abs_tol)
             for v in flat_u]
        )
        return out.reshape(u.shape)

    def G(self, coords, u):
        u = np.asarray(u, dtype=np.float64)
        if self.G_closed is not None:
            return np.asarray(self.G_closed(coords, u))
        return 0.25 * self.f(coords, u) * u - self.F(coords, u)

    def g_weight(self, coords):
        if self.weight is None:
            return np.zeros(np.broadcast(*coords).shape) if coords else 0.0
        return np.asarray(self.weight(coords))

    def describe(self) -> str:
        if self.params:
            inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
            return f"{self.name}({inner})"
        return self.name


def builtin_log_quartic() -> Nonlinearity:
    """x-independent model: f(u) = 4u^3 log(u^2+1) + 2u^5/(u^2+1).

    F(u) = u^4 log(u^2+1), G(u) = u^6 / (2(u^2+1)) >= 0, so a0 = 0.  The
    growth constants (c1, c2) for p = 5 were certified numerically over
    |u| <= 1e8 with ample margin.
    """

    def f(coords, u):
        u2 = u * u
        return 4.0 * u * u2 * np.log1p(u2) + 2.0 * u2 * u2 * u / (u2 + 1.0)

    def F(coords, u):
        u2 = u * u
        return u2 * u2 * np.log1p(u2)

    def G(coords, u):
        u2 = u * u
        return u2 * u2 * u2 / (2.0 * (u2 + 1.0))

    return Nonlinearity(
        name="log_quartic",
        f_closed=f,
        F_closed=F,
        G_closed=G,
        p=5.0,
        c1=4.0,
        c2=4.5,
        a0=0.0,
        weight=None,
        x_dependent=False,
    )


def _exp_weight(coords):
    x, y, z = coords
    return np.exp(-(np.abs(x) + np.abs(y) + np.abs(z)))


def builtin_exp_weighted_power(p: float = 5.0) -> Nonlinearity:
    """Weighted model: f(x,u) = e^{-sum|x_i|} u + |u|^(p-2) u, 4 < p < 6.

    a0 = r0^2/4 with r0 = (p/(p-4))^(1/(p-2)) + 1 and weight g = e^{-sum|x_i|};
    c1 = c2 = 1 hold exactly since the weight is bounded by one.
    """
    p = float(p)
    if not (4.0 < p < 6.0):
        raise ValueError(f"exponent p must lie in (4, 6), got {p}")
    r0 = (p / (p - 4.0)) ** (1.0 / (p - 2.0)) + 1.0

    def f(coords, u):
        return _exp_weight(coords) * u + np.abs(u) ** (p - 2.0) * u

    def F(coords, u):
        return 0.5 * _exp_weight(coords) * u * u + np.abs(u) ** p / p

    def G(coords, u):
        return -0.25 * _exp_weight(coords) * u * u + (0.25 - 1.0 / p) * np.abs(u) ** p

    return Nonlinearity(
        name="exp_power",
        f_closed=f,
        F_closed=F,
        G_closed=G,
        p=p,
        c1=1.0,
        c2=1.0,
        a0=0.25 * r0 * r0,
        weight=_exp_weight,
        x_dependent=True,
        params={"p": p},
    )


def counterexample_cubic() -> Nonlinearity:
    """f(u) = u^3: boundary quartic growth, F/u^4 = 1/4 never diverges."""

    def f(coords, u):
        return u**3

    def F(coords, u):
        return 0.25 * u**4

    return Nonlinearity(name="cubic", f_closed=f, F_closed=F, p=5.0, c1=1.0, c2=1.0)


def counterexample_linear() -> Nonlinearity:
    """f(u) = u: F/u^4 -> 0, fails superquartic divergence."""

    def f(coords, u):
        return np.asarray(u, dtype=np.float64) + 0.0

    def F(coords, u):
        return 0.5 * u * u

    return Nonlinearity(name="linear", f_closed=f, F_closed=F, p=5.0, c1=1.0, c2=1.0)


def zero_nonlinearity() -> Nonlinearity:
    """No nonlinear forcing; used for pure quadratic+coupling diagnostics."""
    return Nonlinearity(
        name="none",
        f_closed=_zeros_like_u,
        F_closed=_zeros_like_u,
        G_closed=_zeros_like_u,
        p=4.5,
        c1=0.0,
        c2=0.0,
    )


NONLINEARITIES: dict[str, Callable[..., Nonlinearity]] = {
    "log_quartic": builtin_log_quartic,
    "exp_power": builtin_exp_weighted_power,
    "cubic": counterexample_cubic,
    "linear": counterexample_linear,
    "none": zero_nonlinearity,
}

POTENTIALS: dict[str, Callable[..., Potential]] = {
    "harmonic": harmonic_potential,
    "constant": constant_potential,
}


def make_nonlinearity(name: str, **params) -> Nonlinearity:
    if name not in NONLINEARITIES:
        raise ValueError(f"unknown nonlinearity {name!r}; known: {sorted(NONLINEARITIES)}")
    return NONLINEARITIES[name](**params)


def make_potential(name: str, **params) -> Potential:
    if name not in POTENTIALS:
        raise ValueError(f"unknown potential {name!r}; known: {sorted(POTENTIALS)}")
    return POTENTIALS[name](**params)


# ---------------------------------------------------------------------------
# hypothesis certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingPlan:
    """Deterministic sampling plan for the hypothesis sweeps."""

    u_max: float = 50.0
    u_count: int = 101
    x_stride: int = 4
    seed: int = 20250
    ladder_start: float = 1e-2
    ladder_stop: float = 1e6
    ladder_count: int = 81
    divergence_factor: float = 1e3

    def __post_init__(self):
        if self.u_max <= 0 or self.u_count < 3:
            raise ValueError("sampling plan needs u_max > 0 and u_count >= 3")
        if self.x_stride < 1:
            raise ValueError("x_stride must be >= 1")
        if not (0 < self.ladder_start < self.ladder_stop):
            raise ValueError("ladder range must satisfy 0 < start < stop")
        if self.ladder_count < 10:
            raise ValueError("ladder_count must be >= 10")

    def to_dict(self) -> dict:
        return {
            "u_max": self.u_max,
            "u_count": self.u_count,
            "x_stride": self.x_stride,
            "seed": self.seed,
            "ladder_start": self.ladder_start,
            "ladder_stop": self.ladder_stop,
            "ladder_count": self.ladder_count,
            "divergence_factor": self.divergence_factor,
        }


@dataclass(frozen=True)
class Witness:
    where: tuple | None
    u: float | None
    lhs: float
    rhs: float
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "x": None if self.where is None else [float(v) for v in self.where],
            "u": self.u,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "note": self.note,
        }


@dataclass
class CheckResult:
    hypothesis: str
    passed: bool
    witnesses: list
    info: dict

    def to_dict(self) -> dict:
        return {
            "hypothesis": self.hypothesis,
            "passed": self.passed,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "info": self.info,
        }


@dataclass
class HypothesisReport:
    model: str
    potential: str
    results: dict
    plan: SamplingPlan

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "potential": self.potential,
            "all_passed": self.all_passed,
            "plan": self.plan.to_dict(),
            "results": {k: v.to_dict() for k, v in sorted(self.results.items())},
        }


_MAX_WITNESSES = 5


def _sample_lattice(grid: GridSpec, stride: int):
    """Strided sublattice of center-relative coordinates, flattened."""
    x, y, z = grid.mesh(centered=True)
    sl = (slice(None, None, stride),) * 3
    return (x[sl].ravel(), y[sl].ravel(), z[sl].ravel())


def _check_potential(potential, grid: GridSpec) -> CheckResult:
    witnesses = []
    if isinstance(potential, Potential):
        v_field = potential.evaluate(grid)
        coercive_flag = potential.coercive
        name = potential.describe()
    else:
        v_field = potential
        coercive_flag = True
        name = "raw field"
    vals = v_field.values
    vmin = float(vals.min())
    passed = vmin > 0.0
    if not passed:
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        x, y, z = grid.mesh(centered=True)
        witnesses.append(Witness((x[idx], y[idx], z[idx]), None, vmin, 0.0, "min V <= 0"))
    # growth along the 26 lattice rays from the box center
    centers = tuple(n // 2 for n in grid.n)
    nondecreasing_rays = 0
    ray_failures = 0
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dz in (-1, 0, 1):
                if dx == dy == dz == 0:
                    continue
                steps = min(
                    (grid.n[i] // 2 - 1) if d != 0 else 10**9
                    for i, d in enumerate((dx, dy, dz))
                )
                idx = tuple(
                    np.clip(c + d * np.arange(steps + 1), 0, n - 1)
                    for c, d, n in zip(centers, (dx, dy, dz), grid.n)
                )
                ray_vals = vals[idx[0], idx[1], idx[2]]
                if np.all(np.diff(ray_vals) >= -1e-12 * (1.0 + np.abs(ray_vals[:-1]))):
                    nondecreasing_rays += 1
                else:
                    ray_failures += 1
    grew = ray_failures == 0 and coercive_flag
    if not grew and passed and len(witnesses) < _MAX_WITNESSES:
        witnesses.append(
            Witness(None, None, float(ray_failures), 0.0, "non-monotone rays or coercivity not declared")
        )
    return CheckResult(
        hypothesis="V",
        passed=passed and grew,
        witnesses=witnesses,
        info={
            "potential": name,
            "min_value": vmin,
            "monotone_rays": nondecreasing_rays,
            "ray_failures": ray_failures,
            "declared_coercive": bool(coercive_flag),
        },
    )


def _check_h1(nl: Nonlinearity, coords, u_samples, alpha: float) -> CheckResult:
    witnesses = []
    xg = tuple(c[:, None] for c in coords)
    u = u_samples[None, :]
    fu = nl.f(xg, np.broadcast_to(u, (coords[0].size, u_samples.size)))
    bound = nl.c1 * np.abs(u) + nl.c2 * np.abs(u) ** (nl.p - 1.0)
    slack = np.abs(fu) - bound * (1.0 + 1e-9)
    growth_ok = bool(np.all(slack <= 0.0))
    if not growth_ok:
        i, j = np.unravel_index(int(np.argmax(slack)), slack.shape)
        witnesses.append(
            Witness(
                (coords[0][i], coords[1][i], coords[2][i]),
                float(u_samples[j]),
                float(np.abs(fu)[i, j]),
                float(bound[0, j]),
                "|f| exceeds c1|u| + c2|u|^(p-1)",
            )
        )
    pos = u_samples >= 0.0
    sign_vals = fu[:, pos] * u[:, pos]
    sign_ok = bool(np.all(sign_vals >= -1e-12 * (1.0 + np.abs(sign_vals))))
    if not sign_ok and len(witnesses) < _MAX_WITNESSES:
        i, j = np.unravel_index(int(np.argmin(sign_vals)), sign_vals.shape)
        uj = u_samples[pos][j]
        witnesses.append(
            Witness(
                (coords[0][i], coords[1][i], coords[2][i]),
                float(uj),
                float(sign_vals[i, j]),
                0.0,
                "f(x,u)u < 0 for u >= 0",
            )
        )
    two_star = critical_exponent(alpha)
    p_ok = (nl.c1 > 0.0) and (nl.c2 > 0.0) and (4.0 < nl.p < two_star) and (alpha > 0.75)
    if not p_ok and len(witnesses) < _MAX_WITNESSES:
        witnesses.append(
            Witness(None, None, nl.p, two_star, "parameters outside 4 < p < 6/(3-2a), a > 3/4, c1,c2 > 0")
        )
    neg = u_samples < 0.0
    min_sign_neg = float((fu[:, neg] * u[:, neg]).min()) if neg.any() else 0.0
    return CheckResult(
        hypothesis="H1",
        passed=growth_ok and sign_ok and p_ok,
        witnesses=witnesses,
        info={
            "p": nl.p,
            "c1": nl.c1,
            "c2": nl.c2,
            "critical_exponent": two_star,
            "alpha": alpha,
            "sign_condition_u_negative_min": min_sign_neg,
        },
    )


def _check_h2(nl: Nonlinearity, coords, plan: SamplingPlan) -> CheckResult:
    """Superquartic divergence of F/u^4, operationalized as monotone growth.

    The exact hypothesis is a limit at |u| -> infinity and is undecidable on
    a computer; the semi-decision used here demands that F/u^4 grows by at
    least ``divergence_factor`` across a geometric ladder and keeps increasing
    over the ladder's last decade, uniformly over the sampled x lattice.
    """
    witnesses = []
    ladder = np.geomspace(plan.ladder_start, plan.ladder_stop, plan.ladder_count)
    xg = tuple(c[:, None] for c in coords)
    passed = True
    info: dict = {}
    for sign in (1.0, -1.0):
        u = sign * ladder[None, :]
        ratios = nl.F(xg, np.broadcast_to(u, (coords[0].size, ladder.size))) / ladder[None, :] ** 4
        start = ratios[:, 0]
        end = ratios[:, -1]
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(start > 0.0, end / start, np.where(end > 0.0, np.inf, 0.0))
        worst = int(np.argmin(factor))
        tail = ratios[:, ladder >= plan.ladder_stop / 10.0]
        monotone = np.all(np.diff(tail, axis=1) >= -1e-9 * np.abs(tail[:, :-1]))
        side_ok = bool(np.min(factor) >= plan.divergence_factor) and bool(monotone)
        key = "positive" if sign > 0 else "negative"
        info[f"growth_factor_min_{key}"] = float(np.min(factor))
        info[f"tail_monotone_{key}"] = bool(monotone)
        if not side_ok:
            passed = False
            if len(witnesses) < _MAX_WITNESSES:
                witnesses.append(
                    Witness(
                        (coords[0][worst], coords[1][worst], coords[2][worst]),
                        float(sign * ladder[-1]),
                        float(end[worst]),
                        float(start[worst] * plan.divergence_factor),
                        "F/u^4 failed to grow by the divergence factor or is not increasing",
                    )
                )
    info["divergence_factor"] = plan.divergence_factor
    info["ladder"] = [plan.ladder_start, plan.ladder_stop, plan.ladder_count]
    return CheckResult(hypothesis="H2", passed=passed, witnesses=witnesses, info=info)


def _check_h3(nl: Nonlinearity, coords, u_samples, grid: GridSpec) -> CheckResult:
    witnesses = []
    xg = tuple(c[:, None] for c in coords)
    u = np.broadcast_to(u_samples[None, :], (coords[0].size, u_samples.size))
    G = nl.G(xg, u)
    gw = np.broadcast_to(np.asarray(nl.g_weight(xg)), G.shape)
    lower = -nl.a0 * gw
    defect = lower - G
    # tolerance scales with the pieces of G = f*u/4 - F, not with G itself,
    # since cancellation can leave G near zero with large constituents
    rounding_scale = 1.0 + np.abs(G) + 0.25 * np.abs(nl.f(xg, u) * u) + np.abs(nl.F(xg, u))
    tol = 1e-12 * rounding_scale
    ok = bool(np.all(defect <= tol))
    if not ok:
        i, j = np.unravel_index(int(np.argmax(defect - tol)), defect.shape)
        witnesses.append(
            Witness(
                (coords[0][i], coords[1][i], coords[2][i]),
                float(u_samples[j]),
                float(G[i, j]),
                float(lower[i, j]),
                "G(x,u) < -a0*g(x)",
            )
        )
    x, y, z = grid.mesh(centered=True)
    g_total = float(np.sum(nl.g_weight((x, y, z))) * grid.cell_volume) if nl.weight else 0.0
    return CheckResult(
        hypothesis="H3",
        passed=ok,
        witnesses=witnesses,
        info={"a0": nl.a0, "weight_integral": g_total},
    )


def _check_h4(nl: Nonlinearity, coords, u_samples) -> CheckResult:
    witnesses = []
    xg = tuple(c[:, None] for c in coords)
    u = np.broadcast_to(u_samples[None, :], (coords[0].size, u_samples.size))
    f_pos = nl.f(xg, u)
    f_neg = nl.f(xg, -u)
    defect = np.abs(f_pos + f_neg)
    scale = 1.0 + np.maximum(np.abs(f_pos), np.abs(f_neg))
    ok = bool(np.all(defect <= 1e-12 * scale))
    if not ok:
        i, j = np.unravel_index(int(np.argmax(defect / scale)), defect.shape)
        witnesses.append(
            Witness(
                (coords[0][i], coords[1][i], coords[2][i]),
                float(u_samples[j]),
                float(f_pos[i, j]),
                float(-f_neg[i, j]),
                "f(x,-u) != -f(x,u)",
            )
        )
    return CheckResult(
        hypothesis="H4",
        passed=ok,
        witnesses=witnesses,
        info={"max_defect": float(np.max(defect / scale))},
    )


def check_hypotheses(
    nl: Nonlinearity,
    potential,
    grid: GridSpec,
    plan: SamplingPlan | None = None,
) -> HypothesisReport:
    """Numerically certify (V) and (H1)-(H4) on a sampling lattice.

    Failures are reported with witnesses, never raised.  Reports are
    bit-reproducible for a fixed plan.
    """
    plan = plan or SamplingPlan()
    rng = np.random.default_rng(plan.seed)
    coords = _sample_lattice(grid, plan.x_stride)
    u_random = rng.uniform(-plan.u_max, plan.u_max, plan.u_count)
    u_ladder = np.geomspace(1e-3, plan.u_max, 25)
    u_samples = np.unique(np.concatenate([u_random, u_ladder, -u_ladder, [0.0]]))
    results = {
        "V": _check_potential(potential, grid),
        "H1": _check_h1(nl, coords, u_samples, grid.alpha),
        "H2": _check_h2(nl, coords, plan),
        "H3": _check_h3(nl, coords, u_samples, grid),
        "H4": _check_h4(nl, coords, u_samples),
    }
    pot_name = potential.describe() if isinstance(potential, Potential) else "raw field"
    return HypothesisReport(model=nl.describe(), potential=pot_name, results=results, plan=plan)
