"""Nehari projection, deflated descent, and solution verification."""

import numpy as np
import pytest

from fsptools.eigen import schrodinger_eigenbasis
from fsptools.energy import Problem
from fsptools.model import builtin_log_quartic, harmonic_potential
from fsptools.solver import find_solutions, nehari_scale, verify_solution
from fsptools.spectral import GridSpec, RealField

GRID = GridSpec((10, 10, 10), (10.0, 11.5, 13.0), 1.0)
V = harmonic_potential()


@pytest.fixture(scope="module")
def problem():
    return Problem(GRID, V, builtin_log_quartic())


@pytest.fixture(scope="module")
def basis():
    return schrodinger_eigenbasis(GRID, V, 1.0, k=8, seed=21)


@pytest.fixture(scope="module")
def solutions(problem, basis):
    return find_solutions(
        problem, basis, count_target=3, tol=1e-6, seed=21, max_restarts=10, max_iters=900
    )


class TestNehariScale:
    def test_fiber_root_is_stationary(self, problem, basis):
        w = problem.field(basis.combine(np.array([1.0, 0.5, 0, 0, 0, 0, 0, 0])).reshape(GRID.shape))
        t = nehari_scale(problem, w)
        assert t is not None and t > 0
        # at the root, d/dt J(t*w) vanishes: pairing of gradient with w
        u = problem.field(t * w.values)
        e, g = problem.energy_and_gradient(u)
        pairing = float(np.sum(g.g.values * w.values)) * GRID.cell_volume
        scale = abs(e.total) + 1.0
        assert abs(pairing) <= 1e-7 * scale

    def test_no_root_for_subcritical_forcing(self, problem, basis):
        # zero nonlinearity: psi(t) = t a + t^3 b > 0 for all t > 0
        from fsptools.model import zero_nonlinearity

        prob0 = Problem(GRID, V, zero_nonlinearity())
        w = prob0.field(basis.field(0).values)
        assert nehari_scale(prob0, w) is None


class TestFindSolutions:
    def test_finds_target_count(self, solutions):
        assert len(solutions.records) == 3
        assert not solutions.shortfall

    def test_records_meet_residual_contract(self, solutions):
        for rec in solutions.records:
            assert rec.residual_pre <= 1e-6 * (1.0 + rec.norm_E)
            assert rec.norm_E > 1e-3

    def test_energies_ascending_and_distinct(self, solutions):
        totals = [r.energy.total for r in solutions.records]
        assert totals == sorted(totals)
        gaps = np.diff(totals)
        assert np.all(gaps > 1e-3)

    def test_pairwise_distances_positive(self, solutions):
        d = solutions.distances
        n = len(solutions.records)
        for i in range(n):
            for j in range(i + 1, n):
                assert d[i, j] > 0.0

    def test_odd_partner_residuals_match(self, solutions):
        for rec in solutions.records:
            assert rec.partner_residual_pre == pytest.approx(rec.residual_pre, rel=1e-10)

    def test_partner_energy_equal(self, solutions, problem):
        rec = solutions.records[0]
        e_minus = problem.energy(problem.field(-rec.u.values))
        assert e_minus.total == pytest.approx(rec.energy.total, rel=1e-12)

    def test_determinism_bitwise(self, problem, basis):
        s1 = find_solutions(problem, basis, count_target=1, tol=1e-5, seed=33, max_restarts=3)
        s2 = find_solutions(problem, basis, count_target=1, tol=1e-5, seed=33, max_restarts=3)
        assert len(s1.records) == len(s2.records) == 1
        assert np.array_equal(s1.records[0].u.values, s2.records[0].u.values)
        assert s1.records[0].energy.total == s2.records[0].energy.total

    def test_shortfall_on_impossible_tolerance(self, problem, basis):
        out = find_solutions(
            problem, basis, count_target=1, tol=1e-30, seed=5, max_restarts=2, max_iters=40
        )
        assert out.shortfall
        assert out.records == []

    def test_rejects_nonpositive_tol(self, problem, basis):
        with pytest.raises(ValueError):
            find_solutions(problem, basis, tol=0.0)

    def test_to_dict_shape(self, solutions):
        d = solutions.to_dict()
        assert d["count"] == 3
        assert len(d["records"]) == 3
        assert len(d["pairwise_E_distances"]) == 3


class TestVerifySolution:
    def test_zero_field_all_zero(self, problem):
        rep = verify_solution(problem, RealField.zeros(GRID), n_test_fields=5, seed=1)
        assert rep.weak_form_max == 0.0
        assert rep.residual_l2 == 0.0
        assert rep.norm_E == 0.0

    def test_weak_and_strong_agree_within_factor_ten(self, solutions, problem):
        rec = solutions.records[0]
        rep = verify_solution(problem, rec.u, seed=2)
        ratio = rep.weak_form_max / rep.residual_pre
        assert 0.1 <= ratio <= 10.0

    def test_perturbation_increases_residual(self, solutions, problem, basis):
        rec = solutions.records[0]
        rep0 = verify_solution(problem, rec.u, n_test_fields=10, seed=3)
        bumped = problem.field(rec.u.values + 0.1 * basis.field(0).values)
        rep1 = verify_solution(problem, bumped, n_test_fields=10, seed=3)
        assert rep1.residual_pre > rep0.residual_pre

    def test_poisson_consistency_reported(self, solutions, problem):
        rep = verify_solution(problem, solutions.records[0].u, n_test_fields=5, seed=4)
        assert 0.0 <= rep.poisson_consistency < 0.5
