"""Spectral transforms, fractional Laplacian, and norm contracts."""

import numpy as np
import pytest

from fsptools.spectral import (
    GridSpec,
    RealField,
    forward_transform,
    frac_laplacian,
    inner_E,
    inner_l2,
    inverse_transform,
    lp_norm,
    norm_E,
    random_smooth_field,
    seminorm_dalpha,
)


@pytest.fixture(scope="module")
def grid():
    return GridSpec((16, 16, 16), (10.0, 11.0, 12.0), 1.0)


def mode_field(grid, m=(2, 1, 3), phase=0.4):
    x, y, z = grid.mesh()
    k = [2.0 * np.pi * mi / li for mi, li in zip(m, grid.l)]
    values = np.cos(k[0] * x + k[1] * y + k[2] * z + phase)
    return RealField(grid, values), float(k[0] ** 2 + k[1] ** 2 + k[2] ** 2)


class TestGridSpec:
    def test_rejects_odd_or_small_n(self):
        with pytest.raises(ValueError):
            GridSpec((15, 16, 16), (10.0, 10.0, 10.0))
        with pytest.raises(ValueError):
            GridSpec((2, 16, 16), (10.0, 10.0, 10.0))

    def test_rejects_bad_box_and_alpha(self):
        with pytest.raises(ValueError):
            GridSpec((8, 8, 8), (0.0, 10.0, 10.0))
        with pytest.raises(ValueError):
            GridSpec((8, 8, 8), (10.0, 10.0, 10.0), alpha=1.5)
        with pytest.raises(ValueError):
            GridSpec((8, 8, 8), (10.0, 10.0, 10.0), alpha=0.0)

    def test_cell_volume(self, grid):
        assert grid.cell_volume == pytest.approx(grid.volume / grid.num_points, rel=1e-15)


class TestRealField:
    def test_rejects_nonfinite(self, grid):
        values = np.zeros(grid.shape)
        values[3, 4, 5] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            RealField(grid, values)

    def test_rejects_shape_mismatch(self, grid):
        with pytest.raises(ValueError, match="shape"):
            RealField(grid, np.zeros((4, 4, 4)))

    def test_values_immutable(self, grid):
        u = RealField.zeros(grid)
        with pytest.raises(ValueError):
            u.values[0, 0, 0] = 1.0

    def test_x_fastest_layout(self, grid):
        x, _, _ = grid.mesh()
        u = RealField(grid, x)
        flat = u.flat_x_fastest()
        # first nx entries walk the x axis
        assert np.array_equal(flat[: grid.n[0]], x[:, 0, 0])


class TestForwardTransform:
    def test_constant_field_single_coefficient(self, grid):
        u = RealField(grid, np.full(grid.shape, 2.5))
        s = forward_transform(u)
        c = np.abs(s.coefficients)
        assert c[0, 0, 0] > 0
        c0 = c[0, 0, 0]
        c[0, 0, 0] = 0.0
        assert c.max() <= 1e-12 * c0

    def test_pure_mode_two_coefficients(self, grid):
        u, _ = mode_field(grid)
        full = np.fft.fftn(u.values)
        mags = np.abs(full)
        top = np.sort(mags.ravel())[::-1]
        # exactly one conjugate pair carries the field
        assert top[0] == pytest.approx(top[1], rel=1e-12)
        assert top[2] <= 1e-10 * top[0]

    def test_round_trip_random(self, grid):
        rng = np.random.default_rng(11)
        u = RealField(grid, rng.standard_normal(grid.shape))
        r = inverse_transform(forward_transform(u))
        assert np.abs(r.values - u.values).max() <= 1e-12

    def test_round_trip_many_trials(self):
        # invariant sweep: 1000 trials at a fixed seed
        grid = GridSpec((8, 8, 8), (5.0, 6.0, 7.0))
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(1000):
            u = RealField(grid, rng.standard_normal(grid.shape))
            r = inverse_transform(forward_transform(u))
            worst = max(worst, float(np.abs(r.values - u.values).max()))
        assert worst <= 1e-12

    def test_parseval(self, grid):
        rng = np.random.default_rng(5)
        u = RealField(grid, rng.standard_normal(grid.shape))
        phys = float(np.sum(u.values**2) * grid.cell_volume)
        spec = forward_transform(u).parseval_power()
        assert spec == pytest.approx(phys, rel=1e-12)

    def test_hermitian_symmetry_stored_plane(self, grid):
        rng = np.random.default_rng(6)
        u = RealField(grid, rng.standard_normal(grid.shape))
        c = forward_transform(u).coefficients
        plane = c[:, :, 0]
        flipped = np.conj(plane[np.ix_(-np.arange(grid.n[0]) % grid.n[0],
                                       -np.arange(grid.n[1]) % grid.n[1])])
        assert np.abs(plane - flipped).max() <= 1e-12 * np.abs(plane).max()


class TestFracLaplacian:
    @pytest.mark.parametrize("alpha", [0.5, 0.8, 1.0])
    def test_pure_mode_multiplier(self, grid, alpha):
        u, k2 = mode_field(grid)
        out = frac_laplacian(u, alpha)
        expected = k2**alpha * u.values
        assert np.abs(out.values - expected).max() <= 1e-12 * np.abs(expected).max()

    def test_rejects_alpha_out_of_range(self, grid):
        u = RealField.zeros(grid)
        for alpha in (0.0, -0.3, 1.2):
            with pytest.raises(ValueError):
                frac_laplacian(u, alpha)

    def test_finite_difference_oracle_alpha_one(self):
        # centered 7-point Laplacian converges at O(h^2) to the spectral one
        errs = []
        for n in (16, 32):
            grid = GridSpec((n, n, n), (10.0, 10.0, 10.0), 1.0)
            x, y, z = grid.mesh(centered=True)
            u = RealField(grid, np.exp(-(x**2 + y**2 + z**2) / 2.0))
            spec = frac_laplacian(u, 1.0).values
            fd = np.zeros(grid.shape)
            for axis, h in enumerate(grid.spacing):
                fd += (np.roll(u.values, 1, axis) + np.roll(u.values, -1, axis)
                       - 2.0 * u.values) / h**2
            fd = -fd
            errs.append(np.abs(spec - fd).max())
        assert errs[1] <= errs[0] / 3.0  # better than O(h) improvement, ~O(h^2)

    @pytest.mark.parametrize("alpha", [0.5, 0.8, 1.0])
    def test_semigroup_composition(self, grid, alpha):
        rng = np.random.default_rng(8)
        u = random_smooth_field(grid, rng)
        once = frac_laplacian(u, alpha)
        twice = frac_laplacian(frac_laplacian(u, alpha / 2.0), alpha / 2.0)
        scale = np.abs(once.values).max()
        assert np.abs(once.values - twice.values).max() <= 1e-11 * scale

    def test_linearity(self, grid):
        rng = np.random.default_rng(9)
        u = RealField(grid, rng.standard_normal(grid.shape))
        v = RealField(grid, rng.standard_normal(grid.shape))
        left = frac_laplacian(RealField(grid, 2.0 * u.values - 3.0 * v.values), 0.8).values
        right = 2.0 * frac_laplacian(u, 0.8).values - 3.0 * frac_laplacian(v, 0.8).values
        assert np.abs(left - right).max() <= 1e-11 * np.abs(right).max()

    def test_self_adjointness(self, grid):
        rng = np.random.default_rng(10)
        u = RealField(grid, rng.standard_normal(grid.shape))
        v = RealField(grid, rng.standard_normal(grid.shape))
        lhs = inner_l2(frac_laplacian(u, 0.8), v)
        rhs = inner_l2(u, frac_laplacian(v, 0.8))
        bound = 1e-11 * lp_norm(u, 2) * lp_norm(v, 2)
        assert abs(lhs - rhs) <= bound


class TestSeminorm:
    def test_constant_annihilated(self, grid):
        u = RealField(grid, np.full(grid.shape, 3.7))
        assert seminorm_dalpha(u, 0.8) <= 1e-20

    def test_single_mode_value(self, grid):
        u, k2 = mode_field(grid, phase=0.0)
        expected = k2**0.8 * grid.volume / 2.0
        assert seminorm_dalpha(u, 0.8) == pytest.approx(expected, rel=1e-12)

    def test_plancherel_cross_check(self, grid):
        rng = np.random.default_rng(12)
        for _ in range(5):
            u = RealField(grid, rng.standard_normal(grid.shape))
            half = frac_laplacian(u, 0.4)  # alpha/2 with alpha = 0.8
            phys = float(np.sum(half.values**2) * grid.cell_volume)
            assert seminorm_dalpha(u, 0.8) == pytest.approx(phys, rel=1e-12)

    def test_nonnegative_random_sweep(self, grid):
        rng = np.random.default_rng(13)
        for _ in range(20):
            u = RealField(grid, rng.standard_normal(grid.shape))
            assert seminorm_dalpha(u, 0.6) >= 0.0


class TestNormE:
    def test_zero_field(self, grid):
        V = RealField(grid, np.ones(grid.shape))
        assert norm_E(RealField.zeros(grid), V, 0.8) == 0.0

    def test_single_mode_constant_potential(self, grid):
        u, k2 = mode_field(grid, phase=0.0)
        V = RealField(grid, np.ones(grid.shape))
        expected = np.sqrt((k2**0.8 + 1.0) * grid.volume / 2.0)
        assert norm_E(u, V, 0.8) == pytest.approx(expected, rel=1e-12)

    def test_rejects_nonpositive_potential(self, grid):
        u = RealField.zeros(grid)
        V = RealField(grid, np.zeros(grid.shape))
        with pytest.raises(ValueError, match="positive"):
            norm_E(u, V, 0.8)

    def test_cauchy_schwarz_sweep(self, grid):
        rng = np.random.default_rng(14)
        x, y, z = grid.mesh(centered=True)
        V = RealField(grid, 1.0 + x**2 + y**2 + z**2)
        for _ in range(100):
            u = RealField(grid, rng.standard_normal(grid.shape))
            v = RealField(grid, rng.standard_normal(grid.shape))
            lhs = abs(inner_E(u, v, V, 0.8))
            rhs = norm_E(u, V, 0.8) * norm_E(v, V, 0.8)
            assert lhs <= rhs * (1.0 + 1e-12)

    def test_symmetric_bilinear(self, grid):
        rng = np.random.default_rng(15)
        V = RealField(grid, np.full(grid.shape, 2.0))
        u = RealField(grid, rng.standard_normal(grid.shape))
        v = RealField(grid, rng.standard_normal(grid.shape))
        assert inner_E(u, v, V, 0.9) == pytest.approx(inner_E(v, u, V, 0.9), rel=1e-12)


class TestLpNorm:
    def test_single_cell_spike(self, grid):
        values = np.zeros(grid.shape)
        values[2, 3, 4] = 7.0
        u = RealField(grid, values)
        r = 3.0
        assert lp_norm(u, r) == pytest.approx((7.0**r * grid.cell_volume) ** (1 / r), rel=1e-14)

    def test_homogeneity(self, grid):
        rng = np.random.default_rng(16)
        u = RealField(grid, rng.standard_normal(grid.shape))
        two_u = RealField(grid, 2.0 * u.values)
        assert lp_norm(two_u, 2.7) == pytest.approx(2.0 * lp_norm(u, 2.7), rel=1e-13)

    def test_rejects_r_below_one(self, grid):
        with pytest.raises(ValueError):
            lp_norm(RealField.zeros(grid), 0.5)

    def test_r2_matches_plancherel(self, grid):
        rng = np.random.default_rng(17)
        u = RealField(grid, rng.standard_normal(grid.shape))
        spectral = np.sqrt(forward_transform(u).parseval_power())
        assert lp_norm(u, 2.0) == pytest.approx(spectral, rel=1e-12)


def test_determinism_fixed_seed(grid):
    a = random_smooth_field(grid, np.random.default_rng(99))
    b = random_smooth_field(grid, np.random.default_rng(99))
    assert np.array_equal(a.values, b.values)
