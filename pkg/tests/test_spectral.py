import itertools

import numpy as np
import pytest

from advdiff.grid import ScalarField, TorusGrid, VectorField, lp_norm
from advdiff.library import FieldSpec, instantiate
from advdiff.spectral import (
    SpectralField,
    dealias,
    dealias_mask,
    divergence,
    divergence_defect,
    forward,
    gradient,
    inverse,
    laplacian,
    leray_project,
    perp_gradient,
    translate,
)

from conftest import random_field, trig_field


class TestTransform:
    def test_constant_forward(self, grid32):
        F = forward(ScalarField.constant(grid32, 5.0))
        assert F.coeffs[0, 0] == pytest.approx(5.0, abs=1e-13)
        rest = F.coeffs.copy()
        rest[0, 0] = 0.0
        assert np.max(np.abs(rest)) < 1e-13

    def test_cosine_single_mode(self, grid32):
        f = ScalarField.from_function(grid32, lambda x, y: np.cos(2 * np.pi * x))
        F = forward(f)
        assert F.coeffs[1, 0] == pytest.approx(0.5, abs=1e-12)
        assert F.coeffs[-1, 0] == pytest.approx(0.5, abs=1e-12)
        remaining = F.coeffs.copy()
        remaining[1, 0] = remaining[-1, 0] = 0.0
        assert np.max(np.abs(remaining)) < 1e-12

    def test_roundtrip(self):
        g = TorusGrid(2, 128)
        f = ScalarField(g, np.random.default_rng(0).normal(size=g.shape))
        back = inverse(forward(f))
        err = lp_norm(back - f, 2.0) / lp_norm(f, 2.0)
        assert err < 1e-12

    def test_roundtrip_all_dims(self):
        for dim, n in ((1, 64), (2, 32), (3, 16)):
            g = TorusGrid(dim, n)
            f = ScalarField(g, np.random.default_rng(dim).normal(size=g.shape))
            assert lp_norm(inverse(forward(f)) - f, 2.0) < 1e-12 * lp_norm(f, 2.0)

    def test_parseval(self, grid64):
        f = random_field(grid64, seed=1)
        F = forward(f)
        spectral = float(np.sum(np.abs(F.coeffs) ** 2))
        assert spectral == pytest.approx(lp_norm(f, 2.0) ** 2, rel=1e-12)

    def test_hermitian_symmetry_enforced(self, grid32):
        coeffs = np.zeros(grid32.shape, dtype=complex)
        coeffs[1, 0] = 1.0  # no conjugate partner at (-1, 0)
        with pytest.raises(ValueError, match="Hermitian"):
            SpectralField(grid32, coeffs)
        SpectralField(grid32, coeffs, real_data=False)  # opt-out is explicit


class TestDerivatives:
    def test_gradient_of_constant(self, grid32):
        g = gradient(ScalarField.constant(grid32, 4.0))
        assert all(np.max(np.abs(c.values)) < 1e-13 for c in g.components)

    def test_laplacian_eigenfunction(self):
        g = TorusGrid(2, 64)
        f = ScalarField.from_function(g, lambda x, y: np.sin(2 * np.pi * x) + 0 * y)
        lap = laplacian(f)
        assert np.max(np.abs(lap.values + 4 * np.pi**2 * f.values)) < 1e-10

    def test_divergence_of_gradient_is_laplacian(self, grid64):
        f = random_field(grid64, seed=9)
        lhs = divergence(gradient(f))
        rhs = laplacian(f)
        scale = max(1.0, np.max(np.abs(rhs.values)))
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-11 * scale

    def test_derivative_identity_on_rough_field(self, grid32):
        # random data with full-spectrum content, including the Nyquist plane
        f = ScalarField(grid32, np.random.default_rng(3).normal(size=grid32.shape))
        lhs = divergence(gradient(f))
        rhs = laplacian(f)
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-9


class TestLeray:
    def test_annihilates_pure_gradient(self, grid32):
        psi = ScalarField.from_function(grid32, lambda x, y: np.sin(2 * np.pi * x) + 0 * y)
        v = gradient(psi)
        p = leray_project(v)
        assert all(np.max(np.abs(c.values)) < 1e-12 for c in p.components)

    def test_fixed_point_on_solenoidal(self, grid64):
        tg = instantiate(FieldSpec("taylor_green"), grid64)
        p = leray_project(tg)
        for before, after in zip(tg.components, p.components):
            assert np.max(np.abs(before.values - after.values)) < 1e-12 * tg.max_abs()

    def test_hand_split_example(self, grid32):
        x, y = grid32.coordinate_mesh()
        comp1 = np.broadcast_to(np.sin(2 * np.pi * y) + np.sin(2 * np.pi * x), grid32.shape)
        v = VectorField.from_arrays(grid32, [comp1, np.zeros(grid32.shape)])
        p = leray_project(v)
        expected = np.broadcast_to(np.sin(2 * np.pi * y), grid32.shape)
        assert np.max(np.abs(p.components[0].values - expected)) < 1e-12
        assert np.max(np.abs(p.components[1].values)) < 1e-12

    def test_matches_bruteforce_mode_by_mode(self, grid32):
        # independent oracle: project every lattice mode with explicit loops,
        # with the lone Nyquist column zeroed exactly as the derivatives do
        rng = np.random.default_rng(3)
        v = VectorField.from_arrays(grid32, [rng.normal(size=grid32.shape) for _ in range(2)])
        p = leray_project(v)
        n = grid32.points_per_axis
        hats = [np.fft.fftn(c.values) for c in v.components]
        out = [np.zeros_like(hats[0]), np.zeros_like(hats[1])]
        for i, j in itertools.product(range(n), range(n)):
            k1 = i if i <= n // 2 else i - n
            k2 = j if j <= n // 2 else j - n
            if abs(k1) == n // 2:
                k1 = 0
            if abs(k2) == n // 2:
                k2 = 0
            vh = np.array([hats[0][i, j], hats[1][i, j]])
            if k1 == k2 == 0:
                w = vh
            else:
                kv = np.array([k1, k2], dtype=float)
                w = vh - kv * (kv @ vh) / (kv @ kv)
            out[0][i, j], out[1][i, j] = w
        for oracle_hat, comp in zip(out, p.components):
            oracle = np.fft.ifftn(oracle_hat).real
            assert np.max(np.abs(oracle - comp.values)) < 1e-12

    def test_idempotent_contractive_divergence_free(self, grid64):
        rng = np.random.default_rng(11)
        v = VectorField.from_arrays(grid64, [rng.normal(size=grid64.shape) for _ in range(2)])
        p = leray_project(v)
        assert p.divergence_free
        assert divergence_defect(p) < 1e-10
        twice = leray_project(p)
        for a, b in zip(p.components, twice.components):
            assert np.max(np.abs(a.values - b.values)) < 1e-12
        energy = lambda u: sum(lp_norm(c, 2.0) ** 2 for c in u.components)
        assert energy(p) <= energy(v) + 1e-12

    def test_one_dimension_constant_passes(self):
        g = TorusGrid(1, 16)
        v = VectorField.from_arrays(g, [np.full(g.shape, 2.0)])
        p = leray_project(v)
        assert p.divergence_free
        assert np.all(p.components[0].values == 2.0)

    def test_one_dimension_nonconstant_rejected(self):
        g = TorusGrid(1, 16)
        v = VectorField.from_arrays(g, [np.sin(2 * np.pi * g.axis_coordinates())])
        with pytest.raises(ValueError, match="trivial in one dimension"):
            leray_project(v)


class TestDealias:
    def test_inband_unchanged(self, grid64):
        f = trig_field(grid64, [((3, 2), 1.0, 0.5), ((7, -5), 0.3, 0.1)])
        F = forward(f)
        after = dealias(F)
        assert np.max(np.abs(after.coeffs - F.coeffs)) < 1e-15

    def test_nyquist_mode_zeroed(self, grid32):
        coeffs = np.zeros(grid32.shape, dtype=complex)
        coeffs[16, 0] = 1.0  # k = N/2 is its own conjugate partner
        F = SpectralField(grid32, coeffs)
        assert np.max(np.abs(dealias(F).coeffs)) == 0.0

    def test_idempotent(self, grid64):
        F = forward(random_field(grid64, seed=13, max_mode=30, count=40))
        once = dealias(F)
        assert np.array_equal(dealias(once).coeffs, once.coeffs)

    def test_product_matches_double_resolution_oracle(self):
        # oracle: evaluate the same two trig polynomials at resolution 2N,
        # multiply exactly there, and truncate to the retained band
        n = 64
        coarse, fine = TorusGrid(2, n), TorusGrid(2, 2 * n)
        rng = np.random.default_rng(17)
        cut = n // 3
        terms_a, terms_b = [], []
        for _ in range(12):
            terms_a.append(((int(rng.integers(-cut, cut + 1)), int(rng.integers(-cut, cut + 1))), float(rng.normal()), float(rng.normal())))
            terms_b.append(((int(rng.integers(-cut, cut + 1)), int(rng.integers(-cut, cut + 1))), float(rng.normal()), float(rng.normal())))
        fa_c, fb_c = trig_field(coarse, terms_a), trig_field(coarse, terms_b)
        fa_f, fb_f = trig_field(fine, terms_a), trig_field(fine, terms_b)

        product_fine_hat = np.fft.fftn(fa_f.values * fb_f.values) / fine.size
        keep = dealias_mask(coarse)
        oracle = np.zeros(coarse.shape, dtype=complex)
        for kx in range(-cut, cut + 1):
            for ky in range(-cut, cut + 1):
                oracle[kx, ky] = product_fine_hat[kx, ky]
        oracle[~keep] = 0.0

        ours = dealias(forward(fa_c * fb_c)).coeffs
        assert np.max(np.abs(ours - oracle)) < 1e-12


class TestPerpGradientAndTranslate:
    def test_perp_gradient_divergence_free(self, grid32):
        psi = random_field(grid32, seed=21)
        v = perp_gradient(psi)
        assert v.divergence_free
        assert divergence_defect(v) < 1e-13

    def test_translate_full_period_identity(self, grid32):
        f = random_field(grid32, seed=22)
        g = translate(f, (1.0, 0.0))
        assert np.max(np.abs(g.values - f.values)) < 1e-12

    def test_translate_quarter_turn(self):
        g = TorusGrid(1, 64)
        f = ScalarField.from_function(g, lambda x: np.sin(2 * np.pi * x))
        shifted = translate(f, (0.25,))
        expected = ScalarField.from_function(g, lambda x: np.sin(2 * np.pi * (x - 0.25)))
        assert np.max(np.abs(shifted.values - expected.values)) < 1e-12
