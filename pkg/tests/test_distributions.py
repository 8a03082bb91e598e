import math

import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermegauss

from chaos_bounds.distributions import (
    MomentSequence,
    builtin_inputs,
    check_subgaussian,
    gaussian_moments,
    get_input,
    hermite,
    limit_comparison,
    rademacher_moments,
    sharpness_form,
    uniform_moments,
)
from chaos_bounds.form_core import v_squared
from chaos_bounds.montecarlo import sample_z


class TestMomentSequence:
    def test_builtin_values(self):
        assert rademacher_moments(4).even_moments == (1.0,) * 4
        assert gaussian_moments(4).even_moments == (1.0, 3.0, 15.0, 105.0)
        assert uniform_moments(3).even_moments == pytest.approx((1.0, 9 / 5, 27 / 7))

    def test_moment_lookup(self):
        g = gaussian_moments(3)
        assert g.moment(0) == 1.0
        assert g.moment(5) == 0.0
        assert g.moment(6) == 15.0
        with pytest.raises(ValueError, match="up to order 6"):
            g.moment(8)

    def test_table(self):
        np.testing.assert_array_equal(gaussian_moments(2).table(4), [1, 0, 1, 0, 3])

    def test_unit_modulus(self):
        assert rademacher_moments().is_unit_modulus()
        assert not gaussian_moments().is_unit_modulus()

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MomentSequence((1.0, -1.0))


class TestSubGaussianCheck:
    @pytest.mark.parametrize("seq", [rademacher_moments(), gaussian_moments(), uniform_moments()])
    def test_builtins_pass(self, seq):
        assert check_subgaussian(seq) == (True, None)

    def test_first_failure_reported(self):
        assert check_subgaussian(MomentSequence((1.0, 3.0, 16.0, 200.0))) == (False, 3)

    def test_variance_above_one_fails(self):
        assert check_subgaussian(MomentSequence((1.5,))).first_failure == 1


class TestInputs:
    def test_catalog(self):
        assert sorted(builtin_inputs()) == ["gaussian", "rademacher", "uniform"]
        with pytest.raises(ValueError, match="unknown distribution"):
            get_input("cauchy")

    @pytest.mark.parametrize("name", ["rademacher", "gaussian", "uniform"])
    def test_empirical_moments(self, name):
        inp = get_input(name)
        x = inp.sample(np.random.default_rng(5), 10**6)
        for order in (1, 2, 3, 4, 6):
            p = x**order
            se = p.std(ddof=1) / math.sqrt(x.size)
            assert abs(p.mean() - inp.moments.moment(order)) <= 5 * se + 1e-12

    def test_rademacher_values(self):
        x = get_input("rademacher").sample(np.random.default_rng(0), 1000)
        assert set(np.unique(x)) == {-1.0, 1.0}


class TestHermite:
    def test_low_degrees(self):
        x = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(hermite(0, x), 1.0)
        np.testing.assert_allclose(hermite(1, x), x)
        np.testing.assert_allclose(hermite(2, x), x**2 - 1)
        np.testing.assert_allclose(hermite(3, x), x**3 - 3 * x)
        np.testing.assert_allclose(hermite(4, x), x**4 - 6 * x**2 + 3)

    def test_scalar(self):
        assert hermite(2, 2.0) == 3.0

    @pytest.mark.parametrize("k", range(0, 9))
    def test_orthonormality_by_quadrature(self, k):
        nodes, weights = hermegauss(40)
        weights = weights / weights.sum()
        assert np.dot(weights, hermite(k, nodes) ** 2) == pytest.approx(math.factorial(k), rel=1e-10)
        for j in range(k):
            assert abs(np.dot(weights, hermite(k, nodes) * hermite(j, nodes))) < 1e-8 * math.factorial(k)


class TestSharpness:
    @pytest.mark.parametrize("k,n", [(1, 5), (2, 6), (3, 7)])
    def test_form_shape_and_variance(self, k, n):
        f = sharpness_form(k, n, 2.0)
        assert len(f.coeffs) == math.comb(n, k)
        assert f.is_uniform_complete()
        assert v_squared(f) == pytest.approx(4.0)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            sharpness_form(3, 2, 1.0)

    def test_limit_second_moment(self):
        # E (V He_k(eta))^2 = V^2 k!, and the form has E Z^2 = k! v2 = k! V^2
        z = sample_z(sharpness_form(2, 50, 1.5), get_input("rademacher"), 200_000, seed=3)
        se = (z**2).std(ddof=1) / math.sqrt(z.size)
        assert abs((z**2).mean() - 2 * 1.5**2) <= 5 * se

    def test_ks_decreases(self):
        rows = limit_comparison(2, [10, 40, 160], 1.0, 20_000, seed=11)
        d = [r.ks_distance for r in rows]
        assert d[0] > d[1] > d[2]
        assert [r.n for r in rows] == [10, 40, 160]

    def test_reproducible(self):
        a = limit_comparison(2, [10, 20], 1.0, 2000, seed=4)
        b = limit_comparison(2, [10, 20], 1.0, 2000, seed=4)
        assert a == b

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            limit_comparison(2, [20, 10], 1.0, 100, seed=0)
