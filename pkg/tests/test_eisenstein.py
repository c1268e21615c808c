import math
from fractions import Fraction

import numpy as np
import pytest

from eisenkit.automorphy import j_factor
from eisenkit.eisenstein import (EisensteinSeries, FourierExpansion, SpectralContext,
                                 eval_pair, fourier_coefficients, laplacian_residual,
                                 scattering_entry, scattering_matrix, tail_estimate)
from eisenkit.modgroup import ModularMatrix

CTX4 = SpectralContext(4, Fraction(1, 2))
W = 2.5 + 0j


def test_context_singular_cusps():
    assert CTX4.m_n == 2
    assert [c.label() for c in CTX4.singular] == ["inf", "0"]
    ctx8 = SpectralContext(8, Fraction(1, 2))
    assert ctx8.m_n == 3


def test_truncation_zero_gives_pure_power():
    series = EisensteinSeries(CTX4, 1, 0)
    for z in (0.2 + 0.7j, 1j, -0.4 + 1.3j):
        assert abs(complex(series.eval(z, W)) - z.imag**2.5) < 1e-14


def test_spec_automorphy_example():
    # gamma = (1,0;4,1) at z = 0.3 + 0.5i with the default truncation
    series = EisensteinSeries(CTX4, 1, 200)
    g = ModularMatrix(1, 0, 4, 1)
    z = 0.3 + 0.5j
    lhs = complex(series.eval(g.apply(z), W)) / j_factor(g, z, 0.5)
    rhs = CTX4.multiplier(g) * complex(series.eval(z, W))
    assert abs(lhs - rhs) <= 1e-6


def test_constant_term_decay():
    # after removing the constant pair the remainder drops like e^{-2 pi y};
    # heights are kept inside the window where the remainder clears the
    # truncation noise floor
    series = EisensteinSeries(CTX4, 1, 300)
    exp = fourier_coefficients(series, 1, W, n_max=2, heights=(0.7, 1.1))
    A, B = exp.constant_A, exp.constant_B

    def rem(y):
        return abs(complex(series.eval(1j * y, W)) - A * y**2.5 - B * y**-1.5)

    r1, r2, r3 = rem(0.8), rem(1.2), rem(1.6)
    assert r2 / r1 < 1.6 * math.exp(-2 * math.pi * 0.4)
    assert r3 / r2 < 1.6 * math.exp(-2 * math.pi * 0.4)


def test_fourier_constant_term_is_kronecker_delta():
    series = EisensteinSeries(CTX4, 1, 300)
    exp = fourier_coefficients(series, 1, W, n_max=4)
    assert abs(exp.constant_A - 1) <= 1e-5
    series2 = EisensteinSeries(CTX4, 2, 300)
    exp21 = fourier_coefficients(series2, 1, W, n_max=4)
    assert abs(exp21.constant_A) <= 1e-5


def test_fourier_cross_height_consistency():
    series = EisensteinSeries(CTX4, 1, 300)
    exp = fourier_coefficients(series, 1, W, n_max=5)
    for n, dev in exp.meta["cross_height_consistency"].items():
        mag = abs(exp.coeffs[int(n)])
        assert dev <= 1e-5 * max(mag, 1e-3)


def test_fourier_zero_for_pure_constant_function():
    class StubSeries:
        context = CTX4
        cusp_index = 1
        c_max = 0

        def eval_at_cusp(self, j, z, w, region=None):
            zs = np.atleast_1d(np.asarray(z, dtype=complex))
            return 2.0 * zs.imag**w + 0.5 * zs.imag ** (1 - w)

        def tail(self, w, y):
            return 0.0

    exp = fourier_coefficients(StubSeries(), 1, W, n_max=3)
    assert abs(exp.constant_A - 2.0) < 1e-10
    assert abs(exp.constant_B - 0.5) < 1e-10
    for n, c in exp.coeffs.items():
        assert abs(c) < 1e-6


def test_fourier_height_guards():
    series = EisensteinSeries(CTX4, 1, 100)
    with pytest.raises(ValueError):
        fourier_coefficients(series, 1, W, heights=(0.7, 0.7))
    with pytest.raises(ValueError):
        fourier_coefficients(series, 1, W, heights=(0.2, 1.1))


def test_scattering_entry_height_independent():
    p11_a = scattering_entry(4, Fraction(1, 2), 1, 1, W, c_max=240, heights=(0.7, 1.1))
    p11_b = scattering_entry(4, Fraction(1, 2), 1, 1, W, c_max=240, heights=(0.8, 1.3))
    assert abs(p11_a - p11_b) <= 1e-5
    # pinned from two independent height pairs at build time
    assert abs(p11_a - 0.0017929) < 2e-6


def test_scattering_matrix_shape():
    phi = scattering_matrix(4, Fraction(1, 2), W, c_max=160)
    assert phi.shape == (2, 2)
    phi8 = None  # level-8 entries exercised via the pair evaluator below
    assert abs(phi[0, 0] - 0.0017929) < 5e-5


def test_laplacian_eigenvalue():
    series = EisensteinSeries(CTX4, 1, 200)
    rng = np.random.default_rng(123)

    def f(z):
        return complex(series.eval(z, W))

    for _ in range(4):
        z = complex(rng.uniform(0, 1), rng.uniform(0.8, 1.5))
        assert laplacian_residual(f, z, W, 0.5) <= 1e-4


def test_tail_estimate_dominates_doubling():
    z = 0.31 + 0.62j
    e100 = complex(EisensteinSeries(CTX4, 1, 100).eval(z, W))
    e200 = complex(EisensteinSeries(CTX4, 1, 200).eval(z, W))
    assert abs(e200 - e100) <= tail_estimate(4, W, 100, z.imag)


def test_eval_pair_on_level_8():
    ctx8 = SpectralContext(8, Fraction(1, 2))
    series = EisensteinSeries(ctx8, 1, 120)
    g = ModularMatrix(1, 0, 8, 1)
    z = 0.11 + 0.62j
    lhs = complex(series.eval(g.apply(z), W)) / j_factor(g, z, 0.5)
    rhs = ctx8.multiplier(g) * complex(series.eval(z, W))
    assert abs(lhs - rhs) < 1e-5
    # the cusp-zero pair has the delta constant term
    v = complex(eval_pair(ctx8, ctx8.m_n, ctx8.m_n, 4.0j, W, c_max=120))
    assert abs(v - 4.0**2.5) < 1e-2 * 4.0**2.5


def test_expansion_json_round_trip():
    series = EisensteinSeries(CTX4, 1, 120)
    exp = fourier_coefficients(series, 1, W, n_max=3)
    again = FourierExpansion.from_json(exp.to_json())
    assert again.coeffs == exp.coeffs
    assert again.constant_A == exp.constant_A
    assert again.level == 4 and again.weight == Fraction(1, 2)


def test_eval_rejects_low_points_and_small_w():
    series = EisensteinSeries(CTX4, 1, 50)
    with pytest.raises(ValueError):
        series.eval(0.3 + 1e-6j, W)
    with pytest.raises(ValueError):
        series.eval(0.3 + 0.5j, 0.5)
    with pytest.raises(ValueError):
        EisensteinSeries(CTX4, 3, 50)
