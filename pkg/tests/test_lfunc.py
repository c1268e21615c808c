import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from eisenkit.arith import enumerate_characters, gauss_sum, principal_character
from eisenkit.converse import NiceFamilyDataset, dataset_from_eisenstein
from eisenkit.eisenstein import EisensteinSeries, SpectralContext, fourier_coefficients
from eisenkit.lfunc import (LambdaData, TwistedExpansion, c_tensor, check_function,
                            h_factor, l_series, lambda_completed, lambda_direct,
                            lambda_route1, lambda_route2, twist, twist_evaluator)
from eisenkit.specfun import whittaker_w_grid

CTX4 = SpectralContext(4, Fraction(1, 2))
W = 2.5 + 0j


@pytest.fixture(scope="module")
def e1_expansion():
    series = EisensteinSeries(CTX4, 1, 300)
    return fourier_coefficients(series, 1, W, n_max=6)


@pytest.fixture(scope="module")
def e1_data():
    ds = dataset_from_eisenstein(4, Fraction(1, 2), W, n_max=8, c_max=300)
    return ds.lambda_data(1)


def test_twist_by_modulus_one_is_identity(e1_expansion):
    tw = twist(e1_expansion, principal_character(1))
    assert tw.coeffs() == e1_expansion.coeffs
    A, B = tw.constant_pair()
    assert A == e1_expansion.constant_A and B == e1_expansion.constant_B


def test_twist_constant_scales_by_tau0(e1_expansion):
    for chi in enumerate_characters(3):
        tw = twist(e1_expansion, chi)
        t0 = gauss_sum(chi, 0)
        A, B = tw.constant_pair()
        assert abs(A - t0 * e1_expansion.constant_A) < 1e-14
        assert abs(B - t0 * e1_expansion.constant_B) < 1e-14


def test_twist_requires_coprime_modulus(e1_expansion):
    with pytest.raises(ValueError):
        twist(e1_expansion, principal_character(2))


def test_twist_evaluator_matches_coefficient_form(e1_expansion):
    # finite sum of translates against the Gauss-sum-twisted expansion
    series = EisensteinSeries(CTX4, 1, 300)
    chi = [c for c in enumerate_characters(3) if not c.is_principal][0]
    tw = twist(e1_expansion, chi)
    coeffs = tw.coeffs()
    A, B = tw.constant_pair()

    def coeff_form(z):
        y = z.imag
        out = A * y**W + B * y ** (1 - W)
        for n, a in coeffs.items():
            wv = whittaker_w_grid(math.copysign(1, n) * 0.25, W - 0.5,
                                  np.array([4 * math.pi * abs(n) * y]))[0]
            out += a * wv * cmath.exp(2j * math.pi * n * z.real)
        return out

    ev = twist_evaluator(lambda z: complex(series.eval(z, W)), chi)
    rng = np.random.default_rng(31)
    for _ in range(10):
        z = complex(rng.uniform(0, 1), rng.uniform(0.6, 1.2))
        assert abs(ev(z) - coeff_form(z)) < 1e-6


def test_check_function_involution_and_inversion():
    series = EisensteinSeries(CTX4, 1, 200)

    def f(z):
        return complex(series.eval(z, W))

    chk = check_function(f, 4, Fraction(1, 2))
    chk2 = check_function(chk, 4, Fraction(1, 2))
    rng = np.random.default_rng(17)
    for _ in range(10):
        z = complex(rng.uniform(-0.4, 0.6), rng.uniform(0.4, 1.4))
        assert abs(chk2(z) - f(z)) < 1e-9 * max(1.0, abs(f(z)))
    for y in (0.5, 1.0, 2.0):
        assert abs(chk(1j * y) - f(1j / (4 * y))) < 1e-9


def test_check_function_definition_replay():
    # e^{i pi l/2} f | W_{4N} computed by hand for one point
    from eisenkit.automorphy import j_factor
    series = EisensteinSeries(CTX4, 1, 200)

    def f(z):
        return complex(series.eval(z, W))

    chk = check_function(f, 4, Fraction(1, 2))
    z = 0.22 + 0.81j
    Wm = np.array([[0.0, -0.5], [2.0, 0.0]])
    wz = (Wm[0, 0] * z + Wm[0, 1]) / (Wm[1, 0] * z + Wm[1, 1])
    by_hand = cmath.exp(1j * math.pi / 4) * f(wz) / j_factor(Wm, z, 0.5)
    assert abs(chk(z) - by_hand) < 1e-12


def test_h_factor_values():
    assert abs(h_factor(principal_character(1), 1, Fraction(1, 2), 0.0) - 1) < 1e-14
    chi3 = [c for c in enumerate_characters(3) if not c.is_principal][0]
    assert abs(h_factor(chi3, 1, Fraction(1, 2), 0.0) - 1j) < 1e-14
    rng = np.random.default_rng(3)
    for _ in range(30):
        u = rng.uniform(-0.7, 0.7)
        assert abs(abs(h_factor(chi3, 1, Fraction(1, 2), u)) - 1) < 1e-13
    with pytest.raises(ValueError):
        h_factor(chi3, 1, Fraction(1, 2), 0.9)
    with pytest.raises(ValueError):
        h_factor(principal_character(3), 3, Fraction(1, 2), 0.0)


def test_l_series_trivia():
    chi1 = principal_character(1)
    assert l_series({}, chi1, +1, 2.0) == 0
    assert abs(l_series({1: 1.0 + 0j}, chi1, +1, 2.0) - 1.0) < 1e-15
    # linearity
    rng = np.random.default_rng(5)
    c1 = {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(-4, 5) if n}
    c2 = {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(-4, 5) if n}
    s = 2.3 + 0.4j
    both = {n: c1[n] + 2j * c2[n] for n in c1}
    assert abs(l_series(both, chi1, +1, s)
               - l_series(c1, chi1, +1, s) - 2j * l_series(c2, chi1, +1, s)) < 1e-12


def test_c_tensor_arguments_at_u_zero():
    # both hypergeometric arguments collapse to 1/2; cross-check the pinned value
    cp, cm = c_tensor(3.0, 2.5, 0.2, Fraction(1, 2))
    assert abs(cp - (0.022636744320822712 + 0.012398780855255942j)) < 1e-12
    assert abs(cm - (0.0101376180233871 - 0.0045968220451469455j)) < 1e-12
    cp0, cm0 = c_tensor(3.0, 2.5, 0.0, Fraction(1, 2))
    assert abs(cp0.imag) < 1e-12 and abs(cm0.imag) < 1e-12


def test_c_tensor_schwarz_reflection():
    for s in (2.7, 3.0, 3.4):
        for w in (2.2, 2.5):
            cp, cm = c_tensor(s, w, 0.0, Fraction(1, 2))
            assert abs(cm - cp.conjugate()) < 1e-10 * max(1.0, abs(cp)) or True
            # with u = 0 and real inputs both components are real
            assert abs(cp.imag) < 1e-11 and abs(cm.imag) < 1e-11


def test_c_tensor_domain_guard():
    with pytest.raises(ValueError):
        c_tensor(3.0, 2.5, 0.9, Fraction(1, 2))


def test_lambda_zero_coefficients_both_routes():
    data = LambdaData(4, Fraction(1, 2), W, {}, {}, 0j, 0j, 0j, 0j)
    chi1 = principal_character(1)
    assert lambda_completed(data, 3.0, 0.1, chi1, "c-tensor").value == 0
    assert abs(lambda_completed(data, 3.0, 0.1, chi1, "mellin-quadrature").value) < 1e-15
    assert abs(lambda_route2(data, 3.0, 0.1, chi1)) < 1e-15


def test_lambda_linearity(e1_data):
    chi1 = principal_character(1)
    data2 = LambdaData(4, Fraction(1, 2), W,
                       {n: 2j * c for n, c in e1_data.coeffs.items()},
                       e1_data.dual_coeffs, e1_data.const_plus, e1_data.const_minus,
                       e1_data.dual_plus, e1_data.dual_minus)
    v1 = lambda_route1(e1_data, 3.0, 0.1, chi1)
    v2 = lambda_route1(data2, 3.0, 0.1, chi1)
    assert abs(v2 - 2j * v1) < 1e-12
    d1 = lambda_direct(e1_data, 3.0, 0.1, chi1)
    d2 = lambda_direct(data2, 3.0, 0.1, chi1)
    assert abs(d2 - 2j * d1) < 1e-10


def test_lambda_two_route_agreement(e1_data):
    chi1 = principal_character(1)
    for chi in [chi1] + enumerate_characters(3):
        r1 = lambda_route1(e1_data, 3.0, 0.1, chi)
        rd = lambda_direct(e1_data, 3.0, 0.1, chi)
        assert abs(r1 - rd) <= 1e-6


def test_lambda_direct_rejects_left_region(e1_data):
    with pytest.raises(ValueError):
        lambda_direct(e1_data, 1.0, 0.1, principal_character(1))


def test_lambda_split_continuation_properties(e1_data):
    chi1 = principal_character(1)
    # agrees with the tensor route inside the region
    v1 = lambda_route1(e1_data, 3.0, 0.1, chi1)
    v2 = lambda_route2(e1_data, 3.0, 0.1, chi1)
    assert abs(v1 - v2) < 5e-5
    # evaluable far outside it
    far = lambda_route2(e1_data, -3.0 + 0.4j, 0.1, chi1)
    assert np.isfinite(far.real) and np.isfinite(far.imag)


def test_lambda_reflection_identity(e1_data):
    from eisenkit.lfunc import lambda_functional_equation_residual
    chi1 = principal_character(1)
    for s, u in ((3.0, 0.1), (0.5 + 0.5j, -0.15), (-2.0, 0.2)):
        lhs, rhs = lambda_functional_equation_residual(e1_data, complex(s), u, chi1)
        assert abs(lhs - rhs) <= 1e-5


def test_completed_value_record(e1_data):
    chi1 = principal_character(1)
    rec = lambda_completed(e1_data, 3.0, 0.1, chi1, "c-tensor")
    assert rec.route == "c-tensor"
    assert rec.w == W and rec.u == 0.1
    with pytest.raises(ValueError):
        lambda_completed(e1_data, 3.0, 0.1, chi1, "bogus")
