import math

import numpy as np
import pytest

from numrad.bounds import (
    BOUND_IDS,
    bound_main1,
    bound_main3,
    bound_main4,
    bound_main11,
    bound_main11_young,
    bound_product_xy,
    bound_sum_norm,
    bound_th1,
    refined_young,
    zeta_value,
)
from numrad.ensembles import RngStream
from numrad.errors import (
    InvalidFunctionError,
    NotContractionError,
    NotNormalError,
    OutOfRangeError,
)
from numrad.funcpair import FunctionPair, HolderPair, power_pair, pow_of_pair
from numrad.linalg import (
    OffDiagPair,
    abs_op,
    adjoint,
    embed_offdiag,
    fn_of_abs,
    fn_of_psd,
    spectral_norm,
)
from numrad.radius import omega

ONE = [[1.0]]
HALF = power_pair(0.5)
HP22 = HolderPair(2.0, 2.0)


def rand_complex(g, m, n=None):
    n = m if n is None else n
    return (g.standard_normal((m, n)) + 1j * g.standard_normal((m, n))) / np.sqrt(2)


def test_bound_id_strings():
    assert BOUND_IDS == (
        "main1.v1", "main1.v2", "product_xy", "sum_norm", "sum_norm.normal",
        "main11.v1", "main11.v2", "main11.young.v1", "main11.young.v2",
        "main3.v1", "main3.v2", "main4.v1", "main4.v2", "th1",
    )


class TestRefinedYoung:
    def test_equal_arguments(self):
        assert refined_young(1, 1, 1) == (1.0, 1.0)

    def test_degenerate_argument(self):
        lhs, rhs = refined_young(4, 0, 1)
        assert lhs == pytest.approx(2.0) and rhs == pytest.approx(2.0)

    def test_m2_algebraic_identity(self):
        lhs, rhs = refined_young(9, 1, 2)
        assert lhs == pytest.approx(25.0) and rhs == pytest.approx(25.0)

    def test_property_random(self):
        g = np.random.default_rng(0)
        for _ in range(10000):
            a, b = g.uniform(0, 10, size=2)
            m = int(g.integers(1, 7))
            lhs, rhs = refined_young(a, b, m)
            assert lhs <= rhs + 1e-12 * max(1.0, rhs)

    def test_m2_identity_random(self):
        g = np.random.default_rng(1)
        for _ in range(200):
            a, b = g.uniform(0, 50, size=2)
            lhs, rhs = refined_young(a, b, 2)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)

    def test_rejects_bad_input(self):
        with pytest.raises(OutOfRangeError):
            refined_young(-1, 0, 1)
        with pytest.raises(OutOfRangeError):
            refined_young(1, 1, 0)


class TestMain1:
    def test_scalar_tight(self):
        out = bound_main1(OffDiagPair(ONE, ONE), HALF, 1.0, 1)
        assert out.value == pytest.approx(1.0, abs=1e-12)
        assert out.exponent == 1.0
        cert = omega(embed_offdiag(ONE, ONE), tol=1e-10)
        assert cert.lo == pytest.approx(1.0, abs=1e-10)

    def test_scalar_r3(self):
        out = bound_main1(OffDiagPair(ONE, ONE), HALF, 3.0, 1)
        assert out.value == pytest.approx(4.0, abs=1e-12)

    def test_scaled_nilpotent_tight(self):
        x = [[0.0, 2.0], [0.0, 0.0]]
        out = bound_main1(OffDiagPair(x, x), HALF, 1.0, 1)
        assert out.value == pytest.approx(1.0, abs=1e-12)
        cert = omega(embed_offdiag(x, x), tol=1e-9)
        assert cert.lo == pytest.approx(1.0, abs=1e-9)

    def test_specialization_identity(self):
        # alpha = 1/2, r = 1 collapses to the plain absolute-value formula
        g = np.random.default_rng(2)
        for _ in range(20):
            x = rand_complex(g, 2, 3)
            y = rand_complex(g, 3, 2)
            out = bound_main1(OffDiagPair(x, y), HALF, 1.0, 1)
            direct = 0.5 * math.sqrt(
                spectral_norm(abs_op(x) + abs_op(adjoint(y)))
            ) * math.sqrt(spectral_norm(abs_op(y) + abs_op(adjoint(x))))
            assert abs(out.value - direct) <= 1e-10 * max(1.0, direct)

    def test_y_equals_x_specialization(self):
        g = np.random.default_rng(3)
        for _ in range(10):
            x = rand_complex(g, 3)
            out = bound_main1(OffDiagPair(x, x), HALF, 1.0, 1)
            direct = 0.5 * spectral_norm(abs_op(x) + abs_op(adjoint(x)))
            assert abs(out.value - direct) <= 1e-10 * max(1.0, direct)

    def test_homogeneity_at_half(self):
        g = np.random.default_rng(4)
        x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
        r = 2.0
        base = bound_main1(OffDiagPair(x, y), HALF, r, 1).value
        scaled = bound_main1(OffDiagPair(3.0 * x, 3.0 * y), HALF, r, 1).value
        assert scaled == pytest.approx(3.0 ** r * base, rel=1e-9)

    def test_variant2_differs_generically(self):
        g = np.random.default_rng(5)
        x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
        pair = power_pair(0.25)
        v1 = bound_main1(OffDiagPair(x, y), pair, 1.0, 1).value
        v2 = bound_main1(OffDiagPair(x, y), pair, 1.0, 2).value
        assert v1 != pytest.approx(v2, rel=1e-12)

    def test_rejects_bad_pair(self):
        # f * g = t**2 differs from t on the sample t = 2 drawn from the spectrum
        broken = FunctionPair(f=lambda t: np.asarray(t, float),
                              g=lambda t: np.asarray(t, float), tag="t*t")
        with pytest.raises(InvalidFunctionError):
            bound_main1(OffDiagPair([[2.0]], [[2.0]]), broken, 1.0, 1)

    def test_rejects_bad_r(self):
        with pytest.raises(OutOfRangeError):
            bound_main1(OffDiagPair(ONE, ONE), HALF, 0.5, 1)


class TestProductXY:
    def test_identity_side2(self):
        out = bound_product_xy(np.eye(2), np.eye(2), 0.5, 1.0)
        assert out.value == pytest.approx(1.0, abs=1e-12)
        assert out.exponent == 0.5
        # contract: omega(XY)**(r/2) = 1 <= value
        assert omega(np.eye(2), tol=1e-10).lo ** 0.5 <= out.value + 1e-9

    def test_scalar_r2(self):
        out = bound_product_xy(ONE, ONE, 0.5, 2.0)
        assert out.value == pytest.approx(2.0, abs=1e-12)
        assert out.exponent == 1.0

    def test_contract_on_random(self):
        g = np.random.default_rng(6)
        for _ in range(10):
            x, y = rand_complex(g, 3), rand_complex(g, 3)
            out = bound_product_xy(x, y, 0.5, 2.0)
            cert = omega(x @ y, tol=1e-9)
            assert cert.lo ** out.exponent <= out.value + 1e-8 * max(1.0, out.value)


class TestSumNorm:
    def test_scalar_equality(self):
        out = bound_sum_norm(ONE, ONE, 1.0, "+")
        assert out.value == pytest.approx(2.0, abs=1e-12)
        assert spectral_norm(np.array(ONE) + adjoint(ONE)) == pytest.approx(2.0)

    def test_normal_scalar_equality(self):
        out = bound_sum_norm(ONE, ONE, 1.0, "+", normal_mode=True)
        assert out.value == pytest.approx(2.0, abs=1e-12)

    def test_normal_contract_random(self):
        g = np.random.default_rng(7)
        for _ in range(10):
            # unitarily diagonalized pairs are normal by construction
            q, r = np.linalg.qr(rand_complex(g, 3))
            u = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
            x = u @ np.diag(g.standard_normal(3) + 1j * g.standard_normal(3)) @ adjoint(u)
            y = u @ np.diag(g.standard_normal(3) + 1j * g.standard_normal(3)) @ adjoint(u)
            for sign, s in (("+", 1.0), ("-", -1.0)):
                out = bound_sum_norm(x, y, 1.5, sign, normal_mode=True)
                lhs = spectral_norm(x + s * y) ** 1.5
                assert lhs <= out.value + 1e-8 * max(1.0, out.value)

    def test_general_contract_random(self):
        g = np.random.default_rng(8)
        for _ in range(10):
            x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
            out = bound_sum_norm(x, y, 2.0, "-")
            lhs = spectral_norm(x - adjoint(y)) ** 2.0
            assert lhs <= out.value + 1e-8 * max(1.0, out.value)

    def test_rejects_non_normal(self):
        with pytest.raises(NotNormalError):
            bound_sum_norm([[0, 1], [0, 0]], np.eye(2), 1.0, "+", normal_mode=True)


class TestMain11:
    def test_stated_constant_counterexample(self):
        out = bound_main11(OffDiagPair(ONE, ONE), HALF, 1.0, HP22, 1, "as_stated")
        assert out.value == pytest.approx(0.5, abs=1e-12)
        cert = omega(embed_offdiag(ONE, ONE), tol=1e-10)
        assert out.value < cert.lo ** out.exponent  # the documented violation

    def test_proved_constant_passes(self):
        out = bound_main11(OffDiagPair(ONE, ONE), HALF, 1.0, HP22, 1, "as_proved")
        assert out.value == pytest.approx(2.0, abs=1e-12)
        cert = omega(embed_offdiag(ONE, ONE), tol=1e-10)
        assert out.value >= cert.lo ** out.exponent

    def test_default_mode_is_proved(self):
        out = bound_main11(OffDiagPair(ONE, ONE), HALF, 1.0, HP22, 1)
        assert out.params["constant_mode"] == "as_proved"
        assert out.value == pytest.approx(2.0, abs=1e-12)

    def test_y_equals_x_collapse(self):
        # Y = X, p = q = 2, proved constant: 2**(2r-3) ||(f^{2r}(|X|)+g^{2r}(|X*|))^2||
        g = np.random.default_rng(9)
        for k in range(20):
            x = rand_complex(g, 2 + k % 3)
            r = (1.0, 1.5, 2.0)[k % 3]
            pair = power_pair((0.25, 0.5, 0.8)[k % 3])
            out = bound_main11(OffDiagPair(x, x), pair, r, HP22, 1, "as_proved")
            fe, ge = pow_of_pair(pair, 2 * r)
            s = fn_of_abs(x, fe) + fn_of_abs(adjoint(x), ge)
            direct = 2.0 ** (2 * r - 3) * spectral_norm(
                fn_of_psd(s, lambda t: np.asarray(t) ** 2))
            assert abs(out.value - direct) <= 1e-10 * max(1.0, direct)

    def test_power_norm_identity_for_psd(self):
        # ||S^p|| = ||S||^p for PSD S checks the matrix-power route
        g = np.random.default_rng(10)
        x = rand_complex(g, 3)
        out = bound_main11(OffDiagPair(x, x), HALF, 1.0, HolderPair(4.0, 4 / 3), 1)
        n1 = out.terms["alpha_sq"] * 16.0       # ||S1^4||
        fe, ge = pow_of_pair(HALF, 2.0)
        s1 = fn_of_abs(x, fe) + fn_of_abs(adjoint(x), ge)
        assert n1 == pytest.approx(spectral_norm(s1) ** 4.0, rel=1e-9)


class TestMain11Young:
    def test_scalar_tight(self):
        out = bound_main11_young(OffDiagPair(ONE, ONE), HALF, 1.0, HP22, 1)
        assert out.value == pytest.approx(1.0, abs=1e-12)
        assert out.exponent == 1.0

    def test_swap_symmetry(self):
        g = np.random.default_rng(11)
        x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
        hp = HolderPair(4.0, 4.0 / 3.0)
        hq = HolderPair(4.0 / 3.0, 4.0)
        a = bound_main11_young(OffDiagPair(x, y), HALF, 1.5, hp, 1)
        b = bound_main11_young(OffDiagPair(y, x), HALF, 1.5, hq, 1)
        assert a.value == pytest.approx(b.value, rel=1e-12)

    def test_contract_random(self):
        g = np.random.default_rng(12)
        for k in range(10):
            x, y = rand_complex(g, 2), rand_complex(g, 2)
            hp = HolderPair(1.25, 5.0)
            out = bound_main11_young(OffDiagPair(x, y), power_pair(0.75), 1.5, hp, 2)
            cert = omega(embed_offdiag(x, y), tol=1e-9)
            assert cert.lo ** out.exponent <= out.value + 1e-8 * max(1.0, out.value)


class TestMain3:
    def test_scalar_case(self):
        guaranteed, refined, zeta = bound_main3(OffDiagPair(ONE, ONE), HALF, 1.0, 1)
        assert guaranteed.value == pytest.approx(2.0, abs=1e-12)
        assert zeta.value <= 1e-10
        assert refined.value <= guaranteed.value
        # the matching split puts equal mass on both components
        x1, x2 = zeta.witness
        assert np.linalg.norm(x1) == pytest.approx(np.linalg.norm(x2), abs=1e-5)

    def test_y_equals_x_guaranteed_form(self):
        g = np.random.default_rng(13)
        for k in range(10):
            x = rand_complex(g, 2 + k % 2)
            r = (1.0, 2.0)[k % 2]
            guaranteed, _, _ = bound_main3(OffDiagPair(x, x), HALF, r, 1)
            fe, ge = pow_of_pair(HALF, 2 * r)
            a = fn_of_abs(x, fe) + fn_of_abs(adjoint(x), ge)
            assert guaranteed.value == pytest.approx(
                2.0 ** (r - 1.0) * spectral_norm(a), rel=1e-10)

    def test_zeta_estimate_recomputes(self):
        g = np.random.default_rng(14)
        x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
        _, _, zeta = bound_main3(OffDiagPair(x, y), power_pair(0.25), 1.5, 1)
        fe, ge = pow_of_pair(power_pair(0.25), 3.0)
        a = fn_of_abs(x, fe) + fn_of_abs(adjoint(y), ge)
        b = fn_of_abs(y, fe) + fn_of_abs(adjoint(x), ge)
        x1, x2 = zeta.witness
        assert zeta_value(a, b, x1, x2) == pytest.approx(
            zeta.value, abs=1e-10 * max(1.0, zeta.value))
        assert abs(np.linalg.norm(x1) ** 2 + np.linalg.norm(x2) ** 2 - 1.0) <= 1e-10

    def test_zeta_theta_scan_oracle(self):
        # independent oracle: extremal eigenvectors of A, B with the matching
        # angle drive the gap to zero, so the infimum estimate must be tiny
        g = np.random.default_rng(15)
        for _ in range(10):
            x, y = rand_complex(g, 3, 2), rand_complex(g, 2, 3)
            guaranteed, refined, zeta = bound_main3(
                OffDiagPair(x, y), HALF, 1.0, 1, stream=RngStream(5))
            fe, ge = pow_of_pair(HALF, 2.0)
            a = fn_of_abs(x, fe) + fn_of_abs(adjoint(y), ge)
            b = fn_of_abs(y, fe) + fn_of_abs(adjoint(x), ge)
            wa, va = np.linalg.eigh(a)
            wb, vb = np.linalg.eigh(b)
            # for eigenvectors u, v the gap vanishes at tan(theta) = sqrt(b/a)
            scan = math.inf
            for i in (0, a.shape[0] - 1):
                for j in (0, b.shape[0] - 1):
                    th = math.atan2(math.sqrt(max(wb[j], 0.0)),
                                    math.sqrt(max(wa[i], 0.0)))
                    scan = min(scan, zeta_value(a, b,
                                                math.cos(th) * vb[:, j],
                                                math.sin(th) * va[:, i]))
            assert scan <= 1e-10
            assert zeta.value <= 1e-6
            assert refined.value <= guaranteed.value

    def test_guaranteed_contract(self):
        g = np.random.default_rng(16)
        for _ in range(10):
            x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
            guaranteed, _, _ = bound_main3(OffDiagPair(x, y), power_pair(0.75), 2.0, 2)
            cert = omega(embed_offdiag(x, y), tol=1e-9)
            assert cert.lo ** 2.0 <= guaranteed.value + 1e-8 * max(1.0, guaranteed.value)


class TestMain4:
    def test_scalar_identity_tight(self):
        item = (ONE, ONE, ONE, ONE, ONE, ONE)
        out = bound_main4([item], HALF, 1.0, 1)
        assert out.value == pytest.approx(1.0, abs=1e-12)
        assert out.exponent == 1.0

    def test_additivity(self):
        item = (ONE, ONE, ONE, ONE, ONE, ONE)
        out = bound_main4([item] * 4, HALF, 1.0, 1)
        assert out.value == pytest.approx(4.0, abs=1e-12)

    def test_half_contraction_scaling(self):
        half_eye = [[0.5]]
        item = (half_eye, half_eye, half_eye, half_eye, ONE, ONE)
        out = bound_main4([item], HALF, 1.0, 1)
        # D* M D = M/4 inside both norms, so the product of square roots is 1/4
        assert out.value == pytest.approx(0.25, abs=1e-12)

    def test_rejects_non_contraction(self):
        item = ([[2.0]], ONE, ONE, ONE, ONE, ONE)
        with pytest.raises(NotContractionError):
            bound_main4([item], HALF, 1.0, 1)

    def test_identity_contractions_reduce_to_offdiag_sum(self):
        g = np.random.default_rng(17)
        x, y = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
        eye_m, eye_n = np.eye(2), np.eye(3)
        item = (eye_m, eye_n, eye_m, eye_n, x, y)
        out = bound_main4([item], power_pair(0.25), 2.0, 1)
        fe, ge = pow_of_pair(power_pair(0.25), 4.0)
        t1 = spectral_norm(fn_of_abs(x, fe) + fn_of_abs(adjoint(y), ge))
        t2 = spectral_norm(fn_of_abs(y, fe) + fn_of_abs(adjoint(x), ge))
        direct = 2.0 ** 0.0 * math.sqrt(t1) * math.sqrt(t2)
        assert out.value == pytest.approx(direct, rel=1e-12)


class TestTh1:
    def test_diagonal_blocks(self):
        out = bound_th1([([[2.0]], [[0.0]], [[0.0]], [[5.0]])], 1.0, omega_tol=1e-10)
        assert out.value == pytest.approx(5.0, abs=1e-8)

    def test_offdiagonal_blocks_tight(self):
        out = bound_th1([([[0.0]], [[1.0]], [[1.0]], [[0.0]])], 1.0)
        assert out.value == pytest.approx(1.0, abs=1e-12)
        cert = omega([[0, 1], [1, 0]], tol=1e-10)
        assert cert.lo == pytest.approx(1.0, abs=1e-10)

    def test_first_row_blocks(self):
        out = bound_th1([([[1.0]], [[1.0]], [[0.0]], [[0.0]])], 1.0, omega_tol=1e-10)
        expected = 0.5 * (1.0 + math.sqrt(2.0))
        assert out.value == pytest.approx(expected, abs=1e-8)
        cert = omega([[1, 1], [0, 0]], tol=1e-10)
        assert cert.lo <= out.value + 1e-8
        # the collapsed formula is exactly attained on the first-row block
        assert cert.lo == pytest.approx(expected, abs=1e-9)

    def test_specializations_collapse(self):
        g = np.random.default_rng(18)
        a, d = rand_complex(g, 2), rand_complex(g, 3)
        b, c = rand_complex(g, 2, 3), rand_complex(g, 3, 2)
        z22, z23, z32, z33 = (np.zeros(s) for s in ((2, 2), (2, 3), (3, 2), (3, 3)))
        tol = 1e-10
        wa = omega(a, tol).hi
        wd = omega(d, tol).hi
        nb, nc = spectral_norm(b), spectral_norm(c)
        b_sq = rand_complex(g, 2)
        nb_sq = spectral_norm(b_sq)
        for p in (1.0, 2.0):
            # repeated-block special case: A = D, B = C (square blocks)
            got = bound_th1([(a, b_sq, b_sq, a)], p, tol).value
            assert got == pytest.approx((wa + nb_sq) ** p, rel=1e-12)
            # diagonal special case
            got = bound_th1([(a, z23, z32, d)], p, tol).value
            assert got == pytest.approx(max(wa ** p, wd ** p), rel=1e-12)
            # first-row special case
            got = bound_th1([(a, b, z32, z33)], p, tol).value
            expect = 2.0 ** (-p) * (wa + math.sqrt(wa ** 2 + nb ** 2)) ** p
            assert got == pytest.approx(expect, rel=1e-12)
            # off-diagonal special case
            got = bound_th1([(z22, b, c, z33)], p, tol).value
            assert got == pytest.approx(2.0 ** (-p) * (nb + nc) ** p, rel=1e-12)

    def test_multi_block_sum(self):
        blocks = [([[1.0]], [[0.0]], [[0.0]], [[1.0]])] * 3
        out = bound_th1(blocks, 2.0, omega_tol=1e-10)
        assert out.value == pytest.approx(3.0, abs=1e-7)
