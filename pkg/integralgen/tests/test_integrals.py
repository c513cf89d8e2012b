import numpy as np
import pytest
from scipy.integrate import quad

from integralgen.basis import (STO3G, build_basis, make_basis_function,
                               primitive_norm)
from integralgen.integrals import (boys, eri, kinetic, nuclear, overlap,
                                   primitive_eri, primitive_kinetic,
                                   primitive_nuclear, primitive_overlap)


class TestBoys:
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    @pytest.mark.parametrize("x", [0.0, 0.3, 1.7, 12.0])
    def test_matches_quadrature(self, n, x):
        reference, _ = quad(lambda t: t ** (2 * n) * np.exp(-x * t * t), 0, 1)
        assert boys(n, x) == pytest.approx(reference, abs=1e-12)


class TestPrimitives:
    def test_ss_overlap_closed_form(self):
        a, b = 0.8, 1.3
        A = (0.0, 0.0, 0.0)
        B = (0.4, -0.2, 0.9)
        r2 = sum((ai - bi) ** 2 for ai, bi in zip(A, B))
        p = a + b
        expected = (np.pi / p) ** 1.5 * np.exp(-a * b / p * r2)
        s = primitive_overlap(a, (0, 0, 0), A, b, (0, 0, 0), B)
        assert s == pytest.approx(expected, rel=1e-12)

    def test_ss_kinetic_closed_form(self):
        a, b = 0.9, 0.5
        A = (0.0, 0.0, 0.0)
        B = (0.7, 0.1, -0.3)
        r2 = sum((ai - bi) ** 2 for ai, bi in zip(A, B))
        p = a + b
        q = a * b / p
        expected = q * (3.0 - 2.0 * q * r2) * (np.pi / p) ** 1.5 * np.exp(-q * r2)
        t = primitive_kinetic(a, (0, 0, 0), A, b, (0, 0, 0), B)
        assert t == pytest.approx(expected, rel=1e-12)

    def test_ss_nuclear_closed_form(self):
        a, b = 1.1, 0.6
        A = (0.1, 0.0, 0.0)
        B = (-0.2, 0.3, 0.0)
        C = (0.0, 0.0, 0.5)
        p = a + b
        P = tuple((a * ai + b * bi) / p for ai, bi in zip(A, B))
        r2_ab = sum((ai - bi) ** 2 for ai, bi in zip(A, B))
        r2_pc = sum((pi - ci) ** 2 for pi, ci in zip(P, C))
        expected = (2.0 * np.pi / p * np.exp(-a * b / p * r2_ab)
                    * boys(0, p * r2_pc))
        v = primitive_nuclear(a, (0, 0, 0), A, b, (0, 0, 0), B, C)
        assert v == pytest.approx(expected, rel=1e-12)

    def test_ssss_eri_closed_form(self):
        a, b, c, d = 0.9, 0.4, 1.2, 0.7
        A = (0.0, 0.0, 0.0)
        B = (0.5, 0.0, 0.0)
        C = (0.0, 0.4, 0.0)
        D = (0.1, 0.1, 0.7)
        p, q = a + b, c + d
        P = tuple((a * ai + b * bi) / p for ai, bi in zip(A, B))
        Q = tuple((c * ci + d * di) / q for ci, di in zip(C, D))
        alpha = p * q / (p + q)
        r2_ab = sum((ai - bi) ** 2 for ai, bi in zip(A, B))
        r2_cd = sum((ci - di) ** 2 for ci, di in zip(C, D))
        r2_pq = sum((pi - qi) ** 2 for pi, qi in zip(P, Q))
        expected = (2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))
                    * np.exp(-a * b / p * r2_ab) * np.exp(-c * d / q * r2_cd)
                    * boys(0, alpha * r2_pq))
        value = primitive_eri(a, (0, 0, 0), A, b, (0, 0, 0), B,
                              c, (0, 0, 0), C, d, (0, 0, 0), D)
        assert value == pytest.approx(expected, rel=1e-12)

    def test_p_overlap_from_center_derivative(self):
        # An unnormalized p_x primitive is (1/2a) d/dAx of the s primitive,
        # so the (p_x|s) overlap must match a finite difference of (s|s).
        a, b = 0.7, 1.1
        B = (0.3, -0.2, 0.5)
        h = 1e-6

        def s_overlap(ax):
            return primitive_overlap(a, (0, 0, 0), (ax, 0.0, 0.0),
                                     b, (0, 0, 0), B)

        derivative = (s_overlap(h) - s_overlap(-h)) / (2 * h)
        value = primitive_overlap(a, (1, 0, 0), (0.0, 0.0, 0.0),
                                  b, (0, 0, 0), B)
        assert value == pytest.approx(derivative / (2 * a), abs=1e-9)


class TestContracted:
    def test_contracted_functions_normalized(self):
        atoms = [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.8))]
        for bf in build_basis(atoms):
            assert overlap(bf, bf) == pytest.approx(1.0, abs=1e-12)

    def test_p_components_orthogonal(self):
        shells = STO3G["Li"]["shells"]
        _, exps, coefs = shells[2]
        px = make_basis_function((0.0, 0.0, 0.0), (1, 0, 0), exps, coefs)
        py = make_basis_function((0.0, 0.0, 0.0), (0, 1, 0), exps, coefs)
        assert overlap(px, py) == pytest.approx(0.0, abs=1e-14)

    def test_primitive_norm_s_type(self):
        alpha = 0.9
        expected = (2 * alpha / np.pi) ** 0.75
        assert primitive_norm(alpha, (0, 0, 0)) == pytest.approx(expected)

    def test_contracted_eri_symmetry(self):
        atoms = [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.9))]
        b1, b2 = build_basis(atoms)
        v1 = eri(b1, b2, b1, b2)
        v2 = eri(b2, b1, b1, b2)
        v3 = eri(b1, b2, b2, b1)
        assert v1 == pytest.approx(v2, rel=1e-12)
        assert v1 == pytest.approx(v3, rel=1e-12)

    def test_kinetic_symmetric(self):
        atoms = [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 2.0))]
        basis = build_basis(atoms)
        for i in range(len(basis)):
            for j in range(len(basis)):
                assert kinetic(basis[i], basis[j]) == pytest.approx(
                    kinetic(basis[j], basis[i]), abs=1e-12)

    def test_nuclear_negative_definite_diagonal(self):
        atoms = [("H", (0.0, 0.0, 0.0))]
        (bf,) = build_basis(atoms)
        assert nuclear(bf, bf, (0.0, 0.0, 0.0)) > 0  # bare integral is positive
