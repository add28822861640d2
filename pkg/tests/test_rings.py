import random
from fractions import Fraction

import pytest

from frobdyn.errors import DomainError
from frobdyn.linalg import EndoMatrix
from frobdyn.rings import (
    AlgebraicEigenvalue,
    EndoRing,
    eigenvalue_classes,
    is_frobenius_power,
    is_nfp_poly,
    min_poly_over_center,
    min_poly_over_rationals,
    regular_representation,
)

Z3 = EndoRing("integer", 3)
Z2 = EndoRing("integer", 2)
QUAD = EndoRing("quadratic", 3, trace=1)
QUAT = EndoRing("quaternion", 4, quat_a=-1, quat_b=-1)


def mat_eq(a, b):
    return a == b


class TestRingConstruction:
    def test_torus_frobenius_is_q(self):
        assert Z3.frobenius.coords == (Fraction(3),)

    def test_quadratic_relation_checked(self):
        f = QUAD.frobenius
        assert (f * f - f.scale(1) + QUAD.one().scale(3)).is_zero()

    def test_quaternion_table(self):
        i = QUAT.elem([0, 1, 0, 0])
        j = QUAT.elem([0, 0, 1, 0])
        k = QUAT.elem([0, 0, 0, 1])
        assert i * j == k
        assert j * i == -k
        assert i * i == -QUAT.one()
        assert k * k == -QUAT.one()

    def test_noncentral_frobenius_rejected(self):
        with pytest.raises(DomainError):
            EndoRing("quaternion", 4, quat_a=-1, quat_b=-1, frobenius=[0, 1, 0, 0])

    def test_frobenius_commutes_with_random_elements(self):
        rng = random.Random(7)
        for ring in (Z3, QUAD, QUAT):
            f = ring.frobenius
            for _ in range(50):
                x = ring.elem([rng.randint(-5, 5) for _ in range(ring.dim)])
                assert f * x == x * f

    def test_maximal_order_basis(self):
        # Lipschitz extended by (1+i+j+k)/2
        basis = [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)],
        ]
        ring = EndoRing("quaternion", 4, quat_a=-1, quat_b=-1, order_basis=basis)
        omega = ring.elem([0, 0, 0, 1])
        # omega satisfies x^2 - x + 1 = 0
        assert (omega * omega - omega + ring.one()).is_zero()


class TestRegularRepresentation:
    def test_identity(self):
        rr = regular_representation(QUAT.one())
        assert rr == [[Fraction(i == j) for j in range(4)] for i in range(4)]

    def test_quadratic_frobenius_companion(self):
        rr = regular_representation(QUAD.frobenius)
        assert rr == [
            [Fraction(0), Fraction(-3)],
            [Fraction(1), Fraction(1)],
        ]

    def test_quaternion_i(self):
        i = QUAT.elem([0, 1, 0, 0])
        rr = regular_representation(i)
        # columns: i*1 = i, i*i = -1, i*j = k, i*k = -j
        cols = [[rr[r][c] for r in range(4)] for c in range(4)]
        assert cols[0] == [0, 1, 0, 0]
        assert cols[1] == [-1, 0, 0, 0]
        assert cols[2] == [0, 0, 0, 1]
        assert cols[3] == [0, 0, -1, 0]

    def test_homomorphism_property(self):
        rng = random.Random(3)
        for ring in (QUAD, QUAT):
            for _ in range(25):
                x = ring.elem([Fraction(rng.randint(-4, 4)) for _ in range(ring.dim)])
                y = ring.elem([Fraction(rng.randint(-4, 4)) for _ in range(ring.dim)])
                lhs = regular_representation(x * y)
                a, b = regular_representation(x), regular_representation(y)
                prod = [
                    [
                        sum(a[i][k] * b[k][j] for k in range(ring.dim))
                        for j in range(ring.dim)
                    ]
                    for i in range(ring.dim)
                ]
                assert lhs == prod


class TestMinPoly:
    def test_identity(self):
        a = EndoMatrix.identity(Z3, 4)
        assert min_poly_over_center(a) == [(Fraction(-1),), (Fraction(1),)]

    def test_jordan_block(self):
        a = EndoMatrix.from_scalars(Z3, [[3, 1], [0, 3]])
        # (x - 3)^2 = x^2 - 6x + 9
        assert min_poly_over_center(a) == [
            (Fraction(9),),
            (Fraction(-6),),
            (Fraction(1),),
        ]

    def test_companion(self):
        a = EndoMatrix.from_scalars(Z3, [[0, 2], [1, 0]])
        assert min_poly_over_center(a) == [
            (Fraction(-2),),
            (Fraction(0),),
            (Fraction(1),),
        ]

    def test_annihilates_exactly(self):
        a = EndoMatrix.from_scalars(Z3, [[1, 2, 0], [0, 1, 1], [0, 0, 2]])
        g = min_poly_over_center(a)
        val = a.eval_center_poly(g)
        assert val == EndoMatrix.zero(Z3, 3)
        # no proper monic divisor annihilates: test every degree-2 product of
        # the linear factors (x-1), (x-2)
        for coeffs in ([[-1, 1]], [[-2, 1]], [[2, -3, 1]]):  # (x-1)(x-2)
            from frobdyn.rings import as_center_poly

            cand = as_center_poly(coeffs[0] if len(coeffs) == 1 else coeffs[0], Z3.center)
            if len(cand) - 1 < len(g) - 1:
                assert a.eval_center_poly(cand) != EndoMatrix.zero(Z3, 3)

    def test_quaternion_min_poly_over_q(self):
        i = QUAT.elem([0, 1, 0, 0])
        a = EndoMatrix(QUAT, [[i]])
        # min poly of i over the center Q is x^2 + 1
        assert min_poly_over_center(a) == [
            (Fraction(1),),
            (Fraction(0),),
            (Fraction(1),),
        ]
        assert min_poly_over_rationals(a) == [Fraction(1), Fraction(0), Fraction(1)]

    def test_quadratic_center_has_degree_one_min_poly(self):
        f = QUAD.frobenius
        a = EndoMatrix(QUAD, [[f]])
        g = min_poly_over_center(a)
        assert len(g) == 2  # x - F over Q(F)
        assert min_poly_over_rationals(a) == [
            Fraction(3),
            Fraction(-1),
            Fraction(1),
        ]


class TestIsFrobeniusPower:
    def test_lambda_equals_q(self):
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z3, [-3, 1])
        assert is_frobenius_power(lam, 3) == (1, 1)

    def test_square_root_of_q(self):
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z3, [-3, 0, 1])
        assert is_frobenius_power(lam, 3) == (2, 1)

    def test_golden_ratio_independent(self):
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z2, [-1, -1, 1])
        assert is_frobenius_power(lam, 2, m_bound=24) is None

    def test_negative_q(self):
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z3, [3, 1])  # x + 3
        assert is_frobenius_power(lam, 3) == (2, 2)

    def test_inverse_power(self):
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z3, [Fraction(-1, 3), 1])
        assert is_frobenius_power(lam, 3) == (1, -1)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            lam = AlgebraicEigenvalue.from_rational_coeffs(Z3, [0, 1])
            is_frobenius_power(lam, 3)

    def test_none_has_no_exhaustive_witness(self):
        coeffs = [Fraction(-2), Fraction(0), Fraction(1)]  # x^2 - 2, q = 3
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z3, coeffs)
        assert is_frobenius_power(lam, 3, m_bound=12) is None
        # exhaustive check: x^m mod P is never the constant 3^k
        from frobdyn import unipoly as up
        from frobdyn.rings import as_center_poly

        field = Z3.center
        poly = as_center_poly(coeffs, field)
        x = up.p_x(field)
        for m in range(1, 13):
            xm = up.p_pow_mod(x, m, poly, field)
            if up.deg(xm) <= 0:
                c = xm[0] if xm else field.zero
                for k in range(-2 * m, 2 * m + 1):
                    assert not field.eq(c, field.pow(field.from_int(3), k))

    def test_quadratic_frobenius_element(self):
        # F itself: min poly x - F over Q(F); F^1 = F_C^1
        field = QUAD.center
        lam = AlgebraicEigenvalue(QUAD, [field.neg((Fraction(0), Fraction(1))), field.one])
        assert is_frobenius_power(lam, 3) == (1, 1)

    def test_interval_refinement(self):
        lam = AlgebraicEigenvalue.from_rational_coeffs(Z2, [-1, -1, 1])
        ivals = lam.intervals()
        assert len(ivals) == 2
        seps = abs(ivals[0][0] - ivals[1][0])
        assert all(r < seps / 4 for _, r in ivals)


class TestEigenvalueClasses:
    def test_mixed_polynomial(self):
        # (x - 1)(x - 3)(x^2 - 2) over q = 3
        coeffs = [-6, 8, 1, -4, 1]
        classes = eigenvalue_classes(coeffs, Z3)
        deps = sorted(d for _, d in classes if d is not None)
        assert deps == [(1, 0), (1, 1)]
        residual = [f for f, d in classes if d is None]
        assert len(residual) == 1 and len(residual[0]) == 3

    def test_nfp(self):
        assert is_nfp_poly([-2, 0, 1], Z3)
        assert not is_nfp_poly([-3, 1], Z3)
        assert not is_nfp_poly([1, 1], Z3)  # root of unity -1
