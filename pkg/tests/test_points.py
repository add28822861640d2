from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from frobdyn.errors import DomainError, NotInSpan, Unsupported
from frobdyn.fields import Fq, parse_rational_function
from frobdyn.points import (
    CoprimeBasis,
    ExpPoint,
    coprime_basis,
    mult_dependence,
    reconstruct,
    solve_torsion,
    span_intersection_trivial,
    to_exponents,
)

F3 = Fq(3)
F5 = Fq(5)
F7 = Fq(7)


def rf(text, fq=F5, nvars=1):
    return parse_rational_function(text, fq, nvars)


class TestCoprimeBasis:
    def test_single_repeated_element(self):
        b = coprime_basis([rf("t1"), rf("t1")])
        assert [str(f) for f in b.polys] == ["t1"]

    def test_refinement(self):
        # {t^2 (t+1), t (t+1)^2} refines to {t, t+1}
        b = coprime_basis([rf("t1^2*(t1+1)"), rf("t1*(t1+1)^2")])
        assert sorted(str(f) for f in b.polys) == ["t1", "t1 + 1"]

    def test_refinement_splits_factors(self):
        # over F3: t^2 - 1 = (t-1)(t+1)
        b = coprime_basis([rf("t1^2 - 1", F3), rf("t1 - 1", F3)])
        assert sorted(str(f) for f in b.polys) == ["t1 + 1", "t1 + 2"]

    def test_pairwise_coprime(self):
        from frobdyn.fields import poly_gcd

        b = coprime_basis(
            [rf("t1^3*(t1+1)"), rf("(t1+1)*(t1+2)"), rf("t1*(t1+2)^2")]
        )
        for i in range(len(b.polys)):
            for j in range(i + 1, len(b.polys)):
                assert poly_gcd(b.polys[i], b.polys[j]).total_degree() == 0

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            coprime_basis([rf("0")])


class TestToExponents:
    def test_identity(self):
        b = coprime_basis([rf("t1")])
        exps, dlog = to_exponents(rf("1"), b)
        assert exps == [0] and dlog == 0

    def test_constant_times_quotient(self):
        b = coprime_basis([rf("t1"), rf("t1+1")])
        exps, dlog = to_exponents(rf("2*t1/(t1+1)"), b)
        assert exps == [1, -1]
        assert dlog == F5.dlog(F5.from_int(2)) == 1

    def test_monomial(self):
        b = coprime_basis([rf("t1")])
        assert to_exponents(rf("t1^3"), b) == ([3], 0)

    def test_not_in_span(self):
        b = coprime_basis([rf("t1")])
        with pytest.raises(NotInSpan) as err:
            to_exponents(rf("t1+1"), b)
        assert err.value.residual is not None

    @given(
        exps=st.lists(st.integers(-4, 4), min_size=2, max_size=2),
        const=st.integers(1, 4),
    )
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, exps, const):
        b = coprime_basis([rf("t1"), rf("t1+1")])
        x = rf(str(const)) * rf("t1") ** exps[0] * rf("t1+1") ** exps[1]
        got_exps, got_dlog = to_exponents(x, b)
        assert reconstruct(got_exps, got_dlog, b) == x


class TestMultDependence:
    def test_forced_relation(self):
        v = mult_dependence([rf("t1"), rf("t1^2")])
        assert v is not None and (rf("t1") ** v[0] * rf("t1^2") ** v[1]).is_one()

    def test_independent(self):
        assert mult_dependence([rf("t1"), rf("t1+1")]) is None

    def test_constants_f7(self):
        two, three = rf("2", F7), rf("3", F7)
        v = mult_dependence([two, three])
        assert v is not None
        assert (two ** v[0] * three ** v[1]).is_one()

    def test_relation_with_torsion_scaling(self):
        # t and 2t are dependent only after killing the constant 2 (order 4)
        v = mult_dependence([rf("t1"), rf("2*t1")])
        assert v is not None
        assert (rf("t1") ** v[0] * rf("2*t1") ** v[1]).is_one()

    def test_none_agrees_with_bounded_search(self):
        elems = [rf("t1"), rf("t1+1"), rf("t1+2")]
        assert mult_dependence(elems) is None
        one = rf("1")
        for a in range(-3, 4):
            for b in range(-3, 4):
                for c in range(-3, 4):
                    if (a, b, c) == (0, 0, 0):
                        continue
                    prod = elems[0] ** a * elems[1] ** b * elems[2] ** c
                    assert prod != one


class TestSpanIntersection:
    def test_disjoint(self):
        assert span_intersection_trivial([rf("t1")], [rf("t1+1")])

    def test_overlapping(self):
        assert not span_intersection_trivial(
            [rf("t1"), rf("t1+1")], [rf("t1*(t1+1)")]
        )


class TestExpPoint:
    def make(self):
        b = coprime_basis([rf("t1"), rf("t1+1")])
        return b, ExpPoint.from_rational_functions([rf("t1"), rf("2*(t1+1)")], b)

    def test_frobenius_scales_everything(self):
        b, x = self.make()
        y = x.frobenius(3)
        assert y.exps == tuple(
            tuple(3 * v for v in row) for row in x.exps
        )
        assert y.torsion == tuple((3 * t) % 1 for t in x.torsion)

    def test_frobenius_commutes_with_mul(self):
        b, x = self.make()
        y = ExpPoint.from_rational_functions([rf("t1+1"), rf("t1")], b)
        assert x.mul(y).frobenius(3) == x.frobenius(3).mul(y.frobenius(3))

    def test_torsion_reduced_mod_one(self):
        b = coprime_basis([rf("t1", F3)])
        x = ExpPoint(b, [[Fraction(1)]], [Fraction(9, 8)])
        assert x.torsion[0] == Fraction(1, 8)

    def test_frobenius_on_torsion(self):
        b = coprime_basis([rf("t1", F3)])
        x = ExpPoint(b, [[Fraction(0)]], [Fraction(1, 8)])
        assert x.frobenius(3).torsion[0] == Fraction(3, 8)

    def test_p_torsion_rejected(self):
        b = coprime_basis([rf("t1", F3)])
        with pytest.raises(Unsupported):
            ExpPoint(b, [[Fraction(0)]], [Fraction(1, 3)])

    def test_apply_matrix_action_convention(self):
        # coordinate i of the image is prod_j x_j^{M[i][j]}
        b, x = self.make()
        y = x.apply_matrix([[0, 1], [2, 0]])
        assert y.exps[0] == x.exps[1]
        assert y.exps[1] == tuple(2 * v for v in x.exps[0])

    def test_coordinate_value_round_trip(self):
        b, x = self.make()
        assert x.coordinate_value(1) == rf("2*(t1+1)")


class TestSolveTorsion:
    def test_p_power_determinant(self):
        z = solve_torsion([[Fraction(3)]], [Fraction(1, 2)], 3)
        assert (3 * z[0] - Fraction(1, 2)) % 1 == 0
        assert z[0].denominator % 3 != 0

    def test_two_by_two(self):
        m = [[Fraction(3), Fraction(1)], [Fraction(0), Fraction(2)]]
        tau = [Fraction(1, 4), Fraction(3, 4)]
        z = solve_torsion(m, tau, 3)
        for i in range(2):
            acc = sum(m[i][j] * z[j] for j in range(2))
            assert (acc - tau[i]) % 1 == 0
            assert z[i].denominator % 3 != 0
