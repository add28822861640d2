import random
from fractions import Fraction

import pytest

from frobdyn.errors import DomainError
from frobdyn.fields import Fq, parse_rational_function
from frobdyn.linalg import EndoMatrix
from frobdyn.points import CoprimeBasis, ExpPoint, coprime_basis
from frobdyn.reduction import (
    Factor,
    SelfMap,
    build_normal_form,
    frobenius_split,
    iterate_normalize,
    kill_translation,
    minimal_bezout,
    unity_split,
    verify_almost_commutative,
)
from frobdyn.rings import EndoRing
from frobdyn import unipoly as up

F3 = Fq(3)
Z3 = EndoRing("integer", 3)


def rf(text, fq=F3, nvars=1):
    return parse_rational_function(text, fq, nvars)


def torus_map(entries, translation=None, q=3, denominator=1):
    fq = Fq(q) if q in (2, 3, 5, 7) else F3
    ring = EndoRing("integer", q)
    n = len(entries)
    fac = Factor("Gm", ring, n, 1, True)
    if translation is None:
        basis = CoprimeBasis(fq, 1, [])
        point = ExpPoint.identity(basis, n)
    else:
        funcs = [rf(lit, fq) for lit in translation]
        pool = [f for f in funcs if not f.is_constant()]
        basis = coprime_basis(pool) if pool else CoprimeBasis(fq, 1, [])
        point = ExpPoint.from_rational_functions(funcs, basis)
    return SelfMap(
        [fac], [EndoMatrix.from_scalars(ring, entries)], denominator, point, fq
    )


class TestIterateNormalize:
    def test_identity(self):
        n, a = iterate_normalize(EndoMatrix.identity(Z3, 2))
        assert n == 1

    def test_rotation_of_order_four(self):
        r = EndoMatrix.from_scalars(Z3, [[0, -1], [1, 0]])
        n, a4 = iterate_normalize(r)
        assert n == 4
        assert a4 == EndoMatrix.identity(Z3, 2)

    def test_square_root_of_q(self):
        a = EndoMatrix.from_scalars(Z3, [[0, 3], [1, 0]])
        n, a2 = iterate_normalize(a)
        assert n == 2
        assert a2 == EndoMatrix.from_scalars(Z3, [[3, 0], [0, 3]])

    def test_non_dominant_rejected(self):
        with pytest.raises(DomainError):
            iterate_normalize(EndoMatrix.from_scalars(Z3, [[0, 0], [0, 1]]))

    def test_no_roots_of_unity_after(self):
        rng = random.Random(2)
        field = Z3.center
        for _ in range(20):
            while True:
                a = EndoMatrix.from_scalars(
                    Z3, [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
                )
                if a.is_dominant():
                    break
            n, an = iterate_normalize(a)
            g = an.min_poly_center()
            for order in range(2, 13):
                if up.euler_phi(order) > 3:
                    continue
                cyc = [(Fraction(c),) for c in up.cyclotomic(order)]
                assert up.deg(up.p_gcd(list(g), cyc, field)) == 0


class TestUnitySplit:
    def test_two_linear_factors(self):
        a = EndoMatrix.from_scalars(Z3, [[1, 0], [0, 3]])
        us = unity_split(a)
        assert us.h1 == [-1, 1]
        assert us.h2 == [-3, 1]
        assert us.ell0 == 2
        # exact identity
        lhs = up.p_add(
            up.p_mul([Fraction(c) for c in us.q1], [Fraction(c) for c in us.h1], up.QQ),
            up.p_mul([Fraction(c) for c in us.q2], [Fraction(c) for c in us.h2], up.QQ),
            up.QQ,
        )
        assert lhs == [Fraction(2)]

    def test_pure_unipotent(self):
        a = EndoMatrix.from_scalars(Z3, [[1, 1], [0, 1]])
        us = unity_split(a)
        assert us.h2 == [1] and us.ell0 == 1

    def test_no_unity(self):
        a = EndoMatrix.from_scalars(Z3, [[3]])
        us = unity_split(a)
        assert us.h1 == [1] and us.ell0 == 1

    def test_minimal_ell0_is_least_positive(self):
        # h1 = x - 1, h2 = x - 3: any integer combination at x = 1 is even
        q1, q2, ell0 = minimal_bezout([-1, 1], [-3, 1])
        assert ell0 == 2
        # h1 = (x-1)^2, h2 = x - 2: value at 1 is -1, so ell0 = 1
        q1, q2, ell0 = minimal_bezout([1, -2, 1], [-2, 1])
        assert ell0 == 1


class TestKillTranslation:
    def test_scalar(self):
        basis = coprime_basis([rf("t1")])
        beta2 = ExpPoint.from_rational_functions([rf("t1")], basis)
        z = kill_translation([[Fraction(3)]], beta2, 1)
        assert z.exps == ((Fraction(1, 2),),)

    def test_trivial(self):
        basis = coprime_basis([rf("t1")])
        beta2 = ExpPoint.identity(basis, 1)
        z = kill_translation([[Fraction(5)]], beta2, 1)
        assert z.is_identity()

    def test_jordan_block(self):
        basis = coprime_basis([rf("t1")])
        beta2 = ExpPoint.from_rational_functions([rf("t1"), rf("1")], basis)
        m = [[Fraction(3), Fraction(1)], [Fraction(0), Fraction(3)]]
        z = kill_translation(m, beta2, 1)
        shifted = [[Fraction(2), Fraction(1)], [Fraction(0), Fraction(2)]]
        assert z.apply_matrix(shifted) == beta2
        assert z.exps[0] == (Fraction(1, 2),)


class TestFrobeniusSplit:
    def test_single_power(self):
        fs = frobenius_split(EndoMatrix.from_scalars(Z3, [[3]]))
        assert fs.frob_blocks == [(1, 1)]
        assert fs.nfp.n == 0

    def test_pure_nfp(self):
        fs = frobenius_split(EndoMatrix.from_scalars(Z3, [[0, 2], [1, 0]]))
        assert fs.frob_blocks == []
        assert fs.nfp.n == 2

    def test_scrambled_diagonal(self):
        rng = random.Random(4)
        d = EndoMatrix.from_scalars(Z3, [[3, 0], [0, 9]])
        for _ in range(5):
            while True:
                p0 = EndoMatrix.from_scalars(
                    Z3, [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
                )
                if p0.inverse() is not None:
                    break
            fs = frobenius_split(p0 * d * p0.inverse())
            assert sorted(fs.frob_blocks) == [(1, 1), (2, 1)]


class TestBuildNormalForm:
    def test_identity_with_translation(self):
        s = torus_map([[1]], ["t1"])
        nf = build_normal_form(s)
        assert nf.factors[0].uni_sizes == [1]
        assert nf.factors[0].frob_blocks == []
        assert nf.factors[0].nfp.n == 0
        assert nf.beta_nf.exps == ((Fraction(1),),)

    def test_worked_three_coordinate_example(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        nf = build_normal_form(s)
        fn = nf.factors[0]
        assert fn.uni_sizes == [1]
        assert fn.frob_blocks == [(1, 1), (1, 1)]
        assert fn.nfp.n == 0
        assert nf.bezout.ell0 == 2

    def test_nfp_whole_matrix(self):
        s = torus_map([[0, 2], [1, 0]])
        nf = build_normal_form(s)
        fn = nf.factors[0]
        assert fn.uni_sizes == [] and fn.frob_blocks == []
        assert fn.nfp.n == 2

    def test_iterate_translation_matches_direct_simulation(self):
        from frobdyn.points import merge_bases, rebase

        s = torus_map([[3, 1], [0, 3]], ["t1", "t1+1"])
        nf = build_normal_form(s)
        n_star = nf.n_star
        big = merge_bases(nf.beta_star.basis, coprime_basis([rf("t1+2")]))
        x = ExpPoint.from_rational_functions([rf("t1"), rf("t1+2")], big)
        trans = rebase(s.translation, big)
        beta_star = rebase(nf.beta_star, big)
        direct = x
        for _ in range(n_star):
            direct = direct.apply_matrix(s.torus_matrix_rows()).mul(trans)
        # one application of the iterate: A* x + beta*
        once = x.apply_matrix(nf.torus_a_star_rows()).mul(beta_star)
        assert direct == once


class TestVerifyAlmostCommutative:
    def test_identity_map(self):
        s = torus_map([[1]])
        nf = build_normal_form(s)
        basis = coprime_basis([rf("t1")])
        x = ExpPoint.from_rational_functions([rf("t1")], basis)
        rep = verify_almost_commutative(nf, s, [x], 4)
        assert rep.ok and rep.point_checks == 4

    def test_worked_example_points(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        nf = build_normal_form(s)
        basis = coprime_basis([rf("t1")])
        x = ExpPoint.from_rational_functions([rf("t1")] * 3, basis)
        rep = verify_almost_commutative(nf, s, [x], 5)
        assert rep.ok

    def test_randomized_mixed_systems(self):
        rng = random.Random(17)
        passed = 0
        for _ in range(10):
            while True:
                entries = [
                    [rng.randint(-4, 4) for _ in range(3)] for _ in range(3)
                ]
                try:
                    s = torus_map(entries, ["t1", "t1+1", "1"])
                except DomainError:
                    continue
                break
            nf = build_normal_form(s)
            funcs = [rf("t1"), rf("t1+2"), rf("2")]
            basis = coprime_basis([f for f in funcs if not f.is_constant()])
            samples = [ExpPoint.from_rational_functions(funcs, basis)]
            rep = verify_almost_commutative(nf, s, samples, 5)
            assert rep.ok, rep.point_failures
            passed += 1
        assert passed == 10


class TestQuadraticRingPipeline:
    def test_frobenius_split_over_quadratic_center(self):
        from frobdyn.reduction import frobenius_split

        rq = EndoRing("quadratic", 3, trace=1)
        f = rq.frobenius
        a = EndoMatrix(rq, [[f, rq.one()], [rq.zero(), f]])
        fs = frobenius_split(a)
        assert fs.frob_blocks == [(1, 2)]
        assert fs.nfp.n == 0

    def test_mixed_quadratic_eigenvalues(self):
        from frobdyn.reduction import frobenius_split

        rq = EndoRing("quadratic", 3, trace=1)
        f = rq.frobenius
        f2 = f * f
        a = EndoMatrix(rq, [[f, rq.zero()], [rq.zero(), f2]])
        fs = frobenius_split(a)
        assert sorted(fs.frob_blocks) == [(1, 1), (2, 1)]


class TestQuaternionRingPipeline:
    def test_order_four_rotation_becomes_unipotent(self):
        quat = EndoRing("quaternion", 4, quat_a=-1, quat_b=-1)
        i = quat.elem([0, 1, 0, 0])
        j = quat.elem([0, 0, 1, 0])
        a = EndoMatrix(quat, [[i, quat.zero()], [quat.zero(), j]])
        n, a4 = iterate_normalize(a)
        assert n == 4
        assert a4 == EndoMatrix.identity(quat, 2)

    def test_dependent_quaternion_eigenvalue(self):
        # (i + j)^2 = -2 and (i + j)^4 = 4 = q: dependence shows at m = 4
        quat = EndoRing("quaternion", 4, quat_a=-1, quat_b=-1)
        ipj = quat.elem([0, 1, 1, 0])
        a = EndoMatrix(quat, [[ipj]])
        n, an = iterate_normalize(a)
        assert n == 4
        fs = frobenius_split(an)
        assert fs.frob_blocks == [(1, 1)]
        assert fs.nfp.n == 0

    def test_mixed_six_by_six_recovery(self):
        import random as _random

        rng = _random.Random(42)
        Z3b = EndoRing("integer", 3)
        blocks = [
            [1, 1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 3, 1, 0, 0],
            [0, 0, 0, 3, 0, 0],
            [0, 0, 0, 0, 0, 2],
            [0, 0, 0, 0, 1, 0],
        ]
        jm = EndoMatrix.from_scalars(Z3b, blocks)
        from frobdyn.intmat import det_rational

        for _ in range(3):
            while True:
                entries = [
                    [rng.randint(-1, 1) for _ in range(6)] for _ in range(6)
                ]
                if abs(det_rational(entries)) == 1:
                    p0 = EndoMatrix.from_scalars(Z3b, entries)
                    break
            a = p0 * jm * p0.inverse()
            s = SelfMap(
                [Factor("Gm", Z3b, 6, 1, True)],
                [a],
                1,
                ExpPoint.identity(coprime_basis([rf("t1")]), 6),
                F3,
            )
            nf = build_normal_form(s)
            fn = nf.factors[0]
            assert fn.uni_sizes == [2]
            assert fn.frob_blocks == [(1, 2)]
            assert fn.nfp.n == 2
            rep = verify_almost_commutative(nf, s)
            assert rep.matrix_ok


class TestVerifierSensitivity:
    def test_matrix_corruption_detected(self):
        s = torus_map([[1, 0], [0, 3]], ["t1", "1"])
        nf = build_normal_form(s)
        # corrupt the stored iterate: the exact identity must now fail
        nf.factors[0].a_star = EndoMatrix.from_scalars(Z3, [[1, 1], [0, 3]])
        rep = verify_almost_commutative(nf, s)
        assert not rep.matrix_ok

    def test_point_corruption_detected(self):
        s = torus_map([[1, 0], [0, 3]], ["t1", "1"])
        nf = build_normal_form(s)
        basis = nf.beta_star.basis
        x = ExpPoint.from_rational_functions([rf("t1"), rf("t1")], basis)
        # corrupt the conjugating point: differences stop being ell2-torsion
        tampered = ExpPoint(
            basis,
            [list(row) for row in nf.z_point.exps[:-1]]
            + [[v + Fraction(1, 3) for v in nf.z_point.exps[-1]]],
            list(nf.z_point.torsion),
        )
        nf.z_point = tampered
        rep = verify_almost_commutative(nf, s, [x], 3)
        assert rep.point_failures
