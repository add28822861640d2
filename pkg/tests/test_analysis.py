import random
from fractions import Fraction

import pytest

from frobdyn.analysis import (
    AnalyzeOptions,
    analyze,
    check_condition_B,
    check_condition_C,
    construct_dense_point,
    density_evidence,
    normalize_translation,
    simulate_orbit,
)
from frobdyn.errors import PreconditionViolated, Unsupported
from frobdyn.fields import Fq, parse_rational_function
from frobdyn.linalg import EndoMatrix
from frobdyn.points import CoprimeBasis, ExpPoint, coprime_basis
from frobdyn.reduction import Factor, SelfMap, build_normal_form
from frobdyn.rings import EndoRing

F3 = Fq(3)
Z3 = EndoRing("integer", 3)


def rf(text, fq=F3, nvars=1):
    return parse_rational_function(text, fq, nvars)


def torus_map(entries, translation=None, q=3, denominator=1, nvars=1, fq=None):
    fq = fq or (Fq(q) if q in (2, 3, 5) else F3)
    ring = EndoRing("integer", q)
    n = len(entries)
    fac = Factor("Gm", ring, n, 1, True)
    if translation is None:
        basis = CoprimeBasis(fq, nvars, [])
        point = ExpPoint.identity(basis, n)
    else:
        funcs = [rf(lit, fq, nvars) for lit in translation]
        pool = [f for f in funcs if not f.is_constant()]
        basis = coprime_basis(pool) if pool else CoprimeBasis(fq, nvars, [])
        point = ExpPoint.from_rational_functions(funcs, basis)
    return SelfMap(
        [fac], [EndoMatrix.from_scalars(ring, entries)], denominator, point, fq
    )


class TestNormalizeTranslation:
    def test_single_block_nothing_to_clear(self):
        basis = coprime_basis([rf("t1")])
        beta = ExpPoint.from_rational_functions([rf("t1")], basis)
        gamma, bp = normalize_translation([1], beta)
        assert gamma.is_identity()
        assert bp == beta

    def test_two_block_clearing(self):
        basis = coprime_basis([rf("t1")])
        beta = ExpPoint.from_rational_functions([rf("t1"), rf("t1^2")], basis)
        gamma, bp = normalize_translation([2], beta)
        assert bp.exps[0] == (Fraction(0),)  # cleared
        assert bp.exps[1] == (Fraction(2),)  # block-last unchanged

    def test_identity(self):
        basis = coprime_basis([rf("t1")])
        beta = ExpPoint.identity(basis, 3)
        gamma, bp = normalize_translation([2, 1], beta)
        assert bp.is_identity()


class TestConditionB:
    def test_trivial_translation_block(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        nf = build_normal_form(s)
        wit = check_condition_B(nf)
        assert wit is not None and wit.verified
        assert wit.v_original == [1, 0, 0]

    def test_dependent_block_last_coordinates(self):
        # Q = J_{1,2} + J_{1,1}, block-last translation entries (t, t^2)
        s = torus_map([[1, 1, 0], [0, 1, 0], [0, 0, 1]], ["1", "t1", "t1^2"])
        nf = build_normal_form(s)
        wit = check_condition_B(nf)
        assert wit is not None and wit.verified
        a, b = wit.sigma
        # relation: a * t + b * t^2 = 0 on exponents -> a + 2b = 0
        assert a + 2 * b == 0

    def test_independent_block_last_coordinates(self):
        s = torus_map([[1, 1, 0], [0, 1, 0], [0, 0, 1]], ["1", "t1", "t1+1"])
        nf = build_normal_form(s)
        assert check_condition_B(nf) is None

    def test_character_invariance_on_samples(self):
        rng = random.Random(31)
        s = torus_map([[1, 0], [0, 1]], ["t1", "t1^3"])
        nf = build_normal_form(s)
        wit = check_condition_B(nf)
        assert wit is not None
        big = nf.beta_nf.basis
        for _ in range(20):
            x = ExpPoint(
                big,
                [
                    [Fraction(rng.randint(-5, 5)) for _ in range(len(big))]
                    for _ in range(2)
                ],
                [Fraction(0)] * 2,
            )
            before = x.character_value(wit.v_original)
            after = s.step(x).character_value(wit.v_original)
            assert before == after


class TestConditionC:
    def test_worked_example_threshold(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        nf = build_normal_form(s)
        wit = check_condition_C(nf, 1)
        assert wit is not None and wit.verified
        assert wit.dim_z == 2 and (wit.n0, wit.r) == (1, 1)
        assert wit.rows_normal == [[0, 1, 0], [0, 0, 1]]

    def test_threshold_not_met(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        nf = build_normal_form(s)
        assert check_condition_C(nf, 2) is None

    def test_single_block_of_size_two(self):
        # J_{q,2}: one block, class size 1, never exceeds d = 1
        s = torus_map([[3, 1], [0, 3]])
        nf = build_normal_form(s)
        assert check_condition_C(nf, 1) is None

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_threshold_sweep(self, d):
        # d blocks in one class: no witness; d+1 blocks: witness
        diag = lambda k: [[3 if i == j else 0 for j in range(k)] for i in range(k)]
        s_eq = torus_map(diag(d))
        nf_eq = build_normal_form(s_eq)
        assert check_condition_C(nf_eq, d) is None
        s_plus = torus_map(diag(d + 1))
        nf_plus = build_normal_form(s_plus)
        wit = check_condition_C(nf_plus, d)
        assert wit is not None and wit.verified and wit.dim_z == d + 1


class TestConstructDensePoint:
    def test_single_frobenius_block(self):
        s = torus_map([[3]])
        nf = build_normal_form(s)
        plan = construct_dense_point(nf, 1)
        assert plan.alpha_normal.exps[0] == tuple(
            Fraction(v) for v in ([1] + [0] * (len(plan.alpha_normal.basis) - 1))
        ) or any(v != 0 for v in plan.alpha_normal.exps[0])
        assert plan.checks["variables_distinct_within_class"]

    def test_refuses_when_invariant_exists(self):
        s = torus_map([[1, 0], [0, 1]], ["t1", "t1^2"])
        nf = build_normal_form(s)
        with pytest.raises(PreconditionViolated):
            construct_dense_point(nf, 1)

    def test_class_offsets_with_two_variables(self):
        fq = F3
        s = torus_map([[3, 0], [0, 3]], nvars=2, fq=fq)
        nf = build_normal_form(s)
        plan = construct_dense_point(nf, 2)
        rows = plan.classes[1]
        assert [r["variable"] for r in rows] == [1, 2]
        # distinct variables -> algebraically independent coordinates
        assert plan.checks["variables_distinct_within_class"]

    def test_mixed_system_conditions_verified(self):
        fq = F3
        s = torus_map(
            [[1, 0, 0], [0, 3, 0], [0, 0, 3]],
            ["t1", "1", "1"],
            nvars=2,
            fq=fq,
        )
        nf = build_normal_form(s)
        plan = construct_dense_point(nf, 2, gamma_avoid=[rf("t1", fq, 2)])
        assert all(plan.checks.values())
        from frobdyn.points import mult_dependence

        vals = [
            plan.alpha_normal.coordinate_value(i)
            for i in range(3)
            if not plan.alpha_normal.coordinate_value(i).is_one()
        ]
        if len(vals) > 1:
            assert mult_dependence(vals) is None


class TestSimulateOrbit:
    def test_frobenius_orbit(self):
        s = torus_map([[3]])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        orbit = simulate_orbit(s, x0, 3)
        assert [pt.exps[0][0] for pt in orbit.points] == [1, 3, 9, 27]

    def test_worked_example_orbit(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")] * 3, basis)
        orbit = simulate_orbit(s, x0, 2)
        assert [pt.exps[1][0] for pt in orbit.points] == [1, 3, 9]
        assert [pt.exps[0][0] for pt in orbit.points] == [1, 1, 1]

    def test_correspondence_reports_modulus(self):
        # one-half of multiplication by 2: exponents halve then double
        s = torus_map([[1]], denominator=2)
        # entries with denominator: (1/2)*[2] means matrix [[1]] with m = 2
        s = SelfMap(
            s.factors,
            [EndoMatrix.from_scalars(Z3, [[Fraction(1, 2)]]).scale(2)],
            2,
            s.translation,
            s.fq,
        )
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        orbit = simulate_orbit(s, x0, 3, torsion_rule="enumerate")
        assert orbit.step_modulus == [1, 2, 2, 2]

    def test_inseparable_rejected(self):
        s = torus_map([[1]], denominator=3)
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        with pytest.raises(Unsupported):
            simulate_orbit(s, x0, 2)


class TestDensityEvidence:
    def test_frobenius_orbit_dense(self):
        s = torus_map([[3]])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        orbit = simulate_orbit(s, x0, 30)
        rep = density_evidence(orbit, degree_bound=3, spec_trials=3, seed=1)
        assert rep.verdict == "DENSE-EVIDENCE"

    def test_constant_orbit_relation(self):
        s = torus_map([[1]])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        orbit = simulate_orbit(s, x0, 10)
        rep = density_evidence(orbit)
        assert rep.verdict == "RELATION-FOUND"
        assert rep.relation["type"] == "binomial"

    def test_diagonal_translation_relation(self):
        # Phi(x, y) = (t x, t y) from (1, 1): x_n = y_n along the orbit
        s = torus_map([[1, 0], [0, 1]], ["t1", "t1"])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.identity(basis, 2)
        orbit = simulate_orbit(s, x0, 12)
        rep = density_evidence(orbit)
        assert rep.verdict == "RELATION-FOUND"
        v = rep.relation["vector"]
        assert sorted(v) == [-1, 1]

    def test_subset_mask(self):
        s = torus_map([[3]])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        orbit = simulate_orbit(s, x0, 20)
        rep = density_evidence(orbit, subset=list(range(0, 21, 2)), spec_trials=2)
        assert rep.verdict == "DENSE-EVIDENCE"

    def test_deterministic_across_runs(self):
        s = torus_map([[3]])
        basis = coprime_basis([rf("t1")])
        x0 = ExpPoint.from_rational_functions([rf("t1")], basis)
        orbit = simulate_orbit(s, x0, 25)
        r1 = density_evidence(orbit, seed=7)
        r2 = density_evidence(orbit, seed=7)
        assert r1 == r2


class TestAnalyze:
    def test_worked_example(self):
        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        v = analyze(s, 1)
        assert v.condition_b is not None and v.condition_b.v_original == [1, 0, 0]
        assert v.condition_c is not None and v.condition_c.dim_z == 2
        assert v.plan is None  # B holds: no construction

    def test_pure_frobenius_dense(self):
        s = torus_map([[3]])
        v = analyze(s, 1, AnalyzeOptions(orbit_steps=30))
        assert v.condition_b is None and v.condition_c is None
        assert v.evidence.verdict == "DENSE-EVIDENCE"

    def test_unipotent_translation_dense(self):
        s = torus_map([[1]], ["t1"])
        v = analyze(s, 1, AnalyzeOptions(orbit_steps=30))
        assert v.condition_b is None
        assert v.evidence.verdict == "DENSE-EVIDENCE"

    def test_b_implies_relation_on_any_orbit(self):
        # mutual exclusion at the evidence level
        s = torus_map([[1, 0], [0, 1]], ["t1", "t1"])
        v = analyze(s, 1)
        assert v.condition_b is not None
        basis = coprime_basis([rf("t1"), rf("t1+1")])
        x0 = ExpPoint.from_rational_functions([rf("t1+1"), rf("1")], basis)
        orbit = simulate_orbit(s, x0, 25)
        rep = density_evidence(orbit)
        assert rep.verdict == "RELATION-FOUND"

    def test_class_overflow_constructs_and_reports(self):
        s = torus_map([[3, 0], [0, 3]])
        v = analyze(s, 1, AnalyzeOptions(orbit_steps=25))
        assert v.condition_c is not None and v.condition_c.dim_z == 2
        assert v.plan is not None and not v.plan.within_stated_degree
        assert v.evidence.verdict == "RELATION-FOUND"


class TestMixedFactorSystems:
    def _mixed(self):
        fq = F3
        zt = EndoRing("integer", 3)
        rq = EndoRing("quadratic", 3, trace=1)
        fac_t = Factor("Gm", zt, 2, 1, True)
        fac_a = Factor("A", rq, 2, 2, False)
        bt = EndoMatrix.from_scalars(zt, [[3, 1], [0, 3]])
        f = rq.frobenius
        ba = EndoMatrix(rq, [[f, rq.one()], [rq.zero(), f]])
        basis = CoprimeBasis(fq, 1, [])
        return SelfMap(
            [fac_t, fac_a], [bt, ba], 1, ExpPoint.identity(basis, 2), fq
        )

    def test_matrix_level_quotient_witness(self):
        s = self._mixed()
        nf = build_normal_form(s, 1)
        wit = check_condition_C(nf, 1)
        assert wit is not None and wit.verified and wit.matrix_level
        assert wit.dim_z == 3  # one torus block, one surface block
        assert check_condition_C(nf, 3) is None

    def test_symbolic_translation_unsupported_for_b(self):
        fq = F3
        zt = EndoRing("integer", 3)
        rq = EndoRing("quadratic", 3, trace=1)
        fac_t = Factor("Gm", zt, 1, 1, True)
        fac_u = Factor("B", rq, 1, 2, False)
        basis = CoprimeBasis(fq, 1, [])
        s = SelfMap(
            [fac_t, fac_u],
            [EndoMatrix.from_scalars(zt, [[3]]), EndoMatrix(rq, [[rq.one()]])],
            1,
            ExpPoint.identity(basis, 1),
            fq,
            symbolic_translation={"B": "beta"},
        )
        nf = build_normal_form(s, 1)
        with pytest.raises(Unsupported):
            check_condition_B(nf)
        v = analyze(s, 1)
        assert v.condition_b is None
        assert any("formal translation" in note for note in v.notes)

    def test_quotient_sample_identity(self):
        # tau(Phi(y)) - F(tau(y)) vanishes exactly on normal-form points
        import random as _random

        s = torus_map([[1, 0, 0], [0, 3, 0], [0, 0, 3]])
        nf = build_normal_form(s)
        wit = check_condition_C(nf, 1)
        rng = _random.Random(3)
        basis = nf.beta_nf.basis
        for _ in range(20):
            y = ExpPoint(
                basis,
                [
                    [Fraction(rng.randint(-4, 4)) for _ in range(len(basis))]
                    for _ in range(3)
                ],
                [Fraction(0)] * 3,
            )
            image = nf.step_normal(y)
            for row in wit.rows_normal:
                lhs = image.character_value(row)
                rhs_e, rhs_t = y.character_value(row)
                frob_e = tuple(Fraction(3) ** wit.r * v for v in rhs_e)
                frob_t = (Fraction(3) ** wit.r * rhs_t) % 1
                assert lhs == (frob_e, frob_t)


class TestNfpSystems:
    def test_dense_point_with_nfp_part(self):
        s = torus_map([[0, 2], [1, 0]])
        v = analyze(s, 1, AnalyzeOptions(orbit_steps=30))
        assert v.condition_b is None and v.condition_c is None
        assert v.plan is not None
        # NFP coordinates received fresh independent entries
        vals = [
            v.plan.alpha_normal.coordinate_value(i)
            for i in range(2)
        ]
        assert all(not x.is_one() for x in vals)
        assert v.evidence.verdict == "DENSE-EVIDENCE"

    def test_orbit_exactness_against_manual_step(self):
        import random as _random

        rng = _random.Random(12)
        s = torus_map([[2, 1], [1, 1]], ["t1", "t1+1"])
        basis = s.translation.basis
        x = ExpPoint(
            basis,
            [[Fraction(rng.randint(-3, 3)) for _ in range(len(basis))] for _ in range(2)],
            [Fraction(0)] * 2,
        )
        orbit = simulate_orbit(s, x, 6)
        rows = s.torus_matrix_rows()
        cur = x
        for pt in orbit.points[1:]:
            cur = cur.apply_matrix(rows).mul(s.translation)
            assert pt == cur
