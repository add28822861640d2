"""Dict-in/dict-out operation handlers shared by the HTTP app and the CLI."""

from __future__ import annotations

from ..analysis import AnalyzeOptions, analyze, simulate_orbit
from ..errors import DomainError
from ..fields import Fq, RationalFunction, parse_rational_function
from ..fsets import FSet, FrobEq, frob_eq_count, frob_eq_solve, fset_member
from ..linalg import jordan_form_central
from ..points import CoprimeBasis, ExpPoint
from ..reduction import build_normal_form, verify_almost_commutative
from ..sysdesc import (
    frac_str,
    matrix_from_entries,
    matrix_to_entries,
    normal_form_to_dict,
    parse_frac,
    parse_system,
    point_from_dict,
    ring_from_spec,
    verdict_to_dict,
)


def handle_analyze(doc: dict) -> dict:
    system, d = parse_system(doc["system"])
    if doc.get("d"):
        d = doc["d"]
    opts_doc = doc.get("options") or {}
    options = AnalyzeOptions(
        m_bound=opts_doc.get("m_bound", 24),
        orbit_steps=opts_doc.get("orbit_steps", 50),
        degree_bound=opts_doc.get("degree_bound", 3),
        spec_trials=opts_doc.get("spec_trials", 5),
        index_bound=opts_doc.get("index_bound", 64),
        seed=opts_doc.get("seed", 0),
    )
    verdict = analyze(system, d, options)
    return verdict_to_dict(verdict)


def handle_simulate(doc: dict) -> dict:
    system, d = parse_system(doc["system"])
    fq = system.fq
    literals = doc.get("start")
    if literals is None:
        literals = ["t1"] * system.torus_size
    if len(literals) != system.torus_size:
        raise DomainError(
            f"start point needs {system.torus_size} coordinate literals"
        )
    funcs = [parse_rational_function(lit, fq, d) for lit in literals]
    from ..points import coprime_basis

    pool = [f for f in funcs if not f.is_constant()]
    if system.translation is not None:
        pool += [RationalFunction(f) for f in system.translation.basis.polys]
    basis = coprime_basis(pool) if pool else CoprimeBasis(fq, d, [])
    x0 = ExpPoint.from_rational_functions(funcs, basis)
    orbit = simulate_orbit(
        system, x0, doc.get("steps", 10), doc.get("torsion_rule", "deterministic")
    )
    rows = []
    for i, (pt, mod) in enumerate(zip(orbit.points, orbit.step_modulus)):
        rows.append(
            {
                "step": i,
                "exponents": [[frac_str(v) for v in row] for row in pt.exps],
                "torsion": [frac_str(t) for t in pt.torsion],
                "modulus": mod,
            }
        )
    return {
        "basis": [str(f) for f in orbit.points[0].basis.polys],
        "rows": rows,
    }


def handle_reduce(doc: dict) -> dict:
    system, d = parse_system(doc["system"])
    nf = build_normal_form(system, d)
    report = verify_almost_commutative(nf, system)
    out = normal_form_to_dict(nf)
    out["matrixIdentityVerified"] = report.matrix_ok
    return {"normal_form": out}


def handle_jordan(doc: dict) -> dict:
    ring = ring_from_spec(doc.get("ring") or {"kind": "integer"}, doc.get("q") or 2)
    mat = matrix_from_entries(ring, doc["matrix"])
    spec = jordan_form_central(mat)
    return {
        "blocks": [
            {"eigenvalue": [frac_str(c) for c in alpha.coords], "size": s}
            for alpha, s in spec.blocks
        ],
        "conjugator": matrix_to_entries(spec.p),
        "conjugator_inverse": matrix_to_entries(spec.p_inv),
        "denominator": spec.denominator(),
        "verified": True,
    }


def _fset_from_doc(doc: dict, fq: Fq, nvars: int):
    basis_doc = {"basis": doc["basis"]}

    def point(coords_doc):
        merged = dict(basis_doc)
        merged.update(coords_doc)
        return point_from_dict(merged, fq, nvars)

    gamma = point(doc["gamma"])
    gens = [point(g) for g in doc.get("generators", [])]
    lattice = [point(h) for h in doc.get("lattice", [])]
    return FSet(
        gamma,
        gens,
        list(doc.get("steps", [])),
        lattice,
        ell=doc.get("ell") or 1,
        f_stable=doc.get("f_stable", True),
    )


def handle_fset_member(doc: dict) -> dict:
    fdoc = doc["field"]
    fq = Fq(fdoc["p"], fdoc.get("e") or 1, tuple(fdoc["defining_poly"]) if fdoc.get("defining_poly") else None)
    nvars = fdoc.get("d") or 1
    fset = _fset_from_doc(doc["fset"], fq, nvars)
    merged = {"basis": doc["fset"]["basis"]}
    merged.update(doc["point"])
    x = point_from_dict(merged, fq, nvars)
    cert = fset_member(x, fset, fq.q)
    if cert is None:
        return {"member": False, "certificate": None}
    ns, coeffs = cert
    return {
        "member": True,
        "certificate": {"orbit_exponents": list(ns), "subgroup_coefficients": list(coeffs)},
    }


def _frob_eq_from_doc(doc: dict) -> FrobEq:
    ring = ring_from_spec(doc.get("ring") or {"kind": "integer"}, doc["q"])
    field = ring.center

    def cf(x):
        if isinstance(x, list):
            return tuple(parse_frac(v) for v in x)
        return field.from_fraction(parse_frac(x))

    return FrobEq(
        ring,
        [cf(c) for c in doc["poly"]],
        cf(doc.get("c0") if doc.get("c0") is not None else 0),
        [cf(term["c"]) for term in doc.get("terms") or []],
        [term.get("delta") or 1 for term in doc.get("terms") or []],
    )


def handle_count_frobeq(doc: dict) -> dict:
    eq = _frob_eq_from_doc(doc["eq"])
    res = frob_eq_count(eq, doc["n_max"])
    return {
        "count": res["count"],
        "curve": [[float(n), float(c), float(r)] for n, c, r in res["curve"]],
        "fitted_polylog_constant": res["fitted_polylog_constant"],
        "term_count": res["term_count"],
        "degenerate_constant": res["degenerate_constant"],
    }


def handle_solve_frobeq(doc: dict) -> dict:
    eq = _frob_eq_from_doc(doc["eq"])
    sol = frob_eq_solve(eq, doc["n"])
    return {
        "solvable": sol is not None,
        "solution": list(sol) if sol is not None else None,
    }
