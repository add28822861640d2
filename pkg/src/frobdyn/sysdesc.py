"""Parsing and serialization of system descriptions and results.

The JSON system description carries the field (p, e, optional defining
polynomial), the transcendence degree d, the factor list and the map blocks
with a global denominator and translation literals for the torus
coordinates. All rational numbers travel as "a/b" strings to keep the wire
format exact.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError
from .fields import Fq, is_prime, parse_rational_function
from .linalg import EndoMatrix
from .points import CoprimeBasis, ExpPoint, coprime_basis
from .reduction import Factor, NormalForm, SelfMap
from .rings import EndoRing


def frac_str(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad rational literal {s!r}: {exc}") from exc


def _get(doc, key, default=None):
    # pydantic dumps unset optionals as explicit None values
    val = doc.get(key)
    return default if val is None else val


def ring_from_spec(spec, q: int) -> EndoRing:
    kind = spec.get("kind")
    if kind == "integer":
        return EndoRing("integer", q)
    if kind == "quadratic":
        if "trace" not in spec:
            raise DomainError("quadratic ring spec needs a trace")
        norm = _get(spec, "norm", q)
        if norm != q:
            raise DomainError("quadratic Frobenius norm must equal q")
        return EndoRing("quadratic", q, trace=spec["trace"])
    if kind == "quaternion":
        basis = spec.get("basis")
        if basis is not None:
            basis = [[parse_frac(x) for x in row] for row in basis]
        frob = spec.get("frobenius")
        if frob is not None:
            frob = [parse_frac(x) for x in frob]
        return EndoRing(
            "quaternion",
            q,
            quat_a=parse_frac(_get(spec, "a", -1)),
            quat_b=parse_frac(_get(spec, "b", -1)),
            order_basis=basis,
            frobenius=frob,
        )
    raise DomainError(f"unknown ring kind {kind!r}")


def ring_to_spec(ring: EndoRing) -> dict:
    if ring.kind == "integer":
        return {"kind": "integer"}
    if ring.kind == "quadratic":
        return {"kind": "quadratic", "trace": frac_str(ring.trace), "norm": ring.q}
    return {
        "kind": "quaternion",
        "a": frac_str(ring.quat_a),
        "b": frac_str(ring.quat_b),
        "basis": [[frac_str(x) for x in row] for row in ring.order_matrix],
        "frobenius": [frac_str(c) for c in ring.frobenius.coords],
    }


def matrix_from_entries(ring: EndoRing, entries) -> EndoMatrix:
    rows = []
    for row in entries:
        out = []
        for cell in row:
            if isinstance(cell, list):
                out.append(ring.elem([parse_frac(x) for x in cell]))
            else:
                out.append(ring.from_fraction(parse_frac(cell)))
        rows.append(out)
    return EndoMatrix(ring, rows)


def matrix_to_entries(m: EndoMatrix):
    out = []
    for row in m.rows:
        cells = []
        for x in row:
            if m.ring.dim == 1:
                cells.append(frac_str(x.coords[0]))
            else:
                cells.append([frac_str(c) for c in x.coords])
        cells and out.append(cells)
    return out if m.n else []


def parse_system(doc: dict) -> tuple[SelfMap, int]:
    """Build a SelfMap from a JSON document; returns (map, d)."""
    for key in ("p", "d", "group", "map"):
        if key not in doc:
            raise DomainError(f"system description is missing {key!r}")
    p = doc["p"]
    if not isinstance(p, int) or not is_prime(p):
        raise DomainError("p must be prime")
    e = _get(doc, "e", 1)
    d = doc["d"]
    if not isinstance(d, int) or d < 1:
        raise DomainError("transcendence degree d must be a positive integer")
    modulus = doc.get("defining_poly")
    fq = Fq(p, e, tuple(modulus) if modulus else None)
    q = fq.q
    factors = []
    for i, val in enumerate(doc["group"]):
        label = _get(val, "label", f"C{i+1}")
        rank = val.get("rank")
        if not isinstance(rank, int) or rank < 1:
            raise DomainError(f"factor {label}: rank must be a positive integer")
        if val.get("type") == "torus":
            factors.append(Factor(label, EndoRing("integer", q), rank, 1, True))
        elif val.get("type") == "abstract":
            ring = ring_from_spec(_get(val, "ring", {"kind": "integer"}), q)
            dim = _get(val, "dim", 1)
            factors.append(Factor(label, ring, rank, dim, False))
        else:
            raise DomainError(f"factor {label}: type must be 'torus' or 'abstract'")
    mp = doc["map"]
    blocks_spec = mp.get("blocks")
    if not isinstance(blocks_spec, list) or len(blocks_spec) != len(factors):
        raise DomainError("map needs one matrix block per group factor")
    blocks = [
        matrix_from_entries(f.ring, b) for f, b in zip(factors, blocks_spec)
    ]
    denominator = _get(mp, "denominator", 1)
    torus_size = sum(f.mult for f in factors if f.is_torus)
    literals = mp.get("translation")
    translation = None
    if torus_size:
        if literals is None:
            literals = ["1"] * torus_size
        if len(literals) != torus_size:
            raise DomainError(
                f"translation needs {torus_size} literals (one per torus coordinate)"
            )
        funcs = [parse_rational_function(lit, fq, d) for lit in literals]
        pool = [f for f in funcs if not f.is_constant()]
        basis = coprime_basis(pool) if pool else CoprimeBasis(fq, d, [])
        translation = ExpPoint.from_rational_functions(funcs, basis)
    symbolic = {}
    for f, sym in zip(factors, mp.get("abstract_translation", []) or []):
        symbolic[f.label] = sym
    return (
        SelfMap(
            factors,
            blocks,
            denominator,
            translation,
            fq,
            symbolic_translation=symbolic,
        ),
        d,
    )


def point_to_dict(x: ExpPoint) -> dict:
    return {
        "basis": [str(f) for f in x.basis.polys],
        "exponents": [[frac_str(v) for v in row] for row in x.exps],
        "torsion": [frac_str(t) for t in x.torsion],
    }


def point_from_dict(doc: dict, fq: Fq, nvars: int) -> ExpPoint:
    from .fields import poly_gcd

    polys = []
    for s in doc.get("basis", []):
        f = parse_rational_function(s, fq, nvars)
        if not f.den.is_constant():
            raise DomainError("basis entries must be polynomials")
        polys.append(f.num.normalized())
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if poly_gcd(polys[i], polys[j]).total_degree() >= 1:
                raise DomainError("declared basis entries are not pairwise coprime")
    basis = CoprimeBasis(fq, nvars, polys)
    exps = [[parse_frac(v) for v in row] for row in doc["exponents"]]
    tors = [parse_frac(t) for t in doc.get("torsion", ["0"] * len(exps))]
    return ExpPoint(basis, exps, tors)


def normal_form_to_dict(nf: NormalForm) -> dict:
    out = {
        "nStar": nf.n_star,
        "ell2": nf.ell2,
        "m1": nf.m1,
        "bezout": {
            "h1": list(nf.bezout.h1),
            "h2": list(nf.bezout.h2),
            "q1": list(nf.bezout.q1),
            "q2": list(nf.bezout.q2),
            "ell0": nf.bezout.ell0,
        },
        "factors": [],
    }
    for f, fn in zip(nf.selfmap.factors, nf.factors):
        out["factors"].append(
            {
                "label": f.label,
                "ring": ring_to_spec(f.ring),
                "unipotentSizes": list(fn.uni_sizes),
                "frobeniusBlocks": [
                    {"exponent": k, "size": s} for k, s in fn.frob_blocks
                ],
                "nfp": matrix_to_entries(fn.nfp),
                "conjugator": matrix_to_entries(fn.w),
                "conjugatorInverse": matrix_to_entries(fn.w_inv),
                "denominator": fn.w.denominator(),
            }
        )
    if nf.beta_star is not None:
        out["iterateTranslation"] = point_to_dict(nf.beta_star)
        out["translationKillingPoint"] = point_to_dict(nf.z_point)
        out["normalFormTranslation"] = point_to_dict(nf.beta_nf)
    return out


def verdict_to_dict(v) -> dict:
    out = {
        "d": v.d,
        "nStar": v.normal_form.n_star,
        "notes": list(v.notes),
        "conditionB": None,
        "conditionC": None,
        "conditionA": None,
        "normalForm": normal_form_to_dict(v.normal_form),
    }
    if v.condition_b is not None:
        out["conditionB"] = {
            "vector": list(v.condition_b.v_original),
            "vectorNormalForm": list(v.condition_b.v_normal),
            "sigma": list(v.condition_b.sigma),
            "factor": v.condition_b.factor,
            "verified": bool(v.condition_b.verified),
        }
    if v.condition_c is not None:
        out["conditionC"] = {
            "T": [list(r) for r in v.condition_c.rows_original],
            "TNormalForm": [list(r) for r in v.condition_c.rows_normal],
            "n0": v.condition_c.n0,
            "r": v.condition_c.r,
            "dimZ": v.condition_c.dim_z,
            "verified": bool(v.condition_c.verified),
            "matrixLevel": bool(v.condition_c.matrix_level),
            "factorRows": v.condition_c.factor_rows,
        }
    if v.plan is not None:
        evidence = None
        if v.evidence is not None:
            evidence = {
                "verdict": v.evidence.verdict,
                "relation": v.evidence.relation,
                "specialization": {
                    k: val
                    for k, val in v.evidence.specialization.items()
                    if k != "candidate"
                },
                "indexBound": v.evidence.index_bound,
                "degreeBound": v.evidence.degree_bound,
                "seed": v.evidence.seed,
            }
        orbit_sample = None
        if v.orbit is not None:
            take = v.orbit.points[: min(6, len(v.orbit.points))]
            orbit_sample = [point_to_dict(pt) for pt in take]
        out["conditionA"] = {
            "constructed": True,
            "point": point_to_dict(v.plan.alpha_original),
            "pointNormalForm": point_to_dict(v.plan.alpha_normal),
            "classes": {
                str(k): rows for k, rows in v.plan.classes.items()
            },
            "checks": dict(v.plan.checks),
            "withinStatedDegree": bool(v.plan.within_stated_degree),
            "retries": v.plan.retries,
            "orbitSample": orbit_sample,
            "evidence": evidence,
        }
    elif v.condition_b is not None:
        out["conditionA"] = {
            "constructed": False,
            "reason": "an invariant function exists (condition B)",
        }
    else:
        out["conditionA"] = {
            "constructed": False,
            "reason": "; ".join(v.notes) or "no point-level data",
        }
    return out
