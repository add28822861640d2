"""Witness search and orbit evidence for the dense-orbit alternatives.

Condition B: a nonzero character supported on the closing coordinates of the
unipotent Jordan blocks is fixed by the block action; it is invariant for the
whole map exactly when the translation entries at those coordinates satisfy a
multiplicative relation. Condition C: a class of Frobenius-Jordan blocks with
a common eigenvalue exponent and total dimension above the transcendence
degree yields an exact semiconjugacy onto a Frobenius system. When B is
absent, a candidate dense starting point is assembled from fresh irreducible
elements and shifted transcendence variables, and its orbit is screened by
two independent tests: an exact search for a common binomial relation on the
exponent lattice, and vanishing-polynomial detection on random
specializations into a finite field large enough to make accidental
vanishing improbable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .errors import (
    DomainError,
    InternalError,
    PreconditionViolated,
    Unsupported,
)
from .fields import Fq, Poly, RationalFunction
from .intmat import left_kernel, lcm_list
from .points import (
    ExpPoint,
    coprime_basis,
    merge_bases,
    mult_dependence,
    rebase as _rebase,
    span_intersection_trivial,
)
from .reduction import NormalForm, SelfMap


class ClassDimensionError(InternalError):
    """A Frobenius class needs more fresh variables than the transcendence
    degree provides (exactly the condition-C situation)."""


def normalize_translation(uni_sizes, beta: ExpPoint):
    """Conjugating translation gamma with beta' = beta + (Q - I) gamma
    supported exactly on the block-last coordinates of the unipotent Jordan
    profile; the block-last entries themselves are unchanged."""
    n = beta.ncoords
    if sum(uni_sizes) != n:
        raise DomainError("block profile does not match the translation length")
    nb = len(beta.basis)
    g_exps = [[Fraction(0)] * nb for _ in range(n)]
    g_tors = [Fraction(0)] * n
    pos = 0
    for s in uni_sizes:
        for t in range(s - 1):
            # gamma_{pos+t+1} = -beta_{pos+t} clears coordinate pos+t
            g_exps[pos + t + 1] = [-v for v in beta.exps[pos + t]]
            g_tors[pos + t + 1] = (-beta.torsion[pos + t]) % 1
        pos += s
    gamma = ExpPoint(beta.basis, g_exps, g_tors)
    rows = [[Fraction(0)] * n for _ in range(n)]
    pos = 0
    for s in uni_sizes:
        for t in range(s):
            if t + 1 < s:
                rows[pos + t][pos + t + 1] = Fraction(1)
        pos += s
    beta_prime = beta.mul(gamma.apply_matrix(rows))
    pos = 0
    for s in uni_sizes:
        for t in range(s - 1):
            if any(beta_prime.exps[pos + t]) or beta_prime.torsion[pos + t] != 0:
                raise InternalError("translation normalization failed")
        pos += s
    return gamma, beta_prime


def coordinates_dependence(x: ExpPoint, idxs):
    """Nonzero integer relation among the chosen coordinates of a point
    (exponent kernel plus torsion resolution), or None."""
    rows = [x.exps[i] for i in idxs]
    taus = [x.torsion[i] for i in idxs]
    den = lcm_list([v.denominator for row in rows for v in row] or [1])
    int_rows = [[int(v * den) for v in row] for row in rows]
    kernel = left_kernel(int_rows, len(x.basis))
    if not kernel:
        return None
    modulus = lcm_list([t.denominator for t in taus] or [1])
    if modulus == 1:
        v = min(kernel, key=lambda vv: (max(map(abs, vv)), sum(map(abs, vv)), vv))
        return list(v)
    vals = [
        int((sum(k[i] * taus[i] for i in range(len(idxs))) % 1) * modulus)
        for k in kernel
    ]
    aug = [[v] for v in vals] + [[modulus]]
    combos = left_kernel(aug, 1)
    candidates = []
    for combo in combos:
        w = combo[: len(kernel)]
        v = [
            sum(w[j] * kernel[j][i] for j in range(len(kernel)))
            for i in range(len(idxs))
        ]
        if any(v):
            candidates.append(v)
    if not candidates:
        return None
    return list(
        min(candidates, key=lambda vv: (max(map(abs, vv)), sum(map(abs, vv)), vv))
    )


@dataclass
class WitnessB:
    """Invariant-character witness: sigma is the relation on the block-last
    translation entries, v_normal the induced character on normal-form
    coordinates, v_original its primitive pullback to the input coordinates."""

    sigma: list
    block_last_coords: list
    v_normal: list
    v_original: list
    verified: bool = False
    factor: str | None = None


@dataclass
class WitnessC:
    """Frobenius-quotient witness: T * A_Phi^{n0} = q^r * T exactly, with
    quotient dimension above the transcendence degree.

    For classes involving non-torus factors the witness is matrix-level: the
    per-factor identity row * J^{n0} = F_C^{r} * row is verified over each
    endomorphism ring, and only the torus rows get point coordinates."""

    class_exponent: int
    rows_normal: list
    rows_original: list
    n0: int
    r: int
    dim_z: int
    verified: bool = False
    matrix_level: bool = False
    factor_rows: list | None = None


def _primitive_int_vector(fracs):
    den = lcm_list([f.denominator for f in fracs] or [1])
    ints = [int(f * den) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _normalized_unipotent_translation(nf: NormalForm):
    uni, _, _ = nf.torus_coordinate_parts()
    uni_beta = ExpPoint(
        nf.beta_nf.basis,
        [nf.beta_nf.exps[i] for i in uni],
        [nf.beta_nf.torsion[i] for i in uni],
    )
    sizes = []
    for f, fn in zip(nf.selfmap.factors, nf.factors):
        if f.is_torus:
            sizes.extend(fn.uni_sizes)
    return normalize_translation(sizes, uni_beta)


def check_condition_B(nf: NormalForm, beta_prime: ExpPoint | None = None):
    """Multiplicative dependence of the block-last normalized translation
    entries per factor; assembles and verifies the invariant character."""
    for f, fn in zip(nf.selfmap.factors, nf.factors):
        if not f.is_torus and fn.uni_sizes:
            symbol = nf.selfmap.symbolic_translation.get(f.label)
            if symbol and symbol != "1":
                raise Unsupported(
                    f"factor {f.label}: dependence of a formal translation over "
                    "a non-torus ring cannot be decided at the point level"
                )
            # trivial translation on a unipotent block: the block-last
            # projection is invariant outright
            return WitnessB(
                sigma=[1], block_last_coords=[], v_normal=[], v_original=[],
                verified=True, factor=f.label,
            )
    if nf.selfmap.torus_size == 0 or nf.beta_nf is None:
        return None
    if beta_prime is None:
        _, beta_prime = _normalized_unipotent_translation(nf)
    uni, _, _ = nf.torus_coordinate_parts()
    block_last = nf.unipotent_block_last_coords()
    local_of_global = {g: i for i, g in enumerate(uni)}
    pos = 0
    for f, fn in zip(nf.selfmap.factors, nf.factors):
        if not f.is_torus:
            continue
        lasts = []
        local = 0
        for s in fn.uni_sizes:
            lasts.append(pos + local + s - 1)
            local += s
        pos += fn.n_uni
        if not lasts:
            continue
        sigma = coordinates_dependence(beta_prime, lasts)
        if sigma is None:
            continue
        n_torus = nf.selfmap.torus_size
        v_normal = [0] * n_torus
        factor_lasts = [g for g in block_last if local_of_global[g] in lasts]
        for coeff, g in zip(sigma, factor_lasts):
            v_normal[g] = coeff
        wit = WitnessB(
            sigma=sigma,
            block_last_coords=factor_lasts,
            v_normal=v_normal,
            v_original=[],
            factor=f.label,
        )
        wit.verified = _verify_witness_b(nf, wit, beta_prime, lasts)
        if not wit.verified:
            raise InternalError("condition-B witness failed verification")
        w_rows = nf.torus_w_rows()
        pulled = [
            sum(Fraction(v_normal[i]) * w_rows[i][j] for i in range(n_torus))
            for j in range(n_torus)
        ]
        # the pulled-back character must be fixed by the iterate exactly
        a_rows = nf.torus_a_star_rows()
        fixed_back = all(
            sum(pulled[i] * a_rows[i][j] for i in range(n_torus)) == pulled[j]
            for j in range(n_torus)
        )
        if not fixed_back:
            raise InternalError("pulled-back character is not invariant")
        wit.v_original = _primitive_int_vector(pulled)
        return wit
    return None


def _verify_witness_b(nf, wit, beta_prime, lasts) -> bool:
    j_rows = nf.torus_j_rows()
    n = nf.selfmap.torus_size
    v = [Fraction(c) for c in wit.v_normal]
    fixed = all(
        sum(v[i] * j_rows[i][j] for i in range(n)) == v[j] for j in range(n)
    )
    if not fixed:
        return False
    character = [0] * beta_prime.ncoords
    for coeff, i in zip(wit.sigma, lasts):
        character[i] = coeff
    exps, tau = beta_prime.character_value(character)
    return all(e == 0 for e in exps) and tau == 0


def check_condition_C(nf: NormalForm, d: int):
    """Group Frobenius-Jordan blocks by eigenvalue exponent; a class whose
    total dimension exceeds d induces an exact quotient onto a Frobenius
    system of that dimension."""
    if d < 1:
        raise DomainError("transcendence degree must be at least 1")
    classes: dict[int, list] = {}
    pos = 0
    for fi, (f, fn) in enumerate(zip(nf.selfmap.factors, nf.factors)):
        local = fn.n_uni
        for k, s in fn.frob_blocks:
            coord = pos + local + s - 1 if f.is_torus else None
            classes.setdefault(k, []).append((fi, f, local + s - 1, coord, f.dim))
            local += s
        if f.is_torus:
            pos += f.mult
    best = None
    for k in sorted(classes):
        total = sum(dim for *_rest, dim in classes[k])
        if total > d and (best is None or total > best[1]):
            best = (k, total)
    if best is None:
        return None
    k, total = best
    members = classes[k]
    wit = WitnessC(
        class_exponent=k,
        rows_normal=[],
        rows_original=[],
        n0=nf.n_star,
        r=k * nf.n_star,
        dim_z=total,
        matrix_level=any(coord is None for *_a, coord, _d in members),
        factor_rows=[
            {"factor": f.label, "block_last_index": local}
            for _fi, f, local, _c, _d in members
        ],
    )
    # per-factor exact identity over the ring: row J^{n0} = F_C^{r} row
    from .linalg import EndoMatrix

    for fi, f, local, _coord, _dim in members:
        fn = nf.factors[fi]
        ring = f.ring
        jf = fn.jordan_rows() ** wit.n0
        row = EndoMatrix(
            ring,
            [[ring.one() if j == local else ring.zero() for j in range(f.mult)]],
        )
        scale = ring.center_to_elem(ring.center.pow(ring.frobenius_cf(), wit.r))
        if row * jf != row.scale(scale):
            raise InternalError("condition-C witness failed the exact identity")
    wit.verified = True
    n_torus = nf.selfmap.torus_size
    torus_rows = []
    for _fi, f, _local, coord, _dim in members:
        if coord is None:
            continue
        row = [0] * n_torus
        row[coord] = 1
        torus_rows.append(row)
    wit.rows_normal = torus_rows
    if torus_rows:
        j_rows = nf.torus_j_rows()
        jn = _mat_pow_fraction(j_rows, wit.n0)
        scale = Fraction(nf.selfmap.q) ** wit.r
        ok = all(
            sum(Fraction(row[i]) * jn[i][j] for i in range(n_torus))
            == scale * Fraction(row[j])
            for row in torus_rows
            for j in range(n_torus)
        )
        if not ok:
            raise InternalError("condition-C torus rows failed the identity")
        w_rows = nf.torus_w_rows()
        for row in torus_rows:
            pulled = [
                sum(Fraction(row[i]) * w_rows[i][j] for i in range(n_torus))
                for j in range(n_torus)
            ]
            wit.rows_original.append(_primitive_int_vector(pulled))
    return wit


def _mat_pow_fraction(rows, k):
    n = len(rows)
    out = [[Fraction(i == j) for j in range(n)] for i in range(n)]
    base = [[Fraction(x) for x in row] for row in rows]
    while k:
        if k & 1:
            out = _mat_mul_fraction(out, base)
        base = _mat_mul_fraction(base, base)
        k >>= 1
    return out


def _mat_mul_fraction(a, b):
    n = len(a)
    m = len(b[0]) if b else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(m)]
        for i in range(n)
    ]


# -- dense point construction ----------------------------------------------------


@dataclass
class DensePointPlan:
    """Candidate starting point plus the bookkeeping that makes its
    independence conditions checkable: the class partition, variable offsets,
    constant shifts, and the avoided module."""

    classes: dict
    alpha_normal: ExpPoint
    alpha_original: ExpPoint
    avoided: list
    checks: dict
    variables_used: int
    retries: int = 0
    within_stated_degree: bool = True


class _FreshElements:
    """Deterministic stream of distinct monic irreducible polynomials
    (degree-1 shifts first, then root-free quadratics and cubics), pairwise
    multiplicatively independent by coprimality."""

    def __init__(self, fq: Fq, nvars: int, skip: int = 0):
        self.fq = fq
        self.nvars = nvars
        self._iter = self._generate()
        for _ in range(skip):
            next(self._iter)

    def _codes(self):
        return range(self.fq.q)

    def _generate(self):
        fq = self.fq
        for degree in range(1, 4):
            for v in range(self.nvars):
                for code in range(fq.q ** min(degree, 2)):
                    coeffs = []
                    c = code
                    for _ in range(min(degree, 2)):
                        coeffs.append(_fq_elem(fq, c % fq.q))
                        c //= fq.q
                    poly = Poly.var(fq, self.nvars, v) ** degree
                    for i, cf in enumerate(coeffs):
                        mono = Poly.var(fq, self.nvars, v) ** i
                        poly = poly + mono.scale(cf)
                    if degree > 1 and _has_root(poly, fq, v):
                        continue
                    yield RationalFunction(poly)

    def take(self):
        return next(self._iter)


def _has_root(poly: Poly, fq: Fq, v: int) -> bool:
    coeffs = {}
    for exps, c in poly.terms.items():
        coeffs[exps[v]] = c
    dense = [coeffs.get(i, fq.zero) for i in range(max(coeffs) + 1)]
    for cand in fq.elements():
        acc = fq.zero
        for c in reversed(dense):
            acc = fq.add(fq.mul(acc, cand), c)
        if acc == fq.zero:
            return True
    return False


def _fq_elem(fq: Fq, code: int):
    coords = []
    c = code
    for _ in range(fq.e):
        coords.append(c % fq.p)
        c //= fq.p
    return tuple(coords)


def construct_dense_point(
    nf: NormalForm,
    d: int,
    gamma_avoid=None,
    max_retries: int = 32,
    allow_class_overflow: bool = False,
) -> DensePointPlan:
    """Starting-point recipe: unipotent blocks get fresh independent entries
    off the block-last coordinates and 1 there; every block of a Frobenius
    class gets a shifted transcendence variable at an offset keeping
    variables within the class distinct; the NFP part gets fresh entries.
    All independence conditions are re-verified, with bounded retries over
    new constant shifts."""
    s = nf.selfmap
    if any(not f.is_torus for f in s.factors):
        raise Unsupported("dense-point construction needs torus factors only")
    if nf.beta_nf is None:
        raise Unsupported("dense-point construction needs point-level data")
    gamma_avoid = list(gamma_avoid or [])
    fq = nf.beta_nf.basis.fq
    nvars = nf.beta_nf.basis.nvars
    if nvars < d:
        raise DomainError(f"the base field carries {nvars} variables; d={d}")
    _, beta_prime = _normalized_unipotent_translation(nf)
    if check_condition_B(nf, beta_prime) is not None:
        raise PreconditionViolated(
            "an invariant function exists; no dense point is guaranteed"
        )
    class_blocks: dict[int, list] = {}
    pos = 0
    for f, fn in zip(s.factors, nf.factors):
        local = fn.n_uni
        for bi, (k, size) in enumerate(fn.frob_blocks):
            class_blocks.setdefault(k, []).append(
                (f.label, bi, pos + local, size, f.dim)
            )
            local += size
        pos += f.mult
    overflow = False
    for k, blocks in class_blocks.items():
        need = sum(dim for *_rest, dim in blocks)
        if need > d:
            if not allow_class_overflow:
                raise ClassDimensionError(
                    f"Frobenius class with exponent {k} needs {need} variables "
                    f"but d={d}"
                )
            overflow = True
    for attempt in range(max_retries):
        plan = _assemble_plan(nf, class_blocks, beta_prime, attempt, gamma_avoid, d)
        if plan is not None:
            plan.retries = attempt
            if overflow:
                plan.checks["variables_distinct_within_class"] = False
                plan.within_stated_degree = False
            return plan
    raise DomainError(
        "could not satisfy the independence conditions within the retry budget"
    )


def _assemble_plan(nf, class_blocks, beta_prime, attempt, gamma_avoid, d):
    s = nf.selfmap
    fq = nf.beta_nf.basis.fq
    nvars = nf.beta_nf.basis.nvars
    n = s.torus_size
    fresh = _FreshElements(fq, nvars, skip=attempt)
    values: list = [None] * n
    uni, _, nfp_coords = nf.torus_coordinate_parts()
    block_last = set(nf.unipotent_block_last_coords())
    one = RationalFunction(Poly.from_int(fq, nvars, 1))
    for i in uni:
        values[i] = one if i in block_last else fresh.take()
    plan_classes = {}
    wrap = max(min(d, nvars), 1)
    for k, blocks in sorted(class_blocks.items()):
        offset = 0
        rows = []
        for label, bi, start, size, dim in blocks:
            shift_code = (attempt + len(rows) + 13 * k) % fq.q
            shift = Poly.const(fq, nvars, _fq_elem(fq, shift_code))
            var = offset % wrap
            val = RationalFunction(Poly.var(fq, nvars, var) + shift)
            for t in range(size):
                values[start + t] = val
            rows.append(
                {
                    "factor": label,
                    "block": bi,
                    "offset": offset,
                    "variable": var + 1,
                    "shift": shift_code,
                }
            )
            offset += dim
        plan_classes[k] = rows
    for i in nfp_coords:
        values[i] = fresh.take()
    # per-factor multiplicative independence of the chosen entries together
    # with the block-last translation entries
    pos = 0
    local_uni = 0
    for f, fn in zip(s.factors, nf.factors):
        fam = []
        seen = set()
        for t in range(f.mult):
            val = values[pos + t]
            if val is not None and not val.is_one() and val not in seen:
                fam.append(val)
                seen.add(val)
        local = 0
        for sz in fn.uni_sizes:
            i = local_uni + local + sz - 1
            try:
                entry = beta_prime.coordinate_value(i)
            except Unsupported:
                return None
            if not entry.is_one():
                fam.append(entry)
            local += sz
        local_uni += fn.n_uni
        pos += f.mult
        if len(fam) > 1 and mult_dependence(fam) is not None:
            return None
    chosen = [v for v in values if v is not None and not v.is_one()]
    if gamma_avoid and chosen:
        if not span_intersection_trivial(chosen, gamma_avoid):
            return None
    for i, v in enumerate(values):
        if v is None:
            values[i] = one
    basis_elems = chosen + list(gamma_avoid) + [
        RationalFunction(f) for f in nf.beta_nf.basis.polys
    ]
    alpha_basis = coprime_basis(basis_elems) if basis_elems else nf.beta_nf.basis
    alpha_normal = _rebase(
        ExpPoint.from_rational_functions(values, coprime_basis(values) if chosen else nf.beta_nf.basis),
        alpha_basis,
    )
    z_m = _rebase(nf.z_point, alpha_basis)
    alpha_original = alpha_normal.mul(z_m.inverse()).apply_matrix(
        nf.torus_w_inv_rows()
    )
    checks = {
        "variables_distinct_within_class": True,
        "factor_multiplicative_independence": True,
        "avoided_module_trivial_intersection": True,
    }
    used = max(
        [sum(dim for *_r, dim in b) for b in class_blocks.values()] or [0]
    )
    return DensePointPlan(
        classes=plan_classes,
        alpha_normal=alpha_normal,
        alpha_original=alpha_original,
        avoided=list(gamma_avoid),
        checks=checks,
        variables_used=max(used, 1 if n else 0),
    )


# -- orbits and evidence ----------------------------------------------------------


@dataclass
class Orbit:
    points: list
    step_modulus: list
    torsion_rule: str


def simulate_orbit(
    s: SelfMap, x0: ExpPoint, n: int, torsion_rule: str = "deterministic"
) -> Orbit:
    """Orbit of length n+1. For correspondences (denominator m > 1) the
    `deterministic` rule picks the torsion representative given by exact
    division of the [0,1) lift at each step; `enumerate` reports the coset
    modulus m per step alongside the same representatives."""
    if torsion_rule not in ("deterministic", "enumerate"):
        raise DomainError("torsion rule must be 'deterministic' or 'enumerate'")
    if s.fq is not None and s.denominator % s.fq.p == 0:
        raise Unsupported("denominator divisible by p: inseparable correspondence")
    rows = s.torus_matrix_rows()
    trans = s.translation
    if trans is not None and trans.basis != x0.basis:
        big = merge_bases(trans.basis, x0.basis)
        trans = _rebase(trans, big)
        x0 = _rebase(x0, big)
    points = [x0]
    moduli = [1]
    for _ in range(n):
        y = points[-1].apply_matrix(rows)
        if trans is not None and not trans.is_identity():
            y = y.mul(trans)
        points.append(y)
        moduli.append(s.denominator if torsion_rule == "enumerate" else 1)
    return Orbit(points=points, step_modulus=moduli, torsion_rule=torsion_rule)


@dataclass
class EvidenceReport:
    verdict: str  # "DENSE-EVIDENCE" or "RELATION-FOUND"
    relation: dict | None
    specialization: dict
    index_bound: int
    degree_bound: int
    seed: int


def density_evidence(
    orbit,
    index_bound: int = 64,
    spec_trials: int = 5,
    degree_bound: int = 3,
    seed: int = 0,
    subset=None,
) -> EvidenceReport:
    """Two independent screens of an orbit for hidden algebraic relations.

    (1) exact: an integer vector v with x^v constant along the orbit, found
        on the exponent lattice; (2) a nonzero polynomial of total degree at
        most degree_bound vanishing on every point after specializing the
        transcendence variables into a finite field, repeated over
        independently seeded trials. The verdict is evidence, not proof.
    """
    points = orbit.points if isinstance(orbit, Orbit) else list(orbit)
    if subset is not None:
        points = [points[i] for i in subset]
    if not points:
        raise DomainError("empty orbit")
    relation = _binomial_relation(points, index_bound)
    spec = {"trials": 0, "full_rank_trials": 0, "skipped": "binomial relation found"}
    if relation is None:
        spec = _specialization_test(points, spec_trials, degree_bound, seed)
        if spec.get("candidate") is not None:
            relation = {"type": "polynomial", **spec["candidate"]}
    verdict = "RELATION-FOUND" if relation is not None else "DENSE-EVIDENCE"
    return EvidenceReport(
        verdict=verdict,
        relation=relation,
        specialization=spec,
        index_bound=index_bound,
        degree_bound=degree_bound,
        seed=seed,
    )


def _binomial_relation(points, index_bound):
    base = points[0]
    ncoords = base.ncoords
    nb = len(base.basis)
    cols = []
    for pt in points[1:]:
        if pt.basis != base.basis:
            raise DomainError("orbit points live over different bases")
        for b in range(nb):
            col = [pt.exps[i][b] - base.exps[i][b] for i in range(ncoords)]
            if any(col):
                cols.append(col)
    if not cols:
        kernel = [[1 if i == j else 0 for j in range(ncoords)] for i in range(ncoords)]
    else:
        den = lcm_list([v.denominator for col in cols for v in col])
        stacked = [
            [int(cols[c][i] * den) for c in range(len(cols))] for i in range(ncoords)
        ]
        kernel = left_kernel(stacked, len(cols))
    for v in kernel:
        if not any(v) or max(map(abs, v)) > index_bound:
            continue
        taus = [pt.character_value(v)[1] for pt in points]
        order = lcm_list([((t - taus[0]) % 1).denominator for t in taus])
        w = list(v)
        if order > 1:
            if max(map(abs, v)) * order > index_bound:
                continue
            w = [order * x for x in v]
        exps, tau = points[0].character_value(w)
        return {
            "type": "binomial",
            "vector": list(w),
            "value_exponents": [str(e) for e in exps],
            "value_torsion": str(tau),
        }
    return None


class _BigField:
    """F_{p^n} with Zech-logarithm tables: elements are generator exponents
    (ints mod q-1), zero is None; addition costs one table lookup."""

    def __init__(self, fq: Fq):
        self.fq = fq
        gen = fq.generator()
        size = fq.q - 1
        self.size = size
        pows = [fq.one]
        for _ in range(size - 1):
            pows.append(fq.mul(pows[-1], gen))
        self.pows = pows
        self.log = {v: i for i, v in enumerate(pows)}
        self.zech = {}
        for k in range(size):
            s = fq.add(fq.one, pows[k])
            self.zech[k] = self.log.get(s)

    def from_elem(self, v):
        if v == self.fq.zero:
            return None
        return self.log[v]

    def mul(self, a, b):
        if a is None or b is None:
            return None
        return (a + b) % self.size

    def inv(self, a):
        if a is None:
            raise DomainError("division by zero in the specialization field")
        return (-a) % self.size

    def add(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        z = self.zech[(b - a) % self.size]
        if z is None:
            return None
        return (a + z) % self.size

    def neg(self, a):
        if a is None:
            return None
        if self.size % 2 == 1:  # even q: characteristic 2, -a = a
            return a
        return (a + self.size // 2) % self.size

    def sub(self, a, b):
        return self.add(a, self.neg(b))


def _embed_field(small: Fq, big: Fq):
    """Coefficient embedding F_q -> F_{q^f}: the small generator goes to the
    first root of the small defining polynomial in enumeration order."""
    if small.e == 1:
        def emb(v):
            return big.from_int(v[0])

        return emb
    root = None
    for cand in big.elements():
        acc = big.zero
        for c in reversed(small.modulus):
            acc = big.add(big.mul(acc, cand), big.from_int(c))
        if acc == big.zero:
            root = cand
            break
    if root is None:
        raise InternalError("defining polynomial has no root in the extension")

    def emb(v):
        acc = big.zero
        for c in reversed(v):
            acc = big.add(big.mul(acc, root), big.from_int(c))
        return acc

    return emb


def _monomials(ncoords, degree_bound):
    out = []

    def rec(prefix, remaining, budget):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for e in range(budget + 1):
            rec(prefix + [e], remaining - 1, budget - e)

    rec([], ncoords, degree_bound)
    out.sort(key=lambda m: (sum(m), m))
    return out


def _specialization_test(points, spec_trials, degree_bound, seed):
    basis = points[0].basis
    fq = basis.fq
    ncoords = points[0].ncoords
    n_monomials = comb(degree_bound + ncoords, ncoords)
    exp_dens = lcm_list(
        [v.denominator for pt in points for row in pt.exps for v in row]
    )
    tor_dens = lcm_list([t.denominator for pt in points for t in pt.torsion])
    f = 1
    while True:
        size = fq.q**f
        if (
            size > 10 * n_monomials
            and (size - 1) % tor_dens == 0
            and gcd(exp_dens, size - 1) == 1
        ):
            break
        f += 1
        if f > 24:
            return {
                "trials": 0,
                "full_rank_trials": 0,
                "skipped": "no suitable specialization field of degree <= 24",
                "candidate": None,
            }
    big = Fq(fq.p, fq.e * f)
    emb = _embed_field(fq, big)
    zf = _BigField(big)
    inv_expden = pow(exp_dens, -1, big.q - 1) if big.q > 2 else 1
    specializations = []
    for trial in range(spec_trials):
        rng = random.Random(f"{seed}:{trial}")
        coord_logs = _specialize_points(points, basis, big, emb, zf, rng, inv_expden)
        if coord_logs is not None:
            specializations.append(coord_logs)
    out = {
        "trials": spec_trials,
        "full_rank_trials": 0,
        "forced_deficient_trials": 0,
        "skipped": None,
        "candidate": None,
        "monomial_count": n_monomials,
        "field_size": big.q,
    }
    # degree by degree: a deficient trial only counts as relation evidence
    # when the specialized points could have filled the monomial space
    # (Frobenius powering wraps around a finite field, which forces
    # vanishing polynomials that prove nothing about the function field)
    top_full = 0
    top_forced = 0
    for degree in range(1, degree_bound + 1):
        monos = _monomials(ncoords, degree)
        need = len(monos)
        informative = 0
        full_count = 0
        forced = 0
        last_null = None
        for coord_logs in specializations:
            distinct = len({tuple(logs) for logs in coord_logs})
            if distinct < need:
                forced += 1
                continue
            informative += 1
            rank_rows = []
            pivots = {}
            full = False
            for logs in coord_logs:
                row = []
                for m in monos:
                    acc = 0
                    for e, lg in zip(m, logs):
                        if e:
                            acc += e * lg
                    row.append(acc % zf.size)
                vec = _zf_reduce(list(row), rank_rows, pivots, zf)
                piv = next((i for i, x in enumerate(vec) if x is not None), None)
                if piv is not None:
                    inv = zf.inv(vec[piv])
                    vec = [zf.mul(inv, x) for x in vec]
                    pivots[piv] = len(rank_rows)
                    rank_rows.append(vec)
                if len(rank_rows) == need:
                    full = True
                    break
            if full:
                full_count += 1
            else:
                last_null = _zf_nullvector(rank_rows, pivots, need, zf)
        if degree == degree_bound:
            top_full, top_forced = full_count, forced
        if (
            informative
            and full_count == 0
            and last_null is not None
            and len(points) >= need
        ):
            out["candidate"] = {
                "degree": degree,
                "monomials": [list(m) for m in monos],
                "coefficient_logs": [
                    None if c is None else int(c) for c in last_null
                ],
                "field": f"F_{big.q}",
            }
            return out
    out["full_rank_trials"] = top_full
    out["forced_deficient_trials"] = top_forced
    if specializations and top_full == 0 and top_forced:
        out["skipped"] = (
            "all trials specialized to fewer distinct points than monomials"
        )
    return out


def _specialize_points(points, basis, big, emb, zf, rng, inv_expden):
    """Zech logs of every orbit point's coordinates at random variable values
    (resampled until no basis polynomial vanishes)."""
    fq = basis.fq
    size = zf.size
    for _ in range(64):
        vals = []
        for _ in range(basis.nvars):
            coords = tuple(rng.randrange(big.p) for _ in range(big.e))
            vals.append(coords)
        base_logs = []
        ok = True
        for poly in basis.polys:
            acc = big.zero
            for exps, coeff in poly.terms.items():
                term = emb(coeff)
                for v, e in zip(vals, exps):
                    if e:
                        term = big.mul(term, big.pow(v, e))
                acc = big.add(acc, term)
            if acc == big.zero:
                ok = False
                break
            base_logs.append(zf.from_elem(acc))
        if not ok:
            continue
        out = []
        for pt in points:
            logs = []
            for i in range(pt.ncoords):
                acc = 0
                for lg, e in zip(base_logs, pt.exps[i]):
                    if e:
                        num = e.numerator % size
                        if e.denominator == 1:
                            acc += num * lg
                        else:
                            dinv = pow(e.denominator, -1, size)
                            acc += num * dinv * lg
                tau = pt.torsion[i]
                if tau:
                    acc += int(tau * size) % size
                logs.append(acc % size)
            out.append(logs)
        return out
    return None


def _zf_reduce(vec, rank_rows, pivots, zf):
    for piv in sorted(pivots):
        c = vec[piv]
        if c is not None:
            row = rank_rows[pivots[piv]]
            vec = [zf.sub(x, zf.mul(c, y)) for x, y in zip(vec, row)]
    return vec


def _zf_nullvector(rank_rows, pivots, n, zf):
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fcol = free[0]
    v = [None] * n
    v[fcol] = 0
    for piv, ridx in pivots.items():
        v[piv] = zf.neg(rank_rows[ridx][fcol])
    return v


# -- the verdict orchestration -----------------------------------------------------


@dataclass
class AnalyzeOptions:
    m_bound: int = 24
    orbit_steps: int = 50
    degree_bound: int = 3
    spec_trials: int = 5
    index_bound: int = 64
    seed: int = 0
    verify_samples: int = 0
    verify_iterations: int = 5


@dataclass
class Verdict:
    condition_b: WitnessB | None
    condition_c: WitnessC | None
    plan: DensePointPlan | None
    orbit: Orbit | None
    evidence: EvidenceReport | None
    normal_form: NormalForm
    d: int
    notes: list


def analyze(s: SelfMap, d: int, options: AnalyzeOptions | None = None) -> Verdict:
    """Full decision run: build the normal form, search for the invariant
    character and the Frobenius quotient, and when no invariant character
    exists construct a candidate dense point, simulate its orbit and collect
    density evidence. Every reported witness is re-verified exactly."""
    options = options or AnalyzeOptions()
    from .reduction import build_normal_form

    nf = build_normal_form(s, d, options.m_bound)
    notes = []
    try:
        wit_b = check_condition_B(nf)
    except Unsupported as exc:
        wit_b = None
        notes.append(str(exc))
    try:
        wit_c = check_condition_C(nf, d)
    except Unsupported as exc:
        wit_c = None
        notes.append(str(exc))
    plan = orbit = evidence = None
    if wit_b is None and nf.beta_nf is not None and all(
        f.is_torus for f in s.factors
    ):
        gamma_avoid = _translation_values(nf)
        try:
            plan = construct_dense_point(nf, d, gamma_avoid)
        except ClassDimensionError as exc:
            notes.append(
                f"{exc}; constructing a candidate point with reused variables "
                "(density is not guaranteed by the threshold criterion)"
            )
            plan = construct_dense_point(
                nf, d, gamma_avoid, allow_class_overflow=True
            )
        orbit = simulate_orbit(s, plan.alpha_original, options.orbit_steps)
        evidence = density_evidence(
            orbit,
            index_bound=options.index_bound,
            spec_trials=options.spec_trials,
            degree_bound=options.degree_bound,
            seed=options.seed,
        )
    elif wit_b is not None:
        notes.append(
            "an invariant function exists, so no orbit is Zariski dense; "
            "dense-point construction skipped"
        )
    return Verdict(
        condition_b=wit_b,
        condition_c=wit_c,
        plan=plan,
        orbit=orbit,
        evidence=evidence,
        normal_form=nf,
        d=d,
        notes=notes,
    )


def _translation_values(nf: NormalForm):
    out = []
    if nf.beta_nf is None:
        return out
    for i in range(nf.beta_nf.ncoords):
        try:
            v = nf.beta_nf.coordinate_value(i)
        except Unsupported:
            continue
        if not v.is_one():
            out.append(v)
    return out
