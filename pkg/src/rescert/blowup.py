"""Blow-up machinery: Rees ideals, chart analysis, smoothness certificates.

The first blow-up of the quotient along the divisor is presented by the
kernel of k[z, b] -> A[T], b_i -> T * w_i(z) over the coordinate ring A of
the quotient; the kernel is computed by eliminating T with a block order.
Affine charts set one projective coordinate to 1 and are simplified by
repeatedly solving generators that are linear in some variable; every
simplification is certified as an isomorphism by mutual membership.

Smoothness uses the Jacobian criterion: the singular ideal is the chart
ideal plus all c x c minors of the Jacobian matrix, c the codimension.
Equidimensionality is an assumption recorded per chart, matching the
geometric situation.  The second blow-up along the certified reduced
singular locus reuses the same Rees machinery chart by chart.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from rescert.exactfield import CycNum
from rescert.groebner import (
    GrobnerBasis,
    GroebnerError,
    Ideal,
    Limits,
    eliminate,
    groebner_basis,
    hilbert_series,
    intersect,
    is_unit_ideal,
    krull_dimension,
    normal_form,
    radical_membership,
    reduces_to_zero,
    saturate,
    squarefree_part,
    minimal_extra_generators,
)
from rescert.multipoly import (
    Poly,
    VarSet,
    format_poly,
    parse_poly,
    solve_positive_weights,
)


class BlowupError(Exception):
    pass


# ---------------------------------------------------------------------------
# Rees ideal via elimination
# ---------------------------------------------------------------------------

@dataclass
class ReesPresentation:
    """The graph-closure ideal of a blow-up in ambient (base + projective) vars."""

    base_vars: VarSet
    proj_names: tuple
    center: list            # center generators, over base_vars
    ambient: VarSet         # base + projective variables
    ideal: Ideal            # the Rees ideal in the ambient ring
    weights: tuple          # positive weights making everything homogeneous
    extra_count: int | None = None
    total_min_count: int | None = None
    kept_new_gens: list = field(default_factory=list)


def rees_ideal(base: Ideal, center: list, proj_names: list,
               base_weights=None, *, limits: Limits | None = None,
               cache=True, with_counts: bool = True) -> ReesPresentation:
    """Rees ideal of the center over (base ring / base ideal).

    Returns the kernel of b_i -> T*w_i; when with_counts is set, also the
    minimal-generator bookkeeping relative to the base ideal.
    """
    if len(center) != len(proj_names):
        raise BlowupError("one projective coordinate per center generator")
    if base_weights is None:
        base_weights = solve_positive_weights(list(base.gens) + list(center)) \
            or tuple([1] * len(base.vars))
    cw = [w.weighted_degree(base_weights) for w in center]
    if any(d < 0 for d in cw):
        raise BlowupError("zero center generator")
    ext = VarSet(("t_rees",) + base.vars.names + tuple(proj_names))
    T = Poly.variable(ext, "t_rees")
    gens = [g.rename_vars(ext) for g in base.gens]
    for name, w in zip(proj_names, center):
        gens.append(Poly.variable(ext, name) - T * w.rename_vars(ext))
    keep_weights = list(base_weights) + list(cw)
    elim = eliminate(Ideal(ext, gens), ["t_rees"], weights_keep=keep_weights,
                     limits=limits, cache=cache, audit=False)
    ambient = elim.vars
    pres = ReesPresentation(
        base_vars=base.vars,
        proj_names=tuple(proj_names),
        center=list(center),
        ambient=ambient,
        ideal=Ideal(ambient, list(elim.gens) +
                    [g.rename_vars(ambient) for g in base.gens]),
        weights=tuple(keep_weights),
    )
    if with_counts:
        sub = Ideal(ambient, [g.rename_vars(ambient) for g in base.gens])
        count, kept = minimal_extra_generators(
            pres.ideal, sub, weights=pres.weights, cache=cache,
            return_polys=True)
        total = minimal_extra_generators(
            pres.ideal, Ideal(ambient, []), weights=pres.weights, cache=cache)
        pres.extra_count = count
        pres.total_min_count = total
        pres.kept_new_gens = kept
    return pres


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

@dataclass
class Chart:
    index: str                      # name of the dehomogenised coordinate
    vars: VarSet                    # remaining ambient variables
    raw: Ideal                      # ideal with the coordinate set to 1
    simplified: Ideal               # after solving linear generators
    eliminated: dict                # var name -> expression over kept vars
    certified: bool = False

    def expression(self, name: str) -> Poly:
        """The function of a (possibly eliminated) ambient coordinate."""
        if name == self.index:
            return Poly.constant(self.simplified.vars, 1)
        if name in self.simplified.vars:
            return Poly.variable(self.simplified.vars, name)
        if name in self.eliminated:
            return self.eliminated[name]
        raise BlowupError(f"{name} is not a coordinate of this chart")


def _substitute_chart(f: Poly, chart_vars: VarSet, drop: str) -> Poly:
    assignment = {}
    for n in f.vars.names:
        if n == drop:
            assignment[n] = Poly.constant(chart_vars, 1)
        else:
            assignment[n] = Poly.variable(chart_vars, n)
    return f.substitute(assignment)


def _solve_linear(gens: list, vars: VarSet):
    """Find (var, expression, generator index) with generator = c*var - tail,
    the variable absent from the tail."""
    for gi, f in enumerate(gens):
        for name in vars.names:
            pos = vars.position(name)
            unit = vars.unit_monomial(name)
            coeff = None
            ok = True
            for mon, c in f.terms:
                if mon[pos] == 0:
                    continue
                if mon == unit:
                    coeff = c
                else:
                    ok = False
                    break
            if ok and coeff is not None:
                tail = f - Poly(vars, {unit: coeff})
                expr = tail * (-coeff.inv())
                return name, expr, gi
    return None


def chart(pres: ReesPresentation, proj_name: str, *, cache=True,
          simplify_rounds: int = 4) -> Chart:
    """Affine chart where the given projective coordinate equals 1.

    Simplification repeatedly substitutes generators solved for a variable;
    fresh linear generators are exposed by interposed Groebner runs.  The
    recorded elimination map is certified by mutual membership.
    """
    if proj_name not in pres.proj_names:
        raise BlowupError(f"unknown projective coordinate {proj_name}")
    chart_names = tuple(n for n in pres.ambient.names if n != proj_name)
    cvars = VarSet(chart_names)
    gens = []
    for g in pres.ideal.gens:
        img = _substitute_chart(g, cvars, proj_name)
        if not img.is_zero():
            gens.append(img)
    raw = Ideal(cvars, gens)

    work_vars = cvars
    work = list(raw.gens)
    eliminated: dict = {}
    for round_no in range(simplify_rounds):
        changed = False
        while True:
            found = _solve_linear(work, work_vars)
            if found is None:
                break
            name, expr, gi = found
            changed = True
            kept_names = tuple(n for n in work_vars.names if n != name)
            new_vars = VarSet(kept_names)
            assignment = {n: Poly.variable(new_vars, n) for n in kept_names}
            assignment[name] = expr.rename_vars(new_vars)
            new_work = []
            for j, f in enumerate(work):
                if j == gi:
                    continue
                img = f.substitute(assignment)
                if not img.is_zero():
                    new_work.append(img)
            for k in list(eliminated):
                eliminated[k] = eliminated[k].substitute(assignment)
            eliminated[name] = expr.rename_vars(new_vars)
            work_vars = new_vars
            work = new_work
        if not work:
            break
        # expose more linear generators through a Groebner pass
        w = solve_positive_weights(work)
        gb = groebner_basis(Ideal(work_vars, work), weights=w, cache=cache,
                            audit=False)
        basis = list(gb.basis)
        if sorted(format_poly(f) for f in basis) == \
                sorted(format_poly(f) for f in work):
            if not changed:
                break
            work = basis
        else:
            work = basis

    simplified = Ideal(work_vars, work)
    ch = Chart(index=proj_name, vars=cvars, raw=raw, simplified=simplified,
               eliminated=eliminated)
    ch.certified = certify_chart(ch, cache=cache)
    return ch


def certify_chart(ch: Chart, cache=True) -> bool:
    """Mutual membership between the raw chart ideal and its simplification."""
    sv = ch.simplified.vars
    back = {n: Poly.variable(sv, n) for n in sv.names}
    for n, expr in ch.eliminated.items():
        back[n] = expr
    w = solve_positive_weights(list(ch.simplified.gens)) if ch.simplified.gens else None
    gb_simpl = groebner_basis(ch.simplified, weights=w, cache=cache, audit=False)
    for g in ch.raw.gens:
        img = g.substitute(back)
        if not reduces_to_zero(img, gb_simpl):
            return False
    wr = solve_positive_weights(list(ch.raw.gens)) if ch.raw.gens else None
    gb_raw = groebner_basis(ch.raw, weights=wr, cache=cache, audit=False)
    for g in ch.simplified.gens:
        lift = g.rename_vars(ch.raw.vars)
        if not reduces_to_zero(lift, gb_raw):
            return False
    for n, expr in ch.eliminated.items():
        lift = Poly.variable(ch.raw.vars, n) - expr.rename_vars(ch.raw.vars)
        if not reduces_to_zero(lift, gb_raw):
            return False
    return True


# ---------------------------------------------------------------------------
# Jacobian criterion
# ---------------------------------------------------------------------------

def _minors(rows: list[list[Poly]], size: int, vars: VarSet) -> list[Poly]:
    out = []
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    for rsel in itertools.combinations(range(nrows), size):
        for csel in itertools.combinations(range(ncols), size):
            out.append(_det([[rows[i][j] for j in csel] for i in rsel], vars))
    return out


def _det(m: list[list[Poly]], vars: VarSet) -> Poly:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = Poly.zero(vars)
    for j in range(n):
        if m[0][j].is_zero():
            continue
        sub = [[row[k] for k in range(n) if k != j] for row in m[1:]]
        term = m[0][j] * _det(sub, vars)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def jacobian_singular_ideal(ideal: Ideal, *, codim: int | None = None,
                            cache=True):
    """Chart ideal plus the c x c minors of the Jacobian of its generators.

    c defaults to #vars - dim, with the dimension taken from a Groebner
    run; equidimensionality is assumed and reported by the caller.
    """
    vars = ideal.vars
    if codim is None:
        w = solve_positive_weights(list(ideal.gens)) if ideal.gens else None
        dim = krull_dimension(ideal, weights=w, cache=cache)
        codim = len(vars) - dim
    if codim <= 0:
        gens = list(ideal.gens) + [Poly.constant(vars, 1)] if codim == 0 and not ideal.gens else list(ideal.gens)
        if codim == 0:
            # zero minors: the empty determinant is 1, the locus is smooth
            return Ideal(vars, gens + [Poly.constant(vars, 1)]), 0
        raise BlowupError("negative codimension")
    rows = [[g.differentiate(n) for n in vars.names] for g in ideal.gens]
    if len(rows) < codim:
        raise BlowupError("fewer generators than the codimension")
    minors = [m for m in _minors(rows, codim, vars) if not m.is_zero()]
    return Ideal(vars, list(ideal.gens) + minors), codim


def is_smooth_chart(ideal: Ideal, *, cache=True, saturate_out: Poly | None = None):
    """Jacobian smoothness; optionally saturating the irrelevant locus away.

    Returns (smooth, info).  The saturation path is recorded so the report
    can distinguish a direct certificate from a saturated one.
    """
    if not ideal.gens:
        return True, {"empty_ideal": True, "codim": 0}
    sing, codim = jacobian_singular_ideal(ideal, cache=cache)
    w = solve_positive_weights(list(sing.gens))
    if is_unit_ideal(sing, weights=w, cache=cache):
        return True, {"codim": codim, "direct": True}
    if saturate_out is not None and not saturate_out.is_constant():
        sat = saturate(sing, saturate_out, cache=cache)
        if is_unit_ideal(sat, cache=cache):
            return True, {"codim": codim, "direct": False,
                          "saturated_by": format_poly(saturate_out)}
    return False, {"codim": codim, "direct": False}


# ---------------------------------------------------------------------------
# singular locus certification and the second blow-up
# ---------------------------------------------------------------------------

@dataclass
class CenterCandidate:
    ideal: Ideal
    certified: bool
    detail: dict


def center_candidate(chart_ideal: Ideal, singular: Ideal, *,
                     explicit: list | None = None, cache=True) -> CenterCandidate:
    """Reduced candidate for the singular locus, certified set-theoretically.

    The candidate is either supplied explicitly or assembled from squarefree
    parts of a Groebner basis of the singular ideal; both radical-membership
    directions against the Jacobian ideal are certified.
    """
    vars = chart_ideal.vars
    if explicit is not None:
        cand = Ideal(vars, explicit)
    else:
        w = solve_positive_weights(list(singular.gens))
        gb = groebner_basis(singular, weights=w, cache=cache, audit=False)
        gens = []
        seen = set()
        for g in gb.basis:
            s = squarefree_part(g)
            if s.terms not in seen:
                seen.add(s.terms)
                gens.append(s)
        cand = Ideal(vars, gens)
    detail: dict = {"candidate_size": len(cand.gens)}
    for g in singular.gens:
        if not radical_membership(g, cand, cache=cache):
            detail["uncertified"] = f"singular generator not in radical: {format_poly(g)}"
            return CenterCandidate(cand, False, detail)
    for g in cand.gens:
        if not radical_membership(g, singular, cache=cache):
            detail["uncertified"] = f"candidate not in radical of singular ideal: {format_poly(g)}"
            return CenterCandidate(cand, False, detail)
    return CenterCandidate(cand, True, detail)


def second_blowup_smooth(chart_ideal: Ideal, center: CenterCandidate, *,
                         cache=True, limits=None):
    """Blow up the chart along the certified center; certify every
    projective subchart smooth by the Jacobian criterion."""
    if not center.certified:
        raise BlowupError("center candidate must be certified first")
    k = len(center.ideal.gens)
    proj = [f"c{i+1}" for i in range(k)]
    pres = rees_ideal(chart_ideal, list(center.ideal.gens), proj,
                      cache=cache, limits=limits, with_counts=False)
    charts = {}
    all_smooth = True
    for i, name in enumerate(proj):
        ch = chart(pres, name, cache=cache)
        # on this subchart the exceptional divisor is cut by the i-th
        # center generator; saturating by it removes irrelevant junk only
        exc = center.ideal.gens[i]
        exc_img = exc.substitute({n: ch.expression(n) for n in exc.vars.names})
        smooth, info = is_smooth_chart(ch.simplified, cache=cache,
                                       saturate_out=exc_img)
        info["chart_certified"] = ch.certified
        info["variables"] = ch.simplified.vars.names
        charts[name] = (smooth, info)
        if not (smooth and ch.certified):
            all_smooth = False
    return all_smooth, charts


# ---------------------------------------------------------------------------
# whole-space checks on the first blow-up
# ---------------------------------------------------------------------------

def singular_locus_coverage(pres: ReesPresentation, charts: dict, inside: tuple,
                            *, cache=True):
    """No singular point of the listed charts survives outside the union of
    the `inside` charts: saturating the chart's Jacobian ideal by each
    inside-coordinate must give the unit ideal."""
    results = {}
    ok = True
    for name, ch in charts.items():
        sing, codim = jacobian_singular_ideal(ch.simplified, cache=cache)
        cur = sing
        for b in inside:
            cur = saturate(cur, ch.expression(b), cache=cache)
        unit = is_unit_ideal(cur, cache=cache)
        results[name] = {"unit_after_saturation": unit, "codim": codim}
        ok = ok and unit
    return ok, results


def fiber_over_origin(pres: ReesPresentation, *, cache=True) -> Ideal:
    """Projective fiber ideal: base variables set to zero, irrelevant
    components removed by saturating with respect to every projective
    coordinate and intersecting."""
    bnames = pres.proj_names
    bvars = VarSet(bnames)
    gens = []
    for g in pres.ideal.gens:
        assignment = {}
        for n in g.vars.names:
            if n in bvars:
                assignment[n] = Poly.variable(bvars, n)
            else:
                assignment[n] = Poly.zero(bvars)
        img = g.substitute(assignment)
        if not img.is_zero():
            gens.append(img)
    raw = Ideal(bvars, gens)
    out = None
    for n in bnames:
        s = saturate(raw, Poly.variable(bvars, n), cache=cache)
        out = s if out is None else intersect(out, s, cache=cache)
    return out


def semismallness(pres: ReesPresentation, charts: dict, *, cache=True):
    """Fiber over the origin: dimension two, matches the expected
    two-component decomposition, and is not inside the singular locus."""
    bvars = VarSet(pres.proj_names)
    fiber = fiber_over_origin(pres, cache=cache)
    dim_cone = krull_dimension(fiber, cache=cache)
    proj_dim = dim_cone - 1

    comp1 = Ideal(bvars, [parse_poly(s, bvars) for s in
                          ("b1", "b3", "b5^2-b4*b6")])
    comp2 = Ideal(bvars, [parse_poly(s, bvars) for s in ("b1", "b4", "b5")])
    expected = intersect(comp1, comp2, cache=cache)
    radical_match = all(
        radical_membership(g, expected, cache=cache) for g in fiber.gens
    ) and all(
        radical_membership(g, fiber, cache=cache) for g in expected.gens
    )
    # the displayed fiber equations
    displayed = [parse_poly(s, bvars) for s in
                 ("b1", "b3*b5", "b3*b4", "b5^2-b4*b6")]
    gb_fiber = groebner_basis(fiber, cache=cache, audit=False)
    displayed_ok = all(reduces_to_zero(f, gb_fiber) for f in displayed)

    # not contained in the singular locus: per component, exhibit a chart
    # where the component is 2-dimensional and leaves the singular locus
    component_witness = {}
    for label, comp in (("plane_part", comp2), ("quadric_part", comp1)):
        witness = None
        for name, ch in charts.items():
            cv = ch.simplified.vars
            try:
                comp_gens = []
                for g in comp.gens:
                    assignment = {n: ch.expression(n) for n in g.vars.names}
                    img = g.substitute(assignment)
                    if not img.is_zero():
                        comp_gens.append(img)
                zero_gens = []
                for n in pres.base_vars.names:
                    e = ch.expression(n)
                    if not e.is_zero():
                        zero_gens.append(e)
            except BlowupError:
                continue
            if any(g.is_constant() and not g.is_zero() for g in comp_gens):
                # component does not meet this chart
                continue
            comp_chart = Ideal(cv, list(ch.simplified.gens) + comp_gens + zero_gens)
            dim_comp = krull_dimension(comp_chart, cache=cache)
            if dim_comp != 2:
                continue
            sing, _ = jacobian_singular_ideal(ch.simplified, cache=cache)
            both = Ideal(cv, list(comp_chart.gens) + list(sing.gens))
            dim_both = krull_dimension(both, cache=cache)
            if dim_both < 2:
                witness = {"chart": name, "component_dim": dim_comp,
                           "intersection_dim": dim_both}
                break
        component_witness[label] = witness
    not_in_sing = all(w is not None for w in component_witness.values())

    ok = proj_dim == 2 and radical_match and displayed_ok and not_in_sing
    return ok, {
        "fiber_projective_dimension": proj_dim,
        "two_component_radical_match": radical_match,
        "displayed_equations_contained": displayed_ok,
        "component_witnesses": component_witness,
    }


# ---------------------------------------------------------------------------
# identification of the third chart with the A2 symplectic quotient
# ---------------------------------------------------------------------------

def s3_quotient_series(max_degree: int, u_weight: int = 3, v_weight: int = 1):
    """Hilbert series of the S3-invariants of (standard plane) + dual,
    graded with the given weights on the two summands.

    The symmetric group acts on the rank-2 hyperplane lattice; the dual
    side carries the inverse-transpose matrices.  Computed by the Molien
    formula, independently of any Groebner data.
    """
    from rescert.grouprep import molien_from_blocks

    s1 = ((-1, 1), (0, 1))
    s2 = ((1, 0), (1, -1))
    mats = []
    frontier = [((1, 0), (0, 1))]
    seen = {frontier[0]}
    while frontier:
        nxt = []
        for m in frontier:
            for g in (s1, s2):
                prod = _imat_mul(m, g)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    mats = sorted(seen)
    if len(mats) != 6:
        raise BlowupError("S3 closure failed")
    blocks = []
    for m in mats:
        a, b = m[0]
        c, d = m[1]
        mat = (CycNum(a), CycNum(b), CycNum(c), CycNum(d))
        det = a * d - b * c
        dual = (CycNum(d * det), CycNum(-c * det), CycNum(-b * det), CycNum(a * det))
        blocks.append((mat, dual))
    degx = max_degree // u_weight + 1
    degy = max_degree
    table = molien_from_blocks(blocks, 6, degx, degy)
    out = [0] * (max_degree + 1)
    for a in range(degx + 1):
        for b in range(degy + 1):
            d = a * u_weight + b * v_weight
            if d <= max_degree:
                out[d] += table[a][b]
    return out


def _imat_mul(m, g):
    (a, b), (c, d) = m
    (e, f), (gg, h) = g
    return ((a * e + b * gg, a * f + b * h), (c * e + d * gg, c * f + d * h))


def a2_identification(chart3: Chart, max_degree: int = 24, *, cache=True):
    """Compare the third-chart ring with the A2 symplectic quotient.

    The seven chart coordinates should match the seven fundamental
    invariants of the symmetric-group action on plane + dual plane with
    bidegrees (1,1), (2,0), (2,1), (3,0), (1,2), (0,3), (0,2); the weight
    assignment (u, v) -> (3, 1) makes the chart ideal homogeneous.  The
    comparison checks that homogeneity and matches the Hilbert series of
    the chart against the independently computed invariant Molien series,
    plus the singular-locus dimension.  Reported as a consistency
    statement, not an isomorphism proof.
    """
    ideal = chart3.simplified
    expected_names = ("z1", "z3", "z5", "z6", "b1", "b2", "b6")
    if ideal.vars.names != expected_names:
        return False, {"error": f"unexpected chart coordinates {ideal.vars.names}"}
    alpha, beta = 3, 1
    bidegrees = {"z1": (1, 1), "z3": (2, 0), "z5": (2, 1), "z6": (3, 0),
                 "b1": (1, 2), "b2": (0, 3), "b6": (0, 2)}
    w = tuple(alpha * bidegrees[n][0] + beta * bidegrees[n][1]
              for n in expected_names)
    if not all(g.is_homogeneous(w) for g in ideal.gens):
        return False, {"error": "chart ideal not homogeneous for the matched weights"}
    gb = groebner_basis(ideal, weights=w, cache=cache, audit=False)
    series = hilbert_series(gb, weights=w).coefficients(max_degree)
    invariant_series = s3_quotient_series(max_degree, alpha, beta)
    match = series == invariant_series
    sing, _ = jacobian_singular_ideal(ideal, cache=cache)
    dim_sing = krull_dimension(sing, cache=cache)
    return match and dim_sing == 2, {
        "weights": w,
        "series": series,
        "invariant_series": invariant_series,
        "singular_dimension": dim_sing,
    }
