"""Buchberger engine and derived ideal operations.

The engine works on an integer representation: coefficients are 4-tuples of
ints encoding elements of Z[t]/(t^4 - t^2 + 1) in the basis 1, t, t^2, t^3,
and every polynomial is kept primitive (integral, content 1).  Reduction
steps use the fraction-free form ``f <- lc(g)*f - c*x^m*g`` so no rational
arithmetic happens inside the loop; the reduced basis is normalised to monic
CycNum polynomials only at the end.

Monomial-order keys are additive integer vectors, so the key of a shifted
monomial is a vector sum.  Pair management follows the classical
Gebauer-Moeller update; selection is the normal strategy (minimal weighted
degree of the pair lcm) with sugar as tie-break.  Every computed basis can
be re-audited: each S-polynomial of the final basis and each input
generator is re-reduced to zero.

Reduced bases are cached on disk keyed by a content hash of the canonical
generator printout, the order descriptor and the field tag; cache writes go
through write-to-temp-then-rename.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
import time
from fractions import Fraction
from heapq import heappush, heappop
from typing import Iterable, Sequence

from rescert.exactfield import CycNum
from rescert.multipoly import (
    DEGREVLEX,
    MonOrder,
    Poly,
    PolyError,
    VarSet,
    block_order,
    format_poly,
    mon_degree,
    mon_div,
    mon_divides,
    mon_lcm,
    mon_mul,
    parse_ideal_text,
    format_ideal_text,
    weighted_order,
)

FIELD_TAG = "QQ(zeta12)"

_C_ZERO = (0, 0, 0, 0)
_C_ONE = (1, 0, 0, 0)


class GroebnerError(Exception):
    pass


class ContainmentError(GroebnerError):
    pass


class ResourceLimitError(GroebnerError):
    """Raised when a configured pair/degree/time cap is hit.

    Carries the partial engine state so a caller may resume the run with
    relaxed limits.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class Limits:
    __slots__ = ("max_pairs", "max_degree", "max_seconds")

    def __init__(self, max_pairs=None, max_degree=None, max_seconds=None):
        self.max_pairs = max_pairs
        self.max_degree = max_degree
        self.max_seconds = max_seconds


# ---------------------------------------------------------------------------
# coefficient arithmetic on int (or Fraction) 4-tuples
# ---------------------------------------------------------------------------

def _cmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    if a1 == 0 == a3 and b1 == 0 == b3:
        p = a2 * b2
        return (a0 * b0 - p, 0, a0 * b2 + a2 * b0 + p, 0)
    e4 = a1 * b3 + a2 * b2 + a3 * b1
    e5 = a2 * b3 + a3 * b2
    return (
        a0 * b0 - e4 - a3 * b3,
        a0 * b1 + a1 * b0 - e5,
        a0 * b2 + a1 * b1 + a2 * b0 + e4,
        a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0 + e5,
    )


def _csub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])


def _cneg(a):
    return (-a[0], -a[1], -a[2], -a[3])


def _cyc_to_tuple(c: CycNum):
    return c.c


def _tuple_to_cyc(t) -> CycNum:
    return CycNum(*t)


# ---------------------------------------------------------------------------
# engine polynomials: lists of (key, mon, coeff) sorted descending by key
# ---------------------------------------------------------------------------
#
# Order keys are packed into single integers: the additive key tuple
# (c_0, ..., c_{k-1}) becomes sum(c_i << (SHIFT*(k-1-i))).  Components stay
# far below 2^31 here, so packed keys add componentwise without carries and
# integer comparison agrees with lexicographic tuple comparison.

_KEY_SHIFT = 40


def _packed_keyfn(order_key):
    shift = _KEY_SHIFT

    def keyfn(mon, _ok=order_key, _s=shift):
        k = 0
        for c in _ok(mon):
            k = (k << _s) + c
        return k

    return keyfn


def _poly_to_eng(f: Poly, keyfn):
    """Convert to primitive integer engine form (scaling is dropped)."""
    if f.is_zero():
        return []
    denlcm = 1
    for _, c in f.terms:
        for x in c.c:
            if x.denominator != 1:
                denlcm = denlcm * x.denominator // _gcd_int(denlcm, x.denominator)
    terms = []
    for m, c in f.terms:
        tup = tuple(int(x * denlcm) for x in c.c)
        terms.append((keyfn(m), m, tup))
    terms.sort(key=lambda t: t[0], reverse=True)
    return _strip_content(terms)


def _poly_to_eng_exact(f: Poly, keyfn):
    """Convert keeping exact Fraction coefficients (for normal forms)."""
    terms = [(keyfn(m), m, c.c) for m, c in f.terms]
    terms.sort(key=lambda t: t[0], reverse=True)
    return terms


def _eng_to_poly(terms, vars: VarSet, monic=True) -> Poly:
    if not terms:
        return Poly.zero(vars)
    if monic:
        lc = _tuple_to_cyc(terms[0][2])
        inv = lc.inv()
        return Poly(vars, {m: _tuple_to_cyc(c) * inv for _, m, c in terms})
    return Poly(vars, {m: _tuple_to_cyc(c) for _, m, c in terms})


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _strip_content(terms):
    g = 0
    for _, _, c in terms:
        for x in c:
            if x:
                g = _gcd_int(g, x)
                if g == 1:
                    break
        if g == 1:
            break
    if g == 0:
        return []
    lead = terms[0][2]
    flip = 1
    for x in lead:
        if x:
            flip = -1 if x < 0 else 1
            break
    if g == 1 and flip == 1:
        return terms
    if flip < 0:
        g = -g
    return [(k, m, (c[0] // g, c[1] // g, c[2] // g, c[3] // g)) for k, m, c in terms]


def _merge_scaled(f, af, g, cg, shift, kshift):
    """Return af*f - cg*x^shift*g, both inputs sorted descending."""
    out = []
    i = j = 0
    nf, ng = len(f), len(g)
    scale_f = af != _C_ONE
    cmul = _cmul
    while i < nf and j < ng:
        kf = f[i][0]
        kg = g[j][0] + kshift
        if kf > kg:
            t = f[i]
            out.append((kf, t[1], cmul(af, t[2]) if scale_f else t[2]))
            i += 1
        elif kf < kg:
            t = g[j]
            out.append((kg, mon_mul(t[1], shift), _cneg(cmul(cg, t[2]))))
            j += 1
        else:
            cf = cmul(af, f[i][2]) if scale_f else f[i][2]
            c = _csub(cf, cmul(cg, g[j][2]))
            if c != _C_ZERO and any(c):
                out.append((kf, f[i][1], c))
            i += 1
            j += 1
    while i < nf:
        t = f[i]
        out.append((t[0], t[1], cmul(af, t[2]) if scale_f else t[2]))
        i += 1
    while j < ng:
        t = g[j]
        out.append((t[0] + kshift, mon_mul(t[1], shift), _cneg(cmul(cg, t[2]))))
        j += 1
    return out


def _mask(mon):
    m = 0
    for i, e in enumerate(mon):
        if e:
            m |= 1 << i
    return m


class _Elem:
    """A basis element with cached leading data."""

    __slots__ = ("terms", "lm", "lmkey", "lc", "mask", "sugar", "deg", "index")

    def __init__(self, terms, sugar, index=-1, weights=None):
        self.terms = terms
        self.lmkey, self.lm, self.lc = terms[0]
        self.mask = _mask(self.lm)
        self.deg = _wdeg(self.lm, weights)
        self.sugar = sugar
        self.index = index


def _wdeg(mon, weights):
    if weights is None:
        return sum(mon)
    return sum(a * b for a, b in zip(weights, mon))


def _find_reducer(mon, mask, reducers):
    for r in reducers:
        if r.mask & ~mask:
            continue
        rl = r.lm
        ok = True
        for a, b in zip(rl, mon):
            if a > b:
                ok = False
                break
        if ok:
            return r
    return None


def _apply_suffix(out, scales):
    """Catch emitted head terms up with the scale factors applied after them."""
    nsteps = len(scales)
    suffix = [_C_ONE] * (nsteps + 1)
    for s in range(nsteps - 1, -1, -1):
        suffix[s] = _cmul(suffix[s + 1], scales[s])
    return [
        (k, m, c if suffix[step] == _C_ONE else _cmul(c, suffix[step]))
        for k, m, c, step in out
    ]


def _reduce_full(f, reducers, exact=False):
    """Fully reduce f against reducers.

    In the default fraction-free mode each step rescales the remainder of f
    by the reducer's leading coefficient; already-emitted head terms pick up
    the same factor lazily (suffix products applied at the end) and the
    result is content-stripped.  Periodically the emitted prefix is
    materialised and the whole polynomial stripped of integer content to
    keep coefficients small.  With exact=True the reducers must be monic and
    coefficients are Fractions; the result is the exact normal form.
    """
    if not f:
        return []
    work = list(f)
    out = []           # (key, mon, coeff, step_emitted)
    scales = []        # multiplier introduced at each step
    pos = 0
    steps_since_strip = 0
    while pos < len(work):
        key, mon, coeff = work[pos]
        r = _find_reducer(mon, _mask(mon), reducers)
        if r is None:
            out.append((key, mon, coeff, len(scales)))
            pos += 1
            continue
        shift = mon_div(mon, r.lm)
        kshift = key - r.lmkey
        a = r.lc if not exact else _C_ONE
        tail = _merge_scaled(work[pos:], a, r.terms, coeff, shift, kshift)
        # the leading terms cancel exactly
        if tail and tail[0][0] == key:
            tail = tail[1:]
        if not exact:
            scales.append(a)
        work = tail
        pos = 0
        steps_since_strip += 1
        if not exact and steps_since_strip >= 32:
            steps_since_strip = 0
            whole = _apply_suffix(out, scales) if out else []
            whole = [(k, m, c) for k, m, c in whole]
            stripped = _strip_content(whole + work)
            out = [(k, m, c, 0) for k, m, c in stripped[: len(whole)]]
            work = stripped[len(whole):]
            scales = []
    if not out:
        return []
    if exact:
        return [(k, m, c) for k, m, c, _ in out]
    return _strip_content(_apply_suffix(out, scales))


# ---------------------------------------------------------------------------
# Buchberger with Gebauer-Moeller update
# ---------------------------------------------------------------------------

class _BuchState:
    def __init__(self, keyfn, weights):
        self.keyfn = keyfn
        self.weights = weights
        self.elems: list[_Elem] = []
        self.in_g: list[bool] = []
        self.heap: list = []
        self.alive: set = set()
        self.pairs_done = 0


def _pair_lcm(a: _Elem, b: _Elem):
    return mon_lcm(a.lm, b.lm)


def _gm_update(st: _BuchState, h: _Elem):
    """Gebauer-Moeller pair update for a freshly added element."""
    elems = st.elems
    mh = h.lm
    old = [i for i in range(len(elems)) if st.in_g[i] and i != h.index]

    cand = []
    for g in old:
        lcm_hg = mon_lcm(mh, elems[g].lm)
        cand.append([lcm_hg, g, False])

    kept = []
    for idx, (lcm_hg, g, _dead) in enumerate(cand):
        if cand[idx][2]:
            continue
        disjoint = mon_mul(mh, elems[g].lm) == lcm_hg
        dominated = False
        if not disjoint:
            for jdx, (lcm2, g2, dead2) in enumerate(cand):
                if jdx == idx or dead2:
                    continue
                if mon_divides(lcm2, lcm_hg) and lcm2 != lcm_hg:
                    dominated = True
                    break
        if disjoint:
            # product criterion: drop silently
            cand[idx][2] = True
            continue
        if dominated:
            cand[idx][2] = True
            continue
        kept.append((lcm_hg, g))
    # among kept, remove duplicates of the same lcm (keep smallest index)
    seen = {}
    for lcm_hg, g in kept:
        if lcm_hg not in seen:
            seen[lcm_hg] = g
    new_pairs = [(lcm_hg, g) for lcm_hg, g in seen.items()]

    # chain criterion on old pairs
    for (i, j) in list(st.alive):
        lcm_ij = mon_lcm(elems[i].lm, elems[j].lm)
        if (
            mon_divides(mh, lcm_ij)
            and mon_lcm(mh, elems[i].lm) != lcm_ij
            and mon_lcm(mh, elems[j].lm) != lcm_ij
        ):
            st.alive.discard((i, j))

    # redundant old elements no longer spawn pairs
    for g in old:
        if mon_divides(mh, elems[g].lm):
            st.in_g[g] = False

    for lcm_hg, g in new_pairs:
        i, j = (g, h.index) if g < h.index else (h.index, g)
        deg = _wdeg(lcm_hg, st.weights)
        sug = max(
            elems[i].sugar + _wdeg(mon_div(lcm_hg, elems[i].lm), st.weights),
            elems[j].sugar + _wdeg(mon_div(lcm_hg, elems[j].lm), st.weights),
        )
        st.alive.add((i, j))
        heappush(st.heap, (deg, sug, st.keyfn(lcm_hg), i, j))


def _add_elem(st: _BuchState, terms, sugar):
    e = _Elem(terms, sugar, index=len(st.elems), weights=st.weights)
    st.elems.append(e)
    st.in_g.append(True)
    _gm_update(st, e)
    return e


def _buchberger(eng_gens, keyfn, weights=None, limits: Limits | None = None,
                state: _BuchState | None = None, degree_cap=None):
    """Run Buchberger; returns the engine state with all pairs processed.

    With degree_cap set, pairs above the cap stay queued; for homogeneous
    input the resulting basis decides membership up to that degree.
    """
    if state is None:
        state = _BuchState(keyfn, weights)
        for terms in eng_gens:
            if terms:
                _add_elem(state, terms, _wdeg(terms[0][1], weights))
    st = state
    t0 = time.monotonic()
    while st.heap:
        if degree_cap is not None and st.heap[0][0] > degree_cap:
            break
        deg, sug, _k, i, j = heappop(st.heap)
        if (i, j) not in st.alive:
            continue
        st.alive.discard((i, j))
        if limits:
            if limits.max_degree is not None and deg > limits.max_degree:
                raise ResourceLimitError(
                    f"pair degree {deg} exceeds cap {limits.max_degree}", st)
            if limits.max_pairs is not None and st.pairs_done >= limits.max_pairs:
                raise ResourceLimitError(
                    f"pair count cap {limits.max_pairs} reached", st)
            if limits.max_seconds is not None and time.monotonic() - t0 > limits.max_seconds:
                raise ResourceLimitError(
                    f"time cap {limits.max_seconds}s exceeded", st)
        st.pairs_done += 1
        a, b = st.elems[i], st.elems[j]
        lcm = mon_lcm(a.lm, b.lm)
        sha = mon_div(lcm, a.lm)
        shb = mon_div(lcm, b.lm)
        klcm = st.keyfn(lcm)
        ka = klcm - a.lmkey
        kb = klcm - b.lmkey
        shifted_a = [(k + ka, mon_mul(m, sha), _cmul(b.lc, c)) for k, m, c in a.terms]
        spoly = _merge_scaled(shifted_a, _C_ONE, b.terms, a.lc, shb, kb)
        if spoly and spoly[0][1] == lcm:
            spoly = spoly[1:]
        h = _reduce_full(spoly, st.elems, exact=False)
        if h:
            _add_elem(st, h, sug)
    return st


def _interreduce(elems, keyfn, weights):
    """Minimal antichain of leading monomials, then full tail reduction."""
    pool = [e for e in elems]
    pool.sort(key=lambda e: e.lmkey)
    keep: list[_Elem] = []
    for e in pool:
        if any(mon_divides(k.lm, e.lm) for k in keep):
            continue
        keep.append(e)
    changed = True
    while changed:
        changed = False
        for idx in range(len(keep)):
            others = keep[:idx] + keep[idx + 1:]
            red = _reduce_full(keep[idx].terms, others, exact=False)
            if not red:
                keep.pop(idx)
                changed = True
                break
            if red != keep[idx].terms:
                keep[idx] = _Elem(red, keep[idx].sugar, keep[idx].index, weights)
                changed = True
    keep.sort(key=lambda e: e.lmkey)
    return keep


# ---------------------------------------------------------------------------
# public ideal / basis types
# ---------------------------------------------------------------------------

class Ideal:
    """A finitely generated ideal: variable set plus generator list."""

    __slots__ = ("vars", "gens")

    def __init__(self, vars: VarSet, gens: Iterable[Poly]):
        seen = set()
        cleaned = []
        for g in gens:
            if g.vars != vars:
                raise PolyError("generator over wrong variable set")
            if g.is_zero():
                continue
            if g.terms in seen:
                continue
            seen.add(g.terms)
            cleaned.append(g)
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "gens", tuple(cleaned))

    def __setattr__(self, name, value):
        raise AttributeError("Ideal is immutable")

    def __repr__(self):
        return f"Ideal({len(self.gens)} gens over {self.vars.names})"

    def canonical_strings(self):
        return sorted(format_poly(g) for g in self.gens)


class GrobnerBasis:
    """Reduced Groebner basis with its order; basis polys monic, sorted."""

    __slots__ = ("vars", "order", "basis", "reduced", "_reducers", "_keyfn")

    def __init__(self, vars: VarSet, order: MonOrder, basis: Sequence[Poly]):
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "basis", tuple(basis))
        object.__setattr__(self, "reduced", True)
        object.__setattr__(self, "_reducers", None)
        object.__setattr__(self, "_keyfn", order.key)

    def __setattr__(self, name, value):
        raise AttributeError("GrobnerBasis is immutable")

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def leading_monomials(self):
        return [f.leading_term(self.order)[0] for f in self.basis]

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def _int_reducers(self):
        red = object.__getattribute__(self, "_reducers")
        if red is None:
            keyfn = _packed_keyfn(self._keyfn)
            red = [
                _Elem(_poly_to_eng(f, keyfn), f.total_degree())
                for f in self.basis
                if not f.is_zero()
            ]
            object.__setattr__(self, "_reducers", red)
        return red

    def _exact_reducers(self):
        keyfn = _packed_keyfn(self._keyfn)
        return [
            _Elem(_poly_to_eng_exact(f, keyfn), f.total_degree())
            for f in self.basis
        ]


class HilbertSeries:
    """Graded dimension series numerator over prod_i (1 - s^{w_i}).

    For the standard grading (all weights 1) the cancelled representation
    numerator/(1-s)^dim of the spec is available via :meth:`reduced_form`.
    """

    __slots__ = ("numerator", "weights")

    def __init__(self, numerator: dict, weights: Sequence[int]):
        object.__setattr__(
            self, "numerator",
            tuple(sorted((d, c) for d, c in numerator.items() if c)))
        object.__setattr__(self, "weights", tuple(weights))

    def __setattr__(self, name, value):
        raise AttributeError("HilbertSeries is immutable")

    def coefficients(self, max_degree: int) -> list[int]:
        coef = [0] * (max_degree + 1)
        for d, c in self.numerator:
            if d <= max_degree:
                coef[d] = c
        for w in self.weights:
            for d in range(w, max_degree + 1):
                coef[d] += coef[d - w]
        return coef

    def _numer_list(self):
        if not self.numerator:
            return [0]
        deg = max(d for d, _ in self.numerator)
        out = [0] * (deg + 1)
        for d, c in self.numerator:
            out[d] = c
        return out

    def dimension(self) -> int:
        num = self._numer_list()
        if num == [0]:
            raise GroebnerError("zero Hilbert series has no dimension")
        mult = 0
        while sum(num) == 0:
            # divide by (1 - s)
            out = [0] * (len(num) - 1)
            acc = 0
            for d in range(len(num) - 1):
                acc += num[d]
                out[d] = acc
            num = out if out else [0]
            mult += 1
        return len(self.weights) - mult

    def reduced_form(self):
        """(numerator coefficients, pole order) with numerator(1) != 0."""
        if any(w != 1 for w in self.weights):
            raise GroebnerError("reduced form defined for the standard grading")
        num = self._numer_list()
        d = len(self.weights)
        while d > 0 and sum(num) == 0:
            out = [0] * (len(num) - 1)
            acc = 0
            for i in range(len(num) - 1):
                acc += num[i]
                out[i] = acc
            num = out if out else [0]
            d -= 1
        while len(num) > 1 and num[-1] == 0:
            num.pop()
        return num, d


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

class GBCache:
    def __init__(self, directory: str):
        self.directory = directory

    @staticmethod
    def key_for(ideal: Ideal, order: MonOrder) -> str:
        h = hashlib.sha256()
        h.update(FIELD_TAG.encode())
        h.update(b"\x00")
        h.update(order.descriptor.encode())
        h.update(b"\x00")
        h.update(" ".join(ideal.vars.names).encode())
        for s in ideal.canonical_strings():
            h.update(b"\x00")
            h.update(s.encode())
        return h.hexdigest()

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, key + ".ideal")

    def load(self, key: str):
        path = self._path(key)
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            text = fh.read()
        vars, polys = parse_ideal_text(text)
        return vars, polys

    def store(self, key: str, vars: VarSet, basis: Sequence[Poly], order: MonOrder):
        os.makedirs(self.directory, exist_ok=True)
        text = format_ideal_text(
            vars, basis,
            comments=[f"gb-cache v1", f"order: {order.descriptor}", f"key: {key}"])
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def clear(self) -> int:
        if not os.path.isdir(self.directory):
            return 0
        n = 0
        for name in os.listdir(self.directory):
            if name.endswith(".ideal"):
                os.unlink(os.path.join(self.directory, name))
                n += 1
        return n


def default_cache() -> GBCache:
    return GBCache(os.environ.get("RESCERT_CACHE", ".rescert-cache"))


_CACHE_EVENTS: list[tuple[str, str]] = []


def cache_events():
    return list(_CACHE_EVENTS)


# ---------------------------------------------------------------------------
# main entry points
# ---------------------------------------------------------------------------

def groebner_basis(ideal: Ideal, order: MonOrder | None = None, *,
                   weights: Sequence[int] | None = None,
                   limits: Limits | None = None,
                   cache: GBCache | None | bool = True,
                   audit: bool = True,
                   resume_state=None) -> GrobnerBasis:
    """Reduced Groebner basis of the ideal for the given order.

    weights only influence pair scheduling (they should make the input
    homogeneous for exact sugar); the result depends on the order alone.
    """
    if order is None:
        order = weighted_order(weights) if weights else DEGREVLEX
    if cache is True:
        cache = default_cache()
    elif cache is False:
        cache = None
    key = GBCache.key_for(ideal, order) if cache else None
    if cache and resume_state is None:
        got = cache.load(key)
        if got is not None:
            _CACHE_EVENTS.append(("hit", key))
            vars, polys = got
            if vars != ideal.vars:
                raise GroebnerError("cache variable-set mismatch")
            return GrobnerBasis(ideal.vars, order, polys)
        _CACHE_EVENTS.append(("miss", key))

    keyfn = _packed_keyfn(order.key)
    eng = [_poly_to_eng(g, keyfn) for g in ideal.gens]
    st = _buchberger(eng, keyfn, weights=weights, limits=limits,
                     state=resume_state)
    final = _interreduce(st.elems, keyfn, weights)
    basis = [_eng_to_poly(e.terms, ideal.vars, monic=True) for e in final]
    gb = GrobnerBasis(ideal.vars, order, basis)
    if audit:
        audit_basis(gb, ideal)
    if cache:
        cache.store(key, ideal.vars, basis, order)
    return gb


def audit_basis(gb: GrobnerBasis, ideal: Ideal | None = None):
    """Re-verify the Buchberger criterion pairwise and generator membership."""
    red = gb._int_reducers()
    keyfn = _packed_keyfn(gb.order.key)
    n = len(red)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = red[i], red[j]
            lcm = mon_lcm(a.lm, b.lm)
            sha = mon_div(lcm, a.lm)
            shb = mon_div(lcm, b.lm)
            klcm = keyfn(lcm)
            ka = klcm - a.lmkey
            kb = klcm - b.lmkey
            shifted = [(k + ka, mon_mul(m, sha), _cmul(b.lc, c))
                       for k, m, c in a.terms]
            spoly = _merge_scaled(shifted, _C_ONE, b.terms, a.lc, shb, kb)
            if spoly and spoly[0][1] == lcm:
                spoly = spoly[1:]
            if _reduce_full(spoly, red, exact=False):
                raise GroebnerError(
                    f"audit failure: S-polynomial ({i},{j}) does not reduce to zero")
    if ideal is not None:
        for g in ideal.gens:
            if _reduce_full(_poly_to_eng(g, keyfn), red, exact=False):
                raise GroebnerError("audit failure: generator outside basis span")


def normal_form(f: Poly, gb: GrobnerBasis) -> Poly:
    """Exact remainder of f modulo the reduced basis."""
    if f.vars != gb.vars:
        raise PolyError("normal_form: variable set mismatch")
    if f.is_zero() or not gb.basis:
        return f
    terms = _poly_to_eng_exact(f, _packed_keyfn(gb.order.key))
    red = _reduce_full(terms, gb._exact_reducers(), exact=True)
    return Poly(f.vars, {m: CycNum(*c) for _, m, c in red})


def reduces_to_zero(f: Poly, gb: GrobnerBasis) -> bool:
    """Fast scale-free membership test."""
    if f.vars != gb.vars:
        raise PolyError("variable set mismatch")
    if f.is_zero():
        return True
    if not gb.basis:
        return False
    terms = _poly_to_eng(f, _packed_keyfn(gb.order.key))
    return not _reduce_full(terms, gb._int_reducers(), exact=False)


def membership(f: Poly, ideal_or_gb, **gbkw) -> bool:
    gb = ideal_or_gb if isinstance(ideal_or_gb, GrobnerBasis) else \
        groebner_basis(ideal_or_gb, **gbkw)
    return reduces_to_zero(f, gb)


def ideal_equal(a: Ideal, b: Ideal, **gbkw) -> bool:
    if a.vars != b.vars:
        raise PolyError("ideal_equal: variable set mismatch")
    gb_a = groebner_basis(a, **gbkw)
    gb_b = groebner_basis(b, **gbkw)
    return all(reduces_to_zero(g, gb_a) for g in b.gens) and \
        all(reduces_to_zero(g, gb_b) for g in a.gens)


# ---------------------------------------------------------------------------
# elimination, saturation, intersection, radical membership
# ---------------------------------------------------------------------------

def _fresh_name(base: str, taken) -> str:
    name = base
    k = 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def eliminate(ideal: Ideal, drop: Iterable[str], *,
              weights_keep: Sequence[int] | None = None,
              limits: Limits | None = None,
              cache=True, audit: bool = True) -> Ideal:
    """Generators of the ideal intersected with the subring without drop."""
    drop = list(drop)
    for n in drop:
        ideal.vars.position(n)
    keep = [n for n in ideal.vars.names if n not in set(drop)]
    permuted = VarSet(list(drop) + keep)
    inner2 = weighted_order(weights_keep) if weights_keep else None
    order = block_order(len(drop), inner2=inner2)
    pgens = [g.rename_vars(permuted) for g in ideal.gens]
    pw = None
    if weights_keep:
        pw = [0] * len(drop) + list(weights_keep)
    gb = groebner_basis(Ideal(permuted, pgens), order, weights=pw,
                        limits=limits, cache=cache, audit=audit)
    kept_vars = VarSet(keep)
    k = len(drop)
    out = []
    for f in gb.basis:
        if all(all(m[i] == 0 for i in range(k)) for m, _ in f.terms):
            out.append(f.rename_vars(kept_vars))
    return Ideal(kept_vars, out)


def saturate(ideal: Ideal, f: Poly, **elim_kw) -> Ideal:
    """(I : f^infinity) by the Rabinowitsch construction."""
    if f.is_zero():
        raise PolyError("saturation by zero")
    tname = _fresh_name("t_elim", ideal.vars.names)
    ext = VarSet((tname,) + ideal.vars.names)
    t = Poly.variable(ext, tname)
    gens = [g.rename_vars(ext) for g in ideal.gens]
    gens.append(t * f.rename_vars(ext) - 1)
    out = eliminate(Ideal(ext, gens), [tname], **elim_kw)
    return Ideal(ideal.vars, [g.rename_vars(ideal.vars) for g in out.gens])


def saturate_by_ideal(ideal: Ideal, sat: Sequence[Poly], **elim_kw) -> Ideal:
    """(I : J^infinity) as the intersection of single-poly saturations."""
    out = None
    for f in sat:
        if f.is_zero():
            continue
        s = saturate(ideal, f, **elim_kw)
        out = s if out is None else intersect(out, s, **elim_kw)
    if out is None:
        raise PolyError("saturation by the zero ideal")
    return out


def intersect(a: Ideal, b: Ideal, **elim_kw) -> Ideal:
    if a.vars != b.vars:
        raise PolyError("intersect: variable set mismatch")
    tname = _fresh_name("t_elim", a.vars.names)
    ext = VarSet((tname,) + a.vars.names)
    t = Poly.variable(ext, tname)
    gens = [t * g.rename_vars(ext) for g in a.gens]
    one_minus_t = Poly.constant(ext, 1) - t
    gens += [one_minus_t * g.rename_vars(ext) for g in b.gens]
    out = eliminate(Ideal(ext, gens), [tname], **elim_kw)
    return Ideal(a.vars, [g.rename_vars(a.vars) for g in out.gens])


def radical_membership(f: Poly, ideal: Ideal, **gbkw) -> bool:
    """True iff f vanishes on the zero set of the ideal."""
    if f.is_zero():
        return True
    tname = _fresh_name("t_elim", ideal.vars.names)
    ext = VarSet((tname,) + ideal.vars.names)
    t = Poly.variable(ext, tname)
    gens = [g.rename_vars(ext) for g in ideal.gens]
    gens.append(Poly.constant(ext, 1) - t * f.rename_vars(ext))
    gb = groebner_basis(Ideal(ext, gens), **gbkw)
    return gb.is_unit()


def is_unit_ideal(ideal_or_gb, **gbkw) -> bool:
    gb = ideal_or_gb if isinstance(ideal_or_gb, GrobnerBasis) else \
        groebner_basis(ideal_or_gb, **gbkw)
    return gb.is_unit()


# ---------------------------------------------------------------------------
# Hilbert series / Krull dimension on the leading-term ideal
# ---------------------------------------------------------------------------

def _minimalize(mons):
    mons = sorted(set(mons), key=lambda m: (sum(m), m))
    out = []
    for m in mons:
        if not any(mon_divides(o, m) for o in out):
            out.append(m)
    return out


def _poly_add_into(acc: dict, d: int, c: int):
    v = acc.get(d, 0) + c
    if v:
        acc[d] = v
    else:
        acc.pop(d, None)


def _hilb_numerator(mons, weights) -> dict:
    """Numerator of the Hilbert series of S/(mons) over prod (1-s^{w_i}).

    Iterative divide and conquer on the exact sequence
    0 -> S/(I:p)(-deg p) -> S/I -> S/(I+p) -> 0 with p a pivot variable
    power (median exponent of the most shared variable).
    """
    total: dict = {}
    stack = [(mons, 0, 1)]
    while stack:
        mons, shift, sign = stack.pop()
        mons = _minimalize(mons)
        if not mons:
            _poly_add_into(total, shift, sign)
            continue
        if any(sum(m) == 0 for m in mons):
            continue
        if all(sum(1 for e in m if e) == 1 for m in mons):
            num = {0: 1}
            for m in mons:
                d = _wdeg(m, weights)
                new: dict = {}
                for dd, cc in num.items():
                    _poly_add_into(new, dd, cc)
                    _poly_add_into(new, dd + d, -cc)
                num = new
            for dd, cc in num.items():
                _poly_add_into(total, dd + shift, sign * cc)
            continue
        counts = [0] * len(mons[0])
        for m in mons:
            for i, e in enumerate(m):
                if e:
                    counts[i] += 1
        v = max(range(len(counts)), key=lambda i: counts[i])
        if counts[v] == 1:
            # v sits in a single generator g = v^a * m'
            g = next(m for m in mons if m[v])
            a = g[v]
            rest = [m for m in mons if not m[v]]
            if sum(g) == a:
                # pure power: S/I = S/(rest) (x) k[v]/(v^a)
                d = a * (weights[v] if weights else 1)
                stack.append((rest, shift, sign))
                stack.append((rest, shift + d, -sign))
                continue
            e = a
        else:
            exps = sorted(m[v] for m in mons if m[v])
            e = exps[len(exps) // 2]
            if sum(1 for m in mons if m[v] >= e) <= 1:
                # median pivot would reproduce the same set; min always splits
                e = exps[0]
        pivot = tuple(e if i == v else 0 for i in range(len(counts)))
        plus = [m for m in mons if m[v] < e] + [pivot]
        colon = [
            tuple(max(x - e, 0) if i == v else x for i, x in enumerate(m))
            for m in mons
        ]
        stack.append((plus, shift, sign))
        stack.append((colon, shift + _wdeg(pivot, weights), sign))
    return total


def hilbert_series(ideal_or_gb, order: MonOrder | None = None,
                   weights: Sequence[int] | None = None, **gbkw) -> HilbertSeries:
    """Hilbert series of the quotient by the ideal (via its leading terms).

    Valid gradings require the ideal to be homogeneous for the weights; the
    caller is responsible for that (the table ideals are).
    """
    if isinstance(ideal_or_gb, GrobnerBasis):
        gb = ideal_or_gb
    else:
        gb = groebner_basis(ideal_or_gb, order, weights=weights, **gbkw)
    nvars = len(gb.vars)
    w = tuple(weights) if weights else tuple([1] * nvars)
    lts = [f.leading_term(gb.order)[0] for f in gb.basis]
    return HilbertSeries(_hilb_numerator(lts, w), w)


def krull_dimension(ideal_or_gb, **gbkw) -> int:
    """Dimension as the largest variable subset meeting no leading support."""
    if isinstance(ideal_or_gb, GrobnerBasis):
        gb = ideal_or_gb
    else:
        gb = groebner_basis(ideal_or_gb, **gbkw)
    n = len(gb.vars)
    if gb.is_unit():
        return -1
    lts = _minimalize([f.leading_term(gb.order)[0] for f in gb.basis])
    if not lts:
        return n
    masks = [_mask(m) for m in lts]

    best = 0
    from itertools import combinations

    for size in range(n, 0, -1):
        if size <= best:
            break
        found = False
        for combo in combinations(range(n), size):
            smask = 0
            for i in combo:
                smask |= 1 << i
            if all(mk & ~smask for mk in masks):
                best = size
                found = True
                break
        if found:
            break
    return best


# ---------------------------------------------------------------------------
# minimal generators (graded Nakayama)
# ---------------------------------------------------------------------------

def _extend_gb(gb: GrobnerBasis, extra: Poly, weights=None, audit=False) -> GrobnerBasis:
    """Groebner basis of <gb> + <extra> reusing the existing basis."""
    keyfn = _packed_keyfn(gb.order.key)
    st = _BuchState(keyfn, weights)
    for f in gb.basis:
        terms = _poly_to_eng(f, keyfn)
        e = _Elem(terms, _wdeg(terms[0][1], weights), index=len(st.elems),
                  weights=weights)
        st.elems.append(e)
        st.in_g.append(True)
    # existing pairs all reduce to zero; only pairs with the new element matter
    new_terms = _poly_to_eng(extra, keyfn)
    if new_terms:
        _add_elem(st, new_terms, _wdeg(new_terms[0][1], weights))
        st = _buchberger(None, keyfn, weights=weights, state=st)
    final = _interreduce(st.elems, keyfn, weights)
    basis = [_eng_to_poly(e.terms, gb.vars, monic=True) for e in final]
    out = GrobnerBasis(gb.vars, gb.order, basis)
    if audit:
        audit_basis(out)
    return out


def minimal_extra_generators(ideal: Ideal, sub: Ideal, *,
                             weights: Sequence[int] | None = None,
                             order: MonOrder | None = None,
                             cache=True, return_polys: bool = False):
    """Minimal number of homogeneous generators of `ideal` beyond `sub`.

    Graded Nakayama: generators are processed in increasing (weighted)
    degree and kept only when not reducible by `sub` plus the kept ones.
    Containment sub <= ideal is verified first (syntactic inclusion of the
    generators short-circuits the Groebner check).  A single incremental
    Buchberger session carries the growing ideal.
    """
    if ideal.vars != sub.vars:
        raise PolyError("variable set mismatch")
    if order is None:
        order = weighted_order(weights) if weights else DEGREVLEX
    gen_set = {g.terms for g in ideal.gens}
    if not all(g.terms in gen_set for g in sub.gens):
        gb_ideal = groebner_basis(ideal, order, weights=weights, cache=cache)
        for g in sub.gens:
            if not reduces_to_zero(g, gb_ideal):
                raise ContainmentError("sub ideal is not contained in the ideal")
    w = weights or [1] * len(ideal.vars)
    ordered = sorted(ideal.gens,
                     key=lambda f: (f.weighted_degree(w), format_poly(f)))
    gb_sub = groebner_basis(sub, order, weights=weights, cache=cache)

    keyfn = _packed_keyfn(order.key)
    st = _BuchState(keyfn, weights)
    for f in gb_sub.basis:
        terms = _poly_to_eng(f, keyfn)
        e = _Elem(terms, _wdeg(terms[0][1], weights), index=len(st.elems),
                  weights=weights)
        st.elems.append(e)
        st.in_g.append(True)
    kept = []
    for g in ordered:
        d = g.weighted_degree(w)
        # homogeneous truncation: pairs of degree <= d decide degree-d membership
        st = _buchberger(None, keyfn, weights=weights, state=st, degree_cap=d)
        eng = _poly_to_eng(g, keyfn)
        red = _reduce_full(eng, st.elems, exact=False)
        if not red:
            continue
        kept.append(g)
        _add_elem(st, red, _wdeg(red[0][1], weights))
    if return_polys:
        return len(kept), kept
    return len(kept)


def minimal_generators(ideal: Ideal, *, weights=None, order=None, cache=True):
    """A minimal homogeneous generating subset of the given generators."""
    empty = Ideal(ideal.vars, [])
    _, kept = minimal_extra_generators(
        ideal, empty, weights=weights, order=order, cache=cache,
        return_polys=True)
    return kept


# ---------------------------------------------------------------------------
# polynomial gcd / exact division / squarefree part
# ---------------------------------------------------------------------------

def exact_divide(f: Poly, g: Poly) -> Poly:
    """Quotient f/g; raises GroebnerError when g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return f
    order = DEGREVLEX
    gl_mon, gl_coef = g.leading_term(order)
    work = f
    quotient = Poly.zero(f.vars)
    while not work.is_zero():
        m, c = work.leading_term(order)
        if not mon_divides(gl_mon, m):
            raise GroebnerError("not divisible")
        qm = mon_div(m, gl_mon)
        qc = c / gl_coef
        qterm = Poly(f.vars, {qm: qc})
        quotient = quotient + qterm
        work = work - qterm * g
    return quotient


def divides(g: Poly, f: Poly) -> bool:
    try:
        exact_divide(f, g)
        return True
    except GroebnerError:
        return False


def _poly_content_gcd(polys: list[Poly], vars: VarSet) -> Poly:
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else poly_gcd(g, p)
        if g.is_constant():
            return Poly.constant(vars, 1)
    if g is None:
        return Poly.zero(vars)
    return g


def _by_degree_in(f: Poly, v: str) -> list[Poly]:
    i = f.vars.position(v)
    d = f.degree_in(v)
    buckets: list[dict] = [dict() for _ in range(d + 1)]
    for m, c in f.terms:
        mm = list(m)
        e = mm[i]
        mm[i] = 0
        buckets[e][tuple(mm)] = c
    return [Poly(f.vars, b) for b in buckets]


def _from_degree_list(coeffs: list[Poly], v: str, vars: VarSet) -> Poly:
    i = vars.position(v)
    acc: dict = {}
    for e, p in enumerate(coeffs):
        for m, c in p.terms:
            mm = list(m)
            mm[i] = mm[i] + e
            acc[tuple(mm)] = acc.get(tuple(mm), CycNum(0)) + c
    return Poly(vars, acc)


def _monic_normalize(f: Poly) -> Poly:
    if f.is_zero():
        return f
    _, lc = f.leading_term(DEGREVLEX)
    return f * lc.inv()


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd via primitive pseudo-remainder sequences (char 0)."""
    if f.is_zero():
        return _monic_normalize(g)
    if g.is_zero():
        return _monic_normalize(f)
    if f.is_constant() or g.is_constant():
        return Poly.constant(f.vars, 1)
    sf = set(f.support_vars())
    sg = set(g.support_vars())
    common = [v for v in f.vars.names if v in sf and v in sg]
    if not common:
        return Poly.constant(f.vars, 1)
    v = common[-1]
    fc = _by_degree_in(f, v)
    gc = _by_degree_in(g, v)
    cont_f = _poly_content_gcd(fc, f.vars)
    cont_g = _poly_content_gcd(gc, f.vars)
    cont = poly_gcd(cont_f, cont_g)
    pf = [exact_divide(p, cont_f) if not cont_f.is_constant() else p for p in fc]
    pg = [exact_divide(p, cont_g) if not cont_g.is_constant() else p for p in gc]

    def prem(a: list[Poly], b: list[Poly]) -> list[Poly]:
        # pseudo remainder of a by b in the main variable
        a = list(a)
        db = len(b) - 1
        lb = b[-1]
        while len(a) - 1 >= db and any(not p.is_zero() for p in a):
            while a and a[-1].is_zero():
                a.pop()
            if len(a) - 1 < db:
                break
            la = a[-1]
            shift = len(a) - 1 - db
            a = [p * lb for p in a]
            for k in range(db + 1):
                a[shift + k] = a[shift + k] - la * b[k]
            while a and a[-1].is_zero():
                a.pop()
        return a

    A, B = pf, pg
    if len(A) < len(B):
        A, B = B, A
    while True:
        B = [p for p in B]
        while B and B[-1].is_zero():
            B.pop()
        if not B:
            gcd_main = A
            break
        if len(B) == 1:
            gcd_main = [Poly.constant(f.vars, 1)]
            break
        R = prem(A, B)
        while R and R[-1].is_zero():
            R.pop()
        if not R:
            gcd_main = B
            break
        cont_r = _poly_content_gcd(R, f.vars)
        if not cont_r.is_constant():
            R = [exact_divide(p, cont_r) for p in R]
        A, B = B, R
    cont_main = _poly_content_gcd(gcd_main, f.vars)
    if not cont_main.is_constant():
        gcd_main = [exact_divide(p, cont_main) for p in gcd_main]
    result = _from_degree_list(gcd_main, v, f.vars) * cont
    return _monic_normalize(result)


def squarefree_part(f: Poly) -> Poly:
    """Product of the distinct irreducible factors of f, made monic."""
    if f.is_zero():
        raise PolyError("squarefree part of zero")
    if f.is_constant():
        return Poly.constant(f.vars, 1)
    g = f
    for v in f.support_vars():
        g = poly_gcd(g, f.differentiate(v))
        if g.is_constant():
            return _monic_normalize(f)
    return _monic_normalize(exact_divide(f, g))
