"""The binary tetrahedral group: matrices, characters, polynomial action.

The group is generated inside SU(2) by

    I = [[i, 0], [0, -i]]        tau = -1/2 [[1+i, -1+i], [1+i, 1-i]]

and closed by brute force (exactly 24 elements).  Its seven irreducible
characters are assembled from the three 1-dimensional characters of the
cyclic quotient of order 3, the defining 2-dimensional representation, its
two twists, and the 3-dimensional summand of S0 (x) S0*.

The action on the polynomial ring in x1..x4 is block diagonal: the first
pair transforms by chi1(g)*g and the second by the contragredient twist
chi2(g)*g^(-T), so that the pairing x1*x3 + x2*x4 is invariant.  Which cube
root chi1(tau) takes is not decided a priori: both candidates are tried and
the one(s) fixing all eight invariant generators are certified post hoc
(`resolve_action`).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from rescert.exactfield import CycNum, I_UNIT, OMEGA, ONE, ZERO
from rescert.multipoly import Poly, VarSet

IRREP_LABELS = ("L0", "L1", "L2", "S0", "S1", "S2", "R")
IRREP_DIMS = {"L0": 1, "L1": 1, "L2": 1, "S0": 2, "S1": 2, "S2": 2, "R": 3}

HALF = Fraction(1, 2)


class GroupError(Exception):
    pass


class GroupElement:
    """A 2x2 unit-determinant matrix over Q(zeta_12), stored row-major."""

    __slots__ = ("m",)

    def __init__(self, a, b, c, d):
        object.__setattr__(self, "m", (a, b, c, d))

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        a, b, c, d = self.m
        e, f, g, h = other.m
        return GroupElement(a * e + b * g, a * f + b * h,
                            c * e + d * g, c * f + d * h)

    def inv(self) -> "GroupElement":
        a, b, c, d = self.m
        # adjugate; determinant is 1 throughout the group
        return GroupElement(d, -b, -c, a)

    def det(self) -> CycNum:
        a, b, c, d = self.m
        return a * d - b * c

    def trace(self) -> CycNum:
        return self.m[0] + self.m[3]

    def contragredient(self) -> "GroupElement":
        """Inverse transpose, i.e. the dual-basis matrix."""
        a, b, c, d = self.m
        return GroupElement(d, -c, -b, a)

    def order(self) -> int:
        p = self
        for n in range(1, 25):
            if p.is_identity():
                return n
            p = p * self
        raise GroupError("element order exceeds the group bound")

    def is_identity(self) -> bool:
        a, b, c, d = self.m
        return a.is_one() and d.is_one() and b.is_zero() and c.is_zero()

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.m == other.m

    def __hash__(self):
        return hash(self.m)

    def __repr__(self):
        a, b, c, d = self.m
        return f"[[{a}, {b}], [{c}, {d}]]"


GEN_I = GroupElement(I_UNIT, ZERO, ZERO, -I_UNIT)
GEN_TAU = GroupElement(
    CycNum(-HALF) * (CycNum(1) + I_UNIT),
    CycNum(-HALF) * (CycNum(-1) + I_UNIT),
    CycNum(-HALF) * (CycNum(1) + I_UNIT),
    CycNum(-HALF) * (CycNum(1) - I_UNIT),
)


def enumerate_group() -> list[GroupElement]:
    """Closure of the two generators; exactly 24 distinct matrices."""
    gens = [GEN_I, GEN_TAU]
    seen = {}
    order = []
    frontier = [GroupElement(ONE, ZERO, ZERO, ONE)]
    seen[frontier[0]] = True
    order.append(frontier[0])
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                p = g * h
                if p not in seen:
                    seen[p] = True
                    order.append(p)
                    nxt.append(p)
        frontier = nxt
        if len(order) > 24:
            raise GroupError("closure exceeded 24 elements")
    if len(order) != 24:
        raise GroupError(f"closure produced {len(order)} elements, expected 24")
    for g in order:
        if not g.det().is_one():
            raise GroupError("non-unimodular element in closure")
    return order


def conjugacy_classes(elements: Sequence[GroupElement]) -> list[list[GroupElement]]:
    """Brute-force conjugation; classes sorted by (size, element order, repr)."""
    remaining = list(elements)
    classes = []
    done = set()
    for g in elements:
        if g in done:
            continue
        cls = {h * g * h.inv() for h in elements}
        for x in cls:
            done.add(x)
        classes.append(sorted(cls, key=repr))
    classes.sort(key=lambda c: (len(c), c[0].order(), repr(c[0])))
    sizes = sorted(len(c) for c in classes)
    if sizes != [1, 1, 4, 4, 4, 4, 6]:
        raise GroupError(f"unexpected class sizes {sizes}")
    return classes


def _cyclic_exponent(g: GroupElement, tau_inv: GroupElement, q8: set) -> int:
    """Image of g under the quotient onto Z/3 (tau -> 1)."""
    p = g
    for k in range(3):
        if p in q8:
            return k
        p = p * tau_inv
    raise GroupError("element not covered by Q8 cosets")


class GroupData:
    """Complete structural record: elements, classes, character table."""

    def __init__(self):
        self.elements = enumerate_group()
        self.classes = conjugacy_classes(self.elements)
        self.class_of = {}
        for ci, cls in enumerate(self.classes):
            for g in cls:
                self.class_of[g] = ci
        q8 = {g for g in self.elements if g.order() in (1, 2, 4)}
        if len(q8) != 8:
            raise GroupError("quaternion subgroup not of order 8")
        self.q8 = q8
        tau_inv = GEN_TAU.inv()
        self.cyc_exp = {g: _cyclic_exponent(g, tau_inv, q8) for g in self.elements}
        self.table = self._build_table()
        self._verify_orthogonality()

    # -- characters -----------------------------------------------------

    def _build_table(self) -> dict:
        reps = [cls[0] for cls in self.classes]
        table = {}
        for j in range(3):
            table[f"L{j}"] = tuple(OMEGA ** (j * self.cyc_exp[g]) for g in reps)
        s0 = tuple(g.trace() for g in reps)
        table["S0"] = s0
        for j in (1, 2):
            table[f"S{j}"] = tuple(
                s0[ci] * table[f"L{j}"][ci] for ci in range(len(reps)))
        table["R"] = tuple(
            s0[ci] * s0[ci].conj() - ONE for ci in range(len(reps)))
        return table

    def _verify_orthogonality(self):
        sizes = [len(c) for c in self.classes]
        for la in IRREP_LABELS:
            for lb in IRREP_LABELS:
                acc = CycNum(0)
                for ci, size in enumerate(sizes):
                    acc = acc + CycNum(size) * self.table[la][ci] * self.table[lb][ci].conj()
                want = CycNum(24 if la == lb else 0)
                if acc != want:
                    raise GroupError(
                        f"character orthogonality fails for ({la}, {lb}): {acc}")
        total = sum(IRREP_DIMS[l] ** 2 for l in IRREP_LABELS)
        if total != 24:
            raise GroupError("irreducible dimensions are inconsistent")

    def character_value(self, label: str, g: GroupElement) -> CycNum:
        return self.table[label][self.class_of[g]]

    def class_sizes(self):
        return [len(c) for c in self.classes]

    def inner_product(self, chi: Sequence[CycNum], label: str) -> int:
        """<chi, irrep> = (1/24) sum over classes |c| chi(c) conj(irrep(c))."""
        acc = CycNum(0)
        for ci, cls in enumerate(self.classes):
            acc = acc + CycNum(len(cls)) * chi[ci] * self.table[label][ci].conj()
        acc = acc * CycNum(Fraction(1, 24))
        if not acc.is_rational() or acc.rational_value().denominator != 1:
            raise GroupError(f"non-integral multiplicity {acc}")
        return int(acc.rational_value())


# ---------------------------------------------------------------------------
# the action on x1..x4
# ---------------------------------------------------------------------------

XVARS = VarSet(("x1", "x2", "x3", "x4"))


class VariableAction:
    """Linear substitution action of the group on Q(zeta_12)[x1..x4].

    chi1_exp picks chi1(tau) = omega^chi1_exp; the 4x4 matrix of g is
    blockdiag(chi1(g)*g, chi2(g)*g^(-T)) and act substitutes along matrix
    columns, which makes act(g, act(h, f)) == act(gh, f).
    """

    def __init__(self, data: GroupData, chi1_exp: int):
        if chi1_exp not in (1, 2):
            raise GroupError("chi1(tau) must be a primitive cube root")
        self.data = data
        self.chi1_exp = chi1_exp
        self._sub_cache: dict = {}
        self._lin_cache: dict = {}

    def matrix(self, g: GroupElement):
        k = self.data.cyc_exp[g]
        chi1 = OMEGA ** (self.chi1_exp * k)
        chi2 = OMEGA ** ((3 - self.chi1_exp) * k)
        a, b, c, d = g.m
        e, f, gg, h = g.contragredient().m
        z = ZERO
        return (
            (chi1 * a, chi1 * b, z, z),
            (chi1 * c, chi1 * d, z, z),
            (z, z, chi2 * e, chi2 * f),
            (z, z, chi2 * gg, chi2 * h),
        )

    def _substitution(self, g: GroupElement):
        got = self._lin_cache.get(g)
        if got is None:
            m = self.matrix(g)
            got = {}
            for j, name in enumerate(XVARS.names):
                # substitute along column j
                got[name] = Poly(
                    XVARS,
                    {XVARS.unit_monomial(XVARS.names[i]): m[i][j]
                     for i in range(4) if not m[i][j].is_zero()},
                )
            self._lin_cache[g] = got
        return got

    def act(self, g: GroupElement, f: Poly) -> Poly:
        if f.vars != XVARS:
            raise GroupError("action is defined on the x-variables")
        return f.substitute(self._substitution(g))

    def reynolds(self, f: Poly) -> Poly:
        """Group-average projection onto the invariant ring."""
        acc = Poly.zero(XVARS)
        for g in self.data.elements:
            acc = acc + self.act(g, f)
        return acc * CycNum(Fraction(1, 24))

    def blocks(self, g: GroupElement):
        """The two 2x2 blocks acting on (x1,x2) and (x3,x4)."""
        m = self.matrix(g)
        return ((m[0][0], m[0][1], m[1][0], m[1][1]),
                (m[2][2], m[2][3], m[3][2], m[3][3]))


def resolve_action(data: GroupData, invariants: Iterable[Poly]):
    """Try chi1(tau) in {omega, omega^2}; keep assignments fixing all invariants.

    Returns (action, accepted_exponents); raises when neither assignment
    certifies.  Invariance under the two generators suffices since they
    generate the group.
    """
    invariants = list(invariants)
    accepted = []
    actions = {}
    for exp in (1, 2):
        action = VariableAction(data, exp)
        ok = True
        for g in (GEN_I, GEN_TAU):
            for f in invariants:
                if action.act(g, f) != f:
                    ok = False
                    break
            if not ok:
                break
        actions[exp] = action
        if ok:
            accepted.append(exp)
    if not accepted:
        raise GroupError("no cube-root assignment fixes the invariant table")
    return actions[accepted[0]], accepted


# ---------------------------------------------------------------------------
# Molien series
# ---------------------------------------------------------------------------

def _series_inverse(c1: CycNum, c2: CycNum, n: int) -> list[CycNum]:
    """Power series inverse of 1 + c1 s + c2 s^2 up to degree n."""
    inv = [ONE] + [ZERO] * n
    for d in range(1, n + 1):
        acc = c1 * inv[d - 1]
        if d >= 2:
            acc = acc + c2 * inv[d - 2]
        inv[d] = -acc
    return inv


def molien_from_blocks(blocks, group_size: int, degx: int, degy: int):
    """Bigraded Molien series from per-element pairs of 2x2 matrices.

    blocks: iterable of ((a,b,c,d), (e,f,g,h)) matrix pairs.  Returns the
    table coeff[a][b] of invariant dimensions, as exact integers.
    """
    total = [[CycNum(0)] * (degy + 1) for _ in range(degx + 1)]
    for bx, by in blocks:
        trx = bx[0] + bx[3]
        detx = bx[0] * bx[3] - bx[1] * bx[2]
        tr_y = by[0] + by[3]
        dety = by[0] * by[3] - by[1] * by[2]
        invx = _series_inverse(-trx, detx, degx)
        invy = _series_inverse(-tr_y, dety, degy)
        for a in range(degx + 1):
            xa = invx[a]
            if xa.is_zero():
                continue
            row = total[a]
            for b in range(degy + 1):
                row[b] = row[b] + xa * invy[b]
    scale = CycNum(Fraction(1, group_size))
    out = []
    for a in range(degx + 1):
        row = []
        for b in range(degy + 1):
            v = total[a][b] * scale
            if not v.is_rational() or v.rational_value().denominator != 1:
                raise GroupError(f"non-integral Molien coefficient at ({a},{b}): {v}")
            row.append(int(v.rational_value()))
        out.append(row)
    return out


def molien_series(action: VariableAction, max_degree: int, bigraded: bool = False):
    """Invariant dimensions by degree (or bidegree) for the x-action."""
    blocks = [action.blocks(g) for g in action.data.elements]
    table = molien_from_blocks(blocks, 24, max_degree, max_degree)
    if bigraded:
        return table
    out = [0] * (max_degree + 1)
    for a in range(max_degree + 1):
        for b in range(max_degree + 1 - a):
            out[a + b] += table[a][b]
    return out


def bidegree_character(action: VariableAction, a: int, b: int) -> list[CycNum]:
    """Character of the space of bidegree-(a,b) polynomials, per class.

    Uses the complete homogeneous recurrence h_d = tr*h_{d-1} - det*h_{d-2}
    on each 2x2 block, evaluated on class representatives.
    """
    values = []
    for cls in action.data.classes:
        g = cls[0]
        bx, by = action.blocks(g)

        def h_seq(blk, n):
            tr = blk[0] + blk[3]
            det = blk[0] * blk[3] - blk[1] * blk[2]
            hs = [ONE]
            if n >= 1:
                hs.append(tr)
            for d in range(2, n + 1):
                hs.append(tr * hs[d - 1] - det * hs[d - 2])
            return hs

        values.append(h_seq(bx, a)[a] * h_seq(by, b)[b])
    return values


def isotypic_multiplicity(data: GroupData, chi: Sequence[CycNum], label: str) -> int:
    return data.inner_product(chi, label)
