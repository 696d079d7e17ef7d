"""Multivariate polynomials over Q(zeta_12), monomial orders, text grammar.

Monomials are exponent tuples aligned with a :class:`VarSet`.  Polynomials
are immutable and always stored with terms sorted in descending degrevlex;
that order is also the canonical printing order, so ``parse(print(f)) == f``
and printed forms are stable cache keys.

Order keys are additive integer vectors (``key(m*n) == key(m) + key(n)``),
which lets the Groebner engine compute keys of shifted monomials by vector
addition instead of re-deriving them.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from rescert.exactfield import CycNum, I_UNIT, OMEGA, Q_ROOT, ZERO, ONE


class PolyError(ValueError):
    pass


class ParseError(PolyError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class VarSet:
    """Ordered collection of distinct variable names."""

    __slots__ = ("names", "index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PolyError(f"duplicate variable names in {names}")
        for n in names:
            if n in ("q", "i", "w"):
                raise PolyError(f"{n!r} is a reserved constant symbol")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "index", {n: i for i, n in enumerate(names)})

    def __setattr__(self, name, value):
        raise AttributeError("VarSet is immutable")

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __contains__(self, name):
        return name in self.index

    def __repr__(self):
        return f"VarSet{self.names}"

    def position(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise PolyError(f"unknown variable {name!r}") from None

    def unit_monomial(self, name: str):
        e = [0] * len(self.names)
        e[self.position(name)] = 1
        return tuple(e)

    def subset(self, names: Iterable[str]) -> "VarSet":
        keep = set(names)
        return VarSet(n for n in self.names if n in keep)


# ---------------------------------------------------------------------------
# monomial helpers (exponent tuples)
# ---------------------------------------------------------------------------

def mon_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mon_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mon_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mon_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def mon_degree(a):
    return sum(a)


class MonOrder:
    """A global monomial order given by an additive integer key.

    kind is one of ``lex``, ``degrevlex``, ``wdegrevlex`` or
    ``block(k)``; the block order compares the first k variables by
    (weighted) degrevlex first and hence eliminates them.  Keys of all
    kinds are additive, total, and have the constant monomial minimal.
    """

    __slots__ = ("kind", "key", "descriptor")

    def __init__(self, kind: str, key: Callable, descriptor: str):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "descriptor", descriptor)

    def __setattr__(self, name, value):
        raise AttributeError("MonOrder is immutable")

    def __repr__(self):
        return f"MonOrder({self.descriptor})"

    def __eq__(self, other):
        return isinstance(other, MonOrder) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(self.descriptor)


def _drl_key(exps):
    return (sum(exps),) + tuple(-e for e in reversed(exps))


def lex_order() -> MonOrder:
    return MonOrder("lex", lambda m: tuple(m), "lex")


def degrevlex_order() -> MonOrder:
    return MonOrder("degrevlex", _drl_key, "degrevlex")


def weighted_order(weights: Sequence[int]) -> MonOrder:
    """Degrevlex refined by a nonnegative weight vector (compared first).

    The plain total degree is kept as second component so that weight-0
    variables still exceed 1 and the order stays global.
    """
    w = tuple(int(x) for x in weights)
    if any(x < 0 for x in w):
        raise PolyError("weights must be nonnegative")

    def key(m, _w=w):
        return (sum(a * b for a, b in zip(_w, m)), sum(m)) + tuple(
            -e for e in reversed(m)
        )

    return MonOrder("wdegrevlex", key, f"wdegrevlex{w}")


def block_order(k: int, inner1: MonOrder | None = None,
                inner2: MonOrder | None = None) -> MonOrder:
    """Elimination order for the first k variables (degrevlex blocks)."""

    key1 = inner1.key if inner1 else _drl_key
    key2 = inner2.key if inner2 else _drl_key

    def key(m, _k=k, _k1=key1, _k2=key2):
        return _k1(m[:_k]) + _k2(m[_k:])

    d1 = inner1.descriptor if inner1 else "degrevlex"
    d2 = inner2.descriptor if inner2 else "degrevlex"
    return MonOrder(f"block({k})", key, f"block({k};{d1};{d2})")


DEGREVLEX = degrevlex_order()


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def _coerce_coeff(c) -> CycNum:
    if isinstance(c, CycNum):
        return c
    if isinstance(c, (int, Fraction)):
        return CycNum(c)
    raise PolyError(f"bad coefficient {c!r}")


class Poly:
    """Immutable multivariate polynomial over Q(zeta_12).

    ``terms`` is a tuple of (exponent tuple, CycNum) pairs, nonzero
    coefficients only, sorted in descending degrevlex.  The canonical form
    is therefore unique and doubles as the printing order.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: VarSet, terms: Mapping | Iterable):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: dict = {}
        n = len(vars)
        for mon, coeff in items:
            mon = tuple(int(e) for e in mon)
            if len(mon) != n or any(e < 0 for e in mon):
                raise PolyError(f"bad exponent vector {mon}")
            coeff = _coerce_coeff(coeff)
            if mon in acc:
                coeff = acc[mon] + coeff
            if coeff.is_zero():
                acc.pop(mon, None)
            else:
                acc[mon] = coeff
        ordered = sorted(acc.items(), key=lambda t: _drl_key(t[0]), reverse=True)
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", tuple(ordered))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(vars: VarSet) -> "Poly":
        return Poly(vars, {})

    @staticmethod
    def constant(vars: VarSet, c) -> "Poly":
        return Poly(vars, {tuple([0] * len(vars)): _coerce_coeff(c)})

    @staticmethod
    def variable(vars: VarSet, name: str) -> "Poly":
        return Poly(vars, {vars.unit_monomial(name): ONE})

    # -- predicates / views ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_coefficient(self) -> CycNum:
        zero_mon = tuple([0] * len(self.vars))
        for mon, c in self.terms:
            if mon == zero_mon:
                return c
        return ZERO

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m, _ in self.terms)

    def weighted_degree(self, weights: Sequence[int]) -> int:
        if not self.terms:
            return -1
        return max(sum(a * b for a, b in zip(weights, m)) for m, _ in self.terms)

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        if not self.terms:
            return True
        if weights is None:
            weights = [1] * len(self.vars)
        degs = {sum(a * b for a, b in zip(weights, m)) for m, _ in self.terms}
        return len(degs) == 1

    def support_vars(self) -> tuple[str, ...]:
        used = [False] * len(self.vars)
        for m, _ in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(n for n, u in zip(self.vars.names, used) if u)

    def leading_term(self, order: MonOrder = DEGREVLEX):
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        if order.kind == "degrevlex":
            return self.terms[0]
        return max(self.terms, key=lambda t: order.key(t[0]))

    def coefficient(self, mon) -> CycNum:
        mon = tuple(mon)
        for m, c in self.terms:
            if m == mon:
                return c
        return ZERO

    def degree_in(self, name: str) -> int:
        i = self.vars.position(name)
        return max((m[i] for m, _ in self.terms), default=-1)

    # -- arithmetic -------------------------------------------------------

    def _check_same_vars(self, other: "Poly"):
        if self.vars != other.vars:
            raise PolyError("polynomials over different variable sets")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            other = Poly.constant(self.vars, other)
        self._check_same_vars(other)
        acc = dict(self.terms)
        for m, c in other.terms:
            s = acc.get(m)
            s = c if s is None else s + c
            if s.is_zero():
                acc.pop(m, None)
            else:
                acc[m] = s
        return Poly(self.vars, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {m: -c for m, c in self.terms})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            other = Poly.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            c = _coerce_coeff(other)
            if c.is_zero():
                return Poly.zero(self.vars)
            return Poly(self.vars, {m: cc * c for m, cc in self.terms})
        self._check_same_vars(other)
        acc: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = mon_mul(m1, m2)
                c = c1 * c2
                s = acc.get(m)
                s = c if s is None else s + c
                if s.is_zero():
                    acc.pop(m, None)
                else:
                    acc[m] = s
        return Poly(self.vars, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise PolyError("negative polynomial power")
        result = Poly.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale_monomial(self, mon, coeff) -> "Poly":
        coeff = _coerce_coeff(coeff)
        mon = tuple(mon)
        return Poly(self.vars, {mon_mul(m, mon): c * coeff for m, c in self.terms})

    def map_coefficients(self, fn) -> "Poly":
        return Poly(self.vars, {m: fn(c) for m, c in self.terms})

    def conj_coefficients(self) -> "Poly":
        return self.map_coefficients(lambda c: c.conj())

    # -- calculus / substitution ------------------------------------------

    def differentiate(self, name: str) -> "Poly":
        i = self.vars.position(name)
        acc = {}
        for m, c in self.terms:
            e = m[i]
            if e == 0:
                continue
            mm = list(m)
            mm[i] = e - 1
            acc[tuple(mm)] = c * e
        return Poly(self.vars, acc)

    def substitute(self, assignment: Mapping[str, "Poly"]) -> "Poly":
        """Ring-homomorphic image; every variable occurring must be assigned."""
        target: VarSet | None = None
        for p in assignment.values():
            if target is None:
                target = p.vars
            elif p.vars != target:
                raise PolyError("substitution images over different variable sets")
        if target is None:
            target = self.vars
        images: list[Poly | None] = []
        for n in self.vars.names:
            images.append(assignment.get(n))
        power_cache: dict[tuple[int, int], Poly] = {}

        def var_power(i: int, e: int) -> Poly:
            key = (i, e)
            got = power_cache.get(key)
            if got is None:
                base = images[i]
                got = base ** e
                power_cache[key] = got
            return got

        result = Poly.zero(target)
        for m, c in self.terms:
            part = Poly.constant(target, c)
            for i, e in enumerate(m):
                if e == 0:
                    continue
                if images[i] is None:
                    raise PolyError(
                        f"variable {self.vars.names[i]!r} not assigned in substitution"
                    )
                part = part * var_power(i, e)
            result = result + part
        return result

    def rename_vars(self, target: VarSet, mapping: Mapping[str, str] | None = None) -> "Poly":
        """Transport to another variable set (by name, or via a name map)."""
        positions = []
        for n in self.vars.names:
            tn = mapping.get(n, n) if mapping else n
            positions.append(target.position(tn) if tn in target else None)
        acc = {}
        for m, c in self.terms:
            out = [0] * len(target)
            for i, e in enumerate(m):
                if e == 0:
                    continue
                if positions[i] is None:
                    raise PolyError(
                        f"variable {self.vars.names[i]!r} missing from target set"
                    )
                out[positions[i]] = e
            acc[tuple(out)] = c
        return Poly(target, acc)

    # -- comparison / output ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            other = Poly.constant(self.vars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, self.terms))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)})"


# ---------------------------------------------------------------------------
# canonical printing
# ---------------------------------------------------------------------------

def _coeff_parts(c: CycNum) -> list[str]:
    parts = []
    for value, sym in zip(c.qi_coordinates(), ("", "q", "i", "i*q")):
        if value == 0:
            continue
        if not sym:
            parts.append(str(value))
        elif value == 1:
            parts.append(sym)
        elif value == -1:
            parts.append("-" + sym)
        else:
            parts.append(f"{value}*{sym}")
    return parts


def _format_term(vars: VarSet, mon, coeff: CycNum) -> str:
    factors = []
    for name, e in zip(vars.names, mon):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    monstr = "*".join(factors)
    parts = _coeff_parts(coeff)
    if not monstr:
        if len(parts) == 1:
            return parts[0]
        return str(coeff)
    if len(parts) == 1:
        p = parts[0]
        if p == "1":
            return monstr
        if p == "-1":
            return "-" + monstr
        return f"{p}*{monstr}"
    return f"({coeff})*{monstr}"


def format_poly(f: Poly) -> str:
    if not f.terms:
        return "0"
    out = ""
    for m, c in f.terms:
        s = _format_term(f.vars, m, c)
        if not out:
            out = s
        else:
            out += s if s.startswith("-") else "+" + s
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_CONSTANTS = {"q": Q_ROOT, "i": I_UNIT, "w": OMEGA}


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.cursor = 0

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", text[i:j], i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("name", text[i:j], i))
                i = j
                continue
            if ch in "+-*^()/":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", "", len(text)))

    def peek(self):
        return self.tokens[self.cursor]

    def next(self):
        tok = self.tokens[self.cursor]
        self.cursor += 1
        return tok


class _Parser:
    """Recursive descent for: expr := term (('+'|'-') term)*,
    term := factor ('*' factor)*, factor := atom ('^' nat)?,
    atom := '(' expr ')' | rational | q|i|w | variable | '-' factor.
    Implicit multiplication is a syntax error by construction.
    """

    def __init__(self, text: str, vars: VarSet):
        self.toks = _Tokenizer(text)
        self.vars = vars

    def parse(self) -> Poly:
        f = self.expr()
        kind, val, pos = self.toks.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return f

    def expr(self) -> Poly:
        kind, _, _ = self.toks.peek()
        if kind == "-":
            self.toks.next()
            f = -self.term()
        else:
            f = self.term()
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "+":
                self.toks.next()
                f = f + self.term()
            elif kind == "-":
                self.toks.next()
                f = f - self.term()
            else:
                return f

    def term(self) -> Poly:
        f = self.factor()
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "*":
                self.toks.next()
                f = f * self.factor()
            else:
                return f

    def factor(self) -> Poly:
        kind, _, _ = self.toks.peek()
        if kind == "-":
            _, _, pos = self.toks.next()
            return -self.factor()
        f = self.atom()
        kind, _, _ = self.toks.peek()
        if kind == "^":
            self.toks.next()
            k2, val, pos = self.toks.next()
            if k2 != "int":
                raise ParseError("exponent must be a nonnegative integer", pos)
            f = f ** int(val)
        return f

    def atom(self) -> Poly:
        kind, val, pos = self.toks.next()
        if kind == "(":
            f = self.expr()
            k2, v2, p2 = self.toks.next()
            if k2 != ")":
                raise ParseError("expected ')'", p2)
            return f
        if kind == "int":
            num = int(val)
            k2, _, _ = self.toks.peek()
            if k2 == "/":
                save = self.toks.cursor
                self.toks.next()
                k3, v3, p3 = self.toks.next()
                if k3 != "int":
                    raise ParseError("expected integer denominator", p3)
                den = int(v3)
                if den == 0:
                    raise ParseError("zero denominator", p3)
                return Poly.constant(self.vars, Fraction(num, den))
            return Poly.constant(self.vars, num)
        if kind == "name":
            if val in _CONSTANTS:
                return Poly.constant(self.vars, _CONSTANTS[val])
            if val in self.vars:
                return Poly.variable(self.vars, val)
            raise ParseError(f"unknown variable {val!r}", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_poly(text: str, vars: VarSet) -> Poly:
    return _Parser(text, vars).parse()


# ---------------------------------------------------------------------------
# .ideal file format
# ---------------------------------------------------------------------------

def format_ideal_text(vars: VarSet, polys: Sequence[Poly], comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append("vars: " + " ".join(vars.names))
    for f in polys:
        lines.append(format_poly(f))
    return "\n".join(lines) + "\n"


def parse_ideal_text(text: str) -> tuple[VarSet, list[Poly]]:
    vars: VarSet | None = None
    polys: list[Poly] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("vars:"):
            if vars is not None:
                raise PolyError("duplicate vars: line")
            vars = VarSet(line[len("vars:"):].split())
            continue
        if vars is None:
            raise PolyError("polynomial before vars: line")
        polys.append(parse_poly(line, vars))
    if vars is None:
        raise PolyError("missing vars: line")
    return vars, polys


def write_ideal_file(path, vars: VarSet, polys: Sequence[Poly], comments: Sequence[str] = ()):
    import os
    import tempfile

    text = format_ideal_text(vars, polys, comments)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_ideal_file(path) -> tuple[VarSet, list[Poly]]:
    with open(path) as fh:
        return parse_ideal_text(fh.read())


def solve_positive_weights(polys: Sequence[Poly]) -> tuple[int, ...] | None:
    """Find a positive integer weight vector making all polys homogeneous.

    Builds the linear homogeneity constraints and searches small integer
    combinations of a rational nullspace basis.  Returns None when the
    system admits no positive solution (in particular for inhomogeneous
    input).
    """
    if not polys:
        return None
    n = len(polys[0].vars)
    rows: list[list[Fraction]] = []
    for f in polys:
        if not f.terms:
            continue
        m0 = f.terms[0][0]
        for m, _ in f.terms[1:]:
            rows.append([Fraction(a - b) for a, b in zip(m, m0)])
    # Gaussian elimination to a nullspace basis
    mat = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [x - factor * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for ri, pc in enumerate(pivots):
            vec[pc] = -mat[ri][fc]
        basis.append(vec)

    def scaled(vec):
        from math import gcd

        dens = [x.denominator for x in vec]
        L = 1
        for d in dens:
            L = L * d // gcd(L, d)
        ints = [int(x * L) for x in vec]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        return ints

    candidates = []
    for v in basis:
        candidates.append(scaled(v))
        candidates.append([-x for x in scaled(v)])
    if len(basis) >= 2:
        for a in range(-6, 7):
            for b in range(-6, 7):
                if a == 0 and b == 0:
                    continue
                vec = [a * x + b * y for x, y in zip(basis[0], basis[1])]
                candidates.append(scaled([Fraction(x) for x in vec]))
    best = None
    for cand in candidates:
        if all(x > 0 for x in cand):
            if best is None or max(cand) < max(best):
                best = cand
    return tuple(best) if best else None
