"""Exact arithmetic in Q(zeta_12) = Q[t]/(t^4 - t^2 + 1).

This degree-4 cyclotomic field is the universal coefficient field of the
package: it contains i = t^3, the primitive cube root w = t^2 - 1 and
q = sqrt(-3) = 2t^2 - 1.  Rationals are stdlib ``Fraction`` values, which
already enforce the reduced-form invariants (positive denominator,
gcd-reduced, 0 == 0/1).

Elements with c1 == c3 == 0 lie in the quadratic subfield Q(q); products of
such elements take a shorter code path since the z-side ideal computations
never leave that subfield.
"""

from __future__ import annotations

from fractions import Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class CycNum:
    """An element c0 + c1*t + c2*t^2 + c3*t^3 of Q[t]/(t^4 - t^2 + 1).

    Immutable; all arithmetic returns new instances in reduced form
    (degree < 4), so equality is componentwise.
    """

    __slots__ = ("c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        object.__setattr__(
            self,
            "c",
            (
                _as_fraction(c0),
                _as_fraction(c1),
                _as_fraction(c2),
                _as_fraction(c3),
            ),
        )

    def __setattr__(self, name, value):
        raise AttributeError("CycNum is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(x) -> "CycNum":
        return CycNum(_as_fraction(x))

    @staticmethod
    def zero() -> "CycNum":
        return _ZERO_CYC

    @staticmethod
    def one() -> "CycNum":
        return _ONE_CYC

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def is_one(self) -> bool:
        return self.c[0] == 1 and self.c[1] == 0 and self.c[2] == 0 and self.c[3] == 0

    def is_rational(self) -> bool:
        return self.c[1] == 0 and self.c[2] == 0 and self.c[3] == 0

    def in_q_subfield(self) -> bool:
        """True when the element lies in Q(q), i.e. c1 == c3 == 0."""
        return self.c[1] == 0 and self.c[3] == 0

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.c[0]

    # -- ring operations -----------------------------------------------

    def __add__(self, other) -> "CycNum":
        other = _coerce(other)
        a, b = self.c, other.c
        return CycNum(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])

    __radd__ = __add__

    def __sub__(self, other) -> "CycNum":
        other = _coerce(other)
        a, b = self.c, other.c
        return CycNum(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])

    def __rsub__(self, other) -> "CycNum":
        return _coerce(other).__sub__(self)

    def __neg__(self) -> "CycNum":
        a = self.c
        return CycNum(-a[0], -a[1], -a[2], -a[3])

    def __mul__(self, other) -> "CycNum":
        other = _coerce(other)
        a, b = self.c, other.c
        if a[1] == 0 and a[3] == 0 and b[1] == 0 and b[3] == 0:
            # subfield Q(q): (a0 + a2 u)(b0 + b2 u) with u = t^2, u^2 = u - 1
            p = a[2] * b[2]
            return CycNum(a[0] * b[0] - p, 0, a[0] * b[2] + a[2] * b[0] + p, 0)
        e0 = a[0] * b[0]
        e1 = a[0] * b[1] + a[1] * b[0]
        e2 = a[0] * b[2] + a[1] * b[1] + a[2] * b[0]
        e3 = a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0]
        e4 = a[1] * b[3] + a[2] * b[2] + a[3] * b[1]
        e5 = a[2] * b[3] + a[3] * b[2]
        e6 = a[3] * b[3]
        # t^4 = t^2 - 1, t^5 = t^3 - t, t^6 = -1
        return CycNum(e0 - e4 - e6, e1 - e5, e2 + e4, e3 + e5)

    __rmul__ = __mul__

    def inv(self) -> "CycNum":
        """Multiplicative inverse, by extended Euclid against t^4 - t^2 + 1."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_12)")
        if self.is_rational():
            return CycNum(1 / self.c[0])
        if self.in_q_subfield():
            # (a + b u)^-1 with u = t^2: conjugate over Q(q) is a + b - b u
            a, b = self.c[0], self.c[2]
            n = a * a + a * b + b * b  # (a + b u)(a + b - b u) = a^2 + ab + b^2
            return CycNum((a + b) / n, 0, -b / n, 0)
        g, s = _poly_xgcd(list(self.c), [1, 0, -1, 0, 1])
        # g is a nonzero constant: s * self == g  (mod min poly)
        lead = g[0]
        return CycNum(*((x / lead) for x in (s + [0, 0, 0, 0])[:4]))

    def __truediv__(self, other) -> "CycNum":
        return self * _coerce(other).inv()

    def __rtruediv__(self, other) -> "CycNum":
        return _coerce(other) * self.inv()

    def __pow__(self, n: int) -> "CycNum":
        if n < 0:
            return self.inv() ** (-n)
        result = _ONE_CYC
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "CycNum":
        """Galois automorphism t -> t^{-1} (complex conjugation on zeta_12)."""
        c0, c1, c2, c3 = self.c
        # t^{-1} = t - t^3, (t^{-1})^2 = 1 - t^2, (t^{-1})^3 = -t^3
        return CycNum(c0 + c2, c1, -c2, -c1 - c3)

    # -- comparison / hashing -------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    # -- textual form ----------------------------------------------------

    def qi_coordinates(self):
        """Coordinates (a, b, c, d) in the basis (1, q, i, i*q)."""
        c0, c1, c2, c3 = self.c
        b = c2 / 2
        a = c0 + b
        d = -c1 / 2
        c = c3 + c1 / 2
        return (a, b, c, d)

    def __str__(self) -> str:
        parts = []
        for value, sym in zip(self.qi_coordinates(), ("", "q", "i", "i*q")):
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
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self) -> str:
        return f"CycNum({self})"


def _coerce(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    if isinstance(x, (int, Fraction)):
        return CycNum(x)
    raise TypeError(f"cannot coerce {x!r} into Q(zeta_12)")


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a, b):
    """Divide polynomials over Q, coefficient lists in increasing degree."""
    a = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    inv_lead = 1 / Fraction(b[-1])
    for i in range(len(a) - len(b), -1, -1):
        coeff = a[i + len(b) - 1] * inv_lead
        if coeff:
            q[i] = coeff
            for j, bj in enumerate(b):
                a[i + j] -= coeff * bj
    return _poly_trim(q), _poly_trim(a)


def _poly_xgcd(a, b):
    """Return (g, s) with s*a == g mod b, g = gcd(a, b), over Q[t]."""
    a = _poly_trim([Fraction(x) for x in a])
    b = [Fraction(x) for x in b]
    r0, r1 = a, b
    s0, s1 = [Fraction(1)], []
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        # s_new = s0 - q*s1
        prod = [Fraction(0)] * (len(q) + len(s1))
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    prod[i + j] += qi * sj
        new_s = [Fraction(0)] * max(len(s0), len(prod))
        for i, x in enumerate(s0):
            new_s[i] += x
        for i, x in enumerate(prod):
            new_s[i] -= x
        s0, s1 = s1, _poly_trim(new_s)
    return r0, s0


_ZERO_CYC = CycNum(0)
_ONE_CYC = CycNum(1)

#: the imaginary unit, t^3
I_UNIT = CycNum(0, 0, 0, 1)
#: primitive cube root of unity, t^2 - 1
OMEGA = CycNum(-1, 0, 1, 0)
#: square root of -3, equal to 2*OMEGA + 1
Q_ROOT = CycNum(-1, 0, 2, 0)
#: the generator t = zeta_12 itself
ZETA = CycNum(0, 1, 0, 0)

ZERO = _ZERO_CYC
ONE = _ONE_CYC
