"""Exact scalars, Laurent polynomials in v and graded polynomials.

Field elements are either ``gmpy2.mpq`` (the rational fast path) or
:class:`Scalar` (a + b*sqrt(d)).  Arithmetic between the two is transparent
and any result whose irrational part vanishes collapses back to ``mpq``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as _cartesian

from gmpy2 import mpq

from .errors import FieldMismatch, UnsupportedOrder

INFINITY = 0  # Coxeter-matrix encoding of m = infinity
_MPQ = type(mpq(0))
_ZERO = mpq(0)


def _q(x):
    if isinstance(x, Scalar):
        if x.b:
            raise FieldMismatch(f"{x} is not rational")
        return x.a
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _mk(a, b, d):
    if not b:
        return a
    s = Scalar.__new__(Scalar)
    s.a, s.b, s.d = a, b, d
    return s


class Scalar:
    """The number a + b*sqrt(d) with a, b rational and d squarefree."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=0):
        a, b = _q(a), _q(b)
        if b and d <= 1:
            raise FieldMismatch("an irrational part needs a squarefree d > 1")
        self.a, self.b, self.d = a, b, int(d)

    @staticmethod
    def _split(x):
        t = type(x)
        if t is Scalar:
            return x.a, x.b, x.d
        if t is _MPQ:
            return x, _ZERO, 0
        if isinstance(x, (int, _MPQ, Fraction)):
            return _q(x), _ZERO, 0
        return None

    @staticmethod
    def _field(d1, b1, d2, b2):
        if b1 and b2 and d1 != d2:
            raise FieldMismatch(f"sqrt({d1}) and sqrt({d2}) in one computation")
        return d1 if b1 else d2 if b2 else (d1 or d2)

    def __add__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        d = self._field(self.d, self.b, o[2], o[1])
        return _mk(self.a + o[0], self.b + o[1], d)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Scalar and other.d == self.d:
            return _mk(self.a - other.a, self.b - other.b, self.d)
        o = self._split(other)
        if o is None:
            return NotImplemented
        d = self._field(self.d, self.b, o[2], o[1])
        return _mk(self.a - o[0], self.b - o[1], d)

    def __rsub__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        d = self._field(self.d, self.b, o[2], o[1])
        return _mk(o[0] - self.a, o[1] - self.b, d)

    def __neg__(self):
        return _mk(-self.a, -self.b, self.d)

    def __mul__(self, other):
        if type(other) is _MPQ:
            return _mk(self.a * other, self.b * other, self.d) if other else other
        o = self._split(other)
        if o is None:
            return NotImplemented
        a2, b2, d2 = o
        d = self._field(self.d, self.b, d2, b2)
        return _mk(self.a * a2 + self.b * b2 * d, self.a * b2 + self.b * a2, d)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.d
        if not norm:
            raise ZeroDivisionError("inverse of zero")
        return _mk(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        return self * _mk(*o).inverse() if o[1] else _mk(self.a / o[0], self.b / o[0], self.d)

    def __rtruediv__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        return o[0] * self.inverse()

    def __eq__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        if self.b or o[1]:
            return self.a == o[0] and self.b == o[1] and self.d == o[2]
        return self.a == o[0]

    def __hash__(self):
        return hash(self.a) if not self.b else hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"Scalar({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def field_inverse(x):
    if isinstance(x, Scalar):
        return x.inverse()
    return mpq(1) / x


def sign(x) -> int:
    """Sign of a real field element."""
    if not isinstance(x, Scalar):
        return (x > 0) - (x < 0)
    a, b = x.a, x.b
    sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
    if sb == 0 or sa == sb:
        return sa or sb
    if sa == 0:
        return sb
    return sa if a * a > b * b * x.d else sb


def surd_of(x) -> int:
    return x.d if isinstance(x, Scalar) and x.b else 0


def format_scalar(x) -> str:
    if not isinstance(x, Scalar) or not x.b:
        return str(_q(x))
    tail = f"sqrt({x.d})" if x.b == 1 else f"{x.b}*sqrt({x.d})"
    if not x.a:
        return tail if x.b != -1 else f"-sqrt({x.d})"
    return f"{x.a}+{tail}".replace("+-", "-")


def cos_pi_over(m, d=None):
    """cos(pi/m) exactly, for m in {2, 3, 4, 5, 6, infinity}.

    ``m`` may be 0, ``math.inf`` or ``None`` for infinity.  If ``d`` is given
    the required surd must equal it.
    """
    if m in (0, None) or (isinstance(m, float) and math.isinf(m)):
        return mpq(1)
    table = {
        2: (mpq(0), mpq(0), 0),
        3: (mpq(1, 2), mpq(0), 0),
        4: (mpq(0), mpq(1, 2), 2),
        5: (mpq(1, 4), mpq(1, 4), 5),
        6: (mpq(0), mpq(1, 2), 3),
    }
    if m not in table:
        raise UnsupportedOrder(f"cos(pi/{m}) is not supported")
    a, b, surd = table[m]
    if surd and d is not None and d != surd:
        raise FieldMismatch(f"m={m} needs sqrt({surd}) but the session field uses d={d}")
    return _mk(a, b, surd)


class LaurentPoly:
    """Integer Laurent polynomial in v, stored as {exponent: coefficient}."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs=None):
        if isinstance(coeffs, int):
            coeffs = {0: coeffs}
        self.coeffs = {int(k): int(c) for k, c in (coeffs or {}).items() if c}
        self._hash = None

    @classmethod
    def v(cls, k=1, c=1):
        return cls({k: c})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Parse strings such as ``v^3 + 2v^-1 - 1``."""
        text = text.replace(" ", "").replace("**", "^").replace("*", "")
        if text in ("", "0"):
            return cls()
        out = {}
        for chunk in text.replace("-", "+-").replace("^+-", "^-").split("+"):
            if not chunk:
                continue
            if "v" not in chunk:
                out[0] = out.get(0, 0) + int(chunk)
                continue
            c, _, e = chunk.partition("v")
            c = {"": 1, "-": -1}[c] if c in ("", "-") else int(c)
            e = int(e[1:]) if e.startswith("^") else 1
            out[e] = out.get(e, 0) + c
        return cls(out)

    def __add__(self, other):
        other = _lp(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_lp(other))

    def __rsub__(self, other):
        return _lp(other) - self

    def __mul__(self, other):
        other = _lp(other)
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs.get(k, 0)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def bar(self) -> "LaurentPoly":
        return bar(self)

    def is_bar_symmetric(self) -> bool:
        return self == self.bar()

    def nonnegative(self) -> bool:
        return all(c > 0 for c in self.coeffs.values())

    def in_N_v(self) -> bool:
        """True iff every coefficient is >= 0 and every exponent is >= 0."""
        return self.nonnegative() and all(k >= 0 for k in self.coeffs)

    def min_degree(self):
        return min(self.coeffs) if self.coeffs else None

    def max_degree(self):
        return max(self.coeffs) if self.coeffs else None

    def to_json(self) -> dict:
        return {str(k): c for k, c in sorted(self.coeffs.items())}

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        return self.to_str()

    def to_str(self, var: str = "v") -> str:
        """Human-readable form, highest power first; ``var`` names the variable."""
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs, reverse=True):
            c = self.coeffs[k]
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mono:
                body = str(abs(c))
            else:
                body = mono if abs(c) == 1 else f"{abs(c)}{mono}"
            parts.append(("-" if c < 0 else "+") + body)
        s = "".join(parts)
        return s[1:] if s[0] == "+" else s


def _lp(x):
    return x if isinstance(x, LaurentPoly) else LaurentPoly(int(x))


def bar(f: LaurentPoly) -> LaurentPoly:
    """The substitution v -> v^-1."""
    return LaurentPoly({-k: c for k, c in f.coeffs.items()})


def _mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Sparse polynomial over the session field in ``nvars`` variables.

    Every variable has degree 2, so a monomial with exponent vector e has
    degree 2*sum(e).
    """

    __slots__ = ("terms", "nvars", "_hash")

    def __init__(self, terms, nvars: int):
        self.terms = {m: c for m, c in terms.items() if c}
        self.nvars = nvars
        self._hash = None

    @classmethod
    def zero(cls, nvars):
        return cls({}, nvars)

    @classmethod
    def const(cls, c, nvars):
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i, nvars, c=1):
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): mpq(c) if isinstance(c, int) else c}, nvars)

    @classmethod
    def monomial(cls, exps, c=None):
        return cls({tuple(exps): mpq(1) if c is None else c}, len(exps))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return Poly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] - c if m in out else -c
        return Poly(out, self.nvars)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not other:
                return Poly({}, self.nvars)
            return Poly({m: c * other for m, c in self.terms.items()}, self.nvars)
        if len(self.terms) == 1 and len(other.terms) == 1:
            (m1, c1), = self.terms.items()
            (m2, c2), = other.terms.items()
            return Poly({_mono_mul(m1, m2): c1 * c2}, self.nvars)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return Poly(out, self.nvars)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            if other == 0:
                return not self.terms
            return self == Poly.const(other, self.nvars)
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), mpq(0))

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, mpq(0))

    def total_degrees(self):
        return {sum(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.total_degrees()) <= 1

    def degree(self):
        """Graded degree (twice the total degree); None for the zero polynomial."""
        degs = self.total_degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("degree() of an inhomogeneous polynomial")
        return 2 * degs.pop()

    def homogeneous_components(self) -> dict:
        out = {}
        for m, c in self.terms.items():
            out.setdefault(2 * sum(m), {})[m] = c
        return {k: Poly(t, self.nvars) for k, t in out.items()}

    def divide_by_var(self, i: int):
        """Exact quotient by the i-th variable, or None if it does not divide."""
        out = {}
        for m, c in self.terms.items():
            if m[i] == 0:
                return None
            out[m[:i] + (m[i] - 1,) + m[i + 1:]] = c
        return Poly(out, self.nvars)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(m), [-e for e in m])):
            c = format_scalar(self.terms[m])
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(m) if e
            )
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            elif c == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"({c})*{mono}" if ("+" in c[1:] or "-" in c[1:]) else f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [[list(m), format_scalar(c)] for m, c in sorted(self.terms.items())]


def constant_term(p: Poly):
    """Image of p in R/R+ (the coefficient of the zero exponent vector)."""
    return p.constant_term()


def monomials_of_degree(k: int, nvars: int):
    """Exponent vectors with total degree k, in lexicographically descending order."""
    if nvars == 0:
        return [()] if k == 0 else []
    return sorted(
        (e for e in _cartesian(range(k + 1), repeat=nvars) if sum(e) == k), reverse=True
    )


def parse_scalar(text: str):
    """Inverse of :func:`format_scalar`."""
    text = text.replace(" ", "")
    if "sqrt(" not in text:
        return mpq(text)
    head, _, rest = text.partition("sqrt(")
    d = int(rest.split(")")[0])
    # head looks like "a+b*" / "a-" / "b*" / "" / "-"
    head = head.rstrip("*")
    cut = max(head.rfind("+"), head.rfind("-", 1))
    if cut <= 0:
        a, coef = "0", head
    else:
        a, coef = head[:cut], head[cut:]
    coef = {"": "1", "+": "1", "-": "-1"}.get(coef, coef.lstrip("+"))
    return _mk(mpq(a), mpq(coef), d)
