"""Hecke algebra in the standard basis, Kazhdan-Lusztig basis and polynomials.

Conventions: H_s^2 = (v^-1 - v) H_s + 1 and the KL basis element of s is
H_s + v.  KL polynomials h_{x,w} lie in v Z[v] for x < w.
"""

from __future__ import annotations

import threading

from .arith import LaurentPoly, bar
from .coxeter import GroupUniverse
from .errors import BallExceeded, IdentityFailure, MalformedH

V = LaurentPoly.v(1)
VINV = LaurentPoly.v(-1)
ONE = LaurentPoly(1)
QUAD = VINV - V  # v^-1 - v


class HeckeElt:
    """Finite sum of p_x H_x with p_x Laurent polynomials; keys are element indices."""

    __slots__ = ("universe", "support")

    def __init__(self, universe: GroupUniverse, support=None):
        self.universe = universe
        self.support = {x: p for x, p in (support or {}).items() if p}

    @classmethod
    def basis(cls, universe, x: int, coeff=ONE) -> "HeckeElt":
        return cls(universe, {x: coeff})

    def __getitem__(self, x):
        return self.support.get(x, LaurentPoly())

    def __add__(self, other):
        out = dict(self.support)
        for x, p in other.support.items():
            out[x] = out[x] + p if x in out else p
        return HeckeElt(self.universe, out)

    def __sub__(self, other):
        return self + other.scale(LaurentPoly(-1))

    def scale(self, p) -> "HeckeElt":
        return HeckeElt(self.universe, {x: q * p for x, q in self.support.items()})

    def __eq__(self, other):
        return isinstance(other, HeckeElt) and self.support == other.support

    def __repr__(self):
        u = self.universe
        terms = sorted(self.support.items(), key=lambda kv: u.sort_key(kv[0]))
        return " + ".join(f"({p})H[{u.system.format_word(u.words[x])}]" for x, p in terms) or "0"

    def to_json(self) -> dict:
        u = self.universe
        return {
            u.system.format_word(u.words[x]): str(p)
            for x, p in sorted(self.support.items(), key=lambda kv: u.sort_key(kv[0]))
        }


def _step(universe, x, s, side):
    table = universe.rmul if side == "right" else universe.lmul
    y = table[x][s]
    if y is None:
        raise BallExceeded("Hecke product leaves the enumerated ball")
    return y


def mult_by_gen(h: HeckeElt, s: int, side: str = "right") -> HeckeElt:
    """h * H_s (side='right') or H_s * h (side='left')."""
    u = h.universe
    out: dict = {}
    for x, p in h.support.items():
        y = _step(u, x, s, side)
        out[y] = out[y] + p if y in out else p
        if u.lengths[y] < u.lengths[x]:
            out[x] = out[x] + p * QUAD if x in out else p * QUAD
    return HeckeElt(u, out)


def mult_by_kl_gen(h: HeckeElt, s: int, side: str = "right") -> HeckeElt:
    """Multiply by the KL generator H_s + v."""
    return mult_by_gen(h, s, side) + h.scale(V)


def bar_involution(h: HeckeElt) -> HeckeElt:
    """Ring involution with v -> v^-1 and H_w -> (H_{w^-1})^-1."""
    u = h.universe
    out = HeckeElt(u)
    for x, p in h.support.items():
        img = HeckeElt.basis(u, 0)
        for s in u.words[x]:
            # right multiplication by H_s^-1 = H_s + (v - v^-1)
            img = mult_by_gen(img, s) + img.scale(V - VINV)
        out = out + img.scale(bar(p))
    return out


def to_P(h: LaurentPoly, l_diff: int) -> LaurentPoly:
    """Recover P(q) from h(v) = v^l_diff P(v^-2); the result is keyed by powers of q."""
    out = {}
    for e, c in h.coeffs.items():
        k2 = l_diff - e
        if k2 < 0 or k2 % 2:
            raise MalformedH(f"{h} is not of the form v^{l_diff} P(v^-2)")
        out[k2 // 2] = c
    return LaurentPoly(out)


def from_P(p: LaurentPoly, l_diff: int) -> LaurentPoly:
    return LaurentPoly({l_diff - 2 * k: c for k, c in p.coeffs.items()})


class KLTable:
    """Memoized Kazhdan-Lusztig basis elements over a universe.

    Build-then-freeze: :meth:`build` fills the table for a set of elements
    under a lock; afterwards lookups are read-only.
    """

    def __init__(self, universe: GroupUniverse, verify: bool = True):
        self.universe = universe
        self.verify = verify
        self._basis: dict[int, HeckeElt] = {0: HeckeElt.basis(universe, 0)}
        self._lock = threading.Lock()
        self.overrides: dict = {}

    def build(self, elements=None) -> "KLTable":
        u = self.universe
        targets = range(len(u)) if elements is None else elements
        with self._lock:
            for w in sorted(targets, key=u.sort_key):
                self._compute(w)
        return self

    def _compute(self, w: int) -> HeckeElt:
        hit = self._basis.get(w)
        if hit is not None:
            return hit
        u = self.universe
        s = u.words[w][0]
        sw = u.lmul[w][s]
        c_sw = self._compute(sw)
        out = mult_by_kl_gen(c_sw, s, "left")
        # subtract mu-corrections: z < sw with sz < z
        for z, p in sorted(c_sw.support.items(), key=lambda kv: u.sort_key(kv[0])):
            if z == sw:
                continue
            mu = p[1]
            if not mu:
                continue
            sz = u.lmul[z][s]
            if sz is not None and u.lengths[sz] < u.lengths[z]:
                out = out - self._compute(z).scale(LaurentPoly(mu))
        if self.verify:
            self._check(w, out)
        self._basis[w] = out
        return out

    def _check(self, w: int, elt: HeckeElt) -> None:
        u = self.universe
        if elt[w] != ONE:
            raise IdentityFailure("KL basis element is not unitriangular")
        lower = u.lower_interval(w)
        for x, p in elt.support.items():
            if x not in lower:
                raise IdentityFailure("KL basis support leaves the Bruhat interval")
            if x != w and (p.min_degree() < 1):
                raise IdentityFailure("KL polynomial violates the degree condition")
        if bar_involution(elt) != elt:
            raise IdentityFailure("KL basis element is not bar invariant")

    def kl_basis(self, w: int) -> HeckeElt:
        return self._basis[w] if w in self._basis else self._compute(w)

    def h(self, x: int, w: int) -> LaurentPoly:
        key = (x, w)
        if key in self.overrides:
            return self.overrides[key]
        return self.kl_basis(w)[x]

    def P(self, x: int, w: int) -> LaurentPoly:
        u = self.universe
        return to_P(self.h(x, w), u.lengths[w] - u.lengths[x])

    def mu(self, x: int, w: int) -> int:
        return self.h(x, w)[1]

    def with_override(self, x: int, w: int, h: LaurentPoly) -> "KLTable":
        """A copy whose entry h_{x,w} is replaced (used for negative controls)."""
        other = KLTable(self.universe, verify=False)
        other._basis = self._basis
        other.overrides = dict(self.overrides)
        other.overrides[(x, w)] = h
        return other


def kl_basis(w: int, table: KLTable) -> HeckeElt:
    return table.kl_basis(w)


def kl_poly(x: int, w: int, table: KLTable) -> LaurentPoly:
    return table.h(x, w)


def product_of_kl_generators(universe: GroupUniverse, word) -> HeckeElt:
    """The product of the KL generators along ``word``, in the standard basis."""
    h = HeckeElt.basis(universe, 0)
    for s in word:
        h = mult_by_kl_gen(h, s, "right")
    return h
