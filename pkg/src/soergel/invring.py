"""The polynomial ring R = Sym(V*) with its W-action and Demazure operators.

Variables are X_s = B(alpha_s, -), one per generator, each of degree 2.  The
generator s acts by the substitution X_t -> X_t - 2 B(alpha_s, alpha_t) X_s,
so that s.X_s = -X_s.
"""

from __future__ import annotations

from gmpy2 import mpq

from .arith import Poly
from .coxeter import CoxeterSystem
from .errors import DivisionFailure


class RingContext:
    """Polynomial ring attached to a Coxeter system, with memoized actions."""

    def __init__(self, system: CoxeterSystem):
        self.system = system
        self.nvars = n = system.rank
        self.zero = Poly.zero(n)
        self.one = Poly.const(mpq(1), n)
        self.X = [Poly.var(s, n) for s in range(n)]
        # image of X_t under s, as a linear polynomial
        self._lin = [
            [self.X[t] - self.X[s] * (2 * system.cartan[s][t]) for t in range(n)] for s in range(n)
        ]
        self._mono_act: dict = {}
        self._mono_split: dict = {}

    def var(self, s: int) -> Poly:
        return self.X[s]

    def const(self, c) -> Poly:
        return Poly.const(c, self.nvars)

    def monomial(self, exps) -> Poly:
        return Poly.monomial(tuple(exps))

    def _act_monomial(self, s: int, mono: tuple) -> Poly:
        key = (s, mono)
        hit = self._mono_act.get(key)
        if hit is None:
            hit = self.one
            lin = self._lin[s]
            for t, e in enumerate(mono):
                for _ in range(e):
                    hit = hit * lin[t]
            self._mono_act[key] = hit
        return hit

    def act_gen(self, s: int, f: Poly) -> Poly:
        out: dict = {}
        for mono, c in f.terms.items():
            for m2, c2 in self._act_monomial(s, mono).terms.items():
                v = c * c2
                out[m2] = out[m2] + v if m2 in out else v
        return Poly(out, self.nvars)

    def act_word(self, word, f: Poly) -> Poly:
        """(s_1 ... s_k).f, applying s_k first."""
        for s in reversed(tuple(word)):
            f = self.act_gen(s, f)
        return f

    def act(self, universe, w: int, f: Poly) -> Poly:
        return self.act_word(universe.words[w], f)

    def demazure(self, s: int, f: Poly) -> Poly:
        """(f - s.f) / (2 X_s)."""
        num = f - self.act_gen(s, f)
        q = num.divide_by_var(s)
        if q is None:
            raise DivisionFailure(f"numerator not divisible by X_{s}")
        return q * mpq(1, 2)

    def _split_monomial(self, s: int, mono: tuple):
        key = (s, mono)
        hit = self._mono_split.get(key)
        if hit is None:
            f = Poly({mono: mpq(1)}, self.nvars)
            d = self.demazure(s, f)
            hit = (f - self.X[s] * d, d)
            self._mono_split[key] = hit
        return hit

    def split(self, s: int, f: Poly):
        """(P_s f, d_s f) with f = P_s f + X_s d_s f and both parts s-invariant."""
        a: dict = {}
        b: dict = {}
        for mono, c in f.terms.items():
            pa, pb = self._split_monomial(s, mono)
            for m2, c2 in pa.terms.items():
                v = c * c2
                a[m2] = a[m2] + v if m2 in a else v
            for m2, c2 in pb.terms.items():
                v = c * c2
                b[m2] = b[m2] + v if m2 in b else v
        return Poly(a, self.nvars), Poly(b, self.nvars)

    def split_monomial(self, s: int, mono: tuple):
        return self._split_monomial(s, mono)

    def is_invariant(self, s: int, f: Poly) -> bool:
        return self.act_gen(s, f) == f


def act(ctx: RingContext, universe, w: int, f: Poly) -> Poly:
    return ctx.act(universe, w, f)


def demazure(ctx: RingContext, s: int, f: Poly) -> Poly:
    return ctx.demazure(s, f)


def split(ctx: RingContext, s: int, f: Poly):
    return ctx.split(s, f)
