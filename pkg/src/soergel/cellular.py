"""The graded cellular algebra End(BS(w)) (x)_R k on the double-leaves basis.

Everything here works with constant matrices: evaluation of right
coefficients at 0 is a ring map on matrices over R, and the constant parts
of the double leaves are linearly independent (checked when the basis is
built), so the algebra is faithfully represented by those constant
matrices.  Products of basis elements are expanded through a small set of
pivot entries, which keeps the structure-constant computation to a few
dense multiplications per pivot.

Conventions: the basis element c^x_{st} is adjoint(s) o t with s, t light
leaves of w ending at x; the product is composition, a*b = a o b; cell
modules are right modules with basis the leaves ending at x.
"""

from __future__ import annotations

import random

from gmpy2 import mpq

from .arith import LaurentPoly
from .errors import CrossCheckFailed, IdentityFailure, InconsistentSystem, InputError
from .leaves import DoubleLeafBasis
from .linalg import ColumnSolver, matmul, rank


class AlgebraA:
    """Graded cellular algebra attached to a reduced expression ``w_word``.

    Attributes: ``basis`` (a DoubleLeafBasis of End(BS(w))), ``poset`` (the
    elements x <= w, sorted by length descending so that w comes first),
    ``T`` (x -> leaves ending at x).
    """

    def __init__(self, session, w_word):
        u = session.universe
        self.session = session
        self.w_word = tuple(w_word)
        if not u.is_reduced(self.w_word):
            raise InputError("the cellular algebra needs a reduced expression")
        self.w = u.element(self.w_word)
        self.tree = session.tree(self.w_word)
        self.basis = DoubleLeafBasis(session, self.w_word, self.w_word)
        self.N = len(self.basis)
        self.poset = sorted(self.tree.targets(), key=lambda x: (-u.lengths[x], u.sort_key(x)))
        self.T = {x: self.tree.leaves_to(x) for x in self.poset}
        self.d = session.d
        self._C = None
        self._cells: dict = {}
        self.flip = [
            self.basis.find(dl.through, dl.lower.j_seq, dl.upper.j_seq) for dl in self.basis.elements
        ]
        self.unit = next(k for k, dl in enumerate(self.basis.elements) if dl.is_identity_pair)

    # -- structure constants -------------------------------------------------
    @property
    def structure_constants(self) -> list:
        """C[a * N + b] = sparse coordinates {k: value} of basis[a] * basis[b]."""
        if self._C is None:
            self._C = self._compute_structure_constants()
        return self._C

    def _compute_structure_constants(self) -> list:
        N, d = self.N, self.d
        D = self.basis.const
        n2 = len(D[0]) if N else 0
        vectors = [dict() for _ in range(N * N)]
        for p in self.basis.solver.pivot_rows:
            r, c = divmod(p, n2)
            rows = [D[a][r] for a in range(N)]
            cols = [[D[b][i][c] for b in range(N)] for i in range(n2)]
            W = matmul(rows, cols, d)
            for a in range(N):
                Wa = W[a]
                base = a * N
                for b in range(N):
                    if Wa[b]:
                        vectors[base + b][p] = Wa[b]
        coords = self.basis.solver.solve_many(vectors, verify=False)
        C = [{k: v for k, v in enumerate(row) if v} for row in coords]
        self._verify_products(C)
        return C

    def _verify_products(self, C, samples: int = 12) -> None:
        """Exact checks that the pivot-based coordinates reproduce true products."""
        N, D, basis = self.N, self.basis.const, self.basis
        rng = random.Random(20240101)
        pairs = [(self.unit, b) for b in range(N)][:4]
        pairs += [(rng.randrange(N), rng.randrange(N)) for _ in range(samples)]
        for a, b in pairs:
            if basis.product(D[a], D[b]) != self._combine(C[a * N + b]):
                raise IdentityFailure("product of double leaves leaves their span")
        # one random combination covers every pair at once with high probability
        alpha = [mpq(rng.randint(-9, 9)) for _ in range(N)]
        beta = [mpq(rng.randint(-9, 9)) for _ in range(N)]
        X, Y = self._combine(dict(enumerate(alpha))), self._combine(dict(enumerate(beta)))
        want: dict = {}
        for a in range(N):
            for b in range(N):
                ab = alpha[a] * beta[b]
                if not ab:
                    continue
                for k, v in C[a * N + b].items():
                    want[k] = want.get(k, 0) + ab * v
        if basis.product(X, Y) != self._combine(want):
            raise IdentityFailure("structure constants fail the random product check")

    def _combine(self, coords: dict) -> list:
        D = self.basis.const
        rows, cols = len(D[0]), len(D[0][0])
        out = [[mpq(0)] * cols for _ in range(rows)]
        for k, c in coords.items():
            if not c:
                continue
            for i, row in enumerate(D[k]):
                for j, x in enumerate(row):
                    if x:
                        out[i][j] = out[i][j] + c * x
        return out

    def product(self, a: int, b: int) -> dict:
        return self.structure_constants[a * self.N + b]

    def degree(self, k: int) -> int:
        return self.basis.elements[k].degree

    # -- cellularity -----------------------------------------------------------
    def verify_axioms(self) -> dict:
        """Check the graded cell datum axioms; raise IdentityFailure on a violation."""
        u = self.session.universe
        N, C, els = self.N, self.structure_constants, self.basis.elements
        if N != sum(len(t) ** 2 for t in self.T.values()):
            raise IdentityFailure("basis size differs from the sum of squared cell sizes")
        if self.poset[0] != self.w or u.lengths[self.poset[-1]] != 0:
            raise IdentityFailure("w must be minimal and e maximal in the cell poset")
        for b in range(N):
            if C[self.unit * N + b] != {b: 1} or C[b * N + self.unit] != {b: 1}:
                raise IdentityFailure("the identity double leaf is not the unit")
        # (b) anti-automorphism
        flip = self.flip
        for k in range(N):
            if flip[flip[k]] != k:
                raise IdentityFailure("the flip is not an involution")
        for a in range(N):
            for b in range(N):
                left = C[a * N + b]
                right = C[flip[b] * N + flip[a]]
                if {flip[k]: v for k, v in left.items()} != right:
                    raise IdentityFailure("the flip is not an anti-automorphism")
        # (c) ideal congruence with s-independence
        for x, leaves in self.T.items():
            for t in leaves:
                for a in range(N):
                    self._cell_row(x, t, a)
        # (d) grading
        for a in range(N):
            dl = els[a]
            if dl.degree != dl.upper.degree + dl.lower.degree:
                raise IdentityFailure("double leaf degree is not additive")
            for b in range(N):
                for k in C[a * N + b]:
                    if els[k].degree != dl.degree + els[b].degree:
                        raise IdentityFailure("structure constant breaks the grading")
        return {"basis": N, "cells": {self.session.fmt(x): len(t) for x, t in self.T.items()}, "ok": True}

    def _cell_row(self, x: int, t, a: int) -> dict:
        """r_{t v}(a) for v in T(x), checked for every upper leaf s."""
        u = self.session.universe
        N, C, els = self.N, self.structure_constants, self.basis.elements
        found = None
        for s in self.T[x]:
            k0 = self.basis.find(x, s.j_seq, t.j_seq)
            row = {}
            for k, val in C[k0 * N + a].items():
                dl = els[k]
                y = dl.through
                if y == x:
                    if dl.upper.j_seq != s.j_seq:
                        raise IdentityFailure("cell product changes the upper leaf")
                    row[dl.lower.j_seq] = val
                elif not (u.bruhat_leq(y, x) and y != x):
                    raise IdentityFailure("cell product leaves the cellular ideal")
            if found is None:
                found = row
            elif found != row:
                raise IdentityFailure("cell action scalars depend on the upper leaf")
        return found

    # -- cell modules and forms ------------------------------------------------
    def cell(self, x: int) -> "CellModule":
        hit = self._cells.get(x)
        if hit is None:
            if x not in self.T:
                raise InputError("x is not below w")
            hit = CellModule(self, x)
            self._cells[x] = hit
        return hit

    def gram(self, x: int, method: str = "beta") -> list:
        return self.cell(x).gram(method)

    def gd_cell(self, x: int) -> LaurentPoly:
        return self.cell(x).gd_cell()

    def gd_simple(self, x: int) -> LaurentPoly:
        return self.cell(x).gd_simple()

    def solve_multiplicities(self, kl) -> dict:
        return solve_multiplicities(self, kl)

    def decomposition_number(self, x: int, kl) -> LaurentPoly:
        return decomposition_number(self, x, kl)


class CellModule:
    """Delta(x): basis the leaves of w ending at x, graded by leaf degree.

    The action is computed through the standard-leaf realization: a leaf l
    corresponds to beta_x o l, whose reduction mod R+ is the first row of
    the constant matrix of l; these rows are unitriangular.
    """

    def __init__(self, algebra: AlgebraA, x: int):
        self.algebra = algebra
        self.x = x
        self.leaves = algebra.T[x]
        self.degrees = [leaf.degree for leaf in self.leaves]
        rows = [leaf.const[0] for leaf in self.leaves]
        self.rho = ColumnSolver([_sparse(r) for r in rows], len(rows[0]), algebra.d)
        if not self.rho.independent:
            raise IdentityFailure("standard leaves are dependent modulo R+")
        self._actions: dict = {}

    def __len__(self):
        return len(self.leaves)

    def coordinates(self, row: list) -> list:
        """Coordinates of a row vector (a standard leaf mod R+) in this basis."""
        return self.rho.solve(_sparse(row))

    def action(self, a: int) -> list:
        """Matrix of the right action of basis element a; column t is t*a."""
        hit = self._actions.get(a)
        if hit is None:
            D = self.algebra.basis.const[a]
            d = self.algebra.d
            images = matmul([leaf.const[0] for leaf in self.leaves], D, d)
            cols = self.rho.solve_many([_sparse(r) for r in images])
            n = len(self.leaves)
            hit = [[cols[t][v] for t in range(n)] for v in range(n)]
            self._actions[a] = hit
        return hit

    def action_from_structure(self, a: int) -> list:
        """The same matrix read off the structure constants of the algebra."""
        alg = self.algebra
        n = len(self.leaves)
        pos = {leaf.j_seq: i for i, leaf in enumerate(self.leaves)}
        out = [[mpq(0)] * n for _ in range(n)]
        for t, leaf in enumerate(self.leaves):
            for jv, val in alg._cell_row(self.x, leaf, a).items():
                out[pos[jv]][t] = val
        return out

    def gram(self, method: str = "beta") -> list:
        """<l1, l2>: the identity coefficient of l1 o adjoint(l2) in End(BS(x))."""
        ls = self.leaves
        n = len(ls)
        if method == "beta":
            return [
                [sum((a * b for a, b in zip(ls[i].const[0], (r[0] for r in ls[j].adjoint_const))), mpq(0)) for j in range(n)]
                for i in range(n)
            ]
        alg = self.algebra
        if method == "structure":
            # c_{a s} * c_{t b} = <s, t> c_{a b} modulo lower cells
            a = b = ls[0]
            out = []
            for s in ls:
                row = []
                for t in ls:
                    k1 = alg.basis.find(self.x, a.j_seq, s.j_seq)
                    k2 = alg.basis.find(self.x, t.j_seq, b.j_seq)
                    target = alg.basis.find(self.x, a.j_seq, b.j_seq)
                    row.append(alg.product(k1, k2).get(target, mpq(0)))
                out.append(row)
            return out
        if method == "expand":
            session = alg.session
            xword = alg.tree.target_word(self.x)
            local = DoubleLeafBasis(session, xword, xword)
            ident = next(k for k, dl in enumerate(local.elements) if dl.is_identity_pair)
            out = []
            for s in ls:
                row = []
                for t in ls:
                    m = local.product(s.const, t.adjoint_const)
                    row.append(local.expand_constant(m)[ident])
                out.append(row)
            return out
        raise ValueError(f"unknown gram method {method!r}")

    def gram_blocks(self, G=None) -> dict:
        """k -> block pairing degree k (rows) with degree -k (columns)."""
        G = G if G is not None else self.gram()
        out = {}
        for k in sorted(set(self.degrees)):
            rows = [i for i, dk in enumerate(self.degrees) if dk == k]
            cols = [j for j, dj in enumerate(self.degrees) if dj == -k]
            if cols:
                out[k] = [[G[i][j] for j in cols] for i in rows]
        return out

    def gd_cell(self) -> LaurentPoly:
        out = LaurentPoly()
        for k in self.degrees:
            out = out + LaurentPoly.v(k)
        return out

    def gd_simple(self) -> LaurentPoly:
        out = {}
        for k, block in self.gram_blocks().items():
            r = rank(block, self.algebra.d)
            if r:
                out[k] = r
        return LaurentPoly(out)


def _sparse(row) -> dict:
    return {i: v for i, v in enumerate(row) if v}


def solve_multiplicities(algebra: AlgebraA, kl) -> dict:
    """m_y with gd_cell(x) = sum_y m_y h_{x,y}, by back-substitution from w down.

    Raises InconsistentSystem unless every m_y is bar-symmetric with
    nonnegative coefficients and the full system has zero residual.
    """
    u = algebra.session.universe
    order = algebra.poset
    gd = {x: algebra.gd_cell(x) for x in order}
    m: dict = {}
    for y in order:
        val = gd[y]
        for z, mz in m.items():
            if mz and u.bruhat_leq(y, z):
                val = val - mz * kl.h(y, z)
        m[y] = val
    for x in order:
        res = gd[x]
        for y, my in m.items():
            if my and u.bruhat_leq(x, y):
                res = res - my * kl.h(x, y)
        if res:
            raise InconsistentSystem(f"nonzero residual at {algebra.session.fmt(x)}")
    for y, my in m.items():
        if not (my.is_bar_symmetric() and my.nonnegative()):
            raise InconsistentSystem(
                f"multiplicity of {algebra.session.fmt(y)} is {my}, not a bar-symmetric element of N[v, v^-1]"
            )
    if m.get(algebra.w) != LaurentPoly(1):
        raise InconsistentSystem("the top multiplicity must be 1")
    return m


def decomposition_number(algebra: AlgebraA, x: int, kl) -> LaurentPoly:
    """h_{x,w}, returned only after the Gram ranks and the multiplicity solve agree."""
    u = algebra.session.universe
    if not u.bruhat_leq(x, algebra.w):
        raise InputError("decomposition numbers need x <= w")
    m = solve_multiplicities(algebra, kl)
    for y in algebra.poset:
        if algebra.gd_simple(y) != m[y]:
            raise CrossCheckFailed(f"Gram ranks and multiplicities disagree at {algebra.session.fmt(y)}")
    return kl.h(x, algebra.w)


def build_algebra(session, w_word) -> AlgebraA:
    return AlgebraA(session, w_word)


def gram(algebra: AlgebraA, x: int) -> list:
    return algebra.gram(x)


def gd_cell(algebra: AlgebraA, x: int) -> LaurentPoly:
    return algebra.gd_cell(x)


def gd_simple(algebra: AlgebraA, x: int) -> LaurentPoly:
    return algebra.gd_simple(x)
