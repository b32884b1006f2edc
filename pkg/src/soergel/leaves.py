"""Light leaves, their adjoints, double leaves and expansions in that basis.

A light leaf of an expression ``word`` is a branch of the perfect binary tree
that processes the letters one at a time.  While processing letter s with the
current element u (and current reduced word t for u):

* if us > u the branch splits into "keep" (t grows by s) and "multiply"
  (id_t (x) m_s (x) id, degree +1);
* if us < u the word t is first braided into a word ending in s, then the
  two copies of s are merged with j_s (degree -1); the "keep" branch stops
  there, the "multiply" branch applies m_s as well (total degree 0).

Each step is recorded as (kind, prefix, argument, suffix) where the suffix
still contains the unprocessed letters, so every step is a morphism between
Bott-Samelson bimodules of full expressions.  A final braid path moves the
reduced word reached at the end onto the ledger's expression for the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import LaurentPoly, Poly, monomials_of_degree
from .bsbim import ADJOINT, BSModule, MorphismMatrix, adjoint_arg, index_of
from .errors import BallExceeded, IdentityFailure, NotInSpan
from .linalg import ColumnSolver, Embedding


@dataclass(eq=False)
class Leaf:
    source_word: tuple
    target: int
    target_word: tuple
    i_seq: tuple
    j_seq: tuple
    degree: int
    steps: tuple
    morphism: MorphismMatrix | None = field(default=None, repr=False)
    adjoint: MorphismMatrix | None = field(default=None, repr=False)
    _const: list | None = field(default=None, repr=False)
    _aconst: list | None = field(default=None, repr=False)

    @property
    def n_m(self) -> int:
        return sum(1 for s in self.steps if s[0] == "m")

    @property
    def n_j(self) -> int:
        return sum(1 for s in self.steps if s[0] == "j")

    @property
    def const(self) -> list:
        """Constant matrix of the leaf (dense, over the base field)."""
        if self._const is None:
            self._const = _dense_const(self.morphism)
        return self._const

    @property
    def adjoint_const(self) -> list:
        if self._aconst is None:
            self._aconst = _dense_const(self.adjoint)
        return self._aconst

    @property
    def key(self) -> tuple:
        return (self.target, self.j_seq)


def _dense_const(M: MorphismMatrix) -> list:
    rows, cols = M.shape
    out = [[0] * cols for _ in range(rows)]
    for j, col in enumerate(M.const_cols()):
        for i, v in col.items():
            out[i][j] = v
    return out


class LeafTree:
    """All 2^n light leaves of one expression, with morphisms and adjoints.

    With ``self_identity`` (the default) a reduced expression is its own
    target word for its own element, which makes that leaf the identity.
    """

    def __init__(self, session, word: tuple, self_identity: bool = True):
        self.session = session
        self.word = tuple(word)
        self.self_identity = self_identity
        u = session.universe
        self.reduced = u.is_reduced(self.word)
        self.self_element = u.element(self.word) if self.reduced else None
        self.leaves: list[Leaf] = []
        self._build()
        self.leaves.sort(key=lambda leaf: leaf.i_seq)
        self.by_target: dict[int, list[Leaf]] = {}
        for leaf in sorted(self.leaves, key=lambda leaf: leaf.j_seq):
            self.by_target.setdefault(leaf.target, []).append(leaf)

    def target_word(self, x: int) -> tuple:
        if self.self_identity and x == self.self_element:
            return self.word
        return self.session.ledger.rexp(x)

    def targets(self) -> list[int]:
        return sorted(self.by_target, key=self.session.universe.sort_key)

    def leaves_to(self, x: int) -> list[Leaf]:
        return self.by_target.get(x, [])

    def _build(self) -> None:
        s = self.session
        bims, universe, ledger = s.bims, s.universe, s.ledger
        word = self.word
        n = len(word)
        ident = MorphismMatrix.identity(BSModule(word), s.nvars)
        system = s.system

        def advance(state, kind, pre, arg, suf):
            steps, mor, adj = state
            fwd = bims.step(kind, pre, arg, suf)
            back = bims.step(ADJOINT[kind], pre, adjoint_arg(kind, arg), suf)
            return steps + ((kind, tuple(pre), arg, tuple(suf)),), fwd @ mor, adj @ back

        def braid(state, cur, moves, rest):
            for pos, a, b, nxt in moves:
                m = system.m[a][b]
                state = advance(state, "f", cur[:pos], (a, b), cur[pos + m:] + rest)
                cur = nxt
            return state, cur

        def rec(k, t, x, i_seq, j_seq, deg, state):
            if k == n:
                goal = self.target_word(x)
                state, t = braid(state, t, ledger.braid_path(t, goal), ())
                steps, mor, adj = state
                self.leaves.append(
                    Leaf(word, x, goal, i_seq, j_seq, deg, steps, mor, adj)
                )
                return
            letter, rest = word[k], word[k + 1:]
            xs = universe.rmul[x][letter]
            if xs is None:
                raise BallExceeded("leaf construction leaves the enumerated ball")
            if universe.lengths[xs] > universe.lengths[x]:
                rec(k + 1, t + (letter,), xs, i_seq + (0,), j_seq + (0,), deg, state)
                st = advance(state, "m", t, letter, rest)
                rec(k + 1, t, x, i_seq + (1,), j_seq + (0,), deg + 1, st)
            else:
                moves = ledger.path_to_suffix(t, letter)
                st, t2 = braid(state, t, moves, word[k:])
                st = advance(st, "j", t2[:-1], letter, rest)
                rec(k + 1, t2, x, i_seq + (0,), j_seq + (1,), deg - 1, st)
                st = advance(st, "m", t2[:-1], letter, rest)
                rec(k + 1, t2[:-1], xs, i_seq + (1,), j_seq + (1,), deg, st)

        rec(0, (), 0, (), (), 0, ((), ident, ident))


def build_tree(session, word, self_identity: bool = True) -> list[Leaf]:
    return session.tree(word, self_identity).leaves


def degree_generating_functions(universe, word) -> dict:
    """target -> sum over leaves of v^degree, without building any morphism."""
    out: dict = {}
    stack = [(0, 0, 0)]
    word = tuple(word)
    while stack:
        k, x, deg = stack.pop()
        if k == len(word):
            out[x] = out.get(x, LaurentPoly()) + LaurentPoly.v(deg)
            continue
        xs = universe.rmul[x][word[k]]
        if xs is None:
            raise BallExceeded("leaf construction leaves the enumerated ball")
        if universe.lengths[xs] > universe.lengths[x]:
            stack.append((k + 1, xs, deg))
            stack.append((k + 1, x, deg + 1))
        else:
            stack.append((k + 1, x, deg - 1))
            stack.append((k + 1, xs, deg))
    return out


def adjoint(leaf: Leaf) -> MorphismMatrix:
    return leaf.adjoint


def eval_leaf(leaf: Leaf, jprime) -> dict:
    """The image of x^{jprime} under the leaf, as {basis index: Poly}."""
    return leaf.morphism.cols[index_of(jprime)]


@dataclass(eq=False)
class DoubleLeaf:
    """adjoint(upper) o lower, both leaves ending at ``through``."""

    lower: Leaf
    upper: Leaf
    through: int
    _morphism: MorphismMatrix | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.lower.degree + self.upper.degree

    @property
    def morphism(self) -> MorphismMatrix:
        if self._morphism is None:
            self._morphism = self.upper.adjoint @ self.lower.morphism
        return self._morphism

    @property
    def is_identity_pair(self) -> bool:
        return not self.lower.steps and not self.upper.steps


def _self_identity_flags(session, w_word, v_word):
    """Choose per-side target conventions so that both sides agree on every through-element."""
    u = session.universe
    flags = []
    for mine, other in ((w_word, v_word), (v_word, w_word)):
        ok = True
        if u.is_reduced(mine):
            x = u.element(mine)
            if u.bruhat_leq(x, u.element(other)):
                theirs = other if (u.is_reduced(other) and u.element(other) == x) else session.ledger.rexp(x)
                ok = tuple(theirs) == tuple(mine)
        flags.append(ok)
    return flags


def double_leaves(session, w_word, v_word) -> list[DoubleLeaf]:
    """All double leaves BS(w_word) -> BS(v_word), grouped by through-element."""
    fw, fv = _self_identity_flags(session, tuple(w_word), tuple(v_word))
    tw = session.tree(w_word, fw)
    tv = session.tree(v_word, fv)
    out = []
    for x in tw.targets():
        uppers = tv.leaves_to(x)
        for lower in tw.leaves_to(x):
            for upper in uppers:
                out.append(DoubleLeaf(lower, upper, x))
    return out


def standard_leaves(session, w_word, x: int) -> list[MorphismMatrix]:
    """beta_x o l for the leaves l of w_word ending at x (empty unless x <= w)."""
    tree = session.tree(w_word)
    leaves = tree.leaves_to(x)
    if not leaves:
        return []
    beta = session.bims.beta(tree.target_word(x))
    return [beta @ leaf.morphism for leaf in leaves]


def flat_const(rows: list) -> dict:
    ncols = len(rows[0]) if rows else 0
    return {i * ncols + j: v for i, row in enumerate(rows) for j, v in enumerate(row) if v}


class DoubleLeafBasis:
    """Double leaves BS(w) -> BS(v) with solvers for expansions.

    Constant matrices of double leaves are computed as products of constant
    matrices of leaves (evaluation at 0 is a ring map on matrices), so no
    polynomial composition is needed unless a full expansion is requested.
    Their linear independence is checked on construction.
    """

    def __init__(self, session, w_word, v_word):
        self.session = session
        self.w_word, self.v_word = tuple(w_word), tuple(v_word)
        self.elements = double_leaves(session, w_word, v_word)
        self.index = {(dl.through, dl.upper.j_seq, dl.lower.j_seq): k for k, dl in enumerate(self.elements)}
        self.rows = 1 << len(self.v_word)
        self.cols = 1 << len(self.w_word)
        self.emb = Embedding(session.d)
        self.const = [self._const_of(dl) for dl in self.elements]
        self.solver = ColumnSolver([flat_const(c) for c in self.const], self.rows * self.cols, session.d)
        if not self.solver.independent:
            raise IdentityFailure("constant parts of the double leaves are linearly dependent")

    def __len__(self):
        return len(self.elements)

    def _const_of(self, dl: DoubleLeaf) -> list:
        a, b = dl.upper.adjoint_const, dl.lower.const
        return self.product(a, b)

    def product(self, a: list, b: list) -> list:
        emb = self.emb
        return emb.decode(emb.dense(a) * emb.dense(b))

    def find(self, through: int, upper, lower) -> int:
        return self.index[(through, tuple(upper), tuple(lower))]

    def expand_constant(self, rows: list) -> list:
        """Coordinates of a constant matrix in the constant double-leaf basis."""
        return self.solver.solve(flat_const(rows))

    def expand(self, M: MorphismMatrix) -> list[Poly]:
        """Polynomial coefficients r_k with M = sum_k DL_k * r_k.

        Solved monomial by monomial: writing DL_k = sum_g D_{k,g} X^g and
        r_k = sum_a r_{k,a} X^a, the coefficient of X^a gives
        D_0 r_a = M_a - sum_{g != 0} D_g r_{a-g}, and D_0 has independent
        columns.  Homogeneous components of M are treated separately, which
        bounds the monomial degrees needed; the result is checked by full
        reconstruction.
        """
        if M.source.word != self.w_word or M.target.word != self.v_word:
            raise ValueError("morphism does not match this basis")
        nv = self.session.nvars
        zero = (0,) * nv
        comps = [dl.morphism.components() for dl in self.elements]
        higher = [(g, k, vec) for k, c in enumerate(comps) for g, vec in c.items() if g != zero]
        degs = [dl.degree for dl in self.elements]
        ncols = self.cols
        src, tgt = M.source, M.target
        by_degree: dict = {}
        for j, col in enumerate(M.cols):
            for i, p in col.items():
                for mono, c in p.terms.items():
                    d = 2 * sum(mono) - src.basis_degree(j) + tgt.basis_degree(i)
                    by_degree.setdefault(d, {}).setdefault(mono, {})[i * ncols + j] = c
        coeffs: list[dict] = [{} for _ in self.elements]
        for d, target in sorted(by_degree.items()):
            top = max((d - dk) // 2 for dk in degs)
            solved: dict = {}
            for total in range(top + 1):
                for alpha in reversed(monomials_of_degree(total, nv)):
                    rhs = dict(target.get(alpha, {}))
                    for g, k, vec in higher:
                        rest = tuple(a - b for a, b in zip(alpha, g))
                        if min(rest) < 0:
                            continue
                        r = solved.get(rest)
                        if r is None or not r[k]:
                            continue
                        c = r[k]
                        for pos, v in vec.items():
                            nvv = rhs.get(pos, 0) - v * c
                            if nvv:
                                rhs[pos] = nvv
                            else:
                                rhs.pop(pos, None)
                    if not rhs:
                        continue
                    sol = self.solver.solve(rhs, verify=False)
                    solved[alpha] = sol
                    for k, c in enumerate(sol):
                        if c:
                            coeffs[k][alpha] = coeffs[k].get(alpha, 0) + c
        out = [Poly(c, nv) for c in coeffs]
        recon = None
        for dl, r in zip(self.elements, out):
            if r:
                term = dl.morphism.scale(r)
                recon = term if recon is None else recon + term
        if recon is None:
            recon = MorphismMatrix.zero(src, tgt, nv)
        if recon.cols != M.cols:
            raise NotInSpan("morphism is not a combination of double leaves")
        return out


def expand_double_leaves(session, M: MorphismMatrix) -> dict:
    """Map DoubleLeaf -> Poly for a morphism BS(w) -> BS(v)."""
    basis = DoubleLeafBasis(session, M.source.word, M.target.word)
    coeffs = basis.expand(M)
    return {dl: c for dl, c in zip(basis.elements, coeffs) if c}
