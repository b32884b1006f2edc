import itertools
from collections import Counter

import pytest
from gmpy2 import mpq

from soergel.arith import LaurentPoly, Poly
from soergel.bsbim import BSModule
from soergel.hecke import product_of_kl_generators
from soergel.leaves import (
    DoubleLeafBasis,
    adjoint,
    build_tree,
    degree_generating_functions,
    double_leaves,
    eval_leaf,
    expand_double_leaves,
    standard_leaves,
)

from conftest import shared_session


@pytest.fixture(scope="module")
def A2():
    return shared_session("A2", 4)


def summary(session, leaves):
    by = {}
    for leaf in leaves:
        by.setdefault(session.fmt(leaf.target), []).append(leaf.degree)
    return {k: sorted(v, reverse=True) for k, v in by.items()}


class TestTree:
    def test_single_letter(self, A2):
        leaves = build_tree(A2, (0,))
        got = {(A2.fmt(l.target), l.degree, l.i_seq) for l in leaves}
        assert got == {("e", 1, (1,)), ("s", 0, (0,))}

    def test_sts(self, A2):
        leaves = build_tree(A2, (0, 1, 0))
        assert summary(A2, leaves) == {
            "e": [3, 1],
            "s": [2, 0],
            "t": [2],
            "st": [1],
            "ts": [1],
            "sts": [0],
        }

    @pytest.mark.parametrize("name, word", [("A2", (0, 1, 0)), ("B2", (1, 0, 1, 0)), ("A3", (0, 2, 1, 0))])
    def test_reduced_word_has_identity_leaf(self, name, word):
        session = shared_session(name, len(word))
        tree = session.tree(word)
        w = session.element(word)
        (top,) = tree.leaves_to(w)
        assert top.degree == 0 and not top.steps
        assert top.morphism == session.bims.identity(word)

    @pytest.mark.parametrize(
        "name, word",
        [("A2", (0, 1, 0, 1)), ("B2", (0, 1, 1, 0)), ("A3", (1, 0, 2, 1)), ("Dinf", (0, 1, 0, 0)), ("G2", (0, 1, 0, 1, 0))],
    )
    def test_invariants(self, name, word):
        session = shared_session(name, len(word) + 1)
        u = session.universe
        tree = session.tree(word)
        n = len(word)
        assert len(tree.leaves) == 2**n
        assert sorted(l.i_seq for l in tree.leaves) == list(itertools.product((0, 1), repeat=n))
        for x, leaves in tree.by_target.items():
            assert len({l.j_seq for l in leaves}) == len(leaves)
        reduced = u.is_reduced(word)
        for leaf in tree.leaves:
            assert leaf.degree == leaf.n_m - leaf.n_j
            assert leaf.morphism.degree == leaf.degree and leaf.morphism.is_homogeneous()
            assert (n - u.lengths[leaf.target] - leaf.degree) % 2 == 0
            if reduced:
                assert leaf.degree <= n - u.lengths[leaf.target]
            assert session.bims.is_bimodule_morphism(leaf.morphism)
            assert leaf.morphism.target.word == tree.target_word(leaf.target)

    def test_degree_function_matches_tree(self, A2):
        for word in [(0, 1, 0), (0, 0, 1), (1, 0, 1, 1)]:
            tree = A2.tree(word)
            fast = degree_generating_functions(A2.universe, word)
            slow = {x: sum((LaurentPoly.v(l.degree) for l in ls), LaurentPoly()) for x, ls in tree.by_target.items()}
            assert fast == slow

    def test_deodhar_small(self, A2):
        for word in itertools.product((0, 1), repeat=4):
            h = product_of_kl_generators(A2.universe, word)
            gf = degree_generating_functions(A2.universe, word)
            assert {x: p for x, p in h.support.items()} == gf


class TestAdjoint:
    def test_identity(self, A2):
        top = A2.tree((0, 1)).leaves_to(A2.element((0, 1)))[0]
        assert adjoint(top) == A2.bims.identity((0, 1))

    def test_single_step(self, A2):
        leaf = next(l for l in A2.tree((0,)).leaves if l.target == 0)
        assert adjoint(leaf) == A2.bims.elementary_eps(0)

    def test_degrees_and_bimodule(self, A2):
        for leaf in A2.tree((0, 1, 1, 0)).leaves:
            adj = adjoint(leaf)
            assert adj.degree == leaf.degree
            assert A2.bims.is_bimodule_morphism(adj)
            assert adj.source == leaf.morphism.target and adj.target == leaf.morphism.source


class TestEvalLeaf:
    @pytest.mark.parametrize("name", ["A2", "B2"])
    def test_triangularity(self, name):
        session = shared_session(name, 5)
        one = Poly.const(mpq(1), session.nvars)
        for n in range(1, 5):
            for word in itertools.product(range(2), repeat=n):
                for leaf in session.tree(word).leaves:
                    assert eval_leaf(leaf, leaf.j_seq) == {0: one}
                    for jp in itertools.product((0, 1), repeat=n):
                        if leaf.j_seq > jp:
                            assert eval_leaf(leaf, jp) == {}


class TestDoubleLeaves:
    def test_counts(self, A2):
        assert len(double_leaves(A2, (0,), (0,))) == 2
        assert Counter(A2.fmt(d.through) for d in double_leaves(A2, (0,), (0,))) == {"e": 1, "s": 1}
        assert len(double_leaves(A2, (0, 1, 0), (0, 1, 0))) == 12
        mixed = double_leaves(A2, (0,), (1,))
        assert len(mixed) == 1 and mixed[0].through == 0

    def test_through_e_degree(self, A2):
        dl = next(d for d in double_leaves(A2, (0,), (0,)) if d.through == 0)
        assert dl.degree == 2
        assert dl.morphism == A2.bims.elementary_eps(0) @ A2.bims.elementary_m(0)

    def test_count_formula(self):
        session = shared_session("B2", 4)
        for word in [(0, 1, 0, 1), (0, 0, 1), (1, 0, 0, 1)]:
            tree = session.tree(word)
            assert sum(len(v) for v in tree.by_target.values()) == 2 ** len(word)
            assert len(DoubleLeafBasis(session, word, word)) == sum(len(v) ** 2 for v in tree.by_target.values())


class TestStandardLeaves:
    def test_examples(self, A2):
        w = (0, 1, 0)
        top = standard_leaves(A2, w, A2.element(w))
        assert top == [A2.bims.beta(w)]
        assert standard_leaves(A2, (0, 1), A2.element((1, 0))) == []
        bottom = standard_leaves(A2, w, 0)
        assert sorted(M.degree for M in bottom) == [1, 3]

    def test_bimodule(self, A2):
        for x in A2.tree((0, 1, 0)).targets():
            for M in standard_leaves(A2, (0, 1, 0), x):
                assert A2.bims.is_bimodule_morphism(M)


class TestExpansion:
    def test_basis_elements_expand_to_indicators(self, A2):
        basis = DoubleLeafBasis(A2, (0, 1, 0), (0, 1, 0))
        for k in (0, 5, len(basis) - 1):
            coeffs = basis.expand(basis.elements[k].morphism)
            assert [bool(c) for c in coeffs] == [i == k for i in range(len(basis))]
            assert coeffs[k] == 1

    @pytest.mark.parametrize("name, word", [("A2", (0, 1, 0)), ("B2", (0, 1, 0, 1)), ("A3", (0, 1, 2))])
    def test_identity(self, name, word):
        session = shared_session(name, len(word))
        found = expand_double_leaves(session, session.bims.identity(word))
        top = [(dl, c) for dl, c in found.items() if dl.is_identity_pair]
        assert len(top) == 1 and top[0][1] == 1

    def test_polynomial_combination(self, A2):
        word = (0, 1)
        basis = DoubleLeafBasis(A2, word, word)
        X = A2.ring.X
        M = basis.elements[0].morphism.scale(X[0] * X[1]) + basis.elements[-1].morphism.scale(X[1] * X[1])
        coeffs = basis.expand(M)
        assert coeffs[0] == X[0] * X[1] and coeffs[-1] == X[1] * X[1]

    def test_non_endomorphism(self, A2):
        basis = DoubleLeafBasis(A2, (0, 1), (0,))
        for dl in basis.elements:
            assert sum(1 for c in basis.expand(dl.morphism) if c) == 1

    def test_left_multiplication_expands(self, A2):
        word = (0, 1, 0)
        M = A2.bims.left_mult_operator(BSModule(word), A2.ring.X[1])
        coeffs = DoubleLeafBasis(A2, word, word).expand(M)
        assert any(coeffs)


class TestLedgerInvariance:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_degree_multisets(self, seed):
        base = shared_session("B2", 4)
        alt = shared_session("B2", 4, seed)
        for word in [(0, 1, 0, 1), (1, 0, 1), (0, 1, 1, 0)]:
            assert summary(base, base.tree(word).leaves) == summary(alt, alt.tree(word).leaves)
