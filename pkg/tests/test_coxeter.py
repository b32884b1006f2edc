import itertools
import json
import warnings

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from soergel.arith import Scalar, sign
from soergel.coxeter import ChoiceLedger, CoxeterSystem, braid_path, enumerate_ball, normal_form
from soergel.errors import (
    BallExceeded,
    CapExceeded,
    FieldMismatch,
    FieldTowerUnsupported,
    InputError,
    NotSameElement,
)

FINITE = {"A2": 6, "A3": 24, "B2": 8, "B3": 48, "G2": 12, "H3": 120}


def ball(name, L=None):
    system = CoxeterSystem.preset(name)
    return enumerate_ball(system, L if L is not None else 20)


def subword_products(u, word):
    """Independent Bruhat oracle: products of all subwords."""
    out = set()
    for mask in itertools.product((0, 1), repeat=len(word)):
        out.add(u.element([s for s, keep in zip(word, mask) if keep]))
    return out


class TestSystem:
    def test_reflect_examples(self):
        A2 = CoxeterSystem.preset("A2")
        assert A2.reflect(0, [1, 0]) == [-1, 0]
        assert A2.reflect(0, [0, 1]) == [1, 1]
        A1A1 = CoxeterSystem([[1, 2], [2, 1]])
        assert A1A1.reflect(0, [0, 1]) == [0, 1]

    @pytest.mark.parametrize("name", ["A2", "B2", "G2", "H3", "Dinf"])
    def test_reflection_is_involution(self, name):
        system = CoxeterSystem.preset(name)
        vec = [mpq(i + 1, 3) for i in range(system.rank)]
        for s in range(system.rank):
            assert system.reflect(s, system.reflect(s, vec)) == vec

    def test_cartan_entries(self):
        B2 = CoxeterSystem.preset("B2")
        assert B2.cartan[0][1] == -Scalar(0, mpq(1, 2), 2)
        assert B2.d == 2
        assert CoxeterSystem.preset("Dinf").cartan[0][1] == -1
        assert CoxeterSystem.preset("H3").d == 5

    def test_validation(self):
        with pytest.raises(InputError):
            CoxeterSystem([[1, 3], [2, 1]])
        with pytest.raises(InputError):
            CoxeterSystem([[2, 3], [3, 1]])
        with pytest.raises(FieldTowerUnsupported):
            CoxeterSystem([[1, 4, 2], [4, 1, 6], [2, 6, 1]])
        with pytest.raises(FieldMismatch):
            CoxeterSystem.preset("B2", field="rational")
        with pytest.raises(InputError):
            CoxeterSystem.preset("Z9")

    def test_non_whitelisted_warns(self):
        with pytest.warns(UserWarning):
            CoxeterSystem([[1, 3, 3], [3, 1, 3], [3, 3, 1]])

    def test_json_input(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps({"rank": 2, "m": [[1, 0], [0, 1]]}))
        system = CoxeterSystem.resolve(str(path))
        assert system.m[0][1] == 0 and system.d == 0

    def test_parse_and_format(self):
        A2 = CoxeterSystem.preset("A2")
        assert A2.parse_word("sts") == (0, 1, 0)
        assert A2.parse_word("010") == (0, 1, 0)
        assert A2.parse_word("e") == ()
        assert A2.format_word((1, 0)) == "ts"
        with pytest.raises(InputError):
            A2.parse_word("sxz")


class TestBall:
    @pytest.mark.parametrize("name, size", sorted(FINITE.items()))
    def test_finite_sizes(self, name, size):
        u = ball(name)
        assert len(u) == size and u.complete

    def test_examples(self):
        u = ball("A2", 3)
        assert len(u) == 6 and u.complete
        u = ball("A3", 6)
        assert len(u) == 24 and u.complete
        u = ball("Dinf", 4)
        assert len(u) == 9 and not u.complete

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_ball(CoxeterSystem.preset("A3"), 6, cap=10)

    def test_leaving_the_ball(self):
        u = ball("Dinf", 3)
        with pytest.raises(BallExceeded):
            u.element((0, 1, 0, 1))


class TestNormalForm:
    def test_examples(self):
        u = ball("A2")
        assert normal_form(u, (0, 0)) == ()
        assert normal_form(u, (1, 0, 1)) == (0, 1, 0)
        assert normal_form(u, (0,)) == (0,)

    @pytest.mark.parametrize("name", sorted(FINITE))
    def test_canonical_is_shortlex_least(self, name):
        u = ball(name)
        for x in range(len(u)):
            words = u.reduced_words(x)
            assert u.words[x] == min(words)
            assert all(len(w) == u.lengths[x] for w in words)

    @pytest.mark.parametrize("name", ["A3", "B3", "G2"])
    def test_length_counts_inversions(self, name):
        u = ball(name)
        system = u.system
        n = system.rank
        roots = {tuple(mpq(int(i == s)) for i in range(n)) for s in range(n)}
        frontier = list(roots)
        while frontier:
            new = []
            for r in frontier:
                for s in range(n):
                    img = tuple(system.reflect(s, list(r)))
                    if img not in roots and all(sign(c) >= 0 for c in img):
                        roots.add(img)
                        new.append(img)
            frontier = new
        for x in range(len(u)):
            count = 0
            for r in roots:
                vec = list(r)
                for s in reversed(u.words[x]):
                    vec = system.reflect(s, vec)
                count += any(sign(c) < 0 for c in vec)
            assert count == u.lengths[x]

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 2), max_size=10))
    def test_random_words_in_A3(self, word):
        u = ball("A3")
        nf = normal_form(u, word)
        assert u.element(nf) == u.element(word)
        assert len(nf) <= len(word) and len(nf) % 2 == len(word) % 2


class TestBruhat:
    def test_examples(self):
        u = ball("A2")
        e, s, sts = u.element(()), u.element((0,)), u.element((0, 1, 0))
        assert u.bruhat_leq(e, sts) and u.bruhat_leq(s, sts)
        assert not u.bruhat_leq(u.element((0, 1)), u.element((1, 0)))

    @pytest.mark.parametrize("name, L", [("A2", 3), ("A3", 6), ("B2", 4), ("B3", 9), ("G2", 6), ("Dinf", 6)])
    def test_agrees_with_subword_oracle(self, name, L):
        u = ball(name, L)
        for w in range(len(u)):
            below = subword_products(u, u.words[w])
            assert below == set(u.lower_interval(w))
            for x in range(len(u)):
                assert u.bruhat_leq(x, w) == (x in below)
                assert u.bruhat_leq_subword(x, w) == (x in below)


class TestBraids:
    def test_examples(self):
        u = ball("A2")
        assert braid_path(u, (0, 1, 0), (0, 1, 0)) == []
        assert braid_path(u, (0, 1, 0), (1, 0, 1)) == [(0, 0, 1, (1, 0, 1))]
        b2 = ball("B2")
        assert len(braid_path(b2, (0, 1, 0, 1), (1, 0, 1, 0))) == 1

    def test_not_same_element(self):
        u = ball("A2")
        with pytest.raises(NotSameElement):
            braid_path(u, (0, 1), (1, 0))

    @pytest.mark.parametrize("name", ["A3", "B3", "H3"])
    def test_matsumoto_connectivity(self, name):
        u = ball(name, 6)
        for x in range(len(u)):
            words = u.reduced_words(x)
            first = words[0]
            for w in words:
                path = braid_path(u, first, w)
                cur = first
                for pos, a, b, nxt in path:
                    m = u.system.m[a][b]
                    assert cur[pos:pos + m] == tuple(a if i % 2 == 0 else b for i in range(m))
                    cur = nxt
                assert cur == w

    def test_path_is_deterministic(self):
        u = ball("A3")
        w1, w2 = (0, 1, 0, 2, 1, 0), (2, 1, 2, 0, 1, 2)
        assert u.element(w1) == u.element(w2)
        assert braid_path(u, w1, w2) == braid_path(u, w1, w2)


class TestLedger:
    def test_seed_zero_is_canonical(self):
        u = ball("B3")
        ledger = ChoiceLedger(u, 0)
        assert all(ledger.rexp(x) == u.words[x] for x in range(len(u)))

    @pytest.mark.parametrize("seed", [1, 2, 7])
    def test_alternate_rexps_are_reduced(self, seed):
        u = ball("B3")
        ledger = ChoiceLedger(u, seed)
        for x in range(len(u)):
            word = ledger.rexp(x)
            assert u.element(word) == x and len(word) == u.lengths[x]
        assert ledger.reverse_braids == bool(seed % 2)
