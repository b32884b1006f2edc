"""Coxeter systems, their geometric representation and a finite ball of elements.

Elements live in a :class:`GroupUniverse`: a breadth-first enumeration of all
elements up to a length cap, with multiplication tables.  Elements are
referred to by integer indices into the universe; index 0 is the identity.
"""

from __future__ import annotations

import json
import random
import warnings
from collections import deque
from pathlib import Path

from gmpy2 import mpq

from .arith import cos_pi_over, sign, surd_of
from .errors import (
    BallExceeded,
    CapExceeded,
    FieldMismatch,
    FieldTowerUnsupported,
    InputError,
    NotSameElement,
    UnsupportedOrder,
)

LETTERS = "stuvwxyz"

_PRESETS = {
    "A1": [[1]],
    "A2": [[1, 3], [3, 1]],
    "A3": [[1, 3, 2], [3, 1, 3], [2, 3, 1]],
    "B2": [[1, 4], [4, 1]],
    "B3": [[1, 4, 2], [4, 1, 3], [2, 3, 1]],
    "G2": [[1, 6], [6, 1]],
    "H3": [[1, 5, 2], [5, 1, 3], [2, 3, 1]],
    "Dinf": [[1, 0], [0, 1]],
}


class CoxeterSystem:
    """A Coxeter matrix together with its symmetric bilinear form B.

    ``m`` uses 0 for infinity.  ``field`` is ``"auto"``, ``"rational"`` or
    ``"quadratic:d"``; the resulting surd is stored in ``d`` (0 when rational).
    """

    def __init__(self, m, name: str | None = None, field: str = "auto"):
        m = [[int(x) for x in row] for row in m]
        n = len(m)
        if n == 0 or any(len(row) != n for row in m):
            raise InputError("Coxeter matrix must be square and nonempty")
        for i in range(n):
            if m[i][i] != 1:
                raise InputError("diagonal entries of a Coxeter matrix must be 1")
            for j in range(n):
                if m[i][j] != m[j][i]:
                    raise InputError("Coxeter matrix must be symmetric")
                if i != j and m[i][j] == 1:
                    raise InputError("off-diagonal entries must be >= 2 or 0 (infinity)")
        self.rank = n
        self.m = m
        self.name = name or "custom"
        forced = _parse_field(field)
        surds = {surd_of(cos_pi_over(m[i][j])) for i in range(n) for j in range(n) if i != j}
        surds.discard(0)
        if len(surds) > 1:
            raise FieldTowerUnsupported(f"orders need several surds {sorted(surds)}")
        need = surds.pop() if surds else 0
        if forced is not None:
            if need and forced != need:
                raise FieldMismatch(f"group needs sqrt({need}) but field is fixed to d={forced}")
            self.d = forced
        else:
            self.d = need
        self.cartan = [
            [mpq(1) if i == j else -cos_pi_over(m[i][j]) for j in range(n)] for i in range(n)
        ]
        self.letters = LETTERS[:n] if n <= len(LETTERS) else None
        self.supported = _is_whitelisted(self)
        if not self.supported:
            warnings.warn(
                f"group {self.name}: the geometric representation may not be reflection "
                "faithful here; results are not certified",
                stacklevel=2,
            )

    @classmethod
    def preset(cls, name: str, field: str = "auto") -> "CoxeterSystem":
        if name in _PRESETS:
            return cls(_PRESETS[name], name=name, field=field)
        if name.startswith("I2(") and name.endswith(")"):
            try:
                k = int(name[3:-1])
            except ValueError:
                raise InputError(f"bad dihedral preset {name!r}") from None
            if k < 2 and k != 0:
                raise InputError("I2(m) needs m >= 2")
            return cls([[1, k], [k, 1]], name=name, field=field)
        raise InputError(f"unknown group preset {name!r}")

    @classmethod
    def from_json(cls, data, field: str = "auto") -> "CoxeterSystem":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        try:
            rank, m = int(data["rank"]), data["m"]
        except (KeyError, TypeError, ValueError):
            raise InputError('Coxeter JSON must look like {"rank": n, "m": [[...]]}') from None
        if len(m) != rank:
            raise InputError("rank does not match the matrix size")
        return cls(m, name=data.get("name"), field=field)

    @classmethod
    def resolve(cls, group: str, field: str = "auto") -> "CoxeterSystem":
        """A preset name or a path to a JSON file."""
        if group in _PRESETS or group.startswith("I2("):
            return cls.preset(group, field)
        path = Path(group)
        if path.exists():
            return cls.from_json(path, field)
        raise InputError(f"unknown group {group!r}")

    def order(self, s: int, t: int) -> int:
        return self.m[s][t]

    def form(self, s: int, vec) -> object:
        """B(alpha_s, vec) for vec given in the simple-root basis."""
        row = self.cartan[s]
        acc = mpq(0)
        for t, c in enumerate(vec):
            if c:
                acc = acc + row[t] * c
        return acc

    def reflect(self, s: int, vec) -> list:
        """vec - 2 B(alpha_s, vec) alpha_s."""
        c = 2 * self.form(s, vec)
        out = list(vec)
        out[s] = out[s] - c
        return out

    def generator_matrix(self, s: int) -> tuple:
        """Matrix of s on V in the simple-root basis, as a tuple of rows."""
        n = self.rank
        cols = [self.reflect(s, [mpq(1) if i == t else mpq(0) for i in range(n)]) for t in range(n)]
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def parse_word(self, text) -> tuple:
        """Parse letters (``"sts"``), digits (``"010"``) or a list of ints; ``"e"`` is empty."""
        if isinstance(text, (list, tuple)):
            word = tuple(int(x) for x in text)
        else:
            text = text.strip().replace(",", "").replace(" ", "")
            if text in ("", "e", "()", "[]"):
                return ()
            if text.isdigit():
                word = tuple(int(ch) for ch in text)
            elif self.letters and all(ch in self.letters for ch in text):
                word = tuple(self.letters.index(ch) for ch in text)
            else:
                raise InputError(f"cannot parse word {text!r} for a rank {self.rank} group")
        if any(not 0 <= x < self.rank for x in word):
            raise InputError(f"generator index out of range in {word}")
        return word

    def format_word(self, word) -> str:
        if not word:
            return "e"
        if self.letters:
            return "".join(self.letters[s] for s in word)
        return ",".join(str(s) for s in word)

    def to_json(self) -> dict:
        return {"name": self.name, "rank": self.rank, "m": self.m, "d": self.d}


def _parse_field(field: str):
    if field in (None, "auto"):
        return None
    if field == "rational":
        return 0
    if field.startswith("quadratic:"):
        try:
            d = int(field.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad field {field!r}") from None
        if d <= 1 or any(d % (p * p) == 0 for p in range(2, int(d**0.5) + 1)):
            raise InputError("quadratic field needs a squarefree d > 1")
        return d
    raise InputError(f"bad field {field!r}")


def _is_whitelisted(system: CoxeterSystem) -> bool:
    """Rank <= 2, or every component has a positive definite form (finite type)."""
    n = system.rank
    if n <= 2:
        return True
    seen, comps = set(), []
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in range(n):
                if b not in seen and system.m[a][b] != 2:
                    seen.add(b)
                    stack.append(b)
        comps.append(sorted(comp))
    for comp in comps:
        if len(comp) <= 2:
            continue
        mat = [[system.cartan[i][j] for j in comp] for i in comp]
        # Gaussian elimination without pivoting: positive definite iff all pivots > 0
        k = len(mat)
        for p in range(k):
            piv = mat[p][p]
            if sign(piv) <= 0:
                return False
            for r in range(p + 1, k):
                f = mat[r][p] / piv
                for c in range(p, k):
                    mat[r][c] = mat[r][c] - f * mat[p][c]
    return True


def _matmul(a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = mpq(0)
            for k in range(n):
                x, y = a[i][k], b[k][j]
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _is_positive_root(col) -> bool:
    for c in col:
        sg = sign(c)
        if sg:
            return sg > 0
    raise ValueError("zero vector is not a root")


class GroupUniverse:
    """All elements of length <= max_length, enumerated breadth first.

    ``words[i]`` is the ShortLex-least reduced expression of element i,
    ``rmul[i][s]`` / ``lmul[i][s]`` give the index of i*s / s*i or ``None``
    when that product leaves the ball.
    """

    DEFAULT_CAP = 200_000

    def __init__(self, system: CoxeterSystem, max_length: int, cap: int | None = None):
        if max_length < 0:
            raise InputError("max_length must be >= 0")
        cap = cap or self.DEFAULT_CAP
        self.system = system
        self.max_length = max_length
        n = system.rank
        gens = [system.generator_matrix(s) for s in range(n)]
        ident = tuple(tuple(mpq(1) if i == j else mpq(0) for j in range(n)) for i in range(n))
        self.words = [()]
        self.lengths = [0]
        self.matrices = [ident]
        index = {ident: 0}
        level = [0]
        complete = True
        for length in range(1, max_length + 2):
            nxt = []
            for g in level:
                mat = self.matrices[g]
                for s in range(n):
                    col = [mat[i][s] for i in range(n)]
                    if not _is_positive_root(col):
                        continue  # s is a right descent
                    if length > max_length:
                        complete = False
                        break
                    h = _matmul(mat, gens[s])
                    if h in index:
                        continue
                    index[h] = len(self.words)
                    self.words.append(self.words[g] + (s,))
                    self.lengths.append(length)
                    self.matrices.append(h)
                    nxt.append(index[h])
                    if len(self.words) > cap:
                        raise CapExceeded(f"more than {cap} elements")
                if not complete:
                    break
            if length > max_length or not nxt:
                break
            level = nxt
        self.complete = complete
        self._index = index
        size = len(self.words)
        self.rmul = [[None] * n for _ in range(size)]
        self.lmul = [[None] * n for _ in range(size)]
        for g in range(size):
            for s in range(n):
                self.rmul[g][s] = index.get(_matmul(self.matrices[g], gens[s]))
                self.lmul[g][s] = index.get(_matmul(gens[s], self.matrices[g]))
        self.by_word = {w: i for i, w in enumerate(self.words)}
        self._leq_cache: dict = {}
        self._lower: dict = {}

    def __len__(self):
        return len(self.words)

    @property
    def identity(self) -> int:
        return 0

    def length(self, x: int) -> int:
        return self.lengths[x]

    def element(self, word) -> int:
        """Index of the product of ``word`` (the normal form)."""
        x = 0
        for s in word:
            y = self.rmul[x][s]
            if y is None:
                raise BallExceeded(
                    f"word {self.system.format_word(word)} leaves the ball of radius {self.max_length}"
                )
            x = y
        return x

    def normal_form(self, word) -> tuple:
        return self.words[self.element(word)]

    def is_reduced(self, word) -> bool:
        return self.lengths[self.element(word)] == len(word)

    def inverse(self, x: int) -> int:
        return self.element(tuple(reversed(self.words[x])))

    def mul(self, x: int, y: int) -> int:
        for s in self.words[y]:
            x = self._step(x, s)
        return x

    def _step(self, x, s):
        y = self.rmul[x][s]
        if y is None:
            raise BallExceeded("product leaves the enumerated ball")
        return y

    def right_descents(self, x: int) -> list[int]:
        n = self.system.rank
        return [s for s in range(n) if not _is_positive_root([self.matrices[x][i][s] for i in range(n)])]

    def left_descents(self, x: int) -> list[int]:
        return self.right_descents(self.inverse(x))

    def is_right_descent(self, x: int, s: int) -> bool:
        n = self.system.rank
        return not _is_positive_root([self.matrices[x][i][s] for i in range(n)])

    def sort_key(self, x: int):
        return (self.lengths[x], self.words[x])

    def bruhat_leq(self, u: int, w: int) -> bool:
        """u <= w via the descent recursion."""
        key = (u, w)
        hit = self._leq_cache.get(key)
        if hit is not None:
            return hit
        lu, lw = self.lengths[u], self.lengths[w]
        if lu > lw:
            res = False
        elif lu == lw:
            res = u == w
        elif u == 0:
            res = True
        else:
            s = self.words[w][0]
            sw = self.lmul[w][s]
            su = self.lmul[u][s]
            if su is not None and self.lengths[su] < lu:
                res = self.bruhat_leq(su, sw)
            else:
                res = self.bruhat_leq(u, sw)
        self._leq_cache[key] = res
        return res

    def lower_interval(self, w: int) -> frozenset:
        """All x <= w, from products of subwords of the canonical word of w."""
        hit = self._lower.get(w)
        if hit is None:
            seen = {0}
            for s in self.words[w]:
                seen |= {self.rmul[x][s] for x in seen}
            hit = frozenset(seen)
            self._lower[w] = hit
        return hit

    def bruhat_leq_subword(self, u: int, w: int) -> bool:
        """Oracle: u <= w iff u is the product of a subword of the canonical word of w."""
        return u in self.lower_interval(w)

    def interval(self, u: int, w: int) -> list[int]:
        return sorted(
            (x for x in self.lower_interval(w) if self.bruhat_leq(u, x)), key=self.sort_key
        )

    def elements_up_to(self, length: int) -> list[int]:
        return [i for i in range(len(self.words)) if self.lengths[i] <= length]

    def reduced_words(self, x: int) -> list[tuple]:
        """All reduced expressions of x, found by exhaustive descent search."""
        out = []

        def grow(y, suffix):
            if y == 0:
                out.append(suffix)
                return
            for s in self.right_descents(y):
                grow(self.rmul[y][s], (s,) + suffix)

        grow(x, ())
        return sorted(set(out))

    def braid_neighbors(self, word: tuple) -> list[tuple]:
        """All (position, resulting word) obtained by one braid move, sorted."""
        out = []
        m = self.system.m
        n = len(word)
        for p in range(n - 1):
            a, b = word[p], word[p + 1]
            k = m[a][b]
            if a == b or k == 0 or p + k > n:
                continue
            if all(word[p + i] == (a if i % 2 == 0 else b) for i in range(k)):
                repl = tuple(b if i % 2 == 0 else a for i in range(k))
                out.append((p, word[:p] + repl + word[p + k:]))
        out.sort()
        return out

    def braid_search(self, start: tuple, goal, reverse: bool = False):
        """BFS over the braid graph; ``goal`` is a predicate on words.

        Returns the list of moves (position, a, b, resulting word) to the first
        word reached that satisfies the predicate.
        """
        if goal(start):
            return []
        parent = {start: None}
        queue = deque([start])
        while queue:
            word = queue.popleft()
            nbrs = self.braid_neighbors(word)
            if reverse:
                nbrs.reverse()
            for pos, nxt in nbrs:
                if nxt in parent:
                    continue
                parent[nxt] = (word, pos)
                if goal(nxt):
                    return _unwind(parent, nxt)
                queue.append(nxt)
        return None


def _unwind(parent, word):
    moves = []
    while parent[word] is not None:
        prev, pos = parent[word]
        moves.append((pos, prev[pos], prev[pos + 1], word))
        word = prev
    moves.reverse()
    return moves


def braid_path(universe: GroupUniverse, w1, w2, reverse: bool = False) -> list:
    """Shortest sequence of braid moves turning reduced word w1 into w2.

    Each move is (position, a, b, resulting word): the alternating factor
    starting with a at ``position`` is replaced by the one starting with b.
    """
    w1, w2 = tuple(w1), tuple(w2)
    x1, x2 = universe.element(w1), universe.element(w2)
    if x1 != x2 or len(w1) != len(w2) or universe.lengths[x1] != len(w1):
        raise NotSameElement("braid paths join reduced expressions of one element")
    path = universe.braid_search(w1, lambda w: w == w2, reverse=reverse)
    if path is None:  # impossible for reduced words (Matsumoto)
        raise NotSameElement("no braid path found")
    return path


def normal_form(universe: GroupUniverse, word) -> tuple:
    return universe.normal_form(word)


def enumerate_ball(system: CoxeterSystem, L: int, cap: int | None = None) -> GroupUniverse:
    return GroupUniverse(system, L, cap)


class ChoiceLedger:
    """Every non-canonical choice made while building light leaves.

    Seed 0 uses the ShortLex-least reduced expressions and the natural braid
    tie-break.  Any other seed draws a generator order from
    ``random.Random(seed)``; reduced expressions become lexicographically
    least for that order, and odd seeds also reverse the braid tie-break.
    """

    def __init__(self, universe: GroupUniverse, seed: int = 0):
        self.universe = universe
        self.seed = seed
        n = universe.system.rank
        order = list(range(n))
        if seed:
            random.Random(seed).shuffle(order)
        self.order = order
        self.reverse_braids = bool(seed % 2)
        self._rank = {s: i for i, s in enumerate(order)}
        self._rexp: dict = {}

    def rexp(self, x: int) -> tuple:
        """The fixed reduced expression of x."""
        hit = self._rexp.get(x)
        if hit is None:
            if self.seed == 0:
                hit = self.universe.words[x]
            else:
                u = self.universe
                word, y = [], x
                while y != 0:
                    s = min(u.left_descents(y), key=self._rank.__getitem__)
                    word.append(s)
                    y = u.lmul[y][s]
                hit = tuple(word)
            self._rexp[x] = hit
        return hit

    def braid_path(self, w1, w2) -> list:
        return braid_path(self.universe, w1, w2, reverse=self.reverse_braids)

    def path_to_suffix(self, word, s: int) -> list:
        """Braid moves from reduced ``word`` to the nearest word ending in s."""
        path = self.universe.braid_search(
            tuple(word), lambda w: w[-1] == s, reverse=self.reverse_braids
        )
        if path is None:
            raise NotSameElement("no reduced expression ends with the requested letter")
        return path

    def to_json(self) -> dict:
        return {"seed": self.seed, "generator_order": self.order, "reverse_braids": self.reverse_braids}


__all__ = [
    "CoxeterSystem",
    "GroupUniverse",
    "ChoiceLedger",
    "braid_path",
    "normal_form",
    "enumerate_ball",
    "UnsupportedOrder",
]
