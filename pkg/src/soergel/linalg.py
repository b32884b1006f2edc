"""Exact linear algebra over Q and Q(sqrt d).

Dense work is delegated to python-flint's ``fmpq_mat``.  A matrix over
Q(sqrt d) is handled through the ring embedding that sends a + b*sqrt(d) to
the 2x2 rational block [[a, d*b], [b, a]]; ranks over the extension are half
the rational ranks of the embedded matrix.  Sparse systems (used to solve
for braid morphisms) are eliminated in pure Python over field elements.
"""

from __future__ import annotations

from flint import fmpq, fmpq_mat
from gmpy2 import mpq

from .arith import Scalar, _mk, field_inverse
from .errors import NonUniqueSolution, NoSolution, NotInSpan


def to_fmpq(x) -> fmpq:
    x = mpq(x) if not isinstance(x, type(mpq(0))) else x
    return fmpq(int(x.numerator), int(x.denominator))


def from_fmpq(f) -> mpq:
    return mpq(int(f.p), int(f.q))


def _parts(x):
    if isinstance(x, Scalar):
        return x.a, x.b
    return x, 0


class Embedding:
    """Translate field vectors and matrices to rational matrices.

    ``d == 0`` is the identity embedding.  Otherwise every field entry becomes
    a 2x2 block, so an m x n field matrix becomes a 2m x 2n rational one.
    """

    def __init__(self, d: int = 0):
        self.d = d
        self.k = 2 if d else 1

    def matrix(self, rows: int, cols: int, entries) -> fmpq_mat:
        """Build from a sparse iterable of ((i, j), value)."""
        k, d = self.k, self.d
        flat = [0] * (rows * k * cols * k)
        width = cols * k
        for (i, j), x in entries:
            if not x:
                continue
            if k == 1:
                flat[i * width + j] = to_fmpq(x)
            else:
                a, b = _parts(x)
                a, b = to_fmpq(a), to_fmpq(b)
                r, c = 2 * i, 2 * j
                flat[r * width + c] = a
                flat[r * width + c + 1] = b * d
                flat[(r + 1) * width + c] = b
                flat[(r + 1) * width + c + 1] = a
        return fmpq_mat(rows * k, cols * k, flat)

    def dense(self, rows: list[list]) -> fmpq_mat:
        nrow, ncol = len(rows), len(rows[0]) if rows else 0
        return self.matrix(
            nrow, ncol, (((i, j), x) for i, row in enumerate(rows) for j, x in enumerate(row))
        )

    def decode(self, mat: fmpq_mat) -> list[list]:
        """Inverse of :meth:`dense` (reads the first column of each block)."""
        k = self.k
        out = []
        for i in range(mat.nrows() // k):
            row = []
            for j in range(mat.ncols() // k):
                a = from_fmpq(mat[k * i, k * j])
                if k == 1:
                    row.append(a)
                else:
                    row.append(_mk(a, from_fmpq(mat[k * i + 1, k * j]), self.d))
            out.append(row)
        return out


def matmul(a: list[list], b: list[list], d: int = 0) -> list[list]:
    emb = Embedding(d)
    if not a or not b or not b[0]:
        return [[mpq(0)] * (len(b[0]) if b else 0) for _ in a]
    return emb.decode(emb.dense(a) * emb.dense(b))


def rank(rows: list[list], d: int = 0) -> int:
    if not rows or not rows[0]:
        return 0
    emb = Embedding(d)
    return emb.dense(rows).rank() // emb.k


def _pivot_columns(rref_mat: fmpq_mat, r: int) -> list[int]:
    piv, col, ncols = [], 0, rref_mat.ncols()
    for i in range(r):
        while col < ncols and rref_mat[i, col] == 0:
            col += 1
        piv.append(col)
        col += 1
    return piv


class ColumnSolver:
    """Solve A x = b for a fixed matrix A with independent columns.

    ``columns`` is a list of sparse vectors (dicts index -> field element) of
    ambient length ``m``.  Coordinates come from a square invertible set of
    pivot rows; unless told otherwise the full reconstruction A x = b is
    verified as well.
    """

    def __init__(self, columns: list[dict], m: int, d: int = 0):
        self.emb = Embedding(d)
        self.d, self.m, self.n = d, m, len(columns)
        self.columns = columns
        self._square = None
        self.rank = 0
        if self.n == 0:
            return
        k = self.emb.k
        ea = self.emb.matrix(
            m, self.n, (((i, j), x) for j, col in enumerate(columns) for i, x in col.items())
        )
        red, r = ea.transpose().rref()
        self.rank = r // k
        if r != self.n * k:
            return
        self._erows = _pivot_columns(red, r)
        width = self.n * k
        self._square = fmpq_mat(
            r, width, [ea[er, c] for er in self._erows for c in range(width)]
        )

    @property
    def independent(self) -> bool:
        return self.rank == self.n

    @property
    def pivot_rows(self) -> list[int]:
        """Field-level row indices touched by the pivot system."""
        k = self.emb.k
        return sorted({er // k for er in self._erows})

    def _rhs_matrix(self, vectors: list[dict]) -> fmpq_mat:
        k = self.emb.k
        width = len(vectors) * k
        flat = [0] * (len(self._erows) * width)
        where: dict = {}
        for pos, er in enumerate(self._erows):
            where.setdefault(er // k, []).append((pos, er % k))
        for c, vec in enumerate(vectors):
            for i, x in vec.items():
                if not x or i not in where:
                    continue
                for pos, part in where[i]:
                    if k == 1:
                        flat[pos * width + c] = to_fmpq(x)
                    else:
                        a, b = _parts(x)
                        first, second = (a, b * self.d) if part == 0 else (b, a)
                        flat[pos * width + 2 * c] = to_fmpq(first)
                        flat[pos * width + 2 * c + 1] = to_fmpq(second)
        return fmpq_mat(len(self._erows), width, flat)

    def solve_many(self, vectors: list[dict], verify: bool = True) -> list[list]:
        """Coordinates of each vector; raises NotInSpan when one is outside the span."""
        if not vectors:
            return []
        if self.n == 0:
            for vec in vectors:
                if any(vec.values()):
                    raise NotInSpan("nonzero vector against an empty basis")
            return [[] for _ in vectors]
        if not self.independent:
            raise NotInSpan("basis columns are linearly dependent")
        sol = self._square.solve(self._rhs_matrix(vectors))
        coords = self.emb.decode(sol)
        out = [[coords[i][c] for i in range(self.n)] for c in range(len(vectors))]
        if verify:
            for vec, x in zip(vectors, out):
                if self.combine(x) != {i: v for i, v in vec.items() if v}:
                    raise NotInSpan("vector is not in the span of the basis")
        return out

    def solve(self, vector: dict, verify: bool = True) -> list:
        return self.solve_many([vector], verify)[0]

    def combine(self, coeffs) -> dict:
        out: dict = {}
        for c, col in zip(coeffs, self.columns):
            if not c:
                continue
            for i, x in col.items():
                out[i] = out[i] + c * x if i in out else c * x
        return {i: x for i, x in out.items() if x}


def solve_sparse(equations, unknowns, priority=None, stop_when_determined=False) -> dict:
    """Unique solution of a sparse linear system over the session field.

    ``equations`` yields pairs (row, rhs) with row a dict unknown -> coefficient.
    Pivot rows are kept fully reduced, with an occurrence index so that a new
    pivot is only eliminated from the rows that mention it.  ``priority``
    ranks unknowns; the highest-ranked unknown of a row becomes its pivot,
    which keeps fill-in low for systems that are triangular in that ranking.
    Raises NoSolution if the system is inconsistent and NonUniqueSolution if
    an unknown stays free.  With ``stop_when_determined`` the remaining
    equations are not read once every unknown has a pivot, so the caller must
    verify the solution itself.
    """
    total = len(set(unknowns))
    pivots: dict = {}
    occurs: dict = {}  # unknown -> set of pivot keys whose row mentions it
    for row, rhs in equations:
        row = {u: c for u, c in row.items() if c}
        for u in [u for u in row if u in pivots]:
            c = row.pop(u)
            prow, prhs = pivots[u]
            for v, pc in prow.items():
                nv = row.get(v, 0) - c * pc
                if nv:
                    row[v] = nv
                else:
                    row.pop(v, None)
            rhs = rhs - c * prhs
        if not row:
            if rhs:
                raise NoSolution("inconsistent linear system")
            continue
        u = max(row, key=priority) if priority else next(iter(row))
        inv = field_inverse(row.pop(u))
        row = {v: c * inv for v, c in row.items()}
        rhs = rhs * inv
        for pu in occurs.pop(u, ()):
            prow, prhs = pivots[pu]
            c = prow.pop(u)
            for v, rc in row.items():
                nv = prow.get(v, 0) - c * rc
                if nv:
                    if v not in prow:
                        occurs.setdefault(v, set()).add(pu)
                    prow[v] = nv
                elif v in prow:
                    del prow[v]
                    occurs[v].discard(pu)
            pivots[pu] = (prow, prhs - c * rhs)
        for v in row:
            occurs.setdefault(v, set()).add(u)
        pivots[u] = (row, rhs)
        if stop_when_determined and len(pivots) == total:
            break
    free = [u for u in unknowns if u not in pivots]
    if free or any(row for row, _ in pivots.values()):
        raise NonUniqueSolution(f"{len(free)} unknowns are not determined")
    return {u: rhs for u, (row, rhs) in pivots.items()}
