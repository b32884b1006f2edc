"""Largest leaves, the embedding Phi between cell modules, and the monotonicity scan."""

from __future__ import annotations

from dataclasses import dataclass

from .bsbim import coefficient_of_one  # noqa: F401  (re-exported)
from .errors import CrossCheckFailed, NotComparable, UniquenessViolation
from .hecke import to_P
from .leaves import DoubleLeafBasis, Leaf
from .linalg import matmul, rank
from .parallel import pmap


def largest_leaf(session, v_word, u: int) -> Leaf:
    """The unique leaf of the reduced word v_word ending at u with degree l(v) - l(u)."""
    U = session.universe
    v_word = tuple(v_word)
    v = U.element(v_word)
    if not U.bruhat_leq(u, v):
        raise NotComparable(f"{session.fmt(u)} is not below {session.fmt(v)}")
    top = U.lengths[v] - U.lengths[u]
    tree = session.tree(v_word)
    hits = [leaf for leaf in tree.leaves_to(u) if leaf.degree == top]
    if len(hits) != 1:
        raise UniquenessViolation(f"{len(hits)} leaves of maximal degree from {v_word} to {session.fmt(u)}")
    for leaf in tree.leaves_to(u):
        if leaf.degree > top or (top - leaf.degree) % 2:
            raise UniquenessViolation("leaf degree exceeds the length difference or has the wrong parity")
    leaf = hits[0]
    if any(leaf.j_seq) or leaf.n_m - leaf.n_j != leaf.degree:
        raise UniquenessViolation("the largest leaf uses a j-step")
    return leaf


@dataclass
class PhiMap:
    """Matrix of Phi from Delta(v) (columns) to Delta(u) (rows), of degree ``shift``."""

    u: int
    v: int
    w_word: tuple
    matrix: list
    shift: int
    rows: list  # degrees of the leaves indexing rows
    cols: list

    def is_homogeneous(self) -> bool:
        return all(
            not self.matrix[i][j] or self.rows[i] == self.cols[j] + self.shift
            for i in range(len(self.rows))
            for j in range(len(self.cols))
        )


def build_phi(algebra, u: int, v: int, cross_check: bool = True) -> PhiMap:
    """Phi(beta_v o l) = beta_u o G o l in the standard-leaf bases, mod R+.

    G is the largest leaf from the word of v down to u.  With ``cross_check``
    the same matrix is read off a double-leaf expansion of G o l in
    Hom(BS(w), BS(u)), keeping only coefficients that factor through u.
    """
    session = algebra.session
    U = session.universe
    if not (U.bruhat_leq(u, v) and U.bruhat_leq(v, algebra.w)):
        raise NotComparable("Phi needs u <= v <= w")
    tree = algebra.tree
    G = largest_leaf(session, tree.target_word(v), u)
    if G.target_word != tree.target_word(u):
        raise CrossCheckFailed("largest leaf and cell module disagree on the word of u")
    src, dst = algebra.cell(v), algebra.cell(u)
    d = algebra.d
    g_row = G.const[0]
    cols = []
    for leaf in src.leaves:
        row = matmul([g_row], leaf.const, d)[0]
        cols.append(dst.coordinates(row))
    n_rows, n_cols = len(dst), len(src)
    P = [[cols[j][i] for j in range(n_cols)] for i in range(n_rows)]
    phi = PhiMap(u, v, algebra.w_word, P, U.lengths[v] - U.lengths[u], dst.degrees, src.degrees)
    if not phi.is_homogeneous():
        raise CrossCheckFailed("Phi is not homogeneous of the expected degree")
    if cross_check and u != v:
        _cross_check_phi(algebra, phi, G)
    return phi


def _cross_check_phi(algebra, phi: PhiMap, G: Leaf) -> None:
    session = algebra.session
    u_word = G.target_word
    basis = DoubleLeafBasis(session, algebra.w_word, u_word)
    src, dst = algebra.cell(phi.v), algebra.cell(phi.u)
    for j, leaf in enumerate(src.leaves):
        coords = basis.expand_constant(basis.product(G.const, leaf.const))
        for i, g in enumerate(dst.leaves):
            # through u the upper leaf is the identity of u's word
            k = basis.find(phi.u, (0,) * len(u_word), g.j_seq)
            if coords[k] != phi.matrix[i][j]:
                raise CrossCheckFailed("Phi differs between the standard-leaf and double-leaf routes")


def check_intertwines(phi: PhiMap, algebra) -> bool:
    """P * A_v(a) == A_u(a) * P for every basis element a of the algebra."""
    P = phi.matrix
    src, dst = algebra.cell(phi.v), algebra.cell(phi.u)
    d = algebra.d
    if not P or not P[0]:
        return True
    for a in range(algebra.N):
        if matmul(P, src.action(a), d) != matmul(dst.action(a), P, d):
            return False
    return True


def check_injective(phi: PhiMap, d: int = 0) -> bool:
    return rank(phi.matrix, d) == len(phi.cols)


def graded_embedding_ok(algebra, phi: PhiMap) -> bool:
    """gd Delta(u) - v^shift gd Delta(v) has nonnegative coefficients."""
    diff = algebra.gd_cell(phi.u) - algebra.gd_cell(phi.v).shift(phi.shift)
    return diff.nonnegative()


def certify_phi(algebra, u: int, v: int) -> dict:
    phi = build_phi(algebra, u, v)
    return {
        "u": algebra.session.fmt(u),
        "v": algebra.session.fmt(v),
        "intertwines": check_intertwines(phi, algebra),
        "injective": check_injective(phi, algebra.d),
        "graded": graded_embedding_ok(algebra, phi),
    }


def _scan_w(args):
    universe, kl, w = args
    checked, bad = 0, []
    lw = universe.lengths[w]
    lower = sorted(universe.lower_interval(w), key=universe.sort_key)
    for v in lower:
        hv = kl.h(v, w)
        Pv = to_P(hv, lw - universe.lengths[v])
        for u in lower:
            if not universe.bruhat_leq(u, v):
                continue
            checked += 1
            shift = universe.lengths[v] - universe.lengths[u]
            h_diff = kl.h(u, w) - hv.shift(shift)
            P_diff = to_P(kl.h(u, w), lw - universe.lengths[u]) - Pv
            if not (h_diff.in_N_v() and P_diff.nonnegative()):
                bad.append(
                    {
                        "u": universe.system.format_word(universe.words[u]),
                        "v": universe.system.format_word(universe.words[v]),
                        "w": universe.system.format_word(universe.words[w]),
                        "h_difference": str(h_diff),
                        "P_difference": P_diff.to_str("q"),
                    }
                )
    return checked, bad


def monotonicity_scan(universe, kl, max_len: int) -> dict:
    """Check h_{u,w} - v^{l(v)-l(u)} h_{v,w} in N[v] and P_{u,w} - P_{v,w} in N[q] for all u <= v <= w."""
    ws = [w for w in sorted(range(len(universe)), key=universe.sort_key) if universe.lengths[w] <= max_len]
    kl.build(ws)
    results = pmap(_scan_w, [(universe, kl, w) for w in ws])
    violations = [b for _, bad in results for b in bad]
    return {
        "elements": len(ws),
        "triples_checked": sum(c for c, _ in results),
        "violations": violations,
    }


__all__ = [
    "PhiMap",
    "largest_leaf",
    "build_phi",
    "check_intertwines",
    "check_injective",
    "graded_embedding_ok",
    "certify_phi",
    "monotonicity_scan",
    "coefficient_of_one",
]
