"""Finite-dimensional algebras with a commutative product and a bracket.

Structure constants are 3-tensors ``T[i, j, k]`` = coefficient of ``b_k`` in
``b_i * b_j``. Elements are coefficient vectors (numpy int64) over the basis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import exactla as la
from .errors import DecompositionError, UsageError
from .ffield import check_prime, inv_mod

__all__ = [
    "TwoProductAlgebra",
    "IdentityReport",
    "IDENTITIES",
    "check_identity",
    "evaluate_identity",
    "operator_relation_residual",
    "ideal_closure",
    "SimplicityVerdict",
    "simplicity",
    "find_unit",
    "nilpotency_index",
    "DecompositionResult",
    "decompose",
    "half_derivations",
    "tp_structures_on",
    "cocycle_check",
    "direct_sum",
    "change_basis",
    "zero_algebra",
    "sl2",
    "subalgebra_on",
]


@dataclass(frozen=True, eq=False)
class TwoProductAlgebra:
    p: int
    circ: np.ndarray
    bracket: np.ndarray
    basis_labels: tuple = ()
    tp_verified: bool = False

    def __post_init__(self):
        check_prime(self.p)
        circ = la.reduce(self.circ, self.p)
        bracket = la.reduce(self.bracket, self.p)
        d = circ.shape[0]
        if circ.shape != (d, d, d) or bracket.shape != (d, d, d):
            raise UsageError("structure tensors must both have shape (dim, dim, dim)")
        object.__setattr__(self, "circ", circ)
        object.__setattr__(self, "bracket", bracket)
        labels = tuple(self.basis_labels) or tuple(f"b{i}" for i in range(d))
        if len(labels) != d:
            raise UsageError("need one label per basis element")
        object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return self.circ.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TwoProductAlgebra):
            return NotImplemented
        return (
            self.p == other.p
            and np.array_equal(self.circ, other.circ)
            and np.array_equal(self.bracket, other.bracket)
        )

    __hash__ = None

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def element(self, coeffs) -> np.ndarray:
        v = la.reduce(coeffs, self.p).reshape(-1)
        if v.shape[0] != self.dim:
            raise UsageError(f"element has length {v.shape[0]}, algebra has dim {self.dim}")
        return v

    def tensor(self, which: str) -> np.ndarray:
        if which == "circ":
            return self.circ
        if which == "bracket":
            return self.bracket
        raise UsageError(f"product selector must be 'circ' or 'bracket', got {which!r}")

    def product(self, x, y, which: str = "circ") -> np.ndarray:
        t = self.tensor(which)
        return la.reduce(np.einsum("i,j,ijk->k", x, y, t), self.p)

    def mul(self, x, y):
        return self.product(x, y, "circ")

    def br(self, x, y):
        return self.product(x, y, "bracket")

    def left(self, x, which: str = "circ") -> np.ndarray:
        """Matrix of y -> x*y (P_x for circ, Q_x for bracket)."""
        t = self.tensor(which)
        return la.reduce(np.einsum("i,ijk->kj", x, t), self.p)

    def left_all(self, which: str = "circ") -> np.ndarray:
        """Stack of left multiplications by every basis vector, shape (d, d, d)."""
        return np.transpose(self.tensor(which), (0, 2, 1)).copy()

    def power_times(self, x, k: int, y) -> np.ndarray:
        """x^k y for the commutative product, with x^0 y = y."""
        out = self.element(y)
        for _ in range(k):
            out = self.mul(x, out)
        return out

    def with_flag(self, tp_verified: bool) -> "TwoProductAlgebra":
        return replace(self, tp_verified=tp_verified)


def zero_algebra(p: int, dim: int) -> TwoProductAlgebra:
    z = np.zeros((dim, dim, dim), dtype=np.int64)
    return TwoProductAlgebra(p, z, z.copy(), tp_verified=True)


def sl2(p: int) -> TwoProductAlgebra:
    """sl_2 with basis (e, h, f) and zero commutative product."""
    b = np.zeros((3, 3, 3), dtype=np.int64)
    e, h, f = 0, 1, 2
    b[h, e, e], b[e, h, e] = 2, -2
    b[h, f, f], b[f, h, f] = -2, 2
    b[e, f, h], b[f, e, h] = 1, -1
    return TwoProductAlgebra(p, np.zeros_like(b), b, ("e", "h", "f"))


def direct_sum(*algebras: TwoProductAlgebra) -> TwoProductAlgebra:
    p = algebras[0].p
    if any(a.p != p for a in algebras):
        raise UsageError("direct summands must share the characteristic")
    d = sum(a.dim for a in algebras)
    circ = np.zeros((d, d, d), dtype=np.int64)
    br = np.zeros((d, d, d), dtype=np.int64)
    labels = []
    off = 0
    for idx, a in enumerate(algebras):
        s = slice(off, off + a.dim)
        circ[s, s, s] = a.circ
        br[s, s, s] = a.bracket
        labels += [f"{lab}@{idx}" for lab in a.basis_labels]
        off += a.dim
    return TwoProductAlgebra(p, circ, br, tuple(labels), all(a.tp_verified for a in algebras))


def _transform(t: np.ndarray, s: np.ndarray, s_inv: np.ndarray, p: int) -> np.ndarray:
    # new_b_i = sum_a S[a, i] b_a ; coefficient tensors in the new basis
    t1 = la.tensordot(s, t, ([0], [0]), p)  # (i, b, k)
    t2 = la.tensordot(t1, s, ([1], [0]), p)  # (i, k, j)
    t3 = la.tensordot(t2, s_inv, ([1], [1]), p)  # (i, j, k')
    return t3


def change_basis(a: TwoProductAlgebra, s: np.ndarray) -> TwoProductAlgebra:
    """Re-express ``a`` in the basis whose i-th vector is column i of ``s``."""
    s = la.reduce(s, a.p)
    cols = [la.solve(s, a.basis_vector(i), a.p) for i in range(a.dim)]
    if any(c is None for c in cols):
        raise UsageError("change of basis matrix is singular")
    s_inv = np.array(cols).T
    return TwoProductAlgebra(
        a.p,
        _transform(a.circ, s, s_inv, a.p),
        _transform(a.bracket, s, s_inv, a.p),
        tp_verified=a.tp_verified,
    )


# --- identity engine -----------------------------------------------------------


@dataclass
class IdentityReport:
    identity_id: str
    holds: bool
    witness: tuple | None = None
    residual: np.ndarray | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _compose(t_outer: np.ndarray, t_inner: np.ndarray, p: int) -> np.ndarray:
    """(x*y)#z as a tensor (x, y, z, k)."""
    return la.tensordot(t_inner, t_outer, ([2], [0]), p)


def _res_commutativity(a, t):
    return (t - np.transpose(t, (1, 0, 2))) % a.p


def _res_anticommutativity(a, t):
    return (t + np.transpose(t, (1, 0, 2))) % a.p


def _res_associativity(a, t):
    p = a.p
    left = _compose(t, t, p)  # (x y) z
    right = la.tensordot(t, t, ([1], [2]), p)  # y z -> (x, [y z], k) as (x, k, y, z)
    right = np.transpose(right, (0, 2, 3, 1))
    return (left - right) % p


def _res_jacobi(a, t):
    p = a.p
    xyz = _compose(t, t, p)  # [[x,y],z]
    return (xyz + np.transpose(xyz, (1, 2, 0, 3)) + np.transpose(xyz, (2, 0, 1, 3))) % p


def _res_transposed_leibniz(a, t=None):
    p, c, b = a.p, a.circ, a.bracket
    # 2 x o [y,z]
    t1 = la.tensordot(b, c, ([2], [1]), p)  # (y, z, x, k)
    t1 = np.transpose(t1, (2, 0, 1, 3))
    # [x o y, z]
    t2 = _compose(b, c, p)  # (x, y, z, k)
    # [y, x o z]
    t3 = la.tensordot(c, b, ([2], [1]), p)  # (x, z, y, k)
    t3 = np.transpose(t3, (0, 2, 1, 3))
    return (2 * t1 - t2 - t3) % p


def _res_lemma21(a, t=None):
    """[ux, vy] - uv[x, y] - xy[u, v] over (u, v, x, y)."""
    p, c, b = a.p, a.circ, a.bracket
    cb = la.tensordot(c, b, ([2], [0]), p)  # (u, x, n, k) = [ux, b_n]
    lhs = la.tensordot(cb, c, ([2], [2]), p)  # (u, x, k, v, y)
    lhs = np.transpose(lhs, (0, 3, 1, 4, 2))
    cc = la.tensordot(c, c, ([2], [0]), p)  # (u, v, n, k) = (uv) o b_n
    t2 = la.tensordot(cc, b, ([2], [2]), p)  # (u, v, k, x, y)
    t2 = np.transpose(t2, (0, 1, 3, 4, 2))
    t3 = np.transpose(t2, (2, 3, 0, 1, 4))  # xy[u,v]
    return (lhs - t2 - t3) % p


def _res_lemma22(a, t=None):
    """2 (xy)[z, w] - [xz, y w] - [yz, x w] over (x, y, z, w)."""
    p, c, b = a.p, a.circ, a.bracket
    zw = b
    t1 = la.tensordot(c, la.tensordot(zw, c, ([2], [1]), p), ([2], [2]), p)
    # t1: (x, y, z, w, k)
    cb = la.tensordot(c, b, ([2], [0]), p)  # (x, z, n, k): [xz, b_n]
    t2 = la.tensordot(cb, c, ([2], [2]), p)  # (x, z, k, y, w)
    t2 = np.transpose(t2, (0, 3, 1, 4, 2))  # (x, y, z, w, k)
    t3 = np.transpose(t2, (1, 0, 2, 3, 4))
    return (2 * t1 - t2 - t3) % p


_TENSOR_IDENTITIES = {
    "commutativity": ("circ", _res_commutativity),
    "associativity": ("circ", _res_associativity),
    "anticommutativity": ("bracket", _res_anticommutativity),
    "jacobi": ("bracket", _res_jacobi),
    "transposed_leibniz": (None, _res_transposed_leibniz),
    "lemma21": (None, _res_lemma21),
    "lemma22": (None, _res_lemma22),
}

IDENTITIES = tuple(_TENSOR_IDENTITIES) + ("lemma22_<k>", "lemma23_<k>_<s>")
TP_AXIOMS = ("commutativity", "associativity", "anticommutativity", "jacobi", "transposed_leibniz")

_OPERATOR_RE = re.compile(r"^lemma22_(\d+)$|^lemma23_(\d+)_(\d+)$")


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k) if 0 <= k <= n else 0


def operator_relation_residual(a: TwoProductAlgebra, identity_id: str, x, y) -> np.ndarray:
    """Residual operator of the power relations at elements x, y.

    ``lemma22_<k>`` stacks P_x^{2k} Q_y - Q_{x^k y} P_x^k and
    P_x^{2k-1} Q_y - (Q_{x^{k-1} y} P_x^k + Q_{x^k y} P_x^{k-1}) / 2;
    ``lemma23_<k>_<s>`` is the binomial relation for that k and s <= 2k.
    The result has shape (r, d, d) with r the number of relations.
    """
    m = _OPERATOR_RE.match(identity_id)
    if not m:
        raise UsageError(f"unknown operator relation {identity_id!r}")
    p = a.p
    P = a.left(x)
    Pp = [la.identity(a.dim)]

    def Ppow(e):
        while len(Pp) <= e:
            Pp.append(la.matmul(Pp[-1], P, p))
        return Pp[e]

    def Q(j):
        return a.left(a.power_times(x, j, y), "bracket")

    half = inv_mod(2, p)
    if m.group(1) is not None:
        k = int(m.group(1))
        if k < 1:
            raise UsageError("lemma22_k needs k >= 1")
        r1 = la.matmul(Ppow(2 * k), Q(0), p) - la.matmul(Q(k), Ppow(k), p)
        r2 = la.matmul(Ppow(2 * k - 1), Q(0), p) - half * (
            la.matmul(Q(k - 1), Ppow(k), p) + la.matmul(Q(k), Ppow(k - 1), p)
        )
        return np.mod(np.stack([r1, r2]), p)
    k, s = int(m.group(2)), int(m.group(3))
    if k < 1 or s > 2 * k:
        raise UsageError("lemma23_k_s needs k >= 1 and s <= 2k")
    acc = np.zeros((a.dim, a.dim), dtype=np.int64)
    for j in range(s + 1):
        coeff = _binom(k, j) * _binom(k, s - j) % p
        if coeff:
            acc = acc + coeff * la.matmul(Q(k - j), Ppow(k - s + j), p)
    b2 = _binom(2 * k, s) % p
    if s % 2 == 0:
        h = s // 2
        res = b2 * la.matmul(Q(k - h), Ppow(k - h), p) - acc
    else:
        lo, hi = (s + 1) // 2, (s - 1) // 2
        res = b2 * la.matmul(Q(k - lo), Ppow(k - hi), p) + b2 * la.matmul(
            Q(k - hi), Ppow(k - lo), p
        ) - 2 * acc
    return np.mod(res[None], p)


def _first_nonzero(res: np.ndarray):
    idx = np.argwhere(res != 0)
    if idx.size == 0:
        return None
    return tuple(int(i) for i in idx[0][:-1])


def check_identity(a: TwoProductAlgebra, identity_id: str, which: str | None = None) -> IdentityReport:
    """Evaluate a multilinear identity on every tuple of basis vectors.

    ``which`` overrides the product used by the one-product identities
    (commutativity, associativity, anticommutativity, jacobi). Operator
    relations (``lemma22_<k>``, ``lemma23_<k>_<s>``) are not multilinear in
    x; they are evaluated on all basis pairs (x, y) and each resulting
    operator on every basis vector, with witness (x, y, relation, column).
    """
    if identity_id in _TENSOR_IDENTITIES:
        default, fn = _TENSOR_IDENTITIES[identity_id]
        t = a.tensor(which or default) if default else None
        res = fn(a, t)
        w = _first_nonzero(res)
        if w is None:
            return IdentityReport(identity_id, True)
        return IdentityReport(identity_id, False, w, res[w].copy(), {"product": which or default})
    if _OPERATOR_RE.match(identity_id):
        for i in range(a.dim):
            for j in range(a.dim):
                res = operator_relation_residual(a, identity_id, a.basis_vector(i), a.basis_vector(j))
                hit = np.argwhere(res != 0)
                if hit.size:
                    r, _, col = (int(v) for v in hit[0])
                    return IdentityReport(identity_id, False, (i, j, r, col), res[r][:, col].copy())
        return IdentityReport(identity_id, True)
    raise UsageError(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITIES)}")


def evaluate_identity(a: TwoProductAlgebra, identity_id: str, elements: Sequence, which: str | None = None) -> np.ndarray:
    """Residual of an identity at explicit elements, computed product by product.

    Independent of the tensor contractions in :func:`check_identity`; used to
    replay witnesses.
    """
    p = a.p
    if identity_id in _TENSOR_IDENTITIES:
        default = _TENSOR_IDENTITIES[identity_id][0]
        sel = which or default

        def m(u, v):
            return a.product(u, v, sel) if sel else None

        mul, br = a.mul, a.br
        el = [a.element(e) for e in elements]
        if identity_id == "commutativity":
            x, y = el
            r = m(x, y) - m(y, x)
        elif identity_id == "anticommutativity":
            x, y = el
            r = m(x, y) + m(y, x)
        elif identity_id == "associativity":
            x, y, z = el
            r = m(m(x, y), z) - m(x, m(y, z))
        elif identity_id == "jacobi":
            x, y, z = el
            r = m(m(x, y), z) + m(m(y, z), x) + m(m(z, x), y)
        elif identity_id == "transposed_leibniz":
            x, y, z = el
            r = 2 * mul(x, br(y, z)) - br(mul(x, y), z) - br(y, mul(x, z))
        elif identity_id == "lemma21":
            u, v, x, y = el
            r = br(mul(u, x), mul(v, y)) - mul(mul(u, v), br(x, y)) - mul(mul(x, y), br(u, v))
        else:  # lemma22
            x, y, z, w = el
            r = 2 * mul(mul(x, y), br(z, w)) - br(mul(x, z), mul(y, w)) - br(mul(y, z), mul(x, w))
        return la.reduce(r, p)
    if _OPERATOR_RE.match(identity_id):
        x, y, rel, col = elements
        res = operator_relation_residual(a, identity_id, a.element(x), a.element(y))
        return res[int(rel)][:, int(col)]
    raise UsageError(f"unknown identity {identity_id!r}")


def replay_witness(a: TwoProductAlgebra, report: IdentityReport) -> np.ndarray:
    """Recompute the residual of a failing report at its witness tuple."""
    w = report.witness
    which = report.detail.get("product")
    if _OPERATOR_RE.match(report.identity_id):
        elems = (a.basis_vector(w[0]), a.basis_vector(w[1]), w[2], w[3])
    else:
        elems = [a.basis_vector(i) for i in w]
    return evaluate_identity(a, report.identity_id, elems, which)


def check_tp(a: TwoProductAlgebra, extra: Sequence[str] = ()) -> list[IdentityReport]:
    return [check_identity(a, name) for name in (*TP_AXIOMS, *extra)]


def verify_tp(a: TwoProductAlgebra) -> TwoProductAlgebra:
    """Return ``a`` flagged tp_verified if every axiom holds, else unflagged."""
    return a.with_flag(all(check_tp(a)))


# --- ideals, simplicity ----------------------------------------------------------


def _all_operators(a: TwoProductAlgebra) -> np.ndarray:
    return np.concatenate([a.left_all("circ"), a.left_all("bracket")])


def ideal_closure(a: TwoProductAlgebra, generators) -> la.Subspace:
    """Smallest two-sided ideal for both products containing ``generators``."""
    gens = np.asarray(generators, dtype=np.int64).reshape(-1, a.dim)
    if gens.shape[0] == 0:
        return la.Subspace.zero(a.dim, a.p)
    # commutative o and anticommutative bracket: left ideals are two-sided
    ops = _all_operators(a)
    ops = np.concatenate([ops, np.transpose(a.circ, (1, 2, 0)), np.transpose(a.bracket, (1, 2, 0))])
    return la.spin(gens, ops, a.p)


@dataclass
class SimplicityVerdict:
    verdict: str  # "simple", "not_simple", "undecided"
    witness: la.Subspace | None = None
    tier: str = ""
    envelope_dim: int | None = None

    def __bool__(self):
        return self.verdict == "simple"


def simplicity(
    a: TwoProductAlgebra,
    seed: int = 0,
    budget: int = 32,
    trivial_one_dim_is_simple: bool = False,
) -> SimplicityVerdict:
    """Three-tier simplicity decision (closure witness, Burnside, Norton)."""
    if a.dim < 1:
        raise UsageError("simplicity needs dim >= 1")
    if not a.circ.any() and not a.bracket.any():
        if a.dim == 1 and trivial_one_dim_is_simple:
            return SimplicityVerdict("simple", tier="convention")
        if a.dim == 1:
            return SimplicityVerdict("not_simple", la.Subspace.full(1, a.p), "convention")
    for i in range(a.dim):
        ideal = ideal_closure(a, a.basis_vector(i))
        if ideal.dim < a.dim:
            return SimplicityVerdict("not_simple", ideal, "closure")
    ops = _all_operators(a)
    ops = np.concatenate([ops, np.transpose(a.circ, (1, 2, 0)), np.transpose(a.bracket, (1, 2, 0))])
    env = la.envelope(ops, a.p)
    if env.dim == a.dim**2:
        return SimplicityVerdict("simple", tier="burnside", envelope_dim=env.dim)
    res = la.norton_search(ops, a.p, seed, budget)
    if res.verdict == "reducible":
        return SimplicityVerdict("not_simple", res.witness, "norton", env.dim)
    if res.verdict == "irreducible":
        return SimplicityVerdict("simple", tier="norton", envelope_dim=env.dim)
    return SimplicityVerdict("undecided", tier="norton", envelope_dim=env.dim)


# --- unit, nilpotency --------------------------------------------------------------


def find_unit(a: TwoProductAlgebra) -> np.ndarray | None:
    """The unit of (A, o) if it exists."""
    d = a.dim
    # sum_i u_i circ[i, j, k] = delta_jk
    m = a.circ.reshape(d, d * d).T
    rhs = la.identity(d).reshape(-1)
    return la.solve(m, rhs, a.p)


def nilpotency_index(a: TwoProductAlgebra, which: str = "circ") -> int | None:
    """Smallest m with A^m = 0 for A^{k+1} = span(A^k * A), else None."""
    t = a.tensor(which)
    cur = la.Subspace.full(a.dim, a.p)
    for m in range(1, a.dim + 2):
        if cur.dim == 0:
            return m
        prods = la.tensordot(cur.basis, t, ([1], [0]), a.p).reshape(-1, a.dim)
        nxt = la.Subspace.span(prods, a.dim, a.p)
        if nxt.dim == cur.dim:
            return None
        cur = nxt
    return None


# --- decomposition ------------------------------------------------------------------


def subalgebra_on(a: TwoProductAlgebra, block: la.Subspace) -> TwoProductAlgebra:
    """Structure constants of an ideal (or subalgebra) in its echelon basis."""
    b = block.basis
    p = a.p

    def restrict(t):
        prods = la.tensordot(la.tensordot(b, t, ([1], [0]), p), b, ([1], [1]), p)
        # prods: (i, k, j) -> coordinates along pivots
        prods = np.transpose(prods, (0, 2, 1))
        return prods[..., list(block.pivots)]

    return TwoProductAlgebra(p, restrict(a.circ), restrict(a.bracket), tp_verified=a.tp_verified)


@dataclass
class Block:
    space: la.Subspace
    kind: str  # "unital" or "nilpotent"
    unit: np.ndarray | None
    algebra: TwoProductAlgebra


@dataclass
class DecompositionResult:
    blocks: list
    p: int
    dim: int

    @property
    def units(self):
        return [blk.unit for blk in self.blocks]

    @property
    def kinds(self):
        return [blk.kind for blk in self.blocks]

    def basis_matrix(self) -> np.ndarray:
        """Columns are the concatenated block bases."""
        return np.vstack([blk.space.basis for blk in self.blocks]).T

    def reassemble(self) -> TwoProductAlgebra:
        """Direct sum of the block algebras, expressed in the original basis."""
        s = self.basis_matrix()
        summed = direct_sum(*[blk.algebra for blk in self.blocks])
        s_inv_cols = [la.solve(s, np.eye(self.dim, dtype=np.int64)[i], self.p) for i in range(self.dim)]
        s_inv = np.array(s_inv_cols).T
        return change_basis(summed, s_inv)


def _split_candidates(a, block, rng, random_budget):
    for i in range(block.dim):
        yield block.basis[i]
    for _ in range(random_budget):
        yield la.matmul(rng.integers(0, a.p, size=block.dim), block.basis, a.p)


def _trivial_summand(a: TwoProductAlgebra, block: la.Subspace):
    """Split off an annihilator part not meeting the square of the block."""
    sub = subalgebra_on(a, block)
    d = sub.dim
    sq = la.Subspace.span(
        np.concatenate([sub.circ.reshape(-1, d), sub.bracket.reshape(-1, d)]), d, a.p
    )
    # x in ann  <=>  sum_i x_i T[i, j, k] = 0 for both tensors and all j, k
    cond = np.concatenate([sub.circ.reshape(d, -1), sub.bracket.reshape(d, -1)], axis=1).T
    ann = la.nullspace(cond, a.p)
    if ann.dim == 0:
        return None
    meet = ann.intersection(sq)
    if meet.dim == ann.dim:
        return None
    # complement C of (ann ∩ sq) inside ann, and J ⊇ sq complementing C
    comp = []
    acc = meet
    for v in ann.basis:
        if not acc.contains(v):
            comp.append(v)
            acc = acc + la.Subspace.span(v, d, a.p)
    c_space = la.Subspace.span(np.array(comp), d, a.p)
    j_space = sq
    for e in la.identity(d):
        if (j_space + c_space).dim == d:
            break
        if not (j_space + c_space).contains(e):
            j_space = j_space + la.Subspace.span(e, d, a.p)
    to_amb = lambda s: la.Subspace.span(la.matmul(s.basis, block.basis, a.p), a.dim, a.p)
    return [to_amb(s) for s in (j_space, c_space) if s.dim]


def _decompose_block(a, block, rng, random_budget, out, nonsplit_seen):
    for x in _split_candidates(a, block, rng, random_budget):
        if not x.any():
            continue
        px = block.restrict(a.left(x))
        spec = la.eigenvalues_in_Fp(px, a.p)
        if not spec.splits:
            nonsplit_seen.append(x)
            continue
        if len(spec.eigenvalues) >= 2:
            for lam in spec.eigenvalues:
                gen = la.generalized_eigenspace(px, lam, a.p)
                amb = la.Subspace.span(la.matmul(gen.basis, block.basis, a.p), a.dim, a.p)
                _decompose_block(a, amb, rng, random_budget, out, nonsplit_seen)
            return
    sub = subalgebra_on(a, block)
    unit = find_unit(sub)
    if unit is not None:
        out.append(Block(block, "unital", la.matmul(unit, block.basis, a.p), sub))
        return
    if nilpotency_index(sub, "circ") is None:
        if nonsplit_seen:
            raise DecompositionError(
                "decomposition-over-F_p failed: a characteristic polynomial of P_x "
                "does not split over F_p"
            )
        raise DecompositionError(
            "decomposition-over-F_p failed: a block is neither unital nor nilpotent"
        )
    pieces = _trivial_summand(a, block) if block.dim > 1 else None
    if pieces and len(pieces) > 1:
        for piece in pieces:
            _decompose_block(a, piece, rng, random_budget, out, nonsplit_seen)
        return
    out.append(Block(block, "nilpotent", None, sub))


def decompose(a: TwoProductAlgebra, seed: int = 0, random_budget: int = 16) -> DecompositionResult:
    """Split a transposed Poisson algebra into unital and nilpotent ideals.

    Blocks come from generalized eigenspaces of P_x for search elements x
    (basis vectors, then seeded random elements); nilpotent leaves also shed
    any trivial summand lying in the annihilator. Unital blocks are listed
    first, each group ordered by leading pivot.
    """
    if not a.tp_verified and not all(check_tp(a)):
        raise UsageError("decompose needs a transposed Poisson algebra")
    rng = np.random.default_rng(seed)
    blocks: list[Block] = []
    _decompose_block(a, la.Subspace.full(a.dim, a.p), rng, random_budget, blocks, [])
    blocks.sort(key=lambda b: (b.kind != "unital", b.space.pivots[0]))
    result = DecompositionResult(blocks, a.p, a.dim)
    _check_decomposition(a, result)
    return result


def _check_decomposition(a: TwoProductAlgebra, result: DecompositionResult) -> None:
    from .errors import InternalError

    if sum(b.space.dim for b in result.blocks) != a.dim or la.rank(result.basis_matrix(), a.p) != a.dim:
        raise InternalError("blocks do not form a direct sum")
    for i, bi in enumerate(result.blocks):
        for j, bj in enumerate(result.blocks):
            if i == j:
                continue
            for t in (a.circ, a.bracket):
                cross = la.tensordot(la.tensordot(bi.space.basis, t, ([1], [0]), a.p), bj.space.basis, ([1], [1]), a.p)
                if cross.any():
                    raise InternalError("cross products between blocks do not vanish")


# --- 1/2-derivations and TP structures ---------------------------------------------


def half_derivations(a: TwoProductAlgebra, which: str = "bracket") -> la.Subspace:
    """Space of D with 2 D(xy) = D(x) y + x D(y), as flattened d x d matrices.

    Index a*d + b holds D[a, b], the coefficient of b_a in D(b_b).
    """
    t = a.tensor(which)
    d = a.dim
    eye = la.identity(d)
    # rows (i, j, k), columns (r, c)
    m = 2 * np.einsum("ijc,kr->ijkrc", t, eye)
    m = m - np.einsum("rjk,ci->ijkrc", t, eye)
    m = m - np.einsum("irk,cj->ijkrc", t, eye)
    return la.nullspace(m.reshape(d**3, d * d) % a.p, a.p)


def as_operators(space: la.Subspace, d: int) -> np.ndarray:
    return space.basis.reshape(-1, d, d)


def tp_structures_on(lie: TwoProductAlgebra) -> list[np.ndarray]:
    """Basis of symmetric products satisfying the transposed Leibniz rule.

    Associativity is not imposed. Returns a list of (d, d, d) tensors.
    """
    for name in ("anticommutativity", "jacobi"):
        if not check_identity(lie, name):
            raise UsageError(f"input bracket is not a Lie algebra ({name} fails)")
    d, p, b = lie.dim, lie.p, lie.bracket
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    sym = np.zeros((d, d, d, len(pairs) * d), dtype=np.int64)
    for idx, (i, j) in enumerate(pairs):
        for k in range(d):
            sym[i, j, k, idx * d + k] = 1
            sym[j, i, k, idx * d + k] = 1
    eye = la.identity(d)
    # constraint on the full tensor c[x, y, k]; then pull back through ``sym``
    # 2 x o [y, z] - [x o y, z] - [y, x o z]   rows (x, y, z, out)
    n = d * d * d
    full = np.zeros((d, d, d, d, n), dtype=np.int64)
    cidx = np.arange(n).reshape(d, d, d)
    for x in range(d):
        for y in range(d):
            for z in range(d):
                for m in range(d):
                    if b[y, z, m]:
                        full[x, y, z, :, cidx[x, m, :]] += 2 * b[y, z, m] * eye
                for m in range(d):
                    # [x o y, z]: c[x, y, m] [b_m, z]
                    full[x, y, z, :, cidx[x, y, m]] -= b[m, z, :]
                    # [y, x o z]: c[x, z, m] [y, b_m]
                    full[x, y, z, :, cidx[x, z, m]] -= b[y, m, :]
    cons = la.matmul(full.reshape(-1, n) % p, sym.reshape(n, -1), p)
    sol = la.nullspace(cons, p)
    return [la.matmul(sym.reshape(n, -1), v, p).reshape(d, d, d) for v in sol.basis]


def cocycle_check(a: TwoProductAlgebra, functional) -> IdentityReport:
    """Check that psi(x, y) = functional(x o y) is a commutative 2-cocycle."""
    lam = la.reduce(functional, a.p).reshape(-1)
    psi = la.reduce(a.circ @ lam, a.p)  # (x, y)
    if np.any((psi - psi.T) % a.p):
        i, j = (int(v) for v in np.argwhere((psi - psi.T) % a.p)[0])
        return IdentityReport("cocycle_symmetry", False, (i, j), np.array([(psi[i, j] - psi[j, i]) % a.p]))
    bp = la.tensordot(a.bracket, psi, ([2], [0]), a.p)  # psi([x,y], z) as (x, y, z)
    res = (bp + np.transpose(bp, (1, 2, 0)) + np.transpose(bp, (2, 0, 1))) % a.p
    # bp[z, x, y] = psi([z,x],y): transposes above give [y,z],x and [z,x],y
    w = np.argwhere(res)
    nonzero = bool(psi.any())
    if w.size:
        i, j, k = (int(v) for v in w[0])
        return IdentityReport("cocycle", False, (i, j, k), np.array([res[i, j, k]]), {"psi_nonzero": nonzero})
    return IdentityReport("cocycle", True, detail={"psi_nonzero": nonzero})
