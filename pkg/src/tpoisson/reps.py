"""Representations (alpha, beta, V) of transposed Poisson algebras and the family M_q(a)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exactla as la
from .algebra import IdentityReport, TwoProductAlgebra, find_unit
from .errors import InternalError, UsageError
from .zassenhaus import ZassenhausPair, bullet_inverse, mutate, mutation_parameter

__all__ = [
    "Representation",
    "REP_CONDITIONS",
    "build_M",
    "check_representation",
    "representation_residual",
    "replay_representation_witness",
    "IrreducibilityVerdict",
    "irreducible",
    "twist",
    "direct_sum_reps",
    "zero_representation",
    "alpha_from_beta",
    "intertwiner_space",
    "find_isomorphism",
]


@dataclass(frozen=True, eq=False)
class Representation:
    algebra: TwoProductAlgebra
    alpha: np.ndarray  # (d, m, m), alpha[i] = alpha(b_i)
    beta: np.ndarray

    def __post_init__(self):
        p, d = self.algebra.p, self.algebra.dim
        alpha = la.reduce(self.alpha, p)
        beta = la.reduce(self.beta, p)
        if alpha.ndim != 3 or alpha.shape[0] != d or alpha.shape[1] != alpha.shape[2]:
            raise UsageError(f"alpha must have shape ({d}, m, m), got {alpha.shape}")
        if beta.shape != alpha.shape:
            raise UsageError("alpha and beta shapes differ")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def module_dim(self) -> int:
        return self.alpha.shape[1]

    def act(self, which: str, x) -> np.ndarray:
        """alpha(x) or beta(x) for an element x of the algebra."""
        ops = self.alpha if which == "alpha" else self.beta
        return la.reduce(np.tensordot(self.algebra.element(x), ops, axes=1), self.p)

    def __eq__(self, other):
        if not isinstance(other, Representation):
            return NotImplemented
        return (
            self.algebra == other.algebra
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.beta, other.beta)
        )

    __hash__ = None


def build_M(z: ZassenhausPair, q, a) -> Representation:
    """M_q(a) on V = W(1;n): alpha(x) = left bullet by x.q, beta(x) = ad x + left bullet by x.a."""
    q, a = z.element(q), z.element(a)
    eye = la.identity(z.N)
    x_q = la.matmul(eye, z.bullet_left(q).T, z.p)  # row i = e_i . q
    x_a = la.matmul(eye, z.bullet_left(a).T, z.p)
    alpha = np.array([z.bullet_left(v) for v in x_q])
    beta = np.array([z.ad(z.e(i - 1)) for i in range(z.N)]) + np.array([z.bullet_left(v) for v in x_a])
    return Representation(mutate(z, q, verify=False), alpha, beta)


def zero_representation(algebra: TwoProductAlgebra, module_dim: int = 1) -> Representation:
    shape = (algebra.dim, module_dim, module_dim)
    return Representation(algebra, np.zeros(shape, dtype=np.int64), np.zeros(shape, dtype=np.int64))


def direct_sum_reps(*reps: Representation) -> Representation:
    if not reps:
        raise UsageError("need at least one representation")
    alg = reps[0].algebra
    if any(r.algebra != alg for r in reps):
        raise UsageError("representations of different algebras")
    m = sum(r.module_dim for r in reps)
    alpha = np.zeros((alg.dim, m, m), dtype=np.int64)
    beta = np.zeros_like(alpha)
    off = 0
    for r in reps:
        s = slice(off, off + r.module_dim)
        alpha[:, s, s] = r.alpha
        beta[:, s, s] = r.beta
        off += r.module_dim
    return Representation(alg, alpha, beta)


# --- verification ---------------------------------------------------------------

# name -> number of algebra arguments
REP_CONDITIONS = {
    "associative_action": 2,
    "lie_action": 2,
    "repcomp1": 2,
    "repcomp2": 2,
    "rel1": 2,
    "rel3": 3,
    "rel3b": 3,
    "unit_acts_as_identity": 0,
}


def _pairwise(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """[i, j] -> a[i] @ b[j]."""
    return la.matmul(a[:, None], b[None, :], p)


def _residual_tensor(r: Representation, cond: str) -> np.ndarray | None:
    alg, p, al, be = r.algebra, r.p, r.alpha, r.beta
    # op(x o y), op([x, y]) as (d, d, m, m)
    def image(t, ops):
        return la.tensordot(t, ops, ([2], [0]), p)

    if cond == "associative_action":
        res = _pairwise(al, al, p) - image(alg.circ, al)
    elif cond == "lie_action":
        bb = _pairwise(be, be, p)
        res = bb - bb.transpose(1, 0, 2, 3) - image(alg.bracket, be)
    elif cond == "repcomp1":
        res = 2 * _pairwise(al, be, p) - image(alg.circ, be) - _pairwise(be, al, p).transpose(1, 0, 2, 3)
    elif cond == "repcomp2":
        ba = _pairwise(be, al, p)
        res = 2 * image(alg.bracket, al) - ba + ba.transpose(1, 0, 2, 3)
    elif cond == "rel1":
        ab = _pairwise(al, be, p)
        res = ab - ab.transpose(1, 0, 2, 3) + image(alg.bracket, al)
    elif cond == "rel3":
        bra = la.tensordot(image(alg.bracket, be), al, ([3], [1]), p)  # (x, y, m, z, m)
        t = bra.transpose(0, 1, 3, 2, 4)  # [x, y, z] = beta([x,y]) alpha(z)
        res = t + t.transpose(2, 0, 1, 3, 4) + t.transpose(1, 2, 0, 3, 4)
    elif cond == "rel3b":
        lhs = la.tensordot(image(alg.bracket, be), al, ([3], [1]), p).transpose(0, 1, 3, 2, 4)
        zx = image(alg.circ, be)  # [z, x] -> beta(z o x)
        t = la.tensordot(zx, be, ([3], [1]), p)  # (z, x, m, y, m): beta(z o x) beta(y)
        t = t.transpose(1, 3, 0, 2, 4)  # [x, y, z]
        res = lhs - t + t.transpose(1, 0, 2, 3, 4)
    elif cond == "unit_acts_as_identity":
        u = find_unit(alg)
        if u is None or not be.any():
            return None
        res = (r.act("alpha", u) - la.identity(r.module_dim))[None]
    else:
        raise UsageError(f"unknown representation condition {cond!r}")
    return la.reduce(res, p)


def representation_residual(r: Representation, cond: str, elements) -> np.ndarray:
    """Residual matrix of one condition at explicit algebra elements."""
    alg, p = r.algebra, r.p
    A = lambda x: r.act("alpha", x)  # noqa: E731
    B = lambda x: r.act("beta", x)  # noqa: E731
    mm = lambda u, v: la.matmul(u, v, p)  # noqa: E731
    el = [alg.element(e) for e in elements]
    if cond == "associative_action":
        x, y = el
        res = mm(A(x), A(y)) - A(alg.mul(x, y))
    elif cond == "lie_action":
        x, y = el
        res = mm(B(x), B(y)) - mm(B(y), B(x)) - B(alg.br(x, y))
    elif cond == "repcomp1":
        x, y = el
        res = 2 * mm(A(x), B(y)) - B(alg.mul(x, y)) - mm(B(y), A(x))
    elif cond == "repcomp2":
        x, y = el
        res = 2 * A(alg.br(x, y)) - mm(B(x), A(y)) + mm(B(y), A(x))
    elif cond == "rel1":
        x, y = el
        res = mm(A(x), B(y)) - mm(A(y), B(x)) + A(alg.br(x, y))
    elif cond == "rel3":
        x, y, z = el
        res = mm(B(alg.br(x, y)), A(z)) + mm(B(alg.br(y, z)), A(x)) + mm(B(alg.br(z, x)), A(y))
    elif cond == "rel3b":
        x, y, z = el
        res = mm(B(alg.br(x, y)), A(z)) - mm(B(alg.mul(z, x)), B(y)) + mm(B(alg.mul(z, y)), B(x))
    elif cond == "unit_acts_as_identity":
        u = find_unit(alg)
        res = A(u) - la.identity(r.module_dim)
    else:
        raise UsageError(f"unknown representation condition {cond!r}")
    return la.reduce(res, p)


def check_representation(r: Representation, conditions=None) -> IdentityReport:
    """Check the action, compatibility and derived relations on all basis tuples.

    The witness of a failure is (condition, basis indices...).
    """
    checked = []
    for cond in conditions or REP_CONDITIONS:
        res = _residual_tensor(r, cond)
        if res is None:
            continue
        checked.append(cond)
        hit = np.argwhere(res != 0)
        if hit.size:
            k = REP_CONDITIONS[cond]
            idx = tuple(int(v) for v in hit[0][:k]) if k else ()
            # residual matrix at the failing tuple
            mat = res[idx] if k else res[0]
            return IdentityReport("representation", False, (cond, *idx), mat.copy(), {"checked": checked})
    return IdentityReport("representation", True, detail={"checked": checked})


def replay_representation_witness(r: Representation, report: IdentityReport) -> np.ndarray:
    cond, *idx = report.witness
    return representation_residual(r, cond, [r.algebra.basis_vector(i) for i in idx])


# --- irreducibility ------------------------------------------------------------------


@dataclass
class IrreducibilityVerdict:
    verdict: str  # "irreducible", "reducible", "undecided"
    witness: la.Subspace | None = None
    tier: str = ""
    envelope_dim: int | None = None

    def __bool__(self):
        return self.verdict == "irreducible"


def irreducible(r: Representation, seed: int = 0, budget: int = 32) -> IrreducibilityVerdict:
    """Basis-vector spin, then Burnside envelope, then randomised Norton search."""
    m, p = r.module_dim, r.p
    ops = np.concatenate([r.alpha, r.beta])
    for i in range(m):
        v = np.zeros(m, dtype=np.int64)
        v[i] = 1
        sub = la.spin(v, ops, p)
        if sub.dim < m:
            return IrreducibilityVerdict("reducible", sub, "spin")
    env = la.envelope(ops, p)
    if env.dim == m * m:
        return IrreducibilityVerdict("irreducible", None, "burnside", env.dim)
    res = la.norton_search(ops, p, seed, budget)
    if res.verdict == "reducible":
        return IrreducibilityVerdict("reducible", res.witness, "norton", env.dim)
    return IrreducibilityVerdict(res.verdict, None, "norton", env.dim)


# --- twisting ---------------------------------------------------------------------------


def twist(r: Representation, z: ZassenhausPair, q, converse: bool = False) -> Representation:
    """Replace alpha by x -> alpha(x . q^{-1}), or x -> alpha(x . q) when ``converse``.

    ``r`` must be a representation of some W_n(c); the result is a
    representation of W_n(c . q^{-1}) (resp. W_n(c . q)) with the same beta.
    """
    q = z.element(q)
    u = bullet_inverse(z, q)
    if u is None:
        raise UsageError("q is not bullet-invertible (its e-1 coefficient is zero)")
    c = mutation_parameter(z, r.algebra)
    if c is None:
        raise UsageError("representation is not over a mutation W_n(c) of this Zassenhaus algebra")
    factor = q if converse else u
    shifts = np.array([z.bul(z.e(i - 1), factor) for i in range(z.N)])  # row i = e_i . factor
    alpha = la.tensordot(shifts, r.alpha, ([1], [0]), z.p)
    return Representation(mutate(z, z.bul(c, factor), verify=False), alpha, r.beta)


# --- reconstruction of alpha from beta -----------------------------------------------


def alpha_from_beta(algebra: TwoProductAlgebra, beta: np.ndarray, seed: int = 0, sample: int = 4096) -> np.ndarray:
    """The unique alpha compatible with beta, recovered from brackets of brackets.

    2 alpha([[w,x],[y,z]]) = beta([y,z] o w) beta(x) - beta([y,z] o x) beta(w)
                             - beta([w,x] o y) beta(z) + beta([w,x] o z) beta(y).
    Needs a perfect bracket so that these elements span the algebra.
    """
    d, p = algebra.dim, algebra.p
    beta = la.reduce(beta, p)
    m = beta.shape[1]
    rng = np.random.default_rng(seed)
    quads = np.array(np.meshgrid(*[np.arange(d)] * 4, indexing="ij")).reshape(4, -1).T
    if len(quads) > sample:
        quads = quads[rng.choice(len(quads), sample, replace=False)]
    br = algebra.bracket
    wx = br[quads[:, 0], quads[:, 1]]
    yz = br[quads[:, 2], quads[:, 3]]
    targets = la.reduce(np.einsum("ra,rb,abk->rk", wx, yz, br), p)
    _, piv = la.rref(targets.T, p)
    if len(piv) < d:
        raise UsageError("brackets of brackets do not span the algebra; alpha is not determined")
    B = lambda x: la.reduce(np.tensordot(x, beta, axes=1), p)  # noqa: E731
    mul = algebra.mul

    def rhs(r):
        w, x, y, zz = (algebra.basis_vector(i) for i in quads[r])
        a, b = wx[r], yz[r]
        total = (
            la.matmul(B(mul(b, w)), B(x), p)
            - la.matmul(B(mul(b, x)), B(w), p)
            - la.matmul(B(mul(a, y)), B(zz), p)
            + la.matmul(B(mul(a, zz)), B(y), p)
        )
        return la.reduce(total * pow(2, -1, p), p)

    sel = list(piv)
    basis_rows = targets[sel]
    inv = la.inverse(basis_rows, p)
    if inv is None:
        raise InternalError("selected bracket elements are dependent")
    # alpha(target_r) = sum_i targets[r, i] alpha(b_i)
    vals = np.array([rhs(r).reshape(-1) for r in sel])
    return la.matmul(inv, vals, p).reshape(d, m, m)


# --- isomorphism search (experimental) ---------------------------------------------------


def intertwiner_space(r1: Representation, r2: Representation) -> la.Subspace:
    """All X with X r1(x) = r2(x) X for alpha and beta; vectors are X flattened row-major."""
    if r1.algebra != r2.algebra:
        raise UsageError("representations of different algebras")
    m1, m2, p = r1.module_dim, r2.module_dim, r1.p
    eye1, eye2 = la.identity(m1), la.identity(m2)
    blocks = []
    for g1, g2 in zip(np.concatenate([r1.alpha, r1.beta]), np.concatenate([r2.alpha, r2.beta])):
        # X is m2 x m1: vec(g2 X) - vec(X g1)
        blocks.append(np.kron(g2, eye1) - np.kron(eye2, g1.T))
    return la.nullspace(la.reduce(np.concatenate(blocks), p), p)


def find_isomorphism(r1: Representation, r2: Representation, seed: int = 0, budget: int = 64):
    """Experimental: an invertible intertwiner r1 -> r2, or None if none was found.

    The intertwiner space is exact; only the search for an invertible member
    is randomised, so None means "not found within budget" unless the space
    is zero or the dimensions differ.
    """
    m = r1.module_dim
    if m != r2.module_dim:
        return None
    space = intertwiner_space(r1, r2)
    if space.dim == 0:
        return None
    rng = np.random.default_rng(seed)
    candidates = list(space.basis) + [
        la.matmul(rng.integers(0, r1.p, space.dim), space.basis, r1.p) for _ in range(budget)
    ]
    for v in candidates:
        x = v.reshape(m, m)
        if la.rank(x, r1.p) == m:
            return x
    return None
