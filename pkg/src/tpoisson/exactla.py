"""Exact dense linear algebra over F_p on numpy int64 arrays.

Matrices act on column vectors; subspaces are stored as the rows of a
reduced row echelon matrix, so two equal subspaces have identical bases.
Products are formed in float64 whenever the accumulated sums stay below
2**53, which lets BLAS do the work while remaining exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError
from .ffield import check_prime, inv_mod

__all__ = [
    "reduce",
    "matmul",
    "identity",
    "mat_pow",
    "rref",
    "row_basis",
    "rank",
    "Subspace",
    "nullspace",
    "solve",
    "inverse",
    "FpPolynomial",
    "char_poly",
    "Spectrum",
    "eigenvalues_in_Fp",
    "generalized_eigenspace",
    "minimal_polynomial",
    "spin",
    "envelope",
    "norton_search",
]

_EXACT = float(2**53)


def reduce(a, p: int) -> np.ndarray:
    """Return an int64 copy of ``a`` reduced into range(p)."""
    return np.mod(np.asarray(a, dtype=np.int64), p)


def _safe_float(inner: int, p: int) -> bool:
    return inner * (p - 1) ** 2 < _EXACT


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact (a @ b) mod p; broadcasts like ``np.matmul``."""
    inner = a.shape[-1]
    if _safe_float(inner, p):
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.mod(out, p).astype(np.int64)
    return np.mod(np.matmul(a.astype(object), b.astype(object)), p).astype(np.int64)


def tensordot(a: np.ndarray, b: np.ndarray, axes, p: int) -> np.ndarray:
    """Exact ``np.tensordot`` mod p (inputs assumed reduced)."""
    if isinstance(axes, int):
        inner = int(np.prod(a.shape[a.ndim - axes:], dtype=np.int64))
    else:
        ax = np.atleast_1d(axes[0])
        inner = int(np.prod([a.shape[i] for i in ax], dtype=np.int64))
    if _safe_float(inner, p):
        out = np.tensordot(a.astype(np.float64), b.astype(np.float64), axes=axes)
        return np.mod(out, p).astype(np.int64)
    return np.mod(np.tensordot(a.astype(object), b.astype(object), axes=axes), p).astype(np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mat_pow(m: np.ndarray, e: int, p: int) -> np.ndarray:
    result = identity(m.shape[0])
    base = reduce(m, p)
    while e:
        if e & 1:
            result = matmul(result, base, p)
        e >>= 1
        if e:
            base = matmul(base, base, p)
    return result


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = reduce(m, p)
    if a.ndim != 2:
        raise UsageError("rref expects a 2-d array")
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * inv_mod(int(a[r, c]), p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r].copy(), pivots


def _residual_rows(m: np.ndarray, basis: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Rows of ``m`` minus their projection onto the echelon ``basis``."""
    if not pivots:
        return m
    return np.mod(m - matmul(m[:, pivots], basis, p), p)


def row_basis(m, p: int, seed: int = 0) -> tuple[np.ndarray, list[int]]:
    """Echelon basis of the row space of ``m``.

    Tall inputs are first compressed by a random sketch; the result is then
    certified by checking every input row against the candidate basis, and
    any row that escapes is folded back in. The output never depends on the
    sketch, only the running time does.
    """
    a = reduce(m, p)
    if a.ndim != 2:
        raise UsageError("row_basis expects a 2-d array")
    a = a[np.any(a != 0, axis=1)]
    nrows, ncols = a.shape
    if nrows <= 2 * ncols + 32:
        return rref(a, p)
    rng = np.random.default_rng(seed)
    k = ncols + 24
    sketch = matmul(rng.integers(0, p, size=(k, nrows), dtype=np.int64), a, p)
    basis, pivots = rref(sketch, p)
    while True:
        res = _residual_rows(a, basis, pivots, p)
        bad = np.flatnonzero(np.any(res != 0, axis=1))
        if bad.size == 0:
            return basis, pivots
        extra = res[bad[: ncols + 1]]
        basis, pivots = rref(np.vstack([basis, extra]), p)


def rank(m, p: int) -> int:
    return len(row_basis(m, p)[1])


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of F_p^n given by a canonical (rref) row basis."""

    ambient_dim: int
    basis: np.ndarray
    p: int
    pivots: tuple = field(default=())

    @classmethod
    def span(cls, vectors, ambient_dim: int, p: int) -> "Subspace":
        vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient_dim)
        b, piv = row_basis(vecs, p)
        return cls(ambient_dim, b, p, tuple(piv))

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), p, ())

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, identity(ambient_dim), p, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of vectors (rows) lying in the subspace."""
        v = reduce(v, self.p)
        return v[..., list(self.pivots)]

    def contains(self, v) -> bool:
        v = reduce(v, self.p).reshape(-1, self.ambient_dim)
        res = _residual_rows(v, self.basis, list(self.pivots), self.p)
        return not np.any(res)

    def contains_subspace(self, other: "Subspace") -> bool:
        return other.dim == 0 or self.contains(other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(np.vstack([self.basis, other.basis]), self.ambient_dim, self.p)

    def intersection(self, other: "Subspace") -> "Subspace":
        # v = x B1 = y B2  <=>  [x, -y] in left kernel of [B1; B2]
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.p)
        stacked = np.vstack([self.basis, -other.basis]) % self.p
        ker = nullspace(stacked.T, self.p)
        vecs = matmul(ker.basis[:, : self.dim], self.basis, self.p)
        return Subspace.span(vecs, self.ambient_dim, self.p)

    def image(self, op: np.ndarray) -> np.ndarray:
        """Rows op @ b for each basis row b."""
        return matmul(self.basis, op.T, self.p)

    def is_invariant(self, op: np.ndarray) -> bool:
        return self.dim == 0 or self.contains(self.image(op))

    def restrict(self, op: np.ndarray) -> np.ndarray:
        """Matrix of an invariant operator on this subspace, in basis coordinates."""
        return self.coordinates(self.image(op)).T.copy()


def nullspace(m, p: int) -> Subspace:
    """Solution space of m @ v = 0."""
    m = reduce(m, p)
    ncols = m.shape[1]
    r, piv = row_basis(m, p)
    free = [c for c in range(ncols) if c not in set(piv)]
    vecs = np.zeros((len(free), ncols), dtype=np.int64)
    for idx, f in enumerate(free):
        vecs[idx, f] = 1
        for row, c in enumerate(piv):
            vecs[idx, c] = (-r[row, f]) % p
    return Subspace.span(vecs, ncols, p)


def solve(m, b, p: int) -> np.ndarray | None:
    """One solution of m @ v = b, or None when the system is inconsistent."""
    m = reduce(m, p)
    b = reduce(b, p).reshape(-1)
    if m.ndim != 2 or m.shape[0] != b.shape[0]:
        raise UsageError(f"dimension mismatch: {m.shape} vs {b.shape}")
    ncols = m.shape[1]
    r, piv = row_basis(np.hstack([m, b[:, None]]), p)
    if ncols in piv:
        return None
    v = np.zeros(ncols, dtype=np.int64)
    for row, c in enumerate(piv):
        v[c] = r[row, ncols]
    return v


def inverse(m, p: int) -> np.ndarray | None:
    """Inverse of a square matrix, or None if it is singular."""
    m = reduce(m, p)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise UsageError(f"inverse needs a square matrix, got {m.shape}")
    r, piv = rref(np.hstack([m, identity(n)]), p)
    if list(piv[:n]) != list(range(n)):
        return None
    return r[:n, n:].copy()


@dataclass(frozen=True)
class FpPolynomial:
    """Polynomial over F_p, coefficients lowest degree first, no trailing zeros."""

    coefficients: tuple
    p: int

    def __post_init__(self):
        cs = [int(c) % self.p for c in self.coefficients]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coefficients", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % self.p
        return acc

    def at_matrix(self, m: np.ndarray) -> np.ndarray:
        n = m.shape[0]
        acc = np.zeros((n, n), dtype=np.int64)
        for c in reversed(self.coefficients):
            acc = (matmul(acc, m, self.p) + c * identity(n)) % self.p
        return acc

    def divide_linear(self, root: int) -> "FpPolynomial":
        """Quotient by (t - root); the caller ensures root is a root."""
        out = []
        carry = 0
        for c in reversed(self.coefficients[1:]):
            carry = (carry * root + c) % self.p
            out.append(carry)
        return FpPolynomial(tuple(reversed(out)), self.p)

    def roots(self) -> list[int]:
        return [x for x in range(self.p) if self(x) == 0]


def char_poly(m, p: int) -> FpPolynomial:
    """det(tI - m) by Berkowitz's division-free algorithm."""
    a = reduce(m, p)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError("char_poly needs a square matrix")
    n = a.shape[0]
    poly = np.array([1], dtype=np.int64)  # highest degree first
    for k in range(n):
        row, col, sub, diag = a[k, :k], a[:k, k], a[:k, :k], int(a[k, k])
        v = np.zeros(k + 2, dtype=np.int64)
        v[0], v[1] = 1, -diag % p
        w = col.copy()
        for j in range(k):
            v[j + 2] = -int(row @ w) % p
            w = matmul(sub, w, p)
        toeplitz = np.zeros((k + 2, k + 1), dtype=np.int64)
        for j in range(k + 1):
            toeplitz[j:, j] = v[: k + 2 - j]
        poly = matmul(toeplitz, poly, p)
    return FpPolynomial(tuple(int(c) for c in poly[::-1]), p)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple
    multiplicities: dict
    splits: bool


def eigenvalues_in_Fp(m, p: int) -> Spectrum:
    """Roots of the characteristic polynomial found by scanning F_p."""
    chi = char_poly(m, p)
    mult = {}
    for lam in chi.roots():
        count, g = 0, chi
        while g.degree > 0 and g(lam) == 0:
            g = g.divide_linear(lam)
            count += 1
        mult[lam] = count
    return Spectrum(tuple(sorted(mult)), mult, sum(mult.values()) == chi.degree)


def generalized_eigenspace(m, lam: int, p: int) -> Subspace:
    """ker (m - lam I)^n."""
    a = reduce(m, p)
    n = a.shape[0]
    shifted = (a - lam * identity(n)) % p
    return nullspace(mat_pow(shifted, n, p), p)


def minimal_polynomial(m, p: int) -> FpPolynomial:
    a = reduce(m, p)
    n = a.shape[0]
    powers = [identity(n).reshape(-1)]
    cur = identity(n)
    for k in range(1, n + 1):
        cur = matmul(cur, a, p)
        powers.append(cur.reshape(-1))
        ker = nullspace(np.array(powers).T, p)
        if ker.dim:
            # rref basis: the last row has its pivot at the highest free power
            rel = ker.basis[-1]
            top = max(i for i in range(k + 1) if rel[i])
            lead_inv = inv_mod(int(rel[top]), p)
            return FpPolynomial(tuple(int(c) * lead_inv for c in rel[: top + 1]), p)
    raise AssertionError("Cayley-Hamilton bound exceeded")


# --- invariant subspaces of operator families ---------------------------------


def spin(vectors, ops: np.ndarray, p: int) -> Subspace:
    """Smallest subspace containing ``vectors`` and stable under every op."""
    ops = reduce(ops, p)
    n = ops.shape[-1]
    sub = Subspace.span(vectors, n, p)
    frontier = sub.basis
    while frontier.shape[0]:
        imgs = matmul(frontier[None, :, :], np.transpose(ops, (0, 2, 1)), p).reshape(-1, n)
        bigger = Subspace.span(np.vstack([sub.basis, imgs]), n, p)
        if bigger.dim == sub.dim:
            break
        new_rows = bigger.basis
        frontier = _residual_rows(new_rows, sub.basis, list(sub.pivots), p)
        frontier = frontier[np.any(frontier != 0, axis=1)]
        sub = bigger
    return sub


def envelope(ops: np.ndarray, p: int, cap: int | None = None) -> Subspace:
    """Unital associative algebra generated by ``ops``, as a subspace of n*n.

    Stops early once the dimension reaches ``cap`` (default n*n).
    """
    ops = reduce(ops, p)
    n = ops.shape[-1]
    cap = n * n if cap is None else cap
    start = np.vstack([identity(n).reshape(1, -1), ops.reshape(len(ops), -1)])
    env = Subspace.span(start, n * n, p)
    frontier = env.basis
    while frontier.shape[0] and env.dim < cap:
        mats = frontier.reshape(-1, n, n)
        prods = matmul(mats[:, None, :, :], ops[None, :, :, :], p).reshape(-1, n * n)
        bigger = Subspace.span(np.vstack([env.basis, prods]), n * n, p)
        if bigger.dim == env.dim:
            break
        frontier = _residual_rows(bigger.basis, env.basis, list(env.pivots), p)
        frontier = frontier[np.any(frontier != 0, axis=1)]
        env = bigger
    return env


@dataclass
class NortonResult:
    verdict: str  # "reducible", "irreducible" or "undecided"
    witness: Subspace | None = None
    attempts: int = 0


def norton_search(ops: np.ndarray, p: int, seed: int, budget: int = 32) -> NortonResult:
    """Randomised MeatAxe-style search restricted to linear factors.

    For random elements A of the generated algebra and each root lam of
    chi_A, a nonzero kernel vector of A - lam is spun; a proper result is a
    submodule. If the kernel is one-dimensional and both the vector and a
    dual kernel vector spin to the whole space, Norton's criterion proves
    irreducibility over F_p.
    """
    ops = reduce(ops, p)
    n = ops.shape[-1]
    if n <= 1:
        return NortonResult("irreducible", None, 0)
    rng = np.random.default_rng(seed)
    ops_t = np.transpose(ops, (0, 2, 1)).copy()
    for attempt in range(1, budget + 1):
        # random word-combination: sum of random products of two generators
        coeffs = rng.integers(0, p, size=len(ops))
        a = np.mod(np.tensordot(coeffs, ops, axes=1), p)
        i, j = rng.integers(0, len(ops), size=2)
        a = (a + matmul(ops[i], ops[j], p) + rng.integers(0, p) * identity(n)) % p
        for lam in char_poly(a, p).roots():
            shifted = (a - lam * identity(n)) % p
            ker = nullspace(shifted, p)
            for v in ker.basis:
                sub = spin(v, ops, p)
                if 0 < sub.dim < n:
                    return NortonResult("reducible", sub, attempt)
            dual_ker = nullspace(shifted.T, p)
            for w in dual_ker.basis:
                dual = spin(w, ops_t, p)
                if 0 < dual.dim < n:
                    # annihilator of a proper dual submodule is a proper submodule
                    return NortonResult("reducible", nullspace(dual.basis, p), attempt)
            if ker.dim == 1:
                return NortonResult("irreducible", None, attempt)
    return NortonResult("undecided", None, budget)
