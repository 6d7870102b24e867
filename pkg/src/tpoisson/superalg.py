"""Kantor doubles, weak-Leibniz (de)polarisation and the operator Q = ad(1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exactla as la
from .algebra import IdentityReport, TwoProductAlgebra, find_unit
from .errors import UsageError

__all__ = [
    "SuperAlgebra",
    "OneProductAlgebra",
    "kantor_double",
    "check_supercommutativity",
    "check_jordan_super",
    "jordan_super_residual",
    "depolarize",
    "polarize",
    "check_weak_leibniz",
    "weak_leibniz_residual",
    "QPDiagnosis",
    "qp_operator",
]


@dataclass(frozen=True, eq=False)
class SuperAlgebra:
    """Z/2-graded algebra; basis is the even part followed by the odd part."""

    p: int
    even_dim: int
    odd_dim: int
    product: np.ndarray

    def __post_init__(self):
        t = la.reduce(self.product, self.p)
        D = self.dim
        if t.shape != (D, D, D):
            raise UsageError(f"product tensor must have shape {(D, D, D)}, got {t.shape}")
        par = self.parities
        # even*even, odd*odd -> even; mixed -> odd
        allowed = (par[:, None, None] + par[None, :, None] + par[None, None, :]) % 2 == 0
        if np.any(t[~allowed]):
            raise UsageError("product does not respect the grading")
        object.__setattr__(self, "product", t)

    @property
    def dim(self) -> int:
        return self.even_dim + self.odd_dim

    @property
    def parities(self) -> np.ndarray:
        return np.array([0] * self.even_dim + [1] * self.odd_dim, dtype=np.int64)

    def left_all(self) -> np.ndarray:
        """L[u] with L[u][k, w] = coefficient of b_k in b_u * b_w."""
        return np.transpose(self.product, (0, 2, 1))

    def mul(self, x, y) -> np.ndarray:
        return la.reduce(np.einsum("i,j,ijk->k", x, y, self.product), self.p)

    def __eq__(self, other):
        if not isinstance(other, SuperAlgebra):
            return NotImplemented
        return (self.p, self.even_dim, self.odd_dim) == (other.p, other.even_dim, other.odd_dim) and np.array_equal(
            self.product, other.product
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class OneProductAlgebra:
    p: int
    product: np.ndarray

    def __post_init__(self):
        t = la.reduce(self.product, self.p)
        if t.ndim != 3 or len(set(t.shape)) != 1:
            raise UsageError(f"product tensor must be cubic, got {t.shape}")
        object.__setattr__(self, "product", t)

    @property
    def dim(self) -> int:
        return self.product.shape[0]

    def mul(self, x, y) -> np.ndarray:
        return la.reduce(np.einsum("i,j,ijk->k", x, y, self.product), self.p)


# --- Kantor double ------------------------------------------------------------------


def kantor_double(a: TwoProductAlgebra) -> SuperAlgebra:
    """P + P^s with x*y = x o y, x*y^s = x^s*y = (x o y)^s, x^s*y^s = [x, y]."""
    d = a.dim
    t = np.zeros((2 * d, 2 * d, 2 * d), dtype=np.int64)
    t[:d, :d, :d] = a.circ
    t[:d, d:, d:] = a.circ
    t[d:, :d, d:] = a.circ
    t[d:, d:, :d] = a.bracket
    return SuperAlgebra(a.p, d, d, t)


def check_supercommutativity(s: SuperAlgebra) -> IdentityReport:
    par = s.parities
    sign = np.where(np.outer(par, par) % 2 == 1, -1, 1)
    res = la.reduce(s.product - sign[:, :, None] * s.product.transpose(1, 0, 2), s.p)
    hit = np.argwhere(res != 0)
    if hit.size:
        i, j = (int(v) for v in hit[0][:2])
        return IdentityReport("supercommutativity", False, (i, j), res[i, j].copy())
    return IdentityReport("supercommutativity", True)


def _sign(e) -> np.ndarray:
    return np.where(np.asarray(e) % 2 == 1, -1, 1)


def _jordan_tensor(s: SuperAlgebra) -> np.ndarray:
    """res[x, y, z] = sum over cyclic shifts of (-1)^{|x||z|} [L_{x*y}, L_z]_s."""
    p, par = s.p, s.parities
    L = s.left_all()
    Lxy = la.tensordot(s.product, L, ([2], [0]), p)  # (x, y, D, D)
    D = s.dim
    AB = la.matmul(Lxy[:, :, None], L[None, None, :], p)  # (x, y, z, D, D)
    BA = la.matmul(L[None, None, :], Lxy[:, :, None], p)
    px, py, pz = par[:, None, None], par[None, :, None], par[None, None, :]
    comm = AB - _sign((px + py) * pz)[..., None, None] * BA
    t = _sign(px * pz)[..., None, None] * comm
    res = t + t.transpose(2, 0, 1, 3, 4) + t.transpose(1, 2, 0, 3, 4)
    assert res.shape == (D, D, D, D, D)
    return la.reduce(res, p)


def check_jordan_super(s: SuperAlgebra) -> IdentityReport:
    """Graded Jordan identity in operator form, on all basis quadruples (x, y, z, w)."""
    if not check_supercommutativity(s):
        raise UsageError("the algebra is not supercommutative")
    res = _jordan_tensor(s)
    hit = np.argwhere(res != 0)
    if hit.size:
        x, y, z, _, w = (int(v) for v in hit[0])
        return IdentityReport("jordan_super", False, (x, y, z, w), res[x, y, z][:, w].copy())
    return IdentityReport("jordan_super", True)


def jordan_super_residual(s: SuperAlgebra, x: int, y: int, z: int, w: int) -> np.ndarray:
    """The same identity evaluated on basis vectors product by product."""
    par = s.parities
    e = lambda i: np.eye(s.dim, dtype=np.int64)[i]  # noqa: E731
    mul = s.mul

    def term(a, b, c):
        ab = mul(e(a), e(b))
        # [L_{ab}, L_c]_s w = ab*(c*w) - (-1)^{(|a|+|b|)|c|} c*(ab*w)
        sgn = -1 if ((par[a] + par[b]) * par[c]) % 2 else 1
        val = mul(ab, mul(e(c), e(w))) - sgn * mul(e(c), mul(ab, e(w)))
        return (-1 if (par[a] * par[c]) % 2 else 1) * val

    return la.reduce(term(x, y, z) + term(y, z, x) + term(z, x, y), s.p)


# --- weak-Leibniz -----------------------------------------------------------------------


def depolarize(a: TwoProductAlgebra) -> OneProductAlgebra:
    return OneProductAlgebra(a.p, a.circ + a.bracket)


def polarize(lalg: OneProductAlgebra) -> TwoProductAlgebra:
    p, t = lalg.p, lalg.product
    half = pow(2, -1, p)
    tt = t.transpose(1, 0, 2)
    return TwoProductAlgebra(p, half * (t + tt), half * (t - tt))


def _weak_leibniz_tensors(lalg: OneProductAlgebra) -> tuple:
    p, t = lalg.p, lalg.product
    # left[x, y, z] = (x.y).z ; right[x, y, z] = x.(y.z)
    left = la.tensordot(t, t, ([2], [0]), p)
    right = la.tensordot(t, t, ([1], [2]), p).transpose(0, 2, 3, 1)
    r1 = left - left.transpose(1, 0, 2, 3) - 2 * right + 2 * right.transpose(1, 0, 2, 3)
    r2 = right - right.transpose(0, 2, 1, 3) - 2 * left + 2 * left.transpose(0, 2, 1, 3)
    return la.reduce(r1, p), la.reduce(r2, p)


def check_weak_leibniz(lalg: OneProductAlgebra) -> IdentityReport:
    """(xy)z - (yx)z = 2x(yz) - 2y(xz) and x(yz) - x(zy) = 2(xy)z - 2(xz)y."""
    for name, res in zip(("weak_leibniz_1", "weak_leibniz_2"), _weak_leibniz_tensors(lalg)):
        hit = np.argwhere(res != 0)
        if hit.size:
            i, j, k = (int(v) for v in hit[0][:3])
            return IdentityReport("weak_leibniz", False, (name, i, j, k), res[i, j, k].copy())
    return IdentityReport("weak_leibniz", True)


def weak_leibniz_residual(lalg: OneProductAlgebra, which: str, x, y, z) -> np.ndarray:
    m = lalg.mul
    if which == "weak_leibniz_1":
        r = m(m(x, y), z) - m(m(y, x), z) - 2 * m(x, m(y, z)) + 2 * m(y, m(x, z))
    elif which == "weak_leibniz_2":
        r = m(x, m(y, z)) - m(x, m(z, y)) - 2 * m(m(x, y), z) + 2 * m(m(x, z), y)
    else:
        raise UsageError(f"unknown identity {which!r}")
    return la.reduce(r, lalg.p)


# --- quasi-Poisson operator -------------------------------------------------------------


@dataclass
class QPDiagnosis:
    Q: np.ndarray
    kind: str  # "diagonalizable", "nilpotent" or "neither"
    spectrum: tuple = ()
    nilpotency_index: int | None = None
    minimal_polynomial: la.FpPolynomial | None = None

    def summary(self) -> str:
        if self.kind == "diagonalizable":
            return "diagonalizable, spectrum = {" + ",".join(str(v) for v in self.spectrum) + "}"
        if self.kind == "nilpotent":
            return f"nilpotent, index = {self.nilpotency_index}"
        coeffs = ",".join(str(c) for c in self.minimal_polynomial.coefficients)
        return f"neither, minimal polynomial coefficients (low to high) = [{coeffs}]"


def _ordered_spectrum(q: np.ndarray, values) -> tuple:
    """Eigenvalues in diagonal order when q is triangular, ascending otherwise."""
    values = set(values)
    if not np.any(np.tril(q, -1)) or not np.any(np.triu(q, 1)):
        seen = []
        for v in np.diag(q):
            if int(v) in values and int(v) not in seen:
                seen.append(int(v))
        if set(seen) == values:
            return tuple(seen)
    return tuple(sorted(values))


def qp_operator(a: TwoProductAlgebra) -> QPDiagnosis:
    """Q = ad(1) for the unit of (A, o), with a diagonalisability/nilpotency diagnosis."""
    u = find_unit(a)
    if u is None:
        raise UsageError("(A, o) has no unit; W_n(q) is unital exactly when q is bullet-invertible")
    p, d = a.p, a.dim
    Q = a.left(u, "bracket")
    if not Q.any():
        return QPDiagnosis(Q, "diagonalizable", (0,))
    spec = la.eigenvalues_in_Fp(Q, p)
    if spec.splits:
        prod = la.identity(d)
        for lam in spec.eigenvalues:
            prod = la.matmul(prod, (Q - lam * la.identity(d)) % p, p)
        if not prod.any():
            return QPDiagnosis(Q, "diagonalizable", _ordered_spectrum(Q, spec.eigenvalues))
    power = Q
    for k in range(1, d + 1):
        if not power.any():
            return QPDiagnosis(Q, "nilpotent", (0,), nilpotency_index=k)
        power = la.matmul(power, Q, p)
    return QPDiagnosis(Q, "neither", tuple(spec.eigenvalues), minimal_polynomial=la.minimal_polynomial(Q, p))
