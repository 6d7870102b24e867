"""Zassenhaus algebras W(1;n), the bullet product and the family W_n(q).

Basis e_{-1}, ..., e_{N-2} (N = p^n) sits at positions 0..N-1, so position
``a`` holds e_{a-1} = x^{(a)} d. Under this identification the bullet
product is the product of the divided power algebra O(1;n), and vectors of
W(1;n) and O(1;n) share coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import exactla as la
from .algebra import TwoProductAlgebra, check_identity, TP_AXIOMS
from .errors import InternalError, ResourceError, UsageError
from .ffield import binom_mod_p, check_prime, dp_power_coeff, inv_mod, power_orbit_min

__all__ = [
    "MAX_DIM",
    "DividedPowerAlgebra",
    "ZassenhausPair",
    "build_zassenhaus",
    "mutate",
    "mutation_parameter",
    "bullet_inverse",
    "nu",
    "E_set",
    "AutomorphismParams",
    "AutomorphismAction",
    "admissible_automorphism",
    "apply_isoq",
    "NormalForm",
    "normal_form",
    "brute_force_iso",
]

MAX_DIM = 125


def _label(i: int) -> str:
    return f"e{i}"


@dataclass(frozen=True, eq=False)
class DividedPowerAlgebra:
    """O(1;n): basis x^{(0)}..x^{(N-1)}, x^{(i)} x^{(j)} = C(i+j, j) x^{(i+j)}."""

    p: int
    n: int
    product: np.ndarray

    @property
    def N(self) -> int:
        return self.p**self.n

    def mul(self, f, g) -> np.ndarray:
        return la.reduce(np.einsum("i,j,ijk->k", f, g, self.product), self.p)

    def left(self, f) -> np.ndarray:
        return la.reduce(np.einsum("i,ijk->kj", f, self.product), self.p)

    def monomial(self, i: int, coeff: int = 1) -> np.ndarray:
        v = np.zeros(self.N, dtype=np.int64)
        if i < self.N:
            v[i] = coeff % self.p
        return v

    def inverse(self, f) -> np.ndarray | None:
        return la.solve(self.left(f), self.monomial(0), self.p)

    def derivative(self, f) -> np.ndarray:
        """d(x^{(i)}) = x^{(i-1)}."""
        out = np.zeros_like(f)
        out[:-1] = f[1:]
        return out

    def divided_powers(self, f) -> list:
        """[f^{(0)}, ..., f^{(N-1)}] for f without constant term.

        Built monomial by monomial from (u + v)^{(k)} = sum u^{(i)} v^{(k-i)},
        (c x^{(a)})^{(k)} = c^k dp_power_coeff(a, k) x^{(ak)}.
        """
        f = la.reduce(f, self.p)
        if f[0]:
            raise UsageError("divided powers need an element of the maximal ideal")
        N, p = self.N, self.p
        acc = [self.monomial(0)] + [np.zeros(N, dtype=np.int64) for _ in range(N - 1)]
        for a in np.flatnonzero(f):
            a, c = int(a), int(f[a])
            mono = [
                self.monomial(a * k, pow(c, k, p) * dp_power_coeff(a, k, p)) if a * k < N
                else np.zeros(N, dtype=np.int64)
                for k in range(N)
            ]
            acc = [
                la.reduce(sum(self.mul(acc[i], mono[k - i]) for i in range(k + 1)), p)
                for k in range(N)
            ]
        return acc


@dataclass(frozen=True, eq=False)
class ZassenhausPair:
    p: int
    n: int
    bracket: np.ndarray
    bullet: np.ndarray
    divided_powers: DividedPowerAlgebra

    @property
    def N(self) -> int:
        return self.p**self.n

    @property
    def dim(self) -> int:
        return self.N

    @property
    def labels(self) -> tuple:
        return tuple(_label(i) for i in range(-1, self.N - 1))

    def e(self, i: int, coeff: int = 1) -> np.ndarray:
        """Coefficient vector of coeff * e_i, for -1 <= i <= N-2."""
        if not -1 <= i <= self.N - 2:
            raise UsageError(f"index {i} outside [-1, {self.N - 2}]")
        v = np.zeros(self.N, dtype=np.int64)
        v[i + 1] = coeff % self.p
        return v

    def element(self, q) -> np.ndarray:
        v = la.reduce(q, self.p).reshape(-1)
        if v.shape[0] != self.N:
            raise UsageError(f"element has length {v.shape[0]}, expected {self.N}")
        return v

    def bul(self, x, y) -> np.ndarray:
        return la.reduce(np.einsum("i,j,ijk->k", x, y, self.bullet), self.p)

    def br(self, x, y) -> np.ndarray:
        return la.reduce(np.einsum("i,j,ijk->k", x, y, self.bracket), self.p)

    def bullet_left(self, x) -> np.ndarray:
        return la.reduce(np.einsum("i,ijk->kj", x, self.bullet), self.p)

    def ad(self, x) -> np.ndarray:
        return la.reduce(np.einsum("i,ijk->kj", x, self.bracket), self.p)

    def model(self) -> TwoProductAlgebra:
        """W_n(e_{-1}): the bullet product with the Zassenhaus bracket."""
        return TwoProductAlgebra(self.p, self.bullet, self.bracket, self.labels, tp_verified=True)


def build_zassenhaus(p: int, n: int, max_dim: int = MAX_DIM, verify: bool = True) -> ZassenhausPair:
    check_prime(p)
    if n < 1:
        raise UsageError("n must be positive")
    N = p**n
    if N > max_dim:
        raise ResourceError(f"p^n = {N} exceeds the size bound {max_dim}")
    dp = np.zeros((N, N, N), dtype=np.int64)
    br = np.zeros((N, N, N), dtype=np.int64)
    for a in range(N):
        for b in range(N - a):
            dp[a, b, a + b] = binom_mod_p(a + b, b, p)
    for a in range(N):
        i = a - 1
        for b in range(N):
            j = b - 1
            if i + j < -1 or i + j > N - 2:
                continue
            c = binom_mod_p(i + j + 1, j, p) - binom_mod_p(i + j + 1, i, p)
            br[a, b, i + j + 1] = c % p
    z = ZassenhausPair(p, n, br, dp.copy(), DividedPowerAlgebra(p, n, dp))
    if verify:
        model = TwoProductAlgebra(p, z.bullet, z.bracket)
        for name in ("commutativity", "associativity", "anticommutativity", "jacobi"):
            if not check_identity(model, name):
                raise InternalError(f"W(1;{n}) over F_{p} fails {name}")
        unit = z.e(-1)
        if not np.array_equal(z.bullet_left(unit), la.identity(N)):
            raise InternalError("e_{-1} is not the bullet unit")
    return z


def mutate(z: ZassenhausPair, q, verify: bool = True) -> TwoProductAlgebra:
    """W_n(q): bracket of W(1;n) with x o y = x . q . y."""
    q = z.element(q)
    lq = z.bullet_left(q)
    # circ[i, j] = (e_i . q) . e_j
    eq = la.matmul(z.bullet_left(q), la.identity(z.N), z.p).T  # rows e_i . q
    circ = la.tensordot(eq, z.bullet, ([1], [0]), z.p)
    del lq
    a = TwoProductAlgebra(z.p, circ, z.bracket, z.labels)
    if verify:
        bad = [name for name in TP_AXIOMS if not check_identity(a, name)]
        if bad:
            raise InternalError(f"W_n(q) fails {bad}")
        a = a.with_flag(True)
    return a


def mutation_parameter(z: ZassenhausPair, a: TwoProductAlgebra) -> np.ndarray | None:
    """q with a == W_n(q) (bracket and circ), read off as e_{-1} o e_{-1}."""
    if a.dim != z.N or a.p != z.p or not np.array_equal(a.bracket, z.bracket):
        return None
    q = a.circ[0, 0].copy()
    return q if np.array_equal(mutate(z, q, verify=False).circ, a.circ) else None


def mutation_tensor(z: ZassenhausPair, circ: np.ndarray) -> np.ndarray | None:
    """q with circ == x . q . y, or None if circ is not such a mutation."""
    q = la.reduce(circ, z.p)[0, 0].copy()
    return q if np.array_equal(mutate(z, q, verify=False).circ, la.reduce(circ, z.p)) else None


def bullet_inverse(z: ZassenhausPair, q) -> np.ndarray | None:
    """u with q . u = e_{-1}; exists iff the e_{-1} coefficient of q is nonzero."""
    q = z.element(q)
    if not q[0]:
        return None
    u = la.solve(z.bullet_left(q), z.e(-1), z.p)
    if u is None:
        raise InternalError("q has nonzero e_{-1} coefficient but no bullet inverse")
    return u


def nu(q) -> int:
    """Lowest index i with a nonzero e_i coefficient."""
    nz = np.flatnonzero(np.asarray(q))
    if nz.size == 0:
        raise UsageError("nu is undefined for q = 0")
    return int(nz[0]) - 1


def E_set(p: int, n: int, m: int) -> set:
    N = p**n
    if not 0 <= m <= N - 1:
        raise UsageError(f"m must lie in [0, {N - 1}]")
    hooks = {p**j - 1 for j in range(1, n + 1)}
    return {s for s in range(1, N - m) if s in hooks or binom_mod_p(m + s + 1, m, p) == 0}


# --- admissible automorphisms ---------------------------------------------------


@dataclass(frozen=True)
class AutomorphismParams:
    """phi(x) = sum_{i >= 1} alphas[i-1] x^{(i)}."""

    p: int
    n: int
    alphas: tuple

    def __post_init__(self):
        N = self.p**self.n
        alphas = tuple(int(a) % self.p for a in self.alphas)
        alphas = alphas + (0,) * (N - 1 - len(alphas))
        if len(alphas) != N - 1:
            raise UsageError(f"need at most {N - 1} coefficients")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def identity(cls, p, n):
        return cls(p, n, (1,))

    @classmethod
    def scaling(cls, p, n, lam):
        return cls(p, n, (lam,))

    @classmethod
    def elementary(cls, p, n, s, lam):
        """phi(x) = x + lam x^{(s+1)}."""
        a = [0] * (p**n - 1)
        a[0] = 1
        a[s] = (a[s] + lam) % p
        return cls(p, n, tuple(a))

    def admissible(self) -> bool:
        return self.alphas[0] != 0 and all(self.alphas[self.p**j - 1] == 0 for j in range(1, self.n))

    def y(self) -> np.ndarray:
        return np.array((0,) + self.alphas, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class AutomorphismAction:
    params: AutomorphismParams
    phi: np.ndarray
    psi: np.ndarray
    h_inverse: np.ndarray

    def __call__(self, v) -> np.ndarray:
        return la.matmul(self.psi, la.reduce(v, self.params.p), self.params.p)


def _action(z: ZassenhausPair, params: AutomorphismParams):
    dp = z.divided_powers
    y = params.y()
    phi = np.array(dp.divided_powers(y)).T  # column i = y^{(i)}
    h_inv = dp.derivative(y)
    h = dp.inverse(h_inv)
    psi = la.matmul(dp.left(h), phi, z.p)
    return phi, psi, h_inv


def admissible_automorphism(z: ZassenhausPair, params: AutomorphismParams, verify: bool = True) -> AutomorphismAction:
    if (params.p, params.n) != (z.p, z.n):
        raise UsageError("parameters belong to a different W(1;n)")
    if not params.admissible():
        raise UsageError("need alpha_1 != 0 and alpha_{p^j} = 0 for 1 <= j < n")
    phi, psi, h_inv = _action(z, params)
    act = AutomorphismAction(params, phi, psi, h_inv)
    if verify:
        _verify_action(z, act)
    return act


def _verify_action(z: ZassenhausPair, act: AutomorphismAction) -> None:
    p = z.p
    dp = z.divided_powers.product
    # phi(fg) = phi(f) phi(g)
    lhs = la.tensordot(dp, act.phi, ([2], [1]), p)
    rhs = la.tensordot(la.tensordot(act.phi, act.phi, ([], []), p), dp, ([0, 2], [0, 1]), p)
    if not np.array_equal(lhs, rhs):
        raise InternalError("phi is not multiplicative")
    if not np.array_equal(act.phi[:, 0], z.divided_powers.monomial(0)):
        raise InternalError("phi is not unital")
    # psi[f, g] = [psi f, psi g]
    lhs = la.tensordot(z.bracket, act.psi, ([2], [1]), p)
    rhs = la.tensordot(la.tensordot(act.psi, act.psi, ([], []), p), z.bracket, ([0, 2], [0, 1]), p)
    if not np.array_equal(lhs, rhs):
        raise InternalError("psi does not preserve the bracket")
    if la.rank(act.psi, p) != z.N:
        raise InternalError("psi is singular")


def apply_isoq(z: ZassenhausPair, q, act: AutomorphismAction, check: bool = False) -> np.ndarray:
    """q' = psi(e_{-1})^{-2} . psi(q), so that psi: W_n(q) -> W_n(q') is an isomorphism."""
    q = z.element(q)
    lead = act.psi[:, 0]
    inv = bullet_inverse(z, lead)
    if inv is None:
        raise InternalError("psi(e_{-1}) is not bullet-invertible")
    q2 = z.bul(z.bul(inv, inv), act(q))
    if check:
        src = mutate(z, q, verify=False).circ
        dst = mutate(z, q2, verify=False).circ
        lhs = la.tensordot(src, act.psi, ([2], [1]), z.p)
        rhs = la.tensordot(la.tensordot(act.psi, act.psi, ([], []), z.p), dst, ([0, 2], [0, 1]), z.p)
        if not np.array_equal(lhs, rhs):
            raise InternalError("psi does not intertwine the mutated products")
    return q2


# --- normal forms -----------------------------------------------------------------


@dataclass
class NormalForm:
    q: np.ndarray
    trace: list = field(default_factory=list)
    # False when the leading coefficient could not be scaled to 1 over F_p
    leading_normalized: bool = True

    @property
    def flags(self) -> list:
        return [] if self.leading_normalized else ["scaled-up-to-(m+2)-th-powers"]


def normal_form(z: ZassenhausPair, q) -> NormalForm:
    """Reduce q to e_nu + sum_{s in E_{nu+1}} a_s e_{nu+s} by admissible automorphisms.

    Every elementary step is applied through :func:`apply_isoq` and checked.
    Over F_p the leading coefficient c can only be moved within
    c * (F_p^*)^{nu+2}; the smallest representative is kept when 1 is not
    reachable.
    """
    p, N = z.p, z.N
    cur = z.element(q)
    v = nu(cur)
    m = v + 1
    trace: list[AutomorphismParams] = []
    lam, lead = power_orbit_min(int(cur[m]), m + 1, p)
    if lam != 1:
        params = AutomorphismParams.scaling(p, z.n, lam)
        cur = apply_isoq(z, cur, admissible_automorphism(z, params, verify=False))
        trace.append(params)
    if int(cur[m]) != lead:
        raise InternalError("scaling step did not produce the predicted leading coefficient")
    keep = E_set(p, z.n, m)
    for s in range(1, N - m):
        if s in keep or not cur[m + s]:
            continue
        c = binom_mod_p(m + s + 1, m, p)
        guess = (-int(cur[m + s]) * inv_mod(c * int(cur[m]), p)) % p
        candidates = [guess] + [t for t in range(1, p) if t != guess]
        for t in candidates:
            params = AutomorphismParams.elementary(p, z.n, s, t)
            new = apply_isoq(z, cur, admissible_automorphism(z, params, verify=False))
            if new[m + s] == 0 and np.array_equal(new[: m + s], cur[: m + s]):
                cur = new
                trace.append(params)
                break
        else:
            raise InternalError(f"could not eliminate the coefficient of e_{m + s - 1}")
    return NormalForm(cur, trace, lead == 1)


# --- brute force isomorphism search -----------------------------------------------


def candidate_count(p: int, n: int) -> int:
    N = p**n
    return (p - 1) * p ** (N - 2 - (n - 1))


@lru_cache(maxsize=8)
def _transform_table(p: int, n: int):
    """All admissible parameter tuples and the linear maps q -> q'."""
    z = build_zassenhaus(p, n, verify=False)
    N = z.N
    free = [i for i in range(2, N) if i not in {p**j for j in range(1, n)}]
    params, mats = [], []
    for a1 in range(1, p):
        for rest in itertools.product(range(p), repeat=len(free)):
            alphas = [0] * (N - 1)
            alphas[0] = a1
            for i, val in zip(free, rest):
                alphas[i - 1] = val
            prm = AutomorphismParams(p, n, tuple(alphas))
            _, psi, _ = _action(z, prm)
            inv = bullet_inverse(z, psi[:, 0])
            lin = la.matmul(z.bullet_left(z.bul(inv, inv)), psi, p)
            params.append(prm)
            mats.append(lin)
    return params, np.array(mats)


def brute_force_iso(z: ZassenhausPair, q, q2, budget: int = 10_000) -> AutomorphismParams | None:
    """First admissible automorphism mapping W_n(q) onto W_n(q2), or None."""
    total = candidate_count(z.p, z.n)
    if total > budget:
        raise ResourceError(f"{total} candidate automorphisms exceed the budget {budget}")
    q, q2 = z.element(q), z.element(q2)
    params, mats = _transform_table(z.p, z.n)
    images = np.mod(mats @ q, z.p)
    hits = np.flatnonzero(np.all(images == q2, axis=1))
    if hits.size == 0:
        return None
    found = params[int(hits[0])]
    act = admissible_automorphism(z, found)
    if not np.array_equal(apply_isoq(z, q, act, check=True), q2):
        raise InternalError("tabulated transform disagrees with apply_isoq")
    return found
