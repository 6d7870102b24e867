import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tpoisson import algebra as A
from tpoisson import exactla as la
from tpoisson import zassenhaus as zs
from tpoisson.errors import ResourceError, UsageError
from tpoisson.ffield import binom_mod_p


def test_sl2_table_for_p3(z31):
    e = z31.e
    assert np.array_equal(z31.br(e(0), e(-1)), e(-1, -1))
    assert np.array_equal(z31.br(e(-1), e(1)), e(0))
    assert np.array_equal(z31.br(e(0), e(1)), e(1))


def test_lowering_by_e_minus_one(z51):
    for j in range(0, 4):
        assert np.array_equal(z51.br(z51.e(-1), z51.e(j)), z51.e(j - 1))


def test_bullet_example(z51):
    assert np.array_equal(z51.bul(z51.e(0), z51.e(0)), z51.e(1, 2))


def test_structure_constants_against_integer_formulas():
    for p, n in [(3, 1), (5, 1), (7, 1), (3, 2)]:
        z = zs.build_zassenhaus(p, n)
        N = p**n
        for i, j in itertools.product(range(-1, N - 1), repeat=2):
            want = np.zeros(N, dtype=np.int64)
            if -1 <= i + j <= N - 2:
                want[i + j + 1] = (binom_mod_p(i + j + 1, j, p) - binom_mod_p(i + j + 1, i, p)) % p
            assert np.array_equal(z.br(z.e(i), z.e(j)), want)
            bul = np.zeros(N, dtype=np.int64)
            if i + j + 1 <= N - 2:
                bul[i + j + 2] = math.comb(i + j + 2, j + 1) % p
            assert np.array_equal(z.bul(z.e(i), z.e(j)), bul)


def test_size_bound():
    with pytest.raises(ResourceError):
        zs.build_zassenhaus(7, 3)
    with pytest.raises(ResourceError):
        zs.build_zassenhaus(5, 2, max_dim=24)


def test_divided_power_algebra_is_commutative_associative_unital(z52):
    dp = z52.divided_powers
    t = dp.product
    a = A.TwoProductAlgebra(5, t, np.zeros_like(t))
    assert A.check_identity(a, "commutativity") and A.check_identity(a, "associativity")
    assert np.array_equal(A.find_unit(a), dp.monomial(0))


# --- mutations ---------------------------------------------------------------------------


def test_mutation_examples(z51):
    assert np.array_equal(zs.mutate(z51, z51.e(-1)).circ, z51.bullet)
    assert not zs.mutate(z51, np.zeros(5, dtype=np.int64)).circ.any()
    w = zs.mutate(z51, z51.e(3))
    assert np.array_equal(w.mul(z51.e(-1), z51.e(-1)), z51.e(3))


@pytest.mark.parametrize("p", [5, 7])
def test_all_basis_mutations_are_tp(p):
    z = zs.build_zassenhaus(p, 1)
    for i in range(-1, p - 1):
        a = zs.mutate(z, z.e(i))
        assert a.tp_verified
        assert A.check_identity(a, "lemma21") and A.check_identity(a, "lemma22")


@pytest.mark.parametrize("p,n", [(5, 1), (7, 1), (5, 2)])
def test_random_mutations_are_tp(p, n):
    z = zs.build_zassenhaus(p, n)
    rng = np.random.default_rng(p * 10 + n)
    for _ in range(20 if n == 1 else 5):
        assert zs.mutate(z, rng.integers(0, p, z.N)).tp_verified


def test_mutation_parameter_recovery(z51, rng):
    q = rng.integers(0, 5, 5)
    w = zs.mutate(z51, q)
    assert np.array_equal(zs.mutation_parameter(z51, w), q)
    assert zs.mutation_tensor(z51, rng.integers(0, 5, (5, 5, 5))) is None


# --- inverses, nu, E sets --------------------------------------------------------------------


def test_bullet_inverse_examples(z51):
    assert np.array_equal(zs.bullet_inverse(z51, z51.e(-1)), z51.e(-1))
    u = zs.bullet_inverse(z51, z51.e(-1) + z51.e(0))
    assert u.tolist() == [1, 4, 2, 4, 4]
    assert zs.bullet_inverse(z51, z51.e(0)) is None


def test_bullet_inverse_matches_truncated_series(z51):
    # (1 + x)^{-1} = sum_k (-1)^k x^k with x = e0 and bullet powers x^k = k! x^{(k)}
    x = z51.e(0)
    total = z51.e(-1)
    power = z51.e(-1)
    for k in range(1, 5):
        power = z51.bul(power, x)
        total = (total + (-1) ** k * power) % 5
    assert np.array_equal(total, zs.bullet_inverse(z51, z51.e(-1) + z51.e(0)))


@given(st.lists(st.integers(0, 6), min_size=7, max_size=7))
def test_bullet_inverse_exists_iff_leading_coefficient(coeffs):
    z = zs.build_zassenhaus(7, 1)
    q = np.array(coeffs)
    u = zs.bullet_inverse(z, q)
    if q[0]:
        assert np.array_equal(z.bul(q, u), z.e(-1))
    else:
        assert u is None


def test_nu():
    assert zs.nu([1, 0, 0, 1, 0]) == -1
    assert zs.nu([0, 0, 0, 3, 0]) == 2
    assert zs.nu([0, 0, 0, 0, 1]) == 3
    with pytest.raises(UsageError):
        zs.nu([0, 0, 0])


def test_E_set_examples():
    assert zs.E_set(5, 1, 2) == {2}
    assert zs.E_set(5, 2, 0) == {4, 24}
    assert zs.E_set(5, 2, 2) == {2, 3, 4, 7, 8, 12, 13, 17, 18, 22}
    for m in range(4):
        assert zs.E_set(5, 1, m) == {4 - m}
    assert zs.E_set(5, 1, 4) == set()
    with pytest.raises(UsageError):
        zs.E_set(5, 1, 5)


# --- automorphisms ------------------------------------------------------------------------------


def test_identity_automorphism(z51):
    act = zs.admissible_automorphism(z51, zs.AutomorphismParams.identity(5, 1))
    assert np.array_equal(act.phi, la.identity(5)) and np.array_equal(act.psi, la.identity(5))


@pytest.mark.parametrize("lam", [2, 3, 4])
def test_scaling_automorphism(z51, lam):
    act = zs.admissible_automorphism(z51, zs.AutomorphismParams.scaling(5, 1, lam))
    assert np.array_equal(act.phi, np.diag([pow(lam, i, 5) for i in range(5)]))
    assert np.array_equal(act.psi, np.diag([pow(lam, i, 5) for i in range(-1, 4)]))


def test_divided_power_expansion_example(z51):
    act = zs.admissible_automorphism(z51, zs.AutomorphismParams(5, 1, (1, 1)))
    assert act.phi[:, 2].tolist() == [0, 0, 1, 3, 3]


def test_inadmissible_params_rejected(z51, z52):
    with pytest.raises(UsageError):
        zs.admissible_automorphism(z51, zs.AutomorphismParams(5, 1, (0, 1)))
    alphas = [1] + [0] * 23
    alphas[4] = 1  # alpha_5 must vanish for n = 2
    with pytest.raises(UsageError):
        zs.admissible_automorphism(z52, zs.AutomorphismParams(5, 2, tuple(alphas)))


def _random_params(p, n, rng):
    N = p**n
    a = rng.integers(0, p, N - 1)
    a[0] = rng.integers(1, p)
    for j in range(1, n):
        a[p**j - 1] = 0
    return zs.AutomorphismParams(p, n, tuple(int(v) for v in a))


@pytest.mark.parametrize("p,n", [(5, 1), (7, 1), (3, 2), (5, 2)])
def test_automorphisms_twist_the_bullet(p, n):
    z = zs.build_zassenhaus(p, n)
    rng = np.random.default_rng(p + n)
    for _ in range(3):
        act = zs.admissible_automorphism(z, _random_params(p, n, rng))  # verifies phi, psi
        inv = zs.bullet_inverse(z, act.psi[:, 0])
        for i, j in itertools.product(range(z.N), repeat=2):
            if (i * z.N + j) % 7:
                continue
            x, y = np.eye(z.N, dtype=np.int64)[[i, j]]
            lhs = act(z.bul(x, y))
            rhs = z.bul(z.bul(inv, act(x)), act(y))
            assert np.array_equal(lhs, rhs)


def test_apply_isoq_examples(z51):
    ident = zs.admissible_automorphism(z51, zs.AutomorphismParams.identity(5, 1))
    q = np.array([1, 2, 3, 4, 0])
    assert np.array_equal(zs.apply_isoq(z51, q, ident, check=True), q)
    for lam in range(1, 5):
        act = zs.admissible_automorphism(z51, zs.AutomorphismParams.scaling(5, 1, lam))
        for v in range(-1, 4):
            want = z51.e(v, pow(lam, v + 2, 5))
            assert np.array_equal(zs.apply_isoq(z51, z51.e(v), act, check=True), want)
    act = zs.admissible_automorphism(z51, zs.AutomorphismParams.scaling(5, 1, 3))
    assert np.array_equal(zs.apply_isoq(z51, z51.e(-1, 2), act), z51.e(-1))


@given(st.integers(0, 2**32 - 1))
def test_apply_isoq_intertwines(seed):
    z = zs.build_zassenhaus(5, 1)
    rng = np.random.default_rng(seed)
    act = zs.admissible_automorphism(z, _random_params(5, 1, rng))
    zs.apply_isoq(z, rng.integers(0, 5, 5), act, check=True)


# --- normal forms -----------------------------------------------------------------------------


def _replay(z, q, nf):
    cur = q
    for prm in nf.trace:
        cur = zs.apply_isoq(z, cur, zs.admissible_automorphism(z, prm), check=True)
    return cur


def test_normal_form_examples(z51):
    nf = zs.normal_form(z51, z51.e(3))
    assert np.array_equal(nf.q, z51.e(3)) and nf.trace == [] and nf.leading_normalized
    nf = zs.normal_form(z51, z51.e(0, 2))
    # 2 * lam^2 = 1 needs lam^2 = 3, not a square mod 5
    assert np.array_equal(nf.q, z51.e(0, 2))
    assert nf.flags == ["scaled-up-to-(m+2)-th-powers"]
    nf = zs.normal_form(z51, z51.e(0) + z51.e(1))
    assert np.array_equal(nf.q, z51.e(0))
    assert zs.brute_force_iso(z51, z51.e(0) + z51.e(1), nf.q) is not None
    with pytest.raises(UsageError):
        zs.normal_form(z51, np.zeros(5, dtype=np.int64))


@pytest.mark.parametrize("p,n", [(5, 1), (7, 1), (5, 2), (3, 2)])
def test_normal_form_support_trace_and_idempotence(p, n):
    z = zs.build_zassenhaus(p, n)
    rng = np.random.default_rng(17 * p + n)
    for _ in range(15):
        q = rng.integers(0, p, z.N)
        if not q.any():
            continue
        v = zs.nu(q)
        nf = zs.normal_form(z, q)
        allowed = {v} | {v + s for s in zs.E_set(p, n, v + 1)}
        assert {i - 1 for i in np.flatnonzero(nf.q)} <= allowed
        assert nf.q[v + 1] == 1 or not nf.leading_normalized
        assert np.array_equal(_replay(z, q, nf), nf.q)
        again = zs.normal_form(z, nf.q)
        assert np.array_equal(again.q, nf.q)


def test_normal_form_sound_against_brute_force(z51):
    rng = np.random.default_rng(5)
    for v in range(-1, 4):
        for _ in range(4):
            q = np.zeros(5, dtype=np.int64)
            q[v + 1] = rng.integers(1, 5)
            q[v + 2:] = rng.integers(0, 5, 3 - v)
            nf = zs.normal_form(z51, q)
            assert zs.brute_force_iso(z51, q, nf.q) is not None


def test_brute_force_examples(z51):
    q = np.array([1, 2, 0, 3, 1])
    assert zs.brute_force_iso(z51, q, q) == zs.AutomorphismParams.identity(5, 1)
    wit = zs.brute_force_iso(z51, z51.e(-1, 2), z51.e(-1))
    assert wit is not None and wit.alphas[0] == 3
    assert zs.brute_force_iso(z51, z51.e(-1), z51.e(3)) is None
    assert zs.candidate_count(5, 1) == 500
    with pytest.raises(ResourceError):
        zs.brute_force_iso(zs.build_zassenhaus(7, 1), z51.e(-1).tolist() + [0, 0], [0] * 7)


# --- Lie-theoretic facts ---------------------------------------------------------------------


@pytest.mark.parametrize("p,n", [(5, 1), (7, 1), (5, 2)])
def test_e_minus_one_self_centralizing_and_ad_nilpotent(p, n):
    z = zs.build_zassenhaus(p, n)
    ad = z.ad(z.e(-1))
    assert la.nullspace(ad, p) == la.Subspace.span(z.e(-1), z.N, p)
    assert not la.mat_pow(ad, z.N, p).any()
    assert la.mat_pow(ad, z.N - 1, p).any()
