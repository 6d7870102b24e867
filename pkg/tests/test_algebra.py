import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.polys.matrices import DomainMatrix

from tpoisson import algebra as A
from tpoisson import exactla as la
from tpoisson import zassenhaus as zs
from tpoisson.errors import DecompositionError, UsageError

P = 5


def field_ext(p, nonsquare):
    """F_p[t]/(t^2 - nonsquare): a field with p^2 elements, zero bracket."""
    c = np.zeros((2, 2, 2), dtype=np.int64)
    c[0, 0, 0] = c[0, 1, 1] = c[1, 0, 1] = 1
    c[1, 1, 0] = nonsquare
    return A.TwoProductAlgebra(p, c, np.zeros_like(c), tp_verified=True)


def random_invertible(d, p, rng):
    while True:
        s = rng.integers(0, p, size=(d, d))
        if la.rank(s, p) == d:
            return s


# --- identity engine --------------------------------------------------------------------


def test_model_algebra_satisfies_transposed_leibniz(z51):
    assert A.check_identity(zs.mutate(z51, z51.e(-1)), "transposed_leibniz")


def test_zero_bracket_is_jacobi():
    assert A.check_identity(field_ext(P, 2), "jacobi")


def test_bracket_is_not_associative_with_replayable_witness(z51):
    w = zs.mutate(z51, z51.e(-1))
    rep = A.check_identity(w, "associativity", which="bracket")
    assert not rep.holds and rep.witness is not None
    assert rep.residual.any()
    assert np.array_equal(A.replay_witness(w, rep), rep.residual)
    e = [w.basis_vector(i) for i in rep.witness]
    direct = w.br(w.br(e[0], e[1]), e[2]) - w.br(e[0], w.br(e[1], e[2]))
    assert np.array_equal(np.mod(direct, P), rep.residual)


def test_bracket_associator_on_the_lowest_triple_vanishes(z51):
    # ([e-1, e0], e1) and (e-1, [e0, e1]) both give e0
    w = zs.mutate(z51, z51.e(-1))
    e = [z51.e(i) for i in (-1, 0, 1)]
    assert np.array_equal(w.br(w.br(e[0], e[1]), e[2]), z51.e(0))
    assert np.array_equal(w.br(e[0], w.br(e[1], e[2])), z51.e(0))


def test_unknown_identity():
    with pytest.raises(UsageError):
        A.check_identity(A.zero_algebra(P, 2), "moufang")


@pytest.mark.parametrize("name", list(A._TENSOR_IDENTITIES))
def test_witness_replay_on_random_algebras(name):
    rng = np.random.default_rng(hash(name) % 2**32)
    for _ in range(5):
        a = A.TwoProductAlgebra(P, rng.integers(0, P, (3, 3, 3)), rng.integers(0, P, (3, 3, 3)))
        rep = A.check_identity(a, name)
        if not rep.holds:
            replay = A.replay_witness(a, rep)
            assert replay.any() and np.array_equal(replay, rep.residual)


@given(st.integers(0, 2**32 - 1))
def test_tensor_check_agrees_with_elementwise_evaluation(seed):
    rng = np.random.default_rng(seed)
    a = A.TwoProductAlgebra(P, rng.integers(0, P, (3, 3, 3)), rng.integers(0, P, (3, 3, 3)))
    for name, arity in [("commutativity", 2), ("associativity", 3), ("jacobi", 3),
                        ("transposed_leibniz", 3), ("lemma21", 4), ("lemma22", 4)]:
        holds = A.check_identity(a, name).holds
        any_bad = any(
            A.evaluate_identity(a, name, [a.basis_vector(i) for i in t]).any()
            for t in itertools.product(range(3), repeat=arity)
        )
        assert holds == (not any_bad)


@pytest.mark.parametrize("q", ["e-1", "e-1+e0", "e0", "e2", "2*e-1+e1+3*e3"])
def test_power_relations_on_tp_algebras(z51, q):
    from tpoisson.expr import parse_element

    w = zs.mutate(z51, parse_element(q, 5, 5))
    for k in (1, 2, 3):
        assert A.check_identity(w, f"lemma22_{k}")
        for s in range(0, 2 * k + 1):
            assert A.check_identity(w, f"lemma23_{k}_{s}")


def test_operator_relation_failure_replays():
    rng = np.random.default_rng(3)
    c = rng.integers(0, P, (3, 3, 3))
    c = c + c.transpose(1, 0, 2)
    b = rng.integers(0, P, (3, 3, 3))
    b = b - b.transpose(1, 0, 2)
    a = A.TwoProductAlgebra(P, c, b)
    rep = A.check_identity(a, "lemma22_1")
    assert not rep.holds
    assert np.array_equal(A.replay_witness(a, rep), rep.residual)


# --- ideals and simplicity ----------------------------------------------------------------


def test_ideal_closure_examples(z51):
    w = zs.mutate(z51, z51.e(-1))
    assert A.ideal_closure(w, z51.e(3)).dim == 5
    assert A.ideal_closure(w, np.zeros((0, 5))).dim == 0
    s = A.direct_sum(w, w)
    first = np.concatenate([z51.e(3), np.zeros(5, dtype=np.int64)])
    assert A.ideal_closure(s, first) == la.Subspace.span(np.eye(10, dtype=np.int64)[:5], 10, P)


@given(st.integers(0, 2**32 - 1))
def test_ideal_closure_is_a_fixed_point(seed):
    rng = np.random.default_rng(seed)
    z = zs.build_zassenhaus(5, 1)
    a = A.direct_sum(zs.mutate(z, rng.integers(0, P, 5)), zs.mutate(z, rng.integers(0, P, 5)))
    ideal = A.ideal_closure(a, rng.integers(0, P, (1, 10)))
    assert A.ideal_closure(a, ideal.basis) == ideal


def test_simplicity_examples(z51):
    w = zs.mutate(z51, z51.e(-1))
    v = A.simplicity(w)
    assert v.verdict == "simple" and v.envelope_dim == 25
    s = A.simplicity(A.direct_sum(w, w))
    assert s.verdict == "not_simple"
    assert s.witness == la.Subspace.span(np.eye(10, dtype=np.int64)[:5], 10, P)


def test_every_mutation_over_f5_is_simple(z51):
    for coeffs in itertools.product(range(P), repeat=5):
        q = np.array(coeffs)
        if not q.any():
            continue
        assert A.simplicity(zs.mutate(z51, q, verify=False)).verdict == "simple"


def test_one_dimensional_zero_algebra_convention():
    a = A.zero_algebra(P, 1)
    assert A.simplicity(a).verdict == "not_simple"
    assert A.simplicity(a, trivial_one_dim_is_simple=True).verdict == "simple"


def test_simple_algebras_have_one_eigenvalue_per_split_operator(z51, rng):
    for _ in range(5):
        q = rng.integers(0, P, 5)
        if not q.any():
            continue
        w = zs.mutate(z51, q)
        assert A.simplicity(w)
        for x in list(np.eye(5, dtype=np.int64)) + list(rng.integers(0, P, (10, 5))):
            spec = la.eigenvalues_in_Fp(w.left(x), P)
            if spec.splits:
                assert len(spec.eigenvalues) == 1


# --- units, nilpotency, decomposition ------------------------------------------------------


def test_units_and_nilpotency(z51):
    w = zs.mutate(z51, z51.e(-1))
    n3 = zs.mutate(z51, z51.e(3))
    assert np.array_equal(A.find_unit(w), z51.e(-1))
    assert A.find_unit(n3) is None
    assert A.find_unit(A.zero_algebra(P, 3)) is None
    assert A.nilpotency_index(n3) == 3
    assert A.nilpotency_index(A.zero_algebra(P, 3)) == 2
    assert A.nilpotency_index(w) is None


def test_decompose_examples(z51):
    w = zs.mutate(z51, z51.e(-1))
    res = A.decompose(A.direct_sum(w, A.zero_algebra(P, 1)))
    assert res.kinds == ["unital", "nilpotent"]
    assert [b.space.dim for b in res.blocks] == [5, 1]
    assert np.array_equal(res.units[0], np.concatenate([z51.e(-1), [0]]))
    single = A.decompose(w)
    assert single.kinds == ["unital"]
    nil = A.decompose(zs.mutate(z51, z51.e(3)))
    assert nil.kinds == ["nilpotent"]


def _random_tp(rng, z):
    parts = []
    size = 0
    while size < 6:
        kind = rng.integers(0, 3)
        if kind == 0:
            q = rng.integers(0, P, 5)
            q[0] = rng.integers(1, P)
            parts.append(zs.mutate(z, q))
        elif kind == 1:
            q = rng.integers(0, P, 5)
            q[0] = 0
            parts.append(zs.mutate(z, q))
        else:
            parts.append(A.zero_algebra(P, 1))
        size += parts[-1].dim
    a = A.direct_sum(*parts)
    return a, A.change_basis(a, random_invertible(a.dim, P, rng)).with_flag(True)


@given(st.integers(0, 2**32 - 1))
def test_decompose_then_reassemble(seed):
    rng = np.random.default_rng(seed)
    z = zs.build_zassenhaus(5, 1)
    plain, a = _random_tp(rng, z)
    res = A.decompose(a, seed=seed)
    assert res.reassemble() == a
    assert sum(b.space.dim for b in res.blocks) == a.dim
    for b in res.blocks:
        # each block is an ideal for both products
        for t in (a.circ, a.bracket):
            prods = la.tensordot(b.space.basis, t, ([1], [0]), P).reshape(-1, a.dim)
            assert all(b.space.contains(v) for v in prods)
        if b.kind == "unital":
            sub_unit = A.find_unit(b.algebra)
            assert sub_unit is not None
        else:
            assert A.nilpotency_index(b.algebra) is not None
    # unital blocks are unchanged by the basis change, so their count is preserved
    n_unital = sum(1 for s in A.decompose(plain).kinds if s == "unital")
    assert res.kinds.count("unital") == n_unital


def test_decompose_fails_honestly_without_split_elements(z51):
    ext = A.direct_sum(field_ext(P, 2), field_ext(P, 2), zs.mutate(z51, z51.e(3)))
    rng = np.random.default_rng(7)
    # every new basis vector has a non-F_p component in both field factors
    while True:
        s = rng.integers(0, P, size=(9, 9))
        s[1] = rng.integers(1, P, size=9)
        s[3] = rng.integers(1, P, size=9)
        if la.rank(s, P) == 9:
            break
    a = A.change_basis(ext, s).with_flag(True)
    for i in range(a.dim):
        assert not la.eigenvalues_in_Fp(a.left(a.basis_vector(i)), P).splits
    with pytest.raises(DecompositionError, match="decomposition-over-F_p failed"):
        A.decompose(a, random_budget=0)


def test_decompose_rejects_non_tp():
    rng = np.random.default_rng(0)
    a = A.TwoProductAlgebra(P, rng.integers(0, P, (3, 3, 3)), rng.integers(0, P, (3, 3, 3)))
    with pytest.raises(UsageError):
        A.decompose(a)


# --- 1/2-derivations and TP structures ---------------------------------------------------


def _check_half_derivation(t, D, p):
    lhs = 2 * np.einsum("ijk,lk->ijl", t, D)
    rhs = np.einsum("ai,ajk->ijk", D, t) + np.einsum("bj,ibk->ijk", D, t)
    return not np.mod(lhs - rhs, p).any()


def test_half_derivation_examples(z51, z71):
    for z in (z51, z71):
        sp = A.half_derivations(zs.mutate(z, z.e(-1)))
        assert sp.dim == z.p
        for D in A.as_operators(sp, z.N):
            assert _check_half_derivation(z.bracket, D, z.p)
    assert A.half_derivations(A.sl2(P)).dim == 1
    assert A.half_derivations(A.zero_algebra(P, 3)).dim == 9


def test_left_bullet_multiplications_are_half_derivations(z51, z71):
    for z in (z51, z71):
        sp = A.half_derivations(zs.mutate(z, z.e(-1)))
        for i in range(-1, z.N - 1):
            assert sp.contains(z.bullet_left(z.e(i)).reshape(-1))


def _tp_space_dim_oracle(bracket, p):
    """Dimension of symmetric c with transposed Leibniz, via sympy over GF(p)."""
    d = bracket.shape[0]
    syms = {}
    for i in range(d):
        for j in range(i, d):
            for k in range(d):
                syms[(i, j, k)] = len(syms)
    c = lambda i, j, k: syms[(min(i, j), max(i, j), k)]  # noqa: E731
    rows = []
    for x, y, z, out in itertools.product(range(d), repeat=4):
        row = [0] * len(syms)
        # 2 x o [y,z]
        for m in range(d):
            if bracket[y, z, m]:
                row[c(x, m, out)] += 2 * int(bracket[y, z, m])
        # - [x o y, z] - [y, x o z]
        for m in range(d):
            row[c(x, y, m)] -= int(bracket[m, z, out])
            row[c(x, z, m)] -= int(bracket[y, m, out])
        rows.append([sympy.GF(p)(v % p) for v in row])
    dm = DomainMatrix(rows, (len(rows), len(syms)), sympy.GF(p))
    return len(syms) - dm.rank()


def test_tp_structures_on_witt_are_mutations(z51):
    lie = A.TwoProductAlgebra(5, np.zeros_like(z51.bracket), z51.bracket)
    sols = A.tp_structures_on(lie)
    assert len(sols) == 5 == _tp_space_dim_oracle(z51.bracket, 5)
    for t in sols:
        q = zs.mutation_tensor(z51, t)
        assert q is not None
        assert A.check_identity(A.TwoProductAlgebra(5, t, z51.bracket), "associativity")


def test_tp_structures_on_sl2_and_abelian():
    # sl_2 carries no nonzero transposed Poisson structure
    assert len(A.tp_structures_on(A.sl2(P))) == _tp_space_dim_oracle(A.sl2(P).bracket, P) == 0
    n = 3
    assert len(A.tp_structures_on(A.zero_algebra(P, n))) == n * n * (n + 1) // 2


def test_tp_structures_rejects_non_lie():
    rng = np.random.default_rng(0)
    b = rng.integers(0, P, (3, 3, 3))
    with pytest.raises(UsageError):
        A.tp_structures_on(A.TwoProductAlgebra(P, np.zeros_like(b), b))


# --- cocycles -------------------------------------------------------------------------------


def test_cocycle_examples(z51):
    w = zs.mutate(z51, z51.e(-1))
    rep = A.cocycle_check(w, z51.e(3))
    assert rep.holds and rep.detail["psi_nonzero"]
    zero = A.cocycle_check(w, np.zeros(5, dtype=np.int64))
    assert zero.holds and not zero.detail["psi_nonzero"]


def test_cocycle_fails_for_random_symmetric_product(z51):
    rng = np.random.default_rng(11)
    found = False
    for _ in range(20):
        c = rng.integers(0, P, (5, 5, 5))
        c = c + c.transpose(1, 0, 2)
        a = A.TwoProductAlgebra(P, c, z51.bracket)
        rep = A.cocycle_check(a, z51.e(3))
        if not rep.holds:
            i, j, k = rep.witness
            lam = z51.e(3)
            psi = lambda u, v: int(a.mul(u, v) @ lam) % P  # noqa: E731
            e = np.eye(5, dtype=np.int64)
            val = psi(a.br(e[i], e[j]), e[k]) + psi(a.br(e[k], e[i]), e[j]) + psi(a.br(e[j], e[k]), e[i])
            assert val % P == rep.residual[0]
            found = True
            break
    assert found


# --- generalized eigenspaces are ideals ------------------------------------------------------


@given(st.integers(0, 2**32 - 1))
def test_generalized_eigenspaces_are_ideals(seed):
    rng = np.random.default_rng(seed)
    _, a = _random_tp(rng, zs.build_zassenhaus(5, 1))
    ops = np.concatenate([a.left_all("circ"), a.left_all("bracket")])
    for i in range(a.dim):
        px = a.left(a.basis_vector(i))
        for lam in range(P):
            g = la.generalized_eigenspace(px, lam, P)
            assert all(g.is_invariant(op) for op in ops)
