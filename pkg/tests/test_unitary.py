import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypunitary.formring import AdditiveSubgroup as A, FormIdeal, RingError, build_quadratic, build_zmod, make_form_ring
from hypunitary.rng import SplitMix64
from hypunitary.unitary import (
    HyperbolicUnitary,
    SingularMatrixError,
    check_length_congruences,
    entry_law_violations,
    eps,
    pos,
    propagation_violations,
    q_reduction_violations,
    verify_relations,
)


def ctx(m=4, lam=1, Lam="max", n=3):
    return HyperbolicUnitary(make_form_ring(build_zmod(m), lam, Lam), n)


def random_eu(G, rng, length=10):
    gens = G.elementary_generators()
    out = G.e.copy()
    for _ in range(length):
        out = G.matmul(out, gens[rng.below(len(gens))])
    return out


def naive_h(m, lam, n, u, v):
    """h over Z/m (identity involution) with plain integers."""
    N = 2 * n
    f = lambda a, b: sum(a[k] * b[N - 1 - k] for k in range(n))
    return (f(u, v) + lam * f(v, u)) % m


def naive_unitary(m, lam, Lam, n, s):
    """Definition of the group by brute force over all vector pairs (Z/m only)."""
    N = 2 * n
    vecs = list(itertools.product(range(m), repeat=N))
    S = np.asarray(s, dtype=np.int64)
    length = lambda v: sum(v[k] * v[N - 1 - k] for k in range(n)) % m
    for u in vecs:
        su = tuple(int(x) for x in (S @ np.array(u)) % m)
        if (length(su) - length(u)) % m not in Lam:
            return False
        for v in vecs:
            sv = tuple(int(x) for x in (S @ np.array(v)) % m)
            if naive_h(m, lam, n, su, sv) != naive_h(m, lam, n, u, v):
                return False
    return True


# -- indices ---------------------------------------------------------------


def test_indices():
    assert eps(3) == 1 and eps(-2) == -1
    with pytest.raises(ValueError):
        eps(0)
    assert pos(1, 3) == 1 and pos(-3, 3) == 4 and pos(-1, 3) == 6
    with pytest.raises(ValueError):
        pos(4, 3)


def test_forms_examples():
    G = ctx(2, 1, "max")
    e1, em1 = G.basis(1), G.basis(-1)
    assert G.form_f(e1, em1) == 1
    assert G.form_f(em1, e1) == 0 and G.form_h(em1, e1) == 1
    z = np.zeros(6, dtype=np.uint8)
    assert G.form_f(z, z) == 0 and G.form_h(z, z) == 0 and G.length(z) == 0


@settings(max_examples=80, deadline=None)
@given(u=st.lists(st.integers(0, 3), min_size=6, max_size=6),
       v=st.lists(st.integers(0, 3), min_size=6, max_size=6), lam=st.sampled_from([1, 3]))
def test_h_matches_integer_formula(u, v, lam):
    G = HyperbolicUnitary(make_form_ring(build_zmod(4), lam, "max"), 3)
    assert G.form_h(np.array(u, np.uint8), np.array(v, np.uint8)) == naive_h(4, lam, 3, u, v)


def test_q_reduction_identity():
    for m, lam, L, n in ((2, 1, "max", 3), (2, 1, "min", 3), (4, 1, "min", 2), (4, 3, "max", 2), (3, 1, "min", 2)):
        assert q_reduction_violations(ctx(m, lam, L, n)) == 0
    G = HyperbolicUnitary(make_form_ring(build_quadratic(3, 0, 1), 1, "min"), 2)
    assert q_reduction_violations(G) == 0


# -- membership ------------------------------------------------------------


def test_is_unitary_examples():
    G = ctx(2, 1, "max")
    for method in ("definition", "entries", "blocks"):
        assert G.is_unitary(G.e, method)
        assert G.is_unitary(G.T(1, 2, 1), method)
    Gs = ctx(2, 1, "min")
    bad = Gs.e.copy()
    bad[0, 1] = 1
    for method in ("definition", "entries", "blocks"):
        assert not Gs.is_unitary(bad, method)
    with pytest.raises(SingularMatrixError):
        G.is_unitary(G.zero_matrix())


@pytest.mark.parametrize("lam,Lam", [(1, "min"), (1, "max"), (3, "min"), (3, "max")])
def test_membership_against_brute_force_definition(lam, Lam):
    # n=2 over Z/4 keeps the brute-force pair sweep small
    fr = make_form_ring(build_zmod(4), lam, Lam)
    G = HyperbolicUnitary(fr, 2)
    rng = SplitMix64(11)
    mats = [random_eu(G, rng, 6) for _ in range(4)]
    for _ in range(4):
        m = G.e.copy()
        m[rng.below(4), rng.below(4)] = rng.below(4)
        if G.is_invertible(m):
            mats.append(m)
    for s in mats:
        want = naive_unitary(4, lam, set(fr.Lam), 2, s)
        for method in ("definition", "entries", "blocks"):
            assert G.is_unitary(s, method) == want


def test_in_AH_examples():
    G = ctx(4, 1, A([0, 2]))
    z = np.zeros((3, 3), dtype=np.uint8)
    assert G.in_AH(z)
    d = z.copy()
    np.fill_diagonal(d, 2)
    assert G.in_AH(d)
    np.fill_diagonal(d, 1)
    assert not G.in_AH(d)


def test_inverse_examples():
    G = ctx(2, 1, "max")
    assert np.array_equal(G.unitary_inverse(G.e), G.e)
    t = G.T(1, 2, 1)
    assert np.array_equal(G.unitary_inverse(t), t)
    G4 = ctx(4, 1, "max")
    rng = SplitMix64(5)
    for _ in range(50):
        s = random_eu(G4, rng)
        inv = G4.unitary_inverse(s)
        assert G4.is_identity(G4.matmul(inv, s)) and G4.is_identity(G4.matmul(s, inv))
    with pytest.raises(ValueError):
        bad = G4.e.copy()
        bad[0, 1] = 1
        G4.unitary_inverse(bad)


@pytest.mark.parametrize("m,lam,Lam", [(4, 1, "max"), (4, 3, "min"), (3, 1, "min")])
def test_entry_law_and_propagation_on_samples(m, lam, Lam):
    G = ctx(m, lam, Lam)
    rng = SplitMix64(2)
    mats = np.stack([random_eu(G, rng) for _ in range(300)] + [G.P(1, 2), G.P(1, -3)])
    assert not entry_law_violations(G, mats).any()
    assert not propagation_violations(G, mats).any()


# -- root elements ---------------------------------------------------------


def test_root_element_examples():
    G = ctx(4, 1, A([0, 2]))
    assert np.array_equal(G.T(1, 2, 0), G.e)
    t = G.T(1, 2, 3)
    assert t[0, 1] == 3 and t[pos(-2, 3) - 1, pos(-1, 3) - 1] == 1
    t = G.T(1, -2, 1)
    assert t[pos(2, 3) - 1, pos(-1, 3) - 1] == 3  # -bar(lam) * bar(1)
    assert np.array_equal(G.T(1, -1, 0), G.e)
    assert G.T(1, -1, 2)[0, 5] == 2
    with pytest.raises(ValueError):
        G.T(1, -1, 1)
    with pytest.raises(ValueError):
        G.T_short(1, -1, 1)


def test_P_matches_product_everywhere():
    gauss = HyperbolicUnitary(make_form_ring(build_quadratic(3, 0, 1), 1, "min"), 3)
    contexts = [ctx(m, lam, L) for m, lam, L in ((2, 1, "max"), (4, 1, "min"), (4, 3, "max"), (3, 1, "min"))]
    for G in contexts + [gauss]:
        R = G.ring
        for i in G.omega:
            for j in G.omega:
                if i in (j, -j):
                    continue
                P = G.P(i, j)
                assert np.array_equal(P, G.mul(G.T(i, j, R.one), G.T(j, i, R.neg(R.one)), G.T(i, j, R.one)))
                assert G.is_identity(G.matmul(P, G.inverse(P)))


def test_conjugation_by_P_moves_last_row_pattern():
    # conjugating by P_1n carries a matrix whose n-th row is f_n to one whose first row is f_1
    G = ctx(4, 1, "max")
    rng = SplitMix64(3)
    hits = 0
    for _ in range(200):
        s = random_eu(G, rng, 6)
        if not (s[2] == G.e[2]).all():
            continue
        t = G.conjugate(G.P(1, 3), s)
        assert (t[0] == G.e[0]).all()
        hits += 1
    assert hits > 0
    t = G.conjugate(G.P(1, 3), G.T(1, 2, 1))  # row 3 of T_12(1) is f_3
    assert (t[0] == G.e[0]).all()


def test_relation_instances():
    G = ctx(2, 1, "max")
    assert G.is_identity(G.matmul(G.T(1, 2, 1), G.T(1, 2, 1)))
    assert np.array_equal(G.commutator(G.T(1, 2, 1), G.T(2, 3, 1)), G.T(1, 3, 1))


@pytest.mark.parametrize("m,lam,Lam", [(2, 1, "max"), (2, 1, "min"), (4, 1, "min"), (4, 1, "max"),
                                       (4, 3, "min"), (4, 3, "max")])
def test_relations_zero_failures(m, lam, Lam):
    rep = verify_relations(make_form_ring(build_zmod(m), lam, Lam), 3)
    assert rep["exhaustive"] and rep["failures"] == 0
    assert set(rep["relations"]) == {"R1", "R2", "R3", "R4", "R5", "R6"}


def test_relations_sampled_mode_needs_rng():
    fr = make_form_ring(build_zmod(16), 1, "min")
    with pytest.raises(ValueError):
        verify_relations(fr, 3, exhaustive=False)
    rep = verify_relations(fr, 3, exhaustive=False, samples=16, rng=SplitMix64(1))
    assert not rep["exhaustive"] and rep["failures"] == 0


# -- congruence ------------------------------------------------------------


def test_congruence_examples():
    G = ctx(4, 1, A([0, 2]))
    fis = [FormIdeal(A([0]), A([0])), FormIdeal(A([0, 2]), A([0])), FormIdeal(A([0, 2]), A([0, 2])),
           FormIdeal(A(range(4)), A([0, 2]))]
    for fi in fis:
        assert G.in_principal_congruence(G.e, fi)
        for x in range(4):
            assert G.in_principal_congruence(G.T(1, 2, x), fi) == (x in fi.I)
    # long root with alpha in I but outside Gamma fails on the length condition only
    assert not G.in_principal_congruence(G.T(-1, 1, 2), FormIdeal(A([0, 2]), A([0])))
    assert G.in_principal_congruence(G.T(-1, 1, 2), FormIdeal(A([0, 2]), A([0, 2])))
    with pytest.raises(RingError):
        G.in_principal_congruence(G.e, FormIdeal(A([0]), A([0, 2])))


def test_elementary_level_examples():
    G = ctx(4, 1, A([0, 2]))
    fi = FormIdeal(A([0]), A([0]))
    assert G.is_elementary_of_level(1, 2, 0, fi)
    assert not G.is_elementary_of_level(1, 2, 1, fi)
    assert G.is_elementary_of_level(-1, 1, 2, FormIdeal(A([0, 2]), A([0, 2])))
    with pytest.raises(ValueError):
        G.is_elementary_of_level(1, 1, 0, fi)


def test_J_ideal_examples():
    G = ctx(4, 1, "max")
    assert G.J_ideal(G.e) == A([0])
    assert G.J_ideal(G.T(1, 2, 2)) == A([0, 2])
    d = G.e.copy()
    for k in range(6):
        d[k, k] = 3
    assert G.J_ideal(d) == A([0])


def test_length_congruence_examples():
    G = ctx(4, 1, A([0, 2]))
    I = A([0, 2])
    for move in (("short", 1, 2, 1), ("short", 2, -1, 3), ("long", -1, 2), ("long", 2, 2)):
        rep = check_length_congruences(G, G.e, I, move)
        assert rep["ok"] and G.is_identity(rep["commutator"])
        assert check_length_congruences(G, G.T(1, -1, 2), I, move)["ok"]
    with pytest.raises(ValueError):
        check_length_congruences(G, G.T(1, 2, 1), I, ("short", 1, 2, 1))


def test_convert_basis():
    G = ctx(4, 1, "max")
    assert np.array_equal(G.convert_basis(G.e), G.e)
    rng = SplitMix64(9)
    for _ in range(10):
        s = random_eu(G, rng)
        assert np.array_equal(G.convert_basis(G.convert_basis(s)), s)
    b = np.zeros((6, 6), dtype=np.uint8)
    b[:3, 3:] = np.arange(9).reshape(3, 3) % 4
    out = G.convert_basis(b)
    assert np.array_equal(out[:3, 3:], b[:3, 3:][:, ::-1]) and not out[3:].any() and not out[:3, :3].any()
