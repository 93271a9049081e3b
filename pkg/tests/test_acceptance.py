"""
The acceptance criteria, one test each, at their stated sizes and
tolerances.  Each test records its verdict in conftest.ACCEPTANCE so the
terminal summary prints one PASS/FAIL line per criterion.
"""

import time

import numpy as np

from conftest import record
from hypunitary.formring import (
    AdditiveSubgroup as A,
    FormRing,
    build_quadratic,
    build_zmod,
    enumerate_form_parameters,
    make_form_ring,
)
from hypunitary.localize import (
    Localization,
    all_form_ideal_pairs,
    check_commuting_square,
    check_s0_injectivity,
    find_s0,
    localize,
    maximal_ideals,
)
from hypunitary.rng import SplitMix64
from hypunitary.suites import Checks, SuiteConfig, suite_length_congruences
from hypunitary.unitary import HyperbolicUnitary, entry_law_violations, propagation_violations, verify_relations

METHODS = ("definition", "entries", "blocks")


def all_configurations(R):
    for lam in R.center():
        if R.mul(lam, R.bar(lam)) == R.one:
            for Lam in enumerate_form_parameters(R, lam):
                yield FormRing(R, lam, Lam)


def z4_samples(fr, count, seed):
    G = HyperbolicUnitary(fr, 3)
    gens = G.elementary_generators()
    rng = SplitMix64(seed)
    mats = np.empty((count, G.N, G.N), dtype=np.uint8)
    for k in range(count):
        m = G.e
        for _ in range(1 + rng.below(12)):
            m = G.matmul(m, gens[rng.below(len(gens))])
        mats[k] = m
    return G, mats


def test_criterion_1_relations():
    desc = "relations R1-R6 exhaustive, n=3, Z/4 (4 configs), Z/2 (2), Gaussian mod 3; 0 failures, < 60 s"
    record(1, desc, False)
    t0 = time.perf_counter()
    frs = list(all_configurations(build_zmod(4))) + list(all_configurations(build_zmod(2)))
    assert len(frs) == 6
    frs += list(all_configurations(build_quadratic(3, 0, 1)))
    failures = 0
    for fr in frs:
        rep = verify_relations(fr, 3)
        assert rep["exhaustive"]
        failures += rep["failures"]
    elapsed = time.perf_counter() - t0
    assert failures == 0
    assert elapsed < 60, f"{elapsed:.1f} s"
    record(1, desc, True)


def test_criterion_2_membership_agreement(z2_small, z2_big):
    desc = "three membership tests agree on all of U_6(Z/2) and 10^4 EU products over Z/4; orders exact"
    record(2, desc, False)
    U = z2_big.enumerate_U()
    assert U.order == 1451520
    assert z2_small.enumerate_U().order == 40320
    G = z2_big.G
    for chunk in U.chunks():
        for method in METHODS:
            assert G.unitary_mask(chunk, method).all()
    # off-group matrices must be rejected by all three alike
    rng = SplitMix64(2)
    for _ in range(200):
        m = U.matrix(rng.below(U.order)).copy()
        m[rng.below(6), rng.below(6)] ^= 1
        if G.is_invertible(m):
            verdicts = {G.is_unitary(m, method) for method in METHODS}
            assert len(verdicts) == 1
    disagreements = 0
    for k, fr in enumerate(all_configurations(build_zmod(4))):
        Gz, mats = z4_samples(fr, 10_000, seed=100 + k)
        masks = [Gz.unitary_mask(mats, method) for method in METHODS]
        disagreements += int((masks[0] != masks[1]).sum() + (masks[0] != masks[2]).sum())
        assert masks[0].all()
    assert disagreements == 0
    record(2, desc, True)


def test_criterion_3_block_inverse(z2_engines):
    desc = "block inverse formula equals the true inverse: all of the Z/2 enumerations, sampled over Z/4"
    record(3, desc, False)
    for E in z2_engines.values():
        G = E.G
        for chunk in E.enumerate_U().chunks():
            inv = G.block_inverse(chunk)
            assert G.is_identity(G.matmul(inv, chunk)).all()
            assert G.is_identity(G.matmul(chunk, inv)).all()
    for k, fr in enumerate(all_configurations(build_zmod(4))):
        G, mats = z4_samples(fr, 2000, seed=200 + k)
        inv = G.block_inverse(mats)
        assert G.is_identity(G.matmul(inv, mats)).all() and G.is_identity(G.matmul(mats, inv)).all()
    record(3, desc, True)


def test_criterion_4_propagation_and_entry_law(z2_engines):
    desc = "row/column propagation and the entry law hold on the full Z/2 enumerations"
    record(4, desc, False)
    for E in z2_engines.values():
        for chunk in E.enumerate_U().chunks():
            assert not entry_law_violations(E.G, chunk).any()
            assert not propagation_violations(E.G, chunk).any()
    record(4, desc, True)


def test_criterion_5_double_equality(z2_engines):
    desc = "[EU(I,G),EU] = [CU(I,G),EU] = EU(I,G) as sets for every Z/2 form ideal, n=3"
    record(5, desc, False)
    for E in z2_engines.values():
        EU = E.eu_group()
        for fi in E.form_ideals():
            rel = E.eu_rel(fi)
            assert E.commutator_subgroup(rel, EU) == rel
            assert E.commutator_subgroup(E.full_congruence(fi), EU) == rel
    record(5, desc, True)


def test_criterion_6_sandwich(z2_engines):
    desc = "50 seeded E-normal subgroups per Z/2 configuration are sandwiched at exactly one level, < 30 min"
    record(6, desc, False)
    t0 = time.perf_counter()
    for E in z2_engines.values():
        samples = E.sample_E_normal(seed=7, count=50)
        assert len(samples) == 50
        for H in samples:
            assert E.is_E_normal(H)
            rep = E.sandwich_check(H)
            assert rep["passed"], rep
            assert E.sandwiching_levels(H) == [E.level_of(H).form_ideal]
    assert time.perf_counter() - t0 < 30 * 60
    record(6, desc, True)


def test_criterion_7_level_consistency(z2_engines):
    desc = "level_of recovers (I,G) from EU(I,G) and from U((I,G)) for every Z/2 form ideal"
    record(7, desc, False)
    for E in z2_engines.values():
        for fi in E.form_ideals():
            assert E.level_of(E.eu_rel(fi)).form_ideal == fi
            assert E.level_of(E.principal_congruence(fi)).form_ideal == fi
    record(7, desc, True)


def test_criterion_8_length_congruences():
    desc = "commutator length congruences on 10^3 seeded pairs over (Z/4, 1, {0,2}), I={0,2}"
    record(8, desc, False)
    fr = make_form_ring(build_zmod(4), 1, A([0, 2]))
    out = Checks()
    suite_length_congruences(SuiteConfig("lemma46", fr, seed=7, samples=1000), out, [A([0, 2])])
    assert [r["status"] for r in out.records] == ["pass"]
    assert out.records[0]["witness"] == {"pairs": 1000}
    record(8, desc, True)


def test_criterion_9_localization():
    desc = "Z/6: maximal ideals, localized order, s0 for every pair, commuting square, injectivity on 10^3 pairs"
    record(9, desc, False)
    R = build_zmod(6)
    assert maximal_ideals(R) == [A([0, 3]), A([0, 2, 4])]
    assert localize(R, [1, 3, 5]).order == 2
    configs = list(all_configurations(R))
    assert len(configs) == 4  # lambda in {1, 5}, two parameters each
    for fr in configs:
        G = HyperbolicUnitary(fr, 3)
        for m, fi in all_form_ideal_pairs(fr):
            loc = Localization.at(fr, m)
            s0 = find_s0(fr, loc.S, fi)
            for g in G.elementary_generators():
                assert check_commuting_square(loc, fi, g)["ok"]
            rep = check_s0_injectivity(loc, fi, s0, samples=1000, seed=7)
            assert rep["ok"], rep["violations"][:1]
    record(9, desc, True)


def test_criterion_10_form_parameter_tables():
    desc = "form parameter tables for Z/4 (lambda=1, 3) and Z/2"
    record(10, desc, False)
    assert enumerate_form_parameters(build_zmod(4), 1) == [A([0]), A([0, 2])]
    assert enumerate_form_parameters(build_zmod(4), 3) == [A([0, 2]), A(range(4))]
    assert enumerate_form_parameters(build_zmod(2), 1) == [A([0]), A([0, 1])]
    record(10, desc, True)
