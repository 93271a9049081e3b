"""
Localization of finite form rings at a maximal ideal of the central subring C,
and the finite checks built on it: the commuting square, the s0 property,
noncentrality witnesses and supplemented bases.

For finite rings a fraction r/s with s in S is decided by the kernel
K = {r : t*r = 0 for some t in S}: multiplication by s is injective on R/K,
hence bijective, so every class r/s has a representative r'/1 and
S^-1 R is R/K with the induced operations.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .formring import (
    AdditiveSubgroup,
    FiniteRing,
    FormIdeal,
    FormRing,
    RingError,
    additive_span,
    enumerate_form_ideals,
    gamma_of,
    subgroup_sum,
    subring_C,
    validate_form_ring,
)
from .groups import Engine, FiniteSubgroup, congruence_generators
from .rng import SplitMix64
from .unitary import HyperbolicUnitary

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# C, maximal ideals, multiplicative sets


def default_C(ring: FiniteRing) -> AdditiveSubgroup:
    """C built from the full center."""
    return subring_C(ring, ring.center())


def _c_ideals(ring: FiniteRing, C: AdditiveSubgroup) -> list[AdditiveSubgroup]:
    """All ideals of the commutative subring C (as subsets of the ring)."""
    principal = {additive_span(ring, [ring.mul(c, x) for c in C]) for x in C}
    found = set(principal)
    frontier = list(found)
    while frontier:
        nxt = []
        for a in frontier:
            for p in principal:
                if p <= a:
                    continue
                s = subgroup_sum(ring, a, p)
                if s not in found:
                    found.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), s.elements))


def maximal_ideals(ring: FiniteRing, C: AdditiveSubgroup | None = None) -> list[AdditiveSubgroup]:
    """
    Maximal ideals of C (default: the whole ring, which must then be
    commutative).  Sorted by size, then elements.
    """
    if C is None:
        if not ring.is_commutative():
            raise RingError(f"{ring.name} is not commutative; pass the subring C")
        C = AdditiveSubgroup(ring.elements)
    else:
        if not C <= ring.center():
            raise RingError("C must be central")
    proper = [J for J in _c_ideals(ring, C) if ring.one not in J]
    return [J for J in proper if not any(J < K for K in proper)]


@dataclass(frozen=True)
class MultiplicativeSet:
    ring: FiniteRing
    elements: tuple

    def __post_init__(self):
        R, S = self.ring, set(self.elements)
        if R.one not in S:
            raise RingError("multiplicative set must contain 1")
        if R.zero in S:
            raise RingError("multiplicative set must not contain 0")
        for a in S:
            if a not in R.center():
                raise RingError(f"{R.label(a)} is not central")
            for b in S:
                if R.mul(a, b) not in S:
                    raise RingError(f"not closed: {R.label(a)}*{R.label(b)}")

    def __contains__(self, x):
        return x in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    @classmethod
    def complement(cls, ring: FiniteRing, C: AdditiveSubgroup, m: AdditiveSubgroup) -> MultiplicativeSet:
        """S_m = C minus m."""
        return cls(ring, tuple(sorted(c for c in C if c not in m)))


# --------------------------------------------------------------------------
# the localized ring


class LocalizedRing(FiniteRing):
    """
    S^-1 R as pair classes.  ``f[r]`` is the class of r/1, ``rep[k]`` the
    smallest r with r/1 in class k.
    """

    def __init__(self, base: FiniteRing, S: MultiplicativeSet):
        R = base
        M = R.mul_table
        S_list = list(S)
        killed = np.zeros(R.order, dtype=bool)
        for t in S_list:
            killed |= M[t, :] == R.zero
        self.K = AdditiveSubgroup(np.nonzero(killed)[0].tolist())
        # class label of r/1 = smallest element of the coset r + K
        coset_min = np.array([min(R.add(r, k) for k in self.K) for r in R.elements], dtype=np.int64)
        reps = sorted(set(coset_min.tolist()))
        index = {r: k for k, r in enumerate(reps)}
        f = np.array([index[int(c)] for c in coset_min], dtype=np.uint8)
        add = np.array([[f[R.add(a, b)] for b in reps] for a in reps], dtype=np.uint8)
        mul = np.array([[f[R.mul(a, b)] for b in reps] for a in reps], dtype=np.uint8)
        inv = np.array([f[R.bar(a)] for a in reps], dtype=np.uint8)
        labels = [f"{R.label(r)}/1" for r in reps]
        super().__init__(add, mul, inv, int(f[R.zero]), int(f[R.one]), labels,
                         name=f"S^-1 {R.name}")
        self.base = R
        self.S = S
        self.f = f
        self.f.flags.writeable = False
        self.rep = np.array(reps, dtype=np.uint8)
        # r/s = r'/1 with r' s - r in K
        self._over = {}
        for s in S_list:
            row = {}
            for r in R.elements:
                for r2 in R.elements:
                    if killed[R.sub(R.mul(r2, s), r)]:
                        row[r] = int(f[r2])
                        break
                else:
                    raise RingError(f"{R.label(s)} is not invertible modulo the kernel")
            self._over[s] = row
        bad = self.axiom_violations()
        if bad:
            raise RingError("localization is not a ring with involution: " + "; ".join(bad))

    def pair(self, r: int, s: int) -> int:
        """The class of the fraction r/s."""
        if s not in self.S:
            raise RingError(f"{self.base.label(s)} is not in S")
        return self._over[s][r]

    def pair_equivalent(self, p: tuple[int, int], q: tuple[int, int]) -> bool:
        """(r, s) ~ (r', s') iff t(r s' - r' s) = 0 for some t in S (the defining relation)."""
        R = self.base
        (r, s), (r2, s2) = p, q
        d = R.sub(R.mul(r, s2), R.mul(r2, s))
        return any(R.mul(t, d) == R.zero for t in self.S)

    def F(self, mats: np.ndarray) -> np.ndarray:
        """Entrywise localization of matrices."""
        return self.f[np.asarray(mats)]

    def image(self, X: Iterable[int]) -> AdditiveSubgroup:
        """S^-1 X = {x/s : x in X, s in S}."""
        return AdditiveSubgroup({self.pair(x, s) for x in X for s in self.S})


def localize(ring: FiniteRing, S: MultiplicativeSet | Iterable[int]) -> LocalizedRing:
    if not isinstance(S, MultiplicativeSet):
        S = MultiplicativeSet(ring, tuple(sorted(set(S))))
    return LocalizedRing(ring, S)


def localized_form_ring(fr: FormRing, L: LocalizedRing) -> FormRing:
    fm = FormRing(L, int(L.f[fr.lam]), L.image(fr.Lam))
    bad = validate_form_ring(fm)
    if bad:
        raise RingError("localized form ring invalid: " + "; ".join(bad))
    return fm


def localized_level(fi: FormIdeal, L: LocalizedRing) -> FormIdeal:
    return FormIdeal(L.image(fi.I), L.image(fi.Gamma))


@dataclass
class Localization:
    """Everything attached to one maximal ideal m: S_m, R_m, the localized form ring."""

    fr: FormRing
    C: AdditiveSubgroup
    m: AdditiveSubgroup
    S: MultiplicativeSet
    L: LocalizedRing
    fr_m: FormRing

    @classmethod
    def at(cls, fr: FormRing, m: AdditiveSubgroup, C: AdditiveSubgroup | None = None) -> Localization:
        C = default_C(fr.ring) if C is None else C
        S = MultiplicativeSet.complement(fr.ring, C, m)
        L = localize(fr.ring, S)
        return cls(fr, C, m, S, L, localized_form_ring(fr, L))

    def level(self, fi: FormIdeal) -> FormIdeal:
        return localized_level(fi, self.L)


# --------------------------------------------------------------------------
# commuting square and noncentrality


def check_commuting_square(loc: Localization, fi: FormIdeal, sigma: np.ndarray,
                           tau: np.ndarray | None = None, n: int = 3) -> dict:
    """
    Representative-level check of the square: sigma and tau congruent modulo
    U((I, Gamma)) must have localizations congruent modulo U((I_m, Gamma_m)).
    Also checks that F_m lands in the localized unitary group.
    """
    G = HyperbolicUnitary(loc.fr, n)
    Gm = HyperbolicUnitary(loc.fr_m, n)
    fim = loc.level(fi)
    tau = sigma if tau is None else tau
    out = {"image_unitary": bool(Gm.unitary_mask(loc.L.F(np.stack([sigma, tau]))).all())}
    congruent = bool(G.congruence_mask(G.matmul(G.inverse(sigma), tau), fi))
    out["congruent"] = congruent
    if congruent:
        h = Gm.matmul(Gm.inverse(loc.L.F(sigma)), loc.L.F(tau))
        out["image_congruent"] = bool(Gm.congruence_mask(h, fim))
        out["ok"] = out["image_unitary"] and out["image_congruent"]
    else:
        out["ok"] = out["image_unitary"]
    return out


def find_noncentral_witness(fr: FormRing, g: np.ndarray, fi: FormIdeal, U_gens: Sequence[np.ndarray],
                            n: int = 3, C: AdditiveSubgroup | None = None) -> tuple[AdditiveSubgroup, np.ndarray]:
    """
    A maximal ideal m of C with I∩C in m such that the localized class of g
    is noncentral, shown by a partner whose commutator with F_m(g) leaves
    U((I_m, Gamma_m)).  Partners tried: F_m of ``U_gens``, then the localized
    elementary generators.
    """
    G = HyperbolicUnitary(fr, n)
    g = np.asarray(g, dtype=np.uint8)
    gens = np.stack(list(U_gens)) if len(U_gens) else np.zeros((0, G.N, G.N), np.uint8)
    if len(gens) == 0 or _commutes(G, g, gens, fi).all():
        raise RingError("no witness exists: g is central modulo U((I, Gamma))")
    C = default_C(fr.ring) if C is None else C
    IC = AdditiveSubgroup(x for x in fi.I if x in C)
    for m in maximal_ideals(fr.ring, C):
        if not IC <= m:
            continue
        loc = Localization.at(fr, m, C)
        Gm = HyperbolicUnitary(loc.fr_m, n)
        fim = loc.level(fi)
        partners = np.concatenate([loc.L.F(gens), np.stack(Gm.elementary_generators())])
        ok = _commutes(Gm, loc.L.F(g), partners, fim)
        if not ok.all():
            return m, partners[int(np.nonzero(~ok)[0][0])]
    raise RingError("no maximal ideal exhibits noncentrality (counterexample found)")


def _commutes(G: HyperbolicUnitary, s: np.ndarray, taus: np.ndarray, fi: FormIdeal) -> np.ndarray:
    com = G.matmul(G.matmul(G.matmul(s[None], taus), G.inverse(s)[None]), G.inverse(taus))
    return G.congruence_mask(com, fi)


# --------------------------------------------------------------------------
# the s0 property


def s0_violations(fr: FormRing, S: MultiplicativeSet, fi: FormIdeal, s0: int) -> list[tuple]:
    """
    Counterexamples (property, x, t) to: x in s0 R and t x in I (resp. Gamma)
    for some t in S imply x in I (resp. Gamma).
    """
    R = fr.ring
    out = []
    for x in sorted({R.mul(s0, r) for r in R.elements}):
        for prop, target in ((1, fi.I), (2, fi.Gamma)):
            if x in target:
                continue
            for t in S:
                if R.mul(t, x) in target:
                    out.append((prop, x, t))
                    break
    return out


def find_s0(fr: FormRing, S: MultiplicativeSet, fi: FormIdeal) -> int:
    """Smallest s0 in S with both properties; failure is a counterexample."""
    for s in S:
        if not s0_violations(fr, S, fi, s):
            return s
    raise RingError("no s0 in S satisfies both properties (counterexample found)")


def check_s0_injectivity(loc: Localization, fi: FormIdeal, s0: int, samples: int,
                         seed: int = 0, n: int = 3, word_length: int = 6) -> dict:
    """
    Sample g1, g2 in U((s0 R, s0 Lambda)); whenever F_m(g1^-1 g2) lies in
    U((I_m, Gamma_m)), require g1^-1 g2 in U((I, Gamma)).  Half the pairs
    take g2 = g1 k with k built from (I, Gamma)-roots inside the s0 level,
    so the hypothesis is exercised.
    """
    fr, R = loc.fr, loc.fr.ring
    G = HyperbolicUnitary(fr, n)
    Gm = HyperbolicUnitary(loc.fr_m, n)
    fim = loc.level(fi)
    s0R = AdditiveSubgroup({R.mul(s0, r) for r in R.elements})
    s0L = additive_span(R, [R.mul(s0, x) for x in fr.Lam])
    lvl = FormIdeal(s0R, s0L)
    base = congruence_generators(G, s0R, s0L)
    inner = congruence_generators(G, AdditiveSubgroup(x for x in fi.I if x in s0R),
                                  AdditiveSubgroup(y for y in fi.Gamma if y in s0L))
    eu = G.elementary_generators()
    rng = SplitMix64(seed)

    def word(pool):
        out = G.e.copy()
        for _ in range(word_length):
            x = pool[rng.below(len(pool))]
            c = eu[rng.below(len(eu))]
            out = G.matmul(out, G.conjugate(c, x))
        return out

    report = {"samples": samples, "hypothesis_true": 0, "violations": [], "outside_s0_level": 0}
    if not base:
        report["note"] = "s0 level has no nontrivial root elements"
        return report
    for k in range(samples):
        g1 = word(base)
        if k % 2 and inner:
            g2 = G.matmul(g1, word(inner))
        else:
            g2 = word(base)
        if not G.congruence_mask(np.stack([g1, g2]), lvl).all():
            report["outside_s0_level"] += 1
            continue
        h = G.matmul(G.inverse(g1), g2)
        if bool(Gm.congruence_mask(loc.L.F(h), fim)):
            report["hypothesis_true"] += 1
            if not bool(G.congruence_mask(h, fi)):
                report["violations"].append(h.tolist())
    report["ok"] = not report["violations"] and report["outside_s0_level"] == 0
    return report


def check_scaling(G: HyperbolicUnitary, sigma: np.ndarray, i: int, j: int, x: int, s: int,
                  fi: FormIdeal) -> bool:
    """
    [sigma, T_ij(x)] and [sigma, T_ij(s x)] are in U((I, I∩Lambda))
    together, for s the image of an element of S (a unit of the localization).
    """
    R = G.ring
    lvl = FormIdeal(fi.I, fi.I & G.fr.Lam)
    a = G.congruence_mask(G.commutator(sigma, G.T(i, j, x)), lvl)
    b = G.congruence_mask(G.commutator(sigma, G.T(i, j, R.mul(s, x))), lvl)
    return bool(a) == bool(b)


# --------------------------------------------------------------------------
# supplemented bases


def supplemented_base_axioms(A: Sequence[FiniteSubgroup], B: Sequence[FiniteSubgroup],
                             gens: Sequence[np.ndarray]) -> dict:
    """
    Check that (A, B) is a supplemented base.  The conjugation condition is
    tested for ``gens`` and their inverses, which suffices for the group they
    generate (chain the V's along a word).
    """
    report = {"nontrivial": True, "intersection": True, "conjugation": True,
              "B_in_A": True, "B_refines": True, "failures": []}

    def fail(key, what):
        report[key] = False
        report["failures"].append(what)

    for k, H in enumerate(list(A) + list(B)):
        if H.order <= 1:
            fail("nontrivial", f"member {k} is trivial")
    for (a, U), (b, V) in itertools.product(enumerate(A), repeat=2):
        if not any(W.issubset(U) and W.issubset(V) for W in A):
            fail("intersection", f"A[{a}] ∩ A[{b}] contains no member of A")
    if A:
        G = A[0].engine.G
        conj = list(gens) + [G.inverse(g) for g in gens]
        for a, U in enumerate(A):
            for t, g in enumerate(conj):
                found = False
                for V in A:
                    if all(U.contains(G.conjugate(g, v)[None])[0] for v in V.generators):
                        found = True
                        break
                if not found:
                    fail("conjugation", f"no V in A with gVg^-1 inside A[{a}] for generator {t}")
    for b, V in enumerate(B):
        if not any(V.issubset(U) for U in A):
            fail("B_in_A", f"B[{b}] lies in no member of A")
    for (a, U), (b, V) in itertools.product(enumerate(A), enumerate(B)):
        if not any(W.issubset(U) and W.issubset(V) for W in B):
            fail("B_refines", f"A[{a}] ∩ B[{b}] contains no member of B")
    report["ok"] = not report["failures"]
    return report


def base_families(engine: Engine, fi: FormIdeal, S: MultiplicativeSet, s0: int) -> dict:
    """
    The finite families A = {EU(s s0 R, s s0 Lambda)} and
    B = {EU(R x s0 R, Gamma(x s0))}, with the form ideals behind them.
    Entries x whose defining form ideal does not exist are listed as skipped.
    """
    fr, R = engine.fr, engine.fr.ring
    a_levels = []
    for s in S:
        c = R.mul(s, s0)
        lvl = FormIdeal(AdditiveSubgroup({R.mul(c, r) for r in R.elements}),
                        additive_span(R, [R.mul(c, x) for x in fr.Lam]))
        if lvl not in a_levels:
            a_levels.append(lvl)
    b_levels, skipped = [], []
    for x in R.elements:
        xs = R.mul(x, s0)
        cond = xs not in fi.I or (x in fr.Lam and xs in fi.I and xs not in fi.Gamma)
        if not cond:
            continue
        try:
            lvl = gamma_of(fr, fi, xs)
        except RingError as exc:
            skipped.append((x, str(exc)))
            continue
        if lvl not in b_levels:
            b_levels.append(lvl)
    return {
        "A_levels": a_levels,
        "B_levels": b_levels,
        "A": [engine.eu_pre(l) for l in a_levels],
        "B": [engine.eu_pre(l) for l in b_levels],
        "skipped": skipped,
    }


def localized_families(loc: Localization, fam: dict, engine_m: Engine) -> dict:
    """F_m applied to the families: closures of the localized generators."""
    def image(H):
        return engine_m.closure(loc.L.F(np.stack(H.generators)) if H.generators else [])
    return {"A": [image(H) for H in fam["A"]], "B": [image(H) for H in fam["B"]]}


def all_form_ideal_pairs(fr: FormRing, C: AdditiveSubgroup | None = None):
    """Every (maximal ideal of C, form ideal) pair."""
    C = default_C(fr.ring) if C is None else C
    for m in maximal_ideals(fr.ring, C):
        for fi in enumerate_form_ideals(fr):
            yield m, fi
