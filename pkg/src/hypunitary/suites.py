"""Verification suites: each one returns a list of check records for a report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .formring import (
    AdditiveSubgroup,
    FormIdeal,
    FormRing,
    RingError,
    enumerate_form_ideals,
    enumerate_form_parameters,
    form_parameter_violations,
    is_form_ideal,
    lambda_max,
    lambda_min,
    validate_form_ring,
)
from .groups import CapExceeded, Engine, random_congruence_element
from .localize import (
    Localization,
    base_families,
    check_commuting_square,
    check_s0_injectivity,
    check_scaling,
    find_noncentral_witness,
    find_s0,
    localized_families,
    maximal_ideals,
    supplemented_base_axioms,
    default_C,
)
from .rng import SplitMix64
from .unitary import (
    HyperbolicUnitary,
    check_length_congruences,
    entry_law_violations,
    propagation_violations,
    verify_relations,
)

SUITES = ("ring-axioms", "form-params", "relations", "membership-agreement", "congruence",
          "lemma46", "commutator-formulas", "sandwich", "localization")

DEFAULT_SAMPLES = {"membership-agreement": 10_000, "lemma46": 1000, "sandwich": 50,
                   "localization": 1000, "relations": 2000}


@dataclass
class SuiteConfig:
    suite: str
    fr: FormRing
    ring_text: str = ""
    n: int = 3
    seed: int = 0
    samples: int | None = None
    cap: int = 5_000_000
    mode: str = "exact"
    timing: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if self.cap <= 0:
            raise ValueError("cap must be positive")
        if self.mode not in ("exact", "necessary"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.samples is not None and self.samples < 0:
            raise ValueError("samples must be non-negative")

    @property
    def sample_count(self) -> int:
        return DEFAULT_SAMPLES.get(self.suite, 0) if self.samples is None else self.samples


def jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, AdditiveSubgroup):
        return list(x)
    if isinstance(x, FormIdeal):
        return {"I": list(x.I), "Gamma": list(x.Gamma)}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


@dataclass
class Checks:
    timing: bool = False
    records: list = field(default_factory=list)
    _mark: float = field(default_factory=time.perf_counter)

    def add(self, name: str, ok: bool | None, witness=None, started: float | None = None,
            reason: str | None = None):
        """Record one check; without ``started`` the clock runs from the previous record."""
        rec = {"name": name, "status": "skipped" if ok is None else ("pass" if ok else "fail"),
               "ms": None}
        now = time.perf_counter()
        if self.timing:
            rec["ms"] = round((now - (self._mark if started is None else started)) * 1000, 1)
        self._mark = now
        if ok is False:
            rec["witness"] = jsonable(witness) if witness is not None else "no witness recorded"
        elif witness is not None:
            rec["witness"] = jsonable(witness)
        if reason:
            rec["reason"] = reason
        self.records.append(rec)

    def run(self, name: str, fn):
        """fn() -> (ok, witness); caps become skips."""
        t0 = time.perf_counter()
        try:
            ok, witness = fn()
        except CapExceeded as exc:
            self.add(name, None, started=t0, reason=str(exc))
            return None
        self.add(name, ok, witness, t0)
        return ok


def _fi_name(fi: FormIdeal) -> str:
    return f"I={list(fi.I)},Gamma={list(fi.Gamma)}"


# --------------------------------------------------------------------------


def suite_ring_axioms(cfg: SuiteConfig, out: Checks):
    fr = cfg.fr
    out.run("ring axioms", lambda: (not (v := fr.ring.axiom_violations()), v or None))
    out.run("form ring axioms", lambda: (not (v := validate_form_ring(fr)), v or None))
    lo, hi = lambda_min(fr.ring, fr.lam), lambda_max(fr.ring, fr.lam)
    out.run("Lambda_min <= Lambda <= Lambda_max",
            lambda: (lo <= fr.Lam <= hi, {"min": lo, "Lambda": fr.Lam, "max": hi}))


def suite_form_params(cfg: SuiteConfig, out: Checks):
    fr, R = cfg.fr, cfg.fr.ring
    params = enumerate_form_parameters(R, fr.lam)
    out.add("form parameters enumerated", True, [list(p) for p in params])
    for p in params:
        out.run(f"form parameter {list(p)} valid",
                lambda p=p: (not (v := form_parameter_violations(R, fr.lam, p)), v or None))
    out.run("given Lambda among enumerated", lambda: (fr.Lam in params, list(fr.Lam)))
    ideals = enumerate_form_ideals(fr)
    out.add("form ideals enumerated", True, [jsonable(fi) for fi in ideals])
    for fi in ideals:
        out.run(f"form ideal {_fi_name(fi)} valid",
                lambda fi=fi: (is_form_ideal(fr, fi)[0], is_form_ideal(fr, fi)[1] or None))


def suite_relations(cfg: SuiteConfig, out: Checks):
    t0 = time.perf_counter()
    rep = verify_relations(cfg.fr, cfg.n, samples=cfg.sample_count, rng=SplitMix64(cfg.seed))
    for name, c in sorted(rep["relations"].items()):
        ok = c["failed"] == 0
        out.add(f"{name} ({c['checked']} instances, {'exhaustive' if rep['exhaustive'] else 'sampled'})",
                ok, c["counterexamples"] if not ok else None, t0)
    G = HyperbolicUnitary(cfg.fr, cfg.n)
    bad = []
    for i in G.omega:
        for j in G.omega:
            if i != j and i != -j:
                one = cfg.fr.ring.one
                alt = G.mul(G.T(i, j, one), G.T(j, i, cfg.fr.ring.neg(one)), G.T(i, j, one))
                if not np.array_equal(alt, G.P(i, j)):
                    bad.append([i, j])
    out.add("P_ij = T_ij(1) T_ji(-1) T_ij(1)", not bad, bad or None)


def _agreement(G: HyperbolicUnitary, mats: np.ndarray) -> tuple[int, list]:
    a = G.unitary_mask(mats, "definition")
    b = G.unitary_mask(mats, "entries")
    c = G.unitary_mask(mats, "blocks")
    dis = np.nonzero((a != b) | (b != c))[0]
    return len(dis), [mats[k].tolist() for k in dis[:3]]


def _non_unitary_samples(G: HyperbolicUnitary, rng: SplitMix64, count: int) -> np.ndarray:
    """Invertible matrices e + x e^{ij} (i != j), generally not unitary."""
    R = G.ring
    out = []
    for _ in range(count):
        m = G.e.copy()
        i, j = rng.below(G.N), rng.below(G.N)
        if i == j:
            j = (i + 1) % G.N
        m[i, j] = 1 + rng.below(R.order - 1) if R.order > 1 else 0
        out.append(m)
    return np.stack(out)


def suite_membership(cfg: SuiteConfig, out: Checks, engine: Engine | None = None):
    E = engine or Engine(cfg.fr, cfg.n, cfg.cap)
    G = E.G
    rng = SplitMix64(cfg.seed)
    if cfg.mode == "exact":
        def enumerate_check():
            U = E.enumerate_U()
            total, wit = 0, []
            for chunk in U.chunks(1 << 15):
                k, w = _agreement(G, chunk)
                total += k
                wit += w
            return total == 0, {"order": U.order, "disagreements": total, "examples": wit[:3]}
        out.run("three unitarity tests agree on the enumerated group", enumerate_check)

    def sampled():
        mats = np.stack([E.random_eu_product(rng, 12) for _ in range(cfg.sample_count)]) \
            if cfg.sample_count else np.zeros((0, G.N, G.N), np.uint8)
        k, w = _agreement(G, mats) if len(mats) else (0, [])
        inside = bool(G.unitary_mask(mats, "entries").all()) if len(mats) else True
        return k == 0 and inside, {"samples": len(mats), "disagreements": k, "examples": w,
                                   "all_unitary": inside}
    out.run(f"three unitarity tests agree on {cfg.sample_count} random EU products", sampled)

    def negatives():
        mats = _non_unitary_samples(G, rng, 200)
        k, w = _agreement(G, mats)
        return k == 0, {"disagreements": k, "examples": w}
    out.run("three unitarity tests agree on elementary non-unitary matrices", negatives)


def _inverse_failures(G: HyperbolicUnitary, mats: np.ndarray) -> np.ndarray:
    inv = G.block_inverse(mats)
    return ~(G.is_identity(G.matmul(inv, mats)) & G.is_identity(G.matmul(mats, inv)))


def suite_congruence(cfg: SuiteConfig, out: Checks, engine: Engine | None = None):
    E = engine or Engine(cfg.fr, cfg.n, cfg.cap)
    G = E.G
    exact = cfg.mode == "exact"
    U = None
    if exact:
        try:
            U = E.enumerate_U()
        except CapExceeded as exc:
            out.add("enumerate U", None, reason=str(exc))
            exact = False
    if U is not None:
        def formulas():
            bad_inv = bad_law = bad_prop = 0
            for chunk in U.chunks(1 << 15):
                bad_inv += int(_inverse_failures(G, chunk).sum())
                bad_law += int(entry_law_violations(G, chunk).sum())
                bad_prop += int(propagation_violations(G, chunk).sum())
            w = {"order": U.order, "inverse": bad_inv, "entry_law": bad_law, "propagation": bad_prop}
            return bad_inv + bad_law + bad_prop == 0, w
        out.run("block inverse, entry law and propagation on the enumerated group", formulas)
    for fi in E.form_ideals():
        tag = _fi_name(fi)

        def levels(fi=fi):
            rel = E.eu_rel(fi)
            lev = E.level_of(rel)
            inside = bool(np.concatenate([G.congruence_mask(m, fi) for m in rel.chunks()]).all())
            ok = lev.form_ideal == fi and inside
            return ok, {"level": lev.form_ideal, "inside_principal": inside, "order": rel.order}
        out.run(f"{tag}: level of relative elementary group and inclusion in U(I,Gamma)", levels)
        if not exact:
            continue

        def chain(fi=fi):
            rel, P, C = E.eu_rel(fi), E.principal_congruence(fi, U), E.full_congruence(fi, U)
            lev = E.level_of(P)
            normal = all(bool(P.contains(G.conjugate(g, np.stack(P.generators))).all())
                         for g in E.small_generating_set(U)) if P.generators else True
            ok = (rel.issubset(P) and P.issubset(C) and U.order % P.order == 0
                  and lev.form_ideal == fi and normal)
            return ok, {"orders": [rel.order, P.order, C.order, U.order], "level": lev.form_ideal,
                        "normal": normal}
        out.run(f"{tag}: EU(I,Gamma) <= U(I,Gamma) <= CU(I,Gamma), level and normality", chain)


def _congruence_sigma(G: HyperbolicUnitary, I: AdditiveSubgroup, rng: SplitMix64) -> np.ndarray:
    return random_congruence_element(G, I, I & G.fr.Lam, rng, 1 + rng.below(5))


def _congruence_move(G: HyperbolicUnitary, rng: SplitMix64) -> tuple:
    R = G.ring
    i = G.omega[rng.below(G.N)]
    if rng.below(3) == 0:
        vals = list(G.admissible_long(i))
        return ("long", i, vals[rng.below(len(vals))])
    choices = [j for j in G.omega if j != i and j != -i]
    return ("short", i, choices[rng.below(len(choices))], rng.below(R.order))


def suite_length_congruences(cfg: SuiteConfig, out: Checks, ideals: list | None = None):
    G = HyperbolicUnitary(cfg.fr, cfg.n)
    R = cfg.fr.ring
    from .formring import enumerate_ideals
    ideals = ideals if ideals is not None else enumerate_ideals(R, invariant_only=True)
    for I in ideals:
        rng = SplitMix64(cfg.seed)

        def run(I=I, rng=rng):
            fails = []
            for _ in range(cfg.sample_count):
                s = _congruence_sigma(G, I, rng)
                move = _congruence_move(G, rng)
                rep = check_length_congruences(G, s, I, move)
                if not rep["ok"]:
                    fails.append({"sigma": s, "move": list(move), "failures": rep["failures"]})
            return not fails, ({"count": len(fails), "examples": fails[:3]} if fails else
                               {"pairs": cfg.sample_count})
        out.run(f"I={list(I)}: commutator column lengths on {cfg.sample_count} pairs", run)


def suite_commutators(cfg: SuiteConfig, out: Checks, engine: Engine | None = None):
    E = engine or Engine(cfg.fr, cfg.n, cfg.cap)
    EU = E.eu_group()
    exact = cfg.mode == "exact"
    for fi in E.form_ideals():
        tag = _fi_name(fi)

        def lower(fi=fi):
            rel = E.eu_rel(fi)
            com = E.commutator_subgroup(rel, EU)
            w = rel.first_outside(com)
            return com == rel, {"orders": [com.order, rel.order], "missing": w}
        out.run(f"{tag}: [EU(I,Gamma), EU] = EU(I,Gamma)", lower)
        if exact:
            def upper(fi=fi):
                rel, C = E.eu_rel(fi), E.full_congruence(fi)
                com = E.commutator_subgroup(C, EU)
                return com == rel, {"orders": [com.order, rel.order, C.order]}
            out.run(f"{tag}: [CU(I,Gamma), EU] = EU(I,Gamma)", upper)


def suite_sandwich(cfg: SuiteConfig, out: Checks, engine: Engine | None = None):
    E = engine or Engine(cfg.fr, cfg.n, cfg.cap)
    exact = cfg.mode == "exact"
    U = None
    if exact:
        try:
            U = E.enumerate_U()
        except CapExceeded as exc:
            out.add("enumerate U", None, reason=str(exc))
            exact = False
    if U is not None:
        try:
            samples = E.sample_E_normal(cfg.seed, cfg.sample_count, U)
        except CapExceeded as exc:
            out.add("sample E-normal subgroups", None, reason=str(exc))
            return
    else:
        rng = SplitMix64(cfg.seed)
        samples = []
        for k in range(cfg.sample_count):
            picks = [E.random_eu_product(rng, 8) for _ in range(1 + rng.below(3))]
            try:
                samples.append(E.normal_closure(picks, E.elementary, name=f"H{k}"))
            except CapExceeded as exc:
                samples.append(exc)
    for k, H in enumerate(samples):
        t0 = time.perf_counter()
        if isinstance(H, CapExceeded):
            out.add(f"sample {k}", None, reason=str(H))
            continue
        try:
            normal = E.is_E_normal(H)
            rep = E.sandwich_check(H, "exact" if exact else "necessary")
            ok = normal and rep["passed"]
            witness = {"order": H.order, "level": rep["level"], "E_normal": normal}
            if exact:
                levels = E.sandwiching_levels(H)
                witness["sandwiching_levels"] = [jsonable(f) for f in levels]
                ok = ok and levels == [FormIdeal(AdditiveSubgroup(rep["level"]["I"]),
                                                 AdditiveSubgroup(rep["level"]["Gamma"]))]
            if not ok:
                witness["report"] = rep
                witness["generators"] = H.generators
        except CapExceeded as exc:
            out.add(f"sample {k}", None, started=t0, reason=str(exc))
            continue
        out.add(f"sample {k}: sandwich{' and uniqueness' if exact else ' (one-sided)'}", ok, witness, t0)


def suite_localization(cfg: SuiteConfig, out: Checks):
    fr, R, n = cfg.fr, cfg.fr.ring, cfg.n
    C = default_C(R)
    ms = maximal_ideals(R, C)
    out.add("maximal ideals of C", bool(ms), [list(m) for m in ms])
    E = Engine(fr, n, cfg.cap)
    G = E.G
    ideals = enumerate_form_ideals(fr)
    per = max(1, cfg.sample_count // max(1, len(ms) * len(ideals)))
    for m in ms:
        t0 = time.perf_counter()
        try:
            loc = Localization.at(fr, m, C)
        except RingError as exc:
            out.add(f"m={list(m)}: localization", False, str(exc), t0)
            continue
        out.add(f"m={list(m)}: localization is a form ring", True,
                {"order": loc.L.order, "Lambda_m": loc.fr_m.Lam}, t0)
        Gm = HyperbolicUnitary(loc.fr_m, n)
        Em = Engine(loc.fr_m, n, cfg.cap)
        for fi in ideals:
            tag = f"m={list(m)}, {_fi_name(fi)}"

            def s0_and_levels(fi=fi, loc=loc):
                fim = loc.level(fi)
                valid = is_form_ideal(loc.fr_m, fim)[0]
                s0 = find_s0(fr, loc.S, fi)
                return valid, {"s0": s0, "localized_level": fim, "form_ideal": valid}
            t0 = time.perf_counter()
            try:
                ok, w = s0_and_levels()
            except RingError as exc:
                out.add(f"{tag}: s0 search", False, str(exc), t0)
                continue
            out.add(f"{tag}: s0 found, localized level is a form ideal", ok, w, t0)
            s0 = w["s0"]

            def square(fi=fi, loc=loc):
                bad = []
                cong = G.elementary_generators(fi)
                for g in G.elementary_generators():
                    for c in [G.e] + cong:
                        r = check_commuting_square(loc, fi, g, G.matmul(g, c), n)
                        if not r["ok"]:
                            bad.append({"sigma": g, "c": c})
                return not bad, bad[:3] or None
            out.run(f"{tag}: commuting square over EU generators", square)
            out.run(f"{tag}: s0 injectivity on {per} pairs",
                    lambda fi=fi, loc=loc, s0=s0: (lambda r: (r["ok"], r))(
                        check_s0_injectivity(loc, fi, s0, per, seed=cfg.seed, n=n)))

            def scaling(fi=fi, loc=loc):
                rng = SplitMix64(cfg.seed)
                fim = loc.level(fi)
                units = [loc.L.f[s] for s in loc.S]
                bad = []
                eu_m = Gm.elementary_generators()
                for _ in range(min(per, 100)):
                    sig = Gm.e.copy()
                    for _ in range(4):
                        sig = Gm.matmul(sig, eu_m[rng.below(len(eu_m))]) if eu_m else sig
                    i = Gm.omega[rng.below(Gm.N)]
                    js = [j for j in Gm.omega if j != i and j != -i]
                    j = js[rng.below(len(js))]
                    x = rng.below(loc.L.order)
                    s = int(units[rng.below(len(units))])
                    if not check_scaling(Gm, sig, i, j, x, s, fim):
                        bad.append({"sigma": sig, "i": i, "j": j, "x": x, "s": s})
                return not bad, bad[:3] or None
            out.run(f"{tag}: scaling by S leaves commutator congruence unchanged", scaling)

            def families(fi=fi, loc=loc, s0=s0, Em=Em):
                fam = base_families(E, fi, loc.S, s0)
                rep = supplemented_base_axioms(fam["A"], fam["B"], E.elementary)
                lf = localized_families(loc, fam, Em)
                rep_m = supplemented_base_axioms(lf["A"], lf["B"], Em.elementary)
                return rep["ok"] and rep_m["ok"], {
                    "A_levels": fam["A_levels"], "B_levels": fam["B_levels"],
                    "orders": [H.order for H in fam["A"] + fam["B"]],
                    "skipped_B": fam["skipped"], "base": rep["failures"], "localized": rep_m["failures"]}
            out.run(f"{tag}: supplemented base axioms (and localized images)", families)


def suite_noncentral(cfg: SuiteConfig, out: Checks, engine: Engine):
    """Noncentral elements of the enumerated group have a localized witness."""
    U = engine.enumerate_U()
    gens = engine.small_generating_set(U)
    rng = SplitMix64(cfg.seed)
    for fi in engine.form_ideals():
        def run(fi=fi):
            tried = 0
            for _ in range(20):
                g = U.matrix(rng.below(U.order))
                if engine.commutes_mod(g[None], gens, fi)[0]:
                    continue
                tried += 1
                find_noncentral_witness(cfg.fr, g, fi, gens, cfg.n)
            return True, {"noncentral_tested": tried}
        out.run(f"{_fi_name(fi)}: noncentral witnesses", run)


RUNNERS = {
    "ring-axioms": suite_ring_axioms,
    "form-params": suite_form_params,
    "relations": suite_relations,
    "membership-agreement": suite_membership,
    "congruence": suite_congruence,
    "lemma46": suite_length_congruences,
    "commutator-formulas": suite_commutators,
    "sandwich": suite_sandwich,
    "localization": suite_localization,
}


def run_suite(cfg: SuiteConfig) -> dict:
    out = Checks(cfg.timing)
    RUNNERS[cfg.suite](cfg, out)
    summary = {"pass": 0, "fail": 0, "skip": 0}
    for r in out.records:
        summary[{"pass": "pass", "fail": "fail", "skipped": "skip"}[r["status"]]] += 1
    config = {"ring": cfg.ring_text, "n": cfg.n, "seed": cfg.seed, "samples": cfg.sample_count,
              "cap": cfg.cap, "mode": cfg.mode, "form_ring": repr(cfg.fr)}
    return {"suite": cfg.suite, "config": config, "checks": out.records, "summary": summary}
