"""
Finite subgroups of U_2n(R, Lambda): closures, the elementary and congruence
families, levels, and the sandwich check.

Group elements are stored as *row codes*: row ``i`` of a matrix becomes the
integer ``sum_j a_ij * m**j`` (m = |R|).  Right multiplication by a fixed
matrix is then a lookup table over row codes, which is what makes BFS
closure over a million elements cheap.  Sets of elements are sorted 1-D key
arrays (row codes packed into one int64, or raw bytes when they don't fit).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .formring import AdditiveSubgroup, FormIdeal, FormRing, enumerate_form_ideals, is_form_ideal
from .rng import SplitMix64
from .unitary import Elementary, HyperbolicUnitary, eps

log = logging.getLogger(__name__)

DEFAULT_CAP = 5_000_000
LUT_LIMIT = 1 << 22
CHUNK = 1 << 17


class CapExceeded(RuntimeError):
    """A closure or enumeration grew past its element cap."""

    def __init__(self, what: str, cap: int, count: int, frontier: int = 0):
        super().__init__(f"{what}: cap {cap} exceeded ({count} elements, frontier {frontier})")
        self.cap = cap
        self.count = count
        self.frontier = frontier


class ContextMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# encoding


class MatrixCodec:
    """Row-code encoding of matrices over one (ring, n)."""

    def __init__(self, G: HyperbolicUnitary):
        self.G = G
        m, N = G.ring.order, G.N
        self.m, self.N = m, N
        self.M = m ** N
        self.code_dtype = np.int32 if self.M < 2**31 else np.int64
        self.weights = (m ** np.arange(N, dtype=np.int64)).astype(np.int64)
        self.packed = self.M ** N < 2**63
        if self.packed:
            self.key_weights = np.array([self.M ** i for i in range(N)], dtype=np.int64)
        self._luts: dict[bytes, np.ndarray] = {}

    def encode(self, mats: np.ndarray) -> np.ndarray:
        mats = np.asarray(mats)
        codes = (mats.astype(np.int64) * self.weights).sum(axis=-1)
        return codes.astype(self.code_dtype)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return ((codes[..., None] // self.weights) % self.m).astype(np.uint8)

    def keys(self, codes: np.ndarray) -> np.ndarray:
        codes = np.ascontiguousarray(codes)
        if self.packed:
            return (codes.astype(np.int64) * self.key_weights).sum(axis=-1)
        width = codes.dtype.itemsize * self.N
        return codes.view(np.dtype((np.void, width))).reshape(codes.shape[:-1])

    def key(self, mat: np.ndarray):
        return self.keys(self.encode(mat)[None, :])[0]

    def right_lut(self, g: np.ndarray) -> np.ndarray | None:
        """Table sending the code of row v to the code of v*g."""
        if self.M > LUT_LIMIT:
            return None
        k = g.tobytes()
        lut = self._luts.get(k)
        if lut is None:
            vecs = self.decode(np.arange(self.M, dtype=np.int64))
            lut = self.encode(self.G.matmul(vecs[:, None, :], g)[:, 0, :])
            self._luts[k] = lut
        return lut

    def right_mul(self, codes: np.ndarray, g: np.ndarray) -> np.ndarray:
        lut = self.right_lut(g)
        if lut is not None:
            return lut[codes]
        return self.encode(self.G.matmul(self.decode(codes), g))


def _member(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(keys.shape, dtype=bool)
    idx = np.searchsorted(sorted_keys, keys)
    idx[idx == len(sorted_keys)] = 0
    return sorted_keys[idx] == keys


def congruence_generators(G: HyperbolicUnitary, I: AdditiveSubgroup, Gamma: AdditiveSubgroup) -> list[np.ndarray]:
    """Root elements with short entries in I and long entries from Gamma."""
    out, seen = [], set()
    R = G.ring
    for i in G.omega:
        for j in G.omega:
            if i == j:
                continue
            if j == -i:
                c = G.fr.lam_pow(-(eps(i) + 1) // 2)
                vals = {R.mul(c, y) for y in Gamma}
            else:
                vals = set(I)
            for x in sorted(vals):
                if x == R.zero:
                    continue
                m = G.T(i, j, x)
                if m.tobytes() not in seen:
                    seen.add(m.tobytes())
                    out.append(m)
    return out


def random_congruence_element(G: HyperbolicUnitary, I: AdditiveSubgroup, Gamma: AdditiveSubgroup,
                              rng: SplitMix64, length: int = 6) -> np.ndarray:
    """Product of EU-conjugates of (I, Gamma) root elements; e if there are none."""
    pool = congruence_generators(G, I, Gamma)
    eu = G.elementary_generators()
    out = G.e.copy()
    if not pool:
        return out
    for _ in range(length):
        x = pool[rng.below(len(pool))]
        c = eu[rng.below(len(eu))]
        out = G.matmul(out, G.conjugate(c, x))
    return out


# --------------------------------------------------------------------------
# subgroups


class FiniteSubgroup:
    """An explicitly enumerated subgroup with a designated generating set."""

    def __init__(self, engine: "Engine", keys: np.ndarray, codes: np.ndarray,
                 generators: Sequence[np.ndarray], name: str = ""):
        self.engine = engine
        self.keys = keys
        self.codes = codes
        self.generators = [np.asarray(g, dtype=np.uint8) for g in generators]
        self.name = name

    def __repr__(self):
        return f"FiniteSubgroup({self.name or '?'}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self):
        return self.order

    def __contains__(self, mat) -> bool:
        return bool(self.contains(np.asarray(mat)[None])[0])

    def contains(self, mats: np.ndarray) -> np.ndarray:
        codec = self.engine.codec
        return _member(self.keys, codec.keys(codec.encode(mats)))

    def contains_codes(self, codes: np.ndarray) -> np.ndarray:
        return _member(self.keys, self.engine.codec.keys(codes))

    def issubset(self, other: FiniteSubgroup) -> bool:
        return self.order <= other.order and bool(_member(other.keys, self.keys).all())

    def first_outside(self, other: FiniteSubgroup) -> np.ndarray | None:
        """Some element of self not in other (smallest key), or None."""
        miss = np.nonzero(~_member(other.keys, self.keys))[0]
        return None if len(miss) == 0 else self.matrix(int(miss[0]))

    def __eq__(self, other):
        if not isinstance(other, FiniteSubgroup):
            return NotImplemented
        return self.order == other.order and bool((self.keys == other.keys).all())

    __hash__ = None

    def matrix(self, index: int) -> np.ndarray:
        return self.engine.codec.decode(self.codes[index])

    def matrices(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        return self.engine.codec.decode(self.codes[start:stop])

    def chunks(self, size: int = CHUNK):
        for lo in range(0, self.order, size):
            yield self.matrices(lo, lo + size)

    def subset_mask_to_group(self, mask: np.ndarray, hints: Iterable[np.ndarray] = (),
                             name: str = "") -> FiniteSubgroup:
        """The subgroup formed by the masked elements (caller guarantees closure)."""
        return self.engine.from_elements(self.keys[mask], self.codes[mask], hints, name)


@dataclass(frozen=True)
class Level:
    I: AdditiveSubgroup
    Gamma: AdditiveSubgroup
    valid: bool = True
    problems: tuple = field(default=(), compare=False)

    @property
    def form_ideal(self) -> FormIdeal:
        return FormIdeal(self.I, self.Gamma)


# --------------------------------------------------------------------------
# the engine


class Engine:
    """
    Subgroup computations inside U_2n(R, Lambda) for one form ring and n.

    Caches the elementary group, the enumerated unitary group and the
    per-level subgroup families, since the verification suites revisit them.
    """

    def __init__(self, fr: FormRing, n: int = 3, cap: int = DEFAULT_CAP):
        self.G = HyperbolicUnitary(fr, n)
        self.fr = fr
        self.n = n
        self.cap = cap
        self.codec = MatrixCodec(self.G)
        self.elementary_labels = self.G.elementary_labels()
        self.elementary = [self.G.elem(t) for t in self.elementary_labels]
        self._cache: dict = {}
        self._interned: dict = {}

    def __repr__(self):
        return f"Engine({self.fr!r}, n={self.n})"

    # ------------------------------------------------------------------
    # closure machinery

    def _grow(self, keys: np.ndarray, chunks: list, frontier: np.ndarray,
              gens: Sequence[np.ndarray], cap: int, what: str):
        """BFS under right multiplication; ``frontier`` codes are new and unique."""
        codec = self.codec
        luts = list(gens)
        total = len(keys)
        while len(frontier):
            if not luts:
                keys = np.concatenate([keys, codec.keys(frontier)])
                chunks.append(frontier)
                break
            fkeys = codec.keys(frontier)
            keys = np.concatenate([keys, fkeys])
            keys.sort(kind="stable")
            chunks.append(frontier)
            total += len(frontier)
            if total > cap:
                raise CapExceeded(what, cap, total, len(frontier))
            found_codes, found_keys = [], []
            for lo in range(0, len(frontier), CHUNK):
                part = frontier[lo:lo + CHUNK]
                cand = np.concatenate([codec.right_mul(part, g) for g in luts])
                ck = codec.keys(cand)
                uk, idx = np.unique(ck, return_index=True)
                fresh = ~_member(keys, uk)
                found_codes.append(cand[idx[fresh]])
                found_keys.append(uk[fresh])
            if len(found_codes) > 1:
                allk = np.concatenate(found_keys)
                allc = np.concatenate(found_codes)
                _, idx = np.unique(allk, return_index=True)
                frontier = allc[idx]
            else:
                frontier = found_codes[0]
        return keys, chunks

    def _finish(self, chunks: list, gens, name: str) -> FiniteSubgroup:
        codes = np.concatenate(chunks) if chunks else np.zeros((0, self.G.N), self.codec.code_dtype)
        keys = self.codec.keys(codes)
        order = np.argsort(keys, kind="stable")
        return FiniteSubgroup(self, keys[order], codes[order], gens, name)

    def _identity_state(self):
        e_codes = self.codec.encode(self.G.e)[None, :]
        return self.codec.keys(e_codes)[:0], [], e_codes

    def closure(self, gens: Iterable[np.ndarray], cap: int | None = None,
                name: str = "") -> FiniteSubgroup:
        """
        The subgroup generated by ``gens`` (all assumed unitary).

        Generators are added one at a time and skipped when already present,
        so the stored generating set stays short.
        """
        cap = self.cap if cap is None else cap
        gens = self._check_gens(gens)
        keys, chunks, frontier = self._identity_state()
        keys, chunks = self._grow(keys, chunks, frontier, gens[:1], cap, name or "closure")
        H = self._finish(chunks, gens[:1], name)
        for g in gens[1:]:
            H = self.extend(H, [g], cap, name)
        return H

    def extend(self, H: FiniteSubgroup, new: Sequence[np.ndarray], cap: int | None = None,
               name: str = "") -> FiniteSubgroup:
        """Closure of H together with extra generators, reusing H's elements."""
        cap = self.cap if cap is None else cap
        new = self._check_gens(new)
        new = [g for g in new if g not in H]
        if not new:
            return H
        gens = H.generators + new
        codec = self.codec
        keys = H.keys.copy()
        chunks = [H.codes]
        starts = []
        for g in new:
            for lo in range(0, H.order, CHUNK):
                starts.append(codec.right_mul(H.codes[lo:lo + CHUNK], g))
        cand = np.concatenate(starts)
        uk, idx = np.unique(codec.keys(cand), return_index=True)
        frontier = cand[idx[~_member(keys, uk)]]
        keys, chunks = self._grow(keys, chunks, frontier, gens, cap, name or "closure")
        return self._finish(chunks, gens, name or H.name)

    def _check_gens(self, gens) -> list[np.ndarray]:
        out = []
        for g in gens:
            g = np.asarray(g, dtype=np.uint8)
            if g.shape != (self.G.N, self.G.N) or (g >= self.G.ring.order).any():
                raise ContextMismatch("generator does not belong to this group's context")
            if not self.G.is_identity(g):
                out.append(g)
        return out

    def normal_closure(self, seed: Iterable[np.ndarray], normalizer_gens: Sequence[np.ndarray],
                       cap: int | None = None, name: str = "") -> FiniteSubgroup:
        """Smallest subgroup containing ``seed`` and stable under conjugation by the normalizer generators."""
        G = self.G
        H = self.closure(seed, cap, name)
        queue = list(H.generators)
        while queue:
            x = queue.pop(0)
            for g in normalizer_gens:
                c = G.conjugate(g, x)
                if c not in H:
                    H = self.extend(H, [c], cap, name)
                    queue.append(c)
        return H

    def from_elements(self, keys: np.ndarray, codes: np.ndarray, hints: Iterable[np.ndarray] = (),
                      name: str = "", start: FiniteSubgroup | None = None) -> FiniteSubgroup:
        """
        Wrap a known element set as a subgroup, finding a generating set
        greedily: members among ``hints`` first, then the smallest missing
        element until the closure is everything.
        """
        fp = (len(keys), keys[:1].tobytes(), keys[-1:].tobytes(), hash(keys.tobytes()))
        hit = self._interned.get(fp)
        if hit is not None and np.array_equal(hit.keys, keys):
            return hit
        target = FiniteSubgroup(self, keys, codes, [], name)
        gens = [h for h in self._check_gens(hints) if h in target]
        if start is not None and start.issubset(target):
            H = self.extend(start, gens, max(self.cap, len(keys)), name)
        else:
            H = self.closure(gens, max(self.cap, len(keys)), name)
        while H.order < len(keys):
            if not H.issubset(target):
                raise ValueError("hint generators leave the element set: not a subgroup")
            missing = np.nonzero(~_member(H.keys, keys))[0][0]
            H = self.extend(H, [self.codec.decode(codes[missing])], max(self.cap, len(keys)), name)
        if H.order != len(keys) or not np.array_equal(H.keys, keys):
            raise ValueError("element set is not closed under multiplication")
        H.name = name
        self._interned[fp] = H
        return H

    def small_generating_set(self, H: FiniteSubgroup, seed: int = 0) -> list[np.ndarray]:
        """A few random elements generating H (deterministic given seed)."""
        key = ("smallgens", H.keys[:1].tobytes(), H.order, seed)
        if key in self._cache:
            return self._cache[key]
        rng = SplitMix64(seed)
        if H.order == 1:
            gens = []
        else:
            picks = [H.matrix(rng.below(H.order)) for _ in range(2)]
            K = self.closure(picks, H.order)
            while K.order < H.order:
                cand = H.matrix(rng.below(H.order))
                if cand not in K:
                    K = self.extend(K, [cand], H.order)
            gens = K.generators
        self._cache[key] = gens
        return gens

    # ------------------------------------------------------------------
    # the subgroup families

    def eu_group(self) -> FiniteSubgroup:
        if "EU" not in self._cache:
            self._cache["EU"] = self.closure(self.elementary, name="EU")
        return self._cache["EU"]

    def eu_pre(self, fi: FormIdeal) -> FiniteSubgroup:
        key = ("EUpre", fi)
        if key not in self._cache:
            try:
                self._cache[key] = self.closure(self.G.elementary_generators(fi), name=f"EU{fi}")
            except CapExceeded as exc:
                self._cache[key] = exc
        hit = self._cache[key]
        if isinstance(hit, CapExceeded):
            raise hit
        return hit

    def eu_rel(self, fi: FormIdeal) -> FiniteSubgroup:
        key = ("EUrel", fi)
        if key not in self._cache:
            self._cache[key] = self.normal_closure(self.G.elementary_generators(fi), self.elementary,
                                                   name=f"EU(R,{fi})")
        return self._cache[key]

    def enumerate_U(self, cap: int | None = None) -> FiniteSubgroup:
        """
        All of U_2n(R, Lambda) by column backtracking: columns are fixed in
        hyperbolic-pair order subject to h against earlier columns and to
        |column| in Lambda, then the block inverse test filters the result.
        """
        if "U" in self._cache:
            return self._cache["U"]
        cap = self.cap if cap is None else cap
        G, codec = self.G, self.codec
        N = G.N
        if codec.M ** 2 > 1 << 26:
            raise CapExceeded("enumerate_U: column table infeasible", cap, codec.M ** 2)
        vecs = codec.decode(np.arange(codec.M, dtype=np.int64))
        htab = G.form_h(vecs[:, None, :], vecs[None, :, :])
        len_ok = G.in_Lam[G.length(vecs)]
        order = []
        for k in range(G.n):
            order += [k, N - 1 - k]
        gram = G.gram
        partial = np.zeros((1, 0), dtype=np.int64)
        for step, col in enumerate(order):
            cand = np.nonzero(len_ok & (htab[np.arange(codec.M), np.arange(codec.M)] == gram[col, col]))[0]
            pieces, count = [], 0
            rows = max(1, (1 << 24) // max(1, len(cand)))
            for lo in range(0, len(partial), rows):
                P = partial[lo:lo + rows]
                ok = np.ones((len(P), len(cand)), dtype=bool)
                for t, prev in enumerate(order[:step]):
                    ok &= htab[P[:, t][:, None], cand[None, :]] == gram[prev, col]
                    ok &= htab[cand[None, :], P[:, t][:, None]] == gram[col, prev]
                r, c = np.nonzero(ok)
                count += len(r)
                if count > cap:
                    raise CapExceeded("enumerate_U", cap, count)
                pieces.append(np.concatenate([P[r], cand[c][:, None]], axis=1))
            partial = np.concatenate(pieces) if pieces else np.zeros((0, step + 1), np.int64)
            log.debug("enumerate_U: %d partial frames after %d columns", len(partial), step + 1)
            if len(partial) > cap:
                raise CapExceeded("enumerate_U", cap, len(partial))
        kept_codes = []
        for lo in range(0, len(partial), CHUNK):
            P = partial[lo:lo + CHUNK]
            mats = np.empty((len(P), N, N), dtype=np.uint8)
            for t, col in enumerate(order):
                mats[:, :, col] = vecs[P[:, t]]
            inv_ok = G.is_identity(G.matmul(G.block_inverse(mats), mats))
            kept_codes.append(codec.encode(mats[inv_ok]))
        codes = np.concatenate(kept_codes)
        keys = codec.keys(codes)
        srt = np.argsort(keys, kind="stable")
        U = self.from_elements(keys[srt], codes[srt], (), name="U", start=self.eu_group())
        self._cache["U"] = U
        return U

    def principal_congruence(self, fi: FormIdeal, U: FiniteSubgroup | None = None) -> FiniteSubgroup:
        key = ("Ucong", fi)
        if key not in self._cache:
            U = U or self.enumerate_U()
            mask = np.concatenate([self.G.congruence_mask(m, fi) for m in U.chunks()])
            hints = self.G.elementary_generators(fi) + self.eu_rel(fi).generators
            self._cache[key] = U.subset_mask_to_group(mask, hints, name=f"U(R,{fi})")
        return self._cache[key]

    def commutes_mod(self, mats: np.ndarray, taus: Sequence[np.ndarray], fi: FormIdeal) -> np.ndarray:
        """Mask: [s, tau] in U((I, Gamma)) for every tau (vectorised over s)."""
        G = self.G
        ok = np.ones(mats.shape[:-2], dtype=bool)
        inv = G.block_inverse(mats)
        for tau in taus:
            com = G.matmul(G.matmul(G.matmul(mats, tau), inv), G.inverse(tau))
            ok &= G.congruence_mask(com, fi)
        return ok

    def in_CU(self, s: np.ndarray, fi: FormIdeal, U_gens: Sequence[np.ndarray] | None) -> bool:
        """
        Centrality of s modulo U((I, Gamma)), tested on a generating set of
        U_2n(R, Lambda).  Without one only a one-sided test is possible.
        """
        if U_gens is None:
            raise ValueError("necessary-condition mode required: no generating set of U given")
        return bool(self.commutes_mod(np.asarray(s)[None], U_gens, fi)[0])

    def in_CU_necessary(self, s: np.ndarray, fi: FormIdeal) -> bool:
        """One-sided: False proves s is outside CU; True is only a necessary condition."""
        return bool(self.commutes_mod(np.asarray(s)[None], self.elementary, fi)[0])

    def full_congruence(self, fi: FormIdeal, U: FiniteSubgroup | None = None) -> FiniteSubgroup:
        key = ("CU", fi)
        if key not in self._cache:
            U = U or self.enumerate_U()
            gens = self.small_generating_set(U)
            mask = np.concatenate([self.commutes_mod(m, gens, fi) for m in U.chunks(CHUNK // 4)])
            P = self.principal_congruence(fi, U)
            self._cache[key] = U.subset_mask_to_group(mask, P.generators + gens, name=f"CU(R,{fi})")
        return self._cache[key]

    def form_ideals(self) -> list[FormIdeal]:
        if "form_ideals" not in self._cache:
            self._cache["form_ideals"] = enumerate_form_ideals(self.fr)
        return self._cache["form_ideals"]

    # ------------------------------------------------------------------
    # levels and the sandwich

    def level_of(self, H: FiniteSubgroup) -> Level:
        G, R = self.G, self.G.ring
        I = AdditiveSubgroup(x for x in R.elements if G.T_short(1, 2, x) in H)
        Gam = AdditiveSubgroup(y for y in self.fr.Lam if G.T_long(-1, y) in H)
        ok, bad = is_form_ideal(self.fr, FormIdeal(I, Gam))
        return Level(I, Gam, ok, tuple(bad))

    def is_E_normal(self, H: FiniteSubgroup) -> bool:
        G = self.G
        for h in H.generators:
            conj = G.conjugate(np.stack(self.elementary), h[None])
            if not H.contains(conj).all():
                return False
        return True

    def sandwich_check(self, H: FiniteSubgroup, mode: str = "exact") -> dict:
        """
        Level (I, Gamma) of H, then EU((I, Gamma)) <= H <= CU((I, Gamma)).
        In ``necessary`` mode the upper inclusion is tested against the
        elementary generators only and a pass is one-sided.
        """
        lev = self.level_of(H)
        fi = lev.form_ideal
        out = {"level": {"I": list(lev.I), "Gamma": list(lev.Gamma)}, "level_valid": lev.valid,
               "order": H.order, "mode": mode}
        if not lev.valid:
            out.update(passed=False, reason="level is not a form ideal: " + "; ".join(lev.problems))
            return out
        E = self.eu_rel(fi)
        miss = E.first_outside(H)
        out["lower"] = miss is None
        if miss is not None:
            out["lower_witness"] = miss.tolist()
        if mode == "exact":
            C = self.full_congruence(fi)
            over = H.first_outside(C)
            out["upper"] = over is None
            if over is not None:
                out["upper_witness"] = over.tolist()
        else:
            mask = np.concatenate([self.commutes_mod(m, self.elementary, fi) for m in H.chunks(CHUNK // 8)])
            out["upper"] = bool(mask.all())
            out["one_sided"] = True
            if not mask.all():
                out["upper_witness"] = H.matrix(int(np.nonzero(~mask)[0][0])).tolist()
        out["passed"] = out["lower"] and out["upper"]
        return out

    def sandwiching_levels(self, H: FiniteSubgroup) -> list[FormIdeal]:
        """Every form ideal whose relative elementary and full congruence groups enclose H."""
        found = []
        for fi in self.form_ideals():
            if self.eu_rel(fi).issubset(H) and H.issubset(self.full_congruence(fi)):
                found.append(fi)
        return found

    def commutator_subgroup(self, A: FiniteSubgroup, B: FiniteSubgroup,
                            cap: int | None = None) -> FiniteSubgroup:
        G = self.G
        seeds = [G.commutator(a, b) for a in A.generators for b in B.generators]
        return self.normal_closure(seeds, A.generators + B.generators, cap,
                                   name=f"[{A.name},{B.name}]")

    # ------------------------------------------------------------------
    # searches and sampling

    def make_pivot_invertible(self, s: np.ndarray, cap: int = 10_000) -> tuple[list[Elementary], np.ndarray]:
        """
        Breadth-first search over conjugation by elementary generators for a
        conjugate whose (1,1) entry is a unit.  Returns the word (outermost
        conjugator last) and the conjugate.
        """
        G, R = self.G, self.G.ring
        s = np.asarray(s, dtype=np.uint8)
        if R.is_unit(int(s[0, 0])):
            return [], s
        seen = {s.tobytes()}
        frontier = [([], s)]
        gens = np.stack(self.elementary)
        inv = G.inverse(gens)
        while frontier:
            nxt = []
            for word, m in frontier:
                conj = G.matmul(G.matmul(gens, m[None]), inv)
                for t, c in enumerate(conj):
                    k = c.tobytes()
                    if k in seen:
                        continue
                    if len(seen) >= cap:
                        raise CapExceeded("make_pivot_invertible", cap, len(seen), len(nxt))
                    seen.add(k)
                    w = word + [self.elementary_labels[t]]
                    if R.is_unit(int(c[0, 0])):
                        return w, c
                    nxt.append((w, c))
            frontier = nxt
        raise CapExceeded("make_pivot_invertible: orbit exhausted without a unit pivot", cap, len(seen))

    def random_eu_product(self, rng: SplitMix64, length: int,
                          gens: Sequence[np.ndarray] | None = None) -> np.ndarray:
        gens = self.elementary if gens is None else gens
        out = self.G.e.copy()
        for _ in range(length):
            out = self.G.matmul(out, gens[rng.below(len(gens))])
        return out

    def sample_E_normal(self, seed: int, count: int, U: FiniteSubgroup | None = None,
                        cap: int | None = None) -> list[FiniteSubgroup]:
        """Normal closures under EU of 1-3 uniform elements of U; reproducible from ``seed``."""
        rng = SplitMix64(seed)
        U = U if U is not None else self.enumerate_U()
        out = []
        for k in range(count):
            picks = [U.matrix(rng.below(U.order)) for _ in range(1 + rng.below(3))]
            out.append(self.normal_closure(picks, self.elementary, cap, name=f"H{k}"))
        return out
