"""
The hyperbolic unitary group U_2n(R, Lambda) over a finite form ring.

Matrices are numpy ``uint8`` arrays of ring-element indices, shape
``(..., 2n, 2n)``; every array operation here broadcasts over leading axes,
so a stack of matrices is handled in one call.

Rows and columns are indexed by Omega = (1, ..., n, -n, ..., -1): the
signed index ``i`` lives at 0-based position ``pos(i, n) - 1``.  Position
``a`` and position ``2n-1-a`` always carry opposite indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .formring import (AdditiveSubgroup, FormIdeal, FormRing, RingError, gamma_min,
                       ideal_closure, is_form_ideal)

DEFINITION_SWEEP_LIMIT = 10**6


class SingularMatrixError(ValueError):
    """The matrix is not invertible, so it is not a group element at all."""


def eps(i: int) -> int:
    if i == 0:
        raise ValueError("index 0 is not in Omega")
    return 1 if i > 0 else -1


def pos(i: int, n: int) -> int:
    """1-based matrix position of the signed index ``i``."""
    if i == 0 or abs(i) > n:
        raise ValueError(f"index {i} not in Omega for n={n}")
    return i if i > 0 else 2 * n + 1 + i


def omega(n: int) -> list[int]:
    """Signed indices in matrix order."""
    return list(range(1, n + 1)) + list(range(-n, 0))


@dataclass(frozen=True)
class Elementary:
    """Label of an elementary root element T_ij(x); long when j == -i."""

    i: int
    j: int
    x: int

    @property
    def long(self) -> bool:
        return self.j == -self.i

    def __str__(self):
        return f"T[{self.i},{self.j}]({self.x})"


class HyperbolicUnitary:
    """U_2n over the form ring ``fr``: forms, membership tests, root elements."""

    def __init__(self, fr: FormRing, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.fr = fr
        self.ring = fr.ring
        self.n = n
        self.N = 2 * n
        self.omega = omega(n)
        self.in_Lam = fr.Lam.mask(self.ring.order)
        R = self.ring
        # lambda power (eps(j) - eps(i))/2 at each position (i, j)
        e = np.array([eps(i) for i in self.omega])
        self._lampow = np.empty((self.N, self.N), dtype=np.uint8)
        for a in range(self.N):
            for b in range(self.N):
                self._lampow[a, b] = fr.lam_pow((e[b] - e[a]) // 2)
        eye = np.full((self.N, self.N), R.zero, dtype=np.uint8)
        np.fill_diagonal(eye, R.one)
        eye.flags.writeable = False
        self.e = eye

    def __repr__(self):
        return f"HyperbolicUnitary({self.fr!r}, n={self.n})"

    # ------------------------------------------------------------------
    # indices and raw arithmetic

    def p0(self, i: int) -> int:
        return pos(i, self.n) - 1

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        M, A = self.ring.mul_table, self.ring.add_table
        prod = M[a[..., :, :, None], b[..., None, :, :]]
        acc = prod[..., :, 0, :]
        for j in range(1, prod.shape[-2]):
            acc = A[acc, prod[..., :, j, :]]
        return acc

    def mul(self, *mats: np.ndarray) -> np.ndarray:
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out

    def apply(self, a: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Matrix times column vector(s)."""
        return self.matmul(a, v[..., :, None])[..., 0]

    def conj_entries(self, a):
        return self.ring.inv_table[a]

    def is_identity(self, a: np.ndarray) -> np.ndarray:
        return (a == self.e).all(axis=(-2, -1))

    def zero_matrix(self) -> np.ndarray:
        return np.full((self.N, self.N), self.ring.zero, dtype=np.uint8)

    def matrix(self, rows) -> np.ndarray:
        a = np.asarray(rows, dtype=np.uint8)
        if a.shape[-2:] != (self.N, self.N) or (a >= self.ring.order).any():
            raise ValueError(f"not a {self.N}x{self.N} matrix over {self.ring.name}")
        return a

    def basis(self, i: int) -> np.ndarray:
        v = np.full(self.N, self.ring.zero, dtype=np.uint8)
        v[self.p0(i)] = self.ring.one
        return v

    # ------------------------------------------------------------------
    # forms

    def form_f(self, v: np.ndarray, w: np.ndarray) -> np.ndarray | int:
        """sum over i=1..n of bar(v_i) * w_{-i}."""
        M, A, J = self.ring.mul_table, self.ring.add_table, self.ring.inv_table
        n, N = self.n, self.N
        acc = M[J[v[..., 0]], w[..., N - 1]]
        for k in range(1, n):
            acc = A[acc, M[J[v[..., k]], w[..., N - 1 - k]]]
        return int(acc) if np.ndim(acc) == 0 else acc

    def form_h(self, v, w):
        f_vw = self.form_f(v, w)
        f_wv = self.form_f(w, v)
        R = self.ring
        r = R.add_table[f_vw, R.mul_table[self.fr.lam, R.inv_table[f_wv]]]
        return int(r) if np.ndim(r) == 0 else r

    def length(self, v):
        return self.form_f(v, v)

    def same_q(self, v, w):
        """q(v) == q(w), i.e. |v| - |w| lies in Lambda."""
        R = self.ring
        d = R.add_table[self.length(v), R.neg_table[self.length(w)]]
        r = self.in_Lam[d]
        return bool(r) if np.ndim(r) == 0 else r

    def column_lengths(self, a: np.ndarray) -> np.ndarray:
        """|a_{*j}| for every column, shape (..., 2n)."""
        return self.length(np.swapaxes(a, -1, -2))

    # ------------------------------------------------------------------
    # inverse formulas

    def _pap(self, x: np.ndarray) -> np.ndarray:
        """p x* p: conjugate every entry and mirror in the skew diagonal."""
        return np.swapaxes(self.ring.inv_table[x], -1, -2)[..., ::-1, ::-1]

    def block_inverse(self, s: np.ndarray) -> np.ndarray:
        """[[p d* p, bar(lam) p b* p], [lam p c* p, p a* p]]."""
        n, M = self.n, self.ring.mul_table
        a, b = s[..., :n, :n], s[..., :n, n:]
        c, d = s[..., n:, :n], s[..., n:, n:]
        out = np.empty_like(s)
        out[..., :n, :n] = self._pap(d)
        out[..., :n, n:] = M[self.fr.lam_bar, self._pap(b)]
        out[..., n:, :n] = M[self.fr.lam, self._pap(c)]
        out[..., n:, n:] = self._pap(a)
        return out

    def entry_law_inverse(self, s: np.ndarray) -> np.ndarray:
        """Entry (i, j) is lam^((eps j - eps i)/2) * bar(s_{-j,-i})."""
        mirrored = np.swapaxes(s, -1, -2)[..., ::-1, ::-1]
        return self.ring.mul_table[self._lampow, self.ring.inv_table[mirrored]]

    def unitary_inverse(self, s: np.ndarray) -> np.ndarray:
        """The inverse of a unitary matrix by the block formula."""
        inv = self.block_inverse(s)
        if not self.is_identity(self.matmul(inv, s)).all():
            raise ValueError("matrix is not unitary: block formula is not its inverse")
        return inv

    def inverse(self, s: np.ndarray) -> np.ndarray:
        """Inverse of a group element (unitarity assumed, not rechecked)."""
        return self.block_inverse(s)

    def commutator(self, g, h):
        """[g, h] = g h g^-1 h^-1."""
        return self.mul(g, h, self.inverse(g), self.inverse(h))

    def conjugate(self, g, x):
        """g x g^-1."""
        return self.mul(g, x, self.inverse(g))

    # ------------------------------------------------------------------
    # invertibility

    @cached_property
    def _perms(self):
        perms = np.array(list(itertools.permutations(range(self.N))), dtype=np.intp)
        upper = np.triu(np.ones((self.N, self.N), dtype=bool), 1)
        inversions = ((perms[:, :, None] > perms[:, None, :]) & upper).sum(axis=(1, 2))
        return perms, inversions % 2 == 1

    def determinant(self, s: np.ndarray) -> int:
        """Leibniz determinant; only meaningful over commutative rings."""
        R = self.ring
        perms, odd = self._perms
        terms = np.full(len(perms), R.one, dtype=np.uint8)
        for row in range(self.N):
            terms = R.mul_table[terms, s[row, perms[:, row]]]
        terms = np.where(odd, R.neg_table[terms], terms)
        return R.sum(terms.tolist())

    def is_invertible(self, s: np.ndarray) -> bool:
        if self.is_identity(self.matmul(self.block_inverse(s), s)):
            return True
        if self.ring.is_commutative():
            return self.ring.is_unit(self.determinant(s))
        # finite ring: invertible iff v -> s v is injective on R^2n
        vecs = self.all_vectors()
        if vecs is None:
            raise NotImplementedError("invertibility test too large for this ring")
        return int((self.apply(s, vecs) == self.ring.zero).all(axis=-1).sum()) == 1

    def all_vectors(self, limit: int = DEFINITION_SWEEP_LIMIT) -> np.ndarray | None:
        size = self.ring.order ** self.N
        if size > limit:
            return None
        cached = getattr(self, "_all_vectors", None)
        if cached is None:
            grid = np.indices((self.ring.order,) * self.N).reshape(self.N, -1).T
            cached = np.ascontiguousarray(grid[:, ::-1]).astype(np.uint8)
            self._all_vectors = cached
        return cached

    # ------------------------------------------------------------------
    # membership

    def in_AH(self, a: np.ndarray) -> np.ndarray | bool:
        """a == -lam a* and every diagonal entry lies in Lambda."""
        R = self.ring
        star = np.swapaxes(R.inv_table[a], -1, -2)
        herm = (a == R.neg_table[R.mul_table[self.fr.lam, star]]).all(axis=(-2, -1))
        diag = self.in_Lam[np.diagonal(a, axis1=-2, axis2=-1)].all(axis=-1)
        r = herm & diag
        return bool(r) if np.ndim(r) == 0 else r

    @cached_property
    def gram(self) -> np.ndarray:
        """h(e_a, e_b) in matrix order."""
        cols = np.swapaxes(self.e, 0, 1)
        return self.form_h(cols[:, None, :], cols[None, :, :])

    def _gram_of(self, s: np.ndarray) -> np.ndarray:
        cols = np.swapaxes(s, -1, -2)
        return self.form_h(cols[..., :, None, :], cols[..., None, :, :])

    def unitary_mask(self, s: np.ndarray, method: str = "entries") -> np.ndarray:
        """
        Vectorised membership for a stack of matrices assumed invertible.

        ``definition``: h preserved on basis pairs and q preserved on every
        vector (exhaustive when |R|^2n <= 10^6, else on basis vectors, which
        suffices by q(u+v) = q(u) + q(v) + h(u, v) mod Lambda).
        ``entries``: the entry law for the inverse plus column lengths in Lambda.
        ``blocks``: the block inverse formula plus a*pc, b*pd in AH_n.
        """
        s = np.asarray(s)
        if method == "entries":
            ok = self.is_identity(self.matmul(self.entry_law_inverse(s), s))
            return ok & self.in_Lam[self.column_lengths(s)].all(axis=-1)
        if method == "blocks":
            n = self.n
            ok = self.is_identity(self.matmul(self.block_inverse(s), s))
            a, b = s[..., :n, :n], s[..., :n, n:]
            c, d = s[..., n:, :n], s[..., n:, n:]
            star = lambda x: np.swapaxes(self.ring.inv_table[x], -1, -2)
            pc, pd = c[..., ::-1, :], d[..., ::-1, :]
            return ok & self.in_AH(self.matmul(star(a), pc)) & self.in_AH(self.matmul(star(b), pd))
        if method == "definition":
            ok = (self._gram_of(s) == self.gram).all(axis=(-2, -1))
            vecs = self.all_vectors()
            if vecs is None:
                return ok & self.in_Lam[self.column_lengths(s)].all(axis=-1)
            return ok & self._q_sweep(s, vecs)
        raise ValueError(f"unknown method {method!r}")

    def _q_sweep(self, s: np.ndarray, vecs: np.ndarray) -> np.ndarray:
        R = self.ring
        base_len = self.length(vecs)
        flat = s.reshape(-1, self.N, self.N)
        out = np.empty(len(flat), dtype=bool)
        step = max(1, 4_000_000 // (len(vecs) * self.N * self.N))
        for lo in range(0, len(flat), step):
            chunk = flat[lo:lo + step]
            images = self.apply(chunk[:, None, :, :], vecs[None, :, :])
            diff = R.add_table[self.length(images), R.neg_table[base_len][None, :]]
            out[lo:lo + step] = self.in_Lam[diff].all(axis=-1)
        return out.reshape(s.shape[:-2])

    def is_unitary(self, s: np.ndarray, method: str = "entries") -> bool:
        s = self.matrix(s)
        if not self.is_invertible(s):
            raise SingularMatrixError("matrix is not invertible")
        return bool(self.unitary_mask(s, method))

    # ------------------------------------------------------------------
    # elementary matrices

    def admissible_long(self, i: int) -> AdditiveSubgroup:
        """lam^(-(eps(i)+1)/2) Lambda: bar(lam) Lambda for i > 0, Lambda for i < 0."""
        c = self.fr.lam_pow(-(eps(i) + 1) // 2)
        return AdditiveSubgroup(self.ring.mul(c, a) for a in self.fr.Lam)

    def T_short(self, i: int, j: int, x: int) -> np.ndarray:
        if i == j or i == -j:
            raise ValueError(f"short root needs i != ±j, got ({i}, {j})")
        R = self.ring
        m = self.e.copy()
        m[self.p0(i), self.p0(j)] = x
        c = self.fr.lam_pow((eps(j) - eps(i)) // 2)
        m[self.p0(-j), self.p0(-i)] = R.neg(R.mul(c, R.bar(x)))
        return m

    def T_long(self, i: int, a: int) -> np.ndarray:
        if a not in self.admissible_long(i):
            raise ValueError(f"{self.ring.label(a)} not admissible for T[{i},{-i}]")
        m = self.e.copy()
        m[self.p0(i), self.p0(-i)] = a
        return m

    def T(self, i: int, j: int, x: int) -> np.ndarray:
        return self.T_long(i, x) if j == -i else self.T_short(i, j, x)

    def elem(self, label: Elementary) -> np.ndarray:
        return self.T(label.i, label.j, label.x)

    def P(self, i: int, j: int) -> np.ndarray:
        if i == j or i == -j:
            raise ValueError(f"P needs i != ±j, got ({i}, {j})")
        R = self.ring
        m = self.e.copy()
        p = self.p0

        def put(r, c, v):
            m[p(r), p(c)] = R.add(m[p(r), p(c)], v)

        put(i, j, R.one)
        put(j, i, R.neg(R.one))
        put(-i, -j, self.fr.lam_pow((eps(i) - eps(j)) // 2))
        put(-j, -i, R.neg(self.fr.lam_pow((eps(j) - eps(i)) // 2)))
        for k in (i, j, -i, -j):
            put(k, k, R.neg(R.one))
        return m

    def elementary_labels(self, level: FormIdeal | None = None) -> list[Elementary]:
        """
        Every nontrivial elementary root element (of the given level), with
        duplicates T_ij(x) = T_{-j,-i}(...) removed; deterministic order.
        """
        R = self.ring
        out, seen = [], set()
        for i in self.omega:
            for j in self.omega:
                if i == j:
                    continue
                if j == -i:
                    vals = self.admissible_long(i)
                    if level is not None:
                        c = self.fr.lam_pow(-(eps(i) + 1) // 2)
                        vals = AdditiveSubgroup(R.mul(c, g) for g in level.Gamma)
                else:
                    vals = level.I if level is not None else R.elements
                for x in vals:
                    if x == R.zero:
                        continue
                    key = self.T(i, j, x).tobytes()
                    if key not in seen:
                        seen.add(key)
                        out.append(Elementary(i, j, x))
        return out

    def elementary_generators(self, level: FormIdeal | None = None) -> list[np.ndarray]:
        return [self.elem(t) for t in self.elementary_labels(level)]

    def is_elementary_of_level(self, i: int, j: int, x: int, fi: FormIdeal) -> bool:
        if i == j or i == 0 or j == 0 or abs(i) > self.n or abs(j) > self.n:
            raise ValueError(f"invalid indices ({i}, {j})")
        if j != -i:
            return x in fi.I
        c = self.fr.lam_pow(-(eps(i) + 1) // 2)
        return x in AdditiveSubgroup(self.ring.mul(c, g) for g in fi.Gamma)

    # ------------------------------------------------------------------
    # congruence subgroups

    def congruence_mask(self, s: np.ndarray, fi: FormIdeal) -> np.ndarray:
        """s = e mod I and every column length in Gamma (stack-friendly)."""
        R = self.ring
        in_I = fi.I.mask(R.order)
        in_G = fi.Gamma.mask(R.order)
        diff = R.add_table[s, R.neg_table[self.e]]
        return in_I[diff].all(axis=(-2, -1)) & in_G[self.column_lengths(s)].all(axis=-1)

    def in_principal_congruence(self, s: np.ndarray, fi: FormIdeal) -> bool:
        ok, bad = is_form_ideal(self.fr, fi)
        if not ok:
            raise RingError("not a form ideal: " + "; ".join(bad))
        return bool(self.congruence_mask(self.matrix(s), fi))

    def J_ideal(self, s: np.ndarray) -> AdditiveSubgroup:
        """Involution-closed ideal generated by off-diagonal entries of s and s^-1."""
        inv = self.unitary_inverse(s)
        off = ~np.eye(self.N, dtype=bool)
        gens = set(s[off].tolist()) | set(inv[off].tolist())
        gens |= {self.ring.bar(x) for x in gens}
        return ideal_closure(self.ring, gens)

    # ------------------------------------------------------------------
    # basis conventions

    def convert_basis(self, s: np.ndarray) -> np.ndarray:
        """Swap between (e_1..e_n, e_-1..e_-n) and (e_1..e_n, e_-n..e_-1) ordering."""
        n = self.n
        out = np.array(s, copy=True)
        out[..., :n, n:] = s[..., :n, n:][..., :, ::-1]
        out[..., n:, :n] = s[..., n:, :n][..., ::-1, :]
        out[..., n:, n:] = s[..., n:, n:][..., ::-1, ::-1]
        return out


# ----------------------------------------------------------------------
# checks over stacks of unitary matrices


def entry_law_violations(G: HyperbolicUnitary, s: np.ndarray) -> np.ndarray:
    """Mask of matrices whose true inverse differs from the entry law."""
    cand = G.entry_law_inverse(s)
    return ~(G.is_identity(G.matmul(cand, s)) & G.is_identity(G.matmul(s, cand)))


def q_reduction_violations(G: HyperbolicUnitary, limit: int = DEFINITION_SWEEP_LIMIT) -> int:
    """
    Count pairs (u, v) with q(u+v) != q(u) + q(v) + h(u, v) modulo Lambda,
    over all of V when |V| <= ``limit``.
    """
    vecs = G.all_vectors(limit)
    if vecs is None:
        raise ValueError("vector space too large for an exhaustive sweep")
    R = G.ring
    lens = G.length(vecs)
    bad = 0
    step = max(1, (1 << 22) // len(vecs))
    for lo in range(0, len(vecs), step):
        u = vecs[lo:lo + step, None, :]
        v = vecs[None, :, :]
        total = G.length(R.add_table[u, v])
        rhs = R.add_table[R.add_table[lens[lo:lo + step, None], lens[None, :]], G.form_h(u, v)]
        bad += int((~G.in_Lam[R.add_table[total, R.neg_table[rhs]]]).sum())
    return bad


def propagation_violations(G: HyperbolicUnitary, s: np.ndarray) -> np.ndarray:
    """
    Mask of matrices breaking the row/column propagation rule: a column
    equal to x e_k (x a unit) forces row -k to be bar(x^-1) f_-k, and a row
    equal to x f_k forces column -k to be bar(x^-1) e_-k.
    """
    R = G.ring
    N = G.N
    unit = R._unit_mask
    inv = np.zeros(R.order, dtype=np.uint8)
    for u in R.units():
        inv[u] = R.inverse(u)
    want = R.inv_table[inv]
    bad = np.zeros(s.shape[:-2], dtype=bool)
    for k in range(N):
        mk = N - 1 - k
        others = np.arange(N) != k
        for transpose in (False, True):
            t = np.swapaxes(s, -1, -2) if transpose else s
            col = t[..., :, k]
            x = col[..., k]
            hit = unit[x] & (col[..., others] == R.zero).all(axis=-1)
            # the opposite row (or column) of the original matrix
            opp = t[..., mk, :]
            expected = np.full(opp.shape, R.zero, dtype=np.uint8)
            expected[..., mk] = want[x]
            bad |= hit & ~(opp == expected).all(axis=-1)
    return bad


def check_length_congruences(G: HyperbolicUnitary, s: np.ndarray, I: AdditiveSubgroup,
                  move: tuple) -> dict:
    """
    Commutator length congruences for s in U((I, I∩Lambda)).

    ``move`` is ``("short", i, j, x)`` or ``("long", i, y)``.  Computes
    tau = [s, T_ij(x)] (or rho = [s, T_{i,-i}(y)]) and checks each congruence
    modulo Gamma_min(I).  Returns ``{"ok": bool, "failures": [...]}``.
    """
    R, fr = G.ring, G.fr
    fi = FormIdeal(I, I & fr.Lam)
    if not G.congruence_mask(s, fi):
        raise ValueError("sigma is not in U((I, I∩Lambda))")
    gmin = gamma_min(fr, I)
    lens_s = G.column_lengths(s)
    failures = []

    def congruent(a, b):
        return R.sub(int(a), int(b)) in gmin

    if move[0] == "short":
        _, i, j, x = move
        t = G.commutator(s, G.T_short(i, j, x))
        lens = G.column_lengths(t)
        for k in G.omega:
            got = lens[G.p0(k)]
            if k == j:
                want = R.prod(R.bar(x), int(lens_s[G.p0(i)]), x)
            elif k == -i:
                want = R.prod(x, int(lens_s[G.p0(-j)]), R.bar(x))
            else:
                want = R.zero
            if not congruent(got, want):
                failures.append({"column": k, "length": int(got), "expected_mod_gamma_min": want})
    elif move[0] == "long":
        _, i, y = move
        t = G.commutator(s, G.T_long(i, y))
        lens = G.column_lengths(t)
        for k in G.omega:
            got = lens[G.p0(k)]
            want = R.prod(R.bar(y), int(lens_s[G.p0(i)]), y) if k == -i else R.zero
            if not congruent(got, want):
                failures.append({"column": k, "length": int(got), "expected_mod_gamma_min": want})
    else:
        raise ValueError(f"unknown move {move!r}")
    return {"ok": not failures, "failures": failures, "commutator": t}


# ----------------------------------------------------------------------
# relations among root elements


def _relation_cases(G: HyperbolicUnitary, values_short, long_values):
    """Yield (name, description, lhs, rhs) for every admissible instance."""
    R, fr = G.ring, G.fr
    Om = G.omega
    lp = fr.lam_pow

    def roots():
        for i in Om:
            for j in Om:
                if i == j:
                    continue
                vals = long_values(i) if j == -i else values_short
                for x in vals:
                    yield i, j, x

    for i, j, x in roots():
        if j == -i:
            other = R.neg(R.mul(lp((eps(j) - eps(i)) // 2), R.bar(x)))
            yield "R1", (i, j, x), G.T(i, j, x), G.T(-j, -i, other)
        else:
            c = lp((eps(j) - eps(i)) // 2)
            yield "R1", (i, j, x), G.T(i, j, x), G.T(-j, -i, R.neg(R.mul(c, R.bar(x))))
    for i, j, x in roots():
        vals = long_values(i) if j == -i else values_short
        for z in vals:
            yield "R2", (i, j, x, z), G.mul(G.T(i, j, x), G.T(i, j, z)), G.T(i, j, R.add(x, z))
    for i, j, x in roots():
        for h, k, z in roots():
            if h in (j, -i) or k in (i, -j):
                continue
            yield "R3", (i, j, x, h, k, z), G.commutator(G.T(i, j, x), G.T(h, k, z)), G.e
    for i in Om:
        for j in Om:
            for h in Om:
                if i in (j, -j) or h in (j, -j) or i in (h, -h):
                    continue
                for x in values_short:
                    for z in values_short:
                        yield ("R4", (i, j, h, x, z),
                               G.commutator(G.T(i, j, x), G.T(j, h, z)), G.T(i, h, R.mul(x, z)))
    for i in Om:
        for j in Om:
            if i in (j, -j):
                continue
            for x in values_short:
                for z in values_short:
                    val = R.sub(R.mul(x, z), R.prod(lp(-eps(i)), R.bar(z), R.bar(x)))
                    yield ("R5", (i, j, x, z),
                           G.commutator(G.T(i, j, x), G.T(j, -i, z)), G.T(i, -i, val))
    for i in Om:
        for j in Om:
            if i in (j, -j):
                continue
            for a in long_values(i):
                for x in values_short:
                    c = lp((eps(j) - eps(-i)) // 2)
                    val = R.neg(R.prod(c, R.bar(x), a, x))
                    try:
                        rhs = G.mul(G.T(i, j, R.mul(a, x)), G.T(-j, j, val))
                    except ValueError:
                        rhs = None  # long root value not admissible
                    yield ("R6", (i, j, a, x), G.commutator(G.T(i, -i, a), G.T(-i, j, x)), rhs)


def verify_relations(fr: FormRing, n: int = 3, exhaustive: bool | None = None,
                     samples: int = 2000, rng=None) -> dict:
    """
    Check the six families of root-element relations.

    Exhaustive over all ring values when ``|R| <= 9`` (or when forced),
    otherwise a ``samples``-size subset of ring values drawn from ``rng``.
    Returns per-relation counts and up to five counterexamples each.
    """
    G = HyperbolicUnitary(fr, n)
    R = fr.ring
    if exhaustive is None:
        exhaustive = R.order <= 9
    values = list(R.elements)
    if not exhaustive:
        if rng is None:
            raise ValueError("sampled relation check needs an rng")
        k = max(2, min(R.order, int(round(samples ** 0.25))))
        values = sorted({rng.below(R.order) for _ in range(k)} | {R.zero, R.one})
    longs = {i: [a for a in G.admissible_long(i) if exhaustive or a in values or len(values) >= R.order]
             for i in G.omega}
    for i in G.omega:
        if not longs[i]:
            longs[i] = list(G.admissible_long(i))
    counts: dict[str, dict] = {}
    for name, args, lhs, rhs in _relation_cases(G, values, lambda i: longs[i]):
        c = counts.setdefault(name, {"checked": 0, "failed": 0, "counterexamples": []})
        c["checked"] += 1
        if rhs is None or not np.array_equal(lhs, rhs):
            c["failed"] += 1
            if len(c["counterexamples"]) < 5:
                c["counterexamples"].append({"args": list(args), "lhs": lhs.tolist(),
                                             "rhs": None if rhs is None else rhs.tolist()})
    return {"exhaustive": exhaustive, "relations": counts,
            "failures": sum(c["failed"] for c in counts.values())}
