"""
Finite rings with involution, form parameters and form ideals.

Rings are dense operation tables over element indices ``0..order-1``.
Everything here is enumeration-scale: orders are capped at 64.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_ORDER = 64


class RingError(ValueError):
    """Bad ring data or a violated precondition on ring elements."""


# --------------------------------------------------------------------------
# rings


class FiniteRing:
    """
    A finite associative unital ring with involution, given by tables.

    ``add_table[a, b]`` and ``mul_table[a, b]`` hold element indices,
    ``inv_table[a]`` is the involution applied to ``a``.
    """

    def __init__(self, add_table, mul_table, inv_table, zero: int, one: int,
                 labels: Sequence[str] | None = None, name: str = ""):
        add = np.asarray(add_table, dtype=np.uint8)
        mul = np.asarray(mul_table, dtype=np.uint8)
        inv = np.asarray(inv_table, dtype=np.uint8)
        order = add.shape[0]
        if not 1 <= order <= MAX_ORDER:
            raise RingError(f"ring order {order} outside 1..{MAX_ORDER}")
        if add.shape != (order, order) or mul.shape != (order, order) or inv.shape != (order,):
            raise RingError("table shapes do not match the ring order")
        if max(add.max(), mul.max(), inv.max()) >= order:
            raise RingError("table entry out of range")
        neg = np.empty(order, dtype=np.uint8)
        for a in range(order):
            hits = np.nonzero(add[a] == zero)[0]
            if len(hits) != 1:
                raise RingError(f"element {a} has no unique additive inverse")
            neg[a] = hits[0]
        for t in (add, mul, inv, neg):
            t.flags.writeable = False
        self.add_table = add
        self.mul_table = mul
        self.inv_table = inv
        self.neg_table = neg
        self.order = order
        self.zero = int(zero)
        self.one = int(one)
        self.name = name
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(order))

    def __repr__(self):
        return f"FiniteRing({self.name or 'order %d' % self.order})"

    # scalar arithmetic; numpy arrays of indices are accepted too
    def add(self, a, b):
        r = self.add_table[a, b]
        return int(r) if np.ndim(r) == 0 else r

    def mul(self, a, b):
        r = self.mul_table[a, b]
        return int(r) if np.ndim(r) == 0 else r

    def neg(self, a):
        r = self.neg_table[a]
        return int(r) if np.ndim(r) == 0 else r

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def bar(self, a):
        r = self.inv_table[a]
        return int(r) if np.ndim(r) == 0 else r

    def sum(self, items: Iterable[int]) -> int:
        acc = self.zero
        for x in items:
            acc = int(self.add_table[acc, x])
        return acc

    def prod(self, *items: int) -> int:
        acc = self.one
        for x in items:
            acc = int(self.mul_table[acc, x])
        return acc

    @property
    def elements(self) -> range:
        return range(self.order)

    def label(self, a: int) -> str:
        return self.labels[a]

    def inverse(self, a: int) -> int:
        """Two-sided inverse of a unit; raises for non-units."""
        right = np.nonzero(self.mul_table[a] == self.one)[0]
        for b in right:
            if self.mul_table[b, a] == self.one:
                return int(b)
        raise RingError(f"{self.label(a)} is not a unit")

    def is_unit(self, a: int) -> bool:
        return bool(self._unit_mask[a])

    @property
    def _unit_mask(self) -> np.ndarray:
        mask = getattr(self, "_units_cache", None)
        if mask is None:
            m = self.mul_table == self.one
            mask = (m & m.T).any(axis=1)
            mask.flags.writeable = False
            self._units_cache = mask
        return mask

    def units(self) -> list[int]:
        return [int(a) for a in np.nonzero(self._unit_mask)[0]]

    def center(self) -> AdditiveSubgroup:
        comm = (self.mul_table == self.mul_table.T).all(axis=1)
        return AdditiveSubgroup(np.nonzero(comm)[0])

    def is_commutative(self) -> bool:
        return bool((self.mul_table == self.mul_table.T).all())

    def axiom_violations(self) -> list[str]:
        """Exhaustively check ring and involution axioms; empty list iff valid."""
        A, M, J = self.add_table, self.mul_table, self.inv_table
        el = np.arange(self.order)
        a, b, c = np.meshgrid(el, el, el, indexing="ij")
        out = []
        if self.one == self.zero:
            out.append("one equals zero")
        if not (A == A.T).all():
            out.append("addition not commutative")
        if not (A[A[a, b], c] == A[a, A[b, c]]).all():
            out.append("addition not associative")
        if not (A[el, self.zero] == el).all():
            out.append("zero is not an additive identity")
        if not (M[M[a, b], c] == M[a, M[b, c]]).all():
            out.append("multiplication not associative")
        if not ((M[el, self.one] == el).all() and (M[self.one, el] == el).all()):
            out.append("one is not a multiplicative identity")
        if not (M[a, A[b, c]] == A[M[a, b], M[a, c]]).all():
            out.append("left distributivity fails")
        if not (M[A[a, b], c] == A[M[a, c], M[b, c]]).all():
            out.append("right distributivity fails")
        a2, b2 = a[:, :, 0], b[:, :, 0]
        if not (J[A[a2, b2]] == A[J[a2], J[b2]]).all():
            out.append("involution not additive")
        if not (J[M[a2, b2]] == M[J[b2], J[a2]]).all():
            out.append("involution not anti-multiplicative")
        if not (J[J[el]] == el).all():
            out.append("involution not of order two")
        return out


def _tables(order: int, add, mul, inv) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    el = range(order)
    A = np.array([[add(a, b) for b in el] for a in el], dtype=np.uint8)
    M = np.array([[mul(a, b) for b in el] for a in el], dtype=np.uint8)
    J = np.array([inv(a) for a in el], dtype=np.uint8)
    return A, M, J


def build_zmod(m: int) -> FiniteRing:
    """Z/m with the identity involution."""
    if not 2 <= m <= MAX_ORDER:
        raise RingError(f"modulus {m} outside 2..{MAX_ORDER}")
    A, M, J = _tables(m, lambda a, b: (a + b) % m, lambda a, b: (a * b) % m, lambda a: a)
    return FiniteRing(A, M, J, 0, 1, name=f"Z/{m}")


def build_quadratic(m: int, b: int, c: int) -> FiniteRing:
    """
    (Z/m)[x]/(x^2 + bx + c) with conjugation x -> -b - x.

    The element ``u + v*x`` has index ``u + m*v``.
    """
    if m < 2 or m * m > MAX_ORDER:
        raise RingError(f"order {m * m} of (Z/{m})[x]/(x^2+{b}x+{c}) exceeds {MAX_ORDER}")
    b %= m
    c %= m

    def split(k):
        return k % m, k // m

    def add(p, q):
        (u1, v1), (u2, v2) = split(p), split(q)
        return (u1 + u2) % m + m * ((v1 + v2) % m)

    def mul(p, q):
        # x^2 = -b x - c
        (u1, v1), (u2, v2) = split(p), split(q)
        vv = v1 * v2
        return (u1 * u2 - c * vv) % m + m * ((u1 * v2 + v1 * u2 - b * vv) % m)

    def conj(p):
        u, v = split(p)
        # u + v(-b - x)
        return (u - b * v) % m + m * (-v % m)

    A, M, J = _tables(m * m, add, mul, conj)
    labels = []
    for k in range(m * m):
        u, v = split(k)
        vx = "x" if v == 1 else f"{v}x"
        labels.append(f"{u}" if v == 0 else (vx if u == 0 else f"{u}+{vx}"))
    ring = FiniteRing(A, M, J, 0, 1, labels, name=f"Z/{m}[x]/(x^2+{b}x+{c})")
    bad = ring.axiom_violations()
    if bad:
        raise RingError(f"{ring.name}: " + "; ".join(bad))
    return ring


def build_product_swap(m: int) -> FiniteRing:
    """Z/m x Z/m with the swap involution; ``(a, b)`` has index ``a + m*b``."""
    if not 2 <= m <= 8:
        raise RingError(f"modulus {m} outside 2..8")

    def add(p, q):
        return (p % m + q % m) % m + m * ((p // m + q // m) % m)

    def mul(p, q):
        return (p % m) * (q % m) % m + m * ((p // m) * (q // m) % m)

    def swap(p):
        return p // m + m * (p % m)

    A, M, J = _tables(m * m, add, mul, swap)
    labels = [f"({k % m},{k // m})" for k in range(m * m)]
    return FiniteRing(A, M, J, 0, 1 + m, labels, name=f"Z/{m}xZ/{m} swap")


# --------------------------------------------------------------------------
# additive subgroups


@dataclass(frozen=True)
class AdditiveSubgroup:
    """A sorted set of element indices; also used for ideals and subrings."""

    elements: tuple[int, ...]
    _set: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, elements: Iterable[int]):
        els = tuple(sorted({int(e) for e in elements}))
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "_set", frozenset(els))

    def __contains__(self, x) -> bool:
        return int(x) in self._set

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __le__(self, other: AdditiveSubgroup) -> bool:
        return self._set <= other._set

    def __lt__(self, other: AdditiveSubgroup) -> bool:
        return self._set < other._set

    def __ge__(self, other: AdditiveSubgroup) -> bool:
        return self._set >= other._set

    def __gt__(self, other: AdditiveSubgroup) -> bool:
        return self._set > other._set

    def __and__(self, other: AdditiveSubgroup) -> AdditiveSubgroup:
        return AdditiveSubgroup(self._set & other._set)

    def __repr__(self):
        return "{" + ",".join(map(str, self.elements)) + "}"

    def mask(self, order: int) -> np.ndarray:
        m = np.zeros(order, dtype=bool)
        m[list(self.elements)] = True
        return m

    def is_additive_subgroup(self, ring: FiniteRing) -> bool:
        if ring.zero not in self._set:
            return False
        return all(ring.add(a, b) in self._set for a in self.elements for b in self.elements)


def additive_span(ring: FiniteRing, gens: Iterable[int]) -> AdditiveSubgroup:
    """Additive subgroup generated by ``gens`` (breadth-first saturation from 0)."""
    gens = sorted({int(g) for g in gens})
    found = {ring.zero}
    frontier = [ring.zero]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = ring.add(a, g)
                if b not in found:
                    found.add(b)
                    nxt.append(b)
        frontier = nxt
    # finite, so closure under + already gives negation
    return AdditiveSubgroup(found)


def subgroup_sum(ring: FiniteRing, *groups: AdditiveSubgroup) -> AdditiveSubgroup:
    return additive_span(ring, itertools.chain.from_iterable(groups))


def ideal_closure(ring: FiniteRing, gens: Iterable[int]) -> AdditiveSubgroup:
    """Smallest two-sided ideal containing ``gens``."""
    M = ring.mul_table
    seeds = set()
    for g in gens:
        seeds.update(int(v) for v in np.unique(M[M[:, g][:, None], np.arange(ring.order)[None, :]]))
    return additive_span(ring, seeds)


def is_ideal(ring: FiniteRing, I: AdditiveSubgroup) -> bool:
    if not I.is_additive_subgroup(ring):
        return False
    M = ring.mul_table
    el = list(I.elements)
    return bool(I.mask(ring.order)[M[:, el]].all() and I.mask(ring.order)[M[el, :]].all())


def is_involution_invariant(ring: FiniteRing, S: AdditiveSubgroup) -> bool:
    return all(ring.bar(x) in S for x in S)


def involution_ideal(ring: FiniteRing, x: int) -> AdditiveSubgroup:
    """The ideal generated by ``x`` and its conjugate (written RxR)."""
    return ideal_closure(ring, [x, ring.bar(x)])


def enumerate_ideals(ring: FiniteRing, invariant_only: bool = False) -> list[AdditiveSubgroup]:
    """All two-sided ideals, ordered by (size, elements)."""
    principal = {ideal_closure(ring, [x]) for x in ring.elements}
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
    out = [I for I in found if not invariant_only or is_involution_invariant(ring, I)]
    return sorted(out, key=lambda s: (len(s), s.elements))


def enumerate_subgroups_between(ring: FiniteRing, low: AdditiveSubgroup,
                                high: AdditiveSubgroup) -> list[AdditiveSubgroup]:
    """All additive subgroups S with low <= S <= high."""
    if not low <= high:
        return []
    found = {low}
    frontier = [low]
    while frontier:
        nxt = []
        for s in frontier:
            for x in high:
                if x in s:
                    continue
                t = additive_span(ring, s.elements + (x,))
                if t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), s.elements))


# --------------------------------------------------------------------------
# form rings


def _check_lambda(ring: FiniteRing, lam: int) -> list[str]:
    out = []
    if not 0 <= lam < ring.order:
        return [f"lambda {lam} is not a ring element"]
    if lam not in ring.center():
        out.append("lambda not central")
    if ring.mul(lam, ring.bar(lam)) != ring.one:
        out.append("lambda*bar(lambda) != 1")
    return out


def lambda_min(ring: FiniteRing, lam: int) -> AdditiveSubgroup:
    """{r - lam*bar(r)}; an additive subgroup as the image of an additive map."""
    bad = _check_lambda(ring, lam)
    if bad:
        raise RingError("; ".join(bad))
    return AdditiveSubgroup(ring.sub(r, ring.mul(lam, ring.bar(r))) for r in ring.elements)


def lambda_max(ring: FiniteRing, lam: int) -> AdditiveSubgroup:
    """{r : r = -lam*bar(r)}."""
    bad = _check_lambda(ring, lam)
    if bad:
        raise RingError("; ".join(bad))
    return AdditiveSubgroup(r for r in ring.elements
                            if r == ring.neg(ring.mul(lam, ring.bar(r))))


def _conj_closed(ring: FiniteRing, S: AdditiveSubgroup) -> bool:
    """r S bar(r) within S for every r."""
    M, J = ring.mul_table, ring.inv_table
    el = np.arange(ring.order)
    s = np.array(S.elements)
    vals = M[M[el[:, None], s[None, :]], J[el][:, None]]
    return bool(S.mask(ring.order)[vals].all())


def form_parameter_violations(ring: FiniteRing, lam: int, Lam: AdditiveSubgroup) -> list[str]:
    out = []
    if not Lam.is_additive_subgroup(ring):
        out.append("Lambda not an additive subgroup")
    if not lambda_min(ring, lam) <= Lam:
        out.append("Lambda_min not contained in Lambda")
    if not Lam <= lambda_max(ring, lam):
        out.append("Lambda not contained in Lambda_max")
    if not _conj_closed(ring, Lam):
        out.append("r*Lambda*bar(r) not contained in Lambda")
    return out


def enumerate_form_parameters(ring: FiniteRing, lam: int) -> list[AdditiveSubgroup]:
    lo, hi = lambda_min(ring, lam), lambda_max(ring, lam)
    return [S for S in enumerate_subgroups_between(ring, lo, hi) if _conj_closed(ring, S)]


@dataclass(frozen=True, eq=False)
class FormRing:
    ring: FiniteRing
    lam: int
    Lam: AdditiveSubgroup

    def __repr__(self):
        return f"FormRing({self.ring.name}, lambda={self.ring.label(self.lam)}, Lambda={self.Lam})"

    @property
    def lam_bar(self) -> int:
        return self.ring.bar(self.lam)

    def lam_pow(self, e: int) -> int:
        """lambda**e for e in {-1, 0, 1}; lambda**-1 is bar(lambda)."""
        if e == 0:
            return self.ring.one
        if e == 1:
            return self.lam
        if e == -1:
            return self.lam_bar
        raise ValueError(f"lambda exponent {e} outside -1..1")


def validate_form_ring(fr: FormRing) -> list[str]:
    """All violated form-ring axioms; empty iff ``fr`` is a form ring."""
    out = fr.ring.axiom_violations()
    bad_lam = _check_lambda(fr.ring, fr.lam)
    out += bad_lam
    if not bad_lam:
        out += form_parameter_violations(fr.ring, fr.lam, fr.Lam)
    return out


def make_form_ring(ring: FiniteRing, lam: int, Lam: AdditiveSubgroup | str) -> FormRing:
    """Build and validate; ``Lam`` may be ``"min"`` or ``"max"``."""
    if isinstance(Lam, str):
        Lam = {"min": lambda_min, "max": lambda_max}[Lam](ring, lam)
    fr = FormRing(ring, lam, Lam)
    bad = validate_form_ring(fr)
    if bad:
        raise RingError("; ".join(bad))
    return fr


# --------------------------------------------------------------------------
# form ideals


@dataclass(frozen=True)
class FormIdeal:
    I: AdditiveSubgroup
    Gamma: AdditiveSubgroup

    def __repr__(self):
        return f"({self.I}, {self.Gamma})"

    def __le__(self, other: FormIdeal) -> bool:
        return self.I <= other.I and self.Gamma <= other.Gamma


def _require_invariant_ideal(ring: FiniteRing, I: AdditiveSubgroup):
    if not is_ideal(ring, I):
        raise RingError(f"{I} is not an ideal")
    if not is_involution_invariant(ring, I):
        raise RingError(f"{I} is not involution invariant")


def gamma_min(fr: FormRing, I: AdditiveSubgroup) -> AdditiveSubgroup:
    R = fr.ring
    _require_invariant_ideal(R, I)
    first = [R.sub(x, R.mul(fr.lam, R.bar(x))) for x in I]
    second = [R.prod(z, a, R.bar(z)) for z in I for a in fr.Lam]
    return additive_span(R, first + second)


def gamma_max(fr: FormRing, I: AdditiveSubgroup) -> AdditiveSubgroup:
    _require_invariant_ideal(fr.ring, I)
    return I & fr.Lam


def form_ideal_violations(fr: FormRing, fi: FormIdeal) -> list[str]:
    R = fr.ring
    out = []
    if not is_ideal(R, fi.I):
        return ["I is not a two-sided ideal"]
    if not is_involution_invariant(R, fi.I):
        return ["I is not involution invariant"]
    if not fi.Gamma.is_additive_subgroup(R):
        out.append("Gamma not an additive subgroup")
    if not gamma_min(fr, fi.I) <= fi.Gamma:
        out.append("Gamma_min not contained in Gamma")
    if not fi.Gamma <= gamma_max(fr, fi.I):
        out.append("Gamma not contained in Gamma_max = I∩Lambda")
    if not _conj_closed(R, fi.Gamma):
        out.append("a*Gamma*bar(a) not contained in Gamma")
    return out


def is_form_ideal(fr: FormRing, fi: FormIdeal) -> tuple[bool, list[str]]:
    bad = form_ideal_violations(fr, fi)
    return not bad, bad


def enumerate_form_ideals(fr: FormRing) -> list[FormIdeal]:
    """Every form ideal, ordered by ideal then relative form parameter."""
    out = []
    for I in enumerate_ideals(fr.ring, invariant_only=True):
        lo, hi = gamma_min(fr, I), gamma_max(fr, I)
        out += [FormIdeal(I, G) for G in enumerate_subgroups_between(fr.ring, lo, hi)
                if _conj_closed(fr.ring, G)]
    return out


def gamma_of(fr: FormRing, fi: FormIdeal, x: int) -> FormIdeal:
    """The form ideal defined by ``x`` and ``fi``."""
    R = fr.ring
    J = involution_ideal(R, x)
    if x not in fi.I:
        return FormIdeal(J, gamma_min(fr, J))
    if x in gamma_max(fr, fi.I) and x not in fi.Gamma:
        extra = [R.prod(y, x, R.bar(y)) for y in R.elements]
        return FormIdeal(J, subgroup_sum(R, gamma_min(fr, J), additive_span(R, extra)))
    raise RingError(f"{R.label(x)} lies in I and is not in Gamma_max minus Gamma")


def is_subring(ring: FiniteRing, S: AdditiveSubgroup) -> bool:
    """Additive subgroup closed under multiplication (1 not required)."""
    if not S.is_additive_subgroup(ring):
        return False
    return all(ring.mul(a, b) in S for a in S for b in S)


def subring_C(ring: FiniteRing, Cprime: AdditiveSubgroup) -> AdditiveSubgroup:
    """The subring of finite sums of c*bar(c) and -c*bar(c), c in ``Cprime``."""
    if not Cprime <= ring.center():
        raise RingError(f"{Cprime} is not central")
    if not is_subring(ring, Cprime):
        raise RingError(f"{Cprime} is not a subring")
    norms = [ring.mul(c, ring.bar(c)) for c in Cprime]
    S = additive_span(ring, norms + [ring.neg(v) for v in norms])
    while not is_subring(ring, S):
        S = additive_span(ring, list(S) + [ring.mul(a, b) for a in S for b in S])
    return S
