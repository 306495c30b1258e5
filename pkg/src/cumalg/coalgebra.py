"""Wedge monomials, Koszul signs and the reduced coproduct, up to a weight cap.

The symmetric coalgebra over a graded basis is spanned, in each weight n, by
canonical wedge monomials: non-decreasing index tuples in which an odd-degree
index never repeats.  The reduced coproduct splits a monomial over all ordered
pairs of complementary nonempty position subsets; reassembling blocks by
wedging later sums over unordered partitions, which is the convention under
which the cumulant bijection fixes the leading term with coefficient 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import GradedBasis, ValidationError, Vector, format_scalar, parse_scalar, same_basis

DEFAULT_WEIGHT_CAP = 6


def koszul_sign(degrees, permutation) -> int:
    """Sign picked up when graded factors are rearranged.

    `permutation[i]` is the position factor i moves to; each pair of factors
    that crosses contributes (-1)^(d_i*d_j).
    """
    n = len(permutation)
    if sorted(permutation) != list(range(n)) or len(degrees) != n:
        raise ValidationError("malformed permutation")
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if permutation[i] > permutation[j]:
                sign *= -1 if (degrees[i] % 2) and (degrees[j] % 2) else 1
    return sign


def _sort_sign(indices, degrees):
    """Koszul sign of stably sorting `indices` ascending; None if an odd
    degree repeats (the monomial is zero)."""
    sign = 1
    n = len(indices)
    for i in range(n):
        for j in range(i + 1, n):
            if indices[i] > indices[j]:
                if (degrees[i] % 2) and (degrees[j] % 2):
                    sign = -sign
            elif indices[i] == indices[j] and degrees[i] % 2:
                return None
    return sign


@dataclass(frozen=True)
class WedgeMonomial:
    """A canonical wedge monomial: sorted generator indices plus their degrees."""

    indices: tuple
    factor_degrees: tuple

    @property
    def weight(self) -> int:
        return len(self.indices)

    @property
    def degree(self) -> int:
        return sum(self.factor_degrees)

    def sort_key(self):
        return (self.weight, self.indices)

    def names(self, basis: GradedBasis):
        return [basis.names[i] for i in self.indices]

    def __repr__(self):
        return "w(" + ",".join(map(str, self.indices)) + ")"


def monomial(basis: GradedBasis, indices) -> WedgeMonomial:
    """Construct a canonical monomial; indices must already be sorted."""
    indices = tuple(indices)
    degrees = tuple(basis.degrees[i] for i in indices)
    if list(indices) != sorted(indices):
        raise ValidationError(f"monomial indices not sorted: {indices}")
    if _sort_sign(indices, degrees) is None:
        raise ValidationError("repeated odd-degree factor gives the zero monomial")
    return WedgeMonomial(indices, degrees)


def normalize_monomial(basis: GradedBasis, factors):
    """Sort a factor list into canonical form with its Koszul sign.

    Returns (monomial, sign) or None when the result is zero (an odd-degree
    factor repeats).
    """
    factors = list(factors)
    if not factors:
        raise ValidationError("empty factor list")
    degrees = [basis.degrees[i] for i in factors]
    return _normalize(tuple(factors), tuple(degrees))


def _normalize(indices, degrees):
    sign = _sort_sign(indices, degrees)
    if sign is None:
        return None
    order = sorted(range(len(indices)), key=lambda k: (indices[k], k))
    sorted_idx = tuple(indices[k] for k in order)
    sorted_deg = tuple(degrees[k] for k in order)
    return WedgeMonomial(sorted_idx, sorted_deg), sign


def canonical_monomials(basis: GradedBasis, weight: int):
    """All canonical monomials of the given weight, in sorted order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(len(basis)), weight):
        degrees = tuple(basis.degrees[i] for i in combo)
        if _sort_sign(combo, degrees) is None:
            continue
        out.append(WedgeMonomial(combo, degrees))
    return out


def monomials_up_to(basis: GradedBasis, cap: int):
    for weight in range(1, cap + 1):
        yield from canonical_monomials(basis, weight)


class SElement:
    """A sparse linear combination of wedge monomials, truncated at a cap.

    `overflow` records that some operation dropped terms beyond the cap, so
    truncation is never silent.
    """

    __slots__ = ("basis", "cap", "terms", "overflow")

    def __init__(self, basis, cap, terms=None, overflow=False):
        self.basis = basis
        self.cap = int(cap)
        if self.cap < 1:
            raise ValidationError("weight cap must be >= 1")
        clean = {}
        for w, c in (terms or {}).items():
            if w.weight > self.cap:
                raise ValidationError(f"monomial of weight {w.weight} exceeds cap {self.cap}")
            c = Fraction(c)
            if c != 0:
                clean[w] = c
        self.terms = clean
        self.overflow = bool(overflow)

    @classmethod
    def zero(cls, basis, cap):
        return cls(basis, cap, {})

    @classmethod
    def from_monomial(cls, basis, cap, w, coeff=1):
        return cls(basis, cap, {w: Fraction(coeff)})

    @classmethod
    def from_vector(cls, v: Vector, cap):
        terms = {
            WedgeMonomial((i,), (v.basis.degrees[i],)): c for i, c in v.coeffs.items()
        }
        return cls(v.basis, cap, terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def is_zero(self) -> bool:
        return not self.terms

    def weight_project(self, n: int) -> "SElement":
        if n < 1:
            raise ValidationError("weight must be >= 1")
        return SElement(
            self.basis,
            self.cap,
            {w: c for w, c in self.terms.items() if w.weight == n},
            self.overflow,
        )

    def max_weight(self) -> int:
        return max((w.weight for w in self.terms), default=0)

    def weight_one_vector(self) -> Vector:
        """The weight-1 component as an algebra element."""
        return Vector(
            self.basis,
            {w.indices[0]: c for w, c in self.terms.items() if w.weight == 1},
        )

    def __add__(self, other: "SElement") -> "SElement":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return SElement(self.basis, self.cap, out, self.overflow or other.overflow)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scale) -> "SElement":
        scale = Fraction(scale)
        return SElement(
            self.basis,
            self.cap,
            {w: scale * c for w, c in self.terms.items()},
            self.overflow,
        )

    def __eq__(self, other):
        # overflow is bookkeeping, not part of the value
        return (
            isinstance(other, SElement)
            and same_basis(self.basis, other.basis)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.basis.uid, tuple(self.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w, c in self.items():
            name = "^".join(w.names(self.basis))
            bits.append(f"({c})*{name}")
        return " + ".join(bits)

    def _check(self, other):
        if not same_basis(self.basis, other.basis) or self.cap != other.cap:
            raise ValidationError("elements over different presentations or caps")

    def to_doc(self):
        return [
            {"monomial": w.names(self.basis), "coeff": format_scalar(c)}
            for w, c in self.items()
        ]

    @classmethod
    def from_doc(cls, basis, cap, doc):
        terms = {}
        for entry in doc:
            indices = [basis.index(n) for n in entry["monomial"]]
            norm = normalize_monomial(basis, indices)
            if norm is None:
                continue
            w, sign = norm
            terms[w] = terms.get(w, Fraction(0)) + sign * parse_scalar(entry["coeff"])
        return cls(basis, cap, terms)


def wedge(u: SElement, v: SElement) -> SElement:
    """Graded-commutative product on the symmetric coalgebra carrier.

    Terms whose combined weight exceeds the cap are dropped and flagged.
    """
    u._check(v)
    out = {}
    overflow = u.overflow or v.overflow
    for wu, cu in u.terms.items():
        for wv, cv in v.terms.items():
            if wu.weight + wv.weight > u.cap:
                overflow = True
                continue
            norm = _normalize(
                wu.indices + wv.indices, wu.factor_degrees + wv.factor_degrees
            )
            if norm is None:
                continue
            w, sign = norm
            out[w] = out.get(w, Fraction(0)) + sign * cu * cv
    return SElement(u.basis, u.cap, out, overflow)


def weight_project(v: SElement, n: int) -> SElement:
    return v.weight_project(n)


class TensorPairSum:
    """A normalized sum of signed (left, right) monomial pairs."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for (l, r), c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                self.terms[(l, r)] = c

    def add_term(self, coeff, left: WedgeMonomial, right: WedgeMonomial):
        key = (left, right)
        value = self.terms.get(key, Fraction(0)) + coeff
        if value == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = value

    def items(self):
        return sorted(
            self.terms.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())
        )

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, TensorPairSum) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def signed_flip(self) -> "TensorPairSum":
        """Apply the graded flip l⊗r -> (-1)^(|l||r|) r⊗l."""
        out = TensorPairSum()
        for (l, r), c in self.terms.items():
            sign = -1 if (l.degree % 2) and (r.degree % 2) else 1
            out.add_term(sign * c, r, l)
        return out

    def __repr__(self):
        return " + ".join(f"({c})*{l}⊗{r}" for (l, r), c in self.items()) or "0"


@lru_cache(maxsize=None)
def _proper_subsets(n: int):
    """Nonempty proper position subsets of range(n), lexicographic."""
    positions = range(n)
    out = []
    for size in range(1, n):
        out.extend(itertools.combinations(positions, size))
    return tuple(out)


def _extraction_sign(mono: WedgeMonomial, subset, complement) -> int:
    """Koszul sign of moving `subset` positions to the front, orders kept."""
    sign = 1
    degs = mono.factor_degrees
    sub = set(subset)
    for j in complement:
        for i in subset:
            if i > j and (degs[i] % 2) and (degs[j] % 2):
                sign = -sign
    return sign


def _coproduct_cached(mono: WedgeMonomial) -> TensorPairSum:
    out = TensorPairSum()
    n = mono.weight
    for subset in _proper_subsets(n):
        complement = tuple(p for p in range(n) if p not in set(subset))
        sign = _extraction_sign(mono, subset, complement)
        left = WedgeMonomial(
            tuple(mono.indices[p] for p in subset),
            tuple(mono.factor_degrees[p] for p in subset),
        )
        right = WedgeMonomial(
            tuple(mono.indices[p] for p in complement),
            tuple(mono.factor_degrees[p] for p in complement),
        )
        out.add_term(Fraction(sign), left, right)
    return out


_coproduct_memo: dict = {}


def coproduct(w: WedgeMonomial) -> TensorPairSum:
    """Reduced coproduct: ordered complementary subset splittings with signs.

    Weight-1 monomials map to the empty sum.
    """
    cached = _coproduct_memo.get(w)
    if cached is None:
        cached = _coproduct_cached(w)
        _coproduct_memo[w] = cached
    return cached


def coproduct_element(v: SElement) -> TensorPairSum:
    out = TensorPairSum()
    for w, c in v.terms.items():
        for (l, r), s in coproduct(w).terms.items():
            out.add_term(c * s, l, r)
    return out


def _ordered_splits(positions, k):
    """Ordered partitions of `positions` (a tuple) into k nonempty blocks."""
    if k == 1:
        yield (positions,)
        return
    n = len(positions)
    # first block is any nonempty subset leaving enough elements behind
    for size in range(1, n - k + 2):
        for block in itertools.combinations(positions, size):
            rest = tuple(p for p in positions if p not in set(block))
            for tail in _ordered_splits(rest, k - 1):
                yield (block,) + tail


def _rearrangement_sign(mono: WedgeMonomial, blocks) -> int:
    """Koszul sign of listing the factors block by block."""
    degs = mono.factor_degrees
    order = [p for block in blocks for p in block]
    perm = [0] * len(order)
    for new_pos, old_pos in enumerate(order):
        perm[old_pos] = new_pos
    return koszul_sign(degs, perm)


def iterated_coproduct(w: WedgeMonomial, k: int):
    """Sweedler iterate: signed k-tuples of monomials splitting w.

    k = 1 is the identity; k = weight(w) lists all factor orderings.  The
    result is normalized (duplicate tuples accumulate) and independent of
    the parenthesization used to compute it.
    """
    if not 1 <= k <= w.weight:
        raise ValidationError(f"iterate count {k} out of range for weight {w.weight}")
    acc = {}
    for blocks in _ordered_splits(tuple(range(w.weight)), k):
        sign = _rearrangement_sign(w, blocks)
        parts = tuple(
            WedgeMonomial(
                tuple(w.indices[p] for p in block),
                tuple(w.factor_degrees[p] for p in block),
            )
            for block in blocks
        )
        acc[parts] = acc.get(parts, Fraction(0)) + sign
    return sorted(
        ((c, parts) for parts, c in acc.items() if c != 0),
        key=lambda item: tuple(p.sort_key() for p in item[1]),
    )


@lru_cache(maxsize=None)
def set_partitions(n: int):
    """Unordered partitions of range(n); blocks sorted, ordered by minimum."""
    if n == 0:
        return ((),)
    out = []
    # position 0 always lives in the first block
    rest = tuple(range(1, n))
    for size in range(0, n):
        for extra in itertools.combinations(rest, size):
            first = (0,) + extra
            remaining = tuple(p for p in rest if p not in set(extra))
            if remaining:
                for sub in set_partitions(len(remaining)):
                    mapped = tuple(
                        tuple(remaining[q] for q in block) for block in sub
                    )
                    out.append((first,) + mapped)
            else:
                out.append((first,))
    return tuple(out)
