"""Operators on the symmetric coalgebra built from arity-indexed coefficients.

A family of Taylor coefficients (one multilinear symmetric map per arity)
extends in two ways: as a coderivation, acting on one block of factors at a
time, or as a coalgebra map, acting on every block of a partition at once.
Conversely any operator yields coefficients by corestricting to weight one.
Everything is lazy and memoized per monomial; all arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .algebra import (
    GradedBasis,
    LinearMap,
    ValidationError,
    Vector,
    format_scalar,
    parse_scalar,
    same_basis,
)
from .coalgebra import (
    SElement,
    TensorPairSum,
    WedgeMonomial,
    canonical_monomials,
    coproduct,
    coproduct_element,
    monomials_up_to,
    normalize_monomial,
    set_partitions,
    _extraction_sign,
    _proper_subsets,
    _rearrangement_sign,
)


class TaylorFamily:
    """Symmetric multilinear coefficients, one table per arity.

    Table keys are canonical monomials; evaluation at an arbitrary factor
    tuple normalizes first and applies the Koszul sign.  Values live in the
    target basis and must be homogeneous of the monomial degree shifted by
    the family degree.
    """

    def __init__(self, source: GradedBasis, target: GradedBasis, degree: int, tables):
        self.source = source
        self.target = target
        self.degree = int(degree)
        clean: dict = {}
        for arity, table in tables.items():
            arity = int(arity)
            if arity < 1:
                raise ValidationError("arity must be >= 1")
            kept = {}
            for mono, value in table.items():
                if mono.weight != arity:
                    raise ValidationError(
                        f"monomial {mono} filed under arity {arity}"
                    )
                if not same_basis(value.basis, target):
                    raise ValidationError("coefficient value over the wrong basis")
                if value.is_zero():
                    continue
                if not value.is_homogeneous(mono.degree + self.degree):
                    raise ValidationError(
                        f"coefficient at {mono} not homogeneous of degree "
                        f"{mono.degree + self.degree}"
                    )
                kept[mono] = value
            if kept:
                clean[arity] = kept
        self.tables = clean

    @classmethod
    def from_linear_map(cls, m: LinearMap) -> "TaylorFamily":
        table = {}
        for i in range(len(m.source)):
            v = m.apply(m.source.generator(i))
            if not v.is_zero():
                mono = WedgeMonomial((i,), (m.source.degrees[i],))
                table[mono] = v
        return cls(m.source, m.target, m.degree, {1: table})

    def arities(self):
        return sorted(self.tables)

    def max_arity(self) -> int:
        return max(self.tables, default=0)

    def coefficient(self, mono: WedgeMonomial) -> Vector:
        return self.tables.get(mono.weight, {}).get(mono, Vector.zero(self.target))

    def evaluate(self, factors) -> Vector:
        """Value at an arbitrary (possibly unsorted) factor index tuple."""
        norm = normalize_monomial(self.source, factors)
        if norm is None:
            return Vector.zero(self.target)
        mono, sign = norm
        return sign * self.coefficient(mono)

    def arity_one_map(self) -> LinearMap:
        columns = {
            mono.indices[0]: value for mono, value in self.tables.get(1, {}).items()
        }
        return LinearMap(self.source, self.target, self.degree, columns)

    def restrict_arities(self, keep) -> "TaylorFamily":
        keep = set(keep)
        return TaylorFamily(
            self.source,
            self.target,
            self.degree,
            {a: t for a, t in self.tables.items() if a in keep},
        )

    def __eq__(self, other):
        return (
            isinstance(other, TaylorFamily)
            and same_basis(self.source, other.source)
            and same_basis(self.target, other.target)
            and self.degree == other.degree
            and self.tables == other.tables
        )

    def to_doc(self):
        arities = {}
        for arity in self.arities():
            rows = []
            for mono in sorted(self.tables[arity], key=lambda w: w.sort_key()):
                rows.append(
                    {
                        "monomial": mono.names(self.source),
                        "value": self.tables[arity][mono].to_doc(),
                    }
                )
            arities[str(arity)] = rows
        return {"degree": self.degree, "arities": arities}

    @classmethod
    def from_doc(cls, doc, source: GradedBasis, target: GradedBasis) -> "TaylorFamily":
        degree = int(doc.get("degree", 0))
        tables: dict = {}
        for arity_key, rows in doc.get("arities", {}).items():
            arity = int(arity_key)
            table = tables.setdefault(arity, {})
            for row in rows:
                indices = [source.index(n) for n in row["monomial"]]
                if len(indices) != arity:
                    raise ValidationError(
                        f"monomial {row['monomial']} filed under arity {arity}"
                    )
                norm = normalize_monomial(source, indices)
                if norm is None:
                    continue
                mono, sign = norm
                value = Fraction(sign) * Vector.from_doc(target, row["value"])
                table[mono] = table.get(mono, Vector.zero(target)) + value
        return cls(source, target, degree, tables)


class SMap:
    """A linear operator on truncated coalgebra elements, memoized per monomial."""

    def __init__(
        self,
        source: GradedBasis,
        target: GradedBasis,
        cap: int,
        degree: int,
        fn: Callable[[WedgeMonomial], SElement],
        label: str = "",
    ):
        self.source = source
        self.target = target
        self.cap = int(cap)
        self.degree = int(degree)
        self._fn = fn
        self.label = label
        self._cache: dict = {}

    @classmethod
    def identity(cls, basis: GradedBasis, cap: int) -> "SMap":
        def fn(w, _basis=basis, _cap=cap):
            return SElement.from_monomial(_basis, _cap, w)

        return cls(basis, basis, cap, 0, fn, "id")

    def on_monomial(self, w: WedgeMonomial) -> SElement:
        out = self._cache.get(w)
        if out is None:
            out = self._fn(w)
            self._cache[w] = out
        return out

    def __call__(self, v: SElement) -> SElement:
        if not same_basis(v.basis, self.source) or v.cap != self.cap:
            raise ValidationError("element does not match the operator's source")
        out = SElement.zero(self.target, self.cap)
        for w, c in v.terms.items():
            out = out + c * self.on_monomial(w)
        if v.overflow:
            out = SElement(out.basis, out.cap, out.terms, True)
        return out

    def compose(self, inner: "SMap") -> "SMap":
        if not same_basis(inner.target, self.source) or inner.cap != self.cap:
            raise ValidationError("composition mismatch")
        outer = self

        def fn(w):
            return outer(inner.on_monomial(w))

        label = f"{self.label}∘{inner.label}" if self.label and inner.label else ""
        return SMap(inner.source, self.target, self.cap, self.degree + inner.degree, fn, label)

    def _check_peer(self, other: "SMap"):
        if (
            not same_basis(self.source, other.source)
            or not same_basis(self.target, other.target)
            or self.cap != other.cap
        ):
            raise ValidationError("operator shape mismatch")

    def __add__(self, other: "SMap") -> "SMap":
        self._check_peer(other)
        if self.degree != other.degree:
            raise ValidationError("cannot add operators of different degrees")

        def fn(w):
            return self.on_monomial(w) + other.on_monomial(w)

        return SMap(self.source, self.target, self.cap, self.degree, fn)

    def __sub__(self, other: "SMap") -> "SMap":
        return self + (-1) * other

    def __rmul__(self, scale) -> "SMap":
        scale = Fraction(scale)

        def fn(w):
            return scale * self.on_monomial(w)

        return SMap(self.source, self.target, self.cap, self.degree, fn, self.label)

    def first_difference(self, other: "SMap", max_weight: Optional[int] = None):
        """Earliest canonical monomial where the two operators disagree."""
        self._check_peer(other)
        top = self.cap if max_weight is None else max_weight
        for w in monomials_up_to(self.source, top):
            if self.on_monomial(w) != other.on_monomial(w):
                return w
        return None

    def equal_up_to(self, other: "SMap", max_weight: Optional[int] = None) -> bool:
        return self.first_difference(other, max_weight) is None

    def table(self, max_weight: Optional[int] = None):
        top = self.cap if max_weight is None else max_weight
        return {w: self.on_monomial(w) for w in monomials_up_to(self.source, top)}

    def to_doc(self, max_weight: Optional[int] = None):
        rows = []
        for w, image in self.table(max_weight).items():
            rows.append({"monomial": w.names(self.source), "value": image.to_doc()})
        return rows


def extend_coderivation(family: TaylorFamily, cap: int) -> SMap:
    """The unique coderivation whose Taylor coefficients are `family`.

    Each arity-k coefficient eats one k-factor block, shuffled to the front
    with its Koszul sign, and the weight-one result is wedged back on.
    """
    if not same_basis(family.source, family.target):
        raise ValidationError("a coderivation needs source and target to agree")
    basis = family.source

    def fn(w: WedgeMonomial) -> SElement:
        n = w.weight
        out = SElement.zero(basis, cap)
        for subset in _subsets_including_full(n):
            k = len(subset)
            if k not in family.tables:
                continue
            complement = tuple(p for p in range(n) if p not in set(subset))
            sign = _extraction_sign(w, subset, complement)
            value = family.evaluate(tuple(w.indices[p] for p in subset))
            if value.is_zero():
                continue
            head = Fraction(sign) * SElement.from_vector(value, cap)
            if complement:
                tail = SElement.from_monomial(
                    basis,
                    cap,
                    WedgeMonomial(
                        tuple(w.indices[p] for p in complement),
                        tuple(w.factor_degrees[p] for p in complement),
                    ),
                )
                out = out + _wedge_noflag(head, tail)
            else:
                out = out + head
        return out

    return SMap(basis, basis, cap, family.degree, fn)


def _subsets_including_full(n: int):
    full = (tuple(range(n)),)
    return _proper_subsets(n) + full


def _wedge_noflag(u: SElement, v: SElement) -> SElement:
    from .coalgebra import wedge

    out = wedge(u, v)
    if out.overflow:
        raise ValidationError("weight cap exceeded inside an extension")
    return out


def extend_coalgebra_map(family: TaylorFamily, cap: int) -> SMap:
    """The unique coalgebra map whose Taylor coefficients are `family`.

    Sums over unordered partitions of the factor positions; each block is fed
    to the coefficient of its size, and the weight-one outputs are wedged in
    block order with the rearrangement Koszul sign.  Missing arities make the
    whole partition vanish.  Only degree-zero families compose consistently
    here, so other degrees are rejected.
    """
    if family.degree != 0:
        raise ValidationError("coalgebra-map extension needs a degree-zero family")
    source, target = family.source, family.target

    def fn(w: WedgeMonomial) -> SElement:
        n = w.weight
        out = SElement.zero(target, cap)
        for blocks in set_partitions(n):
            if any(len(b) not in family.tables for b in blocks):
                continue
            sign = _rearrangement_sign(w, blocks)
            piece = None
            for block in blocks:
                value = family.evaluate(tuple(w.indices[p] for p in block))
                if value.is_zero():
                    piece = None
                    break
                head = SElement.from_vector(value, cap)
                piece = head if piece is None else _wedge_noflag(piece, head)
            if piece is not None:
                out = out + Fraction(sign) * piece
        return out

    return SMap(source, target, cap, 0, fn)


def taylor_coefficient(op: SMap, mono: WedgeMonomial) -> Vector:
    """Corestriction to weight one of the operator's value at a monomial."""
    return op.on_monomial(mono).weight_one_vector()


def taylor_extract(op: SMap, arity: int) -> dict:
    """The arity-n coefficient table of an operator, sparse on canonical monomials."""
    table = {}
    for mono in canonical_monomials(op.source, arity):
        value = taylor_coefficient(op, mono)
        if not value.is_zero():
            table[mono] = value
    return table


def extract_family(op: SMap, max_arity: int) -> TaylorFamily:
    tables: dict = {}
    for arity in range(1, max_arity + 1):
        table = taylor_extract(op, arity)
        if table:
            tables[arity] = table
    return TaylorFamily(op.source, op.target, op.degree, tables)


def bracket(d1: SMap, d2: SMap) -> SMap:
    """Graded commutator d1∘d2 - (-1)^(|d1||d2|) d2∘d1."""
    sign = -1 if (d1.degree % 2) and (d2.degree % 2) else 1
    return d1.compose(d2) - Fraction(sign) * d2.compose(d1)


def _apply_left(op: SMap, pairs: TensorPairSum) -> TensorPairSum:
    out = TensorPairSum()
    for (l, r), c in pairs.terms.items():
        for wl, cl in op.on_monomial(l).terms.items():
            out.add_term(c * cl, wl, r)
    return out


def _apply_right(op: SMap, pairs: TensorPairSum) -> TensorPairSum:
    out = TensorPairSum()
    odd = op.degree % 2
    for (l, r), c in pairs.terms.items():
        sign = -1 if odd and (l.degree % 2) else 1
        for wr, cr in op.on_monomial(r).terms.items():
            out.add_term(sign * c * cr, l, wr)
    return out


def _apply_both(op: SMap, pairs: TensorPairSum) -> TensorPairSum:
    out = TensorPairSum()
    for (l, r), c in pairs.terms.items():
        left = op.on_monomial(l)
        right = op.on_monomial(r)
        for wl, cl in left.terms.items():
            for wr, cr in right.terms.items():
                out.add_term(c * cl * cr, wl, wr)
    return out


def _tensor_doc(pairs: TensorPairSum, basis_l: GradedBasis, basis_r: GradedBasis):
    return [
        {
            "left": l.names(basis_l),
            "right": r.names(basis_r),
            "coeff": format_scalar(c),
        }
        for (l, r), c in pairs.items()
    ]


@dataclass
class CheckReport:
    """Outcome of a coalgebra-law check, with the first counterexample."""

    law: str
    ok: bool
    checked: int
    witness: Optional[dict] = None

    def to_doc(self):
        doc = {"law": self.law, "ok": self.ok, "checked": self.checked}
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc


def check_coderivation(op: SMap, max_weight: Optional[int] = None) -> CheckReport:
    """Verify the co-Leibniz law against the reduced coproduct."""
    if not same_basis(op.source, op.target):
        raise ValidationError("co-Leibniz needs an endo-operator")
    top = op.cap if max_weight is None else max_weight
    checked = 0
    for w in monomials_up_to(op.source, top):
        checked += 1
        pairs = coproduct(w)
        lhs = coproduct_element(op.on_monomial(w))
        rhs_terms = dict(_apply_left(op, pairs).terms)
        for key, c in _apply_right(op, pairs).terms.items():
            value = rhs_terms.get(key, Fraction(0)) + c
            if value == 0:
                rhs_terms.pop(key, None)
            else:
                rhs_terms[key] = value
        rhs = TensorPairSum(rhs_terms)
        if lhs != rhs:
            witness = {
                "monomial": w.names(op.source),
                "lhs": _tensor_doc(lhs, op.target, op.target),
                "rhs": _tensor_doc(rhs, op.target, op.target),
            }
            return CheckReport("co-Leibniz", False, checked, witness)
    return CheckReport("co-Leibniz", True, checked)


def check_comorphism(op: SMap, max_weight: Optional[int] = None) -> CheckReport:
    """Verify compatibility with the reduced coproduct on both sides."""
    if op.degree != 0:
        raise ValidationError("comorphism check needs a degree-zero operator")
    top = op.cap if max_weight is None else max_weight
    checked = 0
    for w in monomials_up_to(op.source, top):
        checked += 1
        pairs = coproduct(w)
        lhs = coproduct_element(op.on_monomial(w))
        rhs = _apply_both(op, pairs)
        if lhs != rhs:
            witness = {
                "monomial": w.names(op.source),
                "lhs": _tensor_doc(lhs, op.target, op.target),
                "rhs": _tensor_doc(rhs, op.target, op.target),
            }
            return CheckReport("comorphism", False, checked, witness)
    return CheckReport("comorphism", True, checked)


def check_filtration_one_identity(op: SMap) -> CheckReport:
    """Verify the operator fixes every weight-one monomial."""
    checked = 0
    for w in canonical_monomials(op.source, 1):
        checked += 1
        expected = SElement.from_monomial(op.target, op.cap, w)
        got = op.on_monomial(w)
        if got != expected:
            witness = {
                "monomial": w.names(op.source),
                "lhs": got.to_doc(),
                "rhs": expected.to_doc(),
            }
            return CheckReport("weight-one identity", False, checked, witness)
    return CheckReport("weight-one identity", True, checked)


def triangular_inverse(op: SMap, law: str = "triangular inverse") -> SMap:
    """Invert an operator of the form identity plus weight-lowering remainder.

    The recursion inv(w) = w - inv(op(w) - w) terminates because the
    remainder strictly drops weight; a remainder term at or above the input
    weight is reported as a validation failure with the witness monomial.
    """
    if not same_basis(op.source, op.target):
        raise ValidationError("triangular inversion needs an endo-operator")
    basis, cap = op.source, op.cap

    inverse_ref: list = []

    def fn(w: WedgeMonomial) -> SElement:
        remainder = op.on_monomial(w) - SElement.from_monomial(basis, cap, w)
        if remainder.max_weight() >= w.weight and not remainder.is_zero():
            raise ValidationError(
                f"{law}: operator is not triangular at {w.names(basis)}"
            )
        return SElement.from_monomial(basis, cap, w) - inverse_ref[0](remainder)

    inverse = SMap(basis, basis, cap, 0, fn, "inv")
    inverse_ref.append(inverse)
    return inverse
