"""Graded commutative algebras over Q, presented by exact structure constants.

Everything here is immutable after construction and all arithmetic is done
with `fractions.Fraction`, so identities can be asserted exactly.
"""
from __future__ import annotations

import itertools
import json
import re
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")

_basis_counter = itertools.count()


class AlgebraError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(AlgebraError):
    """An input document does not have the expected shape."""


class ValidationError(AlgebraError):
    """A presented structure violates one of its defining laws.

    `witness` holds machine-readable data naming the offending
    generators/entries, suitable for embedding in reports.
    """

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


def parse_scalar(text) -> Fraction:
    """Parse an exact rational written as "p" or "p/q" (q > 0)."""
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise SchemaError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_scalar(value: Fraction) -> str:
    return str(Fraction(value))


class GradedBasis:
    """An ordered, finite basis of named generators with integer degrees."""

    def __init__(self, generators):
        names = tuple(name for name, _ in generators)
        degrees = tuple(int(d) for _, d in generators)
        if len(set(names)) != len(names):
            raise SchemaError("duplicate generator names")
        self.names = names
        self.degrees = degrees
        self._index = {name: i for i, name in enumerate(names)}
        # used to key per-basis caches; bases compare by identity
        self.uid = next(_basis_counter)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown generator {name!r}") from None

    def generator(self, i: int) -> "Vector":
        return Vector(self, {i: Fraction(1)})

    def generators(self):
        return [self.generator(i) for i in range(len(self))]

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"<{type(self).__name__} {gens}>"


def same_basis(a: GradedBasis, b: GradedBasis) -> bool:
    return a is b


class Vector:
    """A sparse element of the span of a GradedBasis; coefficients in Q."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: GradedBasis, coeffs: dict | None = None):
        self.basis = basis
        clean = {}
        for i, c in (coeffs or {}).items():
            if not 0 <= i < len(basis):
                raise ValidationError(f"generator index {i} out of range")
            c = Fraction(c)
            if c != 0:
                clean[i] = c
        self.coeffs = clean

    @classmethod
    def zero(cls, basis):
        return cls(basis, {})

    def items(self):
        return sorted(self.coeffs.items())

    def get(self, i) -> Fraction:
        return self.coeffs.get(i, Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_homogeneous(self, degree: int | None = None) -> bool:
        """True when all terms share one degree (the given one, if stated)."""
        degs = {self.basis.degrees[i] for i in self.coeffs}
        if degree is None:
            return len(degs) <= 1
        return degs <= {degree}

    def degree(self):
        """Degree of a homogeneous vector; None for 0 or mixed terms."""
        degs = {self.basis.degrees[i] for i in self.coeffs}
        return degs.pop() if len(degs) == 1 else None

    def __add__(self, other: "Vector") -> "Vector":
        if not same_basis(self.basis, other.basis):
            raise ValidationError("vectors over different presentations")
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, Fraction(0)) + c
        return Vector(self.basis, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scale) -> "Vector":
        scale = Fraction(scale)
        return Vector(self.basis, {i: scale * c for i, c in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, Vector)
            and same_basis(self.basis, other.basis)
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.basis.uid, tuple(self.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*{self.basis.names[i]}" for i, c in self.items())

    def to_doc(self):
        return [
            {"gen": self.basis.names[i], "coeff": format_scalar(c)}
            for i, c in self.items()
        ]

    @classmethod
    def from_doc(cls, basis, doc):
        if not isinstance(doc, list):
            raise SchemaError("vector document must be a list")
        coeffs = {}
        for entry in doc:
            i = basis.index(entry["gen"])
            coeffs[i] = coeffs.get(i, Fraction(0)) + parse_scalar(entry["coeff"])
        return cls(basis, coeffs)


def parity_sign(p: int, q: int) -> int:
    """(-1)^(p*q), the sign for moving a degree-p element past degree q."""
    return -1 if (p % 2) and (q % 2) else 1


class AlgebraPresentation(GradedBasis):
    """A graded commutative associative algebra given by basis-pair products.

    The full product table is validated eagerly: degree homogeneity of every
    entry, graded commutativity on basis pairs, and associativity on all
    basis triples.  Later modules assume these laws hold.
    """

    def __init__(self, generators, products):
        super().__init__(generators)
        n = len(self)
        table = [[Vector.zero(self)] * n for _ in range(n)]
        for (i, j), value in products.items():
            if not (0 <= i < n and 0 <= j < n):
                raise SchemaError(f"product index pair ({i},{j}) out of range")
            table[i][j] = value if isinstance(value, Vector) else Vector(self, value)
        self.products = tuple(tuple(row) for row in table)
        self._validate()

    def _validate(self):
        n = len(self)
        for i in range(n):
            for j in range(n):
                entry = self.products[i][j]
                want = self.degrees[i] + self.degrees[j]
                if not entry.is_zero() and not all(
                    self.degrees[k] == want for k in entry.coeffs
                ):
                    raise ValidationError(
                        f"product {self.names[i]}*{self.names[j]} is not "
                        f"homogeneous of degree {want}",
                        witness={"kind": "homogeneity", "pair": [self.names[i], self.names[j]]},
                    )
        for i in range(n):
            for j in range(i, n):
                sign = parity_sign(self.degrees[i], self.degrees[j])
                if self.products[i][j] != sign * self.products[j][i]:
                    raise ValidationError(
                        f"graded commutativity fails on pair "
                        f"({self.names[i]}, {self.names[j]})",
                        witness={"kind": "commutativity", "pair": [self.names[i], self.names[j]]},
                    )
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    left = self.multiply(self.products[i][j], self.generator(k))
                    right = self.multiply(self.generator(i), self.products[j][k])
                    if left != right:
                        raise ValidationError(
                            f"associativity fails on triple "
                            f"({self.names[i]}, {self.names[j]}, {self.names[k]})",
                            witness={
                                "kind": "associativity",
                                "triple": [self.names[i], self.names[j], self.names[k]],
                            },
                        )

    def multiply(self, u: Vector, v: Vector) -> Vector:
        """Bilinear extension of the structure-constant table."""
        if not (same_basis(u.basis, self) and same_basis(v.basis, self)):
            raise ValidationError("operands do not belong to this presentation")
        out = Vector.zero(self)
        for i, cu in u.coeffs.items():
            for j, cv in v.coeffs.items():
                out = out + (cu * cv) * self.products[i][j]
        return out

    def to_doc(self):
        gens = [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)]
        prods = []
        for i in range(len(self)):
            for j in range(i, len(self)):
                if not self.products[i][j].is_zero():
                    prods.append(
                        {
                            "left": self.names[i],
                            "right": self.names[j],
                            "value": self.products[i][j].to_doc(),
                        }
                    )
        return {"generators": gens, "products": prods}


def multiply(algebra: AlgebraPresentation, u: Vector, v: Vector) -> Vector:
    return algebra.multiply(u, v)


def parse_algebra(document) -> AlgebraPresentation:
    """Build a validated presentation from a JSON document (text or dict).

    Products may state either orientation of a pair; the omitted one defaults
    to the graded-commutative reflection.  Stating both is allowed but they
    must agree (checked by the validator).
    """
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict):
        raise SchemaError("algebra document must be an object")
    try:
        gen_docs = doc["generators"]
    except KeyError:
        raise SchemaError("algebra document lacks 'generators'") from None
    if "modulus" in doc or "characteristic" in doc:
        raise SchemaError("only characteristic 0 (exact rationals) is supported")
    generators = []
    for g in gen_docs:
        if not isinstance(g, dict) or "name" not in g or "degree" not in g:
            raise SchemaError(f"bad generator entry: {g!r}")
        if not isinstance(g["degree"], int):
            raise SchemaError(f"generator degree must be an integer: {g!r}")
        generators.append((g["name"], g["degree"]))
    basis = GradedBasis(generators)

    stated = {}
    for p in doc.get("products", []):
        i = basis.index(p["left"])
        j = basis.index(p["right"])
        value = Vector.from_doc(basis, p.get("value", []))
        if (i, j) in stated:
            raise SchemaError(
                f"product ({p['left']},{p['right']}) stated more than once"
            )
        stated[(i, j)] = value

    products = {}
    for (i, j), value in stated.items():
        products[(i, j)] = value.coeffs
        if (j, i) not in stated:
            sign = parity_sign(basis.degrees[i], basis.degrees[j])
            products[(j, i)] = (sign * value).coeffs

    algebra = AlgebraPresentation(generators, products)
    return algebra


class LinearMap:
    """A degree-homogeneous linear map between two graded bases."""

    def __init__(self, source: GradedBasis, target: GradedBasis, degree: int, columns):
        self.source = source
        self.target = target
        self.degree = int(degree)
        cols = {}
        for i, v in columns.items():
            vec = v if isinstance(v, Vector) else Vector(target, v)
            if vec.is_zero():
                continue
            if not same_basis(vec.basis, target):
                raise ValidationError("column vector over wrong presentation")
            want = source.degrees[i] + self.degree
            if any(target.degrees[k] != want for k in vec.coeffs):
                raise ValidationError(
                    f"column for {source.names[i]} is not homogeneous of "
                    f"degree {want}",
                    witness={"kind": "map_homogeneity", "gen": source.names[i]},
                )
            cols[i] = vec
        self.columns = cols

    @classmethod
    def identity(cls, basis: GradedBasis) -> "LinearMap":
        return cls(basis, basis, 0, {i: basis.generator(i) for i in range(len(basis))})

    @classmethod
    def zero(cls, source, target, degree=0) -> "LinearMap":
        return cls(source, target, degree, {})

    def apply(self, v: Vector) -> Vector:
        if not same_basis(v.basis, self.source):
            raise ValidationError("vector is not over the map's source")
        out = Vector.zero(self.target)
        for i, c in v.coeffs.items():
            col = self.columns.get(i)
            if col is not None:
                out = out + c * col
        return out

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other."""
        if not same_basis(other.target, self.source):
            raise ValidationError("composition mismatch")
        cols = {i: self.apply(col) for i, col in other.columns.items()}
        return LinearMap(other.source, self.target, self.degree + other.degree, cols)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        if (
            not same_basis(self.source, other.source)
            or not same_basis(self.target, other.target)
            or self.degree != other.degree
        ):
            raise ValidationError("cannot add maps of different shapes")
        cols = dict(self.columns)
        for i, col in other.columns.items():
            cols[i] = cols.get(i, Vector.zero(self.target)) + col
        return LinearMap(self.source, self.target, self.degree, cols)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scale):
        return LinearMap(
            self.source,
            self.target,
            self.degree,
            {i: scale * col for i, col in self.columns.items()},
        )

    def __eq__(self, other):
        return (
            isinstance(other, LinearMap)
            and same_basis(self.source, other.source)
            and same_basis(self.target, other.target)
            and self.degree == other.degree
            and self.columns == other.columns
        )

    def __hash__(self):
        return hash((self.source.uid, self.target.uid, self.degree))

    def to_doc(self):
        return {
            "degree": self.degree,
            "entries": [
                {"gen": self.source.names[i], "value": col.to_doc()}
                for i, col in sorted(self.columns.items())
            ],
        }


def apply_linear(m: LinearMap, v: Vector) -> Vector:
    return m.apply(v)


def linear_bracket(m1: LinearMap, m2: LinearMap) -> LinearMap:
    """Graded commutator m1∘m2 - (-1)^(|m1||m2|) m2∘m1 of endomorphism maps."""
    sign = parity_sign(m1.degree, m2.degree)
    return m1.compose(m2) - sign * m2.compose(m1)


def parse_linear_map(document, source: GradedBasis, target: GradedBasis) -> LinearMap:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict) or "entries" not in doc:
        raise SchemaError("linear-map document lacks 'entries'")
    degree = doc.get("degree", 0)
    if not isinstance(degree, int):
        raise SchemaError("map degree must be an integer")
    columns = {}
    for entry in doc["entries"]:
        i = source.index(entry["gen"])
        if i in columns:
            raise SchemaError(f"duplicate map entry for {entry['gen']!r}")
        columns[i] = Vector.from_doc(target, entry.get("value", []))
    return LinearMap(source, target, degree, columns)


class ChainComplex(GradedBasis):
    """A finite graded basis with a degree -1 differential and no product.

    Used for the retract side of the transfer pipeline: keeping the product
    out of the type guarantees nothing downstream can multiply in it.
    """

    def __init__(self, generators, differential_columns=None):
        super().__init__(generators)
        self.differential = LinearMap(self, self, -1, differential_columns or {})
        _require_square_zero(self.differential)

    def to_doc(self):
        gens = [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)]
        return {"generators": gens, "differential": self.differential.to_doc()}


def parse_chain_complex(document) -> ChainComplex:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict) or "generators" not in doc:
        raise SchemaError("complex document lacks 'generators'")
    generators = [(g["name"], g["degree"]) for g in doc["generators"]]
    cx = ChainComplex(generators)
    ddoc = doc.get("differential")
    if ddoc is not None:
        diff = parse_linear_map(ddoc, cx, cx)
        if diff.degree != -1:
            raise SchemaError("complex differential must have degree -1")
        _require_square_zero(diff)
        cx.differential = diff
    return cx


def _require_square_zero(diff: LinearMap):
    square = diff.compose(diff)
    if square.columns:
        bad = sorted(diff.source.names[i] for i in square.columns)
        raise ValidationError(
            "differential does not square to zero",
            witness={"kind": "square_zero", "generators": bad},
        )
