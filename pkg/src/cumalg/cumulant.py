"""The cumulant bijection, its inverse, conjugation, and defect coefficients.

tau multiplies the factors of a wedge monomial; its coalgebra-map extension
tau_tilde rewrites moments into cumulant coordinates.  Conjugating a bare
operator extension by tau_tilde and corestricting yields, arity by arity,
exactly how far a linear map is from being a homomorphism (g tables) or a
derivation (h tables).
"""
from __future__ import annotations

from fractions import Fraction

from .algebra import (
    AlgebraPresentation,
    LinearMap,
    ValidationError,
    Vector,
    multiply,
    parity_sign,
)
from .coalgebra import (
    DEFAULT_WEIGHT_CAP,
    SElement,
    WedgeMonomial,
    canonical_monomials,
    iterated_coproduct,
    wedge,
)
from .morphisms import (
    SMap,
    TaylorFamily,
    extend_coalgebra_map,
    extend_coderivation,
    extract_family,
    taylor_coefficient,
    triangular_inverse,
)


def tau(algebra: AlgebraPresentation, w: WedgeMonomial) -> Vector:
    """Left-to-right product of the factors of a wedge monomial."""
    out = algebra.generator(w.indices[0])
    for i in w.indices[1:]:
        if out.is_zero():
            break
        out = algebra.multiply(out, algebra.generator(i))
    return out


def tau_family(algebra: AlgebraPresentation, max_arity: int) -> TaylorFamily:
    """Taylor coefficients of tau_tilde: the n-fold products, one table per arity."""
    tables: dict = {}
    for arity in range(1, max_arity + 1):
        table = {}
        for mono in canonical_monomials(algebra, arity):
            value = tau(algebra, mono)
            if not value.is_zero():
                table[mono] = value
        if table:
            tables[arity] = table
    return TaylorFamily(algebra, algebra, 0, tables)


class CumulantContext:
    """Shared, lazily built tau_tilde machinery for one algebra at one cap."""

    def __init__(self, algebra: AlgebraPresentation, cap: int = DEFAULT_WEIGHT_CAP):
        if not isinstance(algebra, AlgebraPresentation):
            raise ValidationError("cumulant machinery needs a product table")
        self.algebra = algebra
        self.cap = int(cap)
        self._tau_tilde: SMap | None = None
        self._inverse: SMap | None = None

    @property
    def tau_tilde(self) -> SMap:
        if self._tau_tilde is None:
            family = tau_family(self.algebra, self.cap)
            self._tau_tilde = extend_coalgebra_map(family, self.cap)
        return self._tau_tilde

    @property
    def tau_tilde_inverse(self) -> SMap:
        if self._inverse is None:
            self._inverse = triangular_inverse(self.tau_tilde, "cumulant bijection")
        return self._inverse

    def lift(self, v: SElement) -> SElement:
        return self.tau_tilde(v)

    def invert(self, v: SElement) -> SElement:
        return self.tau_tilde_inverse(v)


_contexts: dict = {}


def cumulant_context(algebra: AlgebraPresentation, cap: int = DEFAULT_WEIGHT_CAP) -> CumulantContext:
    """Context registry; one shared cache per (presentation, cap)."""
    key = (algebra.uid, int(cap))
    ctx = _contexts.get(key)
    if ctx is None:
        ctx = CumulantContext(algebra, cap)
        _contexts[key] = ctx
    return ctx


def tau_tilde(algebra: AlgebraPresentation, v: SElement) -> SElement:
    return cumulant_context(algebra, v.cap).lift(v)


def tau_tilde_inverse(algebra: AlgebraPresentation, v: SElement) -> SElement:
    return cumulant_context(algebra, v.cap).invert(v)


def tau_tilde_series(algebra: AlgebraPresentation, cap: int) -> SMap:
    """Independent route to tau_tilde: the exponential-style series.

    Sums, over k, the k-fold coproduct with tau applied to every block and
    the blocks wedged back together, divided by k! because ordered splits
    overcount each unordered partition once per block ordering.
    """
    ctx = cumulant_context(algebra, cap)

    def fn(w: WedgeMonomial) -> SElement:
        out = SElement.zero(algebra, cap)
        for k in range(1, w.weight + 1):
            scale = Fraction(1, _factorial(k))
            for coeff, parts in iterated_coproduct(w, k):
                piece = None
                for part in parts:
                    value = tau(algebra, part)
                    if value.is_zero():
                        piece = None
                        break
                    head = SElement.from_vector(value, cap)
                    piece = head if piece is None else wedge(piece, head)
                if piece is not None:
                    out = out + (scale * coeff) * piece
        return out

    return SMap(algebra, algebra, ctx.cap, 0, fn, "series")


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def mobius_inverse_family(algebra: AlgebraPresentation, max_arity: int) -> TaylorFamily:
    """Taylor coefficients of the inverse bijection in closed form.

    The arity-n coefficient is (-1)^(n-1) (n-1)! times the n-fold product;
    extending it as a coalgebra map gives a second, recursion-free route to
    the inverse.
    """
    tables: dict = {}
    for arity in range(1, max_arity + 1):
        scale = Fraction((-1) ** (arity - 1) * _factorial(arity - 1))
        table = {}
        for mono in canonical_monomials(algebra, arity):
            value = scale * tau(algebra, mono)
            if not value.is_zero():
                table[mono] = value
        if table:
            tables[arity] = table
    return TaylorFamily(algebra, algebra, 0, tables)


def conjugate(op: SMap, direction: str = "pull") -> SMap:
    """Conjugate an operator by the cumulant bijections of its two algebras.

    "pull" computes inverse∘op∘tau_tilde: the result's Taylor coefficients
    are the defect tables, and tau intertwines the bare operator with it.
    "push" is the other direction, tau_tilde∘op∘inverse.
    """
    source = cumulant_context(op.source, op.cap)
    target = cumulant_context(op.target, op.cap)
    if direction == "pull":
        return target.tau_tilde_inverse.compose(op).compose(source.tau_tilde)
    if direction == "push":
        return target.tau_tilde.compose(op).compose(source.tau_tilde_inverse)
    raise ValidationError(f"unknown conjugation direction {direction!r}")


def defect_operator(m: LinearMap, kind: str, cap: int = DEFAULT_WEIGHT_CAP) -> SMap:
    """Pull-conjugate of the bare extension of a linear map.

    kind "hom" extends the map as a coalgebra morphism (degree 0 required);
    kind "der" extends it as a coderivation (endomorphisms only).
    """
    family = TaylorFamily.from_linear_map(m)
    if kind == "hom":
        if m.degree != 0:
            raise ValidationError("homomorphism defects need a degree-zero map")
        bare = extend_coalgebra_map(family, cap)
    elif kind == "der":
        bare = extend_coderivation(family, cap)
    else:
        raise ValidationError(f"unknown defect kind {kind!r}")
    return conjugate(bare, "pull")


def defect_family(m: LinearMap, kind: str, cap: int = DEFAULT_WEIGHT_CAP,
                  max_arity: int | None = None) -> TaylorFamily:
    """All defect tables of a map up to an arity bound (default: the cap)."""
    op = defect_operator(m, kind, cap)
    return extract_family(op, cap if max_arity is None else max_arity)


def _defect_table(op: SMap, n: int) -> dict:
    out = {}
    for w in canonical_monomials(op.source, n):
        value = taylor_coefficient(op, w)
        if not value.is_zero():
            out[w] = value
    return out


def homomorphism_defect(f: LinearMap, n: int, cap: int = DEFAULT_WEIGHT_CAP) -> dict:
    """The arity-n table measuring failure of f to be an algebra map."""
    if n > cap:
        raise ValidationError(f"arity {n} exceeds the weight cap {cap}")
    return _defect_table(defect_operator(f, "hom", cap), n)


def derivation_defect(d: LinearMap, n: int, cap: int = DEFAULT_WEIGHT_CAP) -> dict:
    """The arity-n table measuring failure of d to be a derivation."""
    if n > cap:
        raise ValidationError(f"arity {n} exceeds the weight cap {cap}")
    return _defect_table(defect_operator(d, "der", cap), n)


def vanishes_above_one(family: TaylorFamily) -> bool:
    return all(arity == 1 for arity in family.tables)


def _deg(v: Vector) -> int:
    d = v.degree()
    if d is None and not v.is_zero():
        raise ValidationError("closed forms need homogeneous arguments")
    return 0 if d is None else d


def g2_closed_form(f: LinearMap, A: AlgebraPresentation, x: Vector, y: Vector) -> Vector:
    """f(xy) - f(x)f(y), the arity-2 homomorphism defect."""
    B = f.target
    return f.apply(multiply(A, x, y)) - multiply(B, f.apply(x), f.apply(y))


def g3_closed_form(f: LinearMap, A: AlgebraPresentation,
                   x: Vector, y: Vector, z: Vector) -> Vector:
    """The arity-3 homomorphism defect in closed form.

    f(xyz) - f(xy)f(z) - e1 f(xz)f(y) - e2 f(yz)f(x) + 2 f(x)f(y)f(z), with
    e1, e2 the Koszul signs of pulling z (resp. y and z) past y (resp. x).
    """
    B = f.target
    e1 = parity_sign(_deg(y), _deg(z))
    e2 = parity_sign(_deg(x), _deg(y) + _deg(z))

    def m(u, v, alg=B):
        return multiply(alg, u, v)

    xyz = multiply(A, multiply(A, x, y), z)
    return (
        f.apply(xyz)
        - m(f.apply(multiply(A, x, y)), f.apply(z))
        - e1 * m(f.apply(multiply(A, x, z)), f.apply(y))
        - e2 * m(f.apply(multiply(A, y, z)), f.apply(x))
        + 2 * m(m(f.apply(x), f.apply(y)), f.apply(z))
    )


def h2_closed_form(d: LinearMap, A: AlgebraPresentation, x: Vector, y: Vector) -> Vector:
    """d(xy) - d(x)y - (-1)^(|d||x|) x d(y), the arity-2 derivation defect."""
    sx = parity_sign(d.degree, _deg(x))
    return (
        d.apply(multiply(A, x, y))
        - multiply(A, d.apply(x), y)
        - sx * multiply(A, x, d.apply(y))
    )


def h3_closed_form(d: LinearMap, A: AlgebraPresentation,
                   x: Vector, y: Vector, z: Vector) -> Vector:
    """The arity-3 derivation defect in closed form (ten Koszul-signed terms)."""

    def m(u, v):
        return multiply(A, u, v)

    dx, dy, dz = d.apply(x), d.apply(y), d.apply(z)
    e1 = parity_sign(_deg(y), _deg(z))
    e2 = parity_sign(_deg(x), _deg(y) + _deg(z))
    sx = parity_sign(d.degree, _deg(x))
    sxy = parity_sign(d.degree, _deg(x) + _deg(y))
    sxz = parity_sign(d.degree, _deg(x) + _deg(z))
    syz = parity_sign(d.degree, _deg(y) + _deg(z))
    xyz = m(m(x, y), z)
    return (
        d.apply(xyz)
        - m(d.apply(m(x, y)), z) - sxy * m(m(x, y), dz)
        - e1 * (m(d.apply(m(x, z)), y) + sxz * m(m(x, z), dy))
        - e2 * (m(d.apply(m(y, z)), x) + syz * m(m(y, z), dx))
        + 2 * (m(m(dx, y), z) + sx * m(m(x, dy), z) + sxy * m(m(x, y), dz))
    )


def h3_seven_term_variant(d: LinearMap, A: AlgebraPresentation,
                          x: Vector, y: Vector, z: Vector) -> Vector:
    """A circulating seven-term candidate for the arity-3 derivation defect.

    Looks plausible but garbles one factor (y·x·d(x) where y·z·d(x) belongs),
    so it fails on genuine derivations; kept so reports can show exactly
    where it and the computed table part ways.
    """

    def m(u, v):
        return multiply(A, u, v)

    return (
        d.apply(m(m(x, y), z))
        - m(d.apply(m(x, y)), z)
        + m(m(x, y), d.apply(z))
        - m(d.apply(m(y, z)), x)
        + m(m(y, x), d.apply(x))
        - m(d.apply(m(z, x)), y)
        + m(m(z, x), d.apply(y))
    )
