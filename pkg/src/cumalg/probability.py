"""Classical cumulants from moments, as arity-wise defects of an expectation.

The moments of one variable define a linear "expectation" from a truncated
polynomial algebra to the ground field (a one-dimensional algebra); the
homomorphism-defect coefficients of that map, evaluated on powers of the
variable, are exactly the cumulants.  A textbook recursion with no coalgebra
machinery serves as the independent oracle.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import lru_cache

from .algebra import (
    AlgebraPresentation,
    LinearMap,
    SchemaError,
    ValidationError,
    parse_scalar,
)
from .coalgebra import WedgeMonomial
from .cumulant import defect_operator
from .morphisms import taylor_coefficient


def parse_moments(document) -> list:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict) or "moments" not in doc:
        raise SchemaError("moments document lacks 'moments'")
    moments = [parse_scalar(m) for m in doc["moments"]]
    if not moments:
        raise SchemaError("moments list is empty")
    return moments


@lru_cache(maxsize=None)
def truncated_polynomial_algebra(n: int) -> AlgebraPresentation:
    """Powers x^1..x^n of one even variable, products truncated past x^n."""
    if n < 1:
        raise ValidationError("need at least one power")
    generators = [(f"x{k}", 0) for k in range(1, n + 1)]
    products = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a + b <= n:
                products[(a - 1, b - 1)] = {a + b - 1: Fraction(1)}
    return AlgebraPresentation(generators, products)


@lru_cache(maxsize=None)
def ground_field_algebra() -> AlgebraPresentation:
    """The one-dimensional algebra spanned by an idempotent unit."""
    return AlgebraPresentation([("u", 0)], {(0, 0): {0: Fraction(1)}})


def expectation_map(moments) -> LinearMap:
    """x^k -> m_k * u, the moment functional as a linear map."""
    n = len(moments)
    source = truncated_polynomial_algebra(n)
    target = ground_field_algebra()
    columns = {
        k: {0: Fraction(moments[k])} for k in range(n) if moments[k] != 0
    }
    return LinearMap(source, target, 0, columns)


def cumulants_from_moments(moments, n: int | None = None) -> list:
    """First n cumulants, computed through the defect machinery.

    The j-th cumulant is the coefficient of the defect table at the j-fold
    wedge power of the variable.
    """
    moments = [Fraction(m) for m in moments]
    top = len(moments) if n is None else int(n)
    if not 1 <= top <= len(moments):
        raise ValidationError(f"order {top} out of range for {len(moments)} moments")
    f = expectation_map(moments)
    op = defect_operator(f, "hom", cap=len(moments))
    out = []
    for j in range(1, top + 1):
        mono = WedgeMonomial((0,) * j, (0,) * j)
        value = taylor_coefficient(op, mono)
        out.append(value.get(0))
    return out


def oracle_cumulants(moments, n: int | None = None) -> list:
    """The classical moment-cumulant recursion, free of coalgebra machinery."""
    moments = [Fraction(m) for m in moments]
    top = len(moments) if n is None else int(n)
    if not 1 <= top <= len(moments):
        raise ValidationError(f"order {top} out of range for {len(moments)} moments")
    kappa = []
    for j in range(1, top + 1):
        value = moments[j - 1]
        for k in range(1, j):
            value -= math.comb(j - 1, k - 1) * kappa[k - 1] * moments[j - k - 1]
        kappa.append(value)
    return kappa
