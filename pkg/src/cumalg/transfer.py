"""Deformation retracts and the induced cumulant bijection on the retract.

Given a retract (i, I, s) of an algebra-with-differential onto a chain
complex, plus a square-zero coderivation on the complex side and a dg
coalgebra map extending i, the composite (extension of I)∘tau_tilde∘
(extension of iota) is again a cumulant-style bijection on the complex.
Every hypothesis and every certified property is checked exactly and
reported with witnesses; nothing is assumed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    AlgebraPresentation,
    AlgebraError,
    ChainComplex,
    LinearMap,
    SchemaError,
    ValidationError,
    parse_algebra,
    parse_chain_complex,
    parse_linear_map,
    same_basis,
)
from .coalgebra import SElement, monomials_up_to
from .linalg import rank
from .morphisms import (
    CheckReport,
    SMap,
    TaylorFamily,
    check_comorphism,
    check_coderivation,
    check_filtration_one_identity,
    extend_coalgebra_map,
    extend_coderivation,
    extract_family,
    triangular_inverse,
)
from .cumulant import conjugate, cumulant_context


class TransferError(AlgebraError):
    """Raised when the transfer pipeline is run on failed hypotheses."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class RetractData:
    """A deformation retract of an algebra-with-differential onto a complex."""

    algebra: AlgebraPresentation
    d: LinearMap
    complex: ChainComplex
    inclusion: LinearMap
    projection: LinearMap
    homotopy: LinearMap

    def __post_init__(self):
        A, C = self.algebra, self.complex
        shapes = [
            (self.d, A, A, -1, "d"),
            (self.inclusion, C, A, 0, "i"),
            (self.projection, A, C, 0, "I"),
            (self.homotopy, A, A, 1, "s"),
        ]
        for m, src, tgt, deg, name in shapes:
            if not same_basis(m.source, src) or not same_basis(m.target, tgt):
                raise ValidationError(f"map {name} has the wrong source or target")
            if m.degree != deg:
                raise ValidationError(f"map {name} must have degree {deg}")


@dataclass
class RetractReport:
    ok: bool
    checks: list

    def to_doc(self):
        return {"ok": self.ok, "checks": [c.to_doc() for c in self.checks]}


def _map_check(law: str, difference: LinearMap) -> CheckReport:
    witnesses = sorted(
        difference.source.names[i] for i in difference.columns
    )
    ok = not witnesses
    report = CheckReport(law, ok, len(difference.source))
    if not ok:
        report.witness = {"generators": witnesses}
    return report


def validate_retract(r: RetractData) -> RetractReport:
    """Check every retract identity exactly, listing failing generators."""
    A, C = r.algebra, r.complex
    d, d_C = r.d, r.complex.differential
    i, I, s = r.inclusion, r.projection, r.homotopy
    id_A, id_C = LinearMap.identity(A), LinearMap.identity(C)
    checks = [
        _map_check("projection after inclusion is the identity", I.compose(i) - id_C),
        _map_check("inclusion is a chain map", i.compose(d_C) - d.compose(i)),
        _map_check("projection is a chain map", d_C.compose(I) - I.compose(d)),
        _map_check(
            "homotopy identity",
            d.compose(s) + s.compose(d) - (i.compose(I) - id_A),
        ),
        _map_check("differential squares to zero", d.compose(d)),
        _map_check("complex differential squares to zero", d_C.compose(d_C)),
    ]
    return RetractReport(all(c.ok for c in checks), checks)


@dataclass
class TransferInput:
    retract: RetractData
    d_infinity: TaylorFamily
    iota: TaylorFamily

    def __post_init__(self):
        C, A = self.retract.complex, self.retract.algebra
        if not (same_basis(self.d_infinity.source, C) and same_basis(self.d_infinity.target, C)):
            raise ValidationError("d-infinity coefficients must live on the complex")
        if self.d_infinity.degree != -1:
            raise ValidationError("d-infinity must have degree -1")
        if not (same_basis(self.iota.source, C) and same_basis(self.iota.target, A)):
            raise ValidationError("iota coefficients must map the complex into the algebra")
        if self.iota.degree != 0:
            raise ValidationError("iota must have degree 0")


@dataclass
class TransferReport:
    ok: bool
    retract: RetractReport
    checks: list

    def to_doc(self):
        return {
            "ok": self.ok,
            "retract": self.retract.to_doc(),
            "checks": [c.to_doc() for c in self.checks],
        }


def _zero_smap(source, target, cap, degree) -> SMap:
    def fn(w, _t=target, _c=cap):
        return SElement.zero(_t, _c)

    return SMap(source, target, cap, degree, fn, "0")


def _difference_check(law: str, lhs: SMap, rhs: SMap) -> CheckReport:
    w = lhs.first_difference(rhs)
    total = sum(1 for _ in monomials_up_to(lhs.source, lhs.cap))
    if w is None:
        return CheckReport(law, True, total)
    witness = {
        "monomial": w.names(lhs.source),
        "lhs": lhs.on_monomial(w).to_doc(),
        "rhs": rhs.on_monomial(w).to_doc(),
    }
    return CheckReport(law, False, total, witness)


def _injectivity_check(op: SMap) -> CheckReport:
    """Exact rank test: the operator's matrix on the capped carrier has full
    column rank."""
    columns = list(monomials_up_to(op.source, op.cap))
    images = [op.on_monomial(w) for w in columns]
    row_keys = sorted({m for img in images for m in img.terms}, key=lambda m: m.sort_key())
    matrix = [
        [img.terms.get(key, Fraction(0)) for img in images] for key in row_keys
    ]
    got = rank(matrix)
    ok = got == len(columns)
    report = CheckReport("extension is injective up to the cap", ok, len(columns))
    if not ok:
        report.witness = {"rank": got, "dimension": len(columns)}
    return report


def transferred_differential(r: RetractData, cap: int) -> SMap:
    """Pull-conjugate of the bare extension of the algebra differential."""
    bare = extend_coderivation(TaylorFamily.from_linear_map(r.d), cap)
    return conjugate(bare, "pull")


def validate_transfer_input(t: TransferInput, cap: int) -> TransferReport:
    """Check the transfer hypotheses on the capped carrier, with witnesses."""
    retract_report = validate_retract(t.retract)
    C = t.retract.complex
    checks = []

    arity_one = t.iota.arity_one_map()
    diff = arity_one - t.retract.inclusion
    checks.append(_map_check("iota extends the inclusion", diff))

    d_inf = extend_coderivation(t.d_infinity, cap)
    checks.append(check_coderivation(d_inf))
    checks.append(
        _difference_check(
            "transferred coderivation squares to zero",
            d_inf.compose(d_inf),
            _zero_smap(C, C, cap, -2),
        )
    )

    iota_hat = extend_coalgebra_map(t.iota, cap)
    d_tilde = transferred_differential(t.retract, cap)
    checks.append(
        _difference_check(
            "iota extension intertwines the differentials",
            iota_hat.compose(d_inf),
            d_tilde.compose(iota_hat),
        )
    )
    checks.append(_injectivity_check(iota_hat))

    ok = retract_report.ok and all(c.ok for c in checks)
    return TransferReport(ok, retract_report, checks)


@dataclass
class TransferResult:
    cap: int
    tau_tilde_c: SMap
    inverse: SMap | None
    family: TaylorFamily
    hypotheses: TransferReport
    certifications: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.hypotheses.ok and all(c.ok for c in self.certifications)

    def to_doc(self):
        return {
            "weight_cap": self.cap,
            "ok": self.ok,
            "hypotheses": self.hypotheses.to_doc(),
            "certifications": [c.to_doc() for c in self.certifications],
            "tau_tilde_c": self.tau_tilde_c.to_doc(),
            "taylor_family": self.family.to_doc(),
        }


def induced_cumulant_bijection(t: TransferInput, cap: int) -> TransferResult:
    """Compose, certify, and return the cumulant bijection on the retract.

    Refuses to produce a result when the hypotheses fail; the raised error
    carries the full validation report.
    """
    hypotheses = validate_transfer_input(t, cap)
    if not hypotheses.ok:
        raise TransferError("transfer hypotheses failed", hypotheses)

    A, C = t.retract.algebra, t.retract.complex
    iota_hat = extend_coalgebra_map(t.iota, cap)
    proj_hat = extend_coalgebra_map(
        TaylorFamily.from_linear_map(t.retract.projection), cap
    )
    tau_tilde_a = cumulant_context(A, cap).tau_tilde
    tau_tilde_c = proj_hat.compose(tau_tilde_a).compose(iota_hat)

    certifications = [
        check_filtration_one_identity(tau_tilde_c),
        check_comorphism(tau_tilde_c),
    ]

    d_c_hat = extend_coderivation(
        TaylorFamily.from_linear_map(C.differential), cap
    )
    d_inf = extend_coderivation(t.d_infinity, cap)
    certifications.append(
        _difference_check(
            "intertwines the transferred coderivation with the complex differential",
            d_c_hat.compose(tau_tilde_c),
            tau_tilde_c.compose(d_inf),
        )
    )

    triangular, inverse = _triangular_and_invertible(tau_tilde_c)
    certifications.append(triangular)

    # certifications are reported, not re-raised: only bad hypotheses refuse
    return TransferResult(
        cap,
        tau_tilde_c,
        inverse,
        extract_family(tau_tilde_c, cap),
        hypotheses,
        certifications,
    )


def _triangular_and_invertible(op: SMap):
    checked = 0
    for w in monomials_up_to(op.source, op.cap):
        checked += 1
        diff = op.on_monomial(w) - SElement.from_monomial(op.source, op.cap, w)
        if not diff.is_zero() and diff.max_weight() >= w.weight:
            witness = {"monomial": w.names(op.source), "lhs": op.on_monomial(w).to_doc()}
            return CheckReport("triangular and invertible", False, checked, witness), None
    inverse = triangular_inverse(op, "induced cumulant bijection")
    ident = SMap.identity(op.source, op.cap)
    for composite in (inverse.compose(op), op.compose(inverse)):
        w = composite.first_difference(ident)
        if w is not None:
            witness = {
                "monomial": w.names(op.source),
                "lhs": composite.on_monomial(w).to_doc(),
            }
            return CheckReport("triangular and invertible", False, checked, witness), None
    return CheckReport("triangular and invertible", True, checked), inverse


def _expect_degree(m: LinearMap, degree: int, name: str) -> LinearMap:
    if m.degree != degree:
        raise SchemaError(f"map {name!r} must have degree {degree}")
    return m


def parse_retract(document) -> RetractData:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict):
        raise SchemaError("retract document must be an object")
    for key in ("algebra", "complex", "d", "i", "I", "s"):
        if key not in doc:
            raise SchemaError(f"retract document lacks {key!r}")
    A = parse_algebra(doc["algebra"])
    C = parse_chain_complex(doc["complex"])
    return RetractData(
        algebra=A,
        d=_expect_degree(parse_linear_map(doc["d"], A, A), -1, "d"),
        complex=C,
        inclusion=_expect_degree(parse_linear_map(doc["i"], C, A), 0, "i"),
        projection=_expect_degree(parse_linear_map(doc["I"], A, C), 0, "I"),
        homotopy=_expect_degree(parse_linear_map(doc["s"], A, A), 1, "s"),
    )


def parse_transfer_input(document) -> TransferInput:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict) or "retract" not in doc:
        raise SchemaError("transfer document lacks 'retract'")
    retract = parse_retract(doc["retract"])
    C, A = retract.complex, retract.algebra
    d_inf_doc = doc.get("d_infinity", {"degree": -1, "arities": {}})
    iota_doc = doc.get("iota")
    if iota_doc is None:
        raise SchemaError("transfer document lacks 'iota'")
    return TransferInput(
        retract=retract,
        d_infinity=TaylorFamily.from_doc(d_inf_doc, C, C),
        iota=TaylorFamily.from_doc(iota_doc, C, A),
    )
