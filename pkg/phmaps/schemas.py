"""Pydantic schemas for every JSON document phmaps reads or writes.

Rationals and big integers travel as decimal strings so that exact values
survive the round trip through JSON.
"""
from __future__ import annotations

from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from phmaps.construct import AdmissibilityReport, HarmonicCandidate
from phmaps.hurwitz import HurwitzFamily, TriplePlan
from phmaps.numeric import FDReport
from phmaps.pharmonic import ExponentProfile, PMap, gamma
from phmaps.polyalg import Component, MultiPoly
from phmaps.regularity import ObservationCheck


class RationalSchema(BaseModel):
    """Exact rational number ``num/den``."""
    num: str
    den: str = "1"

    @classmethod
    def from_fraction(cls, q) -> "RationalSchema":
        q = Fraction(q)
        return cls(num=str(q.numerator), den=str(q.denominator))

    def to_fraction(self) -> Fraction:
        return Fraction(int(self.num), int(self.den))


class TermSchema(BaseModel):
    exp: List[int]
    num: str
    den: str = "1"


class PolySchema(BaseModel):
    """Sparse polynomial; terms are listed in graded-lex order, highest first."""
    nvars: int = Field(..., ge=0)
    terms: List[TermSchema] = Field(default_factory=list)

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "PolySchema":
        return cls(nvars=p.nvars, terms=[
            TermSchema(exp=list(e), num=str(c.numerator), den=str(c.denominator))
            for e, c in p.sorted_terms()
        ])

    def to_poly(self) -> MultiPoly:
        return MultiPoly(self.nvars, {tuple(t.exp): Fraction(int(t.num), int(t.den)) for t in self.terms})


class ComponentSchema(PolySchema):
    """One coordinate ``scale * sqrt(radicand) * poly``."""
    scale: RationalSchema = Field(default_factory=lambda: RationalSchema(num="1"))
    radicand: str = "1"

    @classmethod
    def from_component(cls, c: Component) -> "ComponentSchema":
        poly = PolySchema.from_poly(c.poly)
        return cls(nvars=poly.nvars, terms=poly.terms,
                   scale=RationalSchema.from_fraction(c.scale), radicand=str(c.radicand))

    def to_component(self) -> Component:
        # kept as given so that a corrupted file is reported, not repaired
        return Component(self.scale.to_fraction(), int(self.radicand), self.to_poly())


class CandidateSchema(BaseModel):
    n: int
    N: int
    k: int
    provenance: str = "user"
    components: List[ComponentSchema]

    @classmethod
    def from_candidate(cls, h: HarmonicCandidate) -> "CandidateSchema":
        return cls(n=h.n, N=h.N, k=h.k, provenance=h.provenance,
                   components=[ComponentSchema.from_component(c) for c in h.components])

    def to_candidate(self) -> HarmonicCandidate:
        return HarmonicCandidate(self.n, self.N, self.k,
                                 tuple(c.to_component() for c in self.components), self.provenance)


SMOOTH_NOTE = "homogeneity exponent; if gamma - k is a non-negative even integer then u is C^inf"


class ProfileSchema(BaseModel):
    """Exponent profile; ``p`` is ``"inf"`` or an exact rational like ``"3/2"``."""
    n: int
    k: int
    p: str
    theta: float
    gamma: float
    gamma_exact: Optional[RationalSchema] = None
    tau: float
    a: float
    nu: float
    other_root: Optional[float] = None
    smooth: bool = False
    note: str = SMOOTH_NOTE

    @classmethod
    def from_profile(cls, pr: ExponentProfile) -> "ProfileSchema":
        return cls(
            n=pr.n, k=pr.k, p=pr.p_label, theta=pr.theta, gamma=pr.gamma,
            gamma_exact=None if pr.gamma_exact is None else RationalSchema.from_fraction(pr.gamma_exact),
            tau=pr.tau, a=pr.a, nu=pr.nu, other_root=pr.other_root, smooth=pr.smooth,
        )

    def to_profile(self) -> ExponentProfile:
        """Recompute the profile from ``(n, k, p)``; stored floats are informational."""
        return gamma(self.n, self.k, self.p)


class MapSchema(BaseModel):
    candidate: CandidateSchema
    profile: ProfileSchema

    @classmethod
    def from_map(cls, u: PMap) -> "MapSchema":
        return cls(candidate=CandidateSchema.from_candidate(u.candidate),
                   profile=ProfileSchema.from_profile(u.profile))


class HurwitzFamilySchema(BaseModel):
    r: int
    s: int
    t: int
    matrices: List[List[List[str]]]

    @classmethod
    def from_family(cls, F: HurwitzFamily) -> "HurwitzFamilySchema":
        return cls(r=F.r, s=F.s, t=F.t,
                   matrices=[[[str(v) for v in row] for row in a] for a in F.matrices])

    def to_family(self) -> HurwitzFamily:
        return HurwitzFamily.from_matrices(
            [np.array([[Fraction(v) for v in row] for row in a], dtype=object) for a in self.matrices]
        )


class PlanSchema(BaseModel):
    r: int
    s: int
    t: int
    rule: str
    args: List[int] = Field(default_factory=list)
    children: List["PlanSchema"] = Field(default_factory=list)

    @classmethod
    def from_plan(cls, plan: TriplePlan) -> "PlanSchema":
        return cls(r=plan.r, s=plan.s, t=plan.t, rule=plan.rule, args=list(plan.args),
                   children=[cls.from_plan(c) for c in plan.children])

    def to_plan(self) -> TriplePlan:
        return TriplePlan(self.r, self.s, self.t, self.rule, tuple(self.args),
                          tuple(c.to_plan() for c in self.children))


PlanSchema.model_rebuild()


class HurwitzPlanReport(BaseModel):
    r: int
    s: int
    t: int
    key: str
    plan: PlanSchema
    family: Optional[HurwitzFamilySchema] = None


class CheckSchema(BaseModel):
    """One named check; ``witness`` holds the defect polynomial of a failed exact check."""
    name: str
    passed: bool
    value: Optional[float] = None
    component: Optional[int] = None
    witness: Optional[PolySchema] = None


def admissibility_checks(report: AdmissibilityReport) -> List[CheckSchema]:
    flags = [("h1", report.h1_ok), ("h2", report.h2_ok), ("h3", report.h3_ok), ("h4", report.h4_ok),
             ("homogeneous", report.homogeneous_ok)]
    checks = []
    for name, ok in flags:
        w = report.witnesses.get(name)
        checks.append(CheckSchema(
            name=name, passed=ok,
            component=None if w is None else w["component"],
            witness=None if w is None else PolySchema.from_poly(w["poly"]),
        ))
    return checks


class FDPointSchema(BaseModel):
    x: List[float]
    residual: List[float]
    scaled: float
    relative: Optional[float] = None


class FDReportSchema(BaseModel):
    """Oracle summary; ``max_residual`` is over ``|residual| / (1 + |x|^residual_exponent)``
    for p-Laplace maps and over ``|residual|`` for infinity maps."""
    kind: str
    p: str
    tolerance: float
    passed: bool
    max_residual: float
    mean_residual: float
    per_point: List[FDPointSchema] = Field(default_factory=list)
    residual_exponent: Optional[float] = None
    max_relative: Optional[float] = None
    gradient_norm_mean: Optional[float] = None
    gradient_norm_variance: Optional[float] = None
    gradient_norm_expected: Optional[float] = None
    note: str = ""

    @classmethod
    def from_report(cls, r: FDReport) -> "FDReportSchema":
        return cls(
            kind=r.kind, p=r.p, tolerance=r.tolerance, passed=r.passed,
            max_residual=r.max_residual, mean_residual=r.mean_residual,
            per_point=[FDPointSchema(x=pt.x, residual=pt.residual, scaled=pt.scaled, relative=pt.relative)
                       for pt in r.per_point],
            residual_exponent=r.residual_exponent,
            max_relative=r.max_relative,
            gradient_norm_mean=r.gradient_norm_mean,
            gradient_norm_variance=r.gradient_norm_variance,
            gradient_norm_expected=r.gradient_norm_expected,
            note=r.note,
        )


class VerificationReportSchema(BaseModel):
    """Outcome of ``verify``: exact checks, symbolic residual and the FD oracle."""
    provenance: str
    n: int
    N: int
    k: int
    p: str
    passed: bool
    failures: List[str] = Field(default_factory=list)
    checks: List[CheckSchema] = Field(default_factory=list)
    profile: Optional[ProfileSchema] = None
    fd: Optional[FDReportSchema] = None


def _plain(value):
    """Detail values with string keys and builtin scalars, ready for JSON."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Fraction):
        return str(value)
    return value


class ObservationSchema(BaseModel):
    name: str
    passed: bool
    details: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_check(cls, check: ObservationCheck) -> "ObservationSchema":
        return cls(name=check.name, passed=check.passed, details=_plain(check.details))


class ObservationsReport(BaseModel):
    """Monotonicity and regularity observations over the exponent range."""
    n_values: List[int]
    points: int
    passed: bool
    failures: List[str] = Field(default_factory=list)
    checks: List[ObservationSchema] = Field(default_factory=list)


class RunManifestSchema(BaseModel):
    """Sidecar describing how an output file was produced."""
    command: str
    parameters: Dict[str, Any]
    tool_version: str
    seed: Optional[int] = None
    started_at: datetime
    finished_at: datetime
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)


REPORT_MODELS = {
    "map": MapSchema,
    "candidate": CandidateSchema,
    "profile": ProfileSchema,
    "hurwitz_plan": HurwitzPlanReport,
    "verification_report": VerificationReportSchema,
    "observations": ObservationsReport,
    "run_manifest": RunManifestSchema,
}
