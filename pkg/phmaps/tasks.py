"""Jobs behind the sub-commands, with logging and error handling.

Each job returns a schema object or CSV text; writing files is left to the
caller. Unexpected errors are logged with their traceback and re-raised.
"""
from __future__ import annotations

import math

from phmaps.config import settings
from phmaps.construct import HarmonicCandidate, build, n_table, table_csv, verify
from phmaps.hurwitz import best_t, replay
from phmaps.logger import get_logger
from phmaps.numeric import FDConfig, run_oracle
from phmaps.pharmonic import (
    PMap,
    as_exponent,
    assemble,
    gamma,
    is_infinite,
    proof_identity_holds,
    symbolic_residual,
)
from phmaps.regularity import check_A, check_B, emit_curves
from phmaps.schemas import (
    CandidateSchema,
    CheckSchema,
    FDReportSchema,
    HurwitzFamilySchema,
    HurwitzPlanReport,
    MapSchema,
    ObservationSchema,
    ObservationsReport,
    PlanSchema,
    ProfileSchema,
    VerificationReportSchema,
    admissibility_checks,
)

logger = get_logger(__name__)

# relative to the coefficient scale, see ExponentProfile.quadratic_tolerance
QUADRATIC_TOL = 1e-12


def _warn_desk_scale(h: HarmonicCandidate) -> None:
    if h.max_degree() > settings.WARN_MAX_DEGREE:
        logger.warning("Degree %s exceeds %s; exact checks may be slow", h.max_degree(), settings.WARN_MAX_DEGREE)
    if h.n > settings.WARN_MAX_VARS:
        logger.warning("%s variables exceed %s; exact checks may be slow", h.n, settings.WARN_MAX_VARS)


def construct_candidate(n: int, method: str, k: int = 2, budget: int | None = None) -> CandidateSchema:
    """Build and verify a candidate h for ``(n, method, k)``."""
    budget = settings.PLANNER_BUDGET if budget is None else budget
    logger.info("Constructing candidate n=%s method=%s k=%s", n, method, k)
    h = build(n, method, k=k, budget=budget)
    _warn_desk_scale(h)
    report = verify(h)
    if not report.passed:
        logger.error("Constructed candidate %s failed %s", h.provenance, report.failures())
    return CandidateSchema.from_candidate(h)


def generate_map(n: int, p, method: str, k: int = 2, budget: int | None = None) -> MapSchema:
    """Build h and pair it with the exponent profile for ``p`` (``inf`` allowed)."""
    budget = settings.PLANNER_BUDGET if budget is None else budget
    try:
        logger.info("Generating map n=%s p=%s method=%s k=%s", n, p, method, k)
        h = build(n, method, k=k, budget=budget)
        _warn_desk_scale(h)
        u = assemble(h, p)
        logger.info("Generated %s: N=%s gamma=%.17g", h.provenance, h.N, u.profile.gamma)
        return MapSchema.from_map(u)
    except Exception as exc:
        logger.exception("Failed to generate map n=%s p=%s method=%s: %s", n, p, method, exc)
        raise


def exponent_profile(n: int, k: int, p) -> ProfileSchema:
    return ProfileSchema.from_profile(gamma(n, k, p))


def verify_map(doc: MapSchema, p=None, cfg: FDConfig | None = None, fd: bool = True) -> VerificationReportSchema:
    """Exact admissibility checks, the symbolic residual and the FD oracle for one map file.

    Args:
        doc: Parsed map document.
        p: Exponent overriding the one stored in the document.
        cfg: Finite-difference settings; defaults come from the environment.
        fd: Run the numeric oracle as well.
    """
    p = as_exponent(doc.profile.p if p is None else p)
    h = doc.candidate.to_candidate()
    try:
        logger.info("Verifying %s (n=%s, N=%s, k=%s) at p=%s", h.provenance, h.n, h.N, h.k, p)
        report = verify(h)
        checks = admissibility_checks(report)
        failures = report.failures()
        profile_doc = None
        fd_doc = None

        if report.admissible:
            profile = gamma(h.n, h.k, p)
            profile_doc = ProfileSchema.from_profile(profile)
            if as_exponent(doc.profile.p) == p:
                stored_ok = math.isclose(doc.profile.gamma, profile.gamma, rel_tol=1e-12, abs_tol=1e-12)
                checks.append(CheckSchema(name="stored_gamma", passed=stored_ok, value=doc.profile.gamma))
                if not stored_ok:
                    failures.append("stored_gamma")

            if not is_infinite(p) and p > 1:
                u = PMap(h, profile)
                terms = symbolic_residual(u)
                quad = abs(profile.quadratic_residual())
                quad_ok = quad <= profile.quadratic_tolerance(QUADRATIC_TOL)
                checks.append(CheckSchema(name="quadratic_residual", passed=quad_ok, value=quad))
                checks.append(CheckSchema(name="proof_identity", passed=proof_identity_holds(),
                                          value=float(terms.total)))
                if not quad_ok:
                    failures.append("quadratic_residual")
                if not proof_identity_holds():
                    failures.append("proof_identity")

            if fd:
                oracle = run_oracle(PMap(h, profile), cfg)
                fd_doc = FDReportSchema.from_report(oracle)
                if not oracle.passed:
                    failures.append(f"fd_{oracle.kind}")
        else:
            logger.error("Candidate %s is not admissible; numeric checks skipped", h.provenance)

        passed = not failures
        return VerificationReportSchema(
            provenance=h.provenance, n=h.n, N=h.N, k=h.k,
            p="inf" if is_infinite(p) else str(p),
            passed=passed, failures=failures, checks=checks, profile=profile_doc, fd=fd_doc,
        )
    except Exception as exc:
        logger.exception("Verification of %s raised: %s", h.provenance, exc)
        raise


def hurwitz_plan(r: int, s: int, budget: int | None = None, with_family: bool = False) -> HurwitzPlanReport:
    """Best known ``[r, s, t]`` with its derivation; optionally the replayed matrices."""
    budget = settings.PLANNER_BUDGET if budget is None else budget
    t, plan = best_t(r, s, budget)
    logger.info("Hurwitz plan for [%s, %s]: t=%s via %s", r, s, t, plan.key)
    family = HurwitzFamilySchema.from_family(replay(plan)) if with_family else None
    return HurwitzPlanReport(r=r, s=s, t=t, key=plan.key, plan=PlanSchema.from_plan(plan), family=family)


def admissibility_table(max_n: int, budget: int | None = None) -> str:
    budget = settings.PLANNER_BUDGET if budget is None else budget
    try:
        logger.info("Building admissibility table up to n=%s", max_n)
        return table_csv(n_table(max_n, budget))
    except Exception as exc:
        logger.exception("Failed to build table up to n=%s: %s", max_n, exc)
        raise


def figure_curves(figure: str, grid: int) -> str:
    return emit_curves(figure, grid)


def observations(max_n: int = 12, points: int = 1000) -> ObservationsReport:
    """Run the k = 2 map observations (B1-B5) and the planar scalar ones (A1-A5)."""
    n_values = list(range(2, max_n + 1))
    try:
        logger.info("Checking observations for n in [2, %s] on %s theta points", max_n, points)
        results = {**check_B(n_values, points), **check_A(points)}
        checks = [ObservationSchema.from_check(results[name]) for name in sorted(results)]
        failures = [c.name for c in checks if not c.passed]
        return ObservationsReport(n_values=n_values, points=points, passed=not failures,
                                  failures=failures, checks=checks)
    except Exception as exc:
        logger.exception("Observation checks raised: %s", exc)
        raise
