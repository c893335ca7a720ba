"""Three-case classification of certified half-integral forms mod ell.

A nonzero certified form of weight lam + 1/2 with lam + 1/2 < ell^2/2,
supported on the square classes {1, ell}, falls into exactly one of
three shapes: a twisted unary theta series in class 1, a dilated eta in
class ell, or (only when ell = 1 mod 24) the sum of both.  classify()
records the hypotheses, builds the candidate congruence target from the
coefficients at indices 1 and ell, and verifies it to the certification
depth.  Everything that fails lands in "unclassified" with a witness,
never an exception, so boundary examples flow through with their data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .qseries import (
    QExp24,
    PrecisionError,
    eta_series,
    squarefree_part,
    support_square_classes,
    theta_op,
)
from .halfint import HalfIntForm, canonical_t1, canonical_t2
from .spaces import membership_depth

__all__ = [
    "CheckResult",
    "CaseReport",
    "check_two_classes",
    "check_multiplier",
    "odd_lambda_check",
    "small_lambda_check",
    "classify",
]


@dataclass(frozen=True)
class CheckResult:
    """Named verdict; witness is the first offending index when it fails."""

    name: str
    passed: bool
    witness: int | None = None

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "witness": self.witness}


def _series_of(f) -> QExp24:
    return f.series if isinstance(f, HalfIntForm) else f


def check_two_classes(f, ell: int | None = None):
    """Observed square classes and the verdict classes subset of {1, ell}.

    Returns (classes, CheckResult).  The scan covers the known prefix;
    for certified forms the certificate depth upgrades this to a
    statement about the whole expansion.
    """
    series = _series_of(f)
    if ell is None:
        ell = series.modulus
    classes = support_square_classes(series)
    bad = sorted(t for t in classes if t not in (1, ell))
    witness = None
    if bad:
        # report the first index lying in an extraneous class
        for n, _ in series.nonzero_items():
            if squarefree_part(n) in bad:
                witness = n
                break
    return classes, CheckResult("two_square_classes", not bad, witness)


def check_multiplier(r: int, ell: int) -> CheckResult:
    """Pass iff r = 1 or ell mod 24; the only classes a nonzero form allows."""
    ok = r % 24 in (1, ell % 24)
    return CheckResult("multiplier", ok, None if ok else r % 24)


def odd_lambda_check(f, lam: int | None = None) -> CheckResult:
    """Odd lam forces Theta(f) = 0; pass iff that holds to precision.

    Accepts a certified form or a raw series plus lam (so constructed
    counterexamples can be probed).  Even lam is a usage error.
    """
    series = _series_of(f)
    if lam is None:
        lam = f.lam
    if lam % 2 == 0:
        raise ValueError(f"odd_lambda_check needs odd lam, got {lam}")
    image = theta_op(series)
    if image.is_zero():
        return CheckResult("odd_lambda_theta_kill", True)
    return CheckResult("odd_lambda_theta_kill", False, image.valuation())


def small_lambda_check(g, lam: int | None = None, r: int | None = None):
    """Below lam = (ell-1)/2 the only nonzero survivors are multiples of eta.

    Pass iff lam = 0, r = 1 mod 24, and g equals c * eta for the scalar
    c read off index 1; returns (CheckResult, c).  lam at or above
    (ell-1)/2 is outside this check's range and is a usage error, as is
    the zero series.
    """
    series = _series_of(g)
    if lam is None:
        lam = g.lam
    if r is None:
        r = g.r
    ell = series.modulus
    if lam >= (ell - 1) // 2:
        raise ValueError(
            f"small_lambda_check applies below lam = (ell-1)/2 = "
            f"{(ell - 1) // 2}, got {lam}"
        )
    if series.is_zero():
        raise ValueError("small_lambda_check needs a nonzero series")
    name = "small_lambda_eta_multiple"
    if lam != 0:
        return CheckResult(name, False, None), None
    if r % 24 != 1:
        return CheckResult(name, False, None), None
    c = series.coeffs[1] if series.prec > 1 else 0
    target = eta_series(series.prec, ell).scale(c)
    bad = series.first_difference(target, series.prec)
    if bad is not None:
        return CheckResult(name, False, bad), None
    return CheckResult(name, True), c


@dataclass(frozen=True)
class CaseReport:
    """Outcome of classify() plus the evidence that produced it.

    case is one of "1", "2", "3", "zero", "unclassified"; depth is the
    index bound (1/24-units) to which the congruence target was compared.
    """

    case: str
    a1: int
    al: int
    r_mod_24: int
    lambda_mod: int
    hypothesis_ok: bool
    depth: int
    checks: tuple

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "a1": self.a1,
            "al": self.al,
            "r_mod_24": self.r_mod_24,
            "lambda_mod": self.lambda_mod,
            "hypothesis_ok": self.hypothesis_ok,
            "depth": self.depth,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def classify(form: HalfIntForm, ell: int | None = None) -> CaseReport:
    """Assign a certified form to one of the three cases, or explain why not.

    Reads a1 and al (indices 1 and ell), builds the candidate target
    a1 * T1(lam) + al * T2, and compares up to the certification depth
    24 * (floor(w/12) + 1) + r0.  The weight hypothesis lam + 1/2 <
    ell^2 / 2 is recorded as hypothesis_ok but does not overturn a
    passing congruence: explicit constructions at or past the boundary
    can still land in a case, and the boundary example fails on its own
    congruence.
    """
    if not isinstance(form, HalfIntForm):
        raise TypeError("classify takes a certified form; use certify() first")
    series = form.series
    if ell is None:
        ell = form.ell
    elif ell != form.ell:
        raise ValueError(f"ell={ell} does not match the form's modulus {form.ell}")
    lam, r = form.lam, form.r
    r0 = r % 24
    lam_mod = lam % (ell - 1)
    hypothesis_ok = 2 * lam + 1 < ell * ell
    w, depth = membership_depth(lam, r)
    if series.is_zero():
        depth = min(depth, series.prec)
    elif series.prec < depth:
        raise PrecisionError(
            f"classification at lam={lam}, r={r} compares to depth {depth}, "
            f"series has {series.prec}"
        )

    _classes, cls_check = check_two_classes(series, ell)
    mult_check = check_multiplier(r, ell)
    checks = [cls_check, mult_check]

    a1 = series.coeffs[1] if series.prec > 1 else 0
    al = series.coeffs[ell] if series.prec > ell else 0

    def report(case: str, congruence: CheckResult) -> CaseReport:
        return CaseReport(
            case, a1, al, r0, lam_mod, hypothesis_ok, depth,
            tuple(checks + [congruence]),
        )

    if series.is_zero():
        return report("zero", CheckResult("congruence", True))

    # shape of the case, from the two distinguished coefficients
    case = "unclassified"
    if cls_check.passed and mult_check.passed:
        if a1 and not al and r0 == 1 and lam % 2 == 0:
            case = "1"
        elif al and not a1 and r0 == ell % 24 and lam_mod == (ell - 1) // 2:
            case = "2"
        elif a1 and al and r0 == 1 and ell % 24 == 1 and lam_mod == (ell - 1) // 2:
            case = "3"

    target = QExp24.zero(depth, ell, series.residue)
    if a1:
        target = target + canonical_t1(lam, ell, depth).scale(a1)
    if al:
        target = target + canonical_t2(ell, depth).scale(al)
    bad = series.first_difference(target, depth)
    congruence = CheckResult("congruence", bad is None, bad)

    if case == "unclassified" or not congruence.passed:
        return report("unclassified", congruence)
    return report(case, congruence)
