"""Half-integral weight machinery: certified lifts, descent, Hecke action.

A HalfIntForm couples a mod-ell series with the weight data (lam, r)
and a membership certificate in the realized space.  The operators
here never hand back an uncertified object: theta_lift and
u_ell_descent re-certify their outputs and raise CertificationError
when the expected space fails to contain the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .qseries import (
    QExp24,
    PrecisionError,
    kronecker,
    is_prime,
    squarefree_part,
    eta_series,
    theta_op,
    u_op,
)
from .spaces import (
    CertificationError,
    MembershipCertificate,
    NotMember,
    eta_membership,
    membership_depth,
)

__all__ = [
    "HalfIntForm",
    "certify",
    "theta_lift",
    "u_ell_descent",
    "HeckeSpec",
    "hecke_tp2",
    "hecke_eigenvalue_check",
    "shimura_coeffs",
    "canonical_t1",
    "canonical_t2",
    "eta_form",
]


@dataclass(frozen=True)
class HalfIntForm:
    """A certified weight lam + 1/2 form with multiplier exponent r.

    series carries coefficients in F_ell with residue r mod 24; the
    certificate places the series in the realized space at the depth
    prescribed by membership_depth.  Build these through certify().
    """

    series: QExp24
    lam: int
    r: int
    certificate: MembershipCertificate = field(repr=False)

    def __post_init__(self):
        if self.series.modulus is None:
            raise ValueError("a certified form needs prime-field coefficients")
        if self.lam < 0 or self.r < 1 or math.gcd(self.r, 6) != 1:
            raise ValueError(f"bad weight data lam={self.lam}, r={self.r}")
        if self.series.residue is not None and self.series.residue != self.r % 24:
            raise ValueError("series residue disagrees with r mod 24")

    @property
    def ell(self) -> int:
        return self.series.modulus

    @property
    def r0(self) -> int:
        return self.r % 24

    def is_zero(self) -> bool:
        return self.series.is_zero()


def _check_ell(series: QExp24, ell) -> int:
    got = series.modulus
    if got is None:
        raise ValueError("expected prime-field coefficients")
    if ell is not None and ell != got:
        raise ValueError(f"ell={ell} does not match series modulus {got}")
    return got


def certify(series: QExp24, lam: int, r: int, ell: int | None = None) -> HalfIntForm:
    """Certify series in the weight lam + 1/2 space with multiplier power r.

    Raises CertificationError when the series is provably outside the
    space (with the witness index), PrecisionError when the series is
    too short to reach the certification depth.
    """
    _check_ell(series, ell)
    result = eta_membership(series, lam, r)
    if isinstance(result, NotMember):
        raise CertificationError(
            f"series is not in the weight {lam}+1/2 space with multiplier "
            f"power {r}: first bad index {result.witness}"
        )
    if series.residue is None:
        series = series.with_residue(r % 24)
    return HalfIntForm(series, lam, r, result)


def theta_lift(form: HalfIntForm, ell: int | None = None) -> HalfIntForm:
    """Apply the theta operator and re-certify at weight lam + ell + 1 + 1/2.

    The lifted series keeps the multiplier power r.  Failure to certify
    is a CertificationError: the lift of a certified form must land in
    the predicted space.
    """
    ell = _check_ell(form.series, ell)
    return certify(theta_op(form.series), form.lam + ell + 1, form.r)


def u_ell_descent(form: HalfIntForm, ell: int | None = None) -> HalfIntForm:
    """Descend a form supported on indices divisible by ell through U_ell.

    Searches weights lam* = 0, 1, 2, ... for the first certificate on
    h = U_ell(series), with multiplier power r' = r*ell mod 24, while
    lam* + 1/2 <= (lam + 1/2)/ell.  The bound exhausting without a
    certificate is a CertificationError.  The zero form descends to the
    zero form at lam* = 0.
    """
    ell = _check_ell(form.series, ell)
    for n, _ in form.series.nonzero_items():
        if n % ell:
            raise ValueError(
                f"descent input must be supported on indices divisible by "
                f"{ell}; index {n} is not"
            )
    h = u_op(form.series, ell)
    r2 = form.r * ell % 24
    if h.is_zero():
        return certify(h, 0, r2)
    lam_star = 0
    while 2 * ell * lam_star + ell <= 2 * form.lam + 1:
        result = eta_membership(h, lam_star, r2)
        if isinstance(result, MembershipCertificate):
            if h.residue is None:
                h = h.with_residue(r2 % 24)
            return HalfIntForm(h, lam_star, r2, result)
        lam_star += 1
    raise CertificationError(
        f"no weight lam* with 2*{ell}*lam* + {ell} <= {2 * form.lam + 1} "
        f"certifies the descended series"
    )


# === Hecke action on 1/24-indexed expansions ===


@dataclass(frozen=True)
class HeckeSpec:
    """Parameters of T(p^2) on weight lam_int + 1/2 expansions.

    char12 switches the (12/p) factor on; eps_p is the sign knob of the
    eigenvalue statement and does not enter the operator itself.
    """

    p: int
    lam_int: int
    char12: bool = True
    eps_p: int = 1

    def __post_init__(self):
        if self.p in (2, 3) or not is_prime(self.p):
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.eps_p not in (1, -1):
            raise ValueError(f"eps_p must be +1 or -1, got {self.eps_p}")


def hecke_tp2(f: QExp24, spec: HeckeSpec) -> QExp24:
    """T(p^2) on a mod-ell series in 1/24-unit indexing.

    b(n) = a(p^2 n) + chi(p) * ((-1)^lam_int * n / p) * p^(lam_int-1) * a(n)
         + p^(2 lam_int - 1) * a(n / p^2)

    with chi(p) = (12/p) when char12 is set and a(n/p^2) = 0 unless p^2
    divides n.  Output precision is ceil(P / p^2); the residue class is
    preserved since p^2 = 1 mod 24.
    """
    ell = f.modulus
    if ell is None:
        raise ValueError("hecke_tp2 works over a prime field")
    if spec.p == ell:
        raise ValueError(f"p = ell = {ell} is outside the operator's domain")
    p, lam_int = spec.p, spec.lam_int
    p2 = p * p
    new_prec = -(-f.prec // p2)
    chi = kronecker(12, p) if spec.char12 else 1
    parity_sign = kronecker(-1, p) if lam_int % 2 else 1
    c1 = chi * parity_sign * pow(p, lam_int - 1, ell) % ell
    c2 = pow(p, 2 * lam_int - 1, ell)
    out = [0] * new_prec
    a = f.coeffs
    for n in range(new_prec):
        v = a[p2 * n] + c1 * kronecker(n, p) * a[n]
        if n % p2 == 0:
            v += c2 * a[n // p2]
        out[n] = v % ell
    return QExp24(out, new_prec, ell, f.residue)


def hecke_eigenvalue_check(g: HalfIntForm, p: int, eps_p: int = 1) -> bool:
    """Verify the T(p^2) eigenvalue congruence for a theta-lifted form.

    With lam_pre = g.lam - (ell+1) (required nonnegative and even; odd
    weights are outside this check's scope) and lam_bar = lam_pre mod
    (ell-1), the expected scalar is

        eps_p * (12/p) * (p^(lam_bar+2) + p^(lam_bar+1))  mod ell.

    Requires p >= 5, p != ell, p not congruent to 0 or 1 mod ell.
    Compares T(p^2) g to scalar * g at every index below the joint
    precision ceil(P/p^2).
    """
    ell = g.ell
    if p in (2, 3) or not is_prime(p):
        raise ValueError(f"p must be a prime >= 5, got {p}")
    if p % ell in (0, 1):
        raise ValueError(f"p = {p} is 0 or 1 mod ell = {ell}")
    lam_pre = g.lam - (ell + 1)
    if lam_pre < 0 or lam_pre % 2:
        raise ValueError(
            f"eigenvalue check needs lam - (ell+1) nonnegative and even, "
            f"got lam = {g.lam}, ell = {ell}"
        )
    lam_bar = lam_pre % (ell - 1)
    scalar = (
        eps_p
        * kronecker(12, p)
        * (pow(p, lam_bar + 2, ell) + pow(p, lam_bar + 1, ell))
    ) % ell
    lhs = hecke_tp2(g.series, HeckeSpec(p, g.lam, char12=True, eps_p=eps_p))
    rhs = g.series.scale(scalar)
    return lhs.agrees_with(rhs, lhs.prec)


def shimura_coeffs(f: QExp24, t: int, lam: int, n_max: int) -> list:
    """Coefficients A_t(1..n_max) of the Shimura-type divisor sum.

    A_t(n) = sum over d | n of (-1/d)^lam * (12t/d) * d^(lam-1) * a(t n^2 / d^2)

    computed mod ell.  t must be squarefree with gcd(t, 6) = 1; f must
    reach index t * n_max^2.
    """
    ell = f.modulus
    if ell is None:
        raise ValueError("shimura_coeffs works over a prime field")
    if t < 1 or math.gcd(t, 6) != 1 or squarefree_part(t) != t:
        raise ValueError(f"t must be squarefree and prime to 6, got {t}")
    if f.prec <= t * n_max * n_max:
        raise PrecisionError(
            f"need precision above {t * n_max * n_max}, have {f.prec}"
        )
    out = []
    for n in range(1, n_max + 1):
        total = 0
        for d in range(1, n + 1):
            if n % d:
                continue
            sign = kronecker(-1, d) if lam % 2 else 1
            total += (
                sign
                * kronecker(12 * t, d)
                * pow(d, lam - 1, ell)
                * f.coeffs[t * (n // d) ** 2]
            )
        out.append(total % ell)
    return out


def canonical_t1(lam: int, ell: int, prec: int) -> QExp24:
    """T1 = sum (12/n) n^lam q^(n^2/24) mod ell, residue class 1.

    The exponent is taken literally: lam = 0 keeps the terms at ell | n
    (T1(0) is eta mod ell), lam >= 1 kills them.
    """
    if prec < 2:
        raise PrecisionError("canonical series need precision >= 2")
    coeffs = [0] * prec
    n = 1
    while n * n < prec:
        coeffs[n * n] = kronecker(12, n) * pow(n, lam, ell) % ell
        n += 1
    return QExp24(coeffs, prec, ell, residue=1)


def canonical_t2(ell: int, prec: int) -> QExp24:
    """T2 = sum (12/n) q^(ell n^2 / 24) mod ell, residue class ell mod 24."""
    if prec < 2:
        raise PrecisionError("canonical series need precision >= 2")
    coeffs = [0] * prec
    n = 1
    while ell * n * n < prec:
        coeffs[ell * n * n] = kronecker(12, n) % ell
        n += 1
    return QExp24(coeffs, prec, ell, residue=ell % 24)


def eta_form(prec: int, ell: int) -> HalfIntForm:
    """Eta itself, certified at lam = 0, r = 1.  Convenience constructor."""
    return certify(eta_series(prec, ell), 0, 1)
