"""Tests for certified half-integral forms, Hecke action, canonical series."""

import random

import pytest
from sympy import divisor_sigma

from etakit.qseries import (
    PrecisionError,
    QExp24,
    eta_series,
    kronecker,
    theta_op,
    v_op,
)
from etakit.spaces import (
    CertificationError,
    eisenstein_e4,
    membership_depth,
)
from etakit.halfint import (
    HalfIntForm,
    HeckeSpec,
    canonical_t1,
    canonical_t2,
    certify,
    eta_form,
    hecke_eigenvalue_check,
    hecke_tp2,
    shimura_coeffs,
    theta_lift,
    u_ell_descent,
)

from oracles import shimura_sum_oracle


# === certify and the form wrapper ===


def test_eta_form_basic():
    g = eta_form(60, 5)
    assert g.lam == 0 and g.r == 1 and g.r0 == 1
    assert g.ell == 5
    assert g.series == eta_series(60, 5)
    assert g.certificate.coordinates == (1,)
    assert g.certificate.depth == 25
    assert not g.is_zero()


def test_certify_eta_power():
    ell = 11
    w, depth = membership_depth(3, 7)
    f = (eta_series(depth + 24, ell) ** 7).truncate(depth)
    g = certify(f, 3, 7)
    assert g.lam == 3 and g.r == 7
    assert g.series.residue == 7


def test_certify_rejects_wrong_space():
    ell = 5
    f = (eta_series(120, ell) ** 5).truncate(60)
    with pytest.raises(CertificationError):
        certify(f, 2, 1)


def test_certify_precision_gate():
    with pytest.raises(PrecisionError):
        certify(eta_series(20, 5), 0, 1)  # depth 25


def test_certify_ell_crosscheck():
    with pytest.raises(ValueError):
        certify(eta_series(60, 5), 0, 1, ell=7)
    with pytest.raises(ValueError):
        certify(eta_series(60), 0, 1)  # integer ring


def test_form_validation():
    g = eta_form(60, 5)
    with pytest.raises(ValueError):
        HalfIntForm(eta_series(60), 0, 1, g.certificate)
    with pytest.raises(ValueError):
        HalfIntForm(g.series, -1, 1, g.certificate)
    with pytest.raises(ValueError):
        HalfIntForm(g.series, 0, 3, g.certificate)  # gcd(3, 6) > 1
    with pytest.raises(ValueError):
        HalfIntForm(g.series, 0, 5, g.certificate)  # residue 1 != 5 mod 24


def test_certify_zero_form():
    z = QExp24.zero(40, modulus=5, residue=5)
    g = certify(z, 0, 5)
    assert g.is_zero()
    assert g.certificate.coordinates == ()


# === theta lift ===


def test_theta_lift_eta():
    ell = 5
    g = eta_form(24 * 10, ell)
    h = theta_lift(g)
    assert h.lam == ell + 1
    assert h.r == 1
    # leading coefficient is 1/24 = 4 mod 5
    assert h.series.coeff(1) == 4
    # support stays on the square indices of the unit class
    for n, _ in h.series.nonzero_items():
        assert n % 24 == 1


def test_theta_lift_formula():
    ell = 7
    g = eta_form(24 * 12, ell)
    h = theta_lift(g)
    inv24 = pow(24, -1, ell)
    for n, c in g.series.nonzero_items():
        assert h.series.coeff(n) == c * n * inv24 % ell


def test_theta_lift_iterates():
    ell = 5
    g = eta_form(24 * 14, ell)
    h = theta_lift(theta_lift(g))
    assert h.lam == 2 * (ell + 1)
    assert h.series == theta_op(theta_op(g.series))


def test_inv24_table():
    # frozen leading coefficients of the first lift
    for ell, inv in ((5, 4), (7, 5), (11, 6), (13, 6)):
        assert pow(24, -1, ell) == inv
        g = theta_lift(eta_form(24 * 10, ell))
        assert g.series.coeff(1) == inv


# === U_ell descent ===


def test_descent_of_eta_prime_power():
    for ell in (5, 7, 11):
        prec = 24 * ell * 2 + ell
        f = (eta_series(prec + 24 * ell, ell) ** ell).truncate(prec)
        g = certify(f, (ell - 1) // 2, ell)
        d = u_ell_descent(g)
        assert d.lam == 0
        assert d.r == 1
        assert d.series == eta_series(d.series.prec, ell)


def test_descent_requires_divisible_support():
    g = eta_form(60, 5)
    with pytest.raises(ValueError):
        u_ell_descent(g)


def test_descent_zero_form():
    z = QExp24.zero(24 * 6 * 5, modulus=5, residue=5)
    g = certify(z, 2, 5)
    d = u_ell_descent(g)
    assert d.is_zero()
    assert d.lam == 0
    assert d.r == 1


def test_descent_skips_empty_weights():
    # eta^35 = V_5(eta^7) mod 5 descends to eta^7; weights 0..2 give empty
    # spaces for multiplier power 11, so the search must land on lam* = 3
    ell = 5
    lam, r = 17, 35
    w, depth = membership_depth(lam, r)
    # keep enough length that the descended series still reaches the
    # lam* = 3 certification depth of 31
    prec = max(depth, 24 * 7 + 11)
    f = v_op((eta_series(24 * 40, ell) ** 7).truncate(36), ell).truncate(prec)
    g = certify(f, lam, r)
    d = u_ell_descent(g)
    assert d.lam == 3
    assert d.r == 35 * 5 % 24 == 7
    assert d.series == (eta_series(24 * 10, ell) ** 7).truncate(d.series.prec)


# === Hecke operator ===


def _tp2_reference(f, p, lam_int, ell):
    """Slow direct reimplementation used only as a cross-check."""
    out = []
    for n in range(-(-f.prec // (p * p))):
        v = f.coeff(p * p * n)
        v += (
            kronecker(12, p)
            * kronecker((-1) ** lam_int, p)
            * kronecker(n, p)
            * pow(p, lam_int - 1, ell)
            * f.coeff(n)
        )
        if n % (p * p) == 0:
            v += pow(p, 2 * lam_int - 1, ell) * f.coeff(n // (p * p))
        out.append(v % ell)
    return out


def test_hecke_matches_reference():
    rng = random.Random(907)
    for ell, p in ((5, 7), (7, 5), (11, 7)):
        prec = 24 * 30
        terms = {}
        for _ in range(40):
            n = rng.randrange(prec)
            terms[n - n % 24 + 1] = rng.randrange(1, ell)
        f = QExp24.from_dict(terms, prec=prec, modulus=ell)
        for lam_int in (2, 6, 7):
            got = hecke_tp2(f, HeckeSpec(p, lam_int))
            want = _tp2_reference(f, p, lam_int, ell)
            assert list(got.coeffs) == want, (ell, p, lam_int)


def test_hecke_prec_and_residue():
    ell = 5
    f = eta_series(24 * 50, ell)
    g = hecke_tp2(f, HeckeSpec(7, 6))
    assert g.prec == -(-f.prec // 49)
    assert g.residue == 1


def test_hecke_linearity():
    ell = 7
    prec = 24 * 30
    spec = HeckeSpec(5, 8)
    f = eta_series(prec, ell)
    g = (eta_series(prec + 24 * 24, ell) ** 25).truncate(prec)
    lhs = hecke_tp2(f + g, spec)
    rhs = hecke_tp2(f, spec) + hecke_tp2(g, spec)
    assert lhs == rhs


def test_hecke_validation():
    with pytest.raises(ValueError):
        HeckeSpec(3, 2)
    with pytest.raises(ValueError):
        HeckeSpec(9, 2)
    with pytest.raises(ValueError):
        HeckeSpec(7, 2, eps_p=0)
    f = eta_series(100, 5)
    with pytest.raises(ValueError):
        hecke_tp2(f, HeckeSpec(5, 2))  # p = ell
    with pytest.raises(ValueError):
        hecke_tp2(eta_series(100), HeckeSpec(7, 2))


def test_char12_toggle():
    ell = 11
    f = eta_series(24 * 30, ell)
    p = 5
    with_char = hecke_tp2(f, HeckeSpec(p, 6))
    without = hecke_tp2(f, HeckeSpec(p, 6, char12=False))
    assert with_char != without  # (12/5) = -1 flips the middle term
    # the pure a(p^2 n) and a(n/p^2) parts are unaffected: difference is
    # supported where (n/p) is nonzero
    diff = with_char - without
    for n, _ in diff.nonzero_items():
        assert n % p != 0


# === eigenvalue statement ===


def test_eigenvalue_for_lifted_eta():
    ell = 5
    g = theta_lift(eta_form(24 * 120, ell))
    for p in (7, 13, 17):
        assert hecke_eigenvalue_check(g, p), p


def test_eigenvalue_for_double_lift():
    # lam_pre = 6 stays even, lam_bar = 6 mod 4 = 2
    ell = 5
    g = theta_lift(theta_lift(eta_form(24 * 130, ell)))
    assert hecke_eigenvalue_check(g, 7)


def test_eigenvalue_scalar_value():
    # frozen: ell = 5, p = 7, lam_bar = 0 gives (12/7)(49 + 7) = -56 = 4 mod 5
    ell = 5
    g = theta_lift(eta_form(24 * 120, ell))
    lhs = hecke_tp2(g.series, HeckeSpec(7, g.lam))
    assert lhs.agrees_with(g.series.scale(4), lhs.prec)
    assert not lhs.agrees_with(g.series.scale(3), lhs.prec)


def test_eigenvalue_validation():
    ell = 5
    g = theta_lift(eta_form(24 * 60, ell))
    with pytest.raises(ValueError):
        hecke_eigenvalue_check(g, 11)  # 11 = 1 mod 5
    with pytest.raises(ValueError):
        hecke_eigenvalue_check(g, 4)
    with pytest.raises(ValueError):
        hecke_eigenvalue_check(eta_form(24 * 60, ell), 7)  # lam_pre < 0
    # odd lam - (ell+1): certified nonzero form at lam = 7 with r = 7
    w, depth = membership_depth(7, 7)
    f = (eta_series(depth + 24 * 8, ell) ** 7) * eisenstein_e4(depth + 24).reduce_mod(ell)
    h = certify(f.truncate(depth), 7, 7)
    with pytest.raises(ValueError):
        hecke_eigenvalue_check(h, 7)


# === divisor-sum coefficients ===


def test_shimura_matches_oracle():
    ell = 5
    g = theta_lift(eta_form(24 * 80, ell))
    for t in (1, 5, 7):
        n_max = 12 if t == 1 else 8
        got = shimura_coeffs(g.series, t, g.lam, n_max)
        want = [
            shimura_sum_oracle(g.series.coeffs, t, g.lam, n, ell)
            for n in range(1, n_max + 1)
        ]
        assert got == want, t


def test_shimura_closed_form_for_lifted_eta():
    # for the j-fold lift of eta, away from ell the t=1 coefficients
    # collapse to a(1) (12/n) n^(2j-1) sigma_1(n)
    ell = 7
    j = 1
    g = theta_lift(eta_form(24 * 90, ell))
    a1 = g.series.coeff(1)
    vals = shimura_coeffs(g.series, 1, g.lam, 13)
    for n in range(1, 14):
        if n % ell == 0:
            continue
        want = a1 * kronecker(12, n) * pow(n, 2 * j - 1, ell) * divisor_sigma(n, 1) % ell
        assert vals[n - 1] == want, n


def test_shimura_validation():
    ell = 5
    f = eta_series(24 * 40, ell)
    for bad_t in (0, -1, 2, 9, 25, 50):
        with pytest.raises(ValueError):
            shimura_coeffs(f, bad_t, 1, 3)
    with pytest.raises(PrecisionError):
        shimura_coeffs(f, 1, 1, 31)  # needs prec > 961
    shimura_coeffs(f, 1, 1, 30)  # 900 < 960: just inside the window
    with pytest.raises(ValueError):
        shimura_coeffs(eta_series(100), 1, 1, 2)


# === canonical comparison series ===


def test_t1_at_zero_is_eta():
    for ell in (5, 11):
        assert canonical_t1(0, ell, 24 * 20) == eta_series(24 * 20, ell)


def test_t1_positive_lambda_kills_ell_part():
    ell = 5
    f = canonical_t1(4, ell, 24 * 40)
    assert f.coeff(25) == 0  # n = 5 term: 5^4 = 0 mod 5
    assert f.coeff(1) == 1
    assert f.coeff(49) == kronecker(12, 7) * pow(7, 4, ell) % ell
    # lam = 0 keeps the n = 5 term alive
    assert canonical_t1(0, ell, 26).coeff(25) == kronecker(12, 5) % ell


def test_t1_periodic_in_lambda():
    # n^lam mod ell only sees lam mod (ell-1) once lam >= 1
    ell = 7
    assert canonical_t1(2, ell, 24 * 30) == canonical_t1(2 + (ell - 1), ell, 24 * 30)
    assert canonical_t1(0, ell, 24 * 30) != canonical_t1(ell - 1, ell, 24 * 30)


def test_t2_is_eta_to_the_ell():
    for ell in (5, 7):
        prec = 24 * ell * 3
        t2 = canonical_t2(ell, prec)
        assert t2.residue == ell % 24
        e = (eta_series(prec + 24 * ell, ell) ** ell).truncate(prec)
        assert t2 == e


def test_canonical_prec_floor():
    with pytest.raises(PrecisionError):
        canonical_t1(0, 5, 1)
    with pytest.raises(PrecisionError):
        canonical_t2(5, 1)
