"""Tests for the three-case classifier and its component checks."""

import json

import pytest

from etakit.qseries import PrecisionError, QExp24, eta_series, v_op
from etakit.spaces import eisenstein_e4, membership_depth
from etakit.halfint import HalfIntForm, certify, eta_form, theta_lift
from etakit.classify import (
    CaseReport,
    CheckResult,
    check_multiplier,
    check_two_classes,
    classify,
    odd_lambda_check,
    small_lambda_check,
)


# === component checks ===


def test_check_result_shape():
    ok = CheckResult("congruence", True)
    assert bool(ok)
    assert ok.to_dict() == {"name": "congruence", "pass": True, "witness": None}
    bad = CheckResult("congruence", False, 25)
    assert not bad
    assert bad.to_dict()["witness"] == 25


def test_two_classes_on_eta():
    ell = 5
    classes, res = check_two_classes(eta_series(24 * 10, ell))
    assert set(classes) == {1}
    assert res.passed and res.witness is None


def test_two_classes_on_eta_ell_power():
    ell = 5
    f = (eta_series(24 * 30, ell) ** ell).truncate(24 * 20)
    classes, res = check_two_classes(f)
    assert set(classes) == {ell}
    assert res.passed


def test_two_classes_rejects_stray_class():
    ell = 5
    f = QExp24.from_dict({1: 1, 2: 3, 50: 1}, prec=60, modulus=ell)
    classes, res = check_two_classes(f)
    assert set(classes) == {1, 2}
    assert not res.passed
    assert res.witness == 2


def test_two_classes_accepts_certified_form():
    g = eta_form(60, 7)
    classes, res = check_two_classes(g)
    assert res.passed and set(classes) == {1}


def test_multiplier_check():
    assert check_multiplier(1, 5).passed
    assert check_multiplier(5, 5).passed
    assert check_multiplier(25, 5).passed  # 25 = 1 mod 24
    assert check_multiplier(29, 5).passed  # 29 = 5 mod 24
    res = check_multiplier(7, 5)
    assert not res.passed and res.witness == 7
    assert check_multiplier(7, 7).passed
    assert not check_multiplier(11, 7).passed


def test_odd_lambda_check():
    ell = 5
    # support on multiples of ell is exactly what theta kills
    f = v_op(eta_series(60, ell), ell)
    res = odd_lambda_check(f, lam=3)
    assert res.passed
    g = eta_series(60, ell)
    res = odd_lambda_check(g, lam=1)
    assert not res.passed
    assert res.witness == 1  # theta(eta) starts at index 1
    with pytest.raises(ValueError):
        odd_lambda_check(g, lam=2)


def test_small_lambda_check_eta_multiple():
    ell = 7
    g = certify(eta_series(60, ell).scale(3), 0, 1)
    res, c = small_lambda_check(g)
    assert res.passed and c == 3


def test_small_lambda_check_failures():
    ell = 7
    f = eta_series(60, ell)
    res, c = small_lambda_check(f, lam=1, r=1)
    assert not res.passed and c is None
    res, c = small_lambda_check((f ** 5).truncate(60), lam=0, r=5)
    assert not res.passed and c is None
    # not a scalar multiple: differs from 1 * eta at index 49
    g = f + QExp24.from_dict({49: 1}, prec=60, modulus=ell, residue=1)
    res, c = small_lambda_check(g, lam=0, r=1)
    assert not res.passed and res.witness == 49 and c is None
    with pytest.raises(ValueError):
        small_lambda_check(f, lam=3, r=1)  # at (ell-1)/2, out of range
    with pytest.raises(ValueError):
        small_lambda_check(QExp24.zero(30, modulus=ell), lam=0, r=1)


# === report serialization ===


def test_case_report_dict_shape():
    g = theta_lift(eta_form(24 * 10, 5))
    rep = classify(g)
    d = rep.to_dict()
    assert list(d) == ["case", "a1", "al", "r_mod_24", "lambda_mod",
                       "hypothesis_ok", "depth", "checks"]
    assert [c["name"] for c in d["checks"]] == [
        "two_square_classes", "multiplier", "congruence"]
    parsed = json.loads(rep.to_json())
    assert parsed == d


# === classify: the three cases and the fallout bucket ===


def test_classify_case_one():
    ell = 5
    g = theta_lift(eta_form(24 * 10, ell))
    rep = classify(g)
    assert rep.case == "1"
    assert rep.a1 == 4  # 1/24 mod 5
    assert rep.al == 0
    assert rep.r_mod_24 == 1
    assert rep.lambda_mod == (ell + 1) % (ell - 1)
    assert rep.hypothesis_ok
    assert rep.depth == 25
    assert all(c.passed for c in rep.checks)


def test_classify_case_one_iterated():
    # second lift crosses the weight hypothesis boundary at ell = 5 but
    # the congruence still pins the case
    ell = 5
    g = theta_lift(theta_lift(eta_form(24 * 12, ell)))
    rep = classify(g)
    assert rep.case == "1"
    assert rep.a1 == 1  # 24^-2 mod 5
    assert rep.lambda_mod == 0
    assert not rep.hypothesis_ok


def test_classify_case_two():
    for ell in (5, 7, 11):
        w, depth = membership_depth((ell - 1) // 2, ell)
        f = (eta_series(depth + 24 * ell, ell) ** ell).truncate(depth)
        g = certify(f, (ell - 1) // 2, ell)
        rep = classify(g)
        assert rep.case == "2", ell
        assert rep.a1 == 0
        assert rep.al == 1
        assert rep.r_mod_24 == ell % 24
        assert rep.lambda_mod == (ell - 1) // 2
        assert rep.hypothesis_ok


def test_classify_zero():
    ell = 5
    g = certify(QExp24.zero(60, modulus=ell, residue=1), 0, 1)
    rep = classify(g)
    assert rep.case == "zero"
    assert rep.a1 == 0 and rep.al == 0
    assert rep.checks[-1].passed


def test_classify_boundary_power_unclassified():
    # eta^(ell^2) at ell = 5: both distinguished coefficients vanish but
    # the series does not, so the congruence fails with witness 25
    ell = 5
    lam, r = 12, 25
    w, depth = membership_depth(lam, r)
    f = (eta_series(depth + 24 * 25, ell) ** 25).truncate(depth)
    g = certify(f, lam, r)
    rep = classify(g)
    assert rep.case == "unclassified"
    assert rep.a1 == 0 and rep.al == 0
    assert not rep.hypothesis_ok  # 2*12 + 1 = 25 = ell^2 exactly
    congruence = rep.checks[-1]
    assert not congruence.passed
    assert congruence.witness == 25


def test_classify_multiplier_failure():
    # eta^7 * E4 mod 5 is certified at r = 7, outside {1, ell mod 24}
    ell = 5
    w, depth = membership_depth(7, 7)
    f = (eta_series(depth + 24 * 8, ell) ** 7) * eisenstein_e4(depth + 24).reduce_mod(ell)
    g = certify(f.truncate(depth), 7, 7)
    rep = classify(g)
    assert rep.case == "unclassified"
    assert not rep.checks[1].passed  # multiplier
    assert rep.checks[1].witness == 7


def test_classify_validation():
    ell = 5
    with pytest.raises(TypeError):
        classify(eta_series(60, ell))
    g = eta_form(60, ell)
    with pytest.raises(ValueError):
        classify(g, ell=7)
    # precision below the comparison depth is an error, not a verdict
    short = HalfIntForm(g.series.truncate(20), 0, 1, g.certificate)
    with pytest.raises(PrecisionError):
        classify(short)


def test_classify_case_one_respects_congruence_not_just_shape():
    # right shape (a1 != 0, al = 0, r0 = 1, even lam) but wrong tail:
    # must land in unclassified via the congruence witness
    ell = 5
    w, depth = membership_depth(12, 1)
    desc_prec = depth + 24
    e = eta_series(desc_prec, ell)
    delta_part = (e ** 25).truncate(depth)  # eta * delta, coeff(1) = 0
    f = (e.truncate(depth) + delta_part.scale(2))
    g = certify(f, 12, 1)
    rep = classify(g)
    assert rep.a1 == 1
    assert rep.case == "unclassified"
    assert not rep.checks[-1].passed
    assert rep.checks[-1].witness == 25
