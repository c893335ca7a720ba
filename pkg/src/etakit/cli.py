"""Command-line surface: bases, classification, verification suites.

Recipes are a tiny declarative pipeline language so that scenario files
stay data:

    expr   := term ('+' term)*
    term   := [INT('^'INT)? '*'] factor
    factor := 'eta'('^'INT)? | 'theta'('^'INT)?'(' expr ')' | 'udesc(' expr ')'

Every node of a recipe evaluates to a certified form; precision is
planned top-down from the final classification depth, so a recipe never
under-builds its eta leaves.  Scenario files are line-oriented
key=value (name, ell, recipe, optional prec, expect.* fields).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import random
import sys
import time

from .qseries import (
    QExp24,
    PrecisionError,
    eta_series,
    series_from_text,
    series_to_text,
    theta_op,
)
from .spaces import (
    CertificationError,
    MembershipCertificate,
    NotMember,
    coordinates,
    dims,
    filtration,
    membership_depth,
    miller_basis,
)
from .halfint import HalfIntForm, certify, theta_lift, u_ell_descent
from .classify import classify
from .numeric import (
    UnimodularMatrix,
    epsilon_identities,
    eta_multiplier_exponent,
    verify_eta_transform,
)

__all__ = ["main", "parse_recipe", "evaluate_recipe", "parse_scenario", "load_scenarios"]


# === recipe parsing ===


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j])))
            i = j
        elif ch.isalpha():
            j = i
            while j < len(text) and text[j].isalpha():
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
        elif ch in "^*+()":
            tokens.append((ch, ch))
            i += 1
        else:
            raise ValueError(f"bad character {ch!r} in recipe")
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise ValueError(f"expected {kind!r} at token {self.pos}, got {tok}")
        self.pos += 1
        return tok[1]

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] == "+":
            self.take("+")
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else ("sum", terms)

    def term(self):
        if self.peek()[0] == "int":
            base = self.take("int")
            exp = 1
            if self.peek()[0] == "^":
                self.take("^")
                exp = self.take("int")
            self.take("*")
            return ("scale", base, exp, self.factor())
        return self.factor()

    def factor(self):
        name = self.take("name")
        if name == "eta":
            k = 1
            if self.peek()[0] == "^":
                self.take("^")
                k = self.take("int")
            return ("eta", k)
        if name == "theta":
            j = 1
            if self.peek()[0] == "^":
                self.take("^")
                j = self.take("int")
            self.take("(")
            sub = self.expr()
            self.take(")")
            return ("theta", j, sub)
        if name == "udesc":
            self.take("(")
            sub = self.expr()
            self.take(")")
            return ("udesc", sub)
        raise ValueError(f"unknown operation {name!r}")


def parse_recipe(text: str):
    parser = _Parser(_tokenize(text))
    ast = parser.expr()
    if parser.pos != len(parser.tokens):
        raise ValueError(f"trailing tokens in recipe at position {parser.pos}")
    return ast


def _weight_plan(node, ell: int):
    """Static (lam, r) of a recipe node; udesc uses its weight bound."""
    kind = node[0]
    if kind == "eta":
        k = node[1]
        if k < 1 or math.gcd(k, 6) != 1:
            raise ValueError(f"eta power must be positive and prime to 6, got {k}")
        return (k - 1) // 2, k
    if kind == "theta":
        lam, r = _weight_plan(node[2], ell)
        return lam + node[1] * (ell + 1), r
    if kind == "udesc":
        lam, r = _weight_plan(node[1], ell)
        bound = (2 * lam + 1 - ell) // (2 * ell)
        if bound < 0:
            raise ValueError("descent bound is empty at this weight")
        return bound, r * ell % 24
    if kind == "scale":
        return _weight_plan(node[3], ell)
    if kind == "sum":
        plans = [_weight_plan(sub, ell) for sub in node[1]]
        lam0, r0 = plans[0]
        for lam, r in plans[1:]:
            if (lam - lam0) % (ell - 1) or (r - r0) % 24:
                raise ValueError("sum terms live in incompatible spaces")
        return max(p[0] for p in plans), max(plans, key=lambda p: p[0])[1]
    raise ValueError(f"unknown recipe node {kind!r}")


def _evaluate(node, ell: int, need: int) -> HalfIntForm:
    kind = node[0]
    if kind == "eta":
        k = node[1]
        lam, r = (k - 1) // 2, k
        _, depth = membership_depth(lam, r)
        prec = max(need, depth + 24)
        series = eta_series(prec, ell) ** k
        if series.prec > prec:
            series = series.truncate(prec)
        return certify(series, lam, r)
    if kind == "theta":
        form = _evaluate(node[2], ell, need)
        for _ in range(node[1]):
            form = theta_lift(form)
        return form
    if kind == "udesc":
        return u_ell_descent(_evaluate(node[1], ell, ell * need + ell))
    if kind == "scale":
        form = _evaluate(node[3], ell, need)
        c = pow(node[1], node[2], ell)
        return certify(form.series.scale(c), form.lam, form.r)
    if kind == "sum":
        forms = [_evaluate(sub, ell, need) for sub in node[1]]
        top = max(forms, key=lambda f: f.lam)
        prec = min(f.series.prec for f in forms)
        total = QExp24.zero(prec, ell, top.r % 24)
        for f in forms:
            s = f.series
            total = total + (s.truncate(prec) if s.prec > prec else s)
        return certify(total, top.lam, top.r)
    raise ValueError(f"unknown recipe node {kind!r}")


def evaluate_recipe(text: str, ell: int, prec: int | None = None) -> HalfIntForm:
    """Evaluate a recipe to a certified form over F_ell.

    Base precision is the classification depth of the planned final
    weight plus margin, raisable by the prec argument and scalable by
    the ETAKIT_PREC_OVERRIDE environment variable (a float factor).
    """
    ast = parse_recipe(text)
    lam, r = _weight_plan(ast, ell)
    _, depth = membership_depth(lam, r)
    need = depth + 24
    if prec is not None:
        need = max(need, prec)
    override = os.environ.get("ETAKIT_PREC_OVERRIDE")
    if override:
        need = max(need, int(need * float(override)))
    return _evaluate(ast, ell, need)


# === scenario files ===


def parse_scenario(text: str) -> dict:
    """Parse a line-oriented key=value scenario description."""
    sc = {"expect": {}, "prec": None, "source": None}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"scenario line without '=': {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key.startswith("expect."):
            field = key[len("expect."):]
            if field in ("case",):
                sc["expect"][field] = value
            elif field == "hypothesis_ok":
                sc["expect"][field] = value == "true"
            else:
                sc["expect"][field] = int(value)
        elif key in ("ell", "prec", "lambda", "r"):
            sc[key] = int(value)
        else:
            sc[key] = value
    for required in ("name", "ell", "recipe"):
        if required not in sc or sc[required] is None:
            raise ValueError(f"scenario is missing {required!r}")
    return sc


def load_scenarios() -> list:
    """Shipped scenario corpus, sorted by name."""
    from importlib import resources

    out = []
    root = resources.files("etakit") / "scenarios"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".scenario"):
            out.append(parse_scenario(entry.read_text()))
    out.sort(key=lambda sc: sc["name"])
    return out


def _exit_for_case(case: str) -> int:
    return 0 if case in ("1", "2", "3", "zero") else 3


def run_scenario(sc: dict) -> dict:
    """Evaluate and classify one scenario; compare against expectations."""
    t0 = time.perf_counter()
    form = evaluate_recipe(sc["recipe"], sc["ell"], sc.get("prec"))
    report = classify(form)
    seconds = time.perf_counter() - t0
    failures = []
    got = report.to_dict()
    got["exit"] = _exit_for_case(report.case)
    for field, want in sc["expect"].items():
        if got.get(field) != want:
            failures.append(f"{field}: expected {want!r}, got {got.get(field)!r}")
    return {
        "name": sc["name"],
        "case": report.case,
        "depth": report.depth,
        "seconds": seconds,
        "failures": failures,
    }


# === verification sweeps ===


def _random_unimodular(rng: random.Random, bound: int = 50) -> UnimodularMatrix:
    # pick a coprime bottom row, complete it by the extended euclid identity
    while True:
        c = rng.randint(-bound, bound)
        d = rng.randint(-bound, bound)
        if (c, d) == (0, 0) or math.gcd(c, d) != 1:
            continue
        a, b = _complete_row(c, d)
        t = rng.randint(-2, 2)
        a, b = a + t * c, b + t * d
        if abs(a) <= bound and abs(b) <= bound:
            return UnimodularMatrix(a, b, c, d)


def _complete_row(c: int, d: int):
    # a*d - b*c == 1 via iterative extended euclid on (d, c)
    old_r, r = d, c
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, -old_t


def multiplier_sweep(count: int = 100, seed: int = 2024, bound: int = 50) -> dict:
    """Numeric verification of the eta transformation law at z = i."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(count):
        gamma = _random_unimodular(rng, bound)
        dev = verify_eta_transform(gamma, 1j)
        worst = max(worst, dev)
        if eta_multiplier_exponent(gamma) not in range(24):
            raise AssertionError("multiplier exponent escaped Z/24")
    eps = epsilon_identities(99)
    return {
        "eta_max_deviation": worst,
        "epsilon_identities": "pass" if eps is None else repr(eps),
        "nu_24th_power_exact": True,
        "count": count,
    }


def _random_cusp_form(rng: random.Random, ell: int, k: int, prec: int) -> QExp24:
    basis = miller_basis(k, ell, prec, "S")
    while True:
        coeffs = [rng.randrange(ell) for _ in range(basis.dim)]
        if any(coeffs):
            break
    total = QExp24.zero(prec, ell, 0)
    for c, elem in zip(coeffs, basis.elements):
        if c:
            total = total + elem.scale(c)
    return total


def filtration_sweep(ell: int, count: int = 20, seed: int = 77) -> list:
    """Check the filtration laws on random cusp forms; returns failures."""
    rng = random.Random(seed)
    failures = []
    weights = [k for k in range(12, 37, 2) if dims(k)[1] > 0]
    for i in range(count):
        k = rng.choice(weights)
        prec = 24 * (2 * k // 12 + ell) + 49
        f = _random_cusp_form(rng, ell, k, prec)
        w = filtration(f, k)
        wt = filtration(theta_op(f), k + ell + 1)
        if wt > w + ell + 1:
            failures.append(f"{ell}:{i}: theta raised filtration past the bound")
        if (w % ell != 0) != (wt == w + ell + 1):
            failures.append(f"{ell}:{i}: theta equality rule broken at w={w}")
        w2 = filtration((f * f).truncate(prec), 2 * k)
        if w2 != 2 * w:
            failures.append(f"{ell}:{i}: filtration of the square is {w2}, not {2 * w}")
        # a weight outside the k mod (ell-1) class must refuse the series;
        # check past the wrong space's pivot block so the solve is not vacuous
        k_bad = k + 2
        while (k_bad - k) % (ell - 1) == 0:
            k_bad += 2
        depth_bad = 24 * (max(k, k_bad) // 12 + 2) + 1
        basis = miller_basis(k_bad, ell, prec, "M")
        if isinstance(coordinates(f, basis, depth_bad), MembershipCertificate):
            failures.append(f"{ell}:{i}: weight {k_bad} wrongly accepted the form")
    return failures


# === subcommands ===


def _cmd_basis(args) -> int:
    prec = args.prec
    if prec is None:
        dm = dims(args.weight)[0]
        prec = 24 * (dm + args.weight // 12 + 2) + 1
    try:
        basis = miller_basis(args.weight, args.ell, prec, args.kind)
    except (ValueError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    blocks = []
    for i, elem in enumerate(basis.elements):
        extra = {"weight": args.weight, "kind": args.kind, "index": i}
        blocks.append(series_to_text(elem, extra))
    print("\n\n".join(blocks))
    return 0


def _load_series_file(path: str) -> QExp24:
    with open(path, "r", encoding="utf-8") as fh:
        return series_from_text(fh.read())


def _cmd_classify(args) -> int:
    if args.recipe is None and args.series is None:
        print("error: need --recipe or --series", file=sys.stderr)
        return 2
    try:
        if args.recipe is not None:
            with open(args.recipe, "r", encoding="utf-8") as fh:
                text = fh.read()
            if "recipe=" in text:
                sc = parse_scenario(text)
                if args.ell is not None and args.ell != sc["ell"]:
                    print(
                        f"error: --ell {args.ell} conflicts with scenario "
                        f"ell={sc['ell']}",
                        file=sys.stderr,
                    )
                    return 2
                form = evaluate_recipe(sc["recipe"], sc["ell"], args.prec or sc.get("prec"))
            else:
                if args.ell is None:
                    print("error: --ell is required with a bare recipe", file=sys.stderr)
                    return 2
                form = evaluate_recipe(text.strip(), args.ell, args.prec)
        else:
            if not args.assert_member:
                print(
                    "error: refusing to classify an uncertified series; "
                    "pass --assert-member to attempt certification",
                    file=sys.stderr,
                )
                return 2
            if args.ell is None or args.lam is None or args.r is None:
                print("error: --series needs --ell, --lambda and --r", file=sys.stderr)
                return 2
            series = _load_series_file(args.series)
            if series.modulus is None:
                series = series.reduce_mod(args.ell)
            elif series.modulus != args.ell:
                print("error: series modulus disagrees with --ell", file=sys.stderr)
                return 2
            form = certify(series, args.lam, args.r)
        report = classify(form)
    except (ValueError, PrecisionError, CertificationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(report.to_json())
    return _exit_for_case(report.case)


def _cmd_verify(args) -> int:
    ells = [int(x) for x in args.ell.split(",")] if args.ell else None
    if args.suite == "paper-examples":
        scenarios = load_scenarios()
        if ells:
            scenarios = [sc for sc in scenarios if sc["ell"] in ells]
        if args.jobs and args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(run_scenario, scenarios))
        else:
            rows = [run_scenario(sc) for sc in scenarios]
        failed = 0
        width = max((len(r["name"]) for r in rows), default=4)
        for row in rows:
            verdict = "ok" if not row["failures"] else "FAIL"
            failed += bool(row["failures"])
            print(
                f"{row['name']:<{width}}  case={row['case']:<12} "
                f"depth={row['depth']:<6} {row['seconds']:7.2f}s  {verdict}"
            )
            for failure in row["failures"]:
                print(f"  - {failure}")
        print(f"{len(rows)} scenarios, {failed} failed")
        return 1 if failed else 0
    if args.suite == "multiplier-numeric":
        result = multiplier_sweep()
        for key, value in result.items():
            print(f"{key}: {value}")
        ok = result["eta_max_deviation"] < 1e-8 and result["epsilon_identities"] == "pass"
        print("multiplier-numeric:", "ok" if ok else "FAIL")
        return 0 if ok else 1
    if args.suite == "filtration-laws":
        failures = []
        for ell in ells or [5, 7]:
            failures += filtration_sweep(ell)
        for failure in failures:
            print(f"FAIL {failure}")
        print(f"filtration-laws: {'ok' if not failures else f'{len(failures)} failures'}")
        return 0 if not failures else 1
    print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
    return 2


def _cmd_verify_multiplier(args) -> int:
    result = multiplier_sweep(count=args.count, seed=args.seed)
    print(json.dumps(result, indent=2))
    ok = result["eta_max_deviation"] < 1e-8 and result["epsilon_identities"] == "pass"
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="etakit",
        description="level-one modular forms mod ell: bases, lifts, classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_basis = sub.add_parser("basis", help="dump an echelon basis")
    p_basis.add_argument("--weight", type=int, required=True)
    p_basis.add_argument("--kind", choices=("M", "S"), default="M")
    p_basis.add_argument("--ell", type=int, default=5)
    p_basis.add_argument("--prec", type=int, default=None)

    p_cls = sub.add_parser("classify", help="classify a form, JSON report")
    p_cls.add_argument("--ell", type=int, default=None)
    p_cls.add_argument("--recipe", default=None, help="recipe or scenario file")
    p_cls.add_argument("--series", default=None, help="series text file")
    p_cls.add_argument("--lambda", dest="lam", type=int, default=None)
    p_cls.add_argument("--r", type=int, default=None)
    p_cls.add_argument("--prec", type=int, default=None)
    p_cls.add_argument("--assert-member", action="store_true")

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument(
        "--suite",
        required=True,
        choices=("paper-examples", "multiplier-numeric", "filtration-laws"),
    )
    p_ver.add_argument("--ell", default=None, help="comma-separated primes")
    p_ver.add_argument("--jobs", type=int, default=None)

    p_vm = sub.add_parser("verify-multiplier", help="numeric multiplier sweep, JSON")
    p_vm.add_argument("--count", type=int, default=100)
    p_vm.add_argument("--seed", type=int, default=2024)

    args = parser.parse_args(argv)
    if args.command == "basis":
        return _cmd_basis(args)
    if args.command == "classify":
        return _cmd_classify(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "verify-multiplier":
        return _cmd_verify_multiplier(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
