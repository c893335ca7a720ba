"""Exact truncated q-expansions indexed in 1/24-integral powers.

A series is sum_{0 <= n < prec} a(n) q^(n/24) with exact coefficients:
arbitrary-precision integers, or elements of F_ell for a prime ell >= 5.
An optional residue class r0 records the support claim
a(n) != 0  =>  n = r0 (mod 24).  Integer-exponent forms are the special
case r0 = 0 with every index divisible by 24.

All values are immutable after construction; every operation returns a
new series.  Precision bookkeeping is pessimistic and certified: an
operation's output precision is the largest P such that all indices
n < P of the true result are determined by the known prefixes of the
inputs.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "PrecisionError",
    "QExp24",
    "kronecker",
    "is_prime",
    "squarefree_part",
    "eta_series",
    "theta_op",
    "u_op",
    "v_op",
    "twist",
    "support_square_classes",
    "series_to_text",
    "series_from_text",
]

# np.convolve on int64 is exact as long as no inner sum overflows; with
# coefficients reduced to [0, ell) a sum of N products is < N * (ell-1)^2.
_INT64_SAFE = 2**62


class PrecisionError(ValueError):
    """A coefficient index or verification depth lies beyond known precision."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n).

    Completely multiplicative in both arguments, with the standard
    extension to even and nonpositive lower arguments:
    (a|2) is 0 for even a and (-1)^((a^2-1)/8) for odd a,
    (a|-1) is -1 exactly when a < 0, and (a|0) is nonzero only for
    a = +-1.
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        if a < 0:
            result = -1
        n = -n
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # n is odd and positive from here: Jacobi with reciprocity.
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@lru_cache(maxsize=None)
def squarefree_part(n: int) -> int:
    """Largest squarefree divisor t with n/t a perfect square."""
    if n <= 0:
        raise ValueError("squarefree_part needs a positive integer")
    part = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                part *= p
        p += 1 if p == 2 else 2
    return part * n  # leftover n is 1 or a prime appearing once


def _validate_modulus(modulus):
    if modulus is not None and (modulus < 5 or not is_prime(modulus)):
        raise ValueError(f"modulus must be a prime >= 5, got {modulus}")


class QExp24:
    """Dense truncated expansion sum a(n) q^(n/24).

    coeffs[n] holds the coefficient of q^(n/24) for 0 <= n < prec.
    modulus is None for integer coefficients or a prime ell >= 5 for
    F_ell (stored reduced to [0, ell)).  residue, when set, asserts the
    support lies in the class residue (mod 24) and is validated.

    Equality compares ring, precision, and coefficients; the residue
    tag is a support claim, not part of the value.
    """

    __slots__ = ("coeffs", "prec", "modulus", "residue")

    def __init__(self, coeffs, prec=None, modulus=None, residue=None):
        coeffs = list(coeffs)
        if prec is None:
            prec = len(coeffs)
        if prec < 1:
            raise ValueError("prec must be a positive integer")
        if len(coeffs) > prec:
            raise ValueError("coefficient list longer than declared prec")
        _validate_modulus(modulus)
        if modulus is not None:
            coeffs = [int(c) % modulus for c in coeffs]
        else:
            coeffs = [int(c) for c in coeffs]
        if len(coeffs) < prec:
            coeffs.extend([0] * (prec - len(coeffs)))
        if residue is not None:
            if not 0 <= residue < 24:
                raise ValueError("residue must lie in [0, 24)")
            for n, c in enumerate(coeffs):
                if c and n % 24 != residue:
                    raise ValueError(
                        f"coefficient at index {n} violates support class "
                        f"{residue} (mod 24)"
                    )
        self.coeffs = tuple(coeffs)
        self.prec = prec
        self.modulus = modulus
        self.residue = residue

    # === constructors ===

    @classmethod
    def zero(cls, prec: int, modulus=None, residue=None) -> "QExp24":
        return cls([0] * prec, prec, modulus, residue)

    @classmethod
    def one(cls, prec: int, modulus=None) -> "QExp24":
        c = [0] * prec
        c[0] = 1
        return cls(c, prec, modulus, residue=0)

    @classmethod
    def from_dict(cls, terms: dict, prec: int, modulus=None, residue=None) -> "QExp24":
        c = [0] * prec
        for n, v in terms.items():
            if not 0 <= n < prec:
                raise PrecisionError(f"index {n} outside [0, {prec})")
            c[n] = v
        return cls(c, prec, modulus, residue)

    # === inspection ===

    def coeff(self, n: int) -> int:
        if n < 0:
            raise ValueError("negative index")
        if n >= self.prec:
            raise PrecisionError(f"index {n} beyond precision {self.prec}")
        return self.coeffs[n]

    __getitem__ = coeff

    def valuation(self) -> int:
        """Smallest index with a nonzero coefficient, or prec if none."""
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return self.prec

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support(self):
        return [n for n, c in enumerate(self.coeffs) if c]

    def nonzero_items(self):
        return [(n, c) for n, c in enumerate(self.coeffs) if c]

    def __eq__(self, other):
        if not isinstance(other, QExp24):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def __repr__(self):
        ring = "Z" if self.modulus is None else f"F{self.modulus}"
        head = ", ".join(f"{n}:{c}" for n, c in self.nonzero_items()[:4])
        tail = ", ..." if len(self.support()) > 4 else ""
        return f"QExp24<{ring}, prec={self.prec}, residue={self.residue}>[{head}{tail}]"

    def first_difference(self, other: "QExp24", depth: int):
        """First index below depth where the two series disagree, else None."""
        self._same_ring(other)
        if depth > self.prec or depth > other.prec:
            raise PrecisionError("comparison depth exceeds available precision")
        for n in range(depth):
            if self.coeffs[n] != other.coeffs[n]:
                return n
        return None

    def agrees_with(self, other: "QExp24", depth: int) -> bool:
        return self.first_difference(other, depth) is None

    # === ring operations ===

    def _same_ring(self, other):
        if not isinstance(other, QExp24):
            raise TypeError("expected a QExp24")
        if self.modulus != other.modulus:
            raise ValueError("ring mismatch between operands")

    def _addsub(self, other, sign):
        self._same_ring(other)
        prec = min(self.prec, other.prec)
        out = [self.coeffs[n] + sign * other.coeffs[n] for n in range(prec)]
        if self.residue == other.residue:
            residue = self.residue
        elif self.is_zero():
            residue = other.residue
        elif other.is_zero():
            residue = self.residue
        else:
            residue = None
        return QExp24(out, prec, self.modulus, residue)

    def __add__(self, other):
        return self._addsub(other, 1)

    def __sub__(self, other):
        return self._addsub(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: int) -> "QExp24":
        out = [c * v for v in self.coeffs]
        return QExp24(out, self.prec, self.modulus, self.residue)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._same_ring(other)
        vf, vg = self.valuation(), other.valuation()
        prec = min(self.prec + vg, other.prec + vf)
        if self.residue is not None and other.residue is not None:
            residue = (self.residue + other.residue) % 24
        else:
            residue = None
        if self.modulus is None:
            out = self._mul_int(other, prec)
        else:
            out = self._mul_mod(other, prec, residue)
        return QExp24(out, prec, self.modulus, residue)

    __rmul__ = __mul__

    def _mul_int(self, other, prec):
        # Exact big-integer convolution over the nonzero supports.
        out = [0] * prec
        items_g = other.nonzero_items()
        for n, c in self.nonzero_items():
            if n >= prec:
                break
            for m, d in items_g:
                k = n + m
                if k >= prec:
                    break
                out[k] += c * d
        return out

    def _mul_mod(self, other, prec, residue):
        ell = self.modulus
        out = [0] * prec
        if residue is not None:
            # Both supports sit on arithmetic progressions with gap 24;
            # convolve the compressed strands and re-place with offset.
            rf, rg = self.residue, other.residue
            a = np.array(self.coeffs[rf::24], dtype=np.int64)
            b = np.array(other.coeffs[rg::24], dtype=np.int64)
            if a.size == 0 or b.size == 0:
                return out
            if min(a.size, b.size) * (ell - 1) ** 2 >= _INT64_SAFE:
                return self._mul_int(other, prec)  # exact fallback
            conv = np.convolve(a, b) % ell
            base = rf + rg
            limit = min(conv.size, (prec - base + 23) // 24 if prec > base else 0)
            for m in range(limit):
                idx = base + 24 * m
                if idx < prec:
                    out[idx] = int(conv[m])
            return out
        a = np.array(self.coeffs, dtype=np.int64)
        b = np.array(other.coeffs, dtype=np.int64)
        if min(a.size, b.size) * (ell - 1) ** 2 >= _INT64_SAFE:
            return self._mul_int(other, prec)
        conv = np.convolve(a, b) % ell
        upto = min(prec, conv.size)
        out[:upto] = [int(x) for x in conv[:upto]]
        return out

    def __pow__(self, e: int) -> "QExp24":
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            raise ValueError("negative powers are not defined for q-expansions")
        if e == 0:
            return QExp24.one(self.prec, self.modulus)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # === precision / ring management ===

    def truncate(self, prec: int) -> "QExp24":
        if prec > self.prec:
            raise PrecisionError("cannot extend precision by truncation")
        return QExp24(self.coeffs[:prec], prec, self.modulus, self.residue)

    def reduce_mod(self, ell: int) -> "QExp24":
        """Reduction map Z[[q^(1/24)]] -> F_ell[[q^(1/24)]]."""
        if self.modulus is not None:
            raise ValueError("series already has prime-field coefficients")
        return QExp24(self.coeffs, self.prec, ell, self.residue)

    def with_residue(self, residue) -> "QExp24":
        """Attach (and validate) a support-class claim."""
        return QExp24(self.coeffs, self.prec, self.modulus, residue)


# === canonical series and operators ===


def eta_series(prec: int, modulus=None) -> QExp24:
    """q^(1/24) prod (1-q^n) in closed form: sum_{n>=1} (12|n) q^(n^2/24)."""
    if prec < 2:
        raise ValueError("prec must be at least 2 to see the leading term")
    _validate_modulus(modulus)
    coeffs = [0] * prec
    n = 1
    while n * n < prec:
        coeffs[n * n] = kronecker(12, n)
        n += 1
    return QExp24(coeffs, prec, modulus, residue=1)


def theta_op(f: QExp24) -> QExp24:
    """q d/dq in 1/24-units: a(n) picks up the factor n/24 mod ell."""
    if f.modulus is None:
        raise ValueError("theta_op needs prime-field coefficients")
    ell = f.modulus
    inv24 = pow(24, -1, ell)
    out = [(n * inv24 % ell) * c % ell for n, c in enumerate(f.coeffs)]
    return QExp24(out, f.prec, ell, f.residue)


def u_op(f: QExp24, m: int) -> QExp24:
    """U_m: b(n) = a(m n).  Precision contracts to ceil(prec/m)."""
    if m < 1:
        raise ValueError("U_m needs m >= 1")
    prec = -(-f.prec // m)
    out = [f.coeffs[m * n] for n in range(prec)]
    if f.residue is not None and math.gcd(m, 24) == 1:
        residue = f.residue * pow(m, -1, 24) % 24
    else:
        residue = None
    return QExp24(out, prec, f.modulus, residue)


def v_op(f: QExp24, m: int) -> QExp24:
    """V_m: b(m n) = a(n), all other coefficients 0.  Precision grows to m*prec."""
    if m < 1:
        raise ValueError("V_m needs m >= 1")
    prec = m * f.prec
    out = [0] * prec
    for n, c in f.nonzero_items():
        out[m * n] = c
    residue = None if f.residue is None else (m * f.residue) % 24
    return QExp24(out, prec, f.modulus, residue)


def twist(f: QExp24, p: int, kind: str = "quadratic") -> QExp24:
    """Twist by the quadratic character mod p, or by the trivial character.

    quadratic: a(n) -> (n|p) a(n);  trivial: kills the coefficients with
    p | n and keeps the rest.  The support class is unchanged (p^2 = 1
    mod 24 for p >= 5, so twisting never moves a square class out of a
    residue class either).
    """
    if p in (2, 3) or p < 2 or not is_prime(p):
        raise ValueError(f"twist needs a prime p >= 5, got {p}")
    if kind == "quadratic":
        out = [kronecker(n, p) * c for n, c in enumerate(f.coeffs)]
    elif kind == "trivial":
        out = [0 if n % p == 0 else c for n, c in enumerate(f.coeffs)]
    else:
        raise ValueError(f"unknown twist kind {kind!r}")
    return QExp24(out, f.prec, f.modulus, f.residue)


def support_square_classes(f: QExp24) -> dict:
    """Group the nonzero support by squarefree part: {t: [indices]}."""
    classes: dict = {}
    for n, _ in f.nonzero_items():
        classes.setdefault(squarefree_part(n), []).append(n)
    return classes


# === text serialization ===


def series_to_text(f: QExp24, extra: dict | None = None) -> str:
    """Delimited text form: a header line then one 'n c' line per nonzero index.

    Absent indices are zero.  extra key=value pairs are appended to the
    header (used by basis dumps for weight/kind/index).
    """
    ring = "Z" if f.modulus is None else f"Fp:{f.modulus}"
    residue = "none" if f.residue is None else str(f.residue)
    header = f"# ring={ring} prec={f.prec} residue={residue}"
    if extra:
        header += "".join(f" {k}={v}" for k, v in extra.items())
    lines = [header]
    lines.extend(f"{n} {c}" for n, c in f.nonzero_items())
    return "\n".join(lines) + "\n"


def series_from_text(text: str) -> QExp24:
    header = None
    terms = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None:
                header = line
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"malformed series line: {raw!r}")
        n, c = int(parts[0]), int(parts[1])
        terms[n] = c
    if header is None:
        raise ValueError("missing series header line")
    fields = dict(
        item.split("=", 1) for item in header.lstrip("#").split() if "=" in item
    )
    try:
        ring = fields["ring"]
        prec = int(fields["prec"])
        residue_s = fields["residue"]
    except KeyError as exc:
        raise ValueError(f"series header missing {exc} field") from exc
    if ring == "Z":
        modulus = None
    elif ring.startswith("Fp:"):
        modulus = int(ring[3:])
    else:
        raise ValueError(f"unknown ring tag {ring!r}")
    residue = None if residue_s == "none" else int(residue_s)
    return QExp24.from_dict(terms, prec, modulus, residue)
