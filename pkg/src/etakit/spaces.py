"""Level-one form spaces mod ell: echelon bases, membership, filtration.

Weight-k forms of level one are spanned by monomials Delta^j E4^a E6^b.
Reducing the integer spanning set mod ell and row-reducing gives an
echelon basis with pivot j at integer exponent j; reading coordinates
off the pivots plus a Sturm-depth verification yields membership
certificates.  Spaces of half-integral weight lam + 1/2 with the r-th
power of the eta multiplier are realized as eta^r0 * M_w with
r0 = r mod 24 and w = lam + (1 - r0)/2.

Bases are cached process-wide keyed by (weight, kind, ell, prec); the
fill is idempotent, so concurrent rebuilds are harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qseries import QExp24, PrecisionError, eta_series, is_prime

__all__ = [
    "CertificationError",
    "dims",
    "eisenstein_e4",
    "eisenstein_e6",
    "delta_series",
    "SpaceBasis",
    "miller_basis",
    "MembershipCertificate",
    "NotMember",
    "coordinates",
    "sturm_check",
    "filtration",
    "EtaSpaceDescriptor",
    "eta_space_basis",
    "membership_depth",
    "eta_membership",
]


class CertificationError(RuntimeError):
    """A certified-to-exist object failed to materialize at full depth."""


def dims(k: int) -> tuple:
    """(dim M_k, dim S_k) at level one."""
    if k < 0 or k % 2:
        return (0, 0)
    dm = k // 12 if k % 12 == 2 else k // 12 + 1
    ds = dm - 1 if k >= 4 else 0
    return (dm, ds)


def _sigma(m: int, e: int) -> int:
    return sum(d**e for d in range(1, m + 1) if m % d == 0)


def eisenstein_e4(prec: int) -> QExp24:
    """E4 = 1 + 240 sum sigma_3(n) q^n over Z, in 1/24-unit indexing."""
    coeffs = [0] * prec
    coeffs[0] = 1
    for m in range(1, (prec - 1) // 24 + 1):
        coeffs[24 * m] = 240 * _sigma(m, 3)
    return QExp24(coeffs, prec, None, residue=0)


def eisenstein_e6(prec: int) -> QExp24:
    """E6 = 1 - 504 sum sigma_5(n) q^n over Z."""
    coeffs = [0] * prec
    coeffs[0] = 1
    for m in range(1, (prec - 1) // 24 + 1):
        coeffs[24 * m] = -504 * _sigma(m, 5)
    return QExp24(coeffs, prec, None, residue=0)


def delta_series(prec: int) -> QExp24:
    """The discriminant form as the 24th power of eta, over Z."""
    return eta_series(prec, None) ** 24 if prec >= 2 else QExp24.zero(prec)


@dataclass(frozen=True)
class SpaceBasis:
    """Reduced echelon basis of M_k or S_k over F_ell.

    Element i has coefficient 1 at integer exponent pivots[i] and 0 at
    every other pivot.  kind is "M" (full) or "S" (cuspidal).
    """

    k: int
    kind: str
    ell: int
    prec: int
    elements: tuple
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.elements)


_MILLER_CACHE: dict = {}
_ETA_CACHE: dict = {}


def _conv(a: np.ndarray, b: np.ndarray, ell: int, length: int) -> np.ndarray:
    c = np.convolve(a, b)[:length] % ell
    if c.size < length:
        c = np.pad(c, (0, length - c.size))
    return c


def _rref(rows: np.ndarray, pivots, ell: int) -> np.ndarray:
    # Rows arrive triangular: rows[i][pivots[i]] == 1, zero left of the pivot.
    for j in range(1, len(pivots)):
        col = pivots[j]
        for i in range(j):
            c = int(rows[i, col])
            if c:
                rows[i] = (rows[i] - c * rows[j]) % ell
    return rows


def _compact_generators(ell: int, length: int):
    """Compressed integer-exponent expansions of E4, E6, Delta mod ell."""
    e4 = np.zeros(length, dtype=np.int64)
    e6 = np.zeros(length, dtype=np.int64)
    e4[0] = e6[0] = 1
    for m in range(1, length):
        e4[m] = 240 * _sigma(m, 3) % ell
        e6[m] = -504 * _sigma(m, 5) % ell
    e4cube = _conv(_conv(e4, e4, ell, length), e4, ell, length)
    e6sq = _conv(e6, e6, ell, length)
    delta = (e4cube - e6sq) * pow(1728, -1, ell) % ell
    return e4, e6, delta


def _expand(row: np.ndarray, offset: int, prec: int, ell: int, residue) -> QExp24:
    coeffs = [0] * prec
    for m, c in enumerate(row):
        idx = offset + 24 * m
        if idx >= prec:
            break
        coeffs[idx] = int(c)
    return QExp24(coeffs, prec, ell, residue)


def miller_basis(k: int, ell: int, prec: int, kind: str = "M") -> SpaceBasis:
    """Reduced echelon basis of the weight-k space mod ell.

    Spanning set Delta^j * E4^a * E6^b for j = 0..dim-1, with b minimal
    in {0,..,3} making the complementary weight divisible by 4.  Leading
    terms are q^j, so the set row-reduces without pivot search.
    """
    if kind not in ("M", "S"):
        raise ValueError(f"kind must be 'M' or 'S', got {kind!r}")
    if ell < 5 or not is_prime(ell):
        raise ValueError(f"ell must be a prime >= 5, got {ell}")
    key = (k, kind, ell, prec)
    cached = _MILLER_CACHE.get(key)
    if cached is not None:
        return cached

    dm, ds = dims(k)
    dim = dm if kind == "M" else ds
    length = (prec + 23) // 24
    if dm and length < dm + k // 12 + 1:
        raise PrecisionError(
            f"prec {prec} too small for weight {k}: need pivots plus Sturm depth"
        )
    if dim == 0:
        basis = SpaceBasis(k, kind, ell, prec, (), ())
        _MILLER_CACHE[key] = basis
        return basis

    e4, e6, delta = _compact_generators(ell, length)
    a_max = max(
        (k - 12 * j - 6 * b) // 4
        for j in range(dm)
        for b in range(4)
        if (k - 12 * j - 6 * b) % 4 == 0 and k - 12 * j - 6 * b >= 0
    )
    e4pow = [np.zeros(length, dtype=np.int64) for _ in range(a_max + 1)]
    e4pow[0][0] = 1
    for i in range(1, a_max + 1):
        e4pow[i] = _conv(e4pow[i - 1], e4, ell, length)
    e6pow = [np.zeros(length, dtype=np.int64) for _ in range(4)]
    e6pow[0][0] = 1
    for i in range(1, 4):
        e6pow[i] = _conv(e6pow[i - 1], e6, ell, length)
    dpow = [np.zeros(length, dtype=np.int64) for _ in range(dm)]
    dpow[0][0] = 1
    for j in range(1, dm):
        dpow[j] = _conv(dpow[j - 1], delta, ell, length)

    start = 0 if kind == "M" else 1
    pivots = tuple(range(start, dm))
    rows = np.zeros((len(pivots), length), dtype=np.int64)
    for row_i, j in enumerate(pivots):
        m = k - 12 * j
        b = next(
            bb for bb in range(4) if (m - 6 * bb) % 4 == 0 and m - 6 * bb >= 0
        )
        a = (m - 6 * b) // 4
        rows[row_i] = _conv(_conv(e4pow[a], e6pow[b], ell, length), dpow[j], ell, length)
        assert rows[row_i][j] % ell == 1, "leading coefficient of the spanning set"
    _rref(rows, pivots, ell)

    elements = tuple(_expand(rows[i], 0, prec, ell, 0) for i in range(len(pivots)))
    basis = SpaceBasis(k, kind, ell, prec, elements, pivots)
    _MILLER_CACHE[key] = basis
    return basis


@dataclass(frozen=True)
class MembershipCertificate:
    """Echelon coordinates verified against the input below depth (1/24-units)."""

    coordinates: tuple
    depth: int
    space: object


@dataclass(frozen=True)
class NotMember:
    """Certificate of failure: the first index where solving breaks down."""

    witness: int


def coordinates(f: QExp24, basis: SpaceBasis, depth: int):
    """Solve f against an echelon basis and verify below depth.

    Coordinates are read off the pivots; the combination must then
    reproduce f at every index < depth (depth in 1/24-units).  Returns
    a MembershipCertificate or a NotMember carrying the first mismatch.
    """
    if f.modulus != basis.ell:
        raise ValueError("series ring does not match basis ring")
    if depth < 1:
        raise ValueError("depth must be positive")
    if depth > f.prec or depth > basis.prec:
        raise PrecisionError("verification depth exceeds available precision")
    coords = []
    for pivot in basis.pivots:
        idx = 24 * pivot
        if idx >= depth:
            raise PrecisionError("depth does not reach every pivot")
        coords.append(f.coeffs[idx])
    combo = np.zeros(depth, dtype=np.int64)
    for c, elem in zip(coords, basis.elements):
        if c:
            combo = (combo + c * np.array(elem.coeffs[:depth], dtype=np.int64)) % basis.ell
    target = np.array(f.coeffs[:depth], dtype=np.int64)
    diff = (target - combo) % basis.ell
    bad = np.nonzero(diff)[0]
    if bad.size:
        return NotMember(int(bad[0]))
    return MembershipCertificate(tuple(int(c) for c in coords), depth, basis)


def sturm_check(f: QExp24, g: QExp24, k: int, kind: str = "M") -> bool:
    """Congruence of two certified weight-k members up to the Sturm bound.

    Agreement at every integer exponent <= floor(k/12) + 1 pins the
    difference past the bound weight/12, which forces it to vanish.
    """
    if kind not in ("M", "S"):
        raise ValueError(f"kind must be 'M' or 'S', got {kind!r}")
    if f.modulus != g.modulus:
        raise ValueError("ring mismatch")
    bound = k // 12 + 1
    need = 24 * bound + 1
    if f.prec < need or g.prec < need:
        raise PrecisionError(f"Sturm check at weight {k} needs precision {need}")
    return all(f.coeffs[24 * m] == g.coeffs[24 * m] for m in range(bound + 1))


def filtration(f: QExp24, k: int) -> int:
    """Least weight k' = k (mod ell-1) whose space realizes the reduction.

    Scans candidates upward from k mod (ell-1); each candidate is solved
    to the Sturm depth of the original weight k, so success certifies
    equality in weight k.  A certified member of the weight-k space must
    succeed by k' = k.
    """
    ell = f.modulus
    if ell is None:
        raise ValueError("filtration needs prime-field coefficients")
    if f.is_zero():
        raise ValueError("the filtration of the zero series is undefined")
    if k < 0 or k % 2:
        raise ValueError(f"weight {k} holds no nonzero level-one forms")
    for n, _ in f.nonzero_items():
        if n % 24:
            raise ValueError("filtration applies to integer-exponent series")
    depth = 24 * (k // 12 + 1) + 1
    if f.prec < depth:
        raise PrecisionError(f"filtration at weight {k} needs precision {depth}")
    for k2 in range(k % (ell - 1), k + 1, ell - 1):
        dm = dims(k2)[0]
        if dm == 0:
            continue
        basis_prec = max(depth, 24 * (dm + k2 // 12 + 1)) + 24
        basis = miller_basis(k2, ell, basis_prec, "M")
        if isinstance(coordinates(f, basis, depth), MembershipCertificate):
            return k2
    raise CertificationError(
        f"no weight <= {k} realizes the series; membership at weight {k} was claimed"
    )


# === half-integral-weight realization ===


@dataclass(frozen=True)
class EtaSpaceDescriptor:
    """Realized basis of the weight lam + 1/2 space with eta multiplier power r.

    Elements are eta^r0 times a weight-w basis, re-echelonized so element
    i has pivot 1 at index r0 + 24 i.  Every element vanishes at the cusp
    (leading index >= r0 > 0).  Empty when w < 0, w is odd, or dim M_w = 0.
    """

    lam: int
    r: int
    r0: int
    w: int
    ell: int
    prec: int
    elements: tuple
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.elements)


def membership_depth(lam: int, r: int) -> tuple:
    """(quotient weight w, certification depth in 1/24-units)."""
    r0 = r % 24
    w = lam + (1 - r0) // 2
    return w, 24 * (w // 12 + 1) + r0


def _check_eta_args(lam: int, r: int):
    if r < 1 or math.gcd(r, 6) != 1:
        raise ValueError(f"multiplier exponent r must be positive with gcd(r,6)=1, got {r}")
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")


def eta_space_basis(lam: int, r: int, ell: int, prec: int) -> EtaSpaceDescriptor:
    _check_eta_args(lam, r)
    if ell < 5 or not is_prime(ell):
        raise ValueError(f"ell must be a prime >= 5, got {ell}")
    r0 = r % 24
    key = (lam, r0, ell, prec)
    cached = _ETA_CACHE.get(key)
    if cached is not None:
        return cached

    w = lam + (1 - r0) // 2
    if w < 0 or w % 2 or dims(w)[0] == 0:
        desc = EtaSpaceDescriptor(lam, r, r0, w, ell, prec, (), ())
        _ETA_CACHE[key] = desc
        return desc

    mb = miller_basis(w, ell, prec, "M")
    eta_r0 = eta_series(prec, ell) ** r0
    eta_r0 = eta_r0.truncate(prec) if eta_r0.prec > prec else eta_r0
    length = (prec - r0 + 23) // 24 if prec > r0 else 0
    ec = np.array(eta_r0.coeffs[r0::24], dtype=np.int64)
    rows = np.zeros((mb.dim, length), dtype=np.int64)
    for i, elem in enumerate(mb.elements):
        rows[i] = _conv(ec, np.array(elem.coeffs[0::24], dtype=np.int64), ell, length)
        assert rows[i][i] % ell == 1
    _rref(rows, tuple(range(mb.dim)), ell)
    elements = tuple(_expand(rows[i], r0, prec, ell, r0) for i in range(mb.dim))
    pivots = tuple(r0 + 24 * i for i in range(mb.dim))
    desc = EtaSpaceDescriptor(lam, r, r0, w, ell, prec, elements, pivots)
    _ETA_CACHE[key] = desc
    return desc


def eta_membership(f: QExp24, lam: int, r: int):
    """Certify f as a member of the realized weight lam + 1/2 space.

    Solves against eta_space_basis(lam, r) with verification depth
    24*(floor(w/12)+1) + r0.  Membership in an empty space means f = 0
    to the full known precision.
    """
    _check_eta_args(lam, r)
    ell = f.modulus
    if ell is None:
        raise ValueError("membership certification works over a prime field")
    r0 = r % 24
    for n, c in f.nonzero_items():
        if n % 24 != r0:
            return NotMember(n)
    w, depth = membership_depth(lam, r)
    if w < 0 or w % 2 or dims(w)[0] == 0:
        desc = eta_space_basis(lam, r, ell, max(f.prec, 2))
        if f.is_zero():
            return MembershipCertificate((), f.prec, desc)
        return NotMember(f.valuation())
    if f.prec < depth:
        raise PrecisionError(
            f"certifying at lam={lam}, r={r} needs precision {depth}, have {f.prec}"
        )
    basis_prec = max(depth, 24 * (dims(w)[0] + w // 12 + 1)) + 24
    desc = eta_space_basis(lam, r, ell, basis_prec)
    coords = [f.coeffs[p] for p in desc.pivots]
    combo = np.zeros(depth, dtype=np.int64)
    for c, elem in zip(coords, desc.elements):
        if c:
            combo = (combo + c * np.array(elem.coeffs[:depth], dtype=np.int64)) % ell
    diff = (np.array(f.coeffs[:depth], dtype=np.int64) - combo) % ell
    bad = np.nonzero(diff)[0]
    if bad.size:
        return NotMember(int(bad[0]))
    return MembershipCertificate(tuple(int(c) for c in coords), depth, desc)
