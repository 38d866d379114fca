"""
Field and Curve Module

Prime-field arithmetic and short-Weierstrass group operations
(y^2 = x^3 + ax + b over GF(p)) used by every other layer.

Points are affine with one modular inversion per addition. Nothing here is
constant-time; timing side channels are outside the threat model.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from .errors import (
    FieldDivisionError,
    ModulusMismatchError,
    ParseError,
    PointValidationError,
    RangeError,
)

logger = logging.getLogger(__name__)

# Miller-Rabin witnesses; the first twelve alone are deterministic below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


@dataclass(frozen=True)
class FieldElement:
    """Integer modulo an odd prime p, always stored reduced into [0, p)."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return fe_add(self, other)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return fe_sub(self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return fe_mul(self, other)

    def __neg__(self) -> "FieldElement":
        return fe_neg(self)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElement({self.value}, p={self.p})"


def _check_modulus(x: FieldElement, y: FieldElement) -> int:
    if x.p != y.p:
        raise ModulusMismatchError(f"modulus mismatch: {x.p} vs {y.p}")
    return x.p


def fe_add(x: FieldElement, y: FieldElement) -> FieldElement:
    p = _check_modulus(x, y)
    return FieldElement(x.value + y.value, p)


def fe_sub(x: FieldElement, y: FieldElement) -> FieldElement:
    p = _check_modulus(x, y)
    return FieldElement(x.value - y.value, p)


def fe_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    p = _check_modulus(x, y)
    return FieldElement(x.value * y.value, p)


def fe_neg(x: FieldElement) -> FieldElement:
    return FieldElement(-x.value, x.p)


def fe_pow(x: FieldElement, e: int) -> FieldElement:
    if e < 0:
        return fe_pow(fe_inv(x), -e)
    return FieldElement(pow(x.value, e, x.p), x.p)


def fe_inv(x: FieldElement) -> FieldElement:
    """
    Multiplicative inverse modulo p.

    Raises:
        FieldDivisionError: If x is zero
    """
    if x.value == 0:
        raise FieldDivisionError(f"zero has no inverse modulo {x.p}")
    return FieldElement(pow(x.value, -1, x.p), x.p)


def is_quadratic_residue(x: FieldElement) -> bool:
    """Euler's criterion. Zero counts as a residue."""
    if x.value == 0:
        return True
    return pow(x.value, (x.p - 1) // 2, x.p) == 1


def _tonelli_shanks(n: int, p: int) -> int:
    # p - 1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1

    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1

    m = s
    c = pow(z, q, p)
    t = pow(n, q, p)
    r = pow(n, (q + 1) // 2, p)

    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


def fe_sqrt(x: FieldElement) -> Optional[Tuple[FieldElement, FieldElement]]:
    """
    Square roots of x modulo p.

    Uses the (p + 1) / 4 exponent when p = 3 (mod 4), Tonelli-Shanks otherwise.

    Returns:
        (r, p - r) with r the smaller root, (0, 0) for zero,
        or None when x is a non-residue
    """
    p = x.p
    if x.value == 0:
        zero = FieldElement(0, p)
        return zero, zero
    if not is_quadratic_residue(x):
        return None

    if p % 4 == 3:
        r = pow(x.value, (p + 1) // 4, p)
    else:
        r = _tonelli_shanks(x.value, p)

    r = min(r, p - r)
    return FieldElement(r, p), FieldElement(p - r, p)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin over a fixed base set."""
    if n < 2:
        return False
    for small in _MR_BASES:
        if n % small == 0:
            return n == small

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Point:
    """
    Affine curve point, or the point at infinity when both coordinates are None.
    """

    x: Optional[FieldElement] = None
    y: Optional[FieldElement] = None

    @classmethod
    def affine(cls, x: int, y: int, p: int) -> "Point":
        return cls(FieldElement(x, p), FieldElement(y, p))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def coords(self) -> Optional[Tuple[int, int]]:
        if self.is_infinity:
            return None
        return self.x.value, self.y.value

    def __repr__(self) -> str:
        if self.is_infinity:
            return "Point(infinity)"
        return f"Point({self.x.value}, {self.y.value})"


INFINITY = Point()


@dataclass(frozen=True)
class CurveParams:
    """
    Domain parameters of a prime-field short-Weierstrass curve.

    Attributes:
        curve_id: Short ASCII label
        p: Odd prime modulus
        a, b: Curve coefficients in [0, p)
        G: Base point
        n: Prime order of G
        h: Cofactor
    """

    curve_id: str
    p: int
    a: int
    b: int
    G: Point = field(repr=False)
    n: int
    h: int = 1

    @property
    def field_width(self) -> int:
        """Bytes needed for one coordinate."""
        return (self.p.bit_length() + 7) // 8

    def rhs(self, x: int) -> int:
        """x^3 + ax + b mod p"""
        return (x * x * x + self.a * x + self.b) % self.p

    def point(self, x: int, y: int) -> Point:
        return Point.affine(x, y, self.p)


def _on_curve(xy: Optional[Tuple[int, int]], c: CurveParams) -> bool:
    if xy is None:
        return True
    x, y = xy
    return (y * y - c.rhs(x)) % c.p == 0


def validate_point(P: Point, c: CurveParams) -> bool:
    """True iff P is Infinity or an affine point satisfying the curve equation."""
    if P.is_infinity:
        return True
    if P.y is None or P.x.p != c.p or P.y.p != c.p:
        return False
    return _on_curve(P.coords(), c)


def _require_on_curve(P: Point, c: CurveParams):
    if not validate_point(P, c):
        raise PointValidationError(f"{P!r} is not on curve {c.curve_id}")


def _add(P: Optional[Tuple[int, int]], Q: Optional[Tuple[int, int]],
         a: int, p: int) -> Optional[Tuple[int, int]]:
    # affine group law on raw coordinates, None is infinity
    if P is None:
        return Q
    if Q is None:
        return P

    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p

    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return x3, y3


def _wrap(xy: Optional[Tuple[int, int]], p: int) -> Point:
    if xy is None:
        return INFINITY
    return Point.affine(xy[0], xy[1], p)


def point_neg(P: Point) -> Point:
    if P.is_infinity:
        return P
    return Point(P.x, fe_neg(P.y))


def point_add(P: Point, Q: Point, c: CurveParams) -> Point:
    """
    Group law: P + Q, including doubling, P + (-P) = Infinity and the identity cases.

    Raises:
        PointValidationError: If either input is off the curve
    """
    _require_on_curve(P, c)
    _require_on_curve(Q, c)
    return _wrap(_add(P.coords(), Q.coords(), c.a, c.p), c.p)


def scalar_mul(k: int, P: Point, c: CurveParams) -> Point:
    """
    k * P by double-and-add (least significant bit first).

    Raises:
        RangeError: If k is negative
        PointValidationError: If P is off the curve
    """
    if k < 0:
        raise RangeError(f"scalar must be non-negative, got {k}")
    _require_on_curve(P, c)

    result = None
    addend = P.coords()
    while k and addend is not None:
        if k & 1:
            result = _add(result, addend, c.a, c.p)
        addend = _add(addend, addend, c.a, c.p)
        k >>= 1
    return _wrap(result, c.p)


# -- parameter files ---------------------------------------------------------

_CURVE_KEYS = ("p", "a", "b", "Gx", "Gy", "n", "h")


def parse_curve(text: str) -> CurveParams:
    """
    Parse a curve parameters file.

    Expected format, one entry per line, values big-endian hex without 0x:
        curve_id = tiny17
        p = 11
        a = 2
        ...

    Lines starting with '#' and blank lines are ignored.

    Raises:
        ParseError: On malformed lines, missing keys, or parameters that
            violate the curve invariants
    """
    values: Dict[str, Union[int, str]] = {}

    for line_num, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue

        key, sep, value = (part.strip() for part in line.partition('='))
        if not sep or not value:
            raise ParseError(f"expected 'key = value', got: {line}", line=line_num)
        if key in values:
            raise ParseError(f"duplicate key '{key}'", line=line_num)

        if key == "curve_id":
            if not value.isascii():
                raise ParseError("curve_id must be ASCII", line=line_num)
            values[key] = value
        elif key in _CURVE_KEYS:
            try:
                values[key] = int(value, 16)
            except ValueError:
                raise ParseError(f"'{key}' is not hex: {value}", line=line_num) from None
        else:
            raise ParseError(f"unknown key '{key}'", line=line_num)

    missing = [k for k in ("curve_id",) + _CURVE_KEYS if k not in values]
    if missing:
        raise ParseError(f"curve file missing keys: {', '.join(missing)}")

    p = values["p"]
    curve = CurveParams(
        curve_id=values["curve_id"],
        p=p,
        a=values["a"],
        b=values["b"],
        G=Point.affine(values["Gx"], values["Gy"], p),
        n=values["n"],
        h=values["h"],
    )
    check_curve(curve)
    return curve


def check_curve(c: CurveParams):
    """
    Raise ParseError unless the domain parameters satisfy every CurveParams invariant.
    """
    p = c.p
    if p <= 3 or p % 2 == 0 or not is_probable_prime(p):
        raise ParseError(f"{c.curve_id}: p must be an odd prime > 3")
    if not (0 <= c.a < p and 0 <= c.b < p):
        raise ParseError(f"{c.curve_id}: a and b must lie in [0, p)")
    if (4 * pow(c.a, 3, p) + 27 * pow(c.b, 2, p)) % p == 0:
        raise ParseError(f"{c.curve_id}: curve is singular")
    if c.h < 1:
        raise ParseError(f"{c.curve_id}: cofactor must be positive")
    if not is_probable_prime(c.n):
        raise ParseError(f"{c.curve_id}: n must be prime")
    if c.G.is_infinity or not validate_point(c.G, c):
        raise ParseError(f"{c.curve_id}: G is not on the curve")
    if not scalar_mul(c.n, c.G, c).is_infinity:
        raise ParseError(f"{c.curve_id}: n * G is not the point at infinity")


def load_curve(filepath) -> CurveParams:
    """
    Read and validate a curve parameters file.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ParseError: If the contents are invalid or not ASCII
    """
    path = Path(filepath)
    try:
        text = path.read_text(encoding="ascii")
    except FileNotFoundError:
        raise FileNotFoundError(f"Curve parameters file not found: {path}")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: curve file is not ASCII", offset=e.start) from None

    curve = parse_curve(text)
    logger.debug("loaded curve %s (%d-bit p) from %s", curve.curve_id, curve.p.bit_length(), path)
    return curve


def dump_curve(c: CurveParams) -> str:
    x, y = c.G.coords()
    fields = [("curve_id", c.curve_id), ("p", c.p), ("a", c.a), ("b", c.b),
              ("Gx", x), ("Gy", y), ("n", c.n), ("h", c.h)]
    lines = []
    for key, value in fields:
        lines.append(f"{key} = {value if isinstance(value, str) else format(value, 'X')}")
    return "\n".join(lines) + "\n"


# -- point encoding ----------------------------------------------------------

POINT_INFINITY_TAG = 0x00
POINT_UNCOMPRESSED_TAG = 0x04


def encode_point(P: Point, c: CurveParams) -> bytes:
    """`04 || x || y` with fixed-width big-endian coordinates, or `00` for infinity."""
    if P.is_infinity:
        return bytes([POINT_INFINITY_TAG])
    width = c.field_width
    x, y = P.coords()
    return bytes([POINT_UNCOMPRESSED_TAG]) + x.to_bytes(width, "big") + y.to_bytes(width, "big")


def decode_point(data: bytes, offset: int, c: CurveParams) -> Tuple[Point, int]:
    """
    Read one encoded point starting at data[offset].

    Returns:
        (point, offset just past it)

    Raises:
        ParseError: On an unknown tag, truncation, or a coordinate >= p
        PointValidationError: If the point is not on the curve
    """
    if offset >= len(data):
        raise ParseError("truncated stream: expected a point", offset=offset)

    tag = data[offset]
    if tag == POINT_INFINITY_TAG:
        return INFINITY, offset + 1
    if tag != POINT_UNCOMPRESSED_TAG:
        raise ParseError(f"unknown point tag 0x{tag:02x}", offset=offset)

    width = c.field_width
    end = offset + 1 + 2 * width
    if end > len(data):
        raise ParseError("truncated stream: point coordinates cut short", offset=offset)

    x = int.from_bytes(data[offset + 1:offset + 1 + width], "big")
    y = int.from_bytes(data[offset + 1 + width:end], "big")
    if x >= c.p or y >= c.p:
        raise ParseError("point coordinate not reduced modulo p", offset=offset)

    P = Point.affine(x, y, c.p)
    if not validate_point(P, c):
        raise PointValidationError(f"point at byte offset {offset} is not on curve {c.curve_id}")
    return P, end
