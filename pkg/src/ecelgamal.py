"""
EC-ElGamal Module

Key generation and point encryption:

    C1 = k*G,  C2 = P_m + k*P_B        (fresh k per call)
    P_m = C2 - d*C1

Key files are plain text, one `key = value` line each:

    private:  curve_id = <id>, d = <hex scalar>
    public:   curve_id = <id>, point = <hex of 04 || x || y>

The private file is created with mode 0600. Keep it off shared storage.
"""

import logging
import os
import random
import secrets
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Protocol, Tuple, Union

from .errors import (
    CurveMismatchError,
    DeccError,
    EntropyError,
    KeyFileError,
    PointValidationError,
    UsageError,
)
from .field_curve import (
    CurveParams,
    Point,
    decode_point,
    encode_point,
    point_add,
    point_neg,
    scalar_mul,
    validate_point,
)

logger = logging.getLogger(__name__)


class RandomSource(Protocol):
    """Anything with random.Random's randrange, e.g. secrets.SystemRandom."""

    def randrange(self, start: int, stop: int) -> int:
        ...


def default_rng() -> RandomSource:
    """Operating-system randomness."""
    return secrets.SystemRandom()


def seeded_rng(seed: int) -> RandomSource:
    """
    Deterministic source for test mode and golden files only. Not for real keys.
    """
    return random.Random(seed)


def draw_scalar(rng: RandomSource, n: int) -> int:
    """
    Uniform scalar in [1, n - 1].

    Raises:
        EntropyError: If the source fails or returns a value outside the range
    """
    try:
        k = rng.randrange(1, n)
    except (OSError, NotImplementedError) as e:
        raise EntropyError(f"randomness source failed: {e}") from e
    if not 1 <= k < n:
        raise EntropyError(f"randomness source returned {k}, outside [1, {n - 1}]")
    return k


@dataclass(frozen=True)
class KeyPair:
    """
    Attributes:
        d: Private scalar in [1, n - 1]
        public: Public point P_B = d*G
    """

    d: int
    public: Point


@dataclass(frozen=True)
class PointCiphertext:
    """C1 = k*G and C2 = P_m + k*P_B."""

    C1: Point
    C2: Point


def keygen(c: CurveParams, rng: Optional[RandomSource] = None) -> KeyPair:
    """
    Draw a private scalar and derive its public point.

    Raises:
        EntropyError: If the randomness source fails
    """
    d = draw_scalar(rng or default_rng(), c.n)
    return KeyPair(d=d, public=scalar_mul(d, c.G, c))


def encrypt_point(P_m: Point, P_B: Point, c: CurveParams,
                  rng: Optional[RandomSource] = None) -> PointCiphertext:
    """
    Encrypt one message point under the public point P_B.

    Raises:
        PointValidationError: If P_m or P_B is off the curve, or P_B is infinity
        EntropyError: If k cannot be drawn
    """
    if not validate_point(P_m, c):
        raise PointValidationError(f"message point {P_m!r} is not on curve {c.curve_id}")
    if P_B.is_infinity or not validate_point(P_B, c):
        raise PointValidationError(f"public point {P_B!r} is not a valid key on {c.curve_id}")

    k = draw_scalar(rng or default_rng(), c.n)
    return encrypt_point_with(P_m, P_B, c, k)


def encrypt_point_with(P_m: Point, P_B: Point, c: CurveParams, k: int) -> PointCiphertext:
    """encrypt_point with an already-drawn k; k = 0 is refused since C2 would equal P_m."""
    if not 1 <= k < c.n:
        raise UsageError(f"ephemeral scalar must lie in [1, n - 1], got {k}")
    return PointCiphertext(
        C1=scalar_mul(k, c.G, c),
        C2=point_add(P_m, scalar_mul(k, P_B, c), c),
    )


def decrypt_point(ct: PointCiphertext, d: int, c: CurveParams) -> Point:
    """
    P_m = C2 - d*C1. A C1 of infinity (k = 0) is accepted and yields C2.

    Raises:
        PointValidationError: If either ciphertext point is off the curve
    """
    shared = scalar_mul(d, ct.C1, c)
    return point_add(ct.C2, point_neg(shared), c)


def add_ciphertexts(ct1: PointCiphertext, ct2: PointCiphertext, c: CurveParams) -> PointCiphertext:
    """Componentwise sum; decrypts to P_m1 + P_m2."""
    return PointCiphertext(
        C1=point_add(ct1.C1, ct2.C1, c),
        C2=point_add(ct1.C2, ct2.C2, c),
    )


# -- key files ---------------------------------------------------------------

def _parse_key_text(text: str, path: Path, expected: Tuple[str, ...]) -> Dict[str, str]:
    values = {}
    for line_num, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = (part.strip() for part in line.partition('='))
        if not sep or key not in expected or key in values:
            raise KeyFileError(f"{path}: unexpected line {line_num}: {line}")
        values[key] = value

    missing = [k for k in expected if k not in values]
    if missing:
        raise KeyFileError(f"{path}: missing {', '.join(missing)}")
    return values


def _read_key_text(filepath: Union[str, Path]) -> Tuple[Path, str]:
    path = Path(filepath)
    try:
        return path, path.read_text(encoding="ascii")
    except FileNotFoundError:
        raise KeyFileError(f"key file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as e:
        raise KeyFileError(f"cannot read key file {path}: {e}") from e


def _open_for_write(path: Path, mode: int, force: bool):
    flags = os.O_WRONLY | os.O_CREAT | os.O_TRUNC
    if not force:
        flags |= os.O_EXCL
    try:
        fd = os.open(path, flags, mode)
    except FileExistsError:
        raise UsageError(f"{path} already exists (use --force to overwrite)") from None
    if force:
        os.chmod(path, mode)
    return os.fdopen(fd, "w", encoding="ascii")


def write_private_key(filepath: Union[str, Path], d: int, c: CurveParams, force: bool = False):
    path = Path(filepath)
    with _open_for_write(path, 0o600, force) as f:
        f.write(f"curve_id = {c.curve_id}\n")
        f.write(f"d = {d:X}\n")
    logger.debug("wrote private key %s", path)


def write_public_key(filepath: Union[str, Path], public: Point, c: CurveParams, force: bool = False):
    path = Path(filepath)
    with _open_for_write(path, 0o644, force) as f:
        f.write(f"curve_id = {c.curve_id}\n")
        f.write(f"point = {encode_point(public, c).hex().upper()}\n")
    logger.debug("wrote public key %s", path)


def read_private_key(filepath: Union[str, Path], c: CurveParams) -> int:
    """
    Raises:
        KeyFileError: If the file is unreadable or malformed, or d is out of range
        CurveMismatchError: If the key belongs to a different curve
    """
    path, text = _read_key_text(filepath)
    values = _parse_key_text(text, path, ("curve_id", "d"))
    if values["curve_id"] != c.curve_id:
        raise CurveMismatchError(
            f"{path}: key is for curve '{values['curve_id']}', not '{c.curve_id}'"
        )
    try:
        d = int(values["d"], 16)
    except ValueError:
        raise KeyFileError(f"{path}: d is not hex") from None
    if not 1 <= d < c.n:
        raise KeyFileError(f"{path}: private scalar outside [1, n - 1]")
    return d


def read_public_key(filepath: Union[str, Path], c: CurveParams) -> Point:
    """
    Raises:
        KeyFileError: If the file is malformed or the point is invalid
        CurveMismatchError: If the key belongs to a different curve
    """
    path, text = _read_key_text(filepath)
    values = _parse_key_text(text, path, ("curve_id", "point"))
    if values["curve_id"] != c.curve_id:
        raise CurveMismatchError(
            f"{path}: key is for curve '{values['curve_id']}', not '{c.curve_id}'"
        )
    try:
        raw = bytes.fromhex(values["point"])
        point, end = decode_point(raw, 0, c)
    except (ValueError, DeccError) as e:
        raise KeyFileError(f"{path}: invalid public point: {e}") from e
    if end != len(raw) or point.is_infinity:
        raise KeyFileError(f"{path}: invalid public point")
    return point
