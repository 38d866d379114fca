"""
Koblitz Embedding Module

Maps block integers to curve points and back. An integer m becomes the first
point whose x-coordinate is m*K + j (j = 0, 1, ..., K-1) with x^3 + ax + b a
quadratic residue; y is the smaller of the two roots, so the mapping is
deterministic. Decoding is floor(x / K).
"""

import logging
from dataclasses import dataclass

from .errors import EmbeddingError, RangeError
from .field_curve import CurveParams, FieldElement, Point, fe_sqrt

logger = logging.getLogger(__name__)

DEFAULT_K = 256


@dataclass(frozen=True)
class KoblitzParams:
    """
    Attributes:
        K: Embedding multiplier; each message has K candidate x-coordinates
        max_message: Largest embeddable integer, floor((p - 1) / K) - 1
    """

    K: int
    max_message: int

    def __post_init__(self):
        if self.K < 2:
            raise RangeError(f"Koblitz multiplier K must be >= 2, got {self.K}")
        if self.max_message < 1:
            raise RangeError(f"K={self.K} leaves no embeddable messages on this curve")

    @classmethod
    def for_curve(cls, c: CurveParams, K: int = DEFAULT_K) -> "KoblitzParams":
        return cls(K=K, max_message=(c.p - 1) // K - 1)


def encode_to_point(m: int, c: CurveParams, kp: KoblitzParams) -> Point:
    """
    Embed m into a curve point.

    Args:
        m: Integer in [0, kp.max_message]
        c: Curve parameters
        kp: Embedding parameters for this curve

    Returns:
        Affine point (x, y) with floor(x / K) == m

    Raises:
        RangeError: If m is outside [0, max_message]
        EmbeddingError: If none of the K candidates has a square right-hand side
            (probability about 2^-K)
    """
    if not 0 <= m <= kp.max_message:
        raise RangeError(f"message {m} outside embeddable range [0, {kp.max_message}]")

    base = m * kp.K
    for j in range(kp.K):
        x = base + j
        roots = fe_sqrt(FieldElement(c.rhs(x), c.p))
        if roots is not None:
            return Point(FieldElement(x, c.p), roots[0])

    logger.warning("Koblitz embedding failed for m=%d with K=%d", m, kp.K)
    raise EmbeddingError(f"no curve point among {kp.K} candidates for message {m}")


def decode_from_point(P: Point, kp: KoblitzParams) -> int:
    """
    Recover the embedded integer, floor(x / K).

    Raises:
        RangeError: If P is the point at infinity
    """
    if P.is_infinity:
        raise RangeError("the point at infinity carries no message")
    return P.x.value // kp.K
