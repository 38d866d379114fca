"""
DNA Codec Module

Nucleotide <-> binary conversion and the insertion method over a shared
reference sequence.

Conversion table:
    A -> 00    T -> 01    G -> 10    C -> 11

Insertion method: the reference's bit stream is cut into consecutive segments
of r bits, and plaintext bit i is prepended to segment i. Since r is odd, every
(r + 1)-bit segment maps back to whole nucleotides. Decoding takes the first bit
of each segment and checks the remaining r bits against the reference, so any
change to a reference-carried bit is reported as tampering. Plaintext-carried
bits are not authenticated.
"""

import logging
import re
from dataclasses import dataclass
from typing import Union

from .errors import (
    AlphabetError,
    CapacityError,
    EmptyInputError,
    FramingError,
    ParseError,
    RangeError,
    SequenceMismatchError,
    TamperDetectedError,
)

logger = logging.getLogger(__name__)

# Ordered '0'/'1' characters, MSB first when derived from bytes.
BitString = str

NUCLEOTIDE_TO_BITS = {"A": "00", "T": "01", "G": "10", "C": "11"}
BITS_TO_NUCLEOTIDE = {bits: base for base, bits in NUCLEOTIDE_TO_BITS.items()}

_TO_BITS = str.maketrans(NUCLEOTIDE_TO_BITS)
_INVALID_BASE = re.compile(r"[^ACGT]")
_INVALID_BIT = re.compile(r"[^01]")


def check_bases(bases: str) -> str:
    """
    Raise AlphabetError naming the first character outside {A, C, G, T}.
    """
    bad = _INVALID_BASE.search(bases)
    if bad:
        raise AlphabetError(
            f"invalid nucleotide {bad.group()!r} at position {bad.start()}"
        )
    return bases


@dataclass(frozen=True)
class DnaSequence:
    """
    Identified nucleotide string. Bases are stored uppercase.

    Attributes:
        seq_id: ASCII identifier
        bases: Nonempty string over {A, C, G, T}
        source: Free-text provenance note
    """

    seq_id: str
    bases: str
    source: str = ""

    def __post_init__(self):
        bases = self.bases.upper()
        if not bases:
            raise EmptyInputError(f"sequence '{self.seq_id}' has no bases")
        object.__setattr__(self, "bases", check_bases(bases))

    def __len__(self) -> int:
        return len(self.bases)


@dataclass(frozen=True)
class InsertionParams:
    """
    Attributes:
        r: Reference bits per segment; odd and at least 3
        seq_id: Identifier of the shared reference sequence
    """

    r: int
    seq_id: str = ""

    def __post_init__(self):
        if self.r < 3 or self.r % 2 == 0:
            raise RangeError(f"segment length r must be odd and >= 3, got {self.r}")

    @property
    def segment_bases(self) -> int:
        """Nucleotides per encoded segment."""
        return (self.r + 1) // 2


def _bases_of(d: Union[DnaSequence, str]) -> str:
    if isinstance(d, DnaSequence):
        return d.bases
    return check_bases(d)


def bases_to_bits(d: Union[DnaSequence, str]) -> BitString:
    """
    Convert nucleotides to bits, two per base.

    Raises:
        AlphabetError: If a character is not one of A, C, G, T
    """
    return _bases_of(d).translate(_TO_BITS)


def bits_to_bases(b: BitString) -> str:
    """
    Inverse of bases_to_bits.

    Raises:
        FramingError: If the bit count is odd
        ParseError: If a character is not '0' or '1'
    """
    if len(b) % 2:
        raise FramingError(f"bit string of odd length {len(b)} cannot map to nucleotides")
    bad = _INVALID_BIT.search(b)
    if bad:
        raise ParseError(f"invalid bit {bad.group()!r} at position {bad.start()}")
    return "".join([BITS_TO_NUCLEOTIDE[b[i:i + 2]] for i in range(0, len(b), 2)])


def bytes_to_bits(data: bytes) -> BitString:
    """MSB-first bits of a byte string."""
    if not data:
        return ""
    return format(int.from_bytes(data, "big"), f"0{8 * len(data)}b")


def bits_to_bytes(b: BitString) -> bytes:
    if len(b) % 8:
        raise FramingError(f"bit length {len(b)} is not a whole number of bytes")
    if not b:
        return b""
    return int(b, 2).to_bytes(len(b) // 8, "big")


def reference_capacity(ref: DnaSequence, r: int) -> int:
    """Plaintext bits the reference can carry with segment length r."""
    return 2 * len(ref.bases) // r


def encoded_length(n_bits: int, r: int) -> int:
    """Nucleotides produced by insertion-encoding n_bits plaintext bits."""
    return n_bits * (r + 1) // 2


def _check_reference(ref: DnaSequence, ip: InsertionParams):
    if ip.seq_id and ref.seq_id != ip.seq_id:
        raise SequenceMismatchError(
            f"reference '{ref.seq_id}' given where '{ip.seq_id}' was expected"
        )


def insertion_encode(plain: BitString, ref: DnaSequence, ip: InsertionParams) -> str:
    """
    Hide plaintext bits in the reference sequence.

    Args:
        plain: Plaintext bits
        ref: Shared reference sequence
        ip: Segment length and reference identifier

    Returns:
        Encoded nucleotides, len(plain) * (r + 1) / 2 of them

    Raises:
        CapacityError: If the reference has fewer than len(plain) * r bits;
            reference bits are never reused
    """
    _check_reference(ref, ip)
    r = ip.r
    n = len(plain)
    if _INVALID_BIT.search(plain):
        raise ParseError("plaintext bit string contains characters other than 0/1")

    ref_bits = bases_to_bits(ref)
    needed = n * r
    if len(ref_bits) < needed:
        raise CapacityError(
            f"reference '{ref.seq_id}' carries {len(ref_bits) // r} plaintext bits "
            f"at r={r}, {n} needed"
        )

    logger.debug("insertion encode: %d bits into %d/%d reference bits", n, needed, len(ref_bits))
    encoded = "".join([plain[i] + ref_bits[i * r:(i + 1) * r] for i in range(n)])
    return bits_to_bases(encoded)


def insertion_decode(enc: str, ref: DnaSequence, ip: InsertionParams) -> BitString:
    """
    Recover plaintext bits and verify every reference-carried bit.

    Raises:
        FramingError: If len(enc) is not a multiple of (r + 1) / 2
        TamperDetectedError: If any segment disagrees with the reference
    """
    _check_reference(ref, ip)
    r = ip.r
    seg = r + 1
    if len(enc) % ip.segment_bases:
        raise FramingError(
            f"{len(enc)} encoded bases is not a multiple of the segment size {ip.segment_bases}"
        )

    bits = bases_to_bits(enc)
    n = len(bits) // seg
    ref_bits = bases_to_bits(ref)
    if len(ref_bits) < n * r:
        raise TamperDetectedError(
            f"encoded stream holds {n} segments but reference '{ref.seq_id}' supports "
            f"{len(ref_bits) // r}"
        )

    carried = "".join([bits[i + 1:i + seg] for i in range(0, len(bits), seg)])
    expected = ref_bits[:n * r]
    if carried != expected:
        first = next(i for i in range(n) if carried[i * r:(i + 1) * r] != expected[i * r:(i + 1) * r])
        raise TamperDetectedError(
            f"segment {first} does not match reference '{ref.seq_id}'"
        )

    return bits[::seg]
