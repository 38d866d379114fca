"""
Pipeline Module

End-to-end byte encryption:

    bytes -> bits (MSB first) -> insertion encoding over the reference
          -> blocks of B nucleotides -> block integers (big-endian over 2B bits,
             short final block zero-padded) -> Koblitz points
          -> EC-ElGamal point pairs (fresh k per block)

and the exact inverse. Decryption checks the reference fingerprint before any
point work and the reference-carried bits while decoding the DNA layer.

Wire format (multi-byte integers big-endian):
    magic "DECC" | version u8 | curve_id (u8 length + ASCII)
    | seq fingerprint 32 bytes | r u8 | K u32 | B u16
    | plaintext_bit_length u64 | block count u32
    | per block: C1, C2 each `04 || x || y` or `00` for infinity

The format carries no MAC. Only reference-carried bits are authenticated.
"""

import logging
import re
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Tuple

from .dna_codec import (
    BitString,
    DnaSequence,
    InsertionParams,
    bases_to_bits,
    bits_to_bases,
    bits_to_bytes,
    bytes_to_bits,
    encoded_length,
    insertion_decode,
    insertion_encode,
)
from .ecelgamal import (
    PointCiphertext,
    RandomSource,
    decrypt_point,
    default_rng,
    draw_scalar,
    encrypt_point_with,
)
from .errors import (
    CurveMismatchError,
    FramingError,
    ParseError,
    PointValidationError,
    RangeError,
    SequenceMismatchError,
    UsageError,
)
from .field_curve import CurveParams, Point, decode_point, encode_point, validate_point
from .koblitz import KoblitzParams, decode_from_point, encode_to_point
from .seq_store import SequenceStore, fingerprint

logger = logging.getLogger(__name__)

MAGIC = b"DECC"
VERSION = 1
FINGERPRINT_SIZE = 32
# magic, version byte, curve_id length byte
CURVE_ID_OFFSET = len(MAGIC) + 2

_CURVE_ID = re.compile(r"[A-Za-z0-9._-]+")

# fingerprint, r, K, B, plaintext_bit_length, block count
_HEADER_TAIL = struct.Struct(">32sBIHQI")


@dataclass(frozen=True)
class PipelineParams:
    """
    Attributes:
        curve: Curve the blocks are embedded in
        seq_id: Reference sequence identifier
        r: Insertion segment length in bits (odd, >= 3)
        K: Koblitz multiplier
        B: Block size in nucleotides

    Every block integer (< 2^(2B)) must be embeddable, i.e.
    2^(2B) - 1 <= floor((p - 1) / K) - 1.
    """

    curve: CurveParams = field(repr=False)
    seq_id: str
    r: int = 3
    K: int = 256
    B: int = 120

    def __post_init__(self):
        InsertionParams(self.r, self.seq_id)
        if not 1 <= self.B <= 0xFFFF:
            raise RangeError(f"block size B must lie in [1, 65535], got {self.B}")
        if self.r > 0xFF or self.K > 0xFFFFFFFF:
            raise RangeError("r or K too large for the wire format")
        kp = self.koblitz
        if (1 << (2 * self.B)) - 1 > kp.max_message:
            raise RangeError(
                f"B={self.B} needs {2 * self.B}-bit block integers but curve "
                f"{self.curve.curve_id} with K={self.K} embeds at most "
                f"{kp.max_message.bit_length()} bits"
            )

    @property
    def curve_id(self) -> str:
        return self.curve.curve_id

    @property
    def koblitz(self) -> KoblitzParams:
        return KoblitzParams.for_curve(self.curve, self.K)

    @property
    def insertion(self) -> InsertionParams:
        return InsertionParams(self.r, self.seq_id)


@dataclass(frozen=True)
class CiphertextHeader:
    curve_id: str
    seq_fingerprint: bytes
    r: int
    K: int
    B: int
    plaintext_bit_length: int
    version: int = VERSION


@dataclass(frozen=True)
class Ciphertext:
    header: CiphertextHeader
    blocks: Tuple[PointCiphertext, ...] = ()


class DnaLayer(Protocol):
    def encode(self, bits: BitString) -> str:
        ...

    def decode(self, bases: str) -> BitString:
        ...

    def encoded_length(self, n_bits: int) -> int:
        ...


class InsertionLayer:
    """Insertion method over a shared reference (the default layer)."""

    def __init__(self, reference: DnaSequence, r: int):
        self.reference = reference
        self.params = InsertionParams(r, reference.seq_id)

    def encode(self, bits: BitString) -> str:
        return insertion_encode(bits, self.reference, self.params)

    def decode(self, bases: str) -> BitString:
        return insertion_decode(bases, self.reference, self.params)

    def encoded_length(self, n_bits: int) -> int:
        return encoded_length(n_bits, self.params.r)


class IdentityLayer:
    """
    Plain nucleotide mapping with no reference. For tests that isolate the
    Koblitz and ElGamal stages; it hides nothing.
    """

    def encode(self, bits: BitString) -> str:
        return bits_to_bases(bits)

    def decode(self, bases: str) -> BitString:
        return bases_to_bits(bases)

    def encoded_length(self, n_bits: int) -> int:
        return n_bits // 2


# -- block conversion --------------------------------------------------------

def split_blocks(bases: str, B: int) -> List[str]:
    return [bases[i:i + B] for i in range(0, len(bases), B)]


def block_to_int(block: str, B: int) -> int:
    """Big-endian integer of the block's bits, zero-padded on the right to 2B bits."""
    bits = bases_to_bits(block)
    return int(bits.ljust(2 * B, "0"), 2)


def int_to_block(m: int, length: int, B: int) -> str:
    """
    Inverse of block_to_int for a block of `length` nucleotides.

    Raises:
        FramingError: If m does not fit in 2B bits or its padding bits are set
    """
    width = 2 * B
    if m >> width:
        raise FramingError(f"block integer exceeds {width} bits")
    bits = format(m, f"0{width}b")
    if "1" in bits[2 * length:]:
        raise FramingError("nonzero padding in final block")
    return bits_to_bases(bits[:2 * length])


def _encrypt_block(job) -> PointCiphertext:
    m, public, curve, kp, k = job
    return encrypt_point_with(encode_to_point(m, curve, kp), public, curve, k)


def _decrypt_block(job) -> Point:
    block, d, curve = job
    return decrypt_point(block, d, curve)


def _run(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(job) for job in jobs]


# -- encryption --------------------------------------------------------------

def encrypt_with_reference(plain: bytes, public: Point, params: PipelineParams,
                           reference: DnaSequence, rng: Optional[RandomSource] = None,
                           layer: Optional[DnaLayer] = None, workers: int = 1) -> Ciphertext:
    """
    Encrypt bytes against an in-memory reference sequence.

    Args:
        plain: Plaintext bytes
        public: Receiver's public point
        params: Pipeline parameters
        reference: Shared reference sequence
        rng: Source for the per-block k (system randomness by default)
        layer: DNA layer override; InsertionLayer(reference, r) by default
        workers: Processes for block encryption; k values are drawn serially first

    Raises:
        CapacityError: If the reference is too short
        PointValidationError: If the public point is invalid
        EntropyError: If k cannot be drawn
    """
    curve = params.curve
    if public.is_infinity or not validate_point(public, curve):
        raise PointValidationError(f"public point is not a valid key on {curve.curve_id}")

    layer = layer or InsertionLayer(reference, params.r)
    rng = rng or default_rng()

    bits = bytes_to_bits(plain)
    bases = layer.encode(bits)
    blocks = split_blocks(bases, params.B)
    logger.debug("encrypting %d bytes: %d encoded bases, %d blocks", len(plain), len(bases), len(blocks))

    kp = params.koblitz
    ks = [draw_scalar(rng, curve.n) for _ in blocks]
    jobs = [(block_to_int(block, params.B), public, curve, kp, k) for block, k in zip(blocks, ks)]
    point_blocks = _run(_encrypt_block, jobs, workers)

    header = CiphertextHeader(
        curve_id=curve.curve_id,
        seq_fingerprint=fingerprint(reference.bases),
        r=params.r,
        K=params.K,
        B=params.B,
        plaintext_bit_length=len(bits),
    )
    return Ciphertext(header=header, blocks=tuple(point_blocks))


def encrypt_bytes(plain: bytes, public: Point, params: PipelineParams, store: SequenceStore,
                  rng: Optional[RandomSource] = None, workers: int = 1) -> Ciphertext:
    """
    Encrypt bytes using the reference params.seq_id from the store.

    Raises:
        SequenceNotFoundError: If the store lacks the reference
        CapacityError, PointValidationError, EntropyError: see encrypt_with_reference
    """
    record = store.get(params.seq_id)
    return encrypt_with_reference(plain, public, params, record.sequence, rng=rng, workers=workers)


# -- decryption --------------------------------------------------------------

def _params_from_header(header: CiphertextHeader, curve: CurveParams, seq_id: str) -> PipelineParams:
    try:
        return PipelineParams(curve=curve, seq_id=seq_id, r=header.r, K=header.K, B=header.B)
    except UsageError as e:
        raise FramingError(f"header parameters are invalid: {e}") from e


def decrypt_with_reference(ct: Ciphertext, d: int, curve: CurveParams, reference: DnaSequence,
                           layer: Optional[DnaLayer] = None, workers: int = 1) -> bytes:
    """
    Decrypt against an in-memory reference sequence.

    Raises:
        CurveMismatchError: If the ciphertext was made for another curve
        SequenceMismatchError: If the reference fingerprint differs from the header's
        FramingError: On block-count, bit-length or block-integer inconsistencies
        PointValidationError: If a ciphertext point is off the curve
        TamperDetectedError: If reference-carried bits disagree with the reference
    """
    header = ct.header
    if header.curve_id != curve.curve_id:
        raise CurveMismatchError(
            f"ciphertext is for curve '{header.curve_id}', key is for '{curve.curve_id}'"
        )
    if header.seq_fingerprint != fingerprint(reference.bases):
        raise SequenceMismatchError(
            f"reference '{reference.seq_id}' does not match the ciphertext's sequence fingerprint"
        )

    params = _params_from_header(header, curve, reference.seq_id)
    layer = layer or InsertionLayer(reference, params.r)

    n_bits = header.plaintext_bit_length
    if n_bits % 8:
        raise FramingError(f"plaintext bit length {n_bits} is not a whole number of bytes")
    n_bases = layer.encoded_length(n_bits)
    expected_blocks = -(-n_bases // params.B)
    if len(ct.blocks) != expected_blocks:
        raise FramingError(
            f"{len(ct.blocks)} blocks in ciphertext, {expected_blocks} expected "
            f"for {n_bits} plaintext bits"
        )

    points = _run(_decrypt_block, [(block, d, curve) for block in ct.blocks], workers)

    kp = params.koblitz
    chunks = []
    for i, P_m in enumerate(points):
        if P_m.is_infinity:
            raise FramingError(f"block {i} decrypts to the point at infinity")
        length = min(params.B, n_bases - i * params.B)
        chunks.append(int_to_block(decode_from_point(P_m, kp), length, params.B))

    bits = layer.decode("".join(chunks))
    if len(bits) != n_bits:
        raise FramingError(f"decoded {len(bits)} bits, header says {n_bits}")
    return bits_to_bytes(bits)


def decrypt_bytes(ct: Ciphertext, d: int, store: SequenceStore, curve: CurveParams,
                  seq_id: Optional[str] = None, workers: int = 1) -> bytes:
    """
    Decrypt with the reference found in the store.

    The reference is located by the header's fingerprint, or taken by seq_id
    when given (and then must match the fingerprint).

    Raises:
        SequenceMismatchError: If no stored sequence matches the fingerprint
        (plus everything decrypt_with_reference raises)
    """
    if seq_id is not None:
        record = store.get(seq_id)
    else:
        record = store.find_by_fingerprint(ct.header.seq_fingerprint)
        if record is None:
            raise SequenceMismatchError(
                f"no sequence in {store.store_dir} matches fingerprint "
                f"{ct.header.seq_fingerprint.hex()[:16]}..."
            )
    return decrypt_with_reference(ct, d, curve, record.sequence, workers=workers)


# -- wire format -------------------------------------------------------------

def serialize(ct: Ciphertext, curve: CurveParams) -> bytes:
    header = ct.header
    if header.curve_id != curve.curve_id:
        raise CurveMismatchError(f"ciphertext is for '{header.curve_id}', not '{curve.curve_id}'")
    curve_id = header.curve_id.encode("ascii")
    if len(curve_id) > 0xFF:
        raise RangeError("curve_id longer than 255 bytes")

    out = bytearray(MAGIC)
    out.append(header.version)
    out.append(len(curve_id))
    out += curve_id
    out += _HEADER_TAIL.pack(
        header.seq_fingerprint, header.r, header.K, header.B,
        header.plaintext_bit_length, len(ct.blocks),
    )
    for block in ct.blocks:
        out += encode_point(block.C1, curve)
        out += encode_point(block.C2, curve)
    return bytes(out)


def read_header(data: bytes) -> Tuple[CiphertextHeader, int, int]:
    """
    Parse the fixed part of a serialized ciphertext.

    Returns:
        (header, block count, offset of the first block)

    Raises:
        ParseError: On bad magic, unsupported version, a malformed curve_id or truncation
    """
    if len(data) < len(MAGIC) or data[:len(MAGIC)] != MAGIC:
        raise ParseError("bad magic, not a DECC ciphertext", offset=0)
    offset = len(MAGIC)

    if len(data) <= offset:
        raise ParseError("truncated stream: missing version", offset=offset)
    version = data[offset]
    if version != VERSION:
        raise ParseError(f"unsupported version {version}", offset=offset)
    offset += 1

    if len(data) <= offset:
        raise ParseError("truncated stream: missing curve_id length", offset=offset)
    id_len = data[offset]
    offset += 1
    if len(data) < offset + id_len:
        raise ParseError("truncated stream: curve_id cut short", offset=offset)
    try:
        curve_id = data[offset:offset + id_len].decode("ascii")
    except UnicodeDecodeError:
        raise ParseError("curve_id is not ASCII", offset=offset) from None
    if not _CURVE_ID.fullmatch(curve_id):
        raise ParseError(f"invalid curve_id {curve_id!r}", offset=offset)
    offset += id_len

    if len(data) < offset + _HEADER_TAIL.size:
        raise ParseError("truncated stream: header cut short", offset=offset)
    fp, r, K, B, n_bits, n_blocks = _HEADER_TAIL.unpack_from(data, offset)
    offset += _HEADER_TAIL.size

    header = CiphertextHeader(
        curve_id=curve_id, seq_fingerprint=fp, r=r, K=K, B=B,
        plaintext_bit_length=n_bits, version=version,
    )
    return header, n_blocks, offset


def deserialize(data: bytes, curve: CurveParams) -> Ciphertext:
    """
    Parse a serialized ciphertext for the given curve.

    Raises:
        ParseError: On malformed or truncated input, with the byte offset
        CurveMismatchError: If the header names another curve
        PointValidationError: If a block point is off the curve
    """
    header, n_blocks, offset = read_header(data)
    if header.curve_id != curve.curve_id:
        raise CurveMismatchError(f"ciphertext is for '{header.curve_id}', not '{curve.curve_id}'")

    # each block is at least two infinity tags
    if n_blocks > (len(data) - offset) // 2:
        raise ParseError(f"truncated stream: {n_blocks} blocks announced", offset=offset)

    blocks = []
    for _ in range(n_blocks):
        C1, offset = decode_point(data, offset, curve)
        C2, offset = decode_point(data, offset, curve)
        blocks.append(PointCiphertext(C1, C2))

    if offset != len(data):
        raise ParseError(f"{len(data) - offset} trailing bytes after last block", offset=offset)
    return Ciphertext(header=header, blocks=tuple(blocks))
