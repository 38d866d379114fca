"""
Sequence Store Module

Ingests FASTA files and serves reference sequences by identifier so that
sender and receiver can agree on the same reference.

Store layout:
    <store_dir>/<seq_id>.fasta    one record per file
    <store_dir>/index.tsv         seq_id, length, fingerprint (SHA-256 hex)
"""

import csv
import hashlib
import io
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Tuple, Union

from .dna_codec import DnaSequence
from .errors import (
    AlphabetError,
    ConflictError,
    EmptyInputError,
    ParseError,
    SequenceMismatchError,
    SequenceNotFoundError,
)

logger = logging.getLogger(__name__)

INDEX_NAME = "index.tsv"
INDEX_FIELDS = ["seq_id", "length", "fingerprint"]
FASTA_WIDTH = 60

_SEQ_ID = re.compile(r"^[A-Za-z0-9._-]+$")
_INVALID_BASE = re.compile(r"[^ACGT]")


def fingerprint(bases: str) -> bytes:
    """SHA-256 of the uppercase base string."""
    return hashlib.sha256(bases.upper().encode("ascii")).digest()


@dataclass(frozen=True)
class SequenceRecord:
    """
    A stored reference sequence.

    Attributes:
        seq_id: Identifier, unique within a store
        sequence: The validated sequence
        fingerprint: 32-byte SHA-256 of the bases
        length: Base count
    """

    seq_id: str
    sequence: DnaSequence
    fingerprint: bytes
    length: int

    @classmethod
    def from_sequence(cls, sequence: DnaSequence) -> "SequenceRecord":
        return cls(
            seq_id=sequence.seq_id,
            sequence=sequence,
            fingerprint=fingerprint(sequence.bases),
            length=len(sequence.bases),
        )

    @property
    def bases(self) -> str:
        return self.sequence.bases


def import_fasta(text: Union[str, TextIO]) -> List[SequenceRecord]:
    """
    Parse FASTA records.

    Expected format:
        >SEQ_ID optional description
        SEQUENCE LINES
        >SEQ_ID2
        ...

    The first whitespace-delimited header token is the seq_id, the rest is kept
    as the provenance note. Sequence lines are concatenated, uppercased and
    stripped of whitespace.

    Args:
        text: FASTA content or an open text stream

    Returns:
        List of SequenceRecord in file order

    Raises:
        EmptyInputError: If there are no records, or a record has no bases
        AlphabetError: If a sequence line holds a non-ACGT character
        ConflictError: If a seq_id repeats
        ParseError: On sequence data before the first header or a bad seq_id
    """
    stream = io.StringIO(text) if isinstance(text, str) else text

    records: List[SequenceRecord] = []
    seen: Dict[str, int] = {}
    current: Optional[Tuple[str, str, int]] = None
    chunks: List[str] = []

    def finish():
        seq_id, source, header_line = current
        if not chunks:
            raise EmptyInputError(f"record '{seq_id}' has no sequence", line=header_line)
        records.append(SequenceRecord.from_sequence(
            DnaSequence(seq_id=seq_id, bases="".join(chunks), source=source)
        ))

    for line_num, line in enumerate(stream, 1):
        line = line.strip()

        # Skip empty lines and comments
        if not line or line.startswith(';'):
            continue

        if line.startswith('>'):
            if current is not None:
                finish()

            parts = line[1:].split(None, 1)
            if not parts:
                raise ParseError("header has no identifier", line=line_num)
            seq_id = parts[0]
            if not _SEQ_ID.match(seq_id):
                raise ParseError(
                    f"seq_id '{seq_id}' may only contain letters, digits, '.', '_' and '-'",
                    line=line_num,
                )
            if seq_id in seen:
                raise ConflictError(
                    f"duplicate seq_id '{seq_id}' (first defined at line {seen[seq_id]})",
                    line=line_num,
                )
            seen[seq_id] = line_num
            current = (seq_id, parts[1] if len(parts) > 1 else "", line_num)
            chunks = []
        else:
            if current is None:
                raise ParseError("sequence data before the first '>' header", line=line_num)
            bases = "".join(line.split()).upper()
            bad = _INVALID_BASE.search(bases)
            if bad:
                raise AlphabetError(f"invalid nucleotide {bad.group()!r}", line=line_num)
            chunks.append(bases)

    if current is not None:
        finish()

    if not records:
        raise EmptyInputError("no FASTA records found")
    return records


def format_fasta(record: SequenceRecord) -> str:
    header = f">{record.seq_id}"
    if record.sequence.source:
        header += f" {record.sequence.source}"
    bases = record.bases
    lines = [bases[i:i + FASTA_WIDTH] for i in range(0, len(bases), FASTA_WIDTH)]
    return header + "\n" + "\n".join(lines) + "\n"


def read_fasta_text(path: Path) -> str:
    """
    Read a UTF-8 text file.

    Raises:
        ParseError: If the bytes are not valid UTF-8, with the offset of the first bad byte
    """
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 text", offset=e.start) from None


class SequenceStore:
    """
    Directory of FASTA files plus index.tsv.

    Reads are safe from many threads once loaded; imports are single-writer.
    """

    def __init__(self, store_dir: Union[str, Path]):
        self.store_dir = Path(store_dir)
        self._records: Dict[str, SequenceRecord] = {}
        if self.index_path.exists():
            self.load()

    @property
    def index_path(self) -> Path:
        return self.store_dir / INDEX_NAME

    def _fasta_path(self, seq_id: str) -> Path:
        return self.store_dir / f"{seq_id}.fasta"

    def _read_index(self) -> List[dict]:
        try:
            with open(self.index_path, 'r', newline='', encoding='utf-8') as f:
                reader = csv.DictReader(f, delimiter='\t')
                if reader.fieldnames != INDEX_FIELDS:
                    raise ParseError(f"{self.index_path}: expected columns {INDEX_FIELDS}")
                return list(reader)
        except UnicodeDecodeError:
            raise ParseError(f"{self.index_path} is not UTF-8 text") from None

    def load(self):
        """
        Read the index and every sequence it lists.

        Raises:
            SequenceMismatchError: If a file's contents disagree with its index entry
        """
        records = {}
        for row in self._read_index():
            seq_id = row["seq_id"]
            record = self._read_record(seq_id)
            if record.fingerprint.hex() != row["fingerprint"] or record.length != int(row["length"]):
                raise SequenceMismatchError(
                    f"{self._fasta_path(seq_id)} does not match its index entry"
                )
            records[seq_id] = record

        self._records = records
        logger.debug("loaded %d sequences from %s", len(records), self.store_dir)

    def _read_record(self, seq_id: str) -> SequenceRecord:
        path = self._fasta_path(seq_id)
        try:
            found = import_fasta(read_fasta_text(path))
        except FileNotFoundError:
            raise SequenceNotFoundError(f"index lists '{seq_id}' but {path} is missing")

        if len(found) != 1 or found[0].seq_id != seq_id:
            raise ParseError(f"{path} must hold exactly one record named '{seq_id}'")
        return found[0]

    def _write_index(self):
        with open(self.index_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=INDEX_FIELDS, delimiter='\t')
            writer.writeheader()
            for record in self.list():
                writer.writerow({
                    "seq_id": record.seq_id,
                    "length": record.length,
                    "fingerprint": record.fingerprint.hex(),
                })

    def add(self, records: Iterable[SequenceRecord], replace: bool = False) -> List[SequenceRecord]:
        """
        Write records into the store and rewrite the index.

        Raises:
            ConflictError: If a seq_id already exists and replace is False
        """
        records = list(records)
        if not replace:
            for record in records:
                if record.seq_id in self._records:
                    raise ConflictError(f"seq_id '{record.seq_id}' already in store")

        self.store_dir.mkdir(parents=True, exist_ok=True)
        for record in records:
            self._fasta_path(record.seq_id).write_text(format_fasta(record), encoding="utf-8")
            self._records[record.seq_id] = record
        self._write_index()

        logger.info("stored %d sequence(s) in %s", len(records), self.store_dir)
        return records

    def import_file(self, filepath: Union[str, Path], replace: bool = False) -> List[SequenceRecord]:
        try:
            text = read_fasta_text(Path(filepath))
        except FileNotFoundError:
            raise FileNotFoundError(f"FASTA file not found: {filepath}") from None
        records = import_fasta(text)
        return self.add(records, replace=replace)

    def get(self, seq_id: str) -> SequenceRecord:
        try:
            return self._records[seq_id]
        except KeyError:
            raise SequenceNotFoundError(f"no sequence '{seq_id}' in {self.store_dir}") from None

    def find_by_fingerprint(self, digest: bytes) -> Optional[SequenceRecord]:
        for record in self._records.values():
            if record.fingerprint == digest:
                return record
        return None

    def list(self) -> List[SequenceRecord]:
        return [self._records[k] for k in sorted(self._records)]

    def verify(self) -> List[Tuple[str, bool]]:
        """
        Recompute each file's fingerprint and compare it with the index.

        Returns:
            (seq_id, ok) per index entry
        """
        if not self.index_path.exists():
            return []

        results = []
        for row in self._read_index():
            try:
                record = self._read_record(row["seq_id"])
                ok = record.fingerprint.hex() == row["fingerprint"]
            except (SequenceNotFoundError, ParseError):
                ok = False
            results.append((row["seq_id"], ok))
        return results

    def __contains__(self, seq_id: str) -> bool:
        return seq_id in self._records

    def __len__(self) -> int:
        return len(self._records)


def get_sequence(store: SequenceStore, seq_id: str) -> SequenceRecord:
    """
    Look up a record by identifier.

    Raises:
        SequenceNotFoundError: If the store has no such sequence
    """
    return store.get(seq_id)
