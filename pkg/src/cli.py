"""
Command-Line Interface

Subcommands:
    keygen       write <prefix>.priv and <prefix>.pub
    encrypt      encrypt a file for a public key with a stored reference sequence
    decrypt      decrypt a ciphertext file with a private key
    inspect      print a ciphertext header
    seq import   add FASTA records to the sequence store
    seq list     print the store index
    seq verify   recompute stored fingerprints
    bench        timing report

Exit codes: 0 ok, 1 unexpected failure, 2 usage, 3 parse/format, 4 key error,
5 sequence mismatch, 6 tamper detected, 7 entropy failure.

Progress goes to stderr; stdout carries only command output (seq list, bench).
"""

import argparse
import logging
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from . import __version__
from .bench import run_bench
from .config import DEFAULT_PROFILE, PROFILES, CliConfig
from .ecelgamal import (
    keygen,
    read_private_key,
    read_public_key,
    write_private_key,
    write_public_key,
)
from .errors import DeccError, UsageError
from .pipeline import (
    PipelineParams,
    decrypt_bytes,
    deserialize,
    encrypt_bytes,
    read_header,
    serialize,
)

logger = logging.getLogger("decc")


def _banner(title: str):
    print("=" * 60, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def _step(message: str):
    print(message, file=sys.stderr)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise UsageError(f"input file not found: {path}") from None


def cmd_keygen(config: CliConfig, args) -> int:
    prefix = Path(args.out)
    priv_path = prefix.with_name(prefix.name + ".priv")
    pub_path = prefix.with_name(prefix.name + ".pub")
    if not args.force:
        for path in (priv_path, pub_path):
            if path.exists():
                raise UsageError(f"{path} already exists (use --force to overwrite)")

    curve = config.load_curve()
    _step(f"Step 1: Generating key pair on curve {curve.curve_id}...")
    keys = keygen(curve, config.rng())

    _step(f"Step 2: Writing {priv_path} and {pub_path}...")
    write_private_key(priv_path, keys.d, curve, force=args.force)
    try:
        write_public_key(pub_path, keys.public, curve, force=args.force)
    except BaseException:
        # no private key without its public half
        priv_path.unlink(missing_ok=True)
        raise
    _step("  Key pair written (keep the .priv file private)")
    return 0


def cmd_encrypt(config: CliConfig, args) -> int:
    _banner("DNA-encoded EC-ElGamal encryption")
    profile = config.profile
    curve = config.load_curve()

    _step(f"Step 1: Reading public key from {args.key}...")
    public = read_public_key(args.key, curve)

    _step(f"Step 2: Loading reference '{args.seq}' from {config.store_dir}...")
    store = config.open_store()
    params = PipelineParams(curve=curve, seq_id=args.seq, r=profile.r, K=profile.K, B=profile.B)

    plain = _read_bytes(args.input)
    _step(f"Step 3: Encrypting {len(plain)} bytes (profile {profile.name}: "
          f"r={params.r}, K={params.K}, B={params.B})...")
    ct = encrypt_bytes(plain, public, params, store, rng=config.rng(), workers=args.workers)
    _step(f"  {len(ct.blocks)} ciphertext blocks")

    _step(f"Step 4: Writing {args.out}...")
    Path(args.out).write_bytes(serialize(ct, curve))
    return 0


def cmd_decrypt(config: CliConfig, args) -> int:
    _banner("DNA-encoded EC-ElGamal decryption")
    data = _read_bytes(args.input)

    _step(f"Step 1: Parsing ciphertext {args.input}...")
    header, _, _ = read_header(data)
    curve = config.load_curve(header.curve_id)
    ct = deserialize(data, curve)
    _step(f"  {len(ct.blocks)} blocks on curve {curve.curve_id}")

    _step(f"Step 2: Reading private key from {args.key}...")
    d = read_private_key(args.key, curve)

    _step(f"Step 3: Decrypting against sequences in {config.store_dir}...")
    store = config.open_store()
    plain = decrypt_bytes(ct, d, store, curve, seq_id=args.seq, workers=args.workers)

    _step(f"Step 4: Writing {len(plain)} bytes to {args.out}...")
    Path(args.out).write_bytes(plain)
    return 0


def cmd_inspect(config: CliConfig, args) -> int:
    header, n_blocks, _ = read_header(_read_bytes(args.input))
    print(f"curve_id\t{header.curve_id}")
    print(f"version\t{header.version}")
    print(f"seq_fingerprint\t{header.seq_fingerprint.hex()}")
    print(f"r\t{header.r}")
    print(f"K\t{header.K}")
    print(f"B\t{header.B}")
    print(f"plaintext_bit_length\t{header.plaintext_bit_length}")
    print(f"blocks\t{n_blocks}")
    return 0


def cmd_seq_import(config: CliConfig, args) -> int:
    store = config.open_store(create=True)
    total = 0
    for path in args.fasta:
        _step(f"Importing {path}...")
        records = store.import_file(path, replace=args.force)
        for record in records:
            _step(f"  {record.seq_id}: {record.length} bases")
        total += len(records)
    _step(f"Imported {total} sequence(s) into {config.store_dir}")
    return 0


def cmd_seq_list(config: CliConfig, args) -> int:
    store = config.open_store()
    print("seq_id\tlength\tfingerprint")
    for record in store.list():
        print(f"{record.seq_id}\t{record.length}\t{record.fingerprint.hex()}")
    return 0


def cmd_seq_verify(config: CliConfig, args) -> int:
    store = config.open_store()
    bad = 0
    for seq_id, ok in store.verify():
        print(f"{seq_id}\t{'ok' if ok else 'MISMATCH'}")
        bad += not ok
    if bad:
        _step(f"ERROR: {bad} sequence(s) do not match the index")
        return 5
    return 0


def cmd_bench(config: CliConfig, args) -> int:
    profile = config.profile
    curve = config.load_curve()
    _step(f"Benchmarking profile {profile.name} on {curve.curve_id} "
          f"({args.iterations} iterations, {args.size}-byte messages)...")
    report = run_bench(curve, profile.r, profile.K, profile.B, message_size=args.size,
                       iterations=args.iterations, rng=config.rng())
    if args.out:
        report.to_csv(args.out, index=False)
        _step(f"Report written to {args.out}")
    else:
        print(report.to_string(index=False))
    return 0


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's defaults from overwriting flags given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--curve', help='Curve parameters file (env DECC_CURVE)')
    common.add_argument('--store', help='Sequence store directory (env DECC_STORE)')
    common.add_argument('--profile', choices=sorted(PROFILES),
                        help=f'Parameter profile (default: {DEFAULT_PROFILE})')
    common.add_argument('--seed', help='Hex rng seed, honoured only with DECC_TEST_MODE=1')
    common.add_argument('-v', '--verbose', action='store_true', help='Debug logging and tracebacks')

    parser = argparse.ArgumentParser(
        prog='decc',
        description='DNA-encoded elliptic-curve ElGamal file encryption',
        parents=[common],
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('keygen', parents=[common], help='Generate a key pair')
    p.add_argument('--out', required=True, help='Output prefix for <prefix>.priv / <prefix>.pub')
    p.add_argument('--force', action='store_true', help='Overwrite existing key files')
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser('encrypt', parents=[common], help='Encrypt a file')
    p.add_argument('input', help='Plaintext file')
    p.add_argument('--key', required=True, help='Public key file')
    p.add_argument('--seq', required=True, help='Reference sequence id in the store')
    p.add_argument('--out', required=True, help='Ciphertext output file')
    p.add_argument('--workers', type=int, default=1, help='Worker processes (default: 1)')
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser('decrypt', parents=[common], help='Decrypt a file')
    p.add_argument('input', help='Ciphertext file')
    p.add_argument('--key', required=True, help='Private key file')
    p.add_argument('--seq', help='Reference sequence id (default: match by fingerprint)')
    p.add_argument('--out', required=True, help='Plaintext output file')
    p.add_argument('--workers', type=int, default=1, help='Worker processes (default: 1)')
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser('inspect', parents=[common], help='Print a ciphertext header')
    p.add_argument('input', help='Ciphertext file')
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser('seq', help='Manage reference sequences')
    seq_sub = p.add_subparsers(dest='seq_command', required=True)
    sp = seq_sub.add_parser('import', parents=[common], help='Import FASTA files')
    sp.add_argument('fasta', nargs='+', help='FASTA file(s)')
    sp.add_argument('--force', action='store_true', help='Replace sequences with the same id')
    sp.set_defaults(func=cmd_seq_import)
    sp = seq_sub.add_parser('list', parents=[common], help='Print the store index')
    sp.set_defaults(func=cmd_seq_list)
    sp = seq_sub.add_parser('verify', parents=[common], help='Check stored fingerprints')
    sp.set_defaults(func=cmd_seq_verify)

    p = sub.add_parser('bench', parents=[common], help='Timing report')
    p.add_argument('--size', type=int, default=64, help='Message size in bytes (default: 64)')
    p.add_argument('--iterations', type=int, default=10, help='Repetitions (default: 10)')
    p.add_argument('--out', help='Write the report as CSV instead of printing it')
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the subcommand and map errors to exit codes.
    """
    args = build_parser().parse_args(argv)
    verbose = getattr(args, 'verbose', False)

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - [%(levelname)s] - %(message)s',
        stream=sys.stderr,
    )

    logger.debug("decc %s: %s", __version__, args.command)
    try:
        config = CliConfig.from_args(args)
        return args.func(config, args)
    except DeccError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        if verbose:
            traceback.print_exc()
        return e.exit_code
    except OSError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        if verbose:
            traceback.print_exc()
        return 2
