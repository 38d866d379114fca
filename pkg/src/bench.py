"""
Benchmark Module

Timing report for scalar multiplication and the full pipeline. Reports wall
time only; there is no pass/fail threshold and no RSA comparison.
"""

import logging
import random
import time
from typing import Callable, Optional

import pandas as pd

from .dna_codec import DnaSequence
from .ecelgamal import RandomSource, default_rng, draw_scalar, keygen
from .field_curve import CurveParams, scalar_mul
from .koblitz import encode_to_point
from .pipeline import PipelineParams, decrypt_with_reference, encrypt_with_reference

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["operation", "curve_id", "iterations", "total_s", "per_op_ms", "bytes_per_s"]


def random_reference(n_bases: int, seed: int = 0, seq_id: str = "bench") -> DnaSequence:
    """Synthetic reference sequence for timing runs."""
    rng = random.Random(seed)
    return DnaSequence(seq_id=seq_id, bases="".join(rng.choices("ACGT", k=max(1, n_bases))),
                       source="synthetic benchmark reference")


def _time(fn: Callable[[], object], iterations: int) -> float:
    start = time.perf_counter()
    for _ in range(iterations):
        fn()
    return time.perf_counter() - start


def _row(operation: str, curve: CurveParams, iterations: int, total: float,
         payload: Optional[int] = None) -> dict:
    return {
        "operation": operation,
        "curve_id": curve.curve_id,
        "iterations": iterations,
        "total_s": round(total, 6),
        "per_op_ms": round(1000 * total / iterations, 3),
        "bytes_per_s": round(payload * iterations / total, 1) if payload and total else None,
    }


def run_bench(curve: CurveParams, r: int, K: int, B: int, message_size: int = 64,
              iterations: int = 10, rng: Optional[RandomSource] = None) -> pd.DataFrame:
    """
    Time the main operations for one parameter set.

    Args:
        curve: Curve parameters
        r, K, B: Pipeline parameters
        message_size: Plaintext bytes per pipeline run
        iterations: Repetitions per operation
        rng: Randomness source (system randomness by default)

    Returns:
        DataFrame with one row per operation, columns REPORT_COLUMNS
    """
    rng = rng or default_rng()
    rows = []

    scalars = [draw_scalar(rng, curve.n) for _ in range(iterations)]
    it = iter(scalars)
    rows.append(_row("scalar_mul", curve, iterations,
                     _time(lambda: scalar_mul(next(it), curve.G, curve), iterations)))

    keys = keygen(curve, rng)
    params = PipelineParams(curve=curve, seq_id="bench", r=r, K=K, B=B)
    kp = params.koblitz
    limit = min(kp.max_message, (1 << (2 * B)) - 1)
    messages = iter([rng.randrange(0, limit + 1) for _ in range(iterations)])
    rows.append(_row("koblitz_encode", curve, iterations,
                     _time(lambda: encode_to_point(next(messages), curve, kp), iterations)))

    reference = random_reference(-(-8 * message_size * r // 2))
    plain = bytes(rng.randrange(256) for _ in range(message_size))
    ct = encrypt_with_reference(plain, keys.public, params, reference, rng=rng)

    rows.append(_row("encrypt_bytes", curve, iterations, _time(
        lambda: encrypt_with_reference(plain, keys.public, params, reference, rng=rng),
        iterations), payload=message_size))
    rows.append(_row("decrypt_bytes", curve, iterations, _time(
        lambda: decrypt_with_reference(ct, keys.d, curve, reference), iterations),
        payload=message_size))

    logger.debug("bench finished for %s", curve.curve_id)
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)
