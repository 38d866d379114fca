"""
Configuration Module

Parameter profiles and the CLI configuration. Flags take precedence over
environment variables, which take precedence over defaults:

    --store   DECC_STORE      (default: ./decc_store)
    --curve   DECC_CURVE      (default: the profile's curve file)

DECC_TEST_MODE=1 enables --seed; outside test mode the seed is ignored.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from .ecelgamal import RandomSource, default_rng, seeded_rng
from .errors import ParseError, UsageError
from .field_curve import CurveParams, load_curve
from .pipeline import CURVE_ID_OFFSET
from .seq_store import SequenceStore

logger = logging.getLogger(__name__)

REPO_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_DIR / "data"
CURVE_DIR = DATA_DIR / "curves"
SAMPLE_SEQUENCE_DIR = DATA_DIR / "sequences"
DEFAULT_STORE_DIR = Path("decc_store")


@dataclass(frozen=True)
class Profile:
    """Named set of pipeline parameters and the curve they are sized for."""

    name: str
    curve_file: Path
    r: int
    K: int
    B: int


PROFILES = {
    # 240-bit block integers plus 8 bits of Koblitz headroom fit the 256-bit field
    "production": Profile("production", CURVE_DIR / "p256.curve", r=3, K=256, B=120),
    # one nucleotide per block on the 17-element field
    "test": Profile("test", CURVE_DIR / "tiny17.curve", r=3, K=4, B=1),
}

DEFAULT_PROFILE = "production"


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise UsageError(
            f"unknown profile '{name}' (choose from {', '.join(sorted(PROFILES))})"
        ) from None


def curve_file_for(curve_id: str) -> Path:
    """Shipped parameter file for a curve_id, data/curves/<curve_id>.curve."""
    return CURVE_DIR / f"{curve_id}.curve"


def is_test_mode(environ: Mapping[str, str] = os.environ) -> bool:
    return environ.get("DECC_TEST_MODE", "") == "1"


@dataclass(frozen=True)
class CliConfig:
    """
    Attributes:
        store_dir: Sequence store directory
        curve_file: Curve parameters file
        profile: Parameter profile
        seed: Seed for the deterministic rng (test mode only)
        curve_explicit: True when the curve came from --curve or DECC_CURVE
    """

    store_dir: Path
    curve_file: Path
    profile: Profile
    seed: Optional[int] = None
    curve_explicit: bool = False

    @classmethod
    def from_args(cls, args, environ: Mapping[str, str] = os.environ) -> "CliConfig":
        profile = get_profile(getattr(args, "profile", None) or DEFAULT_PROFILE)
        store_dir = Path(getattr(args, "store", None) or environ.get("DECC_STORE") or DEFAULT_STORE_DIR)

        curve = getattr(args, "curve", None) or environ.get("DECC_CURVE")
        curve_file = Path(curve) if curve else profile.curve_file

        seed = None
        raw_seed = getattr(args, "seed", None)
        if raw_seed is not None:
            if is_test_mode(environ):
                try:
                    seed = int(raw_seed, 16)
                except ValueError:
                    raise UsageError(f"--seed must be hex, got '{raw_seed}'") from None
            else:
                logger.warning("--seed ignored: only honoured when DECC_TEST_MODE=1")

        return cls(store_dir=store_dir, curve_file=curve_file, profile=profile,
                   seed=seed, curve_explicit=bool(curve))

    def rng(self) -> RandomSource:
        if self.seed is not None:
            return seeded_rng(self.seed)
        return default_rng()

    def load_curve(self, curve_id: Optional[str] = None) -> CurveParams:
        """
        Load the configured curve. When curve_id is given and no curve was
        configured explicitly, the shipped file for that id is used instead.

        Raises:
            UsageError: If the configured curve file is missing
            ParseError: If no curve is shipped for a ciphertext header's curve_id
        """
        path = self.curve_file
        if curve_id is not None and not self.curve_explicit:
            path = curve_file_for(curve_id)
            if not path.is_file():
                raise ParseError(f"unknown curve_id '{curve_id}' in ciphertext header",
                                 offset=CURVE_ID_OFFSET)
        if not path.is_file():
            raise UsageError(f"curve parameters file not found: {path}")
        return load_curve(path)

    def open_store(self, create: bool = False) -> SequenceStore:
        if not self.store_dir.is_dir():
            if not create:
                raise UsageError(
                    f"sequence store not found: {self.store_dir} (set --store or DECC_STORE)"
                )
            self.store_dir.mkdir(parents=True)
            logger.info("created sequence store %s", self.store_dir)
        return SequenceStore(self.store_dir)
