#!/usr/bin/env python3
"""
DNA-Encoded ECC Cipher - Main Entry Point

Usage:
    python main.py keygen --out alice
    python main.py seq import data/sequences/litmus.fasta
    python main.py encrypt message.txt --key alice.pub --seq litmus --out message.decc
    python main.py decrypt message.decc --key alice.priv --out message.txt

Run `python main.py --help` for every subcommand.
"""

import sys
from pathlib import Path

# Add repo directory to path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
