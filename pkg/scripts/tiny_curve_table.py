#!/usr/bin/env python3
"""
Brute-Force Group Table for a Small Curve

Enumerates every point of a small curve by trying all (x, y) pairs, prints the
multiples of G, and cross-checks them against scalar_mul. Intended for curves
with p in the hundreds at most.

Usage:
    python3 scripts/tiny_curve_table.py
    python3 scripts/tiny_curve_table.py --curve data/curves/tiny17.curve --koblitz-k 4
"""

import argparse
import sys
from pathlib import Path

# Add parent directory to path to import pipeline modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.field_curve import INFINITY, load_curve, point_add, scalar_mul
from src.koblitz import KoblitzParams, encode_to_point


def enumerate_points(curve) -> list:
    """All affine points by exhaustive search, plus infinity."""
    points = [INFINITY]
    for x in range(curve.p):
        rhs = curve.rhs(x)
        for y in range(curve.p):
            if y * y % curve.p == rhs:
                points.append(curve.point(x, y))
    return points


def main():
    parser = argparse.ArgumentParser(description='Print the brute-force group of a small curve')
    parser.add_argument(
        '--curve',
        default=str(Path(__file__).parent.parent / 'data' / 'curves' / 'tiny17.curve'),
        help='Curve parameters file (default: data/curves/tiny17.curve)'
    )
    parser.add_argument(
        '--koblitz-k',
        type=int,
        default=4,
        help='Koblitz multiplier for the embedding table (default: 4)'
    )
    args = parser.parse_args()

    curve = load_curve(args.curve)
    if curve.p > 1000:
        print(f"ERROR: p has {curve.p.bit_length()} bits, too large to enumerate")
        sys.exit(1)

    print(f"Step 1: Enumerating points of {curve.curve_id}...")
    points = enumerate_points(curve)
    print(f"  Group order (with infinity): {len(points)}")

    print("\nStep 2: Multiples of G (repeated addition vs scalar_mul)")
    acc = INFINITY
    for k in range(1, curve.n + 1):
        acc = point_add(acc, curve.G, curve)
        check = "ok" if scalar_mul(k, curve.G, curve) == acc else "MISMATCH"
        print(f"  {k:>3} G = {acc!r:<20} {check}")

    print(f"\nStep 3: Koblitz embedding table (K={args.koblitz_k})")
    kp = KoblitzParams.for_curve(curve, args.koblitz_k)
    for m in range(kp.max_message + 1):
        print(f"  m={m}: {encode_to_point(m, curve, kp)!r}")


if __name__ == "__main__":
    main()
