"""
Test helpers and an independent oracle for y^2 = x^3 + 2x + 2 over GF(17), G = (5, 1).

MULTIPLES[k] is k*G, taken from the published table for this textbook curve
rather than computed with the code under test.
"""

import random

P, A, B = 17, 2, 2
ORDER = 19

MULTIPLES = [
    None,
    (5, 1), (6, 3), (10, 6), (3, 1), (9, 16), (16, 13), (0, 6), (13, 7), (7, 6),
    (7, 11), (13, 10), (0, 11), (16, 4), (9, 1), (3, 16), (10, 11), (6, 14), (5, 16),
]


def brute_force_points():
    """Every affine point by exhaustive search."""
    return [(x, y) for x in range(P) for y in range(P)
            if (y * y - (x ** 3 + A * x + B)) % P == 0]


class FixedRng:
    """Returns the given values in turn from randrange, cycling."""

    def __init__(self, *values):
        self.values = values
        self.calls = 0

    def randrange(self, start, stop=None):
        value = self.values[self.calls % len(self.values)]
        self.calls += 1
        return value


class BrokenRng:
    def randrange(self, start, stop=None):
        raise OSError("entropy pool unavailable")


def make_reference(n_bases: int, seed: int = 1, seq_id: str = "ref"):
    from src.dna_codec import DnaSequence

    rng = random.Random(seed)
    return DnaSequence(seq_id=seq_id, bases="".join(rng.choices("ACGT", k=n_bases)))
