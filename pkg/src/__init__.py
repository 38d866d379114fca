"""
DNA-Encoded Elliptic Curve Cryptosystem

Two-level cipher: plaintext bits are hidden in a shared reference DNA sequence
by the insertion method, the encoded nucleotides are embedded into curve points
(Koblitz), and the points are encrypted with EC-ElGamal.
"""

__version__ = "0.1.0"
