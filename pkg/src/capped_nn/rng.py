"""Seeded, splittable randomness.

Each :class:`SeededStream` is a Philox4x64 counter-based generator keyed by
``(seed, label)``.  A stream's output depends on nothing but its key, so
block ``k`` of a process can be regenerated without replaying blocks
``1..k-1``, and the order in which different streams are drawn from never
matters.
"""
from __future__ import annotations

import hashlib

import numpy as np

from .dyadic import Dyadic, normalize

__all__ = ["SeededStream", "derive_seed", "parse_seed", "uniform_dyadic_order", "uniform_dyadic_bits"]

_MASK64 = (1 << 64) - 1


def _label_key(label) -> int:
    digest = hashlib.blake2b(repr(label).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(seed: int, *label) -> int:
    """A 64-bit child seed, e.g. one per Monte-Carlo trial."""
    h = hashlib.blake2b(f"{seed & _MASK64}:{label!r}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def parse_seed(text: str | int) -> int:
    """Accept decimal or ``0x``-prefixed hex."""
    if isinstance(text, int):
        return text & _MASK64
    return int(text, 0) & _MASK64


class SeededStream:
    """Reproducible stream of 64-bit words for one ``(seed, label)`` pair."""

    def __init__(self, seed: int, label=()):
        self.seed = seed & _MASK64
        self.label = label
        key = np.array([self.seed, _label_key(label)], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self.counter = 0

    def __repr__(self):
        return f"SeededStream(seed={self.seed:#x}, label={self.label!r}, counter={self.counter})"

    def words(self, n: int) -> list[int]:
        self.counter += n
        return [int(w) for w in self._bitgen.random_raw(n)]

    def bits(self, q: int) -> int:
        """A uniform integer in [0, 2**q)."""
        if q <= 0:
            return 0
        nwords = (q + 63) // 64
        raw = self._bitgen.random_raw(nwords)
        self.counter += nwords
        value = int.from_bytes(raw.astype("<u8").tobytes(), "little")
        return value >> (64 * nwords - q)

    def below(self, n: int) -> int:
        """A uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        q = (n - 1).bit_length()
        while True:
            r = self.bits(q)
            if r < n:
                return r

    def random(self) -> float:
        return self.bits(53) / (1 << 53)


def uniform_dyadic_order(stream: SeededStream, p: int) -> Dyadic:
    """Uniform over D_p, the 2**(p-1) values with odd numerator over 2**p."""
    if p < 1:
        raise ValueError("order must be >= 1")
    return Dyadic(2 * stream.bits(p - 1) + 1, p)


def uniform_dyadic_bits(stream: SeededStream, q: int) -> Dyadic:
    """m / 2**q with m uniform in [0, 2**q)."""
    if q < 1:
        raise ValueError("bit count must be >= 1")
    return normalize(stream.bits(q), q)
