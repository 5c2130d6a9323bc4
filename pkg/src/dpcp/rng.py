"""Deterministic seed derivation, pure-python side.

Mirrors the splitmix64-based mixing in :mod:`dpcp.kernels` bit for bit, but
on plain python ints so single protocol runs and instance generators never
touch numpy scalar arithmetic.  The split discipline is:

    run seed   = fold(experiment_seed, trial_index)
    node seed  = fold(run_seed, node_id)
    draw value = fold(fold(fold(node_seed, pass), kind), rep)

Every random object anywhere in the package is a pure function of that
chain, which is what makes runs replayable and lets matched-seed sweeps
couple exactly across repetition counts.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fold(s: int, v: int) -> int:
    return mix64((s + (v + 1) * GOLDEN) & MASK64)


def chain(seed: int, *indices: int) -> int:
    s = seed & MASK64
    for v in indices:
        s = fold(s, v)
    return s


def draw_key(node_seed: int, pass_idx: int, kind: int, rep: int) -> int:
    return fold(fold(fold(node_seed, pass_idx), kind), rep)


class SplitMix:
    """Sequential splitmix64 stream for generator-style randomness.

    Used by the instance generators and adversaries, where we want a stream
    rather than labelled draws.  Not used by verifier sessions.
    """

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def randint(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound

    def random(self) -> float:
        return self.next_u64() / float(1 << 64)

    def bit(self) -> int:
        return self.next_u64() & 1

    def bits(self, count: int) -> list[int]:
        return [self.bit() for _ in range(count)]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        return items[self.randint(len(items))]
