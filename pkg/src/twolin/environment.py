"""The two-part dynamic linear environment on bit strings.

Two fitness functions share the all-ones optimum: both are linear with
positive weights, the first puts weight n on the left part and 1 on the
right part, the second swaps the two. Each generation one of them is drawn
at random and selection is based on the drawn function only.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .params import Params


class Env(enum.Enum):
    """Which of the two linear functions drives selection this generation."""

    F1 = 1
    F2 = 2


@dataclass
class BitString:
    """Bit vector with cached zero counts per part.

    bits is a boolean array of length n; left_len positions belong to the
    left part. The cached counts are maintained by apply_flips and verified
    against a recount in debug runs.
    """

    bits: np.ndarray
    left_len: int
    zeros_left: int = field(default=-1)
    zeros_right: int = field(default=-1)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.zeros_left < 0 or self.zeros_right < 0:
            self.zeros_left = int(np.sum(~self.bits[: self.left_len]))
            self.zeros_right = int(np.sum(~self.bits[self.left_len:]))
        assert self._cache_ok()

    def _cache_ok(self) -> bool:
        return (
            self.zeros_left == int(np.sum(~self.bits[: self.left_len]))
            and self.zeros_right == int(np.sum(~self.bits[self.left_len:]))
        )

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def ones_left(self) -> int:
        return self.left_len - self.zeros_left

    @property
    def ones_right(self) -> int:
        return (self.n - self.left_len) - self.zeros_right

    def state(self):
        from .params import State

        return State(self.zeros_left, self.zeros_right)

    def copy(self) -> "BitString":
        return BitString(self.bits.copy(), self.left_len,
                         self.zeros_left, self.zeros_right)

    def apply_flips(self, positions: np.ndarray) -> "BitString":
        """New string with the given positions flipped; counts updated incrementally."""
        bits = self.bits.copy()
        zl, zr = self.zeros_left, self.zeros_right
        for pos in positions:
            if pos < self.left_len:
                zl += 1 if bits[pos] else -1
            else:
                zr += 1 if bits[pos] else -1
            bits[pos] = not bits[pos]
        out = BitString(bits, self.left_len, zl, zr)
        assert out._cache_ok()
        return out

    @classmethod
    def random(cls, p: Params, rng: np.random.Generator) -> "BitString":
        return cls(rng.random(p.n) < 0.5, p.left_len)

    @classmethod
    def all_ones(cls, p: Params) -> "BitString":
        return cls(np.ones(p.n, dtype=bool), p.left_len)

    @classmethod
    def all_zeros(cls, p: Params) -> "BitString":
        return cls(np.zeros(p.n, dtype=bool), p.left_len)

    @classmethod
    def with_state(cls, x_l: int, x_r: int, p: Params,
                   rng: np.random.Generator | None = None) -> "BitString":
        """String with x_l zeros in the left part and x_r in the right part.

        Zero positions are placed at the start of each part, or uniformly at
        random within each part when an rng is given; the state dynamics do
        not depend on the placement.
        """
        if x_l > p.left_len or x_r > p.right_len:
            raise ValueError(f"state ({x_l},{x_r}) exceeds part lengths")
        bits = np.ones(p.n, dtype=bool)
        if rng is None:
            bits[:x_l] = False
            bits[p.left_len: p.left_len + x_r] = False
        else:
            bits[rng.choice(p.left_len, size=x_l, replace=False)] = False
            bits[p.left_len + rng.choice(p.right_len, size=x_r, replace=False)] = False
        return cls(bits, p.left_len)


def fitness(x: BitString, which: Env, p: Params) -> int:
    """Weighted one-count; exact in integer arithmetic (max value n^2)."""
    if x.n != p.n:
        raise ValueError("string length does not match params")
    if which is Env.F1:
        return p.n * x.ones_left + x.ones_right
    return x.ones_left + p.n * x.ones_right


def draw_environment(rng: np.random.Generator, p: Params) -> Env:
    """F1 with probability rho, F2 otherwise."""
    return Env.F1 if rng.random() < p.rho else Env.F2


def compare(parent: BitString, offspring: BitString, which: Env, p: Params) -> bool:
    """True iff the offspring is selected; ties go to the offspring."""
    if parent.n != offspring.n:
        raise ValueError("parent and offspring lengths differ")
    return fitness(offspring, which, p) >= fitness(parent, which, p)
