"""Deterministic 64-bit RNG used for every seeded selection.

The generator is splitmix64: a single uint64 state advanced by a fixed
odd constant, with the output mixed by two xor-shift-multiply rounds.
It is trivial to re-implement in any language, which is what makes
decision sequences reproducible across independent implementations.

Draw conventions (normative for anything that must replay bit-exactly):

* one ``next_u64`` call consumes exactly one state step;
* a candidate pick from a non-empty list is ``items[next_u64() % len(items)]``
  with ``items`` sorted lexicographically by participant id;
* selection policies draw only when stated: the affective policy draws
  once per tie set of size >= 2 (and once more if the no-repeat rule
  forces a second tie break), the random policy draws exactly once per
  window with a non-empty candidate list, round-robin and pinned draw
  never.
"""
from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream; state is a single uint64."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def pick(self, items: list) -> object:
        # items must already be in canonical (sorted) order
        if not items:
            raise ValueError("pick from empty candidate list")
        return items[self.next_u64() % len(items)]
