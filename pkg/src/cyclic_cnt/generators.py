"""Preset and seeded random cyclic systems.

Random draws use numpy's PCG64 generator.  Each bunch gets its own child stream
spawned from ``SeedSequence(seed)``, so bunch ``i`` of a rank-``n`` system is
identical to bunch ``i`` of a rank-``n+1`` system drawn with the same seed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .system import CyclicSystem, new_system, succ

F = Fraction

_EXAMPLE_BUNCH = (F(1, 8), F(3, 8), F(3, 8), F(1, 8))
_UNIFORM = re.compile(r"uniform-independent-(\d+)$")

PRESET_NAMES = ("example1", "example2", "pr-box", "uniform-independent-<n>")


def preset(name: str) -> CyclicSystem:
    """Named systems: ``example1``, ``example2``, ``pr-box``, ``uniform-independent-<n>``."""
    if name == "example1":
        return new_system(3, [_EXAMPLE_BUNCH] * 3)
    if name == "example2":
        return new_system(3, [_EXAMPLE_BUNCH] * 2 + [(F(1, 8), F(7, 16), F(3, 8), F(1, 16))])
    if name == "pr-box":
        half = F(1, 2)
        return new_system(4, [(half, 0, 0, half)] * 3 + [(0, half, half, 0)])
    match = _UNIFORM.match(name)
    if match:
        return new_system(int(match.group(1)), [(F(1, 4),) * 4] * int(match.group(1)))
    raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


@dataclass(frozen=True)
class GeneratorSpec:
    rank: int
    seed: int = 0
    denominator_bound: int = 16

    def __post_init__(self) -> None:
        if self.rank < 2:
            raise ValueError("rank must be >= 2")
        if self.denominator_bound < 2:
            raise ValueError("denominator_bound must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _streams(spec: GeneratorSpec, count: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(spec.seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def _lattice_simplex_point(rng: np.random.Generator, k: int) -> tuple[Fraction, ...]:
    cuts = sorted(int(c) for c in rng.integers(0, k, size=3, endpoint=True))
    parts = (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], k - cuts[2])
    return tuple(F(p, k) for p in parts)


def random_system(spec: GeneratorSpec) -> CyclicSystem:
    """Bunches drawn independently on the 4-outcome lattice simplex of step ``1/k``."""
    k = spec.denominator_bound
    return new_system(spec.rank, [_lattice_simplex_point(rng, k) for rng in _streams(spec, spec.rank)])


def random_consistent_system(spec: GeneratorSpec) -> CyclicSystem:
    """Content marginals first, then each bunch inside its Fréchet interval."""
    n, k = spec.rank, spec.denominator_bound
    streams = _streams(spec, 2 * n)
    marginals = [F(int(rng.integers(0, k, endpoint=True)), k) for rng in streams[:n]]
    bunches = []
    for i, rng in enumerate(streams[n:], start=1):
        a, b = marginals[i - 1], marginals[succ(i, n) - 1]
        lo, hi = max(F(0), a + b - 1), min(a, b)
        p11 = F(int(rng.integers(int(lo * k), int(hi * k), endpoint=True)), k)
        bunches.append((1 - a - b + p11, b - p11, a - p11, p11))
    return new_system(n, bunches)


def random_correlated_system(spec: GeneratorSpec) -> CyclicSystem:
    """Strongly (anti-)correlated bunches with an odd number of anti-correlations.

    Each bunch keeps at most ``1/(2n)`` of its mass off its main (anti-)diagonal,
    which pushes most draws across the noncontextuality boundary.  Marginals
    still vary, so the systems are generically inconsistently connected.
    """
    n, k = spec.rank, spec.denominator_bound
    streams = _streams(spec, n + 1)
    parity = streams[n]
    flips = [int(f) for f in parity.integers(0, 2, size=n)]
    if sum(flips) % 2 == 0:
        flips[int(parity.integers(0, n))] ^= 1
    bunches = []
    for rng, anti in zip(streams[:n], flips):
        off = int(rng.integers(0, k // (2 * n), endpoint=True))
        off0 = int(rng.integers(0, off, endpoint=True))
        rest = k - off
        main0 = int(rng.integers(rest // 4, rest - rest // 4, endpoint=True))
        main = (F(main0, k), F(rest - main0, k))
        minor = (F(off0, k), F(off - off0, k))
        if anti:
            main, minor = minor, main
        bunches.append((main[0], minor[0], minor[1], main[1]))
    return new_system(n, bunches)


FAMILIES = {
    "uniform": random_system,
    "consistent": random_consistent_system,
    "correlated": random_correlated_system,
}
_CYCLE = tuple(FAMILIES)


def sweep_system(spec: GeneratorSpec, family: str = "mixed") -> CyclicSystem:
    """One system of a sweep; ``mixed`` rotates through the families by seed."""
    if family == "mixed":
        family = _CYCLE[spec.seed % len(_CYCLE)]
    try:
        return FAMILIES[family](spec)
    except KeyError:
        raise KeyError(f"unknown family {family!r}; known: mixed, {', '.join(FAMILIES)}") from None
