"""Point clouds over [-10, 10]^2 with bit-exact reproducibility.

The RNG is splitmix64 (see docs/rng.md) so the byte stream is identical
across platforms and languages for a fixed master seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SplitMix64",
    "splitmix64_next",
    "PointCloud",
    "N_POINTS",
    "N_CLOUDS",
    "DOMAIN_HALF",
    "canonical_cloud",
    "random_cloud",
    "cloud_suite",
]

N_POINTS = 441  # 21 x 21
N_CLOUDS = 50
DOMAIN_HALF = 10.0

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64_next(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + _GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    z = z ^ (z >> 31)
    return state, z


class SplitMix64:
    """Stateful splitmix64 stream."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state, z = splitmix64_next(self.state)
        return z

    def next_unit(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class PointCloud:
    id: int
    kind: str  # 'canonical' | 'random'
    seed: int | None
    points: np.ndarray  # (n, 2) float64

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def canonical_cloud(points_per_side: int = 21) -> PointCloud:
    """Integer lattice over [-10, 10]^2, y outer / x inner, ascending."""
    axis = np.linspace(-DOMAIN_HALF, DOMAIN_HALF, points_per_side)
    yy, xx = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return PointCloud(id=0, kind="canonical", seed=None, points=pts)


def random_cloud(master_seed: int, cloud_id: int, n_points: int = N_POINTS) -> PointCloud:
    """Seeded uniform cloud over [-10, 10)^2; x drawn before y per point."""
    if cloud_id < 1:
        raise ValueError("cloud_id must be >= 1 (cloud 0 is the lattice)")
    rng = SplitMix64((master_seed ^ cloud_id) & _MASK)
    coords = np.empty((n_points, 2), dtype=np.float64)
    for i in range(n_points):
        coords[i, 0] = -DOMAIN_HALF + 2 * DOMAIN_HALF * rng.next_unit()
        coords[i, 1] = -DOMAIN_HALF + 2 * DOMAIN_HALF * rng.next_unit()
    return PointCloud(id=cloud_id, kind="random", seed=master_seed ^ cloud_id,
                      points=coords)


def cloud_suite(master_seed: int, n_clouds: int = N_CLOUDS,
                points_per_side: int = 21) -> list[PointCloud]:
    """Cloud 0 is the lattice; clouds 1..n-1 are seeded uniform draws."""
    n_points = points_per_side * points_per_side
    suite = [canonical_cloud(points_per_side)]
    for cid in range(1, n_clouds):
        suite.append(random_cloud(master_seed, cid, n_points))
    return suite
