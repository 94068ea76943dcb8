"""Distance queries between swept arm capsules and scene obstacles.

Obstacles are axis-aligned boxes and spheres. Capsule-vs-box uses the fact
that point-to-box distance is convex along a segment, so a vectorized
ternary search finds the true minimum to high precision; capsule-vs-sphere
is closed form. All queries are batched over (configs x capsules x
obstacles) so path checks stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SparcsError


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise SparcsError(f"box extents {self.lo}..{self.hi} are negative")


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise SparcsError("sphere radius must be nonnegative")


def _point_box_distance(p: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """p: (..., 3). Zero inside the box."""
    d = np.maximum(np.maximum(lo - p, p - hi), 0.0)
    return np.linalg.norm(d, axis=-1)


def segment_box_distance(p0, p1, lo, hi, iters: int = 36) -> np.ndarray:
    """Minimum distance from segments (..., 3) to one box, via ternary search."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    a = np.zeros(p0.shape[:-1])
    b = np.ones(p0.shape[:-1])
    d = p1 - p0
    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        f1 = _point_box_distance(p0 + m1[..., None] * d, lo, hi)
        f2 = _point_box_distance(p0 + m2[..., None] * d, lo, hi)
        take_left = f1 <= f2
        b = np.where(take_left, m2, b)
        a = np.where(take_left, a, m1)
    t = (a + b) / 2.0
    return _point_box_distance(p0 + t[..., None] * d, lo, hi)


def segment_sphere_distance(p0, p1, center, radius) -> np.ndarray:
    """Minimum distance from segments (..., 3) to a sphere surface (can be < 0)."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    c = np.asarray(center, dtype=float)
    d = p1 - p0
    dd = np.einsum("...i,...i->...", d, d)
    t = np.zeros(dd.shape)
    nonzero = dd > 1e-18
    t[nonzero] = np.einsum("...i,...i->...", c - p0, d)[nonzero] / dd[nonzero]
    t = np.clip(t, 0.0, 1.0)
    closest = p0 + t[..., None] * d
    return np.linalg.norm(closest - c, axis=-1) - radius


@dataclass(frozen=True)
class Scene:
    boxes: tuple = field(default=())
    spheres: tuple = field(default=())

    @classmethod
    def from_config(cls, cfg: list) -> "Scene":
        boxes, spheres = [], []
        for obs in cfg:
            kind = obs.get("kind")
            if kind == "box":
                boxes.append(Box(tuple(obs["lo"]), tuple(obs["hi"])))
            elif kind == "sphere":
                spheres.append(Sphere(tuple(obs["center"]), float(obs["radius"])))
            else:
                raise SparcsError(f"unknown obstacle kind {kind!r}")
        return cls(tuple(boxes), tuple(spheres))

    def min_clearance(self, p0: np.ndarray, p1: np.ndarray, radii: np.ndarray) -> float:
        """Smallest obstacle distance minus capsule radius over all segments.

        p0, p1: (..., ncaps, 3); radii: (ncaps,). Negative means collision.
        """
        best = np.inf
        for box in self.boxes:
            d = segment_box_distance(p0, p1, box.lo, box.hi) - radii
            best = min(best, float(d.min()))
        for sph in self.spheres:
            d = segment_sphere_distance(p0, p1, sph.center, sph.radius) - radii
            best = min(best, float(d.min()))
        return best

    def point_clearance(self, points: np.ndarray) -> np.ndarray:
        """Distance from points (..., 3) to the nearest obstacle surface."""
        points = np.asarray(points, dtype=float)
        best = np.full(points.shape[:-1], np.inf)
        for box in self.boxes:
            best = np.minimum(best, _point_box_distance(points, np.array(box.lo), np.array(box.hi)))
        for sph in self.spheres:
            d = np.linalg.norm(points - np.asarray(sph.center), axis=-1) - sph.radius
            best = np.minimum(best, d)
        return best
