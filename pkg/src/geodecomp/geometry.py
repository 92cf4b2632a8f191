"""Uniform-radius disks in the Euclidean plane, the hyperbolic plane (polar
model) and the unit sphere (polar model).

Hyperbolic and spherical points are ``(b, theta)``: distance from the pole and
angle from the polar axis. Distances use the laws of cosines written in the
haversine form, which stays accurate far from the pole:

    cosh d = cosh(b1 - b2) + 2 sinh b1 sinh b2 sin^2(dtheta / 2)
    hav d  = hav(b1 - b2) + sin b1 sin b2 hav(dtheta)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InputError
from .graph import Graph

EPS = 1e-9
TWO_PI = 2.0 * math.pi


class Space(str, Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"
    SPHERICAL = "spherical"


@dataclass(frozen=True)
class DiskInstance:
    space: Space
    radius: float
    centers: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "space", Space(self.space))
        object.__setattr__(self, "centers", tuple((float(a), float(b)) for a, b in self.centers))
        r = self.radius
        if not (r > 0 and math.isfinite(r)):
            raise InputError("radius must be positive")
        if self.space is Space.SPHERICAL and r >= math.pi:
            raise InputError("spherical radius must be < pi")
        if self.space is not Space.EUCLIDEAN:
            bmax = math.pi if self.space is Space.SPHERICAL else math.inf
            for i, (b, th) in enumerate(self.centers):
                if not (0 <= b <= bmax + EPS) or not (0 <= th < TWO_PI + EPS):
                    raise InputError(f"center {i} = {(b, th)} out of polar range")

    @property
    def n(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class AngularExtent:
    """Polar-angle range ``[theta_min, theta_max]`` of a disk seen from the pole.

    ``hits_axis`` is set when the disk meets the polar axis (including the
    case of containing the pole, flagged separately by ``contains_pole``); the
    angles are then not meaningful.
    """

    theta_min: float
    theta_max: float
    hits_axis: bool = False
    contains_pole: bool = False


def _wrap_pi(a: float) -> float:
    """Angle difference folded into ``[0, pi]``."""
    a = math.fmod(abs(a), TWO_PI)
    return TWO_PI - a if a > math.pi else a


def distance(space: Space | str, p: Sequence[float], q: Sequence[float]) -> float:
    space = Space(space)
    if space is Space.EUCLIDEAN:
        return math.hypot(p[0] - q[0], p[1] - q[1])
    b1, t1 = p
    b2, t2 = q
    dt = _wrap_pi(t1 - t2)
    if space is Space.HYPERBOLIC:
        c = math.cosh(b1 - b2) + 2.0 * math.sinh(b1) * math.sinh(b2) * math.sin(dt / 2) ** 2
        return math.acosh(max(c, 1.0))
    h = math.sin((b1 - b2) / 2) ** 2 + math.sin(b1) * math.sin(b2) * math.sin(dt / 2) ** 2
    h = min(max(h, 0.0), 1.0)
    return 2.0 * math.asin(math.sqrt(h))


def disks_intersect(instance: DiskInstance, i: int, j: int) -> bool:
    c = instance.centers
    return distance(instance.space, c[i], c[j]) <= 2 * instance.radius + EPS


def _pair_distances(instance: DiskInstance, i: int) -> np.ndarray:
    """Distances from center ``i`` to all centers (vectorised form of ``distance``)."""
    pts = np.asarray(instance.centers, dtype=float).reshape(-1, 2)
    a, b = pts[:, 0], pts[:, 1]
    a0, b0 = pts[i]
    if instance.space is Space.EUCLIDEAN:
        return np.hypot(a - a0, b - b0)
    dt = np.abs(np.mod(b - b0 + math.pi, TWO_PI) - math.pi)
    s2 = np.sin(dt / 2) ** 2
    if instance.space is Space.HYPERBOLIC:
        with np.errstate(over="ignore", invalid="ignore"):
            c = np.cosh(a - a0) + 2.0 * math.sinh(a0) * np.sinh(a) * s2
        c = np.where(np.isnan(c), np.inf, c)
        return np.arccosh(np.maximum(c, 1.0))
    h = np.sin((a - a0) / 2) ** 2 + math.sin(a0) * np.sin(a) * s2
    return 2.0 * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def intersection_graph(instance: DiskInstance) -> Graph:
    n = instance.n
    limit = 2 * instance.radius + EPS
    nbrs = []
    for i in range(n):
        d = _pair_distances(instance, i)
        close = np.nonzero(d <= limit)[0]
        nbrs.append(frozenset(int(j) for j in close if j != i))
    return Graph(n, tuple(nbrs))


def angular_extent(instance: DiskInstance, i: int) -> AngularExtent:
    r = instance.radius
    b, theta = instance.centers[i]
    if instance.space is Space.HYPERBOLIC:
        if b <= r + EPS:
            return AngularExtent(0.0, TWO_PI, hits_axis=True, contains_pole=True)
        half = math.asin(min(1.0, math.sinh(r) / math.sinh(b)))
    elif instance.space is Space.SPHERICAL:
        if b <= r + EPS or b >= math.pi - r - EPS:
            return AngularExtent(0.0, TWO_PI, hits_axis=True, contains_pole=True)
        half = math.asin(min(1.0, math.sin(r) / math.sin(b)))
    else:
        raise InputError("angular extents are defined for hyperbolic and spherical instances")
    lo, hi = theta - half, theta + half
    hits = lo <= EPS or hi >= TWO_PI - EPS
    return AngularExtent(lo, hi, hits_axis=hits)


# --- pole normalisation (hyperbolic) -----------------------------------------


def _translate_along(b: float, phi: float, D: float) -> tuple[float, float]:
    """Polar coordinates of ``(b, phi)`` after moving the pole to ``(D, 0)``.

    The new polar axis points away from the old pole. Hyperboloid boost along
    the axis, with each coordinate rewritten to avoid cancellation.
    """
    s2 = math.sin(phi / 2) ** 2
    x = math.sinh(b - D) - 2.0 * math.cosh(D) * math.sinh(b) * s2
    y = math.sinh(b) * math.sin(phi)
    nb = math.asinh(math.hypot(x, y))
    nt = math.atan2(y, x) % TWO_PI
    return nb, nt


def _ray_exit(b: float, phi: float, r: float) -> float | None:
    """Largest distance along the ray ``theta = 0`` at which the disk of radius
    ``r`` centred at ``(b, phi)`` still meets it, or None if it misses the ray."""
    # perpendicular from the center onto the full line: length h, foot at
    # signed distance ``foot`` from the pole (hyperbolic right triangle)
    h = math.asinh(math.sinh(b) * abs(math.sin(phi)))
    if h > r + EPS:
        return None
    if b < 20:
        foot = math.atanh(math.tanh(b) * math.cos(phi))
    else:
        foot = math.copysign(math.acosh(max(1.0, math.cosh(b) / math.cosh(h))), math.cos(phi))
    w = math.acosh(max(1.0, math.cosh(r) / math.cosh(h)))
    far = foot + w
    return far if far >= 0 else None


def _gap_direction(extents: list[tuple[float, float]], pad: float = 1e-7) -> float | None:
    """Midpoint of the widest angle not covered by any extent, if one exists."""
    segs = []
    for lo, hi in extents:
        lo, hi = lo - pad, hi + pad
        if hi - lo >= TWO_PI:
            return None
        lo_m = lo % TWO_PI
        hi_m = lo_m + (hi - lo)
        if hi_m <= TWO_PI:
            segs.append((lo_m, hi_m))
        else:
            segs.append((lo_m, TWO_PI))
            segs.append((0.0, hi_m - TWO_PI))
    if not segs:
        return 0.0
    segs.sort()
    merged = [list(segs[0])]
    for lo, hi in segs[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    gaps = [(merged[i + 1][0] - merged[i][1], (merged[i + 1][0] + merged[i][1]) / 2) for i in range(len(merged) - 1)]
    gaps.append((merged[0][0] + TWO_PI - merged[-1][1], (merged[0][0] + TWO_PI + merged[-1][1]) / 2))
    width, mid = max(gaps)
    if width <= 0:
        return None
    return mid % TWO_PI


def _axis_clear(instance: DiskInstance) -> bool:
    return all(not angular_extent(instance, i).hits_axis for i in range(instance.n))


def normalize_pole(instance: DiskInstance, margin: float | None = None) -> DiskInstance:
    """Isometric re-coordinatisation in which no disk meets the polar axis.

    Prefers a pure rotation (when no disk holds the pole and the angular
    extents leave a gap). Otherwise the pole is pushed along the direction
    whose ray leaves the union of disks earliest, to just past the last exit
    point, and the new axis continues away from the old pole.
    """
    if instance.space is not Space.HYPERBOLIC:
        raise InputError("normalize_pole expects a hyperbolic instance")
    if instance.n == 0 or _axis_clear(instance):
        return instance
    r = instance.radius
    margin = 0.5 * min(r, 1.0) if margin is None else margin
    exts = [angular_extent(instance, i) for i in range(instance.n)]
    if not any(e.contains_pole for e in exts):
        gap = _gap_direction([(e.theta_min, e.theta_max) for e in exts])
        if gap is not None:
            centers = tuple((b, (t - gap) % TWO_PI) for b, t in instance.centers)
            rotated = DiskInstance(instance.space, r, centers)
            if _axis_clear(rotated):
                return rotated

    candidates = [TWO_PI * k / 64 for k in range(64)]
    for e in exts:
        if not e.contains_pole:
            candidates.append((e.theta_min - 1e-6) % TWO_PI)
            candidates.append((e.theta_max + 1e-6) % TWO_PI)

    def exit_distance(direction: float) -> float:
        far = 0.0
        for b, t in instance.centers:
            x = _ray_exit(b, t - direction, r)
            if x is not None:
                far = max(far, x)
        return far

    scored = sorted((exit_distance(c), c) for c in candidates)
    for rho, direction in scored[:8]:
        for extra in (margin, 2 * margin + 1.0):
            D = rho + extra
            centers = tuple(_translate_along(b, t - direction, D) for b, t in instance.centers)
            moved = DiskInstance(instance.space, r, centers)
            if _axis_clear(moved):
                return moved
    # last resort: pole beyond every disk along the first direction
    direction = scored[0][1]
    D = max(b for b, _ in instance.centers) + r + 1.0
    centers = tuple(_translate_along(b, t - direction, D) for b, t in instance.centers)
    return DiskInstance(instance.space, r, centers)


# --- stereographic projection --------------------------------------------------


def polar_to_xyz(b: float, theta: float) -> np.ndarray:
    return np.array([math.sin(b) * math.cos(theta), math.sin(b) * math.sin(theta), math.cos(b)])


def xyz_to_polar(x: np.ndarray) -> tuple[float, float]:
    x = x / np.linalg.norm(x)
    b = math.acos(max(-1.0, min(1.0, float(x[2]))))
    theta = math.atan2(float(x[1]), float(x[0])) % TWO_PI
    return b, theta


@dataclass(frozen=True)
class PlanarDisk:
    """Image of a spherical cap: a closed disk, or (``complement``) the closed
    exterior of an open disk."""

    center: tuple[float, float]
    radius: float
    complement: bool = False


def _rotation_to_north(p: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector ``p`` to ``(0, 0, 1)``."""
    north = np.array([0.0, 0.0, 1.0])
    v = np.cross(p, north)
    s = np.linalg.norm(v)
    c = float(np.dot(p, north))
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    k = v / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * K @ K


def stereographic_project(instance: DiskInstance, avoid_point: Sequence[float], seed: int = 0) -> tuple[list[PlanarDisk], tuple[float, float]]:
    """Project every cap from ``avoid_point`` (polar coordinates) onto the plane.

    If the projection point lies on a cap boundary it is perturbed. Returns
    the planar images and the projection point actually used.
    """
    if instance.space is not Space.SPHERICAL:
        raise InputError("stereographic projection expects a spherical instance")
    r = instance.radius
    rng = np.random.default_rng(seed)
    p_polar = (float(avoid_point[0]), float(avoid_point[1]))
    for _ in range(100):
        if all(abs(distance(Space.SPHERICAL, p_polar, c) - r) > 1e-7 for c in instance.centers):
            break
        p_polar = (min(math.pi, max(0.0, p_polar[0] + 1e-4 * rng.standard_normal())),
                   (p_polar[1] + 1e-4 * rng.standard_normal()) % TWO_PI)
    R = _rotation_to_north(polar_to_xyz(*p_polar))
    out = []
    for b, th in instance.centers:
        beta, gamma = xyz_to_polar(R @ polar_to_xyz(b, th))
        # boundary points on the meridian through the projection point, at
        # angles beta -/+ r from it; their images lie on the ray at angle gamma
        # with signed distance cot(a / 2)
        a1, a2 = beta - r, beta + r
        rho1 = math.cos(a1 / 2) / math.sin(a1 / 2)
        rho2 = math.cos(a2 / 2) / math.sin(a2 / 2)
        mid = (rho1 + rho2) / 2
        rad = abs(rho1 - rho2) / 2
        out.append(PlanarDisk((mid * math.cos(gamma), mid * math.sin(gamma)), rad, complement=beta < r))
    return out, p_polar


def planar_objects_intersect(a: PlanarDisk, b: PlanarDisk, eps: float = EPS) -> bool:
    if a.complement and b.complement:
        return True
    d = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
    if not a.complement and not b.complement:
        return d <= a.radius + b.radius + eps * max(1.0, a.radius + b.radius)
    disk, hole = (a, b) if b.complement else (b, a)
    # the disk misses the closed exterior only if it sits inside the open hole
    return d + disk.radius >= hole.radius - eps * max(1.0, hole.radius)
