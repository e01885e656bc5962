"""Planar primitives for sector navigation.

The plane is identified with the complex numbers: a point is a python
``complex`` (helpers accept ``(x, y)`` pairs too).  Angles follow the
``[0, 2*pi)`` convention.  The cross around a point ``x`` is the family of
``p`` half-lines ``HL_j(x) = x + {r*e^{i*theta*(j-1/2)}, r > 0}`` bounding the
``p`` angular sectors ``x + e^{i*k*theta}*Sect(theta)``; a decision domain is
the sector truncated either by a disk cap (radius key) or by a line
orthogonal to the bisector (projection key).  The apex is excluded from
every decision domain.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePair

TWO_PI = 2.0 * math.pi

# Boundary tolerance for membership/tie tests on hand-built fixtures.
# Randomly sampled points never sit on a boundary, so this only guards
# deliberately degenerate inputs.
EPS = 1e-12

SECTOR = "sector"
DISK = "disk"
TRIANGLE = "triangle"


def as_point(p) -> complex:
    """Coerce ``complex`` or ``(x, y)`` to a finite complex point."""
    if isinstance(p, complex):
        z = p
    elif isinstance(p, (int, float)):
        z = complex(p, 0.0)
    else:
        x, y = p
        z = complex(x, y)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"point has non-finite coordinates: {p!r}")
    return z


def norm_angle(a: float) -> float:
    """Reduce an angle to ``[0, 2*pi)``."""
    a = math.fmod(a, TWO_PI)
    return a + TWO_PI if a < 0.0 else a


@dataclass(frozen=True)
class CrossParams:
    """Sector count ``p_theta >= 3``; the sector angle is ``2*pi/p_theta``."""

    p_theta: int

    def __post_init__(self):
        if self.p_theta < 3:
            raise ValueError("p_theta must be >= 3")

    @property
    def theta(self) -> float:
        return TWO_PI / self.p_theta


@dataclass(frozen=True)
class SectorFrame:
    """An anchored decision domain.

    ``direction`` is the bisector angle, ``half_angle`` the angular half-width.
    ``shape`` is ``"sector"`` (unbounded), ``"disk"`` (points within distance
    ``h`` of the apex) or ``"triangle"`` (points whose projection on the
    bisector is at most ``h``).  ``h`` is ignored for ``"sector"``.
    """

    apex: complex
    direction: float
    half_angle: float
    shape: str = SECTOR
    h: float = math.inf

    def __post_init__(self):
        if self.shape not in (SECTOR, DISK, TRIANGLE):
            raise ValueError(f"unknown shape {self.shape!r}")
        if not 0.0 < self.half_angle < math.pi:
            raise ValueError("half_angle must be in (0, pi)")
        if self.shape != SECTOR and not self.h > 0.0:
            raise ValueError("cap height h must be > 0")


def sector_index(s, t, cross: CrossParams) -> int:
    """Index ``k`` of the fixed angular sector around ``s`` containing ``t``.

    When ``t`` sits exactly on a border half-line it belongs to two sectors;
    the smaller valid index is returned so repeated runs are reproducible.
    """
    s = as_point(s)
    t = as_point(t)
    if s == t:
        raise DegeneratePair("sector_index needs s != t")
    theta = cross.theta
    ang = norm_angle(cmath.phase(t - s))
    k = math.floor(ang / theta + 0.5)
    if k >= cross.p_theta:
        k = 0
    # Exactly on the first border of sector k: the point is shared with
    # sector k-1, which has the smaller index (except across the 0 wrap,
    # handled above since angles near 2*pi map to k = p and then 0).
    if k >= 1 and abs(ang - (k - 0.5) * theta) <= EPS:
        k -= 1
    return k


def _frame_coords(p: complex, frame: SectorFrame) -> tuple[float, float]:
    """Coordinates of ``p`` in the frame rotated so the bisector is the +x axis."""
    d = p - frame.apex
    c = math.cos(frame.direction)
    s = math.sin(frame.direction)
    return d.real * c + d.imag * s, -d.real * s + d.imag * c


def in_decision_domain(p, frame: SectorFrame) -> bool:
    """Closed-sector membership, apex excluded, cap included."""
    p = as_point(p)
    x, y = _frame_coords(p, frame)
    r = math.hypot(x, y)
    if r == 0.0:
        return False
    # |angle| <= half_angle <=> cos(angle) >= cos(half_angle)
    if x < r * (math.cos(frame.half_angle) - EPS):
        return False
    if frame.shape == DISK:
        return r <= frame.h + EPS
    if frame.shape == TRIANGLE:
        return 0.0 < x <= frame.h + EPS
    return True


def border_distance(p, frame: SectorFrame) -> float:
    """Distance from ``p`` to the first border half-line of the frame.

    The first border leaves the apex at angle ``direction - half_angle``.
    Used as the deterministic tie-break key when several candidates share
    the minimal radius.
    """
    p = as_point(p)
    x, y = _frame_coords(p, frame)
    # the border direction is at angle -half_angle in the bisector frame
    ch = math.cos(frame.half_angle)
    sh = math.sin(frame.half_angle)
    along = x * ch - y * sh          # projection on the border direction
    across = x * sh + y * ch         # offset from the border line
    if along >= 0.0:
        return abs(across)
    return math.hypot(x, y)          # foot falls behind the apex


def corner_point(s, t, cross: CrossParams) -> complex:
    """Corner of the two-leg limit polyline between ``s`` and ``t``.

    Of the two lines through ``t`` parallel to the borders of the sector of
    ``s`` containing ``t``, each meets the bisecting half-line once; the
    intersection closer to ``s`` is returned.
    """
    s = as_point(s)
    t = as_point(t)
    if s == t:
        raise DegeneratePair("corner_point needs s != t")
    theta = cross.theta
    k = sector_index(s, t, cross)
    z = (t - s) * cmath.exp(-1j * k * theta)   # bisector becomes the +x axis
    x = z.real - abs(z.imag) / math.tan(theta / 2.0)
    return s + x * cmath.exp(1j * k * theta)


def gamma_path(s, t, cross: CrossParams) -> list[complex]:
    """Two-leg limit polyline ``[s, corner] + [corner, t]``.

    Collapses to ``[s]`` when ``s == t`` and to the single segment ``[s, t]``
    when ``t`` lies on the bisector (corner == t).
    """
    s = as_point(s)
    t = as_point(t)
    if s == t:
        return [s]
    i = corner_point(s, t, cross)
    if i == t:
        return [s, t]
    return [s, i, t]


def weighted_gamma_length(s, t, c1: float, c2: float, cross: CrossParams) -> float:
    """``c1*|corner - s| + c2*|t - corner|`` for positive weights."""
    if not (c1 > 0.0 and c2 > 0.0):
        raise ValueError("weights must be positive")
    s = as_point(s)
    t = as_point(t)
    if s == t:
        return 0.0
    i = corner_point(s, t, cross)
    return c1 * abs(i - s) + c2 * abs(t - i)


def polyline_length(poly) -> float:
    pts = [as_point(p) for p in poly]
    return sum(abs(b - a) for a, b in zip(pts, pts[1:]))


def sample_polyline(poly, step: float) -> np.ndarray:
    """Points along a polyline at arc-length spacing <= ``step`` (vertices kept).

    Returns an ``(m, 2)`` array; a single-vertex polyline yields one row.
    """
    if step <= 0.0:
        raise ValueError("step must be > 0")
    pts = [as_point(p) for p in poly]
    if not pts:
        raise ValueError("empty polyline")
    out = [pts[0]]
    for a, b in zip(pts, pts[1:]):
        seg = abs(b - a)
        if seg == 0.0:
            continue
        m = max(1, math.ceil(seg / step))
        for j in range(1, m + 1):
            out.append(a + (b - a) * (j / m))
    arr = np.empty((len(out), 2))
    arr[:, 0] = [z.real for z in out]
    arr[:, 1] = [z.imag for z in out]
    return arr


def _directed_max_min(a: np.ndarray, b: np.ndarray) -> float:
    """max over rows of ``a`` of the min distance to rows of ``b``."""
    worst = 0.0
    # chunked to keep the pairwise-distance block small
    for lo in range(0, len(a), 512):
        blk = a[lo:lo + 512]
        d2 = (blk[:, None, 0] - b[None, :, 0]) ** 2 + (blk[:, None, 1] - b[None, :, 1]) ** 2
        worst = max(worst, float(np.sqrt(d2.min(axis=1)).max()))
    return worst


def hausdorff_distance(poly_a, poly_b, resolution: float) -> float:
    """Symmetric Hausdorff distance between two polylines.

    Both polylines are sampled at arc-length step <= ``resolution`` and the
    max of the two directed max-min distances over the samples is returned;
    the approximation differs from the exact value by at most ``resolution``.
    """
    a = sample_polyline(poly_a, resolution)
    b = sample_polyline(poly_b, resolution)
    return max(_directed_max_min(a, b), _directed_max_min(b, a))
