"""Random stopping-place sets with a uniform-grid index for sector queries.

Sampling is deterministic given a seed.  The grid index stores point ids in
CSR layout (ids sorted by cell, plus per-cell offsets); sector queries expand
square rings of cells around the apex, pruning cells that cannot intersect
the query cone, and stop as soon as no unvisited cell can beat the best key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import DensitySpec, Rect
from .errors import EmptyPointSet, TooFewPoints
from .geometry import EPS, as_point, norm_angle

__all__ = [
    "GridIndex", "PointSet", "Diagnostics",
    "sample_ppp", "sample_iid", "nearest_in_sector",
    "navmax", "maxball", "r_min", "save_points", "load_points",
]


class GridIndex:
    """Uniform grid over the domain rectangle mapping cells to point ids."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray, rect: Rect, cell: float):
        self.rect = rect
        self.cell = cell
        self.nx = max(1, math.ceil(rect.width / cell))
        self.ny = max(1, math.ceil(rect.height / cell))
        ix = np.clip(((xs - rect.x0) / cell).astype(np.int64), 0, self.nx - 1)
        iy = np.clip(((ys - rect.y0) / cell).astype(np.int64), 0, self.ny - 1)
        flat = ix * self.ny + iy
        self.order = np.argsort(flat, kind="stable")
        self.starts = np.zeros(self.nx * self.ny + 1, dtype=np.int64)
        np.cumsum(np.bincount(flat, minlength=self.nx * self.ny), out=self.starts[1:])

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        i = min(self.nx - 1, max(0, int((x - self.rect.x0) / self.cell)))
        j = min(self.ny - 1, max(0, int((y - self.rect.y0) / self.cell)))
        return i, j

    def ids_in_cell(self, i: int, j: int) -> np.ndarray:
        c = i * self.ny + j
        return self.order[self.starts[c]:self.starts[c + 1]]

    def ring_cells(self, i0: int, j0: int, k: int) -> list[tuple[int, int]]:
        """Cells at Chebyshev distance k from (i0, j0), clipped to the grid."""
        if k == 0:
            return [(i0, j0)] if 0 <= i0 < self.nx and 0 <= j0 < self.ny else []
        cells = []
        for i in range(i0 - k, i0 + k + 1):
            if 0 <= i < self.nx:
                if 0 <= j0 - k < self.ny:
                    cells.append((i, j0 - k))
                if 0 <= j0 + k < self.ny:
                    cells.append((i, j0 + k))
        for j in range(j0 - k + 1, j0 + k):
            if 0 <= j < self.ny:
                if 0 <= i0 - k < self.nx:
                    cells.append((i0 - k, j))
                if 0 <= i0 + k < self.nx:
                    cells.append((i0 + k, j))
        return cells

    def max_ring(self, i0: int, j0: int) -> int:
        return max(i0, self.nx - 1 - i0, j0, self.ny - 1 - j0)


@dataclass(eq=False)
class PointSet:
    """Immutable sampled point set plus its grid index.

    ``model`` is ``("ppp", n)`` or ``("iid", n)``; the intensity actually
    sampled is ``n * f`` for the first and ``n`` i.i.d. draws from the
    normalized profile for the second.
    """

    points: np.ndarray            # (N, 2) float64
    density: DensitySpec
    seed: int
    model: tuple
    index: GridIndex = field(repr=False, default=None)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        self.points.setflags(write=False)
        if self.index is None:
            self.index = GridIndex(self.points[:, 0], self.points[:, 1],
                                   self.density.domain, self._default_cell())
        self.xs = self.points[:, 0]
        self.ys = self.points[:, 1]

    def _default_cell(self) -> float:
        # about one expected point per cell at the densest spot
        kind, n = self.model
        rate = max(n * self.density.M_f if kind == "ppp"
                   else n * self.density.normalized().M_f, 1.0)
        cell = 1.0 / math.sqrt(rate)
        side = min(self.density.domain.width, self.density.domain.height)
        return float(min(max(cell, side / 2048.0), side))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> float:
        return self.model[1]


def _dedupe(rng, pts: np.ndarray, draw_one) -> np.ndarray:
    """Redraw rows until all points are distinct (float-collision guard)."""
    while len(pts) > 1:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == len(pts):
            break
        dup = np.setdiff1d(np.arange(len(pts)), first)
        for i in dup:
            pts[i] = draw_one(rng)
    return pts


def _thinned_uniform(rng, density: DensitySpec, count: int) -> np.ndarray:
    d = density.domain
    xs = rng.uniform(d.x0, d.x1, count)
    ys = rng.uniform(d.y0, d.y1, count)
    keep = rng.random(count) * density.M_f < density.value(xs, ys)
    return np.column_stack([xs[keep], ys[keep]])


def _draw_one_accepted(density: DensitySpec):
    d = density.domain

    def draw(rng):
        while True:
            x = rng.uniform(d.x0, d.x1)
            y = rng.uniform(d.y0, d.y1)
            if rng.random() * density.M_f < density.at(complex(x, y)):
                return (x, y)
    return draw


def sample_ppp(density: DensitySpec, n: float, seed: int) -> PointSet:
    """Poisson process with intensity ``n * f``: Poisson count, then thinning
    of uniform candidates against the constant envelope ``n * M_f``."""
    if not n > 0.0:
        raise ValueError("n must be > 0")
    rng = np.random.default_rng(seed)
    envelope = rng.poisson(n * density.M_f * density.domain.area)
    pts = _thinned_uniform(rng, density, envelope)
    pts = _dedupe(rng, pts, _draw_one_accepted(density))
    return PointSet(pts, density, seed, ("ppp", float(n)))


def sample_iid(density: DensitySpec, n: int, seed: int) -> PointSet:
    """Exactly ``n`` i.i.d. points with the normalized profile as density."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    out = np.empty((0, 2))
    d = density.domain
    while len(out) < n:
        want = n - len(out)
        batch = max(32, int(1.2 * want * density.M_f * d.area / max(density.integral, 1e-300)))
        got = _thinned_uniform(rng, density, batch)
        out = np.vstack([out, got])
    pts = _dedupe(rng, out[:n].copy(), _draw_one_accepted(density))
    return PointSet(pts, density, seed, ("iid", int(n)))


# ---------------------------------------------------------------------------
# sector queries
# ---------------------------------------------------------------------------

def _candidate_key(dx, dy, nu: float, half: float, triangle: bool):
    """Vectorized (in-sector mask, key, first-border distance)."""
    c = math.cos(nu)
    s = math.sin(nu)
    x = dx * c + dy * s
    y = -dx * s + dy * c
    r = np.hypot(x, y)
    ch = math.cos(half)
    sh = math.sin(half)
    inside = (r > 0.0) & (x >= r * (ch - EPS))
    key = x if triangle else r
    # distance to the first border half-line (direction -half in this frame)
    along = x * ch - y * sh
    border = np.where(along >= 0.0, np.abs(x * sh + y * ch), r)
    return inside, key, border


def _sector_scan(ps: PointSet, apex: complex, nu: float, half: float,
                 triangle: bool):
    """Best (key, border, id) over indexed points in the infinite sector."""
    idx = ps.index
    ax, ay = apex.real, apex.imag
    i0, j0 = idx.cell_of(ax, ay)
    cell = idx.cell
    key_factor = math.cos(half) if (triangle and half < 0.5 * math.pi) else \
        (0.0 if triangle else 1.0)
    convex = half <= 0.5 * math.pi
    ulo = (math.cos(nu - half), math.sin(nu - half))
    uhi = (math.cos(nu + half), math.sin(nu + half))
    best = None  # (key, border, id)
    kmax = idx.max_ring(i0, j0)
    for k in range(kmax + 1):
        if best is not None:
            bound = max(0.0, (k - 1)) * cell * key_factor
            if bound > best[0]:
                break
        gathered = []
        for (i, j) in idx.ring_cells(i0, j0, k):
            if convex and k > 0:
                # prune cells wholly outside one of the cone's half-planes
                x_lo = idx.rect.x0 + i * cell - ax
                x_hi = x_lo + cell
                y_lo = idx.rect.y0 + j * cell - ay
                y_hi = y_lo + cell
                cr = (ulo[0] * y_lo - ulo[1] * x_lo, ulo[0] * y_lo - ulo[1] * x_hi,
                      ulo[0] * y_hi - ulo[1] * x_lo, ulo[0] * y_hi - ulo[1] * x_hi)
                if max(cr) < 0.0:
                    continue
                cr = (uhi[0] * y_lo - uhi[1] * x_lo, uhi[0] * y_lo - uhi[1] * x_hi,
                      uhi[0] * y_hi - uhi[1] * x_lo, uhi[0] * y_hi - uhi[1] * x_hi)
                if min(cr) > 0.0:
                    continue
            ids = idx.ids_in_cell(i, j)
            if len(ids):
                gathered.append(ids)
        if not gathered:
            continue
        ids = np.concatenate(gathered)
        inside, key, border = _candidate_key(ps.xs[ids] - ax, ps.ys[ids] - ay,
                                             nu, half, triangle)
        if not inside.any():
            continue
        ids = ids[inside]
        key = key[inside]
        border = border[inside]
        j = np.lexsort((ids, border, key))[0]
        cand = (float(key[j]), float(border[j]), int(ids[j]))
        if best is None or cand < best:
            best = cand
    return best


def nearest_in_sector(ps: PointSet, apex, direction: float, half_angle: float,
                      shape: str, extra=None):
    """Minimal-key element of the point set (plus optional ``extra`` point)
    inside the infinite sector anchored at ``apex``.

    The key is the distance to the apex for ``shape="disk"`` and the
    projection on the bisector for ``shape="triangle"``; ties break on the
    distance to the first border, then on point id (``extra`` wins last
    resort ties).  Returns ``(point, key, id)`` with ``id = -1`` for the
    extra point, or ``None`` when the sector is empty.
    """
    apex = as_point(apex)
    nu = norm_angle(direction)
    triangle = shape == "triangle"
    if shape not in ("disk", "triangle"):
        raise ValueError(f"shape must be 'disk' or 'triangle', got {shape!r}")
    # beyond a half-pi half-angle the projection cap degenerates (the key
    # would be unbounded below); the triangle family stops there
    if triangle and half_angle > 0.5 * math.pi + EPS:
        raise ValueError("triangle queries need half_angle <= pi/2")
    best = _sector_scan(ps, apex, nu, half_angle, triangle) if len(ps) else None
    if extra is not None:
        t = as_point(extra)
        inside, key, border = _candidate_key(np.array([t.real - apex.real]),
                                             np.array([t.imag - apex.imag]),
                                             nu, half_angle, triangle)
        if inside[0]:
            cand = (float(key[0]), float(border[0]), -1)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    key, _, pid = best
    if pid == -1:
        return as_point(extra), key, -1
    return complex(ps.xs[pid], ps.ys[pid]), key, pid


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostics:
    navmax: float
    maxball: int
    r_min: float
    grid_step: float


def navmax(ps: PointSet, theta: float, grid_step: float, directions: int = 64) -> float:
    """Discretized sup, over apexes on a lattice of the inset domain and over
    evenly spaced aim directions, of the minimal disk-sector radius containing
    a point.

    A lattice lower bound of the true continuum sup; reported as a
    diagnostic, not a certified bound.
    """
    if grid_step <= 0.0:
        raise ValueError("grid_step must be > 0")
    if len(ps) == 0:
        raise EmptyPointSet("navmax needs a non-empty point set")
    inset = ps.density.domain.inset(ps.density.inset_a)
    idx = ps.index
    half = theta / 2.0
    nbins = directions
    bin_w = 2.0 * math.pi / nbins
    width = half / bin_w
    worst = 0.0
    axs = np.arange(inset.x0, inset.x1 + 1e-9, grid_step)
    ays = np.arange(inset.y0, inset.y1 + 1e-9, grid_step)
    for ax in axs:
        for ay in ays:
            i0, j0 = idx.cell_of(ax, ay)
            per_dir = np.full(nbins, np.inf)
            kmax = idx.max_ring(i0, j0)
            for k in range(kmax + 1):
                # aims whose sector has no point at all are skipped; once
                # every aim is covered, farther rings can only add points
                # beyond the current worst bin
                if np.isfinite(per_dir).all() and (k - 1) * idx.cell >= per_dir.max():
                    break
                ids = [idx.ids_in_cell(i, j) for (i, j) in idx.ring_cells(i0, j0, k)]
                ids = [a for a in ids if len(a)]
                if not ids:
                    continue
                ids = np.concatenate(ids)
                dx = ps.xs[ids] - ax
                dy = ps.ys[ids] - ay
                r = np.hypot(dx, dy)
                keep = r > 0.0
                if not keep.any():
                    continue
                r = r[keep]
                # a point at angle phi is caught by every aim within half
                ctr = np.arctan2(dy[keep], dx[keep]) / bin_w
                lo = np.ceil(ctr - width).astype(np.int64)
                cnt = (np.floor(ctr + width).astype(np.int64) - lo + 1)
                bins = (np.repeat(lo, cnt)
                        + (np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)))
                np.minimum.at(per_dir, bins % nbins, np.repeat(r, cnt))
            finite = per_dir[np.isfinite(per_dir)]
            if len(finite):
                worst = max(worst, float(finite.max()))
    return worst


def maxball(ps: PointSet, r: float, grid_step: float) -> int:
    """Max number of points in an open ball of radius ``r`` centered on a
    lattice of the inset domain."""
    if r <= 0.0:
        raise ValueError("r must be > 0")
    if grid_step <= 0.0:
        raise ValueError("grid_step must be > 0")
    if len(ps) == 0:
        return 0
    inset = ps.density.domain.inset(ps.density.inset_a)
    cx = np.arange(inset.x0, inset.x1 + 1e-9, grid_step)
    cy = np.arange(inset.y0, inset.y1 + 1e-9, grid_step)
    counts = np.zeros((len(cx), len(cy)), dtype=np.int64)
    # stencil pass: each point contributes to every lattice center within r
    base_i = np.floor((ps.xs - inset.x0) / grid_step).astype(np.int64)
    base_j = np.floor((ps.ys - inset.y0) / grid_step).astype(np.int64)
    reach = math.ceil(r / grid_step) + 1
    for di in range(-reach, reach + 1):
        ii = base_i + di
        ok_i = (ii >= 0) & (ii < len(cx))
        for dj in range(-reach, reach + 1):
            jj = base_j + dj
            ok = ok_i & (jj >= 0) & (jj < len(cy))
            if not ok.any():
                continue
            d2 = (ps.xs[ok] - cx[ii[ok]]) ** 2 + (ps.ys[ok] - cy[jj[ok]]) ** 2
            hit = d2 < r * r
            if hit.any():
                np.add.at(counts, (ii[ok][hit], jj[ok][hit]), 1)
    return int(counts.max())


def r_min(ps: PointSet) -> float:
    """Exact minimal pairwise distance, via widening grid neighborhoods."""
    if len(ps) < 2:
        raise TooFewPoints("r_min needs at least two points")
    idx = ps.index
    reach = 1
    while True:
        best = math.inf
        for i in range(idx.nx):
            for j in range(idx.ny):
                here = idx.ids_in_cell(i, j)
                if not len(here):
                    continue
                neigh = [here]
                # forward half-neighborhood so each pair is seen once
                for di in range(0, reach + 1):
                    for dj in range(-reach if di > 0 else 1, reach + 1):
                        ii, jj = i + di, j + dj
                        if 0 <= ii < idx.nx and 0 <= jj < idx.ny:
                            a = idx.ids_in_cell(ii, jj)
                            if len(a):
                                neigh.append(a)
                if len(here) > 1:
                    d = _min_pair(ps, here, here)
                    best = min(best, d)
                for a in neigh[1:]:
                    best = min(best, _min_pair(ps, here, a))
        if best <= reach * idx.cell or reach >= max(idx.nx, idx.ny):
            return best
        reach = 2 * reach if math.isinf(best) else max(reach + 1, math.ceil(best / idx.cell))


def _min_pair(ps: PointSet, a: np.ndarray, b: np.ndarray) -> float:
    dx = ps.xs[a][:, None] - ps.xs[b][None, :]
    dy = ps.ys[a][:, None] - ps.ys[b][None, :]
    d2 = dx * dx + dy * dy
    if a is b:
        np.fill_diagonal(d2, np.inf)
    m = float(d2.min())
    return math.sqrt(m) if np.isfinite(m) else math.inf


def diagnose(ps: PointSet, theta: float, grid_step: float, r: float) -> Diagnostics:
    return Diagnostics(navmax=navmax(ps, theta, grid_step),
                       maxball=maxball(ps, r, grid_step),
                       r_min=r_min(ps), grid_step=grid_step)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def save_points(ps: PointSet, path) -> None:
    d = ps.density
    with open(path, "w") as fh:
        fh.write(f"# model={ps.model[0]} n={ps.model[1]!r} seed={ps.seed}\n")
        fh.write(f"# domain={d.domain.x0!r},{d.domain.y0!r},{d.domain.x1!r},{d.domain.y1!r}"
                 f" inset_a={d.inset_a!r}\n")
        fh.write(f"# density={d.kind}:{','.join(repr(p) for p in d.params)}\n")
        fh.write("x,y\n")
        for x, y in ps.points:
            fh.write(f"{float(x)!r},{float(y)!r}\n")


def load_points(path) -> PointSet:
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
            elif line != "x,y":
                x, y = line.split(",")
                rows.append((float(x), float(y)))
    kind, params = meta["density"].split(":")
    x0, y0, x1, y1 = (float(v) for v in meta["domain"].split(","))
    dens = DensitySpec(kind, tuple(float(p) for p in params.split(",")),
                       Rect(x0, y0, x1, y1), float(meta["inset_a"]))
    n = float(meta["n"])
    model = ("ppp", n) if meta["model"] == "ppp" else ("iid", int(n))
    return PointSet(np.array(rows, dtype=float).reshape(-1, 2), dens,
                    int(meta["seed"]), model)


