"""Closed-form limit constants and numerically integrated limit curves.

At intensity ``n*f`` every hop shrinks like ``1/sqrt(n*f(z))``, so after
rescaling time by ``sqrt(n)`` the traveller position follows the flow

    rho'(x) = lam * e^{i*nu} / sqrt(f(rho(x)))

for a speed constant ``lam`` that depends on the navigation kind, and an
accumulated power cost follows the coupled equation
``C'(x) = q / f(rho(x))^{g/2}`` with ``q`` the mean ``|hop|^g`` at unit
intensity.  This module evaluates the speed/stretch constants, solves the
flow with an explicit Euler scheme, and combines both into per-pair
predictions of path length, stage count, and power costs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .density import DensitySpec
from .errors import (GammaLeavesInset, OutOfRangeTheta, SegmentLeavesDomain,
                     StepOutOfDomain)
from .geometry import CrossParams, as_point, corner_point, weighted_gamma_length
from .navigation import NavKind, stage_samples

__all__ = [
    "ConstantsRow", "constants", "McConstants", "mc_constants",
    "OdeSpec", "LimitCurve", "FixedTime", "HitPoint", "LeaveInset",
    "euler_solve", "hit_time", "predict_straight", "predict_cross",
    "predict_cost", "constants_to_json",
]


# -- closed forms (unit-intensity hop laws) ---------------------------------

def _asinh(x: float) -> float:
    return math.asinh(x)


def _c_bis_t(theta: float) -> float:
    """Mean advance along the axis, projection-capped domain."""
    return 0.5 * math.sqrt(math.pi / math.tan(theta / 2.0))


def _q_bis_t(theta: float) -> float:
    """Mean |hop| / mean advance along the axis, projection-capped domain."""
    b = theta / 2.0
    return 0.5 * (1.0 / math.cos(b) + _asinh(math.tan(b)) / math.tan(b))


def _c_bor_t(theta: float) -> float:
    """Mean advance along the first border, projection-capped domain."""
    b = theta / 2.0
    return math.sqrt(math.pi * math.cos(b) ** 3 / (4.0 * math.sin(b)))


def _q_bor_t(theta: float) -> float:
    b = theta / 2.0
    return 0.5 * (1.0 / math.cos(b) ** 2 + _asinh(math.tan(b)) / math.sin(b))


def _e_l_dy(theta: float) -> float:
    """Mean hop length, disk-capped domain."""
    return math.sqrt(math.pi / (2.0 * theta))


def _c_bis_y(theta: float) -> float:
    return math.sqrt(2.0 * math.pi) * math.sin(theta / 2.0) / theta ** 1.5


def _c_bor_y(theta: float) -> float:
    return math.sqrt(math.pi / 2.0) * math.sin(theta) / theta ** 1.5


def _q_bis_y(theta: float) -> float:
    return (theta / 2.0) / math.sin(theta / 2.0)


def _q_bor_y(theta: float) -> float:
    return theta / math.sin(theta)


_T_FAMILY = {NavKind.THETA, NavKind.STRAIGHT_THETA, NavKind.DIRECTED_THETA,
             NavKind.RANDOM_NORTH_THETA}


def moment_closed_form(kind: NavKind, theta: float, g: float) -> float | None:
    """E(|hop|^g) at unit intensity where a closed form exists, else None.

    Disk-capped hops have ``|hop| = sqrt(2*E/theta)`` for an Exp(1) variable
    E, giving ``(2/theta)^{g/2} * Gamma(1 + g/2)`` for every g >= 0; the
    projection-capped family only has simple forms for g in {0, 1, 2}.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    if g == 0:
        return 1.0
    if kind in _T_FAMILY:
        if g == 1:
            return _c_bis_t(theta) * _q_bis_t(theta)
        if g == 2:
            b = theta / 2.0
            return (1.0 + math.tan(b) ** 2 / 3.0) / math.tan(b)
        return None
    return (2.0 / theta) ** (g / 2.0) * math.gamma(1.0 + g / 2.0)


_RANGES = {
    NavKind.YAO: ("closed", math.pi / 3.0),
    NavKind.THETA: ("closed", math.pi / 3.0),
    NavKind.STRAIGHT_YAO: ("open", math.pi / 2.0),
    NavKind.STRAIGHT_THETA: ("closed", math.pi / 2.0),
    NavKind.RANDOM_NORTH_THETA: ("closed", math.pi / 3.0),
    NavKind.RANDOM_NORTH_YAO: ("closed", math.pi / 3.0),
}


@dataclass(frozen=True)
class ConstantsRow:
    """Limit constants of one navigation kind at one angle.

    ``c_bis`` is the limiting speed along the sector bisector, ``c_bor``
    along the sector border (cross kinds only); ``q_bis``/``q_bor`` are the
    corresponding length-to-progress ratios; ``e_l``/``e_x``/``e_xi`` are the
    unit-intensity hop moments they derive from (``q_bis = e_l / e_x``).
    """

    kind: NavKind
    theta: float
    c_bis: float
    q_bis: float
    e_l: float
    e_x: float
    c_bor: float | None = None
    q_bor: float | None = None
    e_xi: float | None = None

    def e_l_pow(self, g: float) -> float | None:
        return moment_closed_form(self.kind, self.theta, g)

    def as_dict(self) -> dict:
        d = {"kind": self.kind.value, "theta": self.theta,
             "c_bis": self.c_bis, "q_bis": self.q_bis,
             "e_l": self.e_l, "e_x": self.e_x}
        if self.c_bor is not None:
            d.update(c_bor=self.c_bor, q_bor=self.q_bor, e_xi=self.e_xi)
        return d


def constants(kind, theta: float) -> ConstantsRow:
    """Exact constants row; raises OutOfRangeTheta outside the kind's
    admissible angle range."""
    kind = NavKind(kind)
    if kind not in _RANGES:
        raise OutOfRangeTheta(f"no constants table for {kind.value}; "
                              "use mc_constants for directed kinds")
    mode, lim = _RANGES[kind]
    # the closed bounds tolerate hand-rounded angles such as 1.5708
    ok = theta < lim - 1e-15 if mode == "open" else theta <= lim * (1.0 + 1e-5)
    if not (theta > 0.0 and ok):
        raise OutOfRangeTheta(f"theta={theta:g} outside the {kind.value} range")
    b = theta / 2.0
    if kind in (NavKind.THETA, NavKind.STRAIGHT_THETA):
        row = ConstantsRow(kind, theta, c_bis=_c_bis_t(theta), q_bis=_q_bis_t(theta),
                           e_l=_c_bis_t(theta) * _q_bis_t(theta), e_x=_c_bis_t(theta))
        if kind is NavKind.THETA:
            row = ConstantsRow(kind, theta, row.c_bis, row.q_bis, row.e_l, row.e_x,
                               c_bor=_c_bor_t(theta), q_bor=_q_bor_t(theta),
                               e_xi=_c_bor_t(theta))
        return row
    if kind in (NavKind.YAO, NavKind.STRAIGHT_YAO):
        e_l = _e_l_dy(theta)
        row = ConstantsRow(kind, theta, c_bis=_c_bis_y(theta), q_bis=_q_bis_y(theta),
                           e_l=e_l, e_x=_c_bis_y(theta))
        if kind is NavKind.YAO:
            row = ConstantsRow(kind, theta, row.c_bis, row.q_bis, row.e_l, row.e_x,
                               c_bor=_c_bor_y(theta), q_bor=_q_bor_y(theta),
                               e_xi=_c_bor_y(theta))
        return row
    if kind is NavKind.RANDOM_NORTH_THETA:
        e_l = _c_bis_t(theta) * _q_bis_t(theta)
        e_x = _c_bis_t(theta) * math.sin(b) / b
        return ConstantsRow(kind, theta, c_bis=e_x, q_bis=e_l / e_x, e_l=e_l, e_x=e_x)
    e_l = _e_l_dy(theta)
    e_x = e_l * (2.0 - 2.0 * math.cos(theta)) / theta ** 2
    return ConstantsRow(kind, theta, c_bis=e_x, q_bis=e_l / e_x, e_l=e_l, e_x=e_x)


def constants_to_json(rows) -> str:
    return json.dumps({f"{r.kind.value}@{r.theta:.12g}": r.as_dict() for r in rows},
                      indent=2, sort_keys=True)


# -- Monte Carlo estimates ---------------------------------------------------

@dataclass(frozen=True)
class McConstants:
    kind: NavKind
    theta: float
    samples: int
    e_l: float
    e_x: float
    e_xi: float
    q_bis: float
    q_bor: float
    se_e_l: float
    se_e_x: float
    se_e_xi: float
    se_q_bis: float
    se_q_bor: float
    e_l_pow: dict
    se_e_l_pow: dict


def _ratio_se(num, den, n):
    """Delta-method standard error of mean(num)/mean(den)."""
    r = num.mean() / den.mean()
    resid = num - r * den
    return float(np.sqrt(resid.var(ddof=1) / n) / den.mean())


def mc_constants(kind, theta: float, samples: int, seed: int,
                 pow_gs=()) -> McConstants:
    """Monte Carlo hop moments of a directed navigation at unit intensity.

    Estimates the bisector and border speeds, the length-to-progress ratios,
    and optionally E(|hop|^g) for each g in ``pow_gs``, all with standard
    errors.
    """
    kind = NavKind(kind)
    if kind not in (NavKind.DIRECTED_THETA, NavKind.DIRECTED_YAO):
        raise ValueError("mc_constants estimates directed-kind hop laws")
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples")
    hops = stage_samples(kind, theta, samples, seed)
    x = hops[:, 0]
    y = hops[:, 1]
    l = np.hypot(x, y)
    b = theta / 2.0
    xi = x * math.cos(b) - y * math.sin(b)   # advance along the first border
    n = samples
    pow_means = {float(g): float((l ** g).mean()) for g in pow_gs}
    pow_ses = {float(g): float((l ** g).std(ddof=1) / math.sqrt(n)) for g in pow_gs}
    return McConstants(
        kind=kind, theta=theta, samples=n,
        e_l=float(l.mean()), e_x=float(x.mean()), e_xi=float(xi.mean()),
        q_bis=float(l.mean() / x.mean()), q_bor=float(l.mean() / xi.mean()),
        se_e_l=float(l.std(ddof=1) / math.sqrt(n)),
        se_e_x=float(x.std(ddof=1) / math.sqrt(n)),
        se_e_xi=float(xi.std(ddof=1) / math.sqrt(n)),
        se_q_bis=_ratio_se(l, x, n), se_q_bor=_ratio_se(l, xi, n),
        e_l_pow=pow_means, se_e_l_pow=pow_ses,
    )


_MC_MOMENT_SEED = 20260808
_MC_MOMENT_SAMPLES = 10_000_000
_mc_moment_cache: dict = {}


def hop_moment(kind: NavKind, theta: float, g: float,
               cache_path=None) -> tuple[float, float]:
    """E(|hop|^g) and its standard error; closed form (se 0) when available,
    otherwise a fixed-seed Monte Carlo estimate, cached in memory and
    optionally in a JSON file recording seed and standard error."""
    kind = NavKind(kind)
    cf = moment_closed_form(kind, theta, g)
    if cf is not None:
        return cf, 0.0
    family = NavKind.DIRECTED_THETA if kind in _T_FAMILY else NavKind.DIRECTED_YAO
    key = (family.value, round(theta, 15), round(float(g), 15))
    if key in _mc_moment_cache:
        return _mc_moment_cache[key]
    if cache_path is not None:
        try:
            with open(cache_path) as fh:
                disk = json.load(fh)
            k = "|".join(map(str, key))
            if k in disk:
                val = (disk[k]["value"], disk[k]["se"])
                _mc_moment_cache[key] = val
                return val
        except FileNotFoundError:
            disk = {}
    mc = mc_constants(family, theta, _MC_MOMENT_SAMPLES, _MC_MOMENT_SEED, pow_gs=(g,))
    val = (mc.e_l_pow[float(g)], mc.se_e_l_pow[float(g)])
    _mc_moment_cache[key] = val
    if cache_path is not None:
        disk["|".join(map(str, key))] = {
            "value": val[0], "se": val[1],
            "seed": _MC_MOMENT_SEED, "samples": _MC_MOMENT_SAMPLES}
        with open(cache_path, "w") as fh:
            json.dump(disk, fh, indent=2, sort_keys=True)
    return val


# -- explicit Euler integration ----------------------------------------------

@dataclass(frozen=True)
class OdeSpec:
    """Flow parameters: speed ``lam`` along direction ``nu`` from ``start``,
    over the given density; optional coupled power-cost accumulation."""

    lam: float
    nu: float
    start: complex
    density: DensitySpec
    h: float
    cost_q: float | None = None
    cost_g: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", as_point(self.start))
        if not self.lam > 0.0:
            raise ValueError("lam must be > 0")
        if not self.h > 0.0:
            raise ValueError("step h must be > 0")
        if (self.cost_q is None) != (self.cost_g is None):
            raise ValueError("cost_q and cost_g go together")


def default_step(density: DensitySpec) -> float:
    return 1e-4 * density.domain.diameter


@dataclass(frozen=True)
class FixedTime:
    t_end: float


@dataclass(frozen=True)
class HitPoint:
    target: complex
    tol: float = 0.0


@dataclass(frozen=True)
class LeaveInset:
    pass


@dataclass
class LimitCurve:
    times: np.ndarray
    positions: np.ndarray        # (m, 2)
    costs: np.ndarray | None = None
    hit_time: float | None = None

    def position_at(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        px = np.interp(x, self.times, self.positions[:, 0])
        py = np.interp(x, self.times, self.positions[:, 1])
        return np.column_stack([px, py])

    def cost_at(self, x) -> np.ndarray:
        if self.costs is None:
            raise ValueError("curve carries no cost component")
        return np.interp(np.atleast_1d(np.asarray(x, dtype=float)),
                         self.times, self.costs)

    @property
    def end_position(self) -> complex:
        return complex(self.positions[-1, 0], self.positions[-1, 1])

    @property
    def end_cost(self) -> float:
        return float(self.costs[-1]) if self.costs is not None else 0.0

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("time,x,y,cost\n")
            for k in range(len(self.times)):
                c = "" if self.costs is None else repr(float(self.costs[k]))
                fh.write(f"{float(self.times[k])!r},{float(self.positions[k, 0])!r},"
                         f"{float(self.positions[k, 1])!r},{c}\n")


def euler_solve(spec: OdeSpec, stop) -> LimitCurve:
    """Explicit Euler iterates of the flow with the requested stop rule.

    The direction is constant, so hitting a point reduces to crossing its
    arc-length offset; the crossing step is shortened by linear
    interpolation, which keeps the g=0 and g=1 cost identities exact.
    The global error is O(h) on any fixed horizon.
    """
    dens = spec.density
    dom = dens.domain
    e = complex(math.cos(spec.nu), math.sin(spec.nu))
    with_cost = spec.cost_q is not None
    times = [0.0]
    pos = [spec.start]
    cost = [0.0] if with_cost else None
    hit = None

    if isinstance(stop, HitPoint):
        target = as_point(stop.target)
        arc_goal = abs(target - spec.start)
        if arc_goal == 0.0:
            return LimitCurve(np.zeros(1),
                              np.array([[spec.start.real, spec.start.imag]]),
                              np.zeros(1) if with_cost else None, 0.0)
    max_iter = 10_000_000
    z = spec.start
    t = 0.0
    for _ in range(max_iter):
        if isinstance(stop, FixedTime) and t >= stop.t_end:
            break
        f = dens.at(z)
        speed = spec.lam / math.sqrt(f)
        h = spec.h
        if isinstance(stop, FixedTime):
            h = min(h, stop.t_end - t)
        znew = z + h * speed * e
        if with_cost:
            dcost = h * spec.cost_q / f ** (spec.cost_g / 2.0)
        if isinstance(stop, HitPoint):
            arc_new = abs(znew - spec.start)
            if arc_new >= arc_goal - stop.tol:
                arc_old = abs(z - spec.start)
                frac = 1.0 if arc_new == arc_old else \
                    (arc_goal - arc_old) / (arc_new - arc_old)
                frac = min(max(frac, 0.0), 1.0)
                z = z + frac * h * speed * e
                t += frac * h
                times.append(t)
                pos.append(z)
                if with_cost:
                    cost.append(cost[-1] + frac * dcost)
                hit = t
                break
        if not dom.contains(znew):
            if isinstance(stop, LeaveInset):
                # keep the exiting iterate only if it is still in the rectangle
                break
            raise StepOutOfDomain(f"iterate left the domain at t={t + h:g}")
        z = znew
        t += h
        times.append(t)
        pos.append(z)
        if with_cost:
            cost.append(cost[-1] + dcost)
        if isinstance(stop, LeaveInset) and not dom.contains(z, dens.inset_a):
            break
    else:
        raise StepOutOfDomain("no stop condition met within the iteration budget")
    arr = np.array([[p.real, p.imag] for p in pos])
    return LimitCurve(np.asarray(times), arr,
                      np.asarray(cost) if with_cost else None, hit)


def hit_time(lam: float, s, t, density: DensitySpec, h: float) -> float:
    """Time for the flow at speed ``lam`` to traverse the segment [s, t].

    Solves the 1-D reduction along the segment with explicit Euler and one
    linear interpolation of the crossing step.
    """
    s = as_point(s)
    t = as_point(t)
    if s == t:
        return 0.0
    if not (density.domain.contains(s) and density.domain.contains(t)):
        raise SegmentLeavesDomain("segment endpoints must lie in the domain")
    e = (t - s) / abs(t - s)
    goal = abs(t - s)
    arc = 0.0
    time = 0.0
    while True:
        speed = lam / math.sqrt(density.at(s + arc * e))
        step = h * speed
        if arc + step >= goal:
            return time + h * (goal - arc) / step
        arc += step
        time += h


# -- per-pair predictions ----------------------------------------------------

def predict_straight(kind, theta: float, s, t, density: DensitySpec,
                     h: float | None = None):
    """Limit length, stage count over sqrt(n), and position curve for the
    kinds whose limit trajectory is the segment [s, t] (straight and
    random-north kinds)."""
    kind = NavKind(kind)
    if kind in (NavKind.YAO, NavKind.THETA):
        raise ValueError("cross kinds use predict_cross")
    row = constants(kind, theta)
    s = as_point(s)
    t = as_point(t)
    h = h if h is not None else default_step(density)
    if s == t:
        curve = LimitCurve(np.zeros(1), np.array([[s.real, s.imag]]), None, 0.0)
        return 0.0, 0.0, curve
    limit_length = row.q_bis * abs(t - s)
    nb = hit_time(row.c_bis, s, t, density, h)
    curve = euler_solve(OdeSpec(row.c_bis, math.atan2((t - s).imag, (t - s).real),
                                s, density, h), HitPoint(t))
    return limit_length, nb, curve


def _check_gamma_inset(density: DensitySpec, pts) -> None:
    a = density.inset_a
    for p in pts:
        if not density.domain.contains(p, a):
            raise GammaLeavesInset("limit polyline exits the inset domain")


def predict_cross(kind, p_theta: int, s, t, density: DensitySpec,
                  h: float | None = None):
    """Limit length, stage count over sqrt(n), and glued two-phase position
    curve for the cross kinds (first leg along the sector bisector, second
    along the border direction through the corner)."""
    kind = NavKind(kind)
    if kind not in (NavKind.YAO, NavKind.THETA):
        raise ValueError("predict_cross is only for cross kinds")
    cross = CrossParams(p_theta)
    theta = cross.theta
    row = constants(kind, theta)
    s = as_point(s)
    t = as_point(t)
    h = h if h is not None else default_step(density)
    if s == t:
        curve = LimitCurve(np.zeros(1), np.array([[s.real, s.imag]]), None, 0.0)
        return 0.0, 0.0, curve
    i = corner_point(s, t, cross)
    _check_gamma_inset(density, (s, i, t))
    limit_length = weighted_gamma_length(s, t, row.q_bis, row.q_bor, cross)
    t1 = hit_time(row.c_bis, s, i, density, h) if i != s else 0.0
    t2 = hit_time(row.c_bor, i, t, density, h) if i != t else 0.0
    curves = []
    if i != s:
        curves.append(euler_solve(OdeSpec(row.c_bis, math.atan2((i - s).imag, (i - s).real),
                                          s, density, h), HitPoint(i)))
    if i != t:
        curves.append(euler_solve(OdeSpec(row.c_bor, math.atan2((t - i).imag, (t - i).real),
                                          i, density, h), HitPoint(t)))
    curve = _glue(curves)
    return limit_length, t1 + t2, curve


def _glue(curves) -> LimitCurve:
    if len(curves) == 1:
        return curves[0]
    a, b = curves
    shift = a.times[-1]
    times = np.concatenate([a.times, shift + b.times[1:]])
    positions = np.vstack([a.positions, b.positions[1:]])
    costs = None
    if a.costs is not None and b.costs is not None:
        costs = np.concatenate([a.costs, a.costs[-1] + b.costs[1:]])
    return LimitCurve(times, positions, costs, shift + (b.hit_time or 0.0))


def predict_cost(kind, theta: float, g: float, s, t, density: DensitySpec,
                 h: float | None = None, p_theta: int | None = None,
                 moment_cache=None) -> float:
    """Limiting ``sum |hop|^g`` over ``n^{(1-g)/2}`` for one pair.

    Integrates the coupled cost equation along the limit trajectory with
    ``q = E(|hop|^g)`` at unit intensity (per phase for cross kinds);
    reduces exactly to the stage-count prediction at g=0 and to the length
    prediction at g=1.
    """
    kind = NavKind(kind)
    s = as_point(s)
    t = as_point(t)
    if s == t:
        return 0.0
    h = h if h is not None else default_step(density)
    q, _ = hop_moment(kind, theta if p_theta is None else 2.0 * math.pi / p_theta,
                      g, cache_path=moment_cache)
    if kind in (NavKind.YAO, NavKind.THETA):
        if p_theta is None:
            raise ValueError("cross kinds need p_theta")
        cross = CrossParams(p_theta)
        row = constants(kind, cross.theta)
        i = corner_point(s, t, cross)
        _check_gamma_inset(density, (s, i, t))
        total = 0.0
        if i != s:
            c1 = euler_solve(OdeSpec(row.c_bis, math.atan2((i - s).imag, (i - s).real),
                                     s, density, h, cost_q=q, cost_g=g), HitPoint(i))
            total += c1.end_cost
        if i != t:
            c2 = euler_solve(OdeSpec(row.c_bor, math.atan2((t - i).imag, (t - i).real),
                                     i, density, h, cost_q=q, cost_g=g), HitPoint(t))
            total += c2.end_cost
        return total
    row = constants(kind, theta)
    curve = euler_solve(OdeSpec(row.c_bis, math.atan2((t - s).imag, (t - s).real),
                                s, density, h, cost_q=q, cost_g=g), HitPoint(t))
    return curve.end_cost
