"""
Orbit-type classification on the bifurcation diagram.

A parameter point (alpha_a, h_a, lambda_a) is turned into the allowed u and v
intervals, the orbit labels, the bounding caustics and the collision flag.
The labels follow from the interval structure: every (u-interval, v-interval)
pair is one connected allowed region of the q-plane and falls in one family.

    satellitary  u starts at 1 and v starts at -1 (the region holds the Coulomb centre)
    planetary    u starts above 1 and v covers [-1, 1] (annulus between two ellipses)
    oscillatory  u starts at 1 and v is interior (strip between two hyperbolas)
"""

import math
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool

import numpy as np
from scipy.optimize import brentq
from tqdm import tqdm

from utils.physics.coords import elliptic_arrays
from utils.physics.model import BOUNDARY_BAND, config_from_scaled, constants_from_scaled
from utils.physics.quartic import boundary_lines, discriminant_scaled, p4_eval, p4_roots, params_for
from utils.system.errors import ForbiddenRegion
from utils.system.logger import get_logger

logger = get_logger()

LABEL_ORDER = ("t_s1", "t_s2", "t_s3", "t_m1", "t_m2", "t_p1", "t_p2", "forbidden", "boundary")
ORBIT_LABELS = LABEL_ORDER[:7]
DELTA_XTOL = 1e-8


def ordered_labels(labels):
    return [name for name in LABEL_ORDER if name in labels]


def label_key(labels):
    """Single string for a label set, e.g. 't_s3|t_m2'."""
    return "|".join(ordered_labels(labels))


# ===== Types =====
@dataclass(frozen=True)
class AllowedIntervals:
    u_intervals: tuple
    v_intervals: tuple

    @property
    def is_empty(self):
        return not self.u_intervals or not self.v_intervals

    @property
    def touches_coulomb_center(self):
        return any(lo == 1.0 for lo, _ in self.u_intervals) and any(lo == -1.0 for lo, _ in self.v_intervals)

    def contains(self, u, v, slack=0.0):
        in_u = any(lo - slack <= u <= hi + slack for lo, hi in self.u_intervals)
        in_v = any(lo - slack <= v <= hi + slack for lo, hi in self.v_intervals)
        return in_u and in_v


@dataclass(frozen=True)
class CausticCurve:
    """Implicit conic cq1 * q1^2 + cq2 * q2^2 = rhs."""

    kind: str
    parameter: float
    cq1: float
    cq2: float
    rhs: float
    norm: float = 1.0

    def residual(self, q1, q2):
        return (self.cq1 * q1 * q1 + self.cq2 * q2 * q2 - self.rhs) / self.norm

    def points(self, cfg, span, n=400):
        """
        Sample the curve in the q-plane. span is the range of the other
        elliptic coordinate (v for an ellipse, u for a hyperbola).
        """
        a = cfg.a
        lo, hi = span
        if self.kind == "ellipse":
            u = self.parameter
            theta_lo = math.acos(min(max(hi, -1.0), 1.0))
            theta_hi = math.acos(min(max(lo, -1.0), 1.0))
            theta = np.concatenate([np.linspace(theta_lo, theta_hi, n), np.linspace(-theta_hi, -theta_lo, n)])
            return a * u * np.cos(theta), a * math.sqrt(u * u - 1.0) * np.sin(theta)

        v = self.parameter
        u = np.linspace(max(lo, 1.0), hi, n)
        q2 = a * np.sqrt(np.clip((u * u - 1.0) * (1.0 - v * v), 0.0, None))
        q1 = a * u * v
        return np.concatenate([q1[::-1], q1]), np.concatenate([-q2[::-1], q2])

    def as_dict(self):
        return {
            "kind": self.kind,
            "parameter": self.parameter,
            "cq1": self.cq1,
            "cq2": self.cq2,
            "rhs": self.rhs,
        }


@dataclass(frozen=True)
class RegionReport:
    labels: frozenset
    intervals: AllowedIntervals
    caustics: tuple
    collision_possible: bool
    real_roots: tuple = ()
    l1: float = 0.0
    l2: float = 0.0
    components: tuple = field(default=(), compare=False)

    def as_dict(self):
        return {
            "labels": ordered_labels(self.labels),
            "real_roots": list(self.real_roots),
            "u_intervals": [list(iv) for iv in self.intervals.u_intervals],
            "v_intervals": [list(iv) for iv in self.intervals.v_intervals],
            "caustics": [c.parameter for c in self.caustics],
            "caustic_curves": [c.as_dict() for c in self.caustics],
            "collision_possible": self.collision_possible,
            "l1": self.l1,
            "l2": self.l2,
        }


# ===== Allowed Intervals =====
def _merge(segments):
    merged = []
    for lo, hi in segments:
        if merged and merged[-1][1] == lo:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


def _intervals_from_roots(qp, roots):
    u_breaks = [1.0] + [z for z in roots if z > 1.0]
    u_segments = [
        (lo, hi) for lo, hi in zip(u_breaks[:-1], u_breaks[1:]) if hi > lo and p4_eval(0.5 * (lo + hi), qp) < 0
    ]

    v_breaks = [-1.0] + [z for z in roots if -1.0 < z < 1.0] + [1.0]
    v_segments = [
        (lo, hi) for lo, hi in zip(v_breaks[:-1], v_breaks[1:]) if hi > lo and p4_eval(0.5 * (lo + hi), qp) > 0
    ]
    return AllowedIntervals(u_intervals=_merge(u_segments), v_intervals=_merge(v_segments))


def allowed_intervals(mc, cfg):
    qp = params_for(mc, cfg)
    roots = p4_roots(qp)
    return _intervals_from_roots(qp, roots.distinct_real)


# ===== Labels =====
def _family(u_iv, v_iv):
    u_lo = u_iv[0]
    v_lo, v_hi = v_iv
    if u_lo == 1.0 and v_lo == -1.0:
        return "satellitary"
    if u_lo > 1.0 and v_lo == -1.0 and v_hi == 1.0:
        return "planetary"
    if u_lo == 1.0 and v_lo > -1.0 and v_hi < 1.0:
        return "oscillatory"
    return None


def _labels_for(families, roots):
    n_real = len(roots)
    kinds = sorted(families)

    if kinds == ["oscillatory", "satellitary"]:
        return {"t_s3", "t_m2"}
    if kinds == ["satellitary"]:
        if n_real == 2:
            return {"t_s1"}
        if n_real == 4 and sum(z < -1.0 for z in roots) == 2:
            return {"t_s2"}
    if kinds == ["planetary"]:
        if n_real == 2:
            return {"t_p1"}
        if n_real == 4:
            return {"t_p2"}
    if kinds == ["oscillatory"]:
        return {"t_m1"}
    return None


def classify_point(mc, cfg):
    qp = params_for(mc, cfg)
    root_set = p4_roots(qp)
    roots = root_set.distinct_real
    l1, l2 = boundary_lines(mc, cfg)
    intervals = _intervals_from_roots(qp, roots)
    collision_possible = intervals.touches_coulomb_center

    def report(labels, curves=(), components=()):
        return RegionReport(
            labels=frozenset(labels),
            intervals=intervals,
            caustics=tuple(curves),
            collision_possible=collision_possible,
            real_roots=root_set.real_roots,
            l1=l1,
            l2=l2,
            components=tuple(components),
        )

    if abs(l1) < BOUNDARY_BAND or abs(l2) < BOUNDARY_BAND or root_set.has_multiple:
        return report({"boundary"})
    if intervals.is_empty:
        return report({"forbidden"})

    components = [(u_iv, v_iv, _family(u_iv, v_iv)) for u_iv in intervals.u_intervals for v_iv in intervals.v_intervals]
    curves = _caustics_from_intervals(intervals, cfg)
    families = {fam for _, _, fam in components}

    labels = None if None in families else _labels_for(families, roots)
    if labels is None:
        logger.warning(
            f"Unrecognised interval pattern at h_a={mc.h_a}, lambda_a={mc.lam_a}, alpha_a={cfg.alpha_a}: "
            f"u={intervals.u_intervals} v={intervals.v_intervals}"
        )
        return report({"boundary"}, curves, components)
    return report(labels, curves, components)


# ===== Caustics =====
def ellipse_caustic(u_c, cfg):
    a2 = cfg.a * cfg.a
    rhs = a2 * u_c * u_c * (u_c * u_c - 1.0)
    return CausticCurve(kind="ellipse", parameter=u_c, cq1=u_c * u_c - 1.0, cq2=u_c * u_c, rhs=rhs, norm=abs(rhs) or a2)


def hyperbola_caustic(v_c, cfg):
    a2 = cfg.a * cfg.a
    rhs = a2 * v_c * v_c * (1.0 - v_c * v_c)
    # v_c = 0 degenerates to the line q1 = 0
    return CausticCurve(kind="hyperbola", parameter=v_c, cq1=1.0 - v_c * v_c, cq2=-v_c * v_c, rhs=rhs, norm=abs(rhs) or a2)


def _caustics_from_intervals(intervals, cfg):
    curves = []
    for lo, hi in intervals.u_intervals:
        curves.extend(ellipse_caustic(u, cfg) for u in (lo, hi) if u != 1.0)
    for lo, hi in intervals.v_intervals:
        curves.extend(hyperbola_caustic(v, cfg) for v in (lo, hi) if abs(v) != 1.0)
    return curves


def caustics(mc, cfg):
    intervals = allowed_intervals(mc, cfg)
    if intervals.is_empty:
        raise ForbiddenRegion(
            f"no allowed motion for h_a={mc.h_a}, lambda_a={mc.lam_a}, alpha_a={cfg.alpha_a}"
        )
    return tuple(_caustics_from_intervals(intervals, cfg))


def region_mask(mc, cfg, q1_grid, q2_grid):
    """Boolean raster of the allowed region; rows follow q2_grid, columns q1_grid."""
    intervals = allowed_intervals(mc, cfg)
    Q1, Q2 = np.meshgrid(np.asarray(q1_grid, dtype=float), np.asarray(q2_grid, dtype=float))
    u, v = elliptic_arrays(Q1, Q2, cfg)

    in_u = np.zeros(u.shape, dtype=bool)
    for lo, hi in intervals.u_intervals:
        in_u |= (u >= lo) & (u <= hi)
    in_v = np.zeros(v.shape, dtype=bool)
    for lo, hi in intervals.v_intervals:
        in_v |= (v >= lo) & (v <= hi)
    return in_u & in_v


# ===== Bifurcation Diagram =====
@dataclass
class DiagramScan:
    alpha_a: float
    h_values: np.ndarray
    lambda_values: np.ndarray
    labels: list
    line_l1: tuple
    line_l2: tuple
    delta_zero: list

    def distinct_labels(self):
        seen = set()
        for row in self.labels:
            for key in row:
                seen.update(key.split("|"))
        return ordered_labels(seen)


def _scan_row(h_a, alpha_a, lambda_values):
    cfg = config_from_scaled(alpha_a)
    return [label_key(classify_point(constants_from_scaled(h_a, lam_a, cfg), cfg).labels) for lam_a in lambda_values]


def _delta_column(h_a, alpha_a, lambda_values):
    values = discriminant_scaled(h_a, lambda_values, alpha_a)
    points = []
    for i in range(len(lambda_values) - 1):
        d_lo, d_hi = values[i], values[i + 1]
        if d_lo == 0.0:
            points.append((h_a, float(lambda_values[i])))
        elif d_lo * d_hi < 0.0:
            lam = brentq(
                lambda x: float(discriminant_scaled(h_a, x, alpha_a)),
                lambda_values[i],
                lambda_values[i + 1],
                xtol=DELTA_XTOL,
            )
            points.append((h_a, lam))
    if len(values) and values[-1] == 0.0:
        points.append((h_a, float(lambda_values[-1])))
    return points


def scan_diagram(alpha_a, h_values, lambda_values, workers=1, progress=False):
    """
    Label every (h_a, lambda_a) cell and sample the boundary curves.

    Rows are evaluated independently; with workers > 1 they go to a process
    pool and are collected in row order.
    """
    h_values = np.asarray(h_values, dtype=float)
    lambda_values = np.asarray(lambda_values, dtype=float)
    config_from_scaled(alpha_a)

    row_fn = partial(_scan_row, alpha_a=alpha_a, lambda_values=lambda_values)
    bar = partial(tqdm, total=len(h_values), desc="diagram", disable=not progress)
    if workers > 1:
        with Pool(workers) as pool:
            labels = list(bar(pool.imap(row_fn, h_values)))
    else:
        labels = [row_fn(h_a) for h_a in bar(h_values)]

    delta_zero = []
    for h_a in h_values:
        delta_zero.extend(_delta_column(h_a, alpha_a, lambda_values))

    lam_min, lam_max = lambda_values.min(), lambda_values.max()

    def line(offset):
        lam = h_values + offset
        keep = (lam >= lam_min) & (lam <= lam_max)
        return h_values[keep], lam[keep]

    logger.info(f"Scanned {len(h_values)}x{len(lambda_values)} diagram at alpha_a={alpha_a}")
    return DiagramScan(
        alpha_a=alpha_a,
        h_values=h_values,
        lambda_values=lambda_values,
        labels=labels,
        line_l1=line(alpha_a),
        line_l2=line(-alpha_a),
        delta_zero=delta_zero,
    )
