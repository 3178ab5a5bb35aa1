import math
from dataclasses import dataclass

import numpy as np

from utils.physics.model import ELLIPTIC_TOL
from utils.system.errors import CoulombSingularity


@dataclass(frozen=True)
class RelState:
    x: float
    y: float
    X: float
    Y: float


@dataclass(frozen=True)
class QPoint:
    q1: float
    q2: float

    def coulomb_distance(self, cfg):
        return math.hypot(self.q1 + cfg.a, self.q2)


@dataclass(frozen=True)
class EllipticPoint:
    u: float
    v: float
    sign_q2: int = 1


def _sign(value):
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


# ===== Lab <-> Centre of Mass / Relative =====
def split_frames(x1, y1, x2, y2):
    return RelState(x=x2 - x1, y=y2 - y1, X=0.5 * (x1 + x2), Y=0.5 * (y1 + y2))


# ===== Relative <-> q-frame =====
# Rotation by (x0, y0)/a followed by a shift of -a along q1: the oscillator
# centre (x0, -y0) goes to the origin and the Coulomb centre to (-a, 0).
def rel_to_q(x, y, cfg):
    a = cfg.a
    return QPoint(q1=(cfg.x0 * x - cfg.y0 * y) / a - a, q2=(cfg.y0 * x + cfg.x0 * y) / a)


def q_to_rel(q, cfg):
    a = cfg.a
    s = q.q1 + a
    return (cfg.x0 * s + cfg.y0 * q.q2) / a, (-cfg.y0 * s + cfg.x0 * q.q2) / a


def rel_velocity_to_q(xdot, ydot, cfg):
    a = cfg.a
    return (cfg.x0 * xdot - cfg.y0 * ydot) / a, (cfg.y0 * xdot + cfg.x0 * ydot) / a


def q_velocity_to_rel(qdot1, qdot2, cfg):
    a = cfg.a
    return (cfg.x0 * qdot1 + cfg.y0 * qdot2) / a, (-cfg.y0 * qdot1 + cfg.x0 * qdot2) / a


# ===== q-frame <-> Euler Elliptic =====
def q_to_elliptic(q, cfg):
    a = cfg.a
    q1, q2 = float(q.q1), float(q.q2)

    # On the q1 axis the coordinates are exact: the focal segment has u = 1
    # and the two outer rays have v = +-1.
    if q2 == 0.0:
        if abs(q1) <= a:
            return EllipticPoint(u=1.0, v=q1 / a, sign_q2=0)
        return EllipticPoint(u=abs(q1) / a, v=math.copysign(1.0, q1), sign_q2=0)

    r1 = math.hypot(q1 - a, q2)
    r2 = math.hypot(q1 + a, q2)
    if r1 <= ELLIPTIC_TOL * a:
        return EllipticPoint(u=1.0, v=1.0, sign_q2=_sign(q2))
    if r2 <= ELLIPTIC_TOL * a:
        return EllipticPoint(u=1.0, v=-1.0, sign_q2=_sign(q2))

    u = max((r1 + r2) / (2.0 * a), 1.0)
    v = min(max((r2 - r1) / (2.0 * a), -1.0), 1.0)
    return EllipticPoint(u=u, v=v, sign_q2=_sign(q2))


def elliptic_to_q(e, cfg):
    a = cfg.a
    u = max(float(e.u), 1.0)
    v = min(max(float(e.v), -1.0), 1.0)
    q2_abs = a * math.sqrt(max((u * u - 1.0) * (1.0 - v * v), 0.0))
    return QPoint(q1=a * u * v, q2=e.sign_q2 * q2_abs)


def elliptic_arrays(q1, q2, cfg):
    """Vectorised q -> (u, v) for trajectory samples."""
    a = cfg.a
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    r1 = np.hypot(q1 - a, q2)
    r2 = np.hypot(q1 + a, q2)
    u = np.maximum((r1 + r2) / (2.0 * a), 1.0)
    v = np.clip((r2 - r1) / (2.0 * a), -1.0, 1.0)
    return u, v


def elliptic_rates(q, qdot1, qdot2, cfg):
    """(du/dt, dv/dt) at q for the q-frame velocity (qdot1, qdot2)."""
    a = cfg.a
    r1 = math.hypot(q.q1 - a, q.q2)
    r2 = math.hypot(q.q1 + a, q.q2)
    if r2 == 0.0:
        raise CoulombSingularity("elliptic rates are undefined at the Coulomb centre")
    if r1 == 0.0:
        raise CoulombSingularity("elliptic rates are undefined at the focus (a, 0)")
    r1dot = ((q.q1 - a) * qdot1 + q.q2 * qdot2) / r1
    r2dot = ((q.q1 + a) * qdot1 + q.q2 * qdot2) / r2
    return (r1dot + r2dot) / (2.0 * a), (r2dot - r1dot) / (2.0 * a)


# ===== Particle Reconstruction =====
def reconstruct_particles(X, Y, q, cfg):
    x, y = q_to_rel(q, cfg)
    return X - 0.5 * x, Y - 0.5 * y, X + 0.5 * x, Y + 0.5 * y
