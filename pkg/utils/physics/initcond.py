"""
Initial conditions for the full two-particle problem.

Given (h, lambda) and a relative position q(0), the two invariant equations

    H      = 1/2 |qdot|^2 + V(q)                      = h
    Lambda = L^2 / (2 a^2) + 1/2 qdot1^2 + W(q)       = lambda

with L = q2 qdot1 - q1 qdot2 are quadratic in the velocities, so there are up
to four velocity branches. Each branch is mapped back to both particles with
the centre-of-mass velocity fixed by the magnetic translation momenta.
"""

import math
from dataclasses import dataclass

import numpy as np

from utils.physics.coords import QPoint, q_to_rel, q_velocity_to_rel, reconstruct_particles
from utils.physics.model import MULTIPLE_ROOT_GAP, RESIDUAL_TOL
from utils.physics.quartic import QuarticParams, p4_roots
from utils.system.errors import CoulombSingularity, OutsideAllowedRegion
from utils.system.logger import get_logger

logger = get_logger()

NEWTON_STEPS = 8
FIELDS = ("x1", "y1", "x2", "y2", "vx1", "vy1", "vx2", "vy2")


@dataclass(frozen=True)
class VelocityBranch:
    qdot1: float
    qdot2: float
    branch_index: int
    residual_h: float
    residual_lambda: float

    def as_dict(self):
        return {
            "branch": self.branch_index,
            "qdot1": self.qdot1,
            "qdot2": self.qdot2,
            "residual_h": self.residual_h,
            "residual_lambda": self.residual_lambda,
        }


@dataclass(frozen=True)
class FullState:
    x1: float
    y1: float
    x2: float
    y2: float
    vx1: float
    vy1: float
    vx2: float
    vy2: float

    @property
    def r(self):
        return math.hypot(self.x1 - self.x2, self.y1 - self.y2)

    def to_array(self):
        return np.array([getattr(self, name) for name in FIELDS], dtype=float)

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))

    def as_dict(self):
        return {name: getattr(self, name) for name in FIELDS}


# ===== Invariants =====
def _coulomb_distance(q, cfg):
    r2 = q.coulomb_distance(cfg)
    if r2 == 0.0:
        raise CoulombSingularity(f"q = ({q.q1}, {q.q2}) sits on the Coulomb centre")
    return r2


def invariant_arrays(q1, q2, qdot1, qdot2, cfg):
    """(H, Lambda) over numpy arrays; the caller keeps q off the Coulomb centre."""
    a = cfg.a
    r2 = np.hypot(q1 + a, q2)
    L = q2 * qdot1 - q1 * qdot2
    H = 0.5 * (qdot1 * qdot1 + qdot2 * qdot2) + 0.5 * (q1 * q1 + q2 * q2) - cfg.alpha / r2
    Lam = L * L / (2.0 * a * a) + 0.5 * (qdot1 * qdot1 + q1 * q1) + cfg.alpha * q1 / (a * r2)
    return H, Lam


def cartesian_invariants(q, qdot1, qdot2, cfg):
    _coulomb_distance(q, cfg)
    H, Lam = invariant_arrays(q.q1, q.q2, qdot1, qdot2, cfg)
    return float(H), float(Lam)


def _residuals(q, qdot1, qdot2, mc, cfg):
    H, Lam = cartesian_invariants(q, qdot1, qdot2, cfg)
    return H - mc.h, Lam - mc.lam


def _newton(q, w, z, mc, cfg):
    """Polish one candidate pair on (H - h, Lambda - lambda)."""
    a2 = cfg.a * cfg.a
    f1, f2 = _residuals(q, w, z, mc, cfg)
    for _ in range(NEWTON_STEPS):
        L = q.q2 * w - q.q1 * z
        j11, j12 = w, z
        j21, j22 = L * q.q2 / a2 + w, -L * q.q1 / a2
        det = j11 * j22 - j12 * j21
        if det == 0.0:
            break
        dw = (f1 * j22 - f2 * j12) / det
        dz = (j11 * f2 - j21 * f1) / det
        g1, g2 = _residuals(q, w - dw, z - dz, mc, cfg)
        if abs(g1) + abs(g2) > abs(f1) + abs(f2):
            break
        w, z, f1, f2 = w - dw, z - dz, g1, g2
        if abs(dw) + abs(dz) <= 4.0 * np.finfo(float).eps * (1.0 + abs(w) + abs(z)):
            break
    return w, z, f1, f2


# ===== Velocity Branches =====
def velocity_branches(q, mc, cfg):
    r2 = _coulomb_distance(q, cfg)
    a2 = cfg.a * cfg.a
    q1, q2 = q.q1, q.q2

    V = 0.5 * (q1 * q1 + q2 * q2) - cfg.alpha / r2
    W = 0.5 * q1 * q1 + cfg.alpha * q1 / (cfg.a * r2)
    K = 2.0 * (mc.h - V)
    M = 2.0 * (mc.lam - W)
    tol_h = RESIDUAL_TOL * max(1.0, abs(mc.h))
    tol_lam = RESIDUAL_TOL * max(1.0, abs(mc.lam))

    if K < -2.0 * tol_h:
        logger.warning(str(OutsideAllowedRegion(f"h - V(q) = {0.5 * K:.6g} < 0 at q = ({q1}, {q2})")))
        return []
    K = max(K, 0.0)

    # Eliminating qdot2 leaves a biquadratic in w = qdot1.
    alpha1 = (q2 * q2 - q1 * q1) / a2 + 1.0
    beta1 = q1 * q1 * K / a2 - M
    gamma = 4.0 * q1 * q1 * q2 * q2 / (a2 * a2)
    lead = alpha1 * alpha1 + gamma
    if lead <= RESIDUAL_TOL:
        logger.warning(f"velocity branches are not isolated at the focus q = ({q1}, {q2})")
        return []

    quartic = QuarticParams(p=(2.0 * alpha1 * beta1 - gamma * K) / lead, q=0.0, r=beta1 * beta1 / lead)
    candidates = []
    for w in p4_roots(quartic).distinct_real:
        rest = K - w * w
        if rest < -2.0 * tol_h:
            continue
        z = math.sqrt(max(rest, 0.0))
        for z0 in {z, -z}:
            pw, pz, res_h, res_lam = _newton(q, w, z0, mc, cfg)
            if abs(res_h) <= tol_h and abs(res_lam) <= tol_lam:
                candidates.append((pw, pz, res_h, res_lam))

    candidates.sort(key=lambda c: (c[0], c[1]))
    kept = []
    for cand in candidates:
        if all(math.hypot(cand[0] - k[0], cand[1] - k[1]) >= MULTIPLE_ROOT_GAP for k in kept):
            kept.append(cand)

    if not kept:
        logger.warning(str(OutsideAllowedRegion(f"no real velocity branch at q = ({q1}, {q2}) for h={mc.h}, lambda={mc.lam}")))
        return []

    logger.debug(f"{len(kept)} velocity branches at q = ({q1}, {q2})")
    return [
        VelocityBranch(qdot1=w, qdot2=z, branch_index=i, residual_h=rh, residual_lambda=rl)
        for i, (w, z, rh, rl) in enumerate(kept)
    ]


# ===== Full State =====
def build_full_state(X0, Y0, q, branch, cfg):
    x, y = q_to_rel(q, cfg)
    xdot, ydot = q_velocity_to_rel(branch.qdot1, branch.qdot2, cfg)
    Xdot = 0.5 * (y + cfg.y0)
    Ydot = 0.5 * (cfg.x0 - x)

    x1, y1, x2, y2 = reconstruct_particles(X0, Y0, q, cfg)
    return FullState(
        x1=x1,
        y1=y1,
        x2=x2,
        y2=y2,
        vx1=Xdot - 0.5 * xdot,
        vy1=Ydot - 0.5 * ydot,
        vx2=Xdot + 0.5 * xdot,
        vy2=Ydot + 0.5 * ydot,
    )


def exchange_inversion(state, X0, Y0, time_reversed=False):
    """
    Swap electron and positron and reflect both through (X0, Y0).

    With time_reversed=True the velocities are those of the image orbit run
    backwards, which is again a solution of the equations of motion.
    """
    sign = 1.0 if time_reversed else -1.0
    return FullState(
        x1=2.0 * X0 - state.x2,
        y1=2.0 * Y0 - state.y2,
        x2=2.0 * X0 - state.x1,
        y2=2.0 * Y0 - state.y1,
        vx1=sign * state.vx2,
        vy1=sign * state.vy2,
        vx2=sign * state.vx1,
        vy2=sign * state.vy1,
    )


def initial_states(X0, Y0, q, mc, cfg):
    """Every (branch, FullState) pair for one starting point."""
    q = q if isinstance(q, QPoint) else QPoint(*q)
    return [(branch, build_full_state(X0, Y0, q, branch, cfg)) for branch in velocity_branches(q, mc, cfg)]
