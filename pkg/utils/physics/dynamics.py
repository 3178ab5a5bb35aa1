"""
Time integration of the pair.

Two independent routes are provided: the full two-particle system, integrated
in Levi-Civita variables for the relative motion so that close encounters stay
smooth, and the separated (u, v) system in local time zeta. Both run on
scipy's DOP853 pair; cross_check compares them in the (u, v) plane.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.integrate import OdeSolution, solve_ivp
from scipy.optimize import brentq

from utils.physics.coords import QPoint, elliptic_arrays, elliptic_rates, q_to_elliptic, rel_to_q, rel_velocity_to_q
from utils.physics.initcond import FIELDS, FullState, invariant_arrays
from utils.physics.model import COLLISION_RADIUS
from utils.physics.quartic import p4_derivative, p4_eval, params_for
from utils.system.errors import CoulombSingularity, OutsideAllowedRegion, StepFailure, ValidationError
from utils.system.logger import get_logger

logger = get_logger()

METHOD = "DOP853"
TAU_CHUNK = 100.0
TAU_LIMIT = 1e6
REGULAR_TOL_SCALE = 1e-3
REGULAR_TOL_FLOOR = 1e-13
TRAJECTORY_COLUMNS = ["t", "x1", "y1", "x2", "y2", "X", "Y", "q1", "q2", "u", "v", "H", "Lambda", "KX", "KY", "LZ"]
MONITORED = ("H_rel", "Lambda_rel", "KX", "KY", "LZ")


# ===== Equations of Motion =====
def _rhs(t, s, alpha):
    x1, y1, x2, y2, vx1, vy1, vx2, vy2 = s
    dx = x1 - x2
    dy = y1 - y2
    r = math.hypot(dx, dy)
    c = alpha / (2.0 * r ** 3)
    return [vx1, vy1, vx2, vy2, -vy1 - c * dx, vx1 - c * dy, vy2 + c * dx, -vx2 + c * dy]


def rhs_full(state, cfg):
    s = state.to_array() if isinstance(state, FullState) else np.asarray(state, dtype=float)
    if s[0] == s[2] and s[1] == s[3]:
        raise CoulombSingularity("electron and positron coincide (r = 0)")
    return np.array(_rhs(0.0, s, cfg.alpha))


# ===== Monitors =====
@dataclass(frozen=True)
class MonitorRecord:
    H_rel: float
    Lambda_rel: float
    KX: float
    KY: float
    LZ: float
    cm_residual: float = 0.0
    drift: dict = field(default_factory=dict, compare=False)

    @property
    def max_drift(self):
        return max(self.drift.values(), default=0.0)


def monitor_arrays(states, cfg):
    """Monitored quantities for an (n, 8) array of states, one array per name."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    x1, y1, x2, y2, vx1, vy1, vx2, vy2 = states.T
    x, y = x2 - x1, y2 - y1
    q = rel_to_q(x, y, cfg)
    qdot1, qdot2 = rel_velocity_to_q(vx2 - vx1, vy2 - vy1, cfg)
    H, Lam = invariant_arrays(q.q1, q.q2, qdot1, qdot2, cfg)

    Xdot, Ydot = 0.5 * (vx1 + vx2), 0.5 * (vy1 + vy2)
    return {
        "q1": q.q1,
        "q2": q.q2,
        "H_rel": H,
        "Lambda_rel": Lam,
        "KX": vx1 + vx2 + y1 - y2,
        "KY": vy1 + vy2 + x2 - x1,
        "LZ": (x1 * vy1 - y1 * vx1) - 0.5 * (x1 * x1 + y1 * y1) + (x2 * vy2 - y2 * vx2) + 0.5 * (x2 * x2 + y2 * y2),
        "cm_residual": np.hypot(Xdot - 0.5 * (y + cfg.y0), Ydot - 0.5 * (cfg.x0 - x)),
    }


def drift(value, initial):
    return np.abs(value - initial) / np.maximum(1.0, np.abs(initial))


def cm_velocity_residual(state, cfg):
    return float(monitor_arrays(state.to_array(), cfg)["cm_residual"][0])


def monitors(state, cfg, reference=None):
    if state.r == 0.0:
        raise CoulombSingularity("monitors are undefined at r = 0")
    values = {name: float(col[0]) for name, col in monitor_arrays(state.to_array(), cfg).items()}
    drifts = {
        name: float(drift(values[name], getattr(reference, name))) if reference else 0.0 for name in MONITORED
    }
    return MonitorRecord(
        H_rel=values["H_rel"],
        Lambda_rel=values["Lambda_rel"],
        KX=values["KX"],
        KY=values["KY"],
        LZ=values["LZ"],
        cm_residual=values["cm_residual"],
        drift=drifts,
    )


# ===== Trajectory =====
@dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: FullState
    q: QPoint
    monitors: MonitorRecord


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    cfg: object
    termination: str = "time_limit"
    nfev: int = 0

    def __len__(self):
        return len(self.t)

    def monitor_table(self):
        table = monitor_arrays(self.states, self.cfg)
        for name in MONITORED:
            table[f"{name}_drift"] = drift(table[name], table[name][0])
        return table

    @property
    def samples(self):
        table = self.monitor_table()
        out = []
        for i, t in enumerate(self.t):
            drifts = {name: float(table[f"{name}_drift"][i]) for name in MONITORED}
            record = MonitorRecord(
                H_rel=float(table["H_rel"][i]),
                Lambda_rel=float(table["Lambda_rel"][i]),
                KX=float(table["KX"][i]),
                KY=float(table["KY"][i]),
                LZ=float(table["LZ"][i]),
                cm_residual=float(table["cm_residual"][i]),
                drift=drifts,
            )
            q = QPoint(float(table["q1"][i]), float(table["q2"][i]))
            out.append(TrajectorySample(float(t), FullState.from_array(self.states[i]), q, record))
        return out

    def max_drift(self):
        table = self.monitor_table()
        return {name: float(np.max(table[f"{name}_drift"])) for name in MONITORED}

    def to_frame(self):
        table = self.monitor_table()
        frame = pd.DataFrame(self.states, columns=list(FIELDS))
        frame.insert(0, "t", self.t)
        frame["X"] = 0.5 * (frame["x1"] + frame["x2"])
        frame["Y"] = 0.5 * (frame["y1"] + frame["y2"])
        frame["q1"] = table["q1"]
        frame["q2"] = table["q2"]
        frame["u"], frame["v"] = elliptic_arrays(table["q1"], table["q2"], self.cfg)
        frame["H"] = table["H_rel"]
        frame["Lambda"] = table["Lambda_rel"]
        for name in ("KX", "KY", "LZ"):
            frame[name] = table[name]
        return frame[TRAJECTORY_COLUMNS]


# ===== Full Integration =====
# The K_X, K_Y relations remove the magnetic coupling from the relative motion,
# which leaves x'' = -grad U - alpha x / r^3 with U = ((x - K_Y)^2 + (y + K_X)^2) / 2.
# It is integrated in Levi-Civita form, x + i y = w^2 and dt = r dtau, where the
# equations are polynomial in (w, w') and stay smooth through close encounters.
# The centre of mass and the clock t ride along as quadratures.
def _momenta(s):
    return s[4] + s[6] + s[1] - s[3], s[5] + s[7] + s[2] - s[0]


def _regularized_rhs(tau, s, kx, ky, energy):
    xi, eta, dxi, deta = s[0], s[1], s[2], s[3]
    r = xi * xi + eta * eta
    x = xi * xi - eta * eta
    y = 2.0 * xi * eta
    A = x - ky
    B = y + kx
    shell = 0.5 * (A * A + B * B) - energy
    return [
        dxi,
        deta,
        -0.5 * (xi * shell + r * (A * xi + B * eta)),
        -0.5 * (eta * shell + r * (B * xi - A * eta)),
        0.5 * r * (y + kx),
        0.5 * r * (ky - x),
        r,
    ]


def _pericentre(tau, s, *_):
    """Half of dr/dtau; zero at every closest approach and every farthest point."""
    return s[0] * s[2] + s[1] * s[3]


def _regularize(ic, t_start, cfg):
    s = ic.to_array()
    kx, ky = _momenta(s)
    x, y = s[2] - s[0], s[3] - s[1]
    zdot = complex(s[6] - s[4], s[7] - s[5])
    w = np.sqrt(complex(x, y))
    wp = 0.5 * zdot * np.conj(w)
    energy = 0.5 * abs(zdot) ** 2 + 0.5 * ((x - ky) ** 2 + (y + kx) ** 2) - cfg.alpha / ic.r
    return [w.real, w.imag, wp.real, wp.imag, 0.5 * (s[0] + s[2]), 0.5 * (s[1] + s[3]), t_start], kx, ky, energy


def _unregularize(reg, kx, ky):
    """(7, n) regularized states to (n, 8) lab states."""
    xi, eta, dxi, deta, X, Y = reg[:6]
    w = xi + 1j * eta
    r = xi * xi + eta * eta
    z = w * w
    zdot = 2.0 * (dxi + 1j * deta) * w / r
    x, y, xdot, ydot = z.real, z.imag, zdot.real, zdot.imag
    return np.column_stack(
        [
            X - 0.5 * x,
            Y - 0.5 * y,
            X + 0.5 * x,
            Y + 0.5 * y,
            0.5 * (kx + y) - 0.5 * xdot,
            0.5 * (ky - x) - 0.5 * ydot,
            0.5 * (kx + y) + 0.5 * xdot,
            0.5 * (ky - x) + 0.5 * ydot,
        ]
    )


def _tau_at(t, tau_nodes, t_nodes, dense):
    """Invert the clock t(tau) between step nodes; t_nodes must be ascending."""
    k = int(np.searchsorted(t_nodes, t))
    if k == 0:
        return tau_nodes[0]
    if k >= len(t_nodes):
        return tau_nodes[-1]
    lo, hi = sorted((tau_nodes[k - 1], tau_nodes[k]))
    g_lo, g_hi = dense(lo)[6] - t, dense(hi)[6] - t
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0 or g_lo * g_hi > 0.0:
        return hi
    return brentq(lambda tau: dense(tau)[6] - t, lo, hi, xtol=1e-14)


def _first_collision(sol, radius, previous):
    """Regularized time at which r first drops to radius within one chunk, or None.

    previous is the regularized time of the last extremum of r before this chunk.
    """
    dense = sol.sol

    def gap(tau):
        s = dense(tau)
        return s[0] * s[0] + s[1] * s[1] - radius

    for tau_e, s_e in zip(sol.t_events[1], sol.y_events[1]):
        if s_e[0] ** 2 + s_e[1] ** 2 <= radius:
            # r is monotone between consecutive extrema
            start = max(previous, sol.t[0]) if sol.t[-1] > sol.t[0] else min(previous, sol.t[0])
            if gap(start) <= 0.0:
                return start
            lo, hi = sorted((start, tau_e))
            return brentq(gap, lo, hi, xtol=1e-14)
        previous = tau_e
    return None


def integrate_full(ic, cfg, t_span, tol=1e-10, samples=1000, collision_radius=COLLISION_RADIUS):
    t_start, t_end = (float(t) for t in t_span)
    if ic.r <= collision_radius:
        raise CoulombSingularity(f"initial separation {ic.r:.3e} is inside the collision radius {collision_radius:.3e}")

    if t_end == t_start:
        return Trajectory(t=np.array([t_start]), states=ic.to_array()[None, :], cfg=cfg)

    s, kx, ky, energy = _regularize(ic, t_start, cfg)
    sign = 1.0 if t_end > t_start else -1.0
    # lab-frame energy errors are the Levi-Civita errors divided by r
    inner_tol = max(tol * REGULAR_TOL_SCALE, REGULAR_TOL_FLOOR)
    tau_bound = TAU_LIMIT * (1.0 + abs(t_end - t_start))

    def time_limit(tau, s, *_):
        return s[6] - t_end

    time_limit.terminal = True

    chunks = []
    tau, previous, tau_hit, nfev = 0.0, 0.0, None, 0
    while True:
        sol = solve_ivp(
            _regularized_rhs,
            (tau, tau + sign * TAU_CHUNK),
            s,
            method=METHOD,
            dense_output=True,
            rtol=inner_tol,
            atol=inner_tol,
            events=[time_limit, _pericentre],
            args=(kx, ky, energy),
        )
        nfev += sol.nfev
        if sol.status == -1:
            raise StepFailure(f"integration failed at t = {sol.y[6, -1]:.10g}: {sol.message}")
        chunks.append(sol)

        tau_hit = _first_collision(sol, collision_radius, previous)
        if tau_hit is not None or sol.status == 1:
            break
        if sol.t_events[1].size:
            previous = sol.t_events[1][-1]
        tau, s = sol.t[-1], sol.y[:, -1]
        if abs(tau) > tau_bound:
            raise StepFailure(f"integration stalled at t = {s[6]:.10g} before reaching t = {t_end}")

    ts = np.concatenate([chunks[0].sol.ts] + [c.sol.ts[1:] for c in chunks[1:]])
    clock = np.concatenate([chunks[0].y[6]] + [c.y[6, 1:] for c in chunks[1:]])
    dense = OdeSolution(ts, [piece for c in chunks for piece in c.sol.interpolants])

    t = np.linspace(t_start, t_end, max(int(samples), 2))
    termination = "time_limit"
    if tau_hit is not None:
        termination = "collision"
        t_hit = float(dense(tau_hit)[6])
        t = np.append(t[sign * (t - t_hit) < 0.0], t_hit)
        logger.warning(f"Collision (r = {collision_radius:.1e}) at t = {t_hit:.10g}; trajectory truncated")

    # step nodes ordered by t
    order = slice(None) if sign > 0 else slice(None, None, -1)
    tau_nodes, t_nodes = ts[order], clock[order]
    taus = np.array([_tau_at(ti, tau_nodes, t_nodes, dense) for ti in t])
    taus[0] = 0.0
    if tau_hit is not None:
        taus[-1] = tau_hit
    states = _unregularize(dense(taus), kx, ky)
    states[0] = ic.to_array()

    logger.debug(f"{METHOD} run over [{t_start}, {t_end}]: {nfev} rhs evaluations in {len(chunks)} chunks")
    return Trajectory(t=t, states=states, cfg=cfg, termination=termination, nfev=nfev)


def integrate_window(ic, cfg, t_min, t_max, tol=1e-10, samples=1000, collision_radius=COLLISION_RADIUS):
    """Integrate from t = 0 both ways to cover [t_min, t_max]."""
    if t_min > 0 or t_max < 0:
        raise ValidationError(f"the window [{t_min}, {t_max}] must contain t = 0")
    if t_min == 0:
        return integrate_full(ic, cfg, (0.0, t_max), tol, samples, collision_radius)
    if t_max == 0:
        back = integrate_full(ic, cfg, (0.0, t_min), tol, samples, collision_radius)
        return Trajectory(t=back.t[::-1], states=back.states[::-1], cfg=cfg, termination=back.termination, nfev=back.nfev)

    n_back = max(2, int(round(samples * -t_min / (t_max - t_min))) + 1)
    n_fwd = max(2, samples - n_back + 1)
    back = integrate_full(ic, cfg, (0.0, t_min), tol, n_back, collision_radius)
    fwd = integrate_full(ic, cfg, (0.0, t_max), tol, n_fwd, collision_radius)
    termination = fwd.termination if fwd.termination != "time_limit" else back.termination
    return Trajectory(
        t=np.concatenate([back.t[:0:-1], fwd.t]),
        states=np.vstack([back.states[:0:-1], fwd.states]),
        cfg=cfg,
        termination=termination,
        nfev=back.nfev + fwd.nfev,
    )


# ===== Separated Integration =====
@dataclass
class SeparatedRun:
    frame: pd.DataFrame
    dense: object
    termination: str
    max_residual: float


def _separated_rhs(zeta, s, qp):
    u, v, up, vp, _ = s
    # F(z) = (1 - z^2) P4(z); the second-order form is z'' = F'(z) / 2
    upp = -u * p4_eval(u, qp) + 0.5 * (1.0 - u * u) * p4_derivative(u, qp)
    vpp = -v * p4_eval(v, qp) + 0.5 * (1.0 - v * v) * p4_derivative(v, qp)
    return [up, vp, upp, vpp, u * u - v * v]


def integrate_separated(e0, signs, mc, cfg, zeta_span, tol=1e-10, samples=1000, t_max=None):
    qp = params_for(mc, cfg)
    u0, v0 = float(e0.u), float(e0.v)
    F0 = (1.0 - u0 * u0) * p4_eval(u0, qp)
    G0 = (1.0 - v0 * v0) * p4_eval(v0, qp)
    slack = 1e-9 * qp.scale
    if F0 < -slack or G0 < -slack:
        raise OutsideAllowedRegion(f"(u, v) = ({u0}, {v0}) is outside the allowed region: F = {F0:.3e}, G = {G0:.3e}")

    s0 = [u0, v0, signs[0] * math.sqrt(max(F0, 0.0)), signs[1] * math.sqrt(max(G0, 0.0)), 0.0]
    events = []
    if t_max is not None:

        def time_limit(zeta, s, *_):
            return s[4] - t_max

        time_limit.terminal = True
        time_limit.direction = 1 if t_max >= 0 else -1
        events.append(time_limit)

    z_start, z_end = (float(z) for z in zeta_span)
    # samples=None keeps the integrator's own step nodes
    t_eval = None if samples is None else np.linspace(z_start, z_end, max(int(samples), 2))
    sol = solve_ivp(
        _separated_rhs,
        (z_start, z_end),
        s0,
        method=METHOD,
        t_eval=t_eval,
        dense_output=True,
        rtol=tol,
        atol=tol,
        events=events or None,
        args=(qp,),
    )
    if sol.status == -1:
        raise StepFailure(f"separated integration failed: {sol.message}")

    u, v, up, vp, t = sol.y
    res_u = np.abs(up * up - (1.0 - u * u) * p4_eval(u, qp))
    res_v = np.abs(vp * vp - (1.0 - v * v) * p4_eval(v, qp))
    frame = pd.DataFrame({"zeta": sol.t, "u": u, "v": v, "t": t, "residual_u": res_u, "residual_v": res_v})
    termination = "time_limit" if sol.status == 1 else "zeta_limit"
    max_residual = float(max(res_u.max(initial=0.0), res_v.max(initial=0.0)))
    logger.debug(f"Separated run: {sol.nfev} rhs evaluations, first-integral residual {max_residual:.3e}")
    return SeparatedRun(frame=frame, dense=sol.sol, termination=termination, max_residual=max_residual)


# ===== Cross-check =====
@dataclass(frozen=True)
class CrossCheckReport:
    max_du: float
    max_dv: float
    n_samples: int
    t_end: float
    termination_full: str
    max_first_integral_residual: float = 0.0

    def as_dict(self):
        return {
            "max_du": self.max_du,
            "max_dv": self.max_dv,
            "n_samples": self.n_samples,
            "t_end": self.t_end,
            "termination_full": self.termination_full,
            "max_first_integral_residual": self.max_first_integral_residual,
        }


def _initial_elliptic(ic, cfg):
    x, y = ic.x2 - ic.x1, ic.y2 - ic.y1
    q = rel_to_q(x, y, cfg)
    qdot1, qdot2 = rel_velocity_to_q(ic.vx2 - ic.vx1, ic.vy2 - ic.vy1, cfg)
    udot, vdot = elliptic_rates(q, qdot1, qdot2, cfg)
    return q_to_elliptic(q, cfg), (1.0 if udot >= 0 else -1.0, 1.0 if vdot >= 0 else -1.0)


def _zeta_at(t, zeta_nodes, t_nodes, dense):
    """Invert t(zeta) on the step nodes of the separated run; t is non-decreasing in zeta."""
    k = int(np.searchsorted(t_nodes, t))
    if k == 0:
        return zeta_nodes[0]
    if k >= len(t_nodes):
        return None if t > t_nodes[-1] + 1e-12 else zeta_nodes[-1]
    lo, hi = zeta_nodes[k - 1], zeta_nodes[k]
    g_lo, g_hi = dense(lo)[4] - t, dense(hi)[4] - t
    if g_lo == 0.0:
        return lo
    if g_lo * g_hi > 0.0:
        return hi
    return brentq(lambda z: dense(z)[4] - t, lo, hi, xtol=1e-14)


def cross_check(ic, cfg, mc, t_max, tol=1e-10, samples=201, collision_radius=COLLISION_RADIUS):
    if t_max < 0:
        raise ValidationError("cross_check runs forward in time; t_max must be >= 0")
    if t_max == 0:
        return CrossCheckReport(max_du=0.0, max_dv=0.0, n_samples=1, t_end=0.0, termination_full="time_limit")

    full = integrate_full(ic, cfg, (0.0, t_max), tol, samples, collision_radius)
    frame = full.to_frame()

    e0, signs = _initial_elliptic(ic, cfg)
    t_end = float(full.t[-1])
    sep = integrate_separated(e0, signs, mc, cfg, (0.0, 1e3 * (1.0 + t_end)), tol, samples=None, t_max=t_end)
    zeta_nodes = sep.frame["zeta"].to_numpy()
    t_nodes = sep.frame["t"].to_numpy()

    du = dv = 0.0
    compared = 0
    for t, u_full, v_full in zip(frame["t"], frame["u"], frame["v"]):
        zeta = _zeta_at(t, zeta_nodes, t_nodes, sep.dense)
        if zeta is None:
            continue
        u_sep, v_sep = sep.dense(zeta)[:2]
        du = max(du, abs(u_sep - u_full))
        dv = max(dv, abs(v_sep - v_full))
        compared += 1

    if full.termination == "collision":
        logger.warning(f"Cross-check compared up to the collision at t = {t_end:.6g}")
    return CrossCheckReport(
        max_du=float(du),
        max_dv=float(dv),
        n_samples=compared,
        t_end=t_end,
        termination_full=full.termination,
        max_first_integral_residual=sep.max_residual,
    )


# ===== Centre-of-mass Drift =====
@dataclass(frozen=True)
class DriftSummary:
    dX: float
    dY: float
    displacement: float
    amplitude: float

    @property
    def ratio(self):
        return self.displacement / self.amplitude if self.amplitude > 0 else math.inf

    def as_dict(self):
        return {"dX": self.dX, "dY": self.dY, "displacement": self.displacement, "amplitude": self.amplitude}


def drift_summary(trajectory):
    s = trajectory.states
    X = 0.5 * (s[:, 0] + s[:, 2])
    Y = 0.5 * (s[:, 1] + s[:, 3])
    dX, dY = float(X[-1] - X[0]), float(Y[-1] - Y[0])
    # each particle sits r/2 from the centre of mass
    amplitude = float(0.5 * np.max(np.hypot(s[:, 0] - s[:, 2], s[:, 1] - s[:, 3])))
    return DriftSummary(dX=dX, dY=dY, displacement=math.hypot(dX, dY), amplitude=amplitude)
