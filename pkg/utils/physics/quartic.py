"""
The characteristic polynomials of the separated equations.

Both (du/dz)^2 and (dv/dz)^2 are P6(z) = (1 - z^2) P4(z) with

    P4(z) = z^4 - (1 + 2 h_a) z^2 - 2 alpha_a z + 2 lambda_a

which is already a depressed quartic z^4 + p z^2 + q z + r.
"""

from dataclasses import dataclass, field

import numpy as np

from utils.physics.model import MULTIPLE_ROOT_GAP, RESIDUAL_TOL
from utils.system.logger import get_logger

logger = get_logger()

EPS = np.finfo(float).eps
POLISH_STEPS = 20
REAL_IMAG_TOL = 1e-7
SNAP_GAP = 1e-6


@dataclass(frozen=True)
class QuarticParams:
    p: float
    q: float
    r: float

    @property
    def scale(self):
        return max(1.0, abs(self.p) + abs(self.q) + abs(self.r))


@dataclass(frozen=True)
class RootSet:
    real_roots: tuple
    n_complex_pairs: int
    residuals: tuple
    has_multiple: bool = False
    complex_roots: tuple = field(default=(), compare=False)

    @property
    def distinct_real(self):
        out = []
        for z in self.real_roots:
            if not out or z - out[-1] >= MULTIPLE_ROOT_GAP:
                out.append(z)
        return out


def quartic_params(h_a, lam_a, alpha_a):
    return QuarticParams(p=-(1.0 + 2.0 * h_a), q=-2.0 * alpha_a, r=2.0 * lam_a)


def params_for(mc, cfg):
    return quartic_params(mc.h_a, mc.lam_a, cfg.alpha_a)


# ===== Evaluation =====
def p4_eval(z, qp):
    return ((z * z + qp.p) * z + qp.q) * z + qp.r


def p4_derivative(z, qp):
    return (4.0 * z * z + 2.0 * qp.p) * z + qp.q


def p4_second_derivative(z, qp):
    return 12.0 * z * z + 2.0 * qp.p


def p6_eval(z, qp):
    return (1.0 - z * z) * p4_eval(z, qp)


def _eval_scale(z, qp):
    z = abs(z)
    return z ** 4 + abs(qp.p) * z * z + abs(qp.q) * z + abs(qp.r)


# ===== Root Finding =====
def _polish(z, qp):
    """Guarded Newton on P4; a step is kept only if it does not increase |P4|."""
    fz = p4_eval(z, qp)
    for _ in range(POLISH_STEPS):
        dfz = p4_derivative(z, qp)
        if dfz == 0:
            break
        step = fz / dfz
        z_new = z - step
        f_new = p4_eval(z_new, qp)
        if abs(f_new) > abs(fz):
            break
        z, fz = z_new, f_new
        if abs(step) <= 4.0 * EPS * (1.0 + abs(z)):
            break
    return z


def _snap_double(lo, hi, qp):
    """Newton on P4' between two nearby roots; returns the double root or None."""
    z = 0.5 * (lo + hi)
    for _ in range(POLISH_STEPS):
        d2 = p4_second_derivative(z, qp)
        if d2 == 0:
            return None
        step = p4_derivative(z, qp) / d2
        z -= step
        if abs(step) <= 4.0 * EPS * (1.0 + abs(z)):
            break
    if abs(z - 0.5 * (lo + hi)) > (hi - lo) + 1e-12:
        return None
    if abs(p4_eval(z, qp)) <= 64.0 * EPS * _eval_scale(z, qp):
        return z
    return None


def p4_roots(qp):
    seeds = np.roots([1.0, 0.0, qp.p, qp.q, qp.r])
    polished = [_polish(complex(z), qp) for z in seeds]
    polished.sort(key=lambda z: abs(z.imag))

    flags = [abs(z.imag) <= REAL_IMAG_TOL * (1.0 + abs(z.real)) for z in polished]
    n_real = sum(flags)
    if n_real % 2:
        # Non-real roots come in pairs; settle the one ambiguous root.
        nxt = polished[n_real] if n_real < 4 else None
        if nxt is not None and abs(nxt.imag) <= 10.0 * REAL_IMAG_TOL * (1.0 + abs(nxt.real)):
            n_real += 1
        else:
            n_real -= 1

    real = sorted(_polish(z.real, qp) for z in polished[:n_real])
    complex_roots = tuple(polished[n_real:])

    for i in range(len(real) - 1):
        gap = real[i + 1] - real[i]
        if gap < SNAP_GAP:
            z = _snap_double(real[i], real[i + 1], qp)
            if z is not None:
                real[i] = real[i + 1] = z

    real.sort()
    has_multiple = any(real[i + 1] - real[i] < MULTIPLE_ROOT_GAP for i in range(len(real) - 1))
    residuals = tuple(abs(p4_eval(z, qp)) for z in real)

    bound = RESIDUAL_TOL * qp.scale
    if any(res > bound for res in residuals):
        logger.debug(f"P4 root residual above bound {bound:.3e}: {residuals}")

    return RootSet(
        real_roots=tuple(real),
        n_complex_pairs=(4 - n_real) // 2,
        residuals=residuals,
        has_multiple=has_multiple,
        complex_roots=complex_roots,
    )


# ===== Discriminant and Boundary Lines =====
def discriminant(qp):
    p, q, r = qp.p, qp.q, qp.r
    return (
        16.0 * p ** 4 * r
        - 4.0 * p ** 3 * q ** 2
        - 128.0 * p ** 2 * r ** 2
        + 144.0 * p * q ** 2 * r
        - 27.0 * q ** 4
        + 256.0 * r ** 3
    )


def discriminant_scaled(h_a, lam_a, alpha_a):
    """Vectorised form over arrays of (h_a, lambda_a)."""
    p = -(1.0 + 2.0 * np.asarray(h_a, dtype=float))
    q = -2.0 * alpha_a
    r = 2.0 * np.asarray(lam_a, dtype=float)
    return discriminant(QuarticParams(p=p, q=q, r=r))


def boundary_lines(mc, cfg):
    """l1 = 0 puts a root of P4 at +1 (P4(1) = -2 l1); l2 = 0 puts one at -1 (P4(-1) = -2 l2)."""
    return mc.h_a + cfg.alpha_a - mc.lam_a, mc.h_a - cfg.alpha_a - mc.lam_a
