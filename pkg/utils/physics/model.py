"""
Problem parameters for the electron-positron pair in a constant magnetic field.

Everything is stored in dimensionless units: lengths in magnetic lengths
l = mc/eB, time in units of 1/omega (omega = eB/mc the cyclotron frequency),
reduced mass mu = m/2. One problem instance is fixed by the coupling alpha and
the oscillator-centre offsets (x0, y0), which encode the conserved magnetic
translation momenta (K_X, K_Y).
"""

import math
from dataclasses import dataclass

import numpy as np

from utils.system.errors import DegenerateMomentum, NonPositiveCoupling, ValidationError

# ===== Tolerances =====
REL_TOL = 1e-12
ELLIPTIC_TOL = 1e-12
RESIDUAL_TOL = 1e-9
MULTIPLE_ROOT_GAP = 1e-8
BOUNDARY_BAND = 1e-10
COLLISION_RADIUS = 1e-6


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def close_rel(a, b, rel=REL_TOL):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class PhysConfig:
    alpha: float
    x0: float
    y0: float
    a: float
    alpha_a: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise NonPositiveCoupling(f"alpha must be positive, got {self.alpha}")
        if not self.a > 0:
            raise DegenerateMomentum("a = 0 (x0 = y0 = 0) is not supported by the elliptic reduction")
        if not close_rel(self.a * self.a, self.x0 * self.x0 + self.y0 * self.y0):
            raise ValidationError(f"a = {self.a} does not match sqrt(x0^2 + y0^2)")
        if not close_rel(self.alpha_a * self.a ** 3, self.alpha):
            raise ValidationError(f"alpha_a = {self.alpha_a} does not match alpha / a^3")

    @property
    def coulomb_center(self):
        """Coulomb centre in the q-frame (the focus f2)."""
        return (-self.a, 0.0)

    def as_dict(self):
        return {
            "alpha": self.alpha,
            "x0": self.x0,
            "y0": self.y0,
            "a": self.a,
            "alpha_a": self.alpha_a,
        }


@dataclass(frozen=True)
class MotionConstants:
    h: float
    lam: float
    h_a: float
    lam_a: float

    def check(self, cfg):
        a2 = cfg.a * cfg.a
        return close_rel(self.h_a * a2, self.h) and close_rel(self.lam_a * a2, self.lam)

    def as_dict(self):
        return {"h": self.h, "lambda": self.lam, "h_a": self.h_a, "lambda_a": self.lam_a}


# ===== Construction =====
def derive_config(alpha, x0, y0):
    alpha = _finite("alpha", alpha)
    x0 = _finite("x0", x0)
    y0 = _finite("y0", y0)
    if x0 == 0.0 and y0 == 0.0:
        raise DegenerateMomentum("x0 = y0 = 0 gives a = 0, which is not supported")
    if alpha <= 0:
        raise NonPositiveCoupling(f"alpha must be positive, got {alpha}")

    a = math.hypot(x0, y0)
    return PhysConfig(alpha=alpha, x0=x0, y0=y0, a=a, alpha_a=alpha / a ** 3)


def config_from_scaled(alpha_a, x0=0.0, y0=1.0):
    """PhysConfig for a given alpha_a; alpha is recovered as alpha_a * a^3."""
    alpha_a = _finite("alpha_a", alpha_a)
    a = math.hypot(_finite("x0", x0), _finite("y0", y0))
    if a == 0.0:
        raise DegenerateMomentum("x0 = y0 = 0 gives a = 0, which is not supported")
    return derive_config(alpha_a * a ** 3, x0, y0)


def scale_constants(h, lam, cfg):
    h = _finite("h", h)
    lam = _finite("lambda", lam)
    a2 = cfg.a * cfg.a
    return MotionConstants(h=h, lam=lam, h_a=h / a2, lam_a=lam / a2)


def constants_from_scaled(h_a, lam_a, cfg):
    h_a = _finite("h_a", h_a)
    lam_a = _finite("lambda_a", lam_a)
    a2 = cfg.a * cfg.a
    return MotionConstants(h=h_a * a2, lam=lam_a * a2, h_a=h_a, lam_a=lam_a)


def unscale(mc, cfg):
    """(h, lambda, alpha) recovered from the a-scaled values."""
    a2 = cfg.a * cfg.a
    return mc.h_a * a2, mc.lam_a * a2, cfg.alpha_a * cfg.a ** 3


# ===== Potentials =====
# Both accept scalars or numpy arrays and give -inf on the Coulomb centre.
def reduced_potential(q1, q2, cfg):
    """Oscillator at the origin plus Coulomb centre at (-a, 0)."""
    r2 = np.hypot(q1 + cfg.a, q2)
    with np.errstate(divide="ignore"):
        return 0.5 * (q1 * q1 + q2 * q2) - cfg.alpha / r2


def relative_potential(x, y, cfg):
    """Same potential in relative coordinates: oscillator at (x0, -y0), Coulomb at the origin."""
    r = np.hypot(x, y)
    with np.errstate(divide="ignore"):
        return 0.5 * ((x - cfg.x0) ** 2 + (y + cfg.y0) ** 2) - cfg.alpha / r


# ===== Unit Conversion =====
def from_gaussian(mass, charge, field, kx, ky, light_speed=2.99792458e10):
    """
    Dimensionless (alpha, x0, y0) from Gaussian-unit inputs.

    mass and charge are those of one particle (e > 0), field is B, and
    (kx, ky) are the conserved magnetic translation momenta K_X, K_Y.
    """
    for name, value in (("mass", mass), ("charge", charge), ("field", field)):
        if not _finite(name, value) > 0:
            raise ValidationError(f"{name} must be positive, got {value}")

    omega = charge * field / (mass * light_speed)
    length = mass * light_speed / (charge * field)
    mu = mass / 2.0

    alpha = charge ** 2 / (mu * omega ** 2 * length ** 3)
    x0 = _finite("ky", ky) / (mass * omega * length)
    y0 = _finite("kx", kx) / (mass * omega * length)
    return alpha, x0, y0
