import math

import numpy as np
import pytest

from utils.physics.coords import rel_to_q
from utils.physics.model import (
    PhysConfig,
    config_from_scaled,
    constants_from_scaled,
    derive_config,
    from_gaussian,
    reduced_potential,
    relative_potential,
    scale_constants,
    unscale,
)
from utils.system.errors import DegenerateMomentum, NonPositiveCoupling, ValidationError


@pytest.mark.parametrize(
    "alpha, x0, y0, a, alpha_a",
    [
        (1.0 / 3.0, 0.0, 1.0, 1.0, 1.0 / 3.0),
        (1.0, 3.0, 4.0, 5.0, 1.0 / 125.0),
        (2.0, 0.0, 1.0, 1.0, 2.0),
    ],
)
def test_derive_config(alpha, x0, y0, a, alpha_a):
    cfg = derive_config(alpha, x0, y0)
    assert cfg.a == pytest.approx(a, rel=1e-12)
    assert cfg.alpha_a == pytest.approx(alpha_a, rel=1e-12)


def test_derive_config_rejects_zero_momentum():
    with pytest.raises(DegenerateMomentum):
        derive_config(1.0, 0.0, 0.0)


@pytest.mark.parametrize("alpha", [0.0, -1.0])
def test_derive_config_rejects_non_positive_coupling(alpha):
    with pytest.raises(NonPositiveCoupling):
        derive_config(alpha, 0.0, 1.0)


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        derive_config(float("nan"), 0.0, 1.0)


def test_inconsistent_config_is_rejected():
    with pytest.raises(ValidationError):
        PhysConfig(alpha=1.0, x0=3.0, y0=4.0, a=4.0, alpha_a=1.0 / 64.0)


def test_derive_config_is_rotation_invariant():
    base = derive_config(0.7, 0.0, 2.0)
    for angle in np.linspace(0.0, 2.0 * math.pi, 7):
        cfg = derive_config(0.7, 2.0 * math.sin(angle), 2.0 * math.cos(angle))
        assert cfg.a == pytest.approx(base.a, rel=1e-12)
        assert cfg.alpha_a == pytest.approx(base.alpha_a, rel=1e-12)


@pytest.mark.parametrize(
    "h, lam, y0, h_a, lam_a",
    [
        (-1.0, -1.0, 1.0, -1.0, -1.0),
        (0.0, 0.0, 3.0, 0.0, 0.0),
        (8.0, 2.0, 2.0, 2.0, 0.5),
    ],
)
def test_scale_constants(h, lam, y0, h_a, lam_a):
    cfg = derive_config(1.0, 0.0, y0)
    mc = scale_constants(h, lam, cfg)
    assert mc.h_a == pytest.approx(h_a, rel=1e-12, abs=0)
    assert mc.lam_a == pytest.approx(lam_a, rel=1e-12, abs=0)
    assert mc.check(cfg)


def test_unscale_round_trip():
    cfg = derive_config(0.9, 1.5, -2.5)
    mc = scale_constants(3.25, -1.75, cfg)
    h, lam, alpha = unscale(mc, cfg)
    assert h == pytest.approx(3.25, rel=1e-12)
    assert lam == pytest.approx(-1.75, rel=1e-12)
    assert alpha == pytest.approx(0.9, rel=1e-12)


def test_config_from_scaled():
    cfg = config_from_scaled(2.0, 3.0, 4.0)
    assert cfg.alpha == pytest.approx(250.0, rel=1e-12)
    assert cfg.alpha_a == pytest.approx(2.0, rel=1e-12)

    mc = constants_from_scaled(1.6, 2.2, cfg)
    assert mc.h == pytest.approx(40.0, rel=1e-12)
    assert mc.lam == pytest.approx(55.0, rel=1e-12)


def test_reduced_potential(cfg):
    assert reduced_potential(0.0, 0.0, cfg) == pytest.approx(-1.0 / 3.0)
    assert reduced_potential(-1.0, 0.0, cfg) == -math.inf
    assert reduced_potential(1.0, 0.0, cfg) == pytest.approx(0.5 - 1.0 / 6.0)


def test_relative_potential_matches_q_frame():
    cfg = derive_config(0.4, 1.2, -0.5)
    for x, y in [(0.3, -0.7), (2.0, 1.0), (-1.5, 0.25)]:
        q = rel_to_q(x, y, cfg)
        assert relative_potential(x, y, cfg) == pytest.approx(reduced_potential(q.q1, q.q2, cfg), rel=1e-12)


def test_reduced_potential_accepts_arrays(cfg):
    grid = np.linspace(-2.0, 2.0, 5)
    values = reduced_potential(grid, np.zeros_like(grid), cfg)
    assert values.shape == (5,)
    assert np.isinf(values[1])


def test_from_gaussian_in_natural_units():
    alpha, x0, y0 = from_gaussian(mass=1.0, charge=1.0, field=1.0, kx=0.5, ky=2.0, light_speed=1.0)
    assert alpha == pytest.approx(2.0)
    assert x0 == pytest.approx(2.0)
    assert y0 == pytest.approx(0.5)


def test_from_gaussian_rejects_bad_input():
    with pytest.raises(ValidationError):
        from_gaussian(mass=-1.0, charge=1.0, field=1.0, kx=0.0, ky=1.0)
