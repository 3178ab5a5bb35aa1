import math

import numpy as np
import pytest

from tests.conftest import U_CAUSTIC, V_CAUSTIC, point
from utils.physics.quartic import (
    QuarticParams,
    boundary_lines,
    discriminant,
    discriminant_scaled,
    p4_eval,
    p4_roots,
    p6_eval,
    params_for,
    quartic_params,
)


def _near(values, target, tol=5e-4):
    return any(abs(v - target) <= tol for v in values)


def test_params_reproduce_polynomial():
    qp = quartic_params(1.6, 2.2, 1.0 / 3.0)
    for z in np.linspace(-3.0, 3.0, 13):
        expected = z ** 4 - (1 + 2 * 1.6) * z ** 2 - 2 * (1.0 / 3.0) * z + 2 * 2.2
        assert p4_eval(z, qp) == pytest.approx(expected, abs=1e-12)


def test_p4_eval_examples():
    qp = quartic_params(1.6, 2.2, 1.0 / 3.0)
    assert abs(p4_eval(1.111, qp)) < 5e-3
    assert p4_eval(0.0, qp) == pytest.approx(4.4)


def test_p6_vanishes_at_unit_points():
    qp = quartic_params(0.7, -0.2, 0.5)
    assert p6_eval(1.0, qp) == 0.0
    assert p6_eval(-1.0, qp) == 0.0


def test_unit_values_match_boundary_lines(rng):
    for h_a, lam_a, alpha_a in rng.uniform(-5.0, 5.0, size=(50, 3)):
        mc, cfg = point(h_a, lam_a, abs(alpha_a) + 1e-3)
        qp = params_for(mc, cfg)
        l1, l2 = boundary_lines(mc, cfg)
        assert p4_eval(1.0, qp) == pytest.approx(-2.0 * l1, abs=1e-12 * max(1.0, qp.scale))
        assert p4_eval(-1.0, qp) == pytest.approx(-2.0 * l2, abs=1e-12 * max(1.0, qp.scale))


def test_roots_of_satellitary_example():
    roots = p4_roots(params_for(*point(-1.0, -1.0))).real_roots
    assert len(roots) == 2
    assert _near(roots, U_CAUSTIC, tol=1e-6)
    assert _near(roots, V_CAUSTIC, tol=1e-6)


def test_roots_of_oscillatory_example():
    root_set = p4_roots(params_for(*point(2.0, 0.5)))
    assert root_set.n_complex_pairs == 0
    for target in (-2.112, -0.537, 0.391, 2.258):
        assert _near(root_set.real_roots, target, tol=1e-3)


def test_roots_of_planetary_example():
    roots = p4_roots(params_for(*point(1.6, 2.2))).real_roots
    assert _near(roots, 1.111)
    assert _near(roots, 1.788)


def test_roots_without_coupling():
    h_a = 1.0
    root_set = p4_roots(quartic_params(h_a, 0.0, 0.0))
    s = math.sqrt(1 + 2 * h_a)
    assert root_set.real_roots == pytest.approx((-s, 0.0, 0.0, s), abs=1e-12)
    assert root_set.has_multiple


def test_roots_meet_residual_bound_and_vieta(rng):
    for h_a, lam_a, alpha_a in rng.uniform(-5.0, 5.0, size=(2000, 3)):
        qp = quartic_params(h_a, lam_a, alpha_a)
        root_set = p4_roots(qp)
        assert len(root_set.real_roots) + 2 * root_set.n_complex_pairs == 4
        assert list(root_set.real_roots) == sorted(root_set.real_roots)
        bound = 1e-9 * qp.scale
        assert all(res <= bound for res in root_set.residuals)

        roots = list(root_set.real_roots) + list(root_set.complex_roots)
        assert abs(sum(roots)) <= 1e-8 * qp.scale
        pair_sum = sum(roots[i] * roots[j] for i in range(4) for j in range(i + 1, 4))
        assert abs(pair_sum - qp.p) <= 1e-8 * qp.scale


def test_discriminant_examples():
    assert discriminant(QuarticParams(0.0, 0.0, 0.0)) == 0.0
    assert discriminant(params_for(*point(-1.0, -1.0))) < 0
    assert discriminant(params_for(*point(2.0, 0.5))) > 0


def test_discriminant_sign_predicts_real_root_count(rng):
    disagreements = 0
    for h_a, lam_a, alpha_a in rng.uniform(-5.0, 5.0, size=(10000, 3)):
        qp = quartic_params(h_a, lam_a, alpha_a)
        delta = discriminant(qp)
        if abs(delta) < 1e-8:
            continue
        n_real = len(p4_roots(qp).real_roots)
        expected = {0, 4} if delta > 0 else {2}
        disagreements += n_real not in expected
    assert disagreements == 0


def test_discriminant_scaled_is_vectorised():
    h = np.array([-1.0, 2.0])
    lam = np.array([-1.0, 0.5])
    values = discriminant_scaled(h, lam, 1.0 / 3.0)
    assert values[0] == pytest.approx(discriminant(quartic_params(-1.0, -1.0, 1.0 / 3.0)))
    assert values[1] == pytest.approx(discriminant(quartic_params(2.0, 0.5, 1.0 / 3.0)))


@pytest.mark.parametrize(
    "h_a, lam_a, l1, l2",
    [
        (0.0, 1.0 / 3.0, 0.0, None),
        (1.0 / 3.0, 0.0, None, 0.0),
        (1.6, 2.2, -0.26667, -0.93333),
    ],
)
def test_boundary_lines(h_a, lam_a, l1, l2):
    mc, cfg = point(h_a, lam_a)
    got1, got2 = boundary_lines(mc, cfg)
    if l1 is not None:
        assert got1 == pytest.approx(l1, abs=1e-5)
    if l2 is not None:
        assert got2 == pytest.approx(l2, abs=1e-5)
