import math

import numpy as np
import pytest

from rzlab import potentials
from rzlab.grid import Field, GridSpec


def test_ce3_at_origin():
    val = potentials.eval_potential(potentials.ce3(), [0.0, 0.0, 0.0])
    assert val == pytest.approx(math.log(4.0) ** -2, rel=1e-12)


def test_ce1_unit_radius():
    assert potentials.eval_potential(potentials.ce1(0.25), [1.0, 0.0, 3.7]) == pytest.approx(1.0)


def test_ce2_vanishes_outside_ball():
    assert potentials.eval_potential(potentials.ce2(4.0), [0.5, 0.9, 0.5]) == 0.0


def test_singular_evaluations_raise():
    with pytest.raises(potentials.SingularPotentialError):
        potentials.eval_potential(potentials.ce1(0.25), [0.0, 0.0, 1.0])
    with pytest.raises(potentials.SingularPotentialError):
        potentials.eval_potential(potentials.ce2(4.0), [0.0, 0.1, 0.1])


def test_discretize_zero_and_const():
    g = GridSpec(2, 8, 1.0)
    z = potentials.discretize_potential(potentials.zero(), g)
    assert np.all(z.values == 0.0)
    c = potentials.discretize_potential(potentials.const(3.5), g, cap=1e300)
    assert np.all(c.values == 3.5)


def test_ce1_auto_cap_value():
    # half-cell value: (h/2)^(eps - 2) with h = 0.125 gives 0.0625^(-1.75) = 128
    g = GridSpec(2, 16, 1.0)
    f = potentials.discretize_potential(potentials.ce1(0.25), g, cap="auto")
    assert f.values.max() == pytest.approx(128.0, rel=1e-12)
    assert potentials.auto_cap(potentials.ce1(0.25), g) == pytest.approx(128.0, rel=1e-12)


def test_discretize_bounds_and_monotonicity():
    g = GridSpec(2, 16, 2.0)
    spec = potentials.ce1(0.3)
    lo = potentials.discretize_potential(spec, g, cap=5.0)
    hi = potentials.discretize_potential(spec, g, cap=50.0)
    assert lo.values.min() >= 0.0
    assert lo.values.max() <= 5.0
    assert np.all(hi.values >= lo.values)


def test_uncapped_matches_formula_for_smooth_tags():
    g = GridSpec(2, 8, 2.0)
    for spec in (potentials.zero(), potentials.const(2.0), potentials.harmonic()):
        f = potentials.discretize_potential(spec, g, cap=np.finfo(float).max)
        pts = g.points()
        expect = np.array([potentials.eval_potential(spec, p) for p in pts])
        np.testing.assert_array_equal(f.flat(), expect)


def test_ce1_requires_two_dims():
    g = GridSpec(1, 8, 1.0)
    with pytest.raises(ValueError, match="d >= 2"):
        potentials.discretize_potential(potentials.ce1(0.25), g)


def test_spec_validation():
    with pytest.raises(ValueError):
        potentials.ce1(1.5)
    with pytest.raises(ValueError):
        potentials.ce2(2.0)
    with pytest.raises(ValueError):
        potentials.const(-1.0)


def test_custom_potential_roundtrip():
    g = GridSpec(1, 8, 1.0)
    base = Field(g, np.abs(np.sin(g.axis())) + 0.5)
    spec = potentials.custom(base)
    f = potentials.discretize_potential(spec, g, cap=0.75)
    assert np.all(f.values <= 0.75)
    assert np.all(f.values >= 0.0)


def test_catalog_dimension_filter():
    tags1 = [p.tag for p in potentials.standard_catalog(1)]
    tags2 = [p.tag for p in potentials.standard_catalog(2)]
    assert "ce1" not in tags1
    assert "ce1" in tags2
