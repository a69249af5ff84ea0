import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from rzlab import fracpow, potentials, semigroup, spectral
from rzlab.grid import Field, GridSpec


def mean_zero_field(g, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape)
    v -= v.mean()
    return Field(g, v / np.linalg.norm(v))


def test_constants():
    assert fracpow.C1 == pytest.approx(0.5641895835477563, rel=1e-15)
    assert fracpow.C2 == pytest.approx(-0.28209479177387814, rel=1e-15)
    assert fracpow.C1 == pytest.approx(-2.0 * fracpow.C2, rel=1e-15)
    assert fracpow.C1 > 0 > fracpow.C2


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_riesz_kernel_constant_from_subordination(d, x):
    val, _ = scipy_quad(
        lambda t: (4 * math.pi * t) ** (-d / 2)
        * math.exp(-x * x / (4 * t))
        * fracpow.C1
        / math.sqrt(t),
        0,
        np.inf,
    )
    pred = fracpow.riesz_kernel_constant(d) * x ** (1 - d)
    assert val == pytest.approx(pred, rel=1e-9)


def test_scalar_identity_examples():
    q = fracpow.build_quadrature(-1.0, (0.5, 20.0))
    assert q.scalar_apply(1.0)[0] == pytest.approx(1.0, abs=1e-6)
    q = fracpow.build_quadrature(-0.5, (0.5, 20.0))
    assert q.scalar_apply(4.0)[0] == pytest.approx(0.5, abs=1e-6)
    q = fracpow.build_quadrature(0.5, (0.5, 20.0))
    assert q.scalar_apply(9.0)[0] == pytest.approx(3.0, abs=1e-5)


@pytest.mark.parametrize("power", [-0.5, -1.0, 0.5])
def test_quadrature_structure_and_range(power):
    q = fracpow.build_quadrature(power, (0.05, 2000.0))
    assert np.all(np.diff(q.nodes) > 0)
    assert np.all(q.weights > 0)
    assert q.u_min > 0
    assert q.max_identity_error() <= 1e-6


def test_quadrature_rejects_bad_range():
    with pytest.raises(ValueError):
        fracpow.build_quadrature(-0.5, (0.0, 1.0))
    with pytest.raises(ValueError):
        fracpow.build_quadrature(-0.25, (0.5, 1.0))


def test_unreachable_tolerance_raises():
    with pytest.raises(fracpow.QuadratureBuildError):
        fracpow.build_quadrature(0.5, (1e-9, 1e9), tol=1e-6, max_panels=10)


def test_frac_power_zero_potential_matches_multiplier():
    g = GridSpec(1, 32, 4.0)
    f = mean_zero_field(g)
    V = potentials.discretize_potential(potentials.zero(), g)
    out = fracpow.frac_power_apply(f, V, -0.5)
    ref = spectral.apply_multiplier(f, spectral.inv_sqrt_laplacian())
    assert np.linalg.norm(out.values - ref.values) <= 1e-5 * np.linalg.norm(ref.values)


def test_frac_power_half_inverts_neg_half():
    g = GridSpec(1, 32, 4.0)
    f = mean_zero_field(g, 1)
    V = potentials.discretize_potential(potentials.zero(), g)
    half = fracpow.frac_power_apply(f, V, -0.5)
    back = fracpow.frac_power_apply(half, V, 0.5)
    assert np.linalg.norm(back.values - f.values) <= 1e-4 * np.linalg.norm(f.values)


def test_frac_power_requires_mean_zero_when_singular():
    g = GridSpec(1, 32, 4.0)
    V = potentials.discretize_potential(potentials.zero(), g)
    f = Field(g, np.ones(g.shape))
    with pytest.raises(ValueError, match="mean-zero"):
        fracpow.frac_power_apply(f, V, -0.5)


@pytest.mark.parametrize("power", [-0.5, -1.0, 0.5])
def test_frac_power_matches_dense_oracle(power):
    g = GridSpec(1, 32, 4.0)
    f = mean_zero_field(g, 2)
    V = potentials.discretize_potential(potentials.harmonic(), g)
    out = fracpow.frac_power_apply(f, V, power)
    mat = fracpow.dense_power(g, V, power)
    ref = mat @ f.flat()
    assert np.linalg.norm(out.flat() - ref) <= 1e-4 * np.linalg.norm(ref)


def test_dense_green_composition():
    g = GridSpec(1, 64, 4.0)
    V = potentials.discretize_potential(potentials.harmonic(), g)
    g_half = fracpow.dense_green(g, V, -0.5)
    g_full = fracpow.dense_green(g, V, -1.0)
    lhs = g_half @ g_half * g.cell_volume
    assert np.linalg.norm(lhs - g_full) <= 1e-10 * np.linalg.norm(g_full)


def test_dense_green_nonnegative_and_dominated():
    # On the torus no positive free Green kernel exists (the zero mode
    # never decays), so pointwise domination is checked on finite-horizon
    # kernels int_0^T: the statement the semigroup comparison integrates.
    g = GridSpec(1, 32, 4.0)
    V = potentials.discretize_potential(potentials.harmonic(), g)
    g_v = fracpow.dense_green(g, V, -1.0)
    assert g_v.min() >= -1e-8 * np.abs(g_v).max()

    V0 = potentials.discretize_potential(potentials.zero(), g)
    op_v = semigroup.dense_schrodinger(g, V)
    op_0 = semigroup.dense_schrodinger(g, V0)
    T = 5.0

    def horizon(lam):
        lam = np.asarray(lam)
        safe = np.where(np.abs(lam) > 1e-12, lam, 1.0)
        return np.where(np.abs(lam) > 1e-12, (1.0 - np.exp(-T * lam)) / safe, T)

    G_v = semigroup.matrix_function(op_v, horizon) / g.cell_volume
    G_0 = semigroup.matrix_function(op_0, horizon) / g.cell_volume
    assert np.max(G_v - G_0) <= 1e-8 * np.abs(G_0).max()


def test_dense_green_constant_potential():
    g = GridSpec(1, 32, 4.0)
    c = 2.0
    V = potentials.discretize_potential(potentials.const(c), g)
    G = fracpow.dense_green(g, V, -1.0)
    ones = np.ones(g.num_points)
    applied = G @ (ones * g.cell_volume)
    np.testing.assert_allclose(applied, 1.0 / c, rtol=1e-10)


def test_green_mass_zero_and_const():
    g = GridSpec(1, 32, 4.0)
    V0 = potentials.discretize_potential(potentials.zero(), g)
    assert fracpow.green_mass(g, V0, (0,)) == 0.0
    V = potentials.discretize_potential(potentials.const(2.0), g)
    for y in (0, 5, 17):
        assert fracpow.green_mass(g, V, y) == pytest.approx(1.0, abs=1e-10)


def test_green_mass_random_potentials_bounded():
    g = GridSpec(1, 32, 4.0)
    rng = np.random.default_rng(3)
    for _ in range(50):
        V = Field(g, rng.uniform(0.0, 5.0, g.shape))
        masses = fracpow.green_mass_all(g, V)
        ys = rng.integers(0, g.num_points, 5)
        assert np.all(masses[ys] <= 1.0 + 1e-8)


def test_perturbation_kernel_zero_potential():
    g = GridSpec(1, 16, 2.0)
    V = potentials.discretize_potential(potentials.zero(), g)
    W = fracpow.perturbation_kernel(g, V)
    assert np.all(W.matrix == 0.0)


@pytest.mark.parametrize("pot", [potentials.const(2.0), potentials.harmonic(), potentials.ce3()])
def test_perturbation_kernel_invariants_1d(pot):
    g = GridSpec(1, 32, 4.0)
    V = potentials.discretize_potential(pot, g)
    W = fracpow.perturbation_kernel(g, V)
    assert W.min_entry >= -1e-8 * W.max_abs_entry
    assert W.max_column_mass <= 2.0 * math.sqrt(math.pi) + 1e-6


def test_perturbation_identity_reconstructs_factor():
    g = GridSpec(1, 32, 4.0)
    V = potentials.discretize_potential(potentials.harmonic(), g)
    W = fracpow.perturbation_kernel(g, V)
    A = fracpow.half_power_factor(g, V)
    recon = np.eye(g.num_points) + fracpow.C2 * W.matrix * g.cell_volume
    assert np.max(np.abs(recon - A)) <= 1e-10 * np.max(np.abs(A))


def test_export_kernel_rows_roundtrip(tmp_path):
    from rzlab.grid import read_field

    g = GridSpec(1, 16, 2.0)
    V = potentials.discretize_potential(potentials.const(1.0), g)
    G = fracpow.dense_green(g, V, -1.0)
    paths = fracpow.export_kernel_rows(G, g, tmp_path, rows=[0, 7])
    assert len(paths) == 2
    back = read_field(paths[1])
    np.testing.assert_array_equal(back.values, G[7])


def test_spectral_bounds_with_and_without_dense():
    g = GridSpec(1, 32, 4.0)
    V = potentials.discretize_potential(potentials.harmonic(), g)
    lo, hi = fracpow.spectral_bounds(g, V)
    op = semigroup.dense_schrodinger(g, V)
    assert lo == pytest.approx(op.eigenvalues[0])
    assert hi == pytest.approx(op.eigenvalues[-1])
    lo2, hi2 = fracpow.spectral_bounds(g, V, use_dense=False)
    assert 0 < lo2 <= hi2
    assert hi2 >= op.eigenvalues[-1] * 0.99
