"""Fractional powers of L by subordination quadrature, plus dense oracles.

The powers -1/2, -1, +1/2 are weighted time-integrals of the semigroup:

    L^(-1/2) f = c1 * int_0^inf  e^{-tL} f  dt / sqrt(t)
    L^(-1)   f =      int_0^inf  e^{-tL} f  dt
    L^(+1/2) f = c2 * int_0^inf (e^{-tL} f - f)  dt / t^(3/2)

with c1 = pi^(-1/2) and c2 = -(2 sqrt(pi))^(-1).  The substitution t = u^2
removes the endpoint singularities, and composite Gauss-Legendre panels on
a geometric u-grid give a rule whose scalar identity

    sum_i w_i phi_power(t_i, lam) ~ lam^power

is verified at build time across the operator's spectral range.

Dense companions: the Green-type kernels of L^(-1) and L^(-1/2) (entries
scaled as integral kernels, so matrix . (values * h^d) applies the
operator), the Green-mass functional, and the perturbation kernel W of
sqrt(-Delta) L^(-1/2) = I + c2 * W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_legendre

from . import semigroup, spectral
from .grid import Field, GridSpec

C1 = 1.0 / math.sqrt(math.pi)
C2 = -1.0 / (2.0 * math.sqrt(math.pi))

POWERS = (-0.5, -1.0, 0.5)


def riesz_kernel_constant(d: int) -> float:
    """Constant c_d in the kernel c_d |x|^(1-d) of (-Delta)^(-1/2), d >= 2.

    Derived from c1 * int_0^inf (4 pi t)^(-d/2) exp(-|x|^2/4t) dt/sqrt(t).
    """
    if d < 2:
        raise ValueError("the |x|^(1-d) kernel form needs d >= 2")
    return gamma_fn((d - 1) / 2.0) / (2.0 * math.pi ** ((d + 1) / 2.0))


class QuadratureBuildError(RuntimeError):
    """Requested tolerance unreachable within the panel budget."""


def phi_weight(power: float, t: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Scalar integrand phi_power(t, lam) whose t-integral is lam^power."""
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if power == -0.5:
        return C1 * np.exp(-np.multiply.outer(lam, t)) / np.sqrt(t)
    if power == -1.0:
        return np.exp(-np.multiply.outer(lam, t))
    if power == 0.5:
        return C2 * (np.exp(-np.multiply.outer(lam, t)) - 1.0) * t**-1.5
    raise ValueError(f"unsupported power {power}")


@dataclass(frozen=True, eq=False)
class TimeQuadrature:
    """Node/weight rule for one subordination power on [u_min, u_max]."""

    power: float
    u_min: float
    u_max: float
    panels: int
    order: int
    nodes: np.ndarray    # t_i, strictly increasing
    weights: np.ndarray  # w_i > 0, include the dt = 2u du substitution
    spectral_range: tuple[float, float]

    def scalar_apply(self, lam) -> np.ndarray:
        """sum_i w_i phi_power(t_i, lam) for scalar or vector lam."""
        vals = phi_weight(self.power, self.nodes, np.atleast_1d(lam))
        return vals @ self.weights

    def max_identity_error(self, lams=None) -> float:
        """Max relative error of the scalar identity over a log lambda grid."""
        if lams is None:
            lams = np.geomspace(self.spectral_range[0], self.spectral_range[1], 20)
        lams = np.atleast_1d(lams)
        approx = self.scalar_apply(lams)
        exact = lams**self.power
        return float(np.max(np.abs(approx - exact) / np.abs(exact)))


def _range_for(power: float, lam_min: float, lam_max: float, tol: float) -> tuple[float, float]:
    z = math.sqrt(math.log(1.0 / tol) + 6.0)
    if power == -0.5:
        u_lo = tol / (2.0 * C1 * math.sqrt(lam_max))
        u_hi = z / math.sqrt(lam_min)
    elif power == -1.0:
        u_lo = math.sqrt(tol / lam_max)
        u_hi = z / math.sqrt(lam_min)
    else:
        u_lo = tol / (2.0 * abs(C2) * math.sqrt(lam_max))
        u_hi = 2.0 * abs(C2) / (tol * math.sqrt(lam_min))
    return 0.5 * u_lo, 1.2 * u_hi


def build_quadrature(
    power: float,
    spectral_range: tuple[float, float],
    tol: float = 1e-6,
    order: int = 12,
    panels_per_decade: float = 4.0,
    max_panels: int = 2000,
) -> TimeQuadrature:
    """Build and verify a rule for one power over [lam_min, lam_max]."""
    lam_min, lam_max = spectral_range
    if not (0 < lam_min <= lam_max):
        raise ValueError(f"need 0 < lam_min <= lam_max, got {spectral_range}")
    if power not in POWERS:
        raise ValueError(f"power must be one of {POWERS}, got {power}")

    u_lo, u_hi = _range_for(power, lam_min, lam_max, tol)
    ppd = panels_per_decade
    for _ in range(6):
        decades = math.log10(u_hi / u_lo)
        panels = max(4, math.ceil(decades * ppd))
        if panels > max_panels:
            raise QuadratureBuildError(
                f"tolerance {tol} needs more than {max_panels} panels"
            )
        gx, gw = roots_legendre(order)
        edges = np.geomspace(u_lo, u_hi, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        rad = 0.5 * (edges[1:] - edges[:-1])
        u = (mid[:, None] + rad[:, None] * gx[None, :]).ravel()
        du_w = (rad[:, None] * gw[None, :]).ravel()
        quad = TimeQuadrature(
            power=power,
            u_min=u_lo,
            u_max=u_hi,
            panels=panels,
            order=order,
            nodes=u**2,
            weights=2.0 * u * du_w,
            spectral_range=(lam_min, lam_max),
        )
        if quad.max_identity_error() <= tol:
            return quad
        ppd *= 1.6
        u_lo *= 0.5
        u_hi *= 1.3
    raise QuadratureBuildError(
        f"scalar identity for power {power} did not reach tol {tol}"
    )


def spectral_bounds(grid: GridSpec, V: Field, use_dense: bool = True) -> tuple[float, float]:
    """Spectral range of L for quadrature sizing.

    Uses the dense oracle when the grid is under the cap, otherwise the
    bounds [crude gap estimate, |xi|^2_max + max V].
    """
    vmax = float(V.values.max())
    if use_dense and grid.num_points <= semigroup.dense_cap():
        op = semigroup.dense_schrodinger(grid, V)
        lam = op.eigenvalues
        lam_max = float(lam[-1])
        lam_min = float(lam[0])
        if lam_min <= 0:
            # V == 0: smallest nonzero mode of -Delta on mean-zero fields
            lam_min = (math.pi / grid.R) ** 2
        return lam_min, lam_max
    xi_max2 = grid.d * (math.pi * grid.n / (2.0 * grid.R)) ** 2
    vmean = float(V.values.mean())
    lam_min = max(0.5 * vmean, (math.pi / grid.R) ** 2 if vmax == 0 else 1e-3)
    return lam_min, xi_max2 + vmax


def _mean_zero_required(V: Field, f: Field) -> None:
    if float(V.values.max()) == 0.0:
        mean = float(f.values.mean())
        scale = float(np.abs(f.values).max()) or 1.0
        if abs(mean) > 1e-10 * scale:
            raise ValueError(
                "V = 0 makes L singular on constants; supply a mean-zero field"
            )


DEFAULT_SUBORDINATION_STEP = 0.04


def subordinated_apply_stack(
    stack: np.ndarray,
    V: np.ndarray,
    spec: GridSpec,
    power: float,
    quad: TimeQuadrature,
    tau0: float = DEFAULT_SUBORDINATION_STEP,
) -> np.ndarray:
    """Quadrature sum over semigroup applications on a field stack.

    The semigroup state advances incrementally through the sorted nodes
    at step size tau0, with a lockstep run at exactly half the steps per
    increment; the two quadrature sums are Richardson-combined, which
    cancels the second-order splitting error.  Nodes beyond the spectral
    decay horizon contribute only their identity part.
    """
    lam_min = quad.spectral_range[0]
    t_cut = 37.0 / lam_min
    acc_c = np.zeros_like(stack)
    acc_f = np.zeros_like(stack)
    state_c = stack.copy()
    state_f = stack.copy()
    t_prev = 0.0
    for t_i, w_i in zip(quad.nodes, quad.weights):
        on = t_i <= t_cut
        if on:
            dt = t_i - t_prev
            if dt > 0:
                steps = max(1, math.ceil(dt / tau0))
                state_c = semigroup.evolve_stack(state_c, V, spec, dt, steps)
                state_f = semigroup.evolve_stack(state_f, V, spec, dt, 2 * steps)
                t_prev = t_i
        if power == -0.5:
            if on:
                coef = w_i * C1 / math.sqrt(t_i)
                acc_c += coef * state_c
                acc_f += coef * state_f
        elif power == -1.0:
            if on:
                acc_c += w_i * state_c
                acc_f += w_i * state_f
        else:
            coef = w_i * C2 * t_i**-1.5
            if on:
                acc_c += coef * (state_c - stack)
                acc_f += coef * (state_f - stack)
            else:
                acc_c -= coef * stack
                acc_f -= coef * stack
    return (4.0 * acc_f - acc_c) / 3.0


def frac_power_apply(
    f: Field,
    V: Field,
    power: float,
    quad: TimeQuadrature | None = None,
    *,
    tau0: float = DEFAULT_SUBORDINATION_STEP,
    tol: float = 1e-6,
) -> Field:
    """Apply L^power by subordination of the splitting semigroup."""
    if power not in POWERS:
        raise ValueError(f"power must be one of {POWERS}, got {power}")
    _mean_zero_required(V, f)
    if quad is None:
        quad = build_quadrature(power, spectral_bounds(f.spec, V), tol=tol)
    out = subordinated_apply_stack(
        f.values[None], V.values, f.spec, power, quad, tau0=tau0
    )
    return Field(f.spec, out[0])


def dense_green(grid: GridSpec, V: Field, power: float) -> np.ndarray:
    """Green-type kernel matrix of L^power, power in {-1, -1/2}.

    Entries are integral-kernel values: matrix @ (values * h^d) applies
    the operator.  V = 0 restricts to mean-zero fields (zero mode killed).
    """
    if power not in (-1.0, -0.5):
        raise ValueError(f"power must be -1 or -1/2, got {power}")
    return dense_power(grid, V, power) / grid.cell_volume


def green_mass(grid: GridSpec, V: Field, y) -> float:
    """h^d-weighted mass of V against the Green kernel column at y.

    ``y`` is a grid multi-index (tuple) or flat index.
    """
    if float(V.values.max()) == 0.0:
        return 0.0
    yflat = grid.flat_index(y) if isinstance(y, tuple) else int(y)
    G = dense_green(grid, V, -1.0)
    return float(V.flat() @ G[:, yflat] * grid.cell_volume)


def green_mass_all(grid: GridSpec, V: Field) -> np.ndarray:
    """Green mass at every grid point at once (one matrix-vector product)."""
    if float(V.values.max()) == 0.0:
        return np.zeros(grid.num_points)
    G = dense_green(grid, V, -1.0)
    return (V.flat() @ G) * grid.cell_volume


@dataclass(frozen=True, eq=False)
class PerturbationKernel:
    """Kernel W with sqrt(-Delta) L^(-1/2) = I + c2 * W (kernel scaling)."""

    grid: GridSpec
    matrix: np.ndarray

    @property
    def min_entry(self) -> float:
        return float(self.matrix.min())

    @property
    def max_abs_entry(self) -> float:
        return float(np.abs(self.matrix).max())

    @property
    def column_masses(self) -> np.ndarray:
        return self.matrix.sum(axis=0) * self.grid.cell_volume

    @property
    def max_column_mass(self) -> float:
        return float(self.column_masses.max())


def dense_power(grid: GridSpec, V: Field, power: float) -> np.ndarray:
    """Dense matrix of L^power on value vectors (zero mode killed if V = 0).

    Cached on (grid, potential, power): the d = 3 matrices are expensive.
    """
    key = (grid, V.values.tobytes(), power)
    hit = semigroup._dense_cache_get(_POWER_CACHE, key)
    if hit is not None:
        return hit
    op = semigroup.dense_schrodinger(grid, V)
    rule = "zero" if float(V.values.max()) == 0.0 else "apply"
    mat = semigroup.matrix_function(op, lambda lam: lam**power, rule)
    mat.setflags(write=False)
    semigroup._dense_cache_put(_POWER_CACHE, key, mat, limit=4)
    return mat


_POWER_CACHE: dict = {}


def half_power_factor(grid: GridSpec, V: Field) -> np.ndarray:
    """Dense matrix of sqrt(-Delta) L^(-1/2) acting on value vectors."""
    inv_half = dense_power(grid, V, -0.5)
    s_half = semigroup.multiplier_matrix(grid, spectral.sqrt_laplacian())
    return s_half @ inv_half


def export_kernel_rows(matrix: np.ndarray, grid: GridSpec, directory, rows) -> list:
    """Write selected kernel-matrix rows as RZF1 fields for offline inspection.

    Row i of an N x N kernel is the field y -> K(x_i, y); files are named
    row<flat index>.rzf under ``directory``.
    """
    from pathlib import Path

    from .grid import write_field

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for i in rows:
        path = directory / f"row{int(i):06d}.rzf"
        write_field(Field(grid, matrix[int(i)].reshape(grid.shape)), path)
        written.append(path)
    return written


def perturbation_kernel(grid: GridSpec, V: Field) -> PerturbationKernel:
    """Extract W from the operator identity A = I + c2 W.

    A is the dense matrix of sqrt(-Delta) L^(-1/2); the identity carries
    the integral-kernel 1/h^d scaling.  Requires V not identically zero
    (otherwise W = 0, returned directly).
    """
    if float(V.values.max()) == 0.0:
        n = grid.num_points
        return PerturbationKernel(grid, np.zeros((n, n)))
    A = half_power_factor(grid, V)
    W = (A - np.eye(grid.num_points)) / (C2 * grid.cell_volume)
    return PerturbationKernel(grid, W)
