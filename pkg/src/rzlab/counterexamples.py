"""Explicit counterexample data and divergence-rate scans.

Three constructions certify that boundedness fails outside 1 < p <= 2:

1. An axially singular potential V = r12^(eps-2) (r12 the distance to a
   codimension-2 axis) with an explicit series solution v of
   (-Delta + V) v = 0.  The first Riesz component of the cutoff solution
   leaves L^p: its near-axis profile is |x1| r12^(eps-2), and the scan
   fits the growth rate of the restricted p-norm as the inner radius
   shrinks.
2. A slab-singular potential on the unit ball whose sqrt(V)-weighted
   inverse square root admits the pointwise lower bound |x1|^(-1/p) on
   the ball; the scanned mass grows like ln(1/delta).
3. A bounded Green-bounded potential whose weighted transform decays too
   slowly at infinity: the radial tail integral grows like ln ln rho.

Scans 1 and 2 run on grids fine enough that the smallest cutoff stays
above four cells; scan 3 is a pure radial quadrature.  The series itself
is validated separately: a local finite-difference Laplacian applied to
the sampled v must cancel V v away from the axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_legendre

from . import potentials
from .grid import Field, GridSpec, lp_norm


def unit_ball_volume(k: int) -> float:
    return math.pi ** (k / 2.0) / gamma_fn(k / 2.0 + 1.0)


def unit_sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^(k-1) in R^k."""
    return 2.0 * math.pi ** (k / 2.0) / gamma_fn(k / 2.0)


# ---------------------------------------------------------------------------
# series solution v with (-Delta + r12^(eps-2)) v = 0


def axial_series(r: np.ndarray, eps: float, rtol: float = 1e-14, max_terms: int = 200):
    """Sum the series v(r) = sum_m r^(eps m) / (eps^(2m) (m!)^2) and its
    radial derivative factor G(r) = r v'(r) = sum_m (eps m) r^(eps m) / ...

    Returns (v, G, terms_used).  Terms are added until the next one is
    below rtol of the running sum everywhere.
    """
    r = np.asarray(r, dtype=float)
    z = np.where(r > 0, r, 0.0) ** eps
    term = np.ones_like(z)
    v = np.ones_like(z)
    g = np.zeros_like(z)
    m = 0
    while m < max_terms:
        m += 1
        term = term * z / (eps * eps * m * m)
        v += term
        g += eps * m * term
        if np.all(term <= rtol * v):
            break
    return v, g, m


def cutoff_profile(s: np.ndarray):
    """C^2 radial cutoff: 1 for s <= 1, 0 for s >= 2, quintic blend between.

    Returns (phi, dphi, ddphi) as functions of the radius s.
    """
    s = np.asarray(s, dtype=float)
    w = np.clip(s - 1.0, 0.0, 1.0)
    smooth = 6 * w**5 - 15 * w**4 + 10 * w**3
    dsm = 30 * w**2 * (w - 1.0) ** 2
    ddsm = 60 * w * (2 * w - 1.0) * (w - 1.0)
    phi = 1.0 - smooth
    dphi = np.where((s > 1.0) & (s < 2.0), -dsm, 0.0)
    ddphi = np.where((s > 1.0) & (s < 2.0), -ddsm, 0.0)
    return phi, dphi, ddphi


@dataclass(frozen=True, eq=False)
class CE1Data:
    """Sampled counterexample-1 construction on a d >= 3 grid.

    Points exactly on the singular axis carry the capped potential and the
    odd-symmetry value 0 for the first derivative.
    """

    grid: GridSpec
    eps: float
    p: float
    V: Field
    v: Field
    u: Field
    g: Field
    du1: Field
    series_terms: int


def ce1_build(grid: GridSpec, eps: float, p: float) -> CE1Data:
    if grid.d < 3:
        raise ValueError("counterexample 1 needs d >= 3")
    if not p > 2:
        raise ValueError(f"need p > 2, got {p}")
    if not 0 < eps < 1.0 - 2.0 / p:
        raise ValueError(f"eps must lie in (0, {1.0 - 2.0 / p:g}), got {eps}")
    if grid.R <= 2.0:
        raise ValueError("box must contain the support |x| <= 2 of the cutoff")

    ax = grid.axis()
    x1, x2 = np.meshgrid(ax, ax, indexing="ij")
    r = np.sqrt(x1**2 + x2**2)
    v2, g2, terms = axial_series(r, eps)

    trailing = (1,) * (grid.d - 2)
    v = np.broadcast_to(v2.reshape(v2.shape + trailing), grid.shape).copy()

    pts = np.stack(grid.mesh(), axis=-1)
    s = np.sqrt((pts**2).sum(axis=-1))
    phi, dphi, ddphi = cutoff_profile(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        lap_phi = ddphi + np.where(s > 0, dphi * (grid.d - 1) / s, 0.0)
        grad_dot = np.where(
            s > 0,
            dphi / s * np.broadcast_to(g2.reshape(g2.shape + trailing), grid.shape),
            0.0,
        )
    g_field = -v * lap_phi - 2.0 * grad_dot

    # d/dx1 of the series: x1 * r^-2 * G(r); 0 on the axis by odd symmetry.
    with np.errstate(divide="ignore", invalid="ignore"):
        dv1_2 = np.where(r > 0, x1 * g2 / r**2, 0.0)
    dv1 = np.broadcast_to(dv1_2.reshape(dv1_2.shape + trailing), grid.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        dphi1 = np.where(s > 0, dphi * pts[..., 0] / s, 0.0)
    du1 = phi * dv1 + v * dphi1

    V = potentials.discretize_potential(potentials.ce1(eps), grid, cap="auto")
    return CE1Data(
        grid=grid,
        eps=eps,
        p=p,
        V=V,
        v=Field(grid, v),
        u=Field(grid, phi * v),
        g=Field(grid, g_field),
        du1=Field(grid, du1),
        series_terms=terms,
    )


def ce1_residual(data: CE1Data) -> dict:
    """Relative residual of (-Delta + V) v away from the axis.

    The series depends only on the two singular-plane coordinates, so the
    residual is evaluated on that 2D section with a fourth-order local
    Laplacian.  Excluded: a 4h tube around the axis (capping region) and
    two cells at the box folds, where the periodic continuation of the
    non-periodic solution has a kink.
    """
    grid = data.grid
    n, h = grid.n, grid.h
    ax = grid.axis()
    x1, x2 = np.meshgrid(ax, ax, indexing="ij")
    r = np.sqrt(x1**2 + x2**2)
    v2, _, _ = axial_series(r, data.eps)

    # 6th-order 7-point second difference: near the 4h cutoff the relative
    # truncation error is resolution-independent, so stencil order is what
    # buys accuracy there.
    coef = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / (180.0 * h * h)

    def dxx(a: np.ndarray, axis: int) -> np.ndarray:
        return sum(c * np.roll(a, k, axis) for c, k in zip(coef, range(-3, 4)))

    lap = dxx(v2, 0) + dxx(v2, 1)
    with np.errstate(divide="ignore"):
        Vv = np.where(r > 0, r ** (data.eps - 2.0), np.inf) * v2
    residual = np.abs(-lap + Vv)

    interior = np.zeros(n, dtype=bool)
    interior[3 : n - 3] = True
    region = (r > 4.0 * h) & interior[:, None] & interior[None, :]
    denom = float(np.max(Vv[region]))
    return {
        "max_residual": float(np.max(residual[region])),
        "scale": denom,
        "relative": float(np.max(residual[region])) / denom,
        "points": int(region.sum()),
    }


# ---------------------------------------------------------------------------
# divergence scans


@dataclass(frozen=True, eq=False)
class ScanReport:
    kind: str
    xs: np.ndarray
    values: np.ndarray
    fit_slope: float
    fit_intercept: float
    fit_r2: float
    expected_slope: float | None
    verdict: str
    extras: dict = field(default_factory=dict)


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return float(slope), float(intercept), r2


def _check_deltas(deltas, h: float) -> np.ndarray:
    deltas = np.asarray(deltas, dtype=float)
    if not np.all(np.diff(deltas) < 0):
        raise ValueError("deltas must be strictly decreasing")
    if deltas[-1] < 4.0 * h:
        raise ValueError(
            f"smallest delta {deltas[-1]:g} is below 4h = {4 * h:g}; refine the grid"
        )
    return deltas


def ce1_scan(
    eps: float,
    p: float,
    deltas=None,
    *,
    ambient_d: int = 3,
    ambient_R: float = 2.5,
    section_n: int = 4096,
    r2_threshold: float = 0.98,
    slope_tol: float = 0.05,
) -> ScanReport:
    """Restricted p-norm growth of the near-axis profile |x1| r^(eps-2).

    A(delta) is the p-norm over delta < r < 1/2 on a fine 2D section of
    the singular plane (the profile is constant in the remaining ambient
    coordinates, which contribute a fixed volume factor).  For admissible
    eps the log-log slope is eps - 1 + 2/p; past the admissibility
    threshold the norm converges and the slope flattens to ~0.
    """
    if ambient_d < 3:
        raise ValueError("counterexample 1 lives in d >= 3")
    if deltas is None:
        # The pure power law emerges only for delta well inside the outer
        # radius 1/2; larger deltas see the outer-boundary curvature.
        deltas = 2.0 ** np.linspace(-5, -9, 9)
    section = GridSpec(2, section_n, 0.5625)
    deltas = _check_deltas(deltas, section.h)
    if deltas[0] >= 0.5:
        raise ValueError("deltas must stay below the outer radius 1/2")

    x1, x2 = np.meshgrid(section.axis(), section.axis(), indexing="ij")
    r = np.sqrt(x1**2 + x2**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        profile = np.where(r > 0, np.abs(x1) * r ** (eps - 2.0), 0.0)
    fld = Field(section, profile)

    slab = (2.0 * ambient_R) ** ((ambient_d - 2) / p)
    values = np.array(
        [slab * lp_norm(fld, p, (r > dl) & (r < 0.5)) for dl in deltas]
    )
    slope, intercept, r2 = _linear_fit(np.log(deltas), np.log(values))
    expected = eps - 1.0 + 2.0 / p
    admissible = eps < 1.0 - 2.0 / p
    if r2 < r2_threshold and admissible:
        verdict = "inconclusive"
    elif admissible:
        verdict = "pass" if abs(slope - expected) <= slope_tol else "fail"
    else:
        verdict = "pass" if slope >= -0.02 else "fail"
    return ScanReport(
        kind="ce1",
        xs=deltas,
        values=values,
        fit_slope=slope,
        fit_intercept=intercept,
        fit_r2=r2,
        expected_slope=expected if admissible else None,
        verdict=verdict,
        extras={"eps": eps, "p": p, "admissible": admissible},
    )


def ce2_lower_bound_field(grid: GridSpec, p: float) -> Field:
    """The lower-bound profile |x1|^(-1/p) on the unit ball, 0 elsewhere.

    Sampled with the half-cell cap; nonnegative and ball-supported.
    """
    pts = np.stack(grid.mesh(), axis=-1)
    a = np.abs(pts[..., 0])
    cap = (grid.h / 2.0) ** (-1.0 / p)
    with np.errstate(divide="ignore"):
        vals = np.where(a > 0, np.minimum(a ** (-1.0 / p), cap), cap)
    vals[(pts**2).sum(axis=-1) >= 1.0] = 0.0
    return Field(grid, vals)


def ce2_scan(
    p: float,
    deltas=None,
    *,
    ambient_d: int = 3,
    profile_n: int = 16384,
    r2_threshold: float = 0.99,
) -> ScanReport:
    """Mass of the p-th power of the ball lower bound outside |x1| < delta.

    The transverse directions integrate to the exact slice volume, so the
    mass reduces to a 1D profile |x1|^(-1) * vol_{d-1}(slice); it must
    grow linearly in ln(1/delta).
    """
    if ambient_d < 3:
        raise ValueError("counterexample 2 lives in d >= 3")
    if deltas is None:
        deltas = 2.0 ** (-np.arange(3, 11, dtype=float))
    profile = GridSpec(1, profile_n, 1.0)
    deltas = _check_deltas(deltas, profile.h)

    x = profile.axis()
    slice_vol = unit_ball_volume(ambient_d - 1) * np.maximum(0.0, 1.0 - x**2) ** (
        (ambient_d - 1) / 2.0
    )
    with np.errstate(divide="ignore"):
        density = np.where(np.abs(x) > 0, slice_vol / np.abs(x), 0.0)
    fld = Field(profile, density)

    values = np.array(
        [lp_norm(fld, 1.0, np.abs(x) > dl) for dl in deltas]
    )
    slope, intercept, r2 = _linear_fit(np.log(1.0 / deltas), values)
    verdict = "pass" if r2 > r2_threshold else "inconclusive"
    increments = np.diff(values)
    return ScanReport(
        kind="ce2",
        xs=deltas,
        values=values,
        fit_slope=slope,
        fit_intercept=intercept,
        fit_r2=r2,
        expected_slope=None,
        verdict=verdict,
        extras={"p": p, "increments": increments},
    )


def _log_panel_quad(fn, a: float, b: float, panels_per_decade: int = 8, order: int = 16) -> float:
    """Gauss-Legendre panels on a log-spaced subdivision of [a, b]."""
    decades = math.log10(b / a)
    panels = max(2, math.ceil(decades * panels_per_decade))
    edges = np.geomspace(a, b, panels + 1)
    gx, gw = roots_legendre(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    rad = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + rad[:, None] * gx[None, :]).ravel()
    w = (rad[:, None] * gw[None, :]).ravel()
    return float(np.sum(w * fn(x)))


def ce3_tail(rho: float, d: int = 3, inner: float = 100.0) -> float:
    """Radial tail integral of the decay bound between radius 100 and rho."""
    area = unit_sphere_area(d)
    return area * _log_panel_quad(
        lambda r: 1.0 / ((1.0 + r) * np.log(4.0 + r)), inner, rho
    )


def ce3_scan(rhos=None, *, ambient_d: int = 3, rel_tol: float = 0.05) -> ScanReport:
    """Tail growth of the decay bound: increments track ln ln rho."""
    if ambient_d < 3:
        raise ValueError("counterexample 3 lives in d >= 3")
    if rhos is None:
        rhos = np.array([1e3, 1e6, 1e12])
    rhos = np.asarray(rhos, dtype=float)
    if not np.all(np.diff(rhos) > 0):
        raise ValueError("radii must be strictly increasing")
    values = np.array([ce3_tail(rho, ambient_d) for rho in rhos])
    lnln = np.log(np.log(rhos))
    area = unit_sphere_area(ambient_d)
    inc_t = np.diff(values)
    inc_expected = area * np.diff(lnln)
    rel = np.abs(inc_t / inc_expected - 1.0)
    slope, intercept, r2 = _linear_fit(lnln, values)
    verdict = "pass" if np.all(rel <= rel_tol) else "fail"
    return ScanReport(
        kind="ce3",
        xs=rhos,
        values=values,
        fit_slope=slope,
        fit_intercept=intercept,
        fit_r2=r2,
        expected_slope=area,
        verdict=verdict,
        extras={"increment_rel_err": rel, "expected_increments": inc_expected},
    )


def divergence_scan(which: str, params: dict | None = None, deltas=None) -> ScanReport:
    """Dispatch one of the three scans by name (CE1, CE2, CE3)."""
    params = dict(params or {})
    key = which.lower()
    if key == "ce1":
        return ce1_scan(
            params.pop("eps", 0.25), params.pop("p", 4.0), deltas, **params
        )
    if key == "ce2":
        return ce2_scan(params.pop("p", 4.0), deltas, **params)
    if key == "ce3":
        return ce3_scan(deltas if deltas is not None else params.pop("rhos", None), **params)
    raise ValueError(f"unknown scan {which!r}")


# ---------------------------------------------------------------------------
# Green-boundedness


@dataclass(frozen=True)
class GreenBoundReport:
    """Truncated supremum, its tail bound, and the tail-corrected estimate.

    ``sup_estimate = sup_truncated + tail_bound`` is an upper estimate of
    the true supremum and is what stabilizes as the truncation grows; the
    truncated value alone keeps creeping up at the tail-bound rate.
    """

    sup_truncated: float
    per_point: tuple[float, ...]
    radius_cap: float
    tail_bound: float
    divergent: bool

    @property
    def sup_estimate(self) -> float:
        return self.sup_truncated + self.tail_bound


def green_bounded_check(
    V: potentials.PotentialSpec,
    d: int,
    sample_points=(0.0, 0.5, 1.0, 5.0, 50.0),
    radius_cap: float = 1e3,
) -> GreenBoundReport:
    """Truncated sup_x int V(y) |x-y|^(2-d) dy for radial potentials.

    The spherical average of |x-y|^(2-d) over |y| = s is max(|x|, s)^(2-d)
    (mean value property), so the integral reduces to one radial
    quadrature per sample point.  Divergence is flagged when doubling the
    truncation radius moves the answer by more than 10%.
    """
    if d < 3:
        raise ValueError("Green-boundedness is a d >= 3 criterion")
    if V.tag not in ("zero", "const", "harmonic", "ce3"):
        raise ValueError(f"radial reduction unavailable for tag {V.tag!r}")
    if V.tag == "zero":
        return GreenBoundReport(
            0.0, tuple(0.0 for _ in sample_points), radius_cap, 0.0, False
        )

    def v_of_r(r: np.ndarray) -> np.ndarray:
        if V.tag == "const":
            return np.full_like(r, V.c)
        if V.tag == "harmonic":
            return r**2
        return (1.0 + r) ** (-2.0) * np.log(4.0 + r) ** (-2.0)

    area = unit_sphere_area(d)

    def value_at(x: float, cap: float) -> float:
        def integrand(s: np.ndarray) -> np.ndarray:
            return v_of_r(s) * s ** (d - 1) * np.maximum(x, s) ** (2 - d)

        return area * _log_panel_quad(integrand, 1e-9 * max(1.0, x), cap)

    radii = [float(np.linalg.norm(np.atleast_1d(q))) for q in sample_points]
    vals = [value_at(r, radius_cap) for r in radii]
    vals2 = [value_at(r, 2.0 * radius_cap) for r in radii]
    sup1, sup2 = max(vals), max(vals2)
    divergent = sup2 > 1.1 * sup1
    if V.tag == "ce3":
        # beyond the cap the integrand is below 1/(s ln^2 s), whose tail is 1/ln
        tail = area / math.log(radius_cap)
    elif divergent:
        tail = math.inf
    else:
        tail = sup2 - sup1
    return GreenBoundReport(
        sup_truncated=sup1,
        per_point=tuple(vals),
        radius_cap=radius_cap,
        tail_bound=tail,
        divergent=divergent,
    )
