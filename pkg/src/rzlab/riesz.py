"""Riesz transforms attached to L = -Delta + V.

Two algebraically equivalent routes are kept side by side:

* direct:   component j is Deriv(j) applied to L^(-1/2) f;
* factored: g = sqrt(-Delta) L^(-1/2) f first, then the classical Riesz
  multiplier per component.

Both share one realization of L^(-1/2) (dense matrix function or
subordination quadrature), so route disagreement isolates multiplier
algebra from quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fracpow, spectral
from .grid import Field, lp_norm


@dataclass(frozen=True, eq=False)
class RieszResult:
    components: tuple[Field, ...]
    magnitude: Field
    route: str
    companion: Field | None = None  # g = sqrt(-Delta) L^(-1/2) f on the factored route


def _magnitude(components: tuple[Field, ...]) -> Field:
    sq = sum(c.values**2 for c in components)
    return Field(components[0].spec, np.sqrt(sq))


def inv_sqrt_apply(
    f: Field,
    V: Field,
    *,
    method: str = "dense",
    quad: fracpow.TimeQuadrature | None = None,
    tau0: float = fracpow.DEFAULT_SUBORDINATION_STEP,
) -> Field:
    """L^(-1/2) f by the chosen backend."""
    if method == "dense":
        if float(V.values.max()) == 0.0:
            return spectral.apply_multiplier(f, spectral.inv_sqrt_laplacian())
        mat = fracpow.dense_power(f.spec, V, -0.5)
        return Field(f.spec, (mat @ f.flat()).reshape(f.spec.shape))
    if method == "quad":
        return fracpow.frac_power_apply(f, V, -0.5, quad, tau0=tau0)
    raise ValueError(f"unknown method {method!r}")


def schrodinger_riesz(
    f: Field,
    V: Field,
    *,
    route: str = "factored",
    method: str = "dense",
    quad: fracpow.TimeQuadrature | None = None,
    tau0: float = fracpow.DEFAULT_SUBORDINATION_STEP,
) -> RieszResult:
    """All d Riesz components of f with their pointwise l2 magnitude."""
    if route not in ("direct", "factored"):
        raise ValueError(f"unknown route {route!r}")
    half = inv_sqrt_apply(f, V, method=method, quad=quad, tau0=tau0)
    d = f.spec.d
    if route == "direct":
        comps = tuple(
            spectral.apply_multiplier(half, spectral.derivative(j)) for j in range(1, d + 1)
        )
        companion = None
    else:
        companion = spectral.apply_multiplier(half, spectral.sqrt_laplacian())
        comps = tuple(
            spectral.apply_multiplier(companion, spectral.riesz(j)) for j in range(1, d + 1)
        )
    return RieszResult(
        components=comps, magnitude=_magnitude(comps), route=route, companion=companion
    )


def classical_riesz(f: Field) -> RieszResult:
    """Classical Riesz vector (V = 0 multipliers) with magnitude."""
    comps = tuple(
        spectral.apply_multiplier(f, spectral.riesz(j)) for j in range(1, f.spec.d + 1)
    )
    return RieszResult(components=comps, magnitude=_magnitude(comps), route="classical")


def sqrt_potential_inv_sqrt(
    f: Field,
    V: Field,
    *,
    method: str = "dense",
    quad: fracpow.TimeQuadrature | None = None,
    tau0: float = fracpow.DEFAULT_SUBORDINATION_STEP,
) -> Field:
    """Pointwise sqrt(V) times L^(-1/2) f."""
    half = inv_sqrt_apply(f, V, method=method, quad=quad, tau0=tau0)
    return Field(f.spec, np.sqrt(V.values) * half.values)


def vector_ratio(result: RieszResult, f: Field, p: float) -> float:
    """||magnitude||_p / ||f||_p on the shared grid."""
    denom = lp_norm(f, p)
    if denom == 0:
        raise ValueError("zero input field")
    return lp_norm(result.magnitude, p) / denom
