"""Schrodinger semigroup e^{-tL}, L = -Delta + V, and its oracles.

Three independent realizations:

* Strang splitting of the multiplier heat flow against the potential
  (potential half-steps outermost), second order in the step size and
  exact for constant V;
* a dense-matrix route: L assembled from the spectral Laplacian (so that
  dense and transform paths share one discrete operator exactly) plus
  diag(V), with an eigendecomposition for matrix functions;
* a Feynman-Kac Monte Carlo estimate of the kernel k_t(x, y) over
  Brownian bridges, free-space and non-periodized.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import potentials, spectral
from .grid import Field, GridSpec

DEFAULT_DENSE_CAP = 4096
DEFAULT_STEP_SIZE = 0.01
DEFAULT_BRIDGE_SLICES = 64


class DenseCapError(ValueError):
    """Grid too large for dense-matrix operations."""


def dense_cap() -> int:
    raw = os.environ.get("RZLAB_DENSE_CAP")
    return int(raw) if raw else DEFAULT_DENSE_CAP


def default_steps(t: float, tau0: float = DEFAULT_STEP_SIZE) -> int:
    return max(1, math.ceil(t / tau0))


def _check_potential(V: Field, grid: GridSpec) -> None:
    if V.spec != grid:
        raise ValueError("potential grid does not match field grid")
    if np.any(V.values < 0):
        raise ValueError("potential must be nonnegative")


def evolve_stack(
    stack: np.ndarray, V: np.ndarray, spec: GridSpec, t: float, steps: int
) -> np.ndarray:
    """Strang splitting on a (..., grid shape) stack of real fields."""
    if t == 0.0:
        return stack.copy()
    tau = t / steps
    half = np.exp(-0.5 * tau * V)
    heat_sym = spectral.heat(tau).symbol(spec)
    u = stack
    for _ in range(steps):
        u = half * u
        u = spectral.apply_symbol_stack(u, heat_sym, spec.d)
        u = half * u
    return u


def strang_evolve(f: Field, V: Field, t: float, steps: int) -> Field:
    """Approximate e^{-tL} f by symmetric operator splitting."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    _check_potential(V, f.spec)
    out = evolve_stack(f.values, V.values, f.spec, t, steps)
    return Field(f.spec, out)


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Full matrix of a grid operator with its eigendecomposition."""

    grid: GridSpec
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, grid: GridSpec, matrix: np.ndarray) -> "DenseOperator":
        scale = float(np.max(np.abs(matrix))) or 1.0
        asym = float(np.max(np.abs(matrix - matrix.T)))
        if asym > 1e-10 * scale:
            raise ValueError(f"matrix is not symmetric: |M - M^T| = {asym:.3e}")
        sym = 0.5 * (matrix + matrix.T)
        lam, q = np.linalg.eigh(sym)
        return cls(grid=grid, matrix=sym, eigenvalues=lam, eigenvectors=q)


def multiplier_matrix(grid: GridSpec, m: spectral.MultiplierSpec) -> np.ndarray:
    """Dense matrix of a catalog multiplier (circulant from its delta response)."""
    if grid.num_points > dense_cap():
        raise DenseCapError(
            f"{grid.num_points} points exceed dense cap {dense_cap()}"
        )
    delta = np.zeros(grid.shape)
    delta[(0,) * grid.d] = 1.0
    col = spectral.apply_symbol_stack(delta, m.symbol(grid), grid.d).ravel()
    mat = col[_offset_table(grid)]
    mat += mat.T.copy()
    mat *= 0.5
    return mat


@lru_cache(maxsize=2)
def _offset_table(grid: GridSpec) -> np.ndarray:
    """(i - j) mod n per axis, folded to flat indices: off[i, j]."""
    n, d, N = grid.n, grid.d, grid.num_points
    idx = np.arange(N, dtype=np.int32)
    off = np.zeros((N, N), dtype=np.int32)
    for a in range(d):
        ka = (idx // n ** (d - 1 - a)) % n
        off *= n
        off += (ka[:, None] - ka[None, :]) % n
    off.setflags(write=False)
    return off


def dense_schrodinger(grid: GridSpec, V: Field) -> DenseOperator:
    """Exact discrete L = -Delta + diag(V) with eigendecomposition.

    Decompositions are cached on (grid, potential samples); the d = 3
    oracle at the cap takes tens of seconds to factor.
    """
    _check_potential(V, grid)
    key = (grid, V.values.tobytes())
    hit = _dense_cache_get(_SCHRODINGER_CACHE, key)
    if hit is not None:
        return hit
    lap = multiplier_matrix(grid, spectral.laplacian())
    mat = -lap + np.diag(V.flat())
    op = DenseOperator.from_matrix(grid, mat)
    _dense_cache_put(_SCHRODINGER_CACHE, key, op, limit=3)
    return op


_SCHRODINGER_CACHE: dict = {}


def _dense_cache_get(cache: dict, key):
    return cache.get(key)


def _dense_cache_put(cache: dict, key, value, limit: int) -> None:
    if key not in cache and len(cache) >= limit:
        cache.pop(next(iter(cache)))
    cache[key] = value


def matrix_function(
    op: DenseOperator, phi: Callable[[np.ndarray], np.ndarray], zero_mode_rule: str = "apply"
) -> np.ndarray:
    """phi of the operator in its eigenbasis: Q phi(Lambda) Q^T.

    ``zero_mode_rule`` controls (near-)zero eigenvalues: "zero" forces
    phi there to 0 (negative powers of a singular operator on mean-zero
    fields), "apply" evaluates phi.
    """
    if zero_mode_rule not in ("zero", "apply"):
        raise ValueError(f"unknown zero-mode rule {zero_mode_rule!r}")
    lam = op.eigenvalues.copy()
    ztol = 1e-9 * max(1.0, float(np.max(np.abs(lam))))
    zero_mask = np.abs(lam) <= ztol
    if zero_mode_rule == "zero":
        vals = np.zeros_like(lam)
        vals[~zero_mask] = phi(lam[~zero_mask])
    else:
        vals = np.asarray(phi(lam), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = lam[~np.isfinite(vals)]
        raise ValueError(f"matrix function not finite at eigenvalues {bad[:3]}")
    return (op.eigenvectors * vals) @ op.eigenvectors.T


def heat_kernel_free(x: np.ndarray, y: np.ndarray, t: float) -> float:
    """Free-space Gaussian heat kernel h_t(x - y)."""
    d = len(x)
    dist2 = float(np.sum((np.asarray(x, float) - np.asarray(y, float)) ** 2))
    return (4.0 * math.pi * t) ** (-d / 2.0) * math.exp(-dist2 / (4.0 * t))


def fk_kernel_estimate(
    V: potentials.PotentialSpec,
    x,
    y,
    t: float,
    paths: int,
    seed: int,
    *,
    slices: int = DEFAULT_BRIDGE_SLICES,
    cap: float = math.inf,
    chunk: int = 8192,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo kernel estimate k_t(x, y) ~ h_t(x-y) E[exp(-t <V>_bridge)].

    Paths are split into fixed-size chunks with per-chunk seeds derived
    from (seed, chunk index); the result does not depend on the worker
    count.  Returns (estimate, standard error).
    """
    if t <= 0:
        raise ValueError(f"time must be > 0, got {t}")
    if paths < 1:
        raise ValueError(f"paths must be >= 1, got {paths}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("endpoints must have the same dimension")
    prefactor = heat_kernel_free(x, y, t)
    if V.tag == "zero":
        return prefactor, 0.0

    d = len(x)
    # Midpoint bridge times, plus the terminal time for pinning.  The
    # semigroup is generated by the full Laplacian, so the bridge variance
    # is 2s(t-s)/t: increments carry variance 2 dt.
    times = (np.arange(slices) + 0.5) * (t / slices)
    all_times = np.concatenate([times, [t]])
    dts = np.diff(np.concatenate([[0.0], all_times]))
    sigma = np.sqrt(2.0 * dts)

    def run_chunk(ci: int, count: int) -> tuple[float, float]:
        rng = np.random.default_rng([seed, ci])
        incr = rng.standard_normal((count, slices + 1, d)) * sigma[None, :, None]
        w = np.cumsum(incr, axis=1)
        w_end = w[:, -1:, :]
        frac = (times / t)[None, :, None]
        bridge = x + frac * (y - x) + w[:, :-1, :] - frac * w_end
        pot = potentials.eval_capped(V, bridge, cap)
        weights = np.exp(-(t / slices) * pot.sum(axis=1))
        return float(weights.sum()), float((weights**2).sum())

    sizes = [chunk] * (paths // chunk)
    if paths % chunk:
        sizes.append(paths % chunk)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run_chunk, range(len(sizes)), sizes))
    else:
        parts = [run_chunk(ci, cnt) for ci, cnt in enumerate(sizes)]
    sw = sum(p[0] for p in parts)
    sw2 = sum(p[1] for p in parts)
    mean = sw / paths
    if paths > 1:
        var = max(0.0, (sw2 - paths * mean**2) / (paths - 1))
        stderr = math.sqrt(var / paths)
    else:
        stderr = 0.0
    return prefactor * mean, prefactor * stderr
