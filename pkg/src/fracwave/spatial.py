"""1D Dirichlet Laplacian on (0,1) and the three damping couplings.

Grid convention: n interior points x_i = i h, h = 1/(n+1), homogeneous
Dirichlet values at x = 0, 1.  Inner products are h-weighted on the grid and
on the midpoint control space; the pointwise control space is a bare scalar.
B is always the exact discrete adjoint of B* with respect to those products,
so the damping quadratic form is reproduced without discretization leakage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Grid1D",
    "InternalDamping",
    "KelvinVoigtDamping",
    "PointwiseDamping",
    "DampingConfig",
    "control_dim",
    "laplacian_dirichlet",
    "laplacian_tridiag",
    "stencil_eigenvalues",
    "continuum_modes",
    "apply_Bstar",
    "apply_B",
    "bstar_matrix",
    "b_matrix",
    "smooth_bump",
    "indicator_bump",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform interior grid of (0, 1) with n >= 3 points."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need n >= 3 interior points, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(1, self.n + 1)

    @property
    def midpoints(self) -> np.ndarray:
        # n+1 midpoints x_{i+1/2}, including the two boundary-adjacent ones
        return self.h * (np.arange(self.n + 1) + 0.5)


def _validate_profile(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError(f"{what} damping profile must be nonnegative")
    if not np.any(a > 0):
        raise ValueError(f"{what} damping profile has empty support")
    return a


@dataclass(frozen=True)
class InternalDamping:
    """Viscous-type coupling: B* v = sqrt(a) v with a >= a0 > 0 on `support`."""

    a: np.ndarray
    support: tuple = (0.0, 1.0)
    a0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", _validate_profile(self.a, "internal"))

    kind = "internal"


@dataclass(frozen=True)
class KelvinVoigtDamping:
    """Viscoelastic coupling: B* v = sqrt(a) grad v, a sampled on midpoints."""

    a: np.ndarray
    support: tuple = (0.0, 1.0)
    a0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", _validate_profile(self.a, "kelvin-voigt"))

    kind = "kelvin_voigt"


@dataclass(frozen=True)
class PointwiseDamping:
    """Dirac coupling at an interior point: B* v = v(zeta), B z = z delta_zeta."""

    zeta: float

    def __post_init__(self):
        if not (0.0 < self.zeta < 1.0):
            raise ValueError(f"zeta must lie in (0, 1), got {self.zeta}")

    kind = "pointwise"


DampingConfig = Union[InternalDamping, KelvinVoigtDamping, PointwiseDamping]


def control_dim(config: DampingConfig, grid: Grid1D) -> int:
    """Dimension of the discrete control space: n, n+1 (midpoints), or 1."""
    if isinstance(config, InternalDamping):
        if config.a.shape != (grid.n,):
            raise ValueError("internal profile must be sampled on the interior grid")
        return grid.n
    if isinstance(config, KelvinVoigtDamping):
        if config.a.shape != (grid.n + 1,):
            raise ValueError("kelvin-voigt profile must be sampled on the midpoint grid")
        return grid.n + 1
    return 1


def laplacian_tridiag(grid: Grid1D):
    """(diag, off) of the 3-point stencil (1/h^2) tridiag(-1, 2, -1)."""
    h2 = grid.h ** 2
    return np.full(grid.n, 2.0 / h2), np.full(grid.n - 1, -1.0 / h2)


def laplacian_dirichlet(grid: Grid1D) -> np.ndarray:
    """Dense stencil matrix; symmetric positive definite."""
    d, e = laplacian_tridiag(grid)
    out = np.diag(d)
    idx = np.arange(grid.n - 1)
    out[idx, idx + 1] = e
    out[idx + 1, idx] = e
    return out


def stencil_eigenvalues(grid: Grid1D) -> np.ndarray:
    """Exact spectrum (4/h^2) sin^2(k pi h / 2), k = 1..n."""
    k = np.arange(1, grid.n + 1)
    return (4.0 / grid.h ** 2) * np.sin(0.5 * np.pi * k * grid.h) ** 2


def continuum_modes(k: int, grid: Grid1D) -> np.ndarray:
    """Samples of sin(k pi x), unit norm in the h-weighted discrete L^2.

    These are exactly the stencil eigenvectors; the discrete norm of the raw
    sine vector is 1/sqrt(2) independent of n, so the normalization is sqrt(2).
    """
    if not (1 <= k <= grid.n):
        raise ValueError(f"mode index must be in 1..{grid.n}, got {k}")
    return np.sqrt(2.0) * np.sin(k * np.pi * grid.x)


def _pointwise_stencil(zeta: float, grid: Grid1D):
    """Interpolation cell: index i0 with x_{i0} <= zeta < x_{i0+1} and offset s."""
    h = grid.h
    i0 = min(int(zeta / h), grid.n)
    s = zeta / h - i0
    return i0, s


def apply_Bstar(config: DampingConfig, v: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Observation operator on a grid function (boundary values are zero)."""
    v = np.asarray(v)
    if isinstance(config, InternalDamping):
        return np.sqrt(config.a) * v
    if isinstance(config, KelvinVoigtDamping):
        sa = np.sqrt(config.a)
        w = np.empty(grid.n + 1, dtype=v.dtype)
        w[0] = sa[0] * v[0] / grid.h
        w[1:-1] = sa[1:-1] * (v[1:] - v[:-1]) / grid.h
        w[-1] = -sa[-1] * v[-1] / grid.h
        return w
    i0, s = _pointwise_stencil(config.zeta, grid)
    left = v[i0 - 1] if i0 >= 1 else 0.0
    right = v[i0] if i0 <= grid.n - 1 else 0.0
    return np.array([(1.0 - s) * left + s * right])


def apply_B(config: DampingConfig, w: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Exact adjoint of apply_Bstar in the h-weighted inner products.

    Internal: multiplication by sqrt(a).  Kelvin-Voigt: minus the backward
    difference of sqrt(a) w (summation by parts).  Pointwise: the hat-stencil
    discrete Dirac mass with weight 1/h.
    """
    w = np.asarray(w)
    if isinstance(config, InternalDamping):
        return np.sqrt(config.a) * w
    if isinstance(config, KelvinVoigtDamping):
        g = np.sqrt(config.a) * w
        return (g[:-1] - g[1:]) / grid.h
    i0, s = _pointwise_stencil(config.zeta, grid)
    out = np.zeros(grid.n, dtype=w.dtype)
    if i0 >= 1:
        out[i0 - 1] = (1.0 - s) * w[0] / grid.h
    if i0 <= grid.n - 1:
        out[i0] = s * w[0] / grid.h
    return out


def bstar_matrix(config: DampingConfig, grid: Grid1D) -> np.ndarray:
    """Dense (m x n) matrix of apply_Bstar."""
    m = control_dim(config, grid)
    out = np.empty((m, grid.n))
    eye = np.eye(grid.n)
    for j in range(grid.n):
        out[:, j] = apply_Bstar(config, eye[j], grid)
    return out


def b_matrix(config: DampingConfig, grid: Grid1D) -> np.ndarray:
    """Dense (n x m) matrix of apply_B."""
    m = control_dim(config, grid)
    out = np.empty((grid.n, m))
    eye = np.eye(m)
    for j in range(m):
        out[:, j] = apply_B(config, eye[j], grid)
    return out


def control_metric(config: DampingConfig, grid: Grid1D) -> float:
    """Scalar weight of the control-space inner product (h on grids, 1 pointwise)."""
    return 1.0 if isinstance(config, PointwiseDamping) else grid.h


# -- built-in damping profiles ------------------------------------------------

def _quintic_ramp(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)


def smooth_bump(x: np.ndarray, lo: float, hi: float, a0: float = 1.0,
                ramp_fraction: float = 0.25) -> np.ndarray:
    """Plateau a = a0 on [lo, hi], quintic ramps to zero over outward margins.

    The ramp width is ramp_fraction * (hi - lo); the profile is C^2 and keeps
    a >= a0 on the whole declared interval [lo, hi].
    """
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError("need 0 <= lo < hi <= 1")
    width = ramp_fraction * (hi - lo)
    up = _quintic_ramp((np.asarray(x) - lo + width) / width)
    down = _quintic_ramp((hi + width - np.asarray(x)) / width)
    return a0 * np.minimum(up, down)


def indicator_bump(x: np.ndarray, lo: float, hi: float, a0: float = 1.0) -> np.ndarray:
    """Rough profile: a0 on [lo, hi), zero elsewhere."""
    x = np.asarray(x)
    return np.where((x >= lo) & (x < hi), a0, 0.0)
