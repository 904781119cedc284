"""Resolvent norms along the imaginary axis, growth fits, witness states.

Norms are operator norms in the energy metric: with metric factor L
(metric = L^T L), ||(i w I - A)^{-1}||_W = sigma_max(L (i w I - A)^{-1} L^{-1}).
Two backends compute it: a dense singular value decomposition of the shifted
generator (small dimensions), and a Lanczos iteration on the solve operator
(matrix-free; one complex n x n factorization per frequency, the bank block
is eliminated exactly because it is diagonal per node).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve, svdvals
from scipy.sparse.linalg import LinearOperator, eigsh

from . import spatial
from .kernel import closed_integral_resolvent
from .spatial import DampingConfig, Grid1D, control_metric, laplacian_dirichlet
from .system import AugmentedGenerator

__all__ = [
    "ResolventScan",
    "GrowthFit",
    "WitnessPoint",
    "DecayPrediction",
    "ClassicalGenerator",
    "assemble_classical",
    "resolvent_norm",
    "scan",
    "fit_growth",
    "witness_sequence",
    "predict_decay",
]

_SPECTRUM_CLIFF = 1e-13
_DENSE_LIMIT = 1500


# ---------------------------------------------------------------------------
# classical auxiliary generator A0 = [[0, I], [-A, -BB*]]
# ---------------------------------------------------------------------------

class ClassicalGenerator:
    """Classically damped wave pair in the (u, v) energy metric."""

    which = "classical"

    def __init__(self, grid: Grid1D, config: DampingConfig):
        self.grid = grid
        self.config = config
        self.n = grid.n
        self.dim = 2 * grid.n
        self.eta = None
        self.A = laplacian_dirichlet(grid)
        B = spatial.b_matrix(config, grid)
        Bs = spatial.bstar_matrix(config, grid)
        self.BB = B @ Bs
        self.beta = control_metric(config, grid)
        self._chol = None

    def dense(self) -> np.ndarray:
        n = self.n
        out = np.zeros((self.dim, self.dim))
        out[:n, n:] = np.eye(n)
        out[n:, :n] = -self.A
        out[n:, n:] = -self.BB
        return out

    def apply_flat(self, x):
        n = self.n
        u, v = x[:n], x[n:]
        return np.concatenate([v, -self.A @ u - self.BB @ v])

    def weighted_inner(self, x, y):
        n, h = self.n, self.grid.h
        return complex(h * np.vdot(self.A @ y[:n], x[:n]) + h * np.vdot(y[n:], x[n:]))

    def weighted_norm(self, x) -> float:
        return float(np.sqrt(max(self.weighted_inner(x, x).real, 0.0)))

    def _chol_U(self):
        if self._chol is None:
            from scipy.linalg import cholesky

            self._chol = cholesky(self.A, lower=False)  # A = U^T U
        return self._chol

    def metric_apply(self, x):
        U = self._chol_U()
        sqh = np.sqrt(self.grid.h)
        return np.concatenate([sqh * (U @ x[:self.n]), sqh * x[self.n:]])

    def metric_solve(self, x):
        from scipy.linalg import solve_triangular

        U = self._chol_U()
        sqh = np.sqrt(self.grid.h)
        return np.concatenate([solve_triangular(U, x[:self.n]) / sqh, x[self.n:] / sqh])

    def metric_apply_T(self, x):
        U = self._chol_U()
        sqh = np.sqrt(self.grid.h)
        return np.concatenate([sqh * (U.T @ x[:self.n]), sqh * x[self.n:]])

    def metric_solve_T(self, x):
        from scipy.linalg import solve_triangular

        U = self._chol_U()
        sqh = np.sqrt(self.grid.h)
        return np.concatenate([solve_triangular(U, x[:self.n], trans="T") / sqh,
                               x[self.n:] / sqh])

    def operator_scale(self) -> float:
        return 4.0 / self.grid.h ** 2 + float(np.max(np.abs(self.BB))) + 1.0


def assemble_classical(grid: Grid1D, config: DampingConfig) -> ClassicalGenerator:
    """Build the auxiliary generator whose dissipation is the plain B B* drag."""
    return ClassicalGenerator(grid, config)


# ---------------------------------------------------------------------------
# shifted solvers (one frequency each;  (i w I - A) X = Y  and its adjoint)
# ---------------------------------------------------------------------------

class _ShiftedClassical:
    def __init__(self, gen: ClassicalGenerator, omega: float):
        self.gen = gen
        self.w = omega
        K = gen.A.astype(complex) - omega ** 2 * np.eye(gen.n) + 1j * omega * gen.BB
        self.lu = lu_factor(K)

    def solve(self, y):
        g = self.gen
        f, gg = y[:g.n], y[g.n:]
        rhs = gg + 1j * self.w * f + g.BB @ f
        u = lu_solve(self.lu, rhs)
        return np.concatenate([u, 1j * self.w * u - f])

    def solve_adjoint(self, y):
        g = self.gen
        t = lu_solve(self.lu, y[:g.n] - 1j * self.w * y[g.n:], trans=2)
        fslot = -1j * self.w * t + g.BB @ t - y[g.n:]
        return np.concatenate([fslot, t])


class _ShiftedAugmented:
    def __init__(self, gen: AugmentedGenerator, omega: float):
        self.gen = gen
        self.w = omega
        self.d = 1.0 / (gen.lam + 1j * omega)
        self.S = complex(np.sum(gen.weff * gen.p ** 2 * self.d))
        self.Bm = spatial.b_matrix(gen.config, gen.grid)
        self.Bsm = spatial.bstar_matrix(gen.config, gen.grid)
        self.BB = self.Bm @ self.Bsm
        A = laplacian_dirichlet(gen.grid).astype(complex)
        K = A - omega ** 2 * np.eye(gen.n) + 1j * omega * gen.gamma * self.S * self.BB
        self.lu = lu_factor(K)

    def _split(self, y):
        g = self.gen
        return y[:g.n], y[g.n:2 * g.n], y[2 * g.n:].reshape(g.nj, g.m).T

    def solve(self, y):
        g = self.gen
        f, gg, hh = self._split(y)
        w = self.w
        c = hh @ (g.weff * g.p * self.d)          # m-vector
        rhs = gg + 1j * w * f + g.gamma * self.S * (self.BB @ f) - g.gamma * (self.Bm @ c)
        u = lu_solve(self.lu, rhs)
        v = 1j * w * u - f
        bsv = self.Bsm @ v
        phi = self.d[None, :] * (hh + np.outer(bsv, g.p))
        return np.concatenate([u, v, phi.T.reshape(-1)])

    def solve_adjoint(self, y):
        g = self.gen
        yu, yv, yphi = self._split(y)
        w = self.w
        dbar = np.conj(self.d)
        # C^H y
        chy = yu - 1j * w * yv - 1j * w * (self.Bsm.T @ (yphi @ (dbar * g.p)))
        t = lu_solve(self.lu, chy, trans=2)
        bt = self.Bm.T @ t
        # D^H t + E^H y per slot
        fslot = (-1j * w * t + g.gamma * np.conj(self.S) * (self.BB.T @ t)
                 - yv - self.Bsm.T @ (yphi @ (dbar * g.p)))
        gslot = t
        phislot = dbar[None, :] * yphi - np.outer(bt, g.gamma * g.weff * g.p * dbar)
        return np.concatenate([fslot, gslot, phislot.T.reshape(-1)])


def _shifted_solver(gen, omega: float):
    if isinstance(gen, ClassicalGenerator):
        return _ShiftedClassical(gen, omega)
    return _ShiftedAugmented(gen, omega)


def _operator_scale(gen) -> float:
    if isinstance(gen, ClassicalGenerator):
        return gen.operator_scale()
    return 4.0 / gen.grid.h ** 2 + float(np.max(gen.lam)) + 1.0


def _check_resolvent_preconditions(gen, omega: float) -> None:
    if omega == 0.0:
        raise ValueError("omega must be nonzero")
    if isinstance(gen, AugmentedGenerator) and gen.eta <= 0.0:
        raise ValueError("resolvent scans require eta > 0: with eta = 0 the "
                         "shifted operator loses surjectivity at the origin")


def resolvent_norm(gen, omega: float, method: str = "auto"):
    """||(i omega I - gen)^{-1}|| in the energy metric; returns (norm, flagged).

    method "dense" computes the full singular spectrum of the weighted shifted
    matrix, "iterative" runs Lanczos on the matrix-free solve operator; "auto"
    switches on total dimension.  A point is flagged when i*omega is within
    rounding of the spectrum (smallest singular value below the cliff).
    """
    _check_resolvent_preconditions(gen, omega)
    if method == "auto":
        method = "dense" if gen.dim <= _DENSE_LIMIT else "iterative"
    scale = _operator_scale(gen) + abs(omega)
    if method == "dense":
        M = 1j * omega * np.eye(gen.dim) - gen.dense().astype(complex)
        eye = np.eye(gen.dim)
        L = np.column_stack([gen.metric_apply(eye[:, j]) for j in range(gen.dim)])
        Linv = np.column_stack([gen.metric_solve(eye[:, j]) for j in range(gen.dim)])
        sv = svdvals(L @ M @ Linv)
        smin = sv[-1]
        flagged = bool(smin <= _SPECTRUM_CLIFF * scale)
        return (np.inf if smin == 0.0 else 1.0 / smin), flagged
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    try:
        solver = _shifted_solver(gen, omega)
    except np.linalg.LinAlgError:
        return np.inf, True

    def mv(x):
        x = np.asarray(x, dtype=complex).reshape(-1)
        return gen.metric_apply(solver.solve(gen.metric_solve(x)))

    def rmv(x):
        x = np.asarray(x, dtype=complex).reshape(-1)
        return gen.metric_solve_T(solver.solve_adjoint(gen.metric_apply_T(x)))

    # Lanczos on the Hermitian normal operator G^H G: its top eigenvalue is
    # sigma_max^2 and converges to tight relative accuracy
    normal = LinearOperator((gen.dim, gen.dim), matvec=lambda x: rmv(mv(x)), dtype=complex)
    lam_max = float(np.real(eigsh(normal, k=1, which="LA", tol=1e-12,
                                  maxiter=max(1000, 4 * gen.dim),
                                  return_eigenvectors=False)[0]))
    smax = float(np.sqrt(max(lam_max, 0.0)))
    flagged = bool(smax == 0.0 or 1.0 / smax <= _SPECTRUM_CLIFF * scale)
    return smax, flagged


@dataclass(frozen=True)
class ResolventScan:
    omegas: np.ndarray
    norms: np.ndarray
    flagged: np.ndarray
    which: str


def scan(gen, omegas: Sequence[float], method: str = "auto") -> ResolventScan:
    """Elementwise resolvent norms; flagged points are kept but marked."""
    omegas = np.asarray(list(omegas), dtype=float)
    norms = np.empty(omegas.size)
    flags = np.zeros(omegas.size, dtype=bool)
    for i, w in enumerate(omegas):
        norms[i], flags[i] = resolvent_norm(gen, w, method=method)
    which = getattr(gen, "which", "augmented")
    return ResolventScan(omegas, norms, flags, which)


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    intercept: float
    residual: float
    window: tuple

    @property
    def which(self):
        return getattr(self, "_which", None)


def fit_growth(scan_result: ResolventScan, window: Optional[tuple] = None) -> GrowthFit:
    """Least-squares slope of log norm against log omega over the window."""
    om, nm, fl = scan_result.omegas, scan_result.norms, scan_result.flagged
    if window is None:
        window = (float(np.min(om)), float(np.max(om)))
    keep = (~fl) & (om >= window[0]) & (om <= window[1]) & np.isfinite(nm) & (nm > 0)
    if np.count_nonzero(keep) < 8:
        raise ValueError(f"need at least 8 unflagged points in window, have {np.count_nonzero(keep)}")
    x = np.log(om[keep])
    y = np.log(nm[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return GrowthFit(float(slope), float(intercept), resid, window)


# ---------------------------------------------------------------------------
# witness sequence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessPoint:
    k: int
    omega: float
    ratio: float
    scaled_ratio: float  # ratio * omega^(1-alpha); flat across k when growth ~ omega^(alpha-1)


def witness_sequence(k_list: Sequence[int], gen: AugmentedGenerator):
    """Mode-built near-eigenstates certifying resolvent growth.

    For each resolved mode k with nonzero observation B* u_k, the state
    X = (u_k / (i w), u_k, p (lam + i w)^{-1} B* u_k) solves all but the
    velocity row of (i w I - A) X = 0 exactly at the discrete eigenfrequency
    w = sqrt(lambda_k); the leftover is the frequency-response term, so
    ratio = ||(i w I - A) X|| / ||X|| decays like w^(alpha-1).  Modes with
    B* u_k = 0 are returned in `rejected`: there X with empty bank is an exact
    eigenvector and no decay certificate exists.
    """
    if gen.eta <= 0.0:
        raise ValueError("witness construction requires eta > 0")
    alpha = gen.quad.alpha
    lam_h = spatial.stencil_eigenvalues(gen.grid)
    points, rejected = [], []
    for k in k_list:
        if not (1 <= k <= gen.n):
            raise ValueError(f"mode index {k} outside 1..{gen.n}")
        u = spatial.continuum_modes(k, gen.grid)
        w = float(np.sqrt(lam_h[k - 1]))
        bsu = gen.apply_Bstar(u)
        if np.linalg.norm(bsu) <= 1e-12 * np.linalg.norm(u):
            rejected.append(k)
            continue
        d = 1.0 / (gen.lam + 1j * w)
        phi = np.outer(bsu, gen.p) * d[None, :]
        x = np.concatenate([u / (1j * w), u.astype(complex), phi.T.reshape(-1)])
        x = x / gen.weighted_norm(x)
        y = 1j * w * x - gen.apply_flat(x)
        ratio = gen.weighted_norm(y)
        points.append(WitnessPoint(k, w, float(ratio), float(ratio * w ** (1.0 - alpha))))
    return points, rejected


def witness_reference_constant(gen: AugmentedGenerator, k: int) -> float:
    """Independent prediction of the scaled witness ratio from the closed form."""
    from .kernel import FractionalParams

    u = spatial.continuum_modes(k, gen.grid)
    w = float(np.sqrt(spatial.stencil_eigenvalues(gen.grid)[k - 1]))
    par = FractionalParams(gen.quad.alpha, gen.quad.eta)
    s = 2.0 * closed_integral_resolvent(par, w)
    bbsu = gen.apply_B(gen.apply_Bstar(u))
    g_norm = gen.gamma * abs(s) * float(np.sqrt(gen.grid.h * (bbsu @ bbsu)))
    # ||X|| ~ sqrt(2) for normalized modes once the bank term is negligible
    return g_norm * w ** (1.0 - gen.quad.alpha) / np.sqrt(2.0)


# ---------------------------------------------------------------------------
# decay prediction from resolvent growth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayPrediction:
    kind: str                      # "polynomial" | "logarithmic"
    energy_exponent: Optional[float]
    note: str = ""


def predict_decay(alpha: float, ell) -> DecayPrediction:
    """Map auxiliary resolvent growth M to the expected energy decay.

    M = omega^ell (ell >= 0) gives energy ~ t^(-2/(1-alpha+ell)); exponential
    M gives the log-squared descriptor (no finite polynomial rate).
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if isinstance(ell, str):
        if ell in ("exp", "log-exponential"):
            return DecayPrediction("logarithmic", None,
                                   "energy bounded by C / ln^2(1+t) for domain data")
        raise ValueError(f"unknown growth descriptor {ell!r}")
    ell = float(ell)
    if ell < 0.0:
        raise ValueError("polynomial growth exponent must be >= 0")
    return DecayPrediction("polynomial", 2.0 / (1.0 - alpha + ell))
