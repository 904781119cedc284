"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The numba path is used by default.  Set ``FRACWAVE_DISABLE_NUMBA=1`` in the
environment (before import) to force the pure-numpy fallback; the two paths
compute the same recurrences and agree to rounding.  ``backend_name()``
reports which one is live.
"""

from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("FRACWAVE_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")

if _WANT_NUMBA:
    try:
        import numba

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False


def backend_name() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# causal convolution: out[i, c] = sum_{k<=i} kernel[k] * values[i-k, c]
# ---------------------------------------------------------------------------

def _causal_conv_np(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    out = np.empty_like(values)
    for c in range(values.shape[1]):
        out[:, c] = np.convolve(values[:, c], kernel)[:n]
    return out


if _HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def _causal_conv_nb(values, kernel):  # pragma: no cover - compiled
        n, m = values.shape
        out = np.zeros((n, m), dtype=values.dtype)
        for i in range(n):
            for k in range(i + 1):
                w = kernel[k]
                for c in range(m):
                    out[i, c] += w * values[i - k, c]
        return out


def causal_conv(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Lower-triangular (causal) convolution along axis 0."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    if _HAVE_NUMBA:
        return _causal_conv_nb(values, kernel)
    return _causal_conv_np(values, kernel)


# ---------------------------------------------------------------------------
# diffusive node sweep: exact exponential update of the node ODEs
#   phi_j(t+dt) = decay_j phi_j(t) + c0_j U(t) + c1_j U(t+dt)
# with readout O(t) = sum_j ow_j phi_j(t).
# ---------------------------------------------------------------------------

def _diffusive_sweep_np(U, decay, c0, c1, ow):
    nt, m = U.shape
    nj = decay.shape[0]
    phi = np.zeros((m, nj))
    out = np.zeros((nt, m))
    for i in range(nt - 1):
        phi *= decay
        phi += np.outer(U[i], c0)
        phi += np.outer(U[i + 1], c1)
        out[i + 1] = phi @ ow
    return out


if _HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def _diffusive_sweep_nb(U, decay, c0, c1, ow):  # pragma: no cover - compiled
        nt, m = U.shape
        nj = decay.shape[0]
        phi = np.zeros((m, nj))
        out = np.zeros((nt, m))
        for i in range(nt - 1):
            for c in range(m):
                acc = 0.0
                u0 = U[i, c]
                u1 = U[i + 1, c]
                for j in range(nj):
                    p = decay[j] * phi[c, j] + c0[j] * u0 + c1[j] * u1
                    phi[c, j] = p
                    acc += ow[j] * p
                out[i + 1, c] = acc
        return out


def diffusive_sweep(U, decay, c0, c1, ow):
    """Drive the diffusive nodes with piecewise-linear input U, return the readout."""
    U = np.ascontiguousarray(U, dtype=np.float64)
    args = [np.ascontiguousarray(a, dtype=np.float64) for a in (decay, c0, c1, ow)]
    if _HAVE_NUMBA:
        return _diffusive_sweep_nb(U, *args)
    return _diffusive_sweep_np(U, *args)


# ---------------------------------------------------------------------------
# tridiagonal LDL^T factorization / solve (symmetric positive definite)
# ---------------------------------------------------------------------------

def ldlt_tridiag(diag: np.ndarray, off: np.ndarray):
    """Factor tridiag(off, diag, off) = L D L^T; returns (d, l) with l the subdiagonal of L."""
    n = diag.shape[0]
    d = np.empty(n)
    l = np.empty(n - 1)
    d[0] = diag[0]
    for i in range(1, n):
        l[i - 1] = off[i - 1] / d[i - 1]
        d[i] = diag[i] - l[i - 1] * off[i - 1]
    if np.any(d <= 0):
        raise np.linalg.LinAlgError("tridiagonal matrix is not positive definite")
    return d, l


def _ldlt_solve_np(d, l, b):
    n = d.shape[0]
    x = b.copy()
    for i in range(1, n):
        x[i] -= l[i - 1] * x[i - 1]
    x /= d
    for i in range(n - 2, -1, -1):
        x[i] -= l[i] * x[i + 1]
    return x


if _HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def _ldlt_solve_nb(d, l, b):  # pragma: no cover - compiled
        n = d.shape[0]
        x = b.copy()
        for i in range(1, n):
            x[i] -= l[i - 1] * x[i - 1]
        for i in range(n):
            x[i] /= d[i]
        for i in range(n - 2, -1, -1):
            x[i] -= l[i] * x[i + 1]
        return x


def ldlt_solve(d, l, b):
    b = np.ascontiguousarray(b, dtype=np.float64)
    if _HAVE_NUMBA:
        return _ldlt_solve_nb(d, l, b)
    return _ldlt_solve_np(d, l, b)


# ---------------------------------------------------------------------------
# implicit-midpoint sweep for the coupled (u, v, phi) system.
#
# Damping kinds: 0 internal (B* v = sa*v), 1 Kelvin-Voigt (B* v = sam*D+ v / h),
# 2 pointwise (B* v = linear interpolation at zeta).  The reduced solve is
# tridiagonal for all three; the factors (fd, fl) are precomputed.
#
# Record layout per sample row: t, E, E1, E2, dissipation(current state).
# When audit=True the sweep additionally returns per-step energies and the
# midpoint dissipation of every step (for the discrete energy-law identity).
# ---------------------------------------------------------------------------

def _bstar(kind, sa, i0, s, h, v, n, m):
    if kind == 0:
        return sa * v
    if kind == 1:
        w = np.empty(m)
        w[0] = sa[0] * v[0] / h
        w[1:-1] = sa[1:-1] * (v[1:] - v[:-1]) / h
        w[-1] = -sa[-1] * v[-1] / h
        return w
    left = v[i0 - 1] if i0 >= 1 else 0.0
    right = v[i0] if i0 <= n - 1 else 0.0
    return np.array([(1.0 - s) * left + s * right])


def _bapply(kind, sa, i0, s, h, w, n, m):
    if kind == 0:
        return sa * w
    if kind == 1:
        g = sa * w
        out = (g[:-1] - g[1:]) / h
        return out
    out = np.zeros(n)
    if i0 >= 1:
        out[i0 - 1] = (1.0 - s) * w[0] / h
    if i0 <= n - 1:
        out[i0] = s * w[0] / h
    return out


def _apply_stencil(u, h2):
    # (1/h^2) tridiag(-1, 2, -1) u
    out = 2.0 * u
    out[:-1] -= u[1:]
    out[1:] -= u[:-1]
    return out / h2


def _midpoint_sweep_np(kind, u, v, phi, sa, i0, s, h, p, lam, weff, gamma, beta,
                       dt, n_steps, fd, fl, record_every, audit):
    n = u.shape[0]
    m = phi.shape[0]
    h2 = h * h
    dj = 1.0 / (1.0 + 0.5 * dt * lam)
    wp = weff * p
    gw = gamma * weff * beta

    n_rec = n_steps // record_every + 1
    records = np.zeros((n_rec, 5))
    audit_E = np.zeros(n_steps + 1) if audit else np.zeros(0)
    audit_mid = np.zeros(n_steps) if audit else np.zeros(0)

    def energy_parts(u_, v_, phi_):
        e1 = 0.5 * h * (u_ @ _apply_stencil(u_, h2) + v_ @ v_)
        sq = (phi_ * phi_).sum(axis=0)
        e2 = 0.5 * (gw * sq).sum()
        dis = -(gw * lam * sq).sum()
        return e1, e2, dis

    e1, e2, dis = energy_parts(u, v, phi)
    records[0] = (0.0, e1 + e2, e1, e2, dis)
    if audit:
        audit_E[0] = e1 + e2
    r = 1
    for step in range(n_steps):
        q = phi @ wp
        ru = u + 0.5 * dt * v
        rv = v - 0.5 * dt * (_apply_stencil(u, h2) + gamma * _bapply(kind, sa, i0, s, h, q, n, m))
        rphi = (1.0 - 0.5 * dt * lam) * phi + 0.5 * dt * np.outer(_bstar(kind, sa, i0, s, h, v, n, m), p)
        cvec = rphi @ (dj * wp)
        rhs = rv - 0.5 * dt * _apply_stencil(ru, h2) - 0.5 * dt * gamma * _bapply(kind, sa, i0, s, h, cvec, n, m)
        v_new = _ldlt_solve_np(fd, fl, rhs)
        u_new = ru + 0.5 * dt * v_new
        phi_new = dj * (rphi + 0.5 * dt * np.outer(_bstar(kind, sa, i0, s, h, v_new, n, m), p))
        if audit:
            phim = 0.5 * (phi + phi_new)
            audit_mid[step] = -(gw * lam * (phim * phim).sum(axis=0)).sum()
        u, v, phi = u_new, v_new, phi_new
        if audit:
            e1, e2, dis = energy_parts(u, v, phi)
            audit_E[step + 1] = e1 + e2
        if (step + 1) % record_every == 0:
            e1, e2, dis = energy_parts(u, v, phi)
            records[r] = ((step + 1) * dt, e1 + e2, e1, e2, dis)
            r += 1
    return u, v, phi, records[:r], audit_E, audit_mid


if _HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def _midpoint_sweep_nb(kind, u0, v0, phi0, sa, i0, s, h, p, lam, weff, gamma, beta,
                           dt, n_steps, fd, fl, record_every, audit):  # pragma: no cover - compiled
        n = u0.shape[0]
        m = phi0.shape[0]
        nj = lam.shape[0]
        h2 = h * h
        u = u0.copy()
        v = v0.copy()
        phi = phi0.copy()
        dj = 1.0 / (1.0 + 0.5 * dt * lam)
        wp = weff * p
        gw = gamma * weff * beta

        n_rec = n_steps // record_every + 1
        records = np.zeros((n_rec, 5))
        audit_E = np.zeros(n_steps + 1) if audit else np.zeros(0)
        audit_mid = np.zeros(n_steps) if audit else np.zeros(0)

        au = np.empty(n)
        ru = np.empty(n)
        rv = np.empty(n)
        rhs = np.empty(n)
        bsv = np.empty(m)
        bvec = np.empty(n)
        rphi = np.empty((m, nj))
        cvec = np.empty(m)

        # initial record
        e1 = 0.0
        for i in range(n):
            lap = 2.0 * u[i]
            if i > 0:
                lap -= u[i - 1]
            if i < n - 1:
                lap -= u[i + 1]
            e1 += u[i] * lap / h2 + v[i] * v[i]
        e1 *= 0.5 * h
        e2 = 0.0
        dis = 0.0
        for j in range(nj):
            sq = 0.0
            for c in range(m):
                sq += phi[c, j] * phi[c, j]
            e2 += 0.5 * gw[j] * sq
            dis -= gw[j] * lam[j] * sq
        records[0, 0] = 0.0
        records[0, 1] = e1 + e2
        records[0, 2] = e1
        records[0, 3] = e2
        records[0, 4] = dis
        if audit:
            audit_E[0] = e1 + e2
        r = 1

        for step in range(n_steps):
            # q = phi @ (weff*p)  (per control component)
            for c in range(m):
                acc = 0.0
                for j in range(nj):
                    acc += phi[c, j] * wp[j]
                cvec[c] = acc
            # B q
            if kind == 0:
                for i in range(n):
                    bvec[i] = sa[i] * cvec[i]
            elif kind == 1:
                for i in range(n):
                    bvec[i] = (sa[i] * cvec[i] - sa[i + 1] * cvec[i + 1]) / h
            else:
                for i in range(n):
                    bvec[i] = 0.0
                if i0 >= 1:
                    bvec[i0 - 1] = (1.0 - s) * cvec[0] / h
                if i0 <= n - 1:
                    bvec[i0] = s * cvec[0] / h
            for i in range(n):
                lap = 2.0 * u[i]
                if i > 0:
                    lap -= u[i - 1]
                if i < n - 1:
                    lap -= u[i + 1]
                ru[i] = u[i] + 0.5 * dt * v[i]
                rv[i] = v[i] - 0.5 * dt * (lap / h2 + gamma * bvec[i])
            # B* v
            if kind == 0:
                for c in range(m):
                    bsv[c] = sa[c] * v[c]
            elif kind == 1:
                bsv[0] = sa[0] * v[0] / h
                for c in range(1, m - 1):
                    bsv[c] = sa[c] * (v[c] - v[c - 1]) / h
                bsv[m - 1] = -sa[m - 1] * v[n - 1] / h
            else:
                left = v[i0 - 1] if i0 >= 1 else 0.0
                right = v[i0] if i0 <= n - 1 else 0.0
                bsv[0] = (1.0 - s) * left + s * right
            for c in range(m):
                for j in range(nj):
                    rphi[c, j] = (1.0 - 0.5 * dt * lam[j]) * phi[c, j] + 0.5 * dt * bsv[c] * p[j]
            # cvec = rphi @ (dj*wp)
            for c in range(m):
                acc = 0.0
                for j in range(nj):
                    acc += rphi[c, j] * dj[j] * wp[j]
                cvec[c] = acc
            if kind == 0:
                for i in range(n):
                    bvec[i] = sa[i] * cvec[i]
            elif kind == 1:
                for i in range(n):
                    bvec[i] = (sa[i] * cvec[i] - sa[i + 1] * cvec[i + 1]) / h
            else:
                for i in range(n):
                    bvec[i] = 0.0
                if i0 >= 1:
                    bvec[i0 - 1] = (1.0 - s) * cvec[0] / h
                if i0 <= n - 1:
                    bvec[i0] = s * cvec[0] / h
            for i in range(n):
                lap = 2.0 * ru[i]
                if i > 0:
                    lap -= ru[i - 1]
                if i < n - 1:
                    lap -= ru[i + 1]
                rhs[i] = rv[i] - 0.5 * dt * (lap / h2 + gamma * bvec[i])
            # tridiagonal LDL^T solve
            for i in range(n):
                au[i] = rhs[i]
            for i in range(1, n):
                au[i] -= fl[i - 1] * au[i - 1]
            for i in range(n):
                au[i] /= fd[i]
            for i in range(n - 2, -1, -1):
                au[i] -= fl[i] * au[i + 1]
            # au is v_new
            for i in range(n):
                rhs[i] = ru[i] + 0.5 * dt * au[i]  # u_new in rhs
            if kind == 0:
                for c in range(m):
                    bsv[c] = sa[c] * au[c]
            elif kind == 1:
                bsv[0] = sa[0] * au[0] / h
                for c in range(1, m - 1):
                    bsv[c] = sa[c] * (au[c] - au[c - 1]) / h
                bsv[m - 1] = -sa[m - 1] * au[n - 1] / h
            else:
                left = au[i0 - 1] if i0 >= 1 else 0.0
                right = au[i0] if i0 <= n - 1 else 0.0
                bsv[0] = (1.0 - s) * left + s * right
            if audit:
                mid = 0.0
                for j in range(nj):
                    sq = 0.0
                    for c in range(m):
                        pn = dj[j] * (rphi[c, j] + 0.5 * dt * bsv[c] * p[j])
                        pm = 0.5 * (phi[c, j] + pn)
                        sq += pm * pm
                    mid -= gw[j] * lam[j] * sq
                audit_mid[step] = mid
            for c in range(m):
                for j in range(nj):
                    phi[c, j] = dj[j] * (rphi[c, j] + 0.5 * dt * bsv[c] * p[j])
            for i in range(n):
                u[i] = rhs[i]
                v[i] = au[i]
            want_rec = (step + 1) % record_every == 0
            if want_rec or audit:
                e1 = 0.0
                for i in range(n):
                    lap = 2.0 * u[i]
                    if i > 0:
                        lap -= u[i - 1]
                    if i < n - 1:
                        lap -= u[i + 1]
                    e1 += u[i] * lap / h2 + v[i] * v[i]
                e1 *= 0.5 * h
                e2 = 0.0
                dis = 0.0
                for j in range(nj):
                    sq = 0.0
                    for c in range(m):
                        sq += phi[c, j] * phi[c, j]
                    e2 += 0.5 * gw[j] * sq
                    dis -= gw[j] * lam[j] * sq
                if audit:
                    audit_E[step + 1] = e1 + e2
                if want_rec:
                    records[r, 0] = (step + 1) * dt
                    records[r, 1] = e1 + e2
                    records[r, 2] = e1
                    records[r, 3] = e2
                    records[r, 4] = dis
                    r += 1
        return u, v, phi, records[:r], audit_E, audit_mid


def midpoint_sweep(kind, u, v, phi, sa, i0, s, h, p, lam, weff, gamma, beta,
                   dt, n_steps, fd, fl, record_every=1, audit=False):
    """Run n_steps of the implicit-midpoint update with Schur-eliminated phi block."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    sa = np.ascontiguousarray(sa, dtype=np.float64)
    arrs = [np.ascontiguousarray(a, dtype=np.float64) for a in (p, lam, weff, fd, fl)]
    if _HAVE_NUMBA:
        return _midpoint_sweep_nb(kind, u, v, phi, sa, int(i0), float(s), float(h),
                                  arrs[0], arrs[1], arrs[2], float(gamma), float(beta),
                                  float(dt), int(n_steps), arrs[3], arrs[4],
                                  int(record_every), bool(audit))
    return _midpoint_sweep_np(kind, u.copy(), v.copy(), phi.copy(), sa, int(i0), float(s), float(h),
                              arrs[0], arrs[1], arrs[2], float(gamma), float(beta),
                              float(dt), int(n_steps), arrs[3], arrs[4],
                              int(record_every), bool(audit))
