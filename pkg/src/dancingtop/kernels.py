"""Hot numeric kernels: reaction force, equations of motion, RK4 propagation.

Every function here is written in a numba-compatible subset of numpy and is
compiled with ``@njit`` when numba is available.  Setting the environment
variable ``DANCINGTOP_PURE_NUMPY=1`` (before import) skips compilation and
runs the identical source as plain Python, which is the reference fallback
path.  ``BACKEND`` reports which mode is active.

Configurations enter as plain arrays: ``ivec`` holds the principal moments
(I1, I2, I3), ``z`` the fulcrum offset and ``k`` the unit plane normal, both
expressed in the principal frame.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("DANCINGTOP_PURE_NUMPY", "").strip().lower() in {
    "1", "true", "yes", "on",
}

if not _FORCE_NUMPY:
    try:
        from numba import njit as _numba_njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _FORCE_NUMPY = True

if _FORCE_NUMPY:
    BACKEND = "numpy"

    def _jit(fn):
        return fn
else:
    BACKEND = "numba"

    def _jit(fn):
        return _numba_njit(cache=True)(fn)


@_jit
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@_jit
def _rt_vec(R, v):
    # R^T v without materializing the transpose
    out = np.empty(3)
    for i in range(3):
        out[i] = R[0, i] * v[0] + R[1, i] * v[1] + R[2, i] * v[2]
    return out


@_jit
def _hat(w):
    H = np.zeros((3, 3))
    H[0, 1] = -w[2]
    H[0, 2] = w[1]
    H[1, 0] = w[2]
    H[1, 2] = -w[0]
    H[2, 0] = -w[1]
    H[2, 1] = w[0]
    return H


@_jit
def reaction(ivec, mu, grav, z, k, R, W):
    """Plane-contact reaction multiplier sigma as a function of (R, Omega).

    sigma = (1/mu + (m, I m))^-1 { a + ([I W, W], m) + ([W, K], [W, z]) }
    with K = R^T k and moment arm m = I^-1 [K, z].  The denominator is
    bounded below by 1/mu, so the expression is singularity free.
    """
    K = _rt_vec(R, k)
    cz = _cross(K, z)
    arm = cz / ivec
    gyro = _cross(ivec * W, W)
    num = grav + np.dot(gyro, arm) + np.dot(_cross(W, K), _cross(W, z))
    den = 1.0 / mu + np.dot(arm, ivec * arm)
    return num / den


@_jit
def rhs(ivec, mu, grav, z, k, R, W):
    """Right-hand side of the reduced equations of motion.

    dW = I^-1 ([I W, W] - sigma [K, z]),  dR_ij = -eps_jkm W_k R_im.
    """
    K = _rt_vec(R, k)
    cz = _cross(K, z)
    arm = cz / ivec
    gyro = _cross(ivec * W, W)
    num = grav + np.dot(gyro, arm) + np.dot(_cross(W, K), _cross(W, z))
    den = 1.0 / mu + np.dot(arm, ivec * arm)
    sig = num / den
    dW = (gyro - sig * cz) / ivec
    dR = R @ _hat(W)
    return dR, dW


@_jit
def project_so3(R):
    """Two polar-Newton sweeps R <- R (3 - R^T R)/2; restores orthogonality."""
    out = R
    for _ in range(2):
        G = np.ascontiguousarray(out.T) @ out
        out = out @ (1.5 * np.eye(3) - 0.5 * G)
    return out


@_jit
def orthogonality_residual(R):
    G = np.ascontiguousarray(R.T) @ R
    s = 0.0
    for i in range(3):
        for j in range(3):
            d = G[i, j] - (1.0 if i == j else 0.0)
            s += d * d
    return np.sqrt(s)


@_jit
def rk4_step(ivec, mu, grav, z, k, R, W, dt, project):
    k1R, k1W = rhs(ivec, mu, grav, z, k, R, W)
    k2R, k2W = rhs(ivec, mu, grav, z, k, R + 0.5 * dt * k1R, W + 0.5 * dt * k1W)
    k3R, k3W = rhs(ivec, mu, grav, z, k, R + 0.5 * dt * k2R, W + 0.5 * dt * k2W)
    k4R, k4W = rhs(ivec, mu, grav, z, k, R + dt * k3R, W + dt * k3W)
    R1 = R + (dt / 6.0) * (k1R + 2.0 * k2R + 2.0 * k3R + k4R)
    W1 = W + (dt / 6.0) * (k1W + 2.0 * k2W + 2.0 * k3W + k4W)
    if project:
        R1 = project_so3(R1)
    return R1, W1


@_jit
def propagate(ivec, mu, grav, z, k, R0, W0, dt, nsteps, stride, project):
    """Fixed-step RK4 propagation recording every ``stride``-th state.

    Returns (step_index, Rs, Ws, n_recorded, fail_step).  ``fail_step`` is -1
    on success, otherwise the 1-based index of the first step that produced a
    non-finite state; recorded samples up to that point remain valid.
    """
    nrec = 1 + nsteps // stride
    if nsteps % stride != 0:
        nrec += 1
    idx = np.empty(nrec, dtype=np.int64)
    Rs = np.empty((nrec, 3, 3))
    Ws = np.empty((nrec, 3))
    R = R0.copy()
    W = W0.copy()
    idx[0] = 0
    Rs[0] = R
    Ws[0] = W
    m = 1
    fail = -1
    for s in range(1, nsteps + 1):
        R, W = rk4_step(ivec, mu, grav, z, k, R, W, dt, project)
        if not (np.isfinite(R).all() and np.isfinite(W).all()):
            fail = s
            break
        if s % stride == 0 or s == nsteps:
            idx[m] = s
            Rs[m] = R
            Ws[m] = W
            m += 1
    return idx, Rs, Ws, m, fail
