"""Domain types and body ingestion.

Conventions used throughout the package:

* 3-vectors are float64 numpy arrays of shape (3,) and rotation matrices are
  row-major float64 arrays of shape (3, 3); both must be finite.
* All quantities are SI (kg, m, s, rad); no internal nondimensionalization.
* A configured top lives in its principal frame: the inertia tensor is
  diagonal with moments (I1, I2, I3), the fulcrum offset ``z`` points from
  the center of mass to the support point at t = 0, and ``k`` is the unit
  normal of the supporting plane expressed in the same frame.
"""

from dataclasses import dataclass, field

import numpy as np

from .so3 import orthogonality_residual

ORTH_TOL = 1e-9
_DEGENERACY_RTOL = 1e-8


def as_vec3(x, name="vector"):
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} has non-finite components: {v}")
    return v.copy()


def as_mat3(x, name="matrix"):
    m = np.asarray(x, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"{name} must have shape (3, 3), got {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} has non-finite entries")
    return m.copy()


@dataclass(frozen=True)
class BodySpec:
    """A rigid body given as point masses, one of which touches the plane.

    ``fulcrum_index`` selects the support point among ``positions``;
    ``gravity`` is the downward acceleration and ``plane_normal`` the (not
    necessarily unit) normal of the supporting plane, both in the input
    coordinates.
    """

    masses: np.ndarray
    positions: np.ndarray
    fulcrum_index: int
    gravity: float = 9.8
    plane_normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float).ravel()
        p = np.asarray(self.positions, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValueError(f"positions must have shape (n, 3), got {p.shape}")
        if m.shape[0] != p.shape[0]:
            raise ValueError("masses and positions disagree in length")
        if not (np.isfinite(m).all() and np.isfinite(p).all()):
            raise ValueError("point cloud contains non-finite values")
        if np.any(m <= 0.0):
            raise ValueError("every point mass must be positive")
        if not 0 <= self.fulcrum_index < m.shape[0]:
            raise ValueError(f"fulcrum index {self.fulcrum_index} out of range for {m.shape[0]} points")
        if self.gravity < 0.0:
            raise ValueError("gravity must be >= 0")
        n = as_vec3(self.plane_normal, "plane normal")
        if np.linalg.norm(n) == 0.0:
            raise ValueError("plane normal must be nonzero")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "positions", p.copy())
        object.__setattr__(self, "plane_normal", n)

    @property
    def total_mass(self):
        return float(self.masses.sum())


@dataclass(frozen=True)
class TopConfig:
    """Physical description of a configured top in its principal frame."""

    I1: float
    I2: float
    I3: float
    mu: float
    z: np.ndarray
    k: np.ndarray
    a: float

    def __post_init__(self):
        moments = (self.I1, self.I2, self.I3)
        if not all(np.isfinite(moments)) or min(moments) <= 0.0:
            raise ValueError(f"principal moments must be positive, got {moments}")
        # realizability: each moment cannot exceed the sum of the other two
        s = sum(moments)
        for m in moments:
            if 2.0 * m > s * (1.0 + 1e-12):
                raise ValueError(f"moments {moments} violate the triangle inequality")
        if not (np.isfinite(self.mu) and self.mu > 0.0):
            raise ValueError("total mass must be positive")
        if not (np.isfinite(self.a) and self.a >= 0.0):
            raise ValueError("gravity must be >= 0")
        z = as_vec3(self.z, "fulcrum offset z")
        k = as_vec3(self.k, "plane normal k")
        nk = np.linalg.norm(k)
        if nk == 0.0:
            raise ValueError("plane normal must be nonzero")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "k", k / nk)  # renormalized once, here only

    @property
    def moments(self):
        """Principal moments as an array (I1, I2, I3)."""
        return np.array([self.I1, self.I2, self.I3])


@dataclass(frozen=True)
class RotState:
    """Rotational phase point: time, attitude matrix, body angular velocity."""

    t: float
    R: np.ndarray
    Omega: np.ndarray
    orth_tol: float | None = ORTH_TOL

    def __post_init__(self):
        R = as_mat3(self.R, "R")
        Omega = as_vec3(self.Omega, "Omega")
        if self.orth_tol is not None:
            res = orthogonality_residual(R)
            if res > self.orth_tol:
                raise ValueError(f"R is not orthogonal: residual {res:.3e} > {self.orth_tol:.1e}")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "Omega", Omega)


@dataclass(frozen=True)
class CoMState:
    """Planar center-of-mass data: in-plane position and velocity.

    Both vectors must be orthogonal to the plane normal; the altitude is
    never part of the state because it follows algebraically from the
    contact constraint.
    """

    p_perp: np.ndarray
    v_perp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p_perp", as_vec3(self.p_perp, "p_perp"))
        object.__setattr__(self, "v_perp", as_vec3(self.v_perp, "v_perp"))

    @classmethod
    def on_plane(cls, k, p=(0.0, 0.0, 0.0), v=(0.0, 0.0, 0.0)):
        """Build a CoMState by projecting p, v onto the plane normal to k."""
        k = as_vec3(k, "k")
        k = k / np.linalg.norm(k)
        p = as_vec3(p, "p")
        v = as_vec3(v, "v")
        return cls(p - (p @ k) * k, v - (v @ k) * k)

    def check_orthogonal(self, k, tol=1e-12):
        k = np.asarray(k, dtype=float)
        scale = 1.0 + float(np.linalg.norm(self.p_perp) + np.linalg.norm(self.v_perp))
        for name, vec in (("p_perp", self.p_perp), ("v_perp", self.v_perp)):
            if abs(float(vec @ k)) > tol * scale:
                raise ValueError(f"{name} is not orthogonal to the plane normal")


def jacobi_eigh3(A, tol=1e-13):
    """Eigendecomposition of a symmetric 3x3 matrix by cyclic Jacobi sweeps.

    Iterates until the off-diagonal Frobenius norm falls below ``tol``
    relative to the matrix norm.  Returns (eigenvalues descending, V) with
    eigenvectors in the columns of V and det(V) = +1.
    """
    A = as_mat3(A, "matrix")
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (A + A.T)
    V = np.eye(3)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(64):
        off = np.sqrt(2.0 * (a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2))
        if off <= tol * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if apq == 0.0:
                continue
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            G = np.eye(3)
            G[p, p] = G[q, q] = c
            G[p, q] = s
            G[q, p] = -s
            a = G.T @ a @ G
            V = V @ G
    order = np.argsort(a.diagonal())[::-1]
    vals = a.diagonal()[order].copy()
    V = V[:, order]
    if np.linalg.det(V) < 0.0:
        V[:, 2] = -V[:, 2]
    return vals, V


def _degenerate_pair(vals):
    scale = max(abs(vals[0]), abs(vals[2]), np.finfo(float).tiny)
    if abs(vals[0] - vals[2]) <= _DEGENERACY_RTOL * scale:
        return None  # fully degenerate, any frame diagonalizes
    for p, q in ((0, 1), (1, 2)):
        if abs(vals[p] - vals[q]) <= _DEGENERACY_RTOL * scale:
            return p, q
    return None


def _fix_degenerate_axes(vals, V, k, z):
    """Resolve the free rotation inside a repeated eigenspace.

    The first axis of the degenerate pair is aligned with the normal of the
    plane spanned by k and z (when that normal has a component in the
    eigenspace), and its sign is chosen so the plane normal ends up with a
    non-negative component along the second axis of the pair.  When k and z
    are parallel any orthonormal completion is acceptable and V is returned
    unchanged.
    """
    pair = _degenerate_pair(vals)
    if pair is None:
        return V, None
    p, q = pair
    m = np.cross(k, z)
    nm = np.linalg.norm(m)
    if nm <= 1e-12 * max(np.linalg.norm(k) * np.linalg.norm(z), np.finfo(float).tiny):
        return V, pair
    m = m / nm
    proj = (m @ V[:, p]) * V[:, p] + (m @ V[:, q]) * V[:, q]
    npj = np.linalg.norm(proj)
    if npj < 1e-10:
        return V, pair
    vp = proj / npj
    if (p, q) == (0, 1):
        vq = np.cross(V[:, 2], vp)  # keeps v1 x v2 = v3
        if vq @ k < 0.0:
            vp, vq = -vp, -vq
        W = np.column_stack([vp, vq, V[:, 2]])
    else:  # pair (1, 2)
        vq = np.cross(V[:, 0], vp)
        if vq @ k < 0.0:
            vp, vq = -vp, -vq
        W = np.column_stack([V[:, 0], vp, vq])
    return W, pair


def build_config(spec):
    """Derive a TopConfig from a point-mass body.

    Computes the center of mass, the mass matrix g = sum m x x^T, the inertia
    tensor I = tr(g) 1 - g, diagonalizes it, and expresses the fulcrum offset
    and plane normal in the resulting principal frame.  Returns
    (config, frame) where ``frame`` maps input coordinates to principal
    coordinates (rows are the principal axes, det = +1).

    Raises ValueError naming the defect for degenerate clouds (fewer than
    four points, coincident, collinear or coplanar).
    """
    if spec.masses.shape[0] < 4:
        raise ValueError("inertia requires at least 4 points not all in one plane")
    mu = spec.total_mass
    yc = (spec.masses[:, None] * spec.positions).sum(axis=0) / mu
    x = spec.positions - yc
    g = np.einsum("n,ni,nj->ij", spec.masses, x, x)
    gvals, _ = jacobi_eigh3(g)
    gscale = max(gvals[0], np.finfo(float).tiny)
    rank = int(np.sum(gvals > 1e-10 * gscale))
    if rank < 3:
        defect = {2: "coplanar", 1: "collinear", 0: "coincident"}[rank]
        raise ValueError(f"inertia is singular: point cloud is {defect}")
    inertia = np.trace(g) * np.eye(3) - g
    vals, V = jacobi_eigh3(inertia)
    z_in = x[spec.fulcrum_index]
    V, pair = _fix_degenerate_axes(vals, V, spec.plane_normal, z_in)
    frame = V.T
    cfg = TopConfig(
        I1=float(vals[0]),
        I2=float(vals[1]),
        I3=float(vals[2]),
        mu=mu,
        z=frame @ z_in,
        k=frame @ (spec.plane_normal / np.linalg.norm(spec.plane_normal)),
        a=spec.gravity,
    )
    return cfg, frame


def conical_top(mu, h, r, k3, a):
    """TopConfig of a solid cone standing on its apex.

    The center of mass sits at L = 3h/4 from the apex on the symmetry axis,
    with moments I1 = I2 = (3/20) mu (r^2 + h^2/4) and I3 = (3/10) mu r^2.
    The plane normal is placed in the (e2, e3) plane: k = (0, sqrt(1-k3^2), k3).
    """
    if not (mu > 0.0 and h > 0.0 and r > 0.0):
        raise ValueError("mu, h, r must be positive")
    if abs(k3) > 1.0:
        raise ValueError("inclination cosine k3 must satisfy |k3| <= 1")
    transverse = 0.15 * mu * (r * r + h * h / 4.0)
    axial = 0.3 * mu * (r * r)
    L = 0.75 * h
    k2 = np.sqrt(max(0.0, 1.0 - k3 * k3))
    return TopConfig(
        I1=transverse,
        I2=transverse,
        I3=axial,
        mu=float(mu),
        z=np.array([0.0, 0.0, -L]),
        k=np.array([0.0, k2, float(k3)]),
        a=float(a),
    )


def cone_point_cloud(mu, h, r, n_interior=20000):
    """Deterministic quasi-random point-mass discretization of a solid cone.

    Interior points follow a Halton sequence mapped to the uniform density
    of a cone with apex at the origin and axis +e3; the apex itself is
    prepended as point 0 (the fulcrum).  All points carry equal mass.
    """
    from scipy.stats import qmc

    if n_interior < 1:
        raise ValueError("need at least one interior sample")
    sampler = qmc.Halton(d=3, scramble=False)
    sampler.fast_forward(1)  # first Halton point is the origin = apex duplicate
    u = sampler.random(n_interior)
    height = h * np.cbrt(u[:, 0])
    rho = (r * height / h) * np.sqrt(u[:, 1])
    theta = 2.0 * np.pi * u[:, 2]
    pts = np.column_stack([rho * np.cos(theta), rho * np.sin(theta), height])
    pts = np.vstack([np.zeros(3), pts])
    masses = np.full(len(pts), mu / len(pts))
    return masses, pts


def load_point_cloud(path):
    """Read a `mass x y z` per line text file; ``#`` starts a comment.

    Returns (masses, positions).  The fulcrum is designated elsewhere by its
    0-based index among the data lines.
    """
    masses = []
    positions = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'mass x y z', got {raw.rstrip()!r}")
            try:
                vals = [float(p) for p in parts]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            masses.append(vals[0])
            positions.append(vals[1:])
    if not masses:
        raise ValueError(f"{path}: no data lines")
    return np.asarray(masses), np.asarray(positions)
