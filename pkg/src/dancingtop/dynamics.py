"""Reduced equations of motion and conserved-quantity diagnostics.

The rotational state (R, Omega) evolves independently of the center of mass;
the in-plane CoM motion is uniform and the altitude follows from the contact
constraint (k, y_c + R z) = 0, so it is derived, never integrated.  The
plane's reaction enters as a state-dependent multiplier sigma that plays the
role of a fictitious gravity: the CoM feels the acceleration a - sigma/mu.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import TopConfig, RotState, CoMState, as_vec3


@dataclass(frozen=True)
class Diagnostics:
    """Per-sample conserved quantities and residuals.

    ``energy`` and ``L_k`` (the plane-normal component of angular momentum)
    are constants of motion for every top; ``omega3`` is additionally
    conserved when I1 = I2.  ``sigma`` is reported so a sign change (body
    pulling on the plane) can be detected downstream; contact is assumed
    maintained regardless.
    """

    sigma: float
    energy: float
    L_k: float
    omega3: float
    orth_residual: float
    constraint_residual: float
    v_c: np.ndarray


def reaction_force(cfg: TopConfig, state: RotState) -> float:
    """Reaction multiplier sigma(R, Omega), in newtons.

    Implemented through the coordinate-free contraction (the moment-arm
    form); see ``reaction_force_det`` for the equivalent determinant form
    kept as a cross-check.
    """
    return float(kernels.reaction(cfg.moments, cfg.mu, cfg.a, cfg.z, cfg.k,
                                  state.R, state.Omega))


def reaction_force_det(cfg: TopConfig, state: RotState) -> float:
    """sigma via the expanded determinant identity (cross-check route only)."""
    ivec = cfg.moments
    K = state.R.T @ cfg.k
    W = state.Omega
    z = cfg.z
    arm = np.cross(K, z) / ivec
    det_inertia = float(ivec.prod())
    IW = ivec * W
    I2W = ivec * ivec * W
    num = (cfg.a
           + ((IW @ z) * (I2W @ K) - (IW @ K) * (I2W @ z)) / det_inertia
           - (W @ K) * (W @ z) + (W @ W) * (K @ z))
    den = 1.0 / cfg.mu + arm @ (ivec * arm)
    return float(num / den)


def _require_symmetric(cfg: TopConfig):
    scale = max(cfg.I1, cfg.I2, cfg.I3)
    if abs(cfg.I1 - cfg.I2) > 1e-12 * scale:
        raise ValueError(f"symmetric form needs I1 = I2, got I1={cfg.I1}, I2={cfg.I2}")
    zs = np.linalg.norm(cfg.z)
    if zs == 0.0 or np.hypot(cfg.z[0], cfg.z[1]) > 1e-12 * zs or cfg.z[2] >= 0.0:
        raise ValueError(f"symmetric form needs z = (0, 0, -L) with L > 0, got z={cfg.z}")
    return -float(cfg.z[2])


def reaction_force_symmetric(cfg: TopConfig, K, Omega) -> float:
    """sigma for a symmetric top (I1 = I2, fulcrum on the third axis).

    Takes the body-frame vertical K = R^T k directly; only K and Omega enter
    the symmetric reduction.
    """
    L = _require_symmetric(cfg)
    K = as_vec3(K, "K")
    W = as_vec3(Omega, "Omega")
    den = 1.0 / cfg.mu + (L * L / cfg.I2) * (K[0] ** 2 + K[1] ** 2)
    num = L * (cfg.a / L
               + (cfg.I3 / cfg.I2) * W[2] * (W[0] * K[0] + W[1] * K[1])
               - (W[0] ** 2 + W[1] ** 2) * K[2])
    return float(num / den)


def rhs(cfg: TopConfig, state: RotState):
    """Time derivative (dR, dOmega) of the rotational state."""
    dR, dW = kernels.rhs(cfg.moments, cfg.mu, cfg.a, cfg.z, cfg.k,
                         state.R, state.Omega)
    return dR, dW


def com_altitude(cfg: TopConfig, state: RotState) -> float:
    """Height (k, y_c) of the center of mass, from the contact constraint."""
    return -float(cfg.k @ (state.R @ cfg.z))


def com_position(cfg: TopConfig, state: RotState, com: CoMState) -> np.ndarray:
    """Full center-of-mass position: in-plane part plus derived altitude."""
    return com.p_perp + com_altitude(cfg, state) * cfg.k


def reconstruct_point(state: RotState, com: CoMState, cfg: TopConfig, x0) -> np.ndarray:
    """World position of the body point that sat at ``x0`` (body frame, t=0)."""
    x0 = as_vec3(x0, "x0")
    return com_position(cfg, state, com) + state.R @ x0


def energy(cfg: TopConfig, state: RotState) -> float:
    """Total energy of the rotational problem (in-plane CoM part excluded).

    E = 1/2 sum_i I_i Omega_i^2 + 1/2 mu (Omega, [K, z])^2 - a mu (K, z),
    where the middle term is the vertical CoM kinetic energy rewritten
    through the constraint.
    """
    ivec = cfg.moments
    W = state.Omega
    K = state.R.T @ cfg.k
    s = W @ np.cross(K, cfg.z)
    return float(0.5 * W @ (ivec * W) + 0.5 * cfg.mu * s * s - cfg.a * cfg.mu * (K @ cfg.z))


def angular_momentum_k(cfg: TopConfig, state: RotState) -> float:
    """Plane-normal component of angular momentum, (k, R I Omega)."""
    return float(cfg.k @ (state.R @ (cfg.moments * state.Omega)))


def diagnostics(cfg: TopConfig, state: RotState, com: CoMState) -> Diagnostics:
    """Evaluate all reported conserved quantities and residuals at a sample."""
    R = state.R
    orth = float(np.linalg.norm(R.T @ R - np.eye(3)))
    yc = com_position(cfg, state, com)
    constr = abs(float(cfg.k @ (yc + R @ cfg.z)))
    return Diagnostics(
        sigma=reaction_force(cfg, state),
        energy=energy(cfg, state),
        L_k=angular_momentum_k(cfg, state),
        omega3=float(state.Omega[2]),
        orth_residual=orth,
        constraint_residual=constr,
        v_c=com.v_perp.copy(),
    )
