"""Closed-form constant-height solution of the symmetric top.

A symmetric top (I1 = I2) with its support point on the third inertia axis
admits a two-frequency motion in which the center of mass keeps a fixed
height: the body spins about its symmetry axis at rate ``alpha`` while the
support point precesses around the plane normal at rate ``gamma``.  The two
rates are locked by

    alpha = (I2 - I3) k3 / I3 * gamma + mu L a / (I3 * gamma)

and along every such motion the plane reaction is exactly sigma = a mu, so
the effective gravity on the center of mass vanishes.  The attitude is the
product of a rotation about the plane normal k with a rotation about the
body axis e3, both at constant rate.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .model import TopConfig, RotState, conical_top
from .so3 import rotation_about_axis


class Regime(enum.Enum):
    """Qualitative classes of the spin-precession relation.

    The shape of alpha(gamma) is set by the sign of the inertia contrast
    C = (I2 - I3)/I3 and the side of the plane the body sits on (sign of
    k3).  For C*k3 > 0 the relation has a minimum spin below which no
    constant-height motion exists; for C*k3 < 0 it crosses zero at a finite
    precession rate; for C = 0 or k3 = 0 it degenerates to a hyperbola.
    """

    LOW_ABOVE = "A"
    HIGH_BELOW = "B"
    HIGH_ABOVE = "C"
    LOW_BELOW = "D"
    TOTALLY_SYMMETRIC = "E"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class SymmetricTop:
    """Symmetric top data: I2 (= I1), I3, mass, fulcrum distance L, gravity,
    and the plane normal (0, k2, k3) with k2 >= 0."""

    I2: float
    I3: float
    mu: float
    L: float
    a: float
    k2: float
    k3: float

    def __post_init__(self):
        for name in ("I2", "I3", "mu", "L"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive, got {v}")
        if not (np.isfinite(self.a) and self.a >= 0.0):
            raise ValueError("gravity must be >= 0")
        if self.k2 < 0.0:
            raise ValueError("convention requires k2 >= 0 (reflect the frame about e3 first)")
        if abs(self.k2 ** 2 + self.k3 ** 2 - 1.0) > 1e-12:
            raise ValueError("(k2, k3) must be a unit vector")

    @property
    def contrast(self) -> float:
        """Inertia contrast C = (I2 - I3)/I3."""
        return (self.I2 - self.I3) / self.I3

    @classmethod
    def from_cone(cls, mu, h, r, k3, a):
        """Symmetric top of a solid cone (same moments as ``conical_top``)."""
        return cls.from_config(conical_top(mu, h, r, k3, a))

    @classmethod
    def from_config(cls, cfg: TopConfig):
        """Adapt a symmetric TopConfig; k inputs with k2 < 0 are reflected.

        The reflection is the frame rotation by pi about e3, which leaves
        z = (0, 0, -L) invariant, so it only renames the transverse axes.
        """
        scale = max(cfg.I1, cfg.I2, cfg.I3)
        if abs(cfg.I1 - cfg.I2) > 1e-9 * scale:
            raise ValueError(f"not a symmetric top: I1={cfg.I1}, I2={cfg.I2}")
        zn = np.linalg.norm(cfg.z)
        if zn == 0.0 or np.hypot(cfg.z[0], cfg.z[1]) > 1e-9 * zn or cfg.z[2] >= 0.0:
            raise ValueError(f"fulcrum must sit on the third axis: z={cfg.z}")
        if abs(cfg.k[0]) > 1e-9:
            raise ValueError(f"plane normal must lie in the (e2, e3) plane: k={cfg.k}")
        k2, k3 = float(cfg.k[1]), float(cfg.k[2])
        if k2 < 0.0:
            k2 = -k2
        return cls(I2=cfg.I2, I3=cfg.I3, mu=cfg.mu, L=-float(cfg.z[2]), a=cfg.a,
                   k2=k2, k3=k3)

    def to_config(self) -> TopConfig:
        return TopConfig(I1=self.I2, I2=self.I2, I3=self.I3, mu=self.mu,
                         z=np.array([0.0, 0.0, -self.L]),
                         k=np.array([0.0, self.k2, self.k3]), a=self.a)


@dataclass(frozen=True)
class SpinPrecession:
    """A self-consistent (alpha, gamma) pair with its regime and reaction."""

    alpha: float
    gamma: float
    sigma: float
    regime: Regime


def classify(top: SymmetricTop, tol=1e-12) -> Regime:
    """Regime from the signs of the inertia contrast and the inclination."""
    scale = max(top.I2, top.I3)
    if abs(top.I2 - top.I3) <= tol * scale:
        return Regime.TOTALLY_SYMMETRIC
    if abs(top.k3) <= tol:
        return Regime.HORIZONTAL
    if top.I2 > top.I3:
        return Regime.HIGH_ABOVE if top.k3 > 0 else Regime.HIGH_BELOW
    return Regime.LOW_ABOVE if top.k3 > 0 else Regime.LOW_BELOW


def alpha_of_gamma(top: SymmetricTop, gamma: float) -> float:
    """Spin rate locked to a given precession rate.

    alpha = (I2 - I3) k3 gamma / I3 + mu L a / (I3 gamma).  The relation has
    a pole at gamma = 0; the upright limit is reached through k2 -> 0, not
    gamma -> 0.
    """
    if gamma == 0.0:
        raise ValueError("gamma = 0 is a pole of the spin-precession relation")
    return ((top.I2 - top.I3) * top.k3 / top.I3) * gamma + top.mu * top.L * top.a / (top.I3 * gamma)


def gamma_of_alpha(top: SymmetricTop, alpha: float) -> list[float]:
    """Real precession rates compatible with a given spin rate.

    Inverts alpha(gamma), i.e. solves
    (I2 - I3) k3 gamma^2 - alpha I3 gamma + mu L a = 0.  Returns 0, 1 or 2
    nonzero real roots (an empty list when no constant-height motion exists
    at that spin rate); every returned root round-trips through
    ``alpha_of_gamma``.
    """
    A = (top.I2 - top.I3) * top.k3
    B = -alpha * top.I3
    C = top.mu * top.L * top.a
    if A == 0.0:
        if B == 0.0:
            return []
        g = -C / B
        return [g] if g != 0.0 else []
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return []
    sq = np.sqrt(disc)
    q = -0.5 * (B + np.copysign(sq, B)) if B != 0.0 else -0.5 * sq
    roots = set()
    if q != 0.0:
        roots.add(q / A)
        roots.add(C / q)
    else:  # B = 0 and disc >= 0 implies C <= 0
        g = np.sqrt(-C / A) if -C / A >= 0.0 else None
        if g:
            roots.update((g, -g))
    return sorted(r for r in roots if r != 0.0)


def critical_frequencies(top: SymmetricTop):
    """Tangency point of the spin-precession relation, or None.

    When (I2 - I3) k3 > 0 both branches of alpha(gamma) have the same sign
    and meet at a minimum spin magnitude; below it the top cannot hold its
    height.  Returns (gamma_crit, alpha_crit) there, None when the product
    is <= 0 and no such point exists.
    """
    prod = (top.I2 - top.I3) * top.k3
    if prod <= 0.0:
        return None
    gamma_crit = np.sqrt(top.mu * top.L * top.a / prod)
    alpha_crit = 2.0 * np.sqrt(prod * top.mu * top.L * top.a) / top.I3
    return float(gamma_crit), float(alpha_crit)


def no_spin_gamma(top: SymmetricTop):
    """Precession rate at which the locked spin vanishes, or None.

    Exists only when (I2 - I3) k3 < 0, where alpha(gamma) changes sign: the
    support point then precesses while the body does not spin about its own
    axis.
    """
    prod = (top.I2 - top.I3) * top.k3
    if prod >= 0.0:
        return None
    return float(np.sqrt(-top.mu * top.L * top.a / prod))


def spin_precession(top: SymmetricTop, gamma: float) -> SpinPrecession:
    """Assemble the self-consistent pair at a given precession rate."""
    return SpinPrecession(
        alpha=alpha_of_gamma(top, gamma),
        gamma=float(gamma),
        sigma=top.a * top.mu,
        regime=classify(top),
    )


def analytic_state(top: SymmetricTop, gamma: float, t: float, alpha=None) -> RotState:
    """Exact constant-height state at time t.

    R(t) is the rotation about k by gamma*t composed with the rotation about
    e3 by alpha*t; the body angular velocity is
    Omega = (gamma k2 sin(alpha t), gamma k2 cos(alpha t), alpha + k3 gamma).
    By default alpha is locked to gamma through ``alpha_of_gamma``; passing
    an explicit alpha yields a kinematically valid but dynamically detuned
    state (useful as a negative control).
    """
    if gamma == 0.0:
        raise ValueError("gamma = 0 is outside the solution family")
    al = alpha_of_gamma(top, gamma) if alpha is None else float(alpha)
    k = np.array([0.0, top.k2, top.k3])
    R = rotation_about_axis(k, gamma * t) @ rotation_about_axis((0.0, 0.0, 1.0), al * t)
    omega = np.array([
        gamma * top.k2 * np.sin(al * t),
        gamma * top.k2 * np.cos(al * t),
        al + top.k3 * gamma,
    ])
    return RotState(t=float(t), R=R, Omega=omega)


def analytic_state_derivative(top: SymmetricTop, gamma: float, t: float, alpha=None):
    """Exact (dR, dOmega) of the closed-form motion, for oracle comparisons."""
    from .so3 import hat

    al = alpha_of_gamma(top, gamma) if alpha is None else float(alpha)
    state = analytic_state(top, gamma, t, alpha=al)
    k = np.array([0.0, top.k2, top.k3])
    dR = gamma * hat(k) @ state.R + al * state.R @ hat(np.array([0.0, 0.0, 1.0]))
    dW = np.array([
        al * gamma * top.k2 * np.cos(al * t),
        -al * gamma * top.k2 * np.sin(al * t),
        0.0,
    ])
    return dR, dW
