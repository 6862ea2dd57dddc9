"""Single-mode Gaussian states in parametric and moment form.

Quadrature convention: x1 = (a + a^dag)/sqrt(2), x2 = (a - a^dag)/(sqrt(2) i),
so the vacuum covariance matrix is I/2.  All angles are radians and are
reduced to [0, 2*pi) at construction time; everything in between works with
plain trigonometric functions, so derivatives in phi stay smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Slack on det(sigma) >= 1/4, sized for double-precision products of a
# handful of 2x2 factors.
PHYSICALITY_TOL = 1e-12


class InvalidStateError(ValueError):
    """Covariance matrix violates the uncertainty relation."""


def reduce_angle(theta: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    out = math.fmod(theta, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    return 0.0 if out == TWO_PI else out


def rotation_matrix(phi: float) -> np.ndarray:
    """Moment-space action of the phase shifter exp(-i*phi*n).

    A state rotation by phi maps d -> O d and sigma -> O sigma O^T with the
    matrix returned here; equivalently theta_c -> theta_c - phi and
    theta_s -> theta_s - 2*phi in the parametric form.
    """
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class StateParams:
    """Displaced squeezed thermal state (|alpha|, theta_c, r, theta_s, n_th)."""

    alpha_mag: float
    theta_c: float = 0.0
    r: float = 0.0
    theta_s: float = 0.0
    n_th: float = 0.0

    def __post_init__(self) -> None:
        if self.alpha_mag < 0.0:
            raise ValueError(f"alpha_mag must be >= 0, got {self.alpha_mag}")
        if self.r < 0.0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if self.n_th < 0.0:
            raise ValueError(f"n_th must be >= 0, got {self.n_th}")
        object.__setattr__(self, "alpha_mag", float(self.alpha_mag))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "n_th", float(self.n_th))
        object.__setattr__(self, "theta_c", reduce_angle(float(self.theta_c)))
        object.__setattr__(self, "theta_s", reduce_angle(float(self.theta_s)))

    @property
    def alpha(self) -> complex:
        """Complex displacement amplitude."""
        return self.alpha_mag * complex(math.cos(self.theta_c), math.sin(self.theta_c))

    @property
    def xi(self) -> complex:
        """Complex squeezing parameter."""
        return self.r * complex(math.cos(self.theta_s), math.sin(self.theta_s))


@dataclass(frozen=True)
class GaussianMoments:
    """Covariance matrix and mean quadrature vector of a single-mode state."""

    sigma: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        sigma = np.array(self.sigma, dtype=float)
        d = np.array(self.d, dtype=float)
        if sigma.shape != (2, 2):
            raise ValueError(f"sigma must be 2x2, got shape {sigma.shape}")
        if d.shape != (2,):
            raise ValueError(f"d must be a 2-vector, got shape {d.shape}")
        if abs(sigma[0, 1] - sigma[1, 0]) > 1e-10 * max(1.0, abs(sigma).max()):
            raise InvalidStateError("sigma is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        sigma.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class ChannelParams:
    """Thermal-loss channel: transmission eta and environment photons n_e."""

    eta: float
    n_e: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.n_e < 0.0:
            raise ValueError(f"n_e must be >= 0, got {self.n_e}")

    @property
    def sigma_infinity(self) -> np.ndarray:
        """Stationary covariance of the environment."""
        return (self.n_e + 0.5) * np.eye(2)


def params_to_moments(p: StateParams) -> GaussianMoments:
    """Covariance matrix and displacement vector of a parametrized state."""
    nu = 2.0 * p.n_th + 1.0
    ch, sh = math.cosh(2.0 * p.r), math.sinh(2.0 * p.r)
    cs, ss = math.cos(p.theta_s), math.sin(p.theta_s)
    sigma = 0.5 * nu * np.array(
        [[ch - sh * cs, -sh * ss], [-sh * ss, ch + sh * cs]]
    )
    d = math.sqrt(2.0) * p.alpha_mag * np.array(
        [math.cos(p.theta_c), math.sin(p.theta_c)]
    )
    return GaussianMoments(sigma, d)


def moments_to_params(m: GaussianMoments) -> StateParams:
    """Invert `params_to_moments` via symplectic diagonalization.

    Chooses r >= 0 and, when r == 0, reports theta_s = 0 (the squeezing
    phase is unobservable there).
    """
    det = float(np.linalg.det(m.sigma))
    if det < 0.25 - PHYSICALITY_TOL:
        raise InvalidStateError(f"det(sigma) = {det} < 1/4: unphysical state")
    nu = 2.0 * math.sqrt(max(det, 0.25))
    n_th = 0.5 * (nu - 1.0)
    if n_th < 0.0:
        n_th = 0.0
    scaled = m.sigma * (2.0 / nu)
    # scaled = cosh(2r) I - sinh(2r) [[cos ts, sin ts], [sin ts, -cos ts]]
    sh_cos = 0.5 * (scaled[1, 1] - scaled[0, 0])
    sh_sin = -scaled[0, 1]
    sh = math.hypot(sh_cos, sh_sin)
    r = 0.5 * math.asinh(sh)
    theta_s = math.atan2(sh_sin, sh_cos) if sh > 0.0 else 0.0
    alpha_mag = float(np.linalg.norm(m.d)) / math.sqrt(2.0)
    theta_c = math.atan2(m.d[1], m.d[0]) if alpha_mag > 0.0 else 0.0
    return StateParams(alpha_mag, theta_c, r, theta_s, n_th)


def mean_photon_number(m: GaussianMoments) -> float:
    """Average photon number N = (Tr sigma + |d|^2 - 1)/2."""
    return 0.5 * (float(np.trace(m.sigma)) + float(m.d @ m.d) - 1.0)


def apply_phase_shift(p: StateParams, phi: float) -> StateParams:
    """Phase rotation: theta_c -> theta_c - phi, theta_s -> theta_s - 2*phi."""
    return StateParams(
        p.alpha_mag, p.theta_c - phi, p.r, p.theta_s - 2.0 * phi, p.n_th
    )


def apply_thermal_channel(p: StateParams, c: ChannelParams) -> StateParams:
    """Closed-form endpoint of the thermal-loss channel on the parameters.

    The phases theta_c and theta_s are unchanged; |alpha|, r and n_th pick
    up the channel transmission and the environment occupation.
    """
    eta, n_e = c.eta, c.n_e
    a_in = 1.0 + 2.0 * p.n_th
    a_env = 1.0 + 2.0 * n_e
    mix = eta * a_in + (1.0 - eta) * a_env
    root = math.sqrt(
        mix * mix
        + 4.0 * eta * (1.0 - eta) * a_in * a_env * math.sinh(p.r) ** 2
    )
    n_th = 0.5 * root - 0.5
    if n_th < 0.0:
        n_th = 0.0
    num = (1.0 - eta) * a_env + eta * a_in * math.exp(2.0 * p.r)
    r = 0.5 * math.log(num / root)
    if r < 0.0:
        r = 0.0
    alpha_mag = math.sqrt(eta) * p.alpha_mag
    return StateParams(alpha_mag, p.theta_c, r, p.theta_s, n_th)


def apply_thermal_channel_moments(
    m: GaussianMoments, c: ChannelParams
) -> GaussianMoments:
    """Moment-space solution: sigma -> (1-eta) sigma_inf + eta sigma, d -> sqrt(eta) d."""
    sigma = (1.0 - c.eta) * c.sigma_infinity + c.eta * m.sigma
    d = math.sqrt(c.eta) * m.d
    return GaussianMoments(sigma, d)


def is_physical(m: GaussianMoments) -> bool:
    """True iff sigma is symmetric positive definite with det >= 1/4 - tol."""
    sigma = m.sigma
    if not np.all(np.isfinite(sigma)):
        return False
    eigs = np.linalg.eigvalsh(sigma)
    if eigs[0] <= 0.0:
        return False
    return float(np.linalg.det(sigma)) >= 0.25 - PHYSICALITY_TOL
