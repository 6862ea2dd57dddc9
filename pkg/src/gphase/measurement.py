"""Gaussian measurements: general-dyne and ideal homodyne.

A general-dyne measurement is seeded by a squeezed vacuum state with
squeezing s*exp(i*psi); its 2-vector outcome is Gaussian with mean d and
covariance sigma + sigma_seed in the canonical quadrature frame.  Ideal
homodyne of the quadrature at angle psi/2 is implemented exactly as a 1-D
measurement rather than as a large-s limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .states import GaussianMoments, StateParams, params_to_moments, reduce_angle


class UnsupportedKindError(ValueError):
    """Operation does not apply to this measurement kind."""


class MeasurementKind(Enum):
    GENERAL_DYNE = "general_dyne"
    HOMODYNE = "homodyne"


@dataclass(frozen=True)
class MeasurementSpec:
    """A Gaussian measurement: general-dyne (s, psi) or homodyne at angle psi/2."""

    kind: MeasurementKind
    s: float = 0.0
    psi: float = 0.0

    def __post_init__(self) -> None:
        if self.s < 0.0:
            raise ValueError(f"s must be >= 0, got {self.s}")
        object.__setattr__(self, "psi", reduce_angle(float(self.psi)))

    @classmethod
    def general_dyne(cls, s: float, psi: float) -> "MeasurementSpec":
        return cls(MeasurementKind.GENERAL_DYNE, float(s), psi)

    @classmethod
    def heterodyne(cls) -> "MeasurementSpec":
        return cls(MeasurementKind.GENERAL_DYNE, 0.0, 0.0)

    @classmethod
    def homodyne(cls, angle: float) -> "MeasurementSpec":
        # s = inf marks the degenerate seed; the 1-D formulas never touch it.
        return cls(MeasurementKind.HOMODYNE, math.inf, 2.0 * angle)

    @property
    def homodyne_angle(self) -> float:
        """Measured quadrature angle (psi/2)."""
        return 0.5 * self.psi


@dataclass(frozen=True)
class OutcomeDistribution:
    """Gaussian outcome statistics: mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.array(self.mean, dtype=float))
        cov = np.atleast_2d(np.array(self.cov, dtype=float))
        k = mean.shape[0]
        if cov.shape != (k, k):
            raise ValueError(f"cov shape {cov.shape} incompatible with mean {mean.shape}")
        if np.linalg.eigvalsh(cov)[0] <= 0.0:
            raise ValueError("outcome covariance must be positive definite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def density(self, ys: np.ndarray) -> np.ndarray:
        """Gaussian probability density at points of shape (..., dim)."""
        ys = np.asarray(ys, dtype=float)
        if self.dim == 1 and ys.ndim >= 1 and ys.shape[-1] != 1:
            ys = ys[..., np.newaxis]
        diff = ys - self.mean
        solved = diff @ np.linalg.inv(self.cov)
        quad = np.einsum("...i,...i->...", solved, diff)
        norm = math.sqrt((2.0 * math.pi) ** self.dim * float(np.linalg.det(self.cov)))
        return np.exp(-0.5 * quad) / norm

    def log_density(self, ys: np.ndarray) -> np.ndarray:
        """Log of `density`, computed directly for numerical range."""
        ys = np.asarray(ys, dtype=float)
        if self.dim == 1 and ys.ndim >= 1 and ys.shape[-1] != 1:
            ys = ys[..., np.newaxis]
        diff = ys - self.mean
        solved = diff @ np.linalg.inv(self.cov)
        quad = np.einsum("...i,...i->...", solved, diff)
        logdet = math.log(float(np.linalg.det(self.cov)))
        return -0.5 * (quad + logdet + self.dim * math.log(2.0 * math.pi))


def seed_covariance(spec: MeasurementSpec) -> np.ndarray:
    """Covariance of the squeezed-vacuum seed of a general-dyne measurement."""
    if spec.kind is not MeasurementKind.GENERAL_DYNE:
        raise UnsupportedKindError("seed covariance is defined for general-dyne only")
    seed = StateParams(0.0, 0.0, spec.s, spec.psi, 0.0)
    return params_to_moments(seed).sigma


def outcome_distribution(
    m: GaussianMoments, spec: MeasurementSpec
) -> OutcomeDistribution:
    """Outcome statistics of measuring a Gaussian state.

    General-dyne: 2-vector outcome, mean d, covariance sigma + seed.
    Homodyne at angle theta = psi/2: scalar outcome, mean u.d, variance
    u^T sigma u with u = (cos theta, sin theta).
    """
    if spec.kind is MeasurementKind.GENERAL_DYNE:
        return OutcomeDistribution(m.d, m.sigma + seed_covariance(spec))
    theta = spec.homodyne_angle
    u = np.array([math.cos(theta), math.sin(theta)])
    return OutcomeDistribution([u @ m.d], [[u @ m.sigma @ u]])


def sample_outcomes(
    dist: OutcomeDistribution, count: int, seed
) -> np.ndarray:
    """Draw i.i.d. outcomes, shape (count, dim); deterministic given seed."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(dist.cov)
    z = rng.standard_normal((count, dist.dim))
    return dist.mean + z @ chol.T


def transmittance_to_s(tau: float) -> float:
    """Seed squeezing from a beam-splitter transmittance: s = ln sqrt(tau/(1-tau))."""
    if not 0.5 <= tau < 1.0:
        raise ValueError(f"tau must lie in [1/2, 1), got {tau}")
    return 0.5 * math.log(tau / (1.0 - tau))


def s_to_transmittance(s: float) -> float:
    """Inverse of `transmittance_to_s`."""
    if s < 0.0:
        raise ValueError(f"s must be >= 0, got {s}")
    return 1.0 / (1.0 + math.exp(-2.0 * s))
