"""Fisher information for Gaussian phase estimation.

Classical FI for Gaussian measurements, the quantum FI, the closed-form
optimal Gaussian measurements (three types), the optimal-type region
classifier, and a numerical measurement optimizer.

Phase derivatives of the outcome moments are taken analytically through the
rotation generator (d sigma/d phi = J sigma - sigma J with the symplectic
J); finite differences appear only in the independent quadrature oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .measurement import (
    MeasurementKind,
    MeasurementSpec,
    OutcomeDistribution,
    outcome_distribution,
    seed_covariance,
)
from .states import (
    GaussianMoments,
    StateParams,
    params_to_moments,
    reduce_angle,
    rotation_matrix,
)

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])

SIGMA_CONDITION_LIMIT = 1e14


class IllConditionedError(RuntimeError):
    """Outcome covariance too close to singular for the FI formula."""


class NumericFailureError(RuntimeError):
    """Quadrature for the FI oracle did not converge."""


class UndefinedTypeError(ValueError):
    """The requested optimal-measurement type does not exist for this state."""


class NoRealSolutionError(ValueError):
    """No real measurement parameter exists in the requested branch."""


class OptimalType(Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"


@dataclass(frozen=True)
class BoundReport:
    """Result of optimizing the Gaussian FI for one state."""

    fi: float
    qfi: float
    ratio: float
    spec: MeasurementSpec
    type_used: OptimalType | None


def encoded_moments(p: StateParams, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Moments of the state after the phase shift by phi."""
    m = params_to_moments(p)
    rot = rotation_matrix(phi)
    return rot @ m.sigma @ rot.T, rot @ m.d


def gaussian_fi(p: StateParams, phi: float, spec: MeasurementSpec) -> float:
    """Classical FI of a Gaussian measurement on the phase-encoded state.

    F = dnu^T Sigma^-1 dnu + Tr[(Sigma^-1 dSigma)^2]/2, which for homodyne
    collapses to (dmu)^2/v + (dv)^2/(2 v^2).
    """
    sigma, d = encoded_moments(p, phi)
    dsigma = _J @ sigma - sigma @ _J
    dd = _J @ d
    if spec.kind is MeasurementKind.HOMODYNE:
        theta = spec.homodyne_angle
        u = np.array([math.cos(theta), math.sin(theta)])
        v = float(u @ sigma @ u)
        dmu = float(u @ dd)
        dv = float(u @ dsigma @ u)
        return dmu * dmu / v + dv * dv / (2.0 * v * v)
    big = sigma + seed_covariance(spec)
    if np.linalg.cond(big) > SIGMA_CONDITION_LIMIT:
        raise IllConditionedError("outcome covariance is numerically singular")
    inv = np.linalg.inv(big)
    a = inv @ dsigma
    return float(dd @ inv @ dd + 0.5 * np.trace(a @ a))


def _fi_integrand_1d(p: StateParams, phi: float, spec: MeasurementSpec, step: float):
    def dist_at(ph: float) -> OutcomeDistribution:
        sigma, d = encoded_moments(p, ph)
        return outcome_distribution(GaussianMoments(sigma, d), spec)

    d0 = dist_at(phi)
    dp = dist_at(phi + step)
    dm = dist_at(phi - step)

    def integrand(y: np.ndarray) -> np.ndarray:
        p0 = d0.density(y)
        dpdphi = (dp.density(y) - dm.density(y)) / (2.0 * step)
        return dpdphi * dpdphi / p0

    return d0, integrand


def numeric_fi_oracle(
    p: StateParams, phi: float, spec: MeasurementSpec, step: float = 1e-5
) -> float:
    """FI via direct quadrature of (d_phi p)^2 / p with central differences.

    Independent of `gaussian_fi`: evaluates the outcome densities at
    phi +- step and integrates over a +-8 sigma box.
    """
    d0, integrand = _fi_integrand_1d(p, phi, spec, step)
    if d0.dim == 1:
        mu = float(d0.mean[0])
        sd = math.sqrt(float(d0.cov[0, 0]))
        lo, hi = mu - 8.0 * sd, mu + 8.0 * sd
        estimates = []
        for order in (96, 160, 256):
            nodes, weights = np.polynomial.legendre.leggauss(order)
            y = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            estimates.append(0.5 * (hi - lo) * float(weights @ integrand(y)))
            if len(estimates) >= 2 and _close(estimates[-1], estimates[-2]):
                return estimates[-1]
        raise NumericFailureError("1-D FI quadrature did not converge")
    # 2-D: integrate in the principal axes of the outcome covariance.
    evals, evecs = np.linalg.eigh(d0.cov)
    scale = evecs * np.sqrt(evals)
    jac = float(np.prod(np.sqrt(evals)))
    estimates = []
    for order in (96, 144, 200):
        nodes, weights = np.polynomial.legendre.leggauss(order)
        u = 8.0 * nodes
        w = 8.0 * weights
        ux, uy = np.meshgrid(u, u, indexing="ij")
        pts = np.stack([ux, uy], axis=-1) @ scale.T + d0.mean
        vals = integrand(pts)
        estimates.append(jac * float(w @ vals @ w))
        if len(estimates) >= 2 and _close(estimates[-1], estimates[-2]):
            return estimates[-1]
    raise NumericFailureError("2-D FI quadrature did not converge")


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-8 * max(abs(a), abs(b), 1e-3)


def qfi(p: StateParams) -> float:
    """Quantum Fisher information of the phase-encoded state (phi-independent)."""
    n = p.n_th
    coef = 2.0 * (2.0 * n + 1.0) ** 2 / (2.0 * n * n + 2.0 * n + 1.0)
    phase = p.theta_s - 2.0 * p.theta_c
    mod = abs(
        math.cosh(p.r)
        - complex(math.cos(phase), math.sin(phase)) * math.sinh(p.r)
    )
    return coef * math.sinh(2.0 * p.r) ** 2 + 4.0 * p.alpha_mag**2 / (
        2.0 * n + 1.0
    ) * mod * mod


# ---------------------------------------------------------------------------
# Closed-form optimal Gaussian measurements
# ---------------------------------------------------------------------------


def _fi_type1(a: float, r: float, n: float) -> float:
    return 4.0 * math.exp(2.0 * r) * a * a / (2.0 * n + 1.0)


def _fi_type2(a: float, r: float, n: float) -> float:
    if r <= 0.0:
        raise UndefinedTypeError("type-II requires r > 0")
    nu = 2.0 * n + 1.0
    num = 2.0 * nu * math.sinh(2.0 * r) + (1.0 + 1.0 / math.tanh(2.0 * r)) * a * a
    return num * num / (2.0 * nu * nu)


def _type3_discriminant(a: float, r: float, n: float) -> float:
    nu = 2.0 * n + 1.0
    return nu**3 * math.sinh(2.0 * r) ** 2 + 4.0 * n * (n + 1.0) * math.exp(
        2.0 * r
    ) * a * a


def _fi_type3(a: float, r: float, n: float) -> float:
    if r <= 0.0:
        raise UndefinedTypeError("type-III requires r > 0")
    if n <= 0.0:
        raise UndefinedTypeError("type-III is indeterminate at n_th = 0")
    nu = 2.0 * n + 1.0
    sh = math.sinh(2.0 * r)
    e2r = math.exp(2.0 * r)
    lead = (
        nu**2 * (2.0 * n * n + 2.0 * n + 1.0) * sh * sh
        + 2.0 * n * (n + 1.0) * nu * e2r * a * a
    )
    root = nu**1.5 * sh * math.sqrt(_type3_discriminant(a, r, n))
    return (lead - root) / (2.0 * n * n * (n + 1.0) ** 2)


def _s_opt(a: float, r: float, n: float) -> float:
    if r <= 0.0:
        raise UndefinedTypeError("type-III requires r > 0")
    nu = 2.0 * n + 1.0
    sh = math.sinh(2.0 * r)
    e2r = math.exp(2.0 * r)
    denom = nu**3 * sh * sh - e2r * a * a
    if denom <= 0.0:
        raise NoRealSolutionError("no real optimal seed squeezing for this state")
    num = nu * e2r**2 * a * a + nu**1.5 * e2r * sh * math.sqrt(
        _type3_discriminant(a, r, n)
    )
    s = 0.5 * math.log(num / denom)
    if s < 0.0:
        raise NoRealSolutionError("optimal seed squeezing would be negative")
    return s


def _cos_chi_type2(a: float, r: float, n: float) -> float:
    nu = 2.0 * n + 1.0
    coth = 1.0 / math.tanh(2.0 * r)
    num = 4.0 * nu * math.sinh(2.0 * r) + 2.0 * coth * (1.0 + coth) * a * a
    den = 4.0 * nu * math.cosh(2.0 * r) + 2.0 * (1.0 + coth) * a * a
    return num / den


def closed_form_fi(p: StateParams, t: OptimalType) -> float:
    """FI of the closed-form optimal measurement of the given type.

    The expressions depend on (|alpha|, r, n_th) only; attainability by an
    actual measurement additionally assumes the canonical phase relation
    theta_c = (pi + theta_s)/2 and, for type-II, |cos chi| <= 1.
    """
    a, r, n = p.alpha_mag, p.r, p.n_th
    if t is OptimalType.TYPE_I:
        return _fi_type1(a, r, n)
    if t is OptimalType.TYPE_II:
        return _fi_type2(a, r, n)
    _s_opt(a, r, n)  # existence check raises outside the region
    return _fi_type3(a, r, n)


def _is_canonical(p: StateParams) -> bool:
    if p.alpha_mag == 0.0 or p.r == 0.0:
        return True
    gap = reduce_angle(p.theta_c - 0.5 * (math.pi + p.theta_s))
    return min(gap, 2.0 * math.pi - gap) < 1e-9


def optimal_measurement_spec(
    p: StateParams, phi: float, t: OptimalType
) -> MeasurementSpec:
    """Measurement achieving `closed_form_fi(p, t)` for a canonical-phase state.

    Types I/II are homodyne (s marked infinite); type III is general-dyne
    with the optimal finite seed squeezing.
    """
    if not _is_canonical(p):
        raise ValueError(
            "closed-form measurements assume theta_c = (pi + theta_s)/2"
        )
    a, r, n = p.alpha_mag, p.r, p.n_th
    if t is OptimalType.TYPE_I:
        if r == 0.0:
            # Displaced thermal case: homodyne orthogonal to the displacement.
            return MeasurementSpec.homodyne(p.theta_c - phi - 0.5 * math.pi)
        return MeasurementSpec.homodyne(0.5 * p.theta_s - phi)
    if t is OptimalType.TYPE_II:
        if r <= 0.0:
            raise UndefinedTypeError("type-II requires r > 0")
        c = _cos_chi_type2(a, r, n)
        if abs(c) > 1.0 + 1e-12:
            raise NoRealSolutionError("no real homodyne angle: |cos chi| > 1")
        chi = math.acos(min(1.0, max(-1.0, c)))
        return MeasurementSpec.homodyne(0.5 * (p.theta_s - 2.0 * phi - chi))
    s = _s_opt(a, r, n)
    target = _fi_type3(a, r, n)
    # Seed squeezing aligned with the encoded squeezing phase.
    cand = MeasurementSpec.general_dyne(s, p.theta_s - 2.0 * phi)
    err = abs(gaussian_fi(p, phi, cand) - target)
    if err > 1e-9 * max(target, 1.0):
        raise NoRealSolutionError(
            "type-III spec does not reproduce its closed-form FI"
        )
    return cand


def type_boundaries(n_th: float) -> dict[str, float]:
    """Region boundaries in the reduced displacement |alpha~|.

    Keys: "II" (largest |alpha~| with a real type-II angle), "III" (largest
    |alpha~| with a real optimal seed), "II_III" (crossover between the two;
    NaN where type II never wins).
    """
    nu = 1.0 + 2.0 * n_th
    out = {"II": math.sqrt(2.0 * nu), "III": nu**1.5}
    if n_th > 0.0:
        arg = nu * (1.0 - (math.sqrt(2.0) - 1.0) * nu) / n_th
        out["II_III"] = math.sqrt(arg) if arg >= 0.0 else math.nan
    else:
        out["II_III"] = math.inf
    return out


def critical_thermal_photon_number() -> float:
    """n_th where the three region boundaries coincide (at |alpha~| = 2^(3/4)).

    Solves sqrt(2*(1+2n)) = (1+2n)^(3/2), i.e. (1+2n)^2 = 2.
    """
    return 0.5 * (math.sqrt(2.0) - 1.0)


def reduced_displacement(p: StateParams) -> float:
    """|alpha~| = |alpha| / (exp(-r) sinh 2r); requires r > 0."""
    if p.r <= 0.0:
        raise ValueError("reduced displacement requires r > 0")
    return p.alpha_mag / (math.exp(-p.r) * math.sinh(2.0 * p.r))


def classify_optimal_type(
    p: StateParams, tie_rel_tol: float = 1e-9
) -> tuple[OptimalType, ...]:
    """Which closed-form types achieve the maximal Gaussian FI; ties reported."""
    if p.r <= 0.0:
        return (OptimalType.TYPE_I,)
    a, r, n = p.alpha_mag, p.r, p.n_th
    values: dict[OptimalType, float] = {OptimalType.TYPE_I: _fi_type1(a, r, n)}
    if abs(_cos_chi_type2(a, r, n)) <= 1.0 + 1e-12:
        values[OptimalType.TYPE_II] = _fi_type2(a, r, n)
    if n > 0.0:
        try:
            _s_opt(a, r, n)
        except NoRealSolutionError:
            pass
        else:
            values[OptimalType.TYPE_III] = _fi_type3(a, r, n)
    best = max(values.values())
    ties = tuple(
        t
        for t in OptimalType
        if t in values and values[t] >= best * (1.0 - tie_rel_tol)
    )
    return ties


def optimize_gaussian_fi(p: StateParams, phi: float) -> BoundReport:
    """Numerically maximize the Gaussian FI over measurement parameters.

    Coarse grid over homodyne angles and general-dyne (s, psi), followed by
    derivative-free local refinement; the report carries the achieving
    measurement and the FI/QFI ratio.
    """
    h = qfi(p)

    # Homodyne branch: 1-D over the quadrature angle.
    angles = np.linspace(0.0, math.pi, 64, endpoint=False)
    homo_vals = [
        gaussian_fi(p, phi, MeasurementSpec.homodyne(th)) for th in angles
    ]
    i_best = int(np.argmax(homo_vals))
    step = math.pi / 64.0

    def neg_homo(th: float) -> float:
        return -gaussian_fi(p, phi, MeasurementSpec.homodyne(th))

    res = minimize_scalar(
        neg_homo,
        bounds=(angles[i_best] - step, angles[i_best] + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    homo_fi = -float(res.fun)
    homo_spec = MeasurementSpec.homodyne(float(res.x))

    # General-dyne branch: 2-D over (s, psi).  The seed squeezing is kept
    # moderate: beyond s ~ 6 the outcome covariance is ill-conditioned and
    # the branch only reproduces the homodyne limit with extra roundoff.
    s_grid = np.linspace(0.0, 6.0, 41)
    psi_grid = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    gd_best = (-math.inf, 0.0, 0.0)
    for s in s_grid:
        for psi in psi_grid:
            val = gaussian_fi(p, phi, MeasurementSpec.general_dyne(s, psi))
            if val > gd_best[0]:
                gd_best = (val, float(s), float(psi))

    def neg_gd(x: np.ndarray) -> float:
        s = min(max(float(x[0]), 0.0), float(s_grid[-1]))
        return -gaussian_fi(p, phi, MeasurementSpec.general_dyne(s, float(x[1])))

    res = minimize(
        neg_gd,
        x0=np.array(gd_best[1:]),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000},
    )
    gd_fi = -float(res.fun)
    gd_spec = MeasurementSpec.general_dyne(
        min(max(float(res.x[0]), 0.0), float(s_grid[-1])), float(res.x[1])
    )

    # A true general-dyne optimum is interior (finite s) and beats homodyne
    # by a finite margin; a marginal "win" is the homodyne limit plus noise.
    if gd_fi > homo_fi * (1.0 + 1e-8):
        fi, spec = gd_fi, gd_spec
    else:
        fi, spec = homo_fi, homo_spec

    ratio = 1.0 if h <= 0.0 else min(fi / h, 1.0)
    return BoundReport(fi, h, ratio, spec, _match_type(p, fi))


def _match_type(p: StateParams, fi: float, rel_tol: float = 1e-6) -> OptimalType | None:
    if not _is_canonical(p):
        return None
    matches: list[tuple[float, OptimalType]] = []
    for t in OptimalType:
        try:
            cf = closed_form_fi(p, t)
        except (UndefinedTypeError, NoRealSolutionError):
            continue
        if (
            t is OptimalType.TYPE_II
            and p.r > 0.0
            and abs(_cos_chi_type2(p.alpha_mag, p.r, p.n_th)) > 1.0 + 1e-12
        ):
            continue
        if abs(fi - cf) <= rel_tol * max(cf, 1e-300):
            # Prefer the finite-s type on ties for reproducibility.
            s_pref = 0.0 if t is OptimalType.TYPE_III else math.inf
            matches.append((s_pref, t))
    if not matches:
        return None
    matches.sort(key=lambda item: (item[0], item[1].value))
    return matches[0][1]


# ---------------------------------------------------------------------------
# Scalar diagnostics
# ---------------------------------------------------------------------------


def sql_threshold(n_th: float) -> float:
    """sinh^2 r above which a squeezed thermal probe beats the 4N benchmark."""
    if n_th < 0.0:
        raise ValueError(f"n_th must be >= 0, got {n_th}")
    n = n_th
    root = math.sqrt(1.0 + 4.0 * n * (n + 1.0) * (n * n + n + 3.0))
    return (2.0 * n * n - 2.0 * n - 1.0 + root) / (4.0 * (2.0 * n + 1.0))


def is_nonclassical_sts(r: float, n_th: float) -> bool:
    """Nonclassicality predicate for squeezed thermal states."""
    if r < 0.0 or n_th < 0.0:
        raise ValueError("r and n_th must be >= 0")
    return math.exp(-2.0 * r) * (2.0 * n_th + 1.0) < 1.0


def qfi_turnaround_alpha(r: float, n_th: float) -> float:
    """|alpha| at which the QFI stops growing with n_th at fixed r."""
    if r <= 0.0:
        raise ValueError("turnaround displacement requires r > 0")
    nu = 2.0 * n_th + 1.0
    poly = 1.0 + 2.0 * n_th * (n_th + 1.0)
    return math.sinh(2.0 * r) * math.exp(-r) * nu**1.5 / (math.sqrt(2.0) * poly)
