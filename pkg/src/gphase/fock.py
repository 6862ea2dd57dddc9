"""Truncated Fock-basis oracle for density matrices, POVMs and SLD operators.

Everything here is deliberately independent of the closed-form moment
machinery: states are assembled from matrix exponentials of the truncated
ladder operators, so agreement between this module and the Gaussian
formulas is evidence for both.

Truncation edges are noisy; norm comparisons exclude the last
ceil(cutoff/5) rows and columns (see `converged_block`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .measurement import MeasurementKind, MeasurementSpec
from .states import StateParams, rotation_matrix


class CutoffExceededError(RuntimeError):
    """The requested accuracy needs a Fock cutoff above the policy maximum."""


class DecompositionError(RuntimeError):
    """Operator is not quadratic in the quadratures to the required accuracy."""


@dataclass(frozen=True)
class FockOperator:
    """Complex matrix on the truncated number basis |0> .. |cutoff-1>."""

    matrix: np.ndarray
    cutoff: int

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (self.cutoff, self.cutoff):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match cutoff {self.cutoff}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class CutoffPolicy:
    target_trace_deficit: float = 1e-10
    max_cutoff: int = 700
    min_cutoff: int = 24

    def __post_init__(self) -> None:
        if not 0.0 < self.target_trace_deficit < 1.0:
            raise ValueError("target_trace_deficit must lie in (0, 1)")


@dataclass(frozen=True)
class ModeOperators:
    """Ladder and quadrature operators on the truncated basis."""

    a: FockOperator
    adag: FockOperator
    x: FockOperator
    p: FockOperator
    n: FockOperator


def build_operators(cutoff: int) -> ModeOperators:
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    a = _ladder(cutoff)
    adag = a.conj().T
    x = (a + adag) / math.sqrt(2.0)
    p = (a - adag) / (1j * math.sqrt(2.0))
    n = np.diag(np.arange(cutoff, dtype=float)).astype(complex)
    return ModeOperators(
        FockOperator(a, cutoff),
        FockOperator(adag, cutoff),
        FockOperator(x, cutoff),
        FockOperator(p, cutoff),
        FockOperator(n, cutoff),
    )


def converged_block(matrix: np.ndarray) -> np.ndarray:
    """Drop the truncation-edge rows/columns (last ceil(dim/5))."""
    dim = matrix.shape[0]
    keep = dim - math.ceil(dim / 5)
    return matrix[:keep, :keep]


# -- primitive operator builders --------------------------------------------


def _ladder(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)


def _recurrence_precision_bits(cutoff: int) -> int:
    """Working precision (bits) for the operator recurrences.

    The two-index recurrences lose roughly half a bit per row; pad
    generously so the float64 result is entrywise exact.
    """
    return 80 + (2 * cutoff) // 3


@lru_cache(maxsize=32)
def _displacement_cached(alpha: complex, cutoff: int) -> np.ndarray:
    import gmpy2

    with gmpy2.context(precision=_recurrence_precision_bits(cutoff)):
        al = gmpy2.mpc(alpha.real, alpha.imag)
        alc = gmpy2.mpc(alpha.real, -alpha.imag)
        sqrt = [gmpy2.sqrt(gmpy2.mpfr(k)) for k in range(cutoff)]
        cols = [[gmpy2.mpc(0)] * cutoff for _ in range(cutoff)]
        col = cols[0]
        col[0] = gmpy2.exp(-(al.real * al.real + al.imag * al.imag) / 2)
        for m in range(1, cutoff):
            col[m] = col[m - 1] * al / sqrt[m]
        for n in range(cutoff - 1):
            prev, cur = cols[n], cols[n + 1]
            inv = 1 / sqrt[n + 1]
            cur[0] = -alc * prev[0] * inv
            for m in range(1, cutoff):
                cur[m] = (sqrt[m] * prev[m - 1] - alc * prev[m]) * inv
    out = np.array(
        [[complex(cols[n][m]) for n in range(cutoff)] for m in range(cutoff)]
    )
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _squeeze_cached(xi: complex, cutoff: int) -> np.ndarray:
    import gmpy2

    with gmpy2.context(precision=_recurrence_precision_bits(cutoff)):
        r = gmpy2.mpfr(abs(xi))
        phase = gmpy2.mpc(xi.real, xi.imag) / r
        eiphi_tanh = phase * gmpy2.tanh(r)
        eiphi_tanh_c = gmpy2.mpc(eiphi_tanh.real, -eiphi_tanh.imag)
        sech = 1 / gmpy2.cosh(r)
        sqrt = [gmpy2.sqrt(gmpy2.mpfr(k)) for k in range(cutoff)]
        cols = [[gmpy2.mpc(0)] * cutoff for _ in range(cutoff)]
        col = cols[0]
        col[0] = gmpy2.sqrt(sech)
        for m in range(2, cutoff, 2):
            col[m] = -col[m - 2] * eiphi_tanh * sqrt[m - 1] / sqrt[m]
        for n in range(1, cutoff):
            cur = cols[n]
            inv = 1 / sqrt[n]
            for m in range(n % 2, cutoff, 2):
                v = gmpy2.mpc(0)
                if m > 0:
                    v += sqrt[m] * sech * cols[n - 1][m - 1]
                if n > 1:
                    v += eiphi_tanh_c * sqrt[n - 1] * cols[n - 2][m]
                cur[m] = v * inv
    out = np.array(
        [[complex(cols[n][m]) for n in range(cutoff)] for m in range(cutoff)]
    )
    out.setflags(write=False)
    return out


def displacement_operator(alpha: complex, cutoff: int) -> np.ndarray:
    """Matrix elements <m|D(alpha)|n>, entrywise accurate at any index.

    Column 0 is the coherent state; later columns follow from
    D a^dag D^dag = a^dag - conj(alpha):
    <m|D|n+1> = (sqrt(m) <m-1|D|n> - conj(alpha) <m|D|n>) / sqrt(n+1).
    The recurrence mixes growing and decaying solutions, so it runs in
    extended precision sized to the cutoff (see
    `_recurrence_precision_bits`).
    """
    alpha = complex(alpha)
    if alpha == 0.0:
        return np.eye(cutoff, dtype=complex)
    return _displacement_cached(alpha, cutoff)


def squeeze_operator(xi: complex, cutoff: int) -> np.ndarray:
    """Matrix elements <m|S(xi)|n>, entrywise accurate at any index.

    Built from the parity-preserving two-index recurrence
    <m|S|n> = (sqrt(m) sech(r) <m-1|S|n-1>
               + conj(e^{i theta} tanh r) sqrt(n-1) <m|S|n-2>) / sqrt(n)
    seeded by the squeezed vacuum column, in extended precision (the
    recurrence mixes growing and decaying solutions).
    """
    xi = complex(xi)
    if xi == 0.0:
        return np.eye(cutoff, dtype=complex)
    return _squeeze_cached(xi, cutoff)


def rotation_operator(phi: float, cutoff: int) -> np.ndarray:
    return np.diag(np.exp(-1j * phi * np.arange(cutoff))).astype(complex)


def position_eigenvector(x: float, cutoff: int) -> np.ndarray:
    """Number-basis amplitudes of the (improper) position eigenstate |x>."""
    vec = np.empty(cutoff)
    vec[0] = math.pi ** (-0.25) * math.exp(-0.5 * x * x)
    if cutoff > 1:
        vec[1] = math.sqrt(2.0) * x * vec[0]
    for n in range(2, cutoff):
        vec[n] = x * math.sqrt(2.0 / n) * vec[n - 1] - math.sqrt(
            (n - 1) / n
        ) * vec[n - 2]
    return vec


# -- state assembly ----------------------------------------------------------


def _thermal_probs(n_th: float, cutoff: int) -> np.ndarray:
    if n_th == 0.0:
        probs = np.zeros(cutoff)
        probs[0] = 1.0
        return probs
    q = n_th / (1.0 + n_th)
    return (q ** np.arange(cutoff)) / (1.0 + n_th)


def _initial_cutoff(p: StateParams, policy: CutoffPolicy) -> int:
    if p.n_th > 0.0:
        q = p.n_th / (1.0 + p.n_th)
        tail = math.log(policy.target_trace_deficit) / math.log(q)
        thermal_levels = int(math.ceil(tail)) + 1
    else:
        thermal_levels = 0
    mean_n = (
        p.n_th
        + (2.0 * p.n_th + 1.0) * math.sinh(p.r) ** 2
        + p.alpha_mag**2
    )
    spread = 8.0 * (mean_n + 2.0 * math.sqrt(mean_n + 1.0)) + 10.0
    guess = int(math.ceil(1.5 * thermal_levels + spread))
    return max(policy.min_cutoff, min(guess, policy.max_cutoff))


def _encoded_frame(p: StateParams, phi: float, cutoff: int) -> np.ndarray:
    """Unitary mapping number states to the phase-encoded eigenvectors."""
    return (
        rotation_operator(phi, cutoff)
        @ displacement_operator(p.alpha, cutoff)
        @ squeeze_operator(p.xi, cutoff)
    )


@lru_cache(maxsize=64)
def _state_ensemble(
    p: StateParams, phi: float, policy: CutoffPolicy
) -> tuple[np.ndarray, np.ndarray, int]:
    """Eigenvectors (columns) and eigenvalues of the phase-encoded state."""
    cutoff = _initial_cutoff(p, policy)
    while True:
        u = _encoded_frame(p, phi, cutoff)
        probs = _thermal_probs(p.n_th, cutoff)
        trace = float(np.sum(probs * np.sum(np.abs(u) ** 2, axis=0)))
        if 1.0 - trace < policy.target_trace_deficit:
            u.setflags(write=False)
            probs.setflags(write=False)
            return u, probs, cutoff
        if cutoff >= policy.max_cutoff:
            raise CutoffExceededError(
                f"trace deficit {1.0 - trace:.3e} at cutoff {cutoff}"
            )
        cutoff = min(policy.max_cutoff, int(math.ceil(cutoff * 1.3)) + 1)


def build_density_matrix(
    p: StateParams, phi: float, policy: CutoffPolicy = CutoffPolicy()
) -> FockOperator:
    """Density matrix of the phase-encoded displaced squeezed thermal state."""
    u, probs, cutoff = _state_ensemble(p, phi, policy)
    rho = (u * probs) @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return FockOperator(rho, cutoff)


def phase_derivative(rho: FockOperator) -> FockOperator:
    """d rho / d phi = -i [n, rho], exact on the truncated basis."""
    n = np.arange(rho.cutoff)
    mat = -1j * (n[:, None] * rho.matrix - rho.matrix * n[None, :])
    return FockOperator(mat, rho.cutoff)


# -- SLD operators -----------------------------------------------------------


def _spectral_matrix(p: StateParams, phi: float, cutoff: int) -> np.ndarray:
    """Spectral-route SLD matrix at a fixed Fock cutoff."""
    n = np.arange(cutoff)
    u = _encoded_frame(p, phi, cutoff)
    if p.n_th == 0.0:
        probs = _thermal_probs(p.n_th, cutoff)
        rho = (u * probs) @ u.conj().T
        mat = -2j * (n[:, None] * rho - rho * n[None, :])
    else:
        # In the eigenbasis, <j|drho|k> = -i (p_k - p_j) <psi_j|N|psi_k>, so
        # the SLD core is -2i <psi_j|N|psi_k> (p_k - p_j)/(p_j + p_k).  The
        # eigenvalue ratio depends only on j - k for a thermal spectrum and
        # is evaluated as a tanh, which stays finite deep in the tail where
        # naive division by p_j + p_k would amplify roundoff.
        #
        # The overlap matrix is the number operator conjugated into the
        # eigenframe.  That conjugation is affine on the ladder operators,
        # so the result is a pentadiagonal matrix whose entries are written
        # down exactly; computing it as u^dag N u instead would corrupt the
        # high-index entries (the product needs intermediate states beyond
        # the cutoff there), and those feed back into the low-index block
        # of the SLD with O(cutoff) weight.
        half_log_q = 0.5 * math.log(p.n_th / (1.0 + p.n_th))
        ratio = np.tanh((n[None, :] - n[:, None]) * half_log_q)
        ch, sh = math.cosh(p.r), math.sinh(p.r)
        e_ts = cmath.exp(1j * p.theta_s)
        alpha = p.alpha
        a = _ladder(cutoff)
        adag = a.conj().T
        overlaps = np.diag(
            ch * ch * n + sh * sh * (n + 1.0) + abs(alpha) ** 2
        ).astype(complex)
        overlaps -= ch * sh * (e_ts * (adag @ adag) + np.conj(e_ts) * (a @ a))
        overlaps += (ch * alpha - sh * e_ts * np.conj(alpha)) * adag
        overlaps += (ch * np.conj(alpha) - sh * np.conj(e_ts) * alpha) * a
        core = -2j * overlaps * ratio
        mat = u @ core @ u.conj().T
    return 0.5 * (mat + mat.conj().T)


def sld_spectral(
    p: StateParams, phi: float, policy: CutoffPolicy = CutoffPolicy()
) -> FockOperator:
    """SLD assembled from the spectral decomposition of the state.

    For n_th = 0 the mixed-state sum degenerates and the pure-state rule
    L = 2 d rho/d phi is used instead.

    The defining equation drho/dphi = (L rho + rho L)/2 holds to machine
    precision at the working cutoff, but the eigenvector sum converges
    slowly entrywise when the state is squeezed: only a low-index block
    matches the infinite-dimensional SLD.  Use `sld_spectral_convergence`
    to obtain the size of that block.
    """
    _, _, cutoff = _state_ensemble(p, phi, policy)
    return FockOperator(_spectral_matrix(p, phi, cutoff), cutoff)


@dataclass(frozen=True)
class SpectralSLDReport:
    """Spectral-route SLD plus the size of its entrywise-converged block."""

    operator: FockOperator
    converged_dim: int


def sld_spectral_convergence(
    p: StateParams,
    phi: float,
    policy: CutoffPolicy = CutoffPolicy(),
    tol: float = 1e-8,
) -> SpectralSLDReport:
    """Spectral SLD with an honest estimate of its converged sub-block.

    The eigenvector sum truncated at the working cutoff leaves an
    exponentially small but index-dependent tail error.  The converged
    dimension is measured by recomputing the matrix with 25% more
    eigenvectors and keeping the largest leading block on which both runs
    agree to `tol` (absolute, relative to the block's largest entry).
    """
    _, _, cutoff = _state_ensemble(p, phi, policy)
    full = _spectral_matrix(p, phi, cutoff)
    op = FockOperator(full, cutoff)
    if p.n_th == 0.0:
        return SpectralSLDReport(op, converged_block(full).shape[0])
    enlarged = _spectral_matrix(p, phi, cutoff + max(8, cutoff // 4))
    diff = np.abs(full - enlarged[:cutoff, :cutoff])
    mags = np.abs(full)
    converged = 0
    worst = 0.0
    scale = 1.0
    for k in range(cutoff):
        worst = max(worst, float(diff[k, : k + 1].max()), float(diff[: k + 1, k].max()))
        scale = max(scale, float(mags[k, : k + 1].max()), float(mags[: k + 1, k].max()))
        if worst <= tol * scale:
            converged = k + 1
        else:
            break
    return SpectralSLDReport(op, converged)


def _sld_coefficient(n_th: float, r: float) -> float:
    return (2.0 * n_th + 1.0) * math.sinh(2.0 * r) / (
        2.0 * n_th * n_th + 2.0 * n_th + 1.0
    )


def sld_closed_form(
    p: StateParams, phi: float, policy: CutoffPolicy = CutoffPolicy()
) -> FockOperator:
    """SLD from the closed-form product-quadrature construction.

    For r = 0 this reduces to a rotated quadrature; for r = alpha = 0 the
    state is phase-invariant and the SLD vanishes.
    """
    _, _, cutoff = _state_ensemble(p, phi, policy)
    if p.r == 0.0 and p.alpha_mag == 0.0:
        return FockOperator(np.zeros((cutoff, cutoff), dtype=complex), cutoff)
    if p.r == 0.0:
        angle = p.theta_c - phi - 0.5 * math.pi
        rot = rotation_operator(angle, cutoff)
        x = build_operators(cutoff).x.matrix
        mat = (
            2.0
            * math.sqrt(2.0)
            * p.alpha_mag
            / (2.0 * p.n_th + 1.0)
            * (rot.conj().T @ x @ rot)
        )
        return FockOperator(mat, cutoff)
    coef = _sld_coefficient(p.n_th, p.r)
    alpha = p.alpha
    e_ts = complex(math.cos(p.theta_s), math.sin(p.theta_s))
    zeta = alpha * math.cosh(2.0 * p.r) + np.conj(alpha) * e_ts * (
        math.sinh(2.0 * p.r) + 1.0 / (coef * (2.0 * p.n_th + 1.0))
    )
    const = (
        2.0
        * p.alpha_mag**2
        / (coef * (2.0 * p.n_th + 1.0) ** 2)
        * math.sin(2.0 * p.theta_c - p.theta_s)
    )
    # Conjugating XP + PX by the frame U = R(phi) S(2 xi) D(zeta) R(-ts/2)
    # is evaluated through the exact affine Heisenberg action of U on the
    # quadratures: much cheaper and more accurate than truncated matrix
    # exponentials of the frame itself.
    ch, sh = math.cosh(2.0 * p.r), math.sinh(2.0 * p.r)
    cs, ss = math.cos(p.theta_s), math.sin(p.theta_s)
    squeeze_action = ch * np.eye(2) - sh * np.array([[cs, ss], [ss, -cs]])
    lin_map = (
        rotation_matrix(phi) @ squeeze_action @ rotation_matrix(-0.5 * p.theta_s)
    )
    shift = (
        rotation_matrix(phi)
        @ squeeze_action
        @ (math.sqrt(2.0) * np.array([zeta.real, zeta.imag]))
    )
    inv = np.linalg.inv(lin_map)
    w = -inv @ shift
    ops = build_operators(cutoff)
    q = (ops.x.matrix, ops.p.matrix)
    quad = sum(
        inv[0, i] * inv[1, j] * (q[i] @ q[j] + q[j] @ q[i])
        for i in range(2)
        for j in range(2)
    )
    lin = sum((w[1] * inv[0, i] + w[0] * inv[1, i]) * 2.0 * q[i] for i in range(2))
    mat = coef * (quad + lin + 2.0 * w[0] * w[1] * np.eye(cutoff))
    mat += const * np.eye(cutoff)
    mat = 0.5 * (mat + mat.conj().T)
    return FockOperator(mat, cutoff)


def _oversampled_block(build, cutoff: int, tol: float = 1e-10) -> np.ndarray:
    """Top-left cutoff-block of `build(dim)`, with dim doubled until stable.

    Matrix exponentials of truncated generators are inaccurate near the
    truncation edge; the returned block has converged to `tol` (absolute,
    relative to its largest entry).
    """
    prev = build(2 * cutoff)[:cutoff, :cutoff]
    dim = 4 * cutoff
    while dim <= 64 * cutoff:
        cur = build(dim)[:cutoff, :cutoff]
        scale = max(float(np.abs(cur).max()), 1.0)
        if float(np.abs(cur - prev).max()) <= tol * scale:
            return cur
        prev = cur
        dim *= 2
    raise CutoffExceededError("oversampled operator block did not converge")


def _sld_ladder_form(p: StateParams, phi: float, cutoff: int) -> np.ndarray:
    """SLD via the raw ladder-operator combination, for cross-validation."""
    e_ts = complex(math.cos(p.theta_s), math.sin(p.theta_s))
    alpha = p.alpha
    lin = (
        2.0
        / (2.0 * p.n_th + 1.0)
        * (np.conj(alpha) * math.cosh(p.r) - alpha * np.conj(e_ts) * math.sinh(p.r))
    )
    coef = _sld_coefficient(p.n_th, p.r)

    def build(big: int) -> np.ndarray:
        ops = build_operators(big)
        a = ops.a.matrix
        adag = ops.adag.matrix
        core = (
            1j * lin * a
            - 1j * np.conj(lin) * adag
            + 1j * coef * e_ts * (adag @ adag)
            - 1j * coef * np.conj(e_ts) * (a @ a)
        )
        frame = (
            rotation_operator(phi, big)
            @ displacement_operator(alpha, big)
            @ squeeze_operator(p.xi, big)
        )
        return frame @ core @ frame.conj().T

    mat = _oversampled_block(build, cutoff)
    return 0.5 * (mat + mat.conj().T)


def qfi_from_sld(rho: FockOperator, sld: FockOperator) -> float:
    """Tr[rho L^2]; raises if a non-negligible imaginary part appears."""
    if rho.cutoff != sld.cutoff:
        raise ValueError("rho and L live on different cutoffs")
    val = complex(np.trace(rho.matrix @ sld.matrix @ sld.matrix))
    if abs(val.imag) > 1e-10 * max(abs(val.real), 1.0):
        raise ValueError(f"Tr[rho L^2] is not real: {val}")
    return val.real


def sld_quadratic_decomposition(
    sld: FockOperator,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Extract (L0, L1, L2) with L = L0 + L1.Q + Q^T L2 Q, Q = (X, P).

    Least squares against the operator basis {I, X, P, X^2, P^2, XP+PX}.
    The fit uses a small low-index block, where truncated-basis matrix
    elements are accurate; a quadratic operator is already fully determined
    there.  A residual beyond 1e-8 (relative) means the operator is not
    quadratic in the quadratures.
    """
    cutoff = sld.cutoff
    ops = build_operators(cutoff)
    x, p = ops.x.matrix, ops.p.matrix
    basis = [
        np.eye(cutoff, dtype=complex),
        x,
        p,
        x @ x,
        p @ p,
        x @ p + p @ x,
    ]
    keep = min(converged_block(sld.matrix).shape[0], 24)
    cols = [b[:keep, :keep].ravel() for b in basis]
    target = sld.matrix[:keep, :keep].ravel()
    design = np.stack(cols, axis=1)
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    fit = design @ coeffs
    scale = max(float(np.linalg.norm(target)), 1.0)
    if float(np.linalg.norm(target - fit)) > 1e-8 * scale:
        raise DecompositionError("operator is not quadratic in the quadratures")
    if float(np.max(np.abs(coeffs.imag))) > 1e-8 * max(
        float(np.max(np.abs(coeffs))), 1.0
    ):
        raise DecompositionError("non-Hermitian quadratic coefficients")
    c = coeffs.real
    l0 = float(c[0])
    l1 = np.array([c[1], c[2]])
    l2 = np.array([[c[3], c[5]], [c[5], c[4]]])
    return l0, l1, l2


# -- POVM probabilities ------------------------------------------------------


def povm_probability(
    rho: FockOperator,
    spec: MeasurementSpec,
    y: np.ndarray,
    policy: CutoffPolicy = CutoffPolicy(),
) -> float:
    """(1/pi) Tr[D(mu) Pi0 D(mu)^dag rho] at the quadrature outcome y.

    mu = (y1 + i y2)/sqrt(2); the quadrature-frame outcome density of the
    closed-form Gaussian statistics equals half this value (Jacobian of
    mu -> y).
    """
    if spec.kind is not MeasurementKind.GENERAL_DYNE:
        raise ValueError("POVM probabilities are defined for general-dyne specs")
    y = np.asarray(y, dtype=float)
    cutoff = rho.cutoff
    mu = complex(y[0], y[1]) / math.sqrt(2.0)
    xi = spec.s * complex(math.cos(spec.psi), math.sin(spec.psi))
    vec = _displaced_squeezed_vacuum(mu, xi, cutoff)
    val = float(np.real(vec.conj() @ rho.matrix @ vec)) / math.pi
    return max(val, 0.0)


def _displaced_squeezed_vacuum(mu: complex, xi: complex, cutoff: int) -> np.ndarray:
    """Number-basis amplitudes of D(mu) S(xi) |0>.

    The state is annihilated by (a - mu) cosh r + e^{i theta}(a^dag -
    conj(mu)) sinh r, which gives a three-term recurrence for the
    amplitudes; it is run forwards, which is stable because the wanted
    solution is the dominant one.
    """
    r = abs(xi)
    ch = math.cosh(r)
    eth_sh = (xi / r) * math.sinh(r) if r > 0.0 else 0.0j
    c = np.zeros(cutoff, dtype=complex)
    c[0] = cmath.exp(
        -0.5 * abs(mu) ** 2 - 0.5 * np.conj(mu) ** 2 * eth_sh / ch
    ) / math.sqrt(ch)
    drive = mu * ch + np.conj(mu) * eth_sh
    for n in range(cutoff - 1):
        val = drive * c[n]
        if n > 0:
            val -= eth_sh * math.sqrt(n) * c[n - 1]
        c[n + 1] = val / (ch * math.sqrt(n + 1))
    return c


# -- homodyne-optimality check for squeezed vacuum ---------------------------


@dataclass(frozen=True)
class HomodyneOptimalityReport:
    x_grid: np.ndarray
    values: np.ndarray
    closed_form: np.ndarray
    max_abs_imag: float
    max_abs_real_dev: float


def svs_homodyne_optimality_check(
    r: float,
    phi: float,
    x_grid: np.ndarray,
    theta_s: float = 0.0,
    cutoff: int = 160,
) -> HomodyneOptimalityReport:
    """Overlap Tr[rho Pi_x L] for a squeezed vacuum probe and its homodyne.

    The homodyne angle satisfies cos(chi) = tanh(2r); the overlap must be
    real (that reality is what makes the homodyne optimal) with real part
    -2 sqrt(2) sinh(2r) exp(-x^2 cosh 2r)(2 x^2 cosh 2r - 1)
    sqrt(cosh 2r) / sqrt(2 pi).
    """
    if r <= 0.0:
        raise ValueError("squeezed-vacuum check requires r > 0")
    x_grid = np.asarray(x_grid, dtype=float)
    chi = math.acos(math.tanh(2.0 * r))
    psi_meas = theta_s - 2.0 * phi - chi
    theta = 0.5 * psi_meas
    xi = r * complex(math.cos(theta_s), math.sin(theta_s))
    sq = squeeze_operator(xi, cutoff)
    rot = rotation_operator(phi, cutoff)
    psi_vec = rot @ sq[:, 0]
    a = _ladder(cutoff)
    adag = a.conj().T
    e_ts = complex(math.cos(theta_s), math.sin(theta_s))
    core = 1j * (e_ts * (adag @ adag) - np.conj(e_ts) * (a @ a))
    sld = 2.0 * math.sinh(2.0 * r) * (rot @ sq @ core @ sq.conj().T @ rot.conj().T)
    l_psi = sld @ psi_vec
    phases = np.exp(1j * theta * np.arange(cutoff))
    values = np.empty(x_grid.shape, dtype=complex)
    for i, x in enumerate(x_grid):
        u = phases * position_eigenvector(x, cutoff)
        values[i] = (u.conj() @ l_psi) * (psi_vec.conj() @ u)
    ch = math.cosh(2.0 * r)
    closed = (
        -2.0
        * math.sqrt(2.0)
        * math.sinh(2.0 * r)
        * np.exp(-x_grid**2 * ch)
        * (2.0 * x_grid**2 * ch - 1.0)
        * math.sqrt(ch)
        / math.sqrt(2.0 * math.pi)
    )
    return HomodyneOptimalityReport(
        x_grid=x_grid,
        values=values,
        closed_form=closed,
        max_abs_imag=float(np.max(np.abs(values.imag))),
        max_abs_real_dev=float(np.max(np.abs(values.real - closed))),
    )
