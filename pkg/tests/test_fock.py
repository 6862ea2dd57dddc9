import math

import numpy as np
import pytest

from gphase.fock import (
    CutoffExceededError,
    CutoffPolicy,
    DecompositionError,
    FockOperator,
    build_density_matrix,
    build_operators,
    converged_block,
    displacement_operator,
    phase_derivative,
    position_eigenvector,
    povm_probability,
    qfi_from_sld,
    sld_closed_form,
    sld_quadratic_decomposition,
    sld_spectral,
    sld_spectral_convergence,
    squeeze_operator,
    svs_homodyne_optimality_check,
    _displaced_squeezed_vacuum,
)
from gphase.measurement import MeasurementSpec, outcome_distribution
from gphase.states import StateParams, apply_phase_shift, params_to_moments


def _moments_from_rho(rho: FockOperator):
    """First and second quadrature moments of a Fock-basis density matrix."""
    ops = build_operators(rho.cutoff)
    x, p = ops.x.matrix, ops.p.matrix
    d = np.array(
        [np.trace(rho.matrix @ x).real, np.trace(rho.matrix @ p).real]
    )
    sigma = np.empty((2, 2))
    quads = (x, p)
    for i in range(2):
        for j in range(2):
            sym = 0.5 * (quads[i] @ quads[j] + quads[j] @ quads[i])
            sigma[i, j] = np.trace(rho.matrix @ sym).real - d[i] * d[j]
    return sigma, d


class TestOperators:
    def test_ladder_element(self):
        ops = build_operators(6)
        assert ops.adag.matrix[1, 0] == pytest.approx(1.0, abs=1e-14)

    def test_commutator_on_interior(self):
        ops = build_operators(40)
        comm = ops.x.matrix @ ops.p.matrix - ops.p.matrix @ ops.x.matrix
        interior = comm[:39, :39]
        assert np.allclose(interior, 1j * np.eye(39), atol=1e-13)

    def test_quadrature_identity(self):
        ops = build_operators(40)
        lhs = ops.x.matrix @ ops.x.matrix + ops.p.matrix @ ops.p.matrix
        rhs = 2.0 * ops.n.matrix + np.eye(40)
        assert np.allclose(lhs[:38, :38], rhs[:38, :38], atol=1e-12)


class TestExactOperatorElements:
    def test_displacement_column_zero(self):
        # First column is the coherent state; amplitudes are analytic.
        alpha = 0.7 + 0.4j
        d = displacement_operator(alpha, 30)
        mag = abs(alpha)
        expected = np.exp(-0.5 * mag * mag) * np.array(
            [alpha**n / math.sqrt(math.factorial(n)) for n in range(30)]
        )
        assert np.allclose(d[:, 0], expected, atol=1e-14)

    def test_displacement_unitary_on_decaying_support(self):
        d = displacement_operator(0.6 - 0.3j, 60)
        # Acting on a strongly confined vector, truncation is irrelevant.
        vec = np.zeros(60, dtype=complex)
        vec[:4] = [0.5, 0.5, 0.5, 0.5]
        out = d @ vec
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(vec), abs=1e-12)

    def test_squeeze_column_zero(self):
        xi = 0.5 * np.exp(0.3j)
        s = squeeze_operator(xi, 40)
        r = abs(xi)
        # Even amplitudes of the squeezed vacuum.
        c0 = 1.0 / math.sqrt(math.cosh(r))
        assert s[0, 0] == pytest.approx(c0, abs=1e-14)
        assert np.allclose(s[1::2, 0], 0.0, atol=1e-15)
        ratio = s[2, 0] / s[0, 0]
        expected = -(xi / r) * math.tanh(r) / math.sqrt(2.0)
        assert ratio == pytest.approx(expected, abs=1e-14)

    def test_identity_shortcuts(self):
        assert np.allclose(displacement_operator(0.0, 8), np.eye(8))
        assert np.allclose(squeeze_operator(0.0, 8), np.eye(8))

    def test_displaced_squeezed_vacuum_matches_operator_product(self):
        mu, xi = 0.4 + 0.2j, 0.5 * np.exp(0.8j)
        cutoff = 80
        vec = _displaced_squeezed_vacuum(mu, xi, cutoff)
        ref = (displacement_operator(mu, cutoff) @ squeeze_operator(xi, cutoff))[:, 0]
        assert np.allclose(vec[:40], ref[:40], atol=1e-12)

    def test_position_eigenvector_overlap(self):
        # <x|0> is the vacuum wavefunction pi^{-1/4} exp(-x^2/2).
        x = 0.8
        vec = position_eigenvector(x, 60)
        expected = math.pi ** (-0.25) * math.exp(-0.5 * x * x)
        assert vec[0] == pytest.approx(expected, abs=1e-12)


class TestDensityMatrix:
    def test_vacuum(self):
        rho = build_density_matrix(StateParams(0.0), 0.0)
        expected = np.zeros((rho.cutoff, rho.cutoff))
        expected[0, 0] = 1.0
        assert np.allclose(rho.matrix, expected, atol=1e-14)

    def test_thermal_geometric_law(self):
        rho = build_density_matrix(StateParams(0.0, 0.0, 0.0, 0.0, 1.0), 0.0)
        diag = np.diag(rho.matrix).real
        n = np.arange(rho.cutoff)
        assert np.allclose(diag, 2.0 ** -(n + 1.0), atol=1e-14)
        assert np.allclose(rho.matrix, np.diag(diag), atol=1e-14)

    def test_trace_and_moments(self):
        p = StateParams(0.8, 0.4, 0.6, 1.1, 0.5)
        rho = build_density_matrix(p, 0.3)
        assert 1.0 - float(np.trace(rho.matrix).real) < 1e-10
        assert np.allclose(rho.matrix, rho.matrix.conj().T, atol=1e-13)
        assert float(np.linalg.eigvalsh(rho.matrix)[0]) > -1e-12
        sigma, d = _moments_from_rho(rho)
        m = params_to_moments(apply_phase_shift(p, 0.3))
        assert np.allclose(sigma, m.sigma, atol=1e-8)
        assert np.allclose(d, m.d, atol=1e-8)

    def test_cutoff_exceeded(self):
        policy = CutoffPolicy(max_cutoff=10)
        with pytest.raises(CutoffExceededError):
            build_density_matrix(StateParams(0.0, 0.0, 1.2, 0.0, 2.0), 0.0, policy)

    def test_phase_derivative_matches_finite_difference(self):
        p = StateParams(0.5, 0.2, 0.4, 0.9, 0.3)
        phi, h = 0.3, 1e-5
        rho = build_density_matrix(p, phi)
        drho = phase_derivative(rho)
        plus = build_density_matrix(p, phi + h)
        minus = build_density_matrix(p, phi - h)
        assert plus.cutoff == rho.cutoff == minus.cutoff
        fd = (plus.matrix - minus.matrix) / (2.0 * h)
        assert np.abs(drho.matrix - fd).max() < 1e-8


class TestSLD:
    def test_dts_spectral_matches_closed_form(self):
        p = StateParams(0.7, 0.9, 0.0, 0.0, 0.4)
        rep = sld_spectral_convergence(p, 0.3, tol=1e-10)
        closed = sld_closed_form(p, 0.3)
        k = rep.converged_dim
        assert k > 4
        dev = np.linalg.norm(rep.operator.matrix[:k, :k] - closed.matrix[:k, :k], 2)
        assert dev < 1e-8

    def test_coherent_pure_state_qfi(self):
        p = StateParams(1.0)
        rho = build_density_matrix(p, 0.0)
        sld = sld_spectral(p, 0.0)
        assert qfi_from_sld(rho, sld) == pytest.approx(4.0, rel=1e-8)

    def test_vacuum_sld_vanishes(self):
        p = StateParams(0.0)
        rho = build_density_matrix(p, 0.1)
        sld = sld_closed_form(p, 0.1)
        assert np.abs(sld.matrix).max() == 0.0
        assert qfi_from_sld(rho, sld) == pytest.approx(0.0, abs=1e-12)

    def test_thermal_qfi_zero(self):
        p = StateParams(0.0, 0.0, 0.0, 0.0, 1.0)
        rho = build_density_matrix(p, 0.2)
        assert qfi_from_sld(rho, sld_spectral(p, 0.2)) == pytest.approx(0.0, abs=1e-10)

    def test_sld_traceless_against_state(self):
        p = StateParams(0.5, 0.3, 0.4, 1.1, 0.6)
        rho = build_density_matrix(p, 0.3)
        sld = sld_closed_form(p, 0.3)
        assert abs(np.trace(rho.matrix @ sld.matrix)) < 1e-8

    def test_mismatched_cutoffs_rejected(self):
        rho = FockOperator(np.eye(4, dtype=complex) / 4.0, 4)
        sld = FockOperator(np.zeros((5, 5), dtype=complex), 5)
        with pytest.raises(ValueError):
            qfi_from_sld(rho, sld)


class TestQuadraticDecomposition:
    def test_dts_is_linear(self):
        p = StateParams(0.7, 0.9, 0.0, 0.0, 0.4)
        l0, l1, l2 = sld_quadratic_decomposition(sld_closed_form(p, 0.3))
        assert np.abs(l2).max() < 1e-10
        expected = 2.0 * math.sqrt(2.0) * 0.7 / (2.0 * 0.4 + 1.0)
        assert np.linalg.norm(l1) == pytest.approx(expected, rel=1e-10)

    def test_sts_is_traceless_quadratic(self):
        r, n = 0.5, 0.6
        p = StateParams(0.0, 0.0, r, 0.8, n)
        l0, l1, l2 = sld_quadratic_decomposition(sld_closed_form(p, 0.3))
        assert abs(l0) < 1e-10
        assert np.linalg.norm(l1) < 1e-10
        assert abs(np.trace(l2)) < 1e-10
        coef = (2.0 * n + 1.0) * math.sinh(2.0 * r) / (2.0 * n * n + 2.0 * n + 1.0)
        eigs = np.sort(np.linalg.eigvalsh(l2))
        assert eigs[0] == pytest.approx(-coef, rel=1e-9)
        assert eigs[1] == pytest.approx(coef, rel=1e-9)

    def test_round_trip_of_random_quadratic(self):
        rng = np.random.default_rng(5)
        cutoff = 32
        ops = build_operators(cutoff)
        x, p = ops.x.matrix, ops.p.matrix
        l0 = float(rng.normal())
        l1 = rng.normal(size=2)
        a, b, c = rng.normal(size=3)
        l2 = np.array([[a, c], [c, b]])
        mat = (
            l0 * np.eye(cutoff)
            + l1[0] * x
            + l1[1] * p
            + a * x @ x
            + b * p @ p
            + c * (x @ p + p @ x)
        )
        got = sld_quadratic_decomposition(FockOperator(mat, cutoff))
        assert got[0] == pytest.approx(l0, abs=1e-9)
        assert np.allclose(got[1], l1, atol=1e-9)
        assert np.allclose(got[2], l2, atol=1e-9)

    def test_non_quadratic_rejected(self):
        cutoff = 32
        ops = build_operators(cutoff)
        x = ops.x.matrix
        with pytest.raises(DecompositionError):
            sld_quadratic_decomposition(FockOperator(x @ x @ x, cutoff))


class TestPovm:
    def test_vacuum_heterodyne_at_origin(self):
        rho = build_density_matrix(StateParams(0.0), 0.0)
        val = povm_probability(rho, MeasurementSpec.heterodyne(), np.zeros(2))
        assert val == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_matches_closed_form_density(self):
        p = StateParams(0.6, 0.4, 0.5, 1.0, 0.4)
        spec = MeasurementSpec.general_dyne(0.8, 0.4)
        rho = build_density_matrix(p, 0.3)
        dist = outcome_distribution(
            params_to_moments(apply_phase_shift(p, 0.3)), spec
        )
        rng = np.random.default_rng(9)
        for _ in range(5):
            y = dist.mean + rng.uniform(-2.0, 2.0, size=2) * np.sqrt(np.diag(dist.cov))
            assert 0.5 * povm_probability(rho, spec, y) == pytest.approx(
                float(dist.density(y)), rel=1e-8
            )

    def test_integrates_to_one(self):
        p = StateParams(0.5, 0.2, 0.3, 0.7, 0.2)
        spec = MeasurementSpec.general_dyne(0.5, 0.9)
        rho = build_density_matrix(p, 0.3)
        dist = outcome_distribution(
            params_to_moments(apply_phase_shift(p, 0.3)), spec
        )
        evals, evecs = np.linalg.eigh(dist.cov)
        nodes, weights = np.polynomial.legendre.leggauss(60)
        u = 6.0 * nodes
        w = 6.0 * weights
        total = 0.0
        for i, ui in enumerate(u):
            for j, uj in enumerate(u):
                y = dist.mean + (evecs * np.sqrt(evals)) @ np.array([ui, uj])
                total += w[i] * w[j] * 0.5 * povm_probability(rho, spec, y)
        total *= float(np.prod(np.sqrt(evals)))
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_homodyne_spec_rejected(self):
        rho = build_density_matrix(StateParams(0.0), 0.0)
        with pytest.raises(ValueError):
            povm_probability(rho, MeasurementSpec.homodyne(0.0), np.zeros(2))


class TestHomodyneOptimality:
    def test_reality_and_profile(self):
        rep = svs_homodyne_optimality_check(0.5, 0.2, np.linspace(-3.0, 3.0, 41))
        assert rep.max_abs_imag < 1e-10
        assert rep.max_abs_real_dev < 1e-8

    def test_zero_crossing(self):
        r = 0.5
        x0 = 1.0 / math.sqrt(2.0 * math.cosh(2.0 * r))
        rep = svs_homodyne_optimality_check(r, 0.2, np.array([-x0, x0]))
        assert np.abs(rep.values.real).max() < 1e-8

    def test_requires_squeezing(self):
        with pytest.raises(ValueError):
            svs_homodyne_optimality_check(0.0, 0.0, np.zeros(3))


class TestConvergedBlock:
    def test_drops_edge(self):
        block = converged_block(np.zeros((50, 50)))
        assert block.shape == (40, 40)
