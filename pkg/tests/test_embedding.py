"""Delay matrices, DMD, companion models, prediction, hidden-state recovery."""

import numpy as np
import pytest

from conftest import growth_normalized_error, random_localizable_system, random_system
from localspec import (
    LinearSystem,
    NotLocalizableError,
    Trajectory,
    dmd,
    exact_companion,
    fit_companion,
    hankel_matrices,
    permute_vertex_first,
    predict,
    recover_hidden_state,
    simulate,
    simulate_local,
)
from localspec.io import example1_system


class TestHankelMatrices:
    def test_scalar_unrolling(self):
        dm = hankel_matrices(np.array([1.0, 2.0, 3.0, 4.0]), s=2)
        assert np.array_equal(dm.x, [[1.0, 2.0], [2.0, 3.0]])
        assert np.array_equal(dm.y, [[2.0, 3.0], [3.0, 4.0]])
        assert dm.s == 2 and dm.p == 1

    def test_single_delay_reduces_to_plain_pair(self):
        data = np.arange(5.0)
        dm = hankel_matrices(data, s=1)
        assert np.array_equal(dm.x[0], data[:-1])
        assert np.array_equal(dm.y[0], data[1:])

    def test_shifted_block_identity(self):
        rng = np.random.default_rng(0)
        for s in (1, 2, 3, 5):
            series = rng.standard_normal(12)
            dm = hankel_matrices(series, s)
            assert np.array_equal(dm.x[dm.p :], dm.y[: (dm.s - 1) * dm.p])

    def test_vector_observations(self):
        rng = np.random.default_rng(1)
        traj = Trajectory(rng.standard_normal((9, 3)))
        dm = hankel_matrices(traj, s=3)
        assert dm.p == 3 and dm.x.shape == (9, 6)
        assert np.array_equal(dm.x[3:], dm.y[:6])
        assert np.array_equal(dm.x[:3, 0], traj.states[0])
        assert np.array_equal(dm.y[6:, -1], traj.states[-1])

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            hankel_matrices(np.ones(3), s=3)


class TestDmd:
    def test_identity_when_y_equals_x(self):
        x = np.random.default_rng(0).standard_normal((3, 12))
        assert np.allclose(dmd(x, x), np.eye(3), atol=1e-10)

    def test_recovers_known_operator(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((4, 4))
        x = rng.standard_normal((4, 20))
        assert np.allclose(dmd(x, m @ x), m, atol=1e-10)

    def test_residual_on_simulated_data(self):
        sys = random_system(2, n=4)
        x0 = np.random.default_rng(3).standard_normal(4)
        traj = simulate(sys, x0, 12)
        dm = hankel_matrices(traj, s=1)
        c = dmd(dm.x, dm.y)
        assert np.linalg.norm(c @ dm.x - dm.y) <= 1e-8

    def test_zero_data_warns_and_returns_zero(self):
        x = np.zeros((3, 5))
        with pytest.warns(np.exceptions.RankWarning):
            c = dmd(x, x)
        assert np.array_equal(c, np.zeros((3, 3)))

    def test_sampled_first_order_optimality(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((3, 6))
        y = rng.standard_normal((3, 6))
        c = dmd(x, y)
        base = np.linalg.norm(c @ x - y)
        for _ in range(25):
            delta = rng.standard_normal(c.shape) * 1e-6
            assert np.linalg.norm((c + delta) @ x - y) >= base - 1e-12


class TestFitCompanion:
    def test_scalar_geometric(self):
        u = 0.5 ** np.arange(10)
        model = fit_companion(u, s=1)
        assert abs(model.weights[0] - 0.5) <= 1e-12
        assert model.residual <= 1e-12

    def test_matches_exact_companion_on_clean_data(self):
        for seed in range(25):
            sys = random_localizable_system(seed)
            x0 = np.random.default_rng(100 + seed).standard_normal(sys.n)
            u = simulate_local(sys, x0, 4 * sys.n, 1)
            fitted = fit_companion(u, sys.n)
            exact = exact_companion(sys)
            assert np.max(np.abs(fitted.weights - exact.weights)) <= 1e-6
            assert fitted.residual <= 1e-8

    def test_zero_trajectory(self):
        model = fit_companion(np.zeros(10), s=3)
        assert np.array_equal(model.weights, np.zeros(3))
        assert model.residual == 0.0

    def test_scale_recorded_and_weights_invariant(self):
        u = simulate_local(random_localizable_system(3, n=4), [1.0, -2.0, 0.5, 0.3], 16, 1)
        big = fit_companion(1e6 * np.asarray(u), 4)
        small = fit_companion(np.asarray(u), 4)
        assert np.allclose(big.weights, small.weights, atol=1e-9)
        assert big.scale == pytest.approx(1e6 * small.scale)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            fit_companion(np.ones(5), s=3)


class TestExactCompanion:
    def test_two_by_two_formula(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = rng.standard_normal((2, 2))
            model = exact_companion(LinearSystem(a))
            assert model.weights[1] == pytest.approx(np.trace(a), abs=1e-12)
            assert model.weights[0] == pytest.approx(-np.linalg.det(a), abs=1e-12)

    def test_diag_one_two(self):
        model = exact_companion(LinearSystem(np.diag([1.0, 2.0])))
        # characteristic polynomial (x-1)(x-2) = x^2 - 3x + 2
        assert np.allclose(model.weights, [-2.0, 3.0], atol=1e-12)

    def test_trace_det_identities(self):
        for seed in range(30):
            sys = random_system(seed)
            w = exact_companion(sys).weights
            n = sys.n
            assert w[-1] == pytest.approx(np.trace(sys.a), abs=1e-9)
            assert w[0] == pytest.approx((-1) ** (n + 1) * np.linalg.det(sys.a), abs=1e-9)

    def test_against_root_product_oracle(self):
        # independent oracle: expand prod (x - lambda_i) from computed eigenvalues
        for seed in range(30):
            sys = random_system(seed)
            coeffs = np.real(np.poly(np.linalg.eigvals(sys.a)))
            oracle = -coeffs[1:][::-1]
            assert np.allclose(exact_companion(sys).weights, oracle, atol=1e-9)


class TestPredict:
    def test_exact_model_matches_simulation(self):
        for seed in range(20):
            sys = random_localizable_system(seed)
            x0 = np.random.default_rng(200 + seed).standard_normal(sys.n)
            u = simulate_local(sys, x0, sys.n + 49, 1)
            model = exact_companion(sys)
            pred = predict(model, u[: sys.n], 50)
            assert growth_normalized_error(pred, u) <= 1e-6

    def test_constant_sequence(self):
        from localspec import CompanionModel

        model = CompanionModel(s=1, weights=np.array([1.0]), residual=0.0)
        assert np.array_equal(predict(model, [3.5], 4), np.full(5, 3.5))

    def test_zero_weights_continue_with_zeros(self):
        from localspec import CompanionModel

        model = CompanionModel(s=2, weights=np.zeros(2), residual=0.0)
        out = predict(model, [1.0, 2.0], 3)
        assert np.array_equal(out, [1.0, 2.0, 0.0, 0.0, 0.0])


class TestRecoverHiddenState:
    def test_two_state_closed_form(self):
        a = np.array([[0.3, 0.7], [0.2, 0.5]])
        sys = LinearSystem(a)
        x0 = np.array([1.0, -2.0])
        u = simulate_local(sys, x0, 2, 1)
        v = recover_hidden_state(sys, 1, u[:2])
        assert v[0] == pytest.approx((u[1] - 0.3 * u[0]) / 0.7, abs=1e-12)
        assert v[0] == pytest.approx(-2.0, abs=1e-12)

    def test_recovers_simulated_hidden_block(self):
        for seed in range(20):
            sys = random_localizable_system(seed, n=4)
            x0 = np.random.default_rng(300 + seed).standard_normal(4)
            u = simulate_local(sys, x0, 4, 1)
            v = recover_hidden_state(sys, 1, u[:4])
            rel = np.max(np.abs(v - x0[1:])) / max(np.max(np.abs(x0[1:])), 1e-30)
            assert rel <= 1e-8

    def test_respects_vertex_argument(self):
        sys = random_localizable_system(7, n=5)
        # vertex 3: hidden components are (x1, x2, x4, x5) in original order
        x0 = np.random.default_rng(11).standard_normal(5)
        u = simulate_local(sys, x0, 5, 1)
        # probe a vertex where the permuted system is localizable
        from localspec import is_localizable

        for vertex in range(1, 6):
            if not is_localizable(sys, vertex).localizable:
                continue
            window = simulate_local(sys, x0, 5, vertex)[:5]
            v = recover_hidden_state(sys, vertex, window)
            hidden_true = np.delete(x0, vertex - 1)
            assert np.allclose(v, hidden_true, atol=1e-7)

    def test_non_localizable_raises_with_singular_values(self):
        sys = example1_system("left")
        with pytest.raises(NotLocalizableError) as info:
            recover_hidden_state(sys, 1, np.array([1.0, 0.5, 0.25]))
        assert info.value.singular_values.shape == (2,)

    def test_round_trip_through_global_step(self):
        # recovered hidden state, advanced by the global dynamics, must
        # reproduce the next local value that the companion model predicts
        for seed in range(15):
            sys = random_localizable_system(seed)
            n = sys.n
            x0 = np.random.default_rng(400 + seed).standard_normal(n)
            u = simulate_local(sys, x0, n + 1, 1)
            v = recover_hidden_state(sys, 1, u[:n])
            state = np.concatenate([[u[0]], v])
            perm = permute_vertex_first(sys, 1)
            for _ in range(n):
                state = perm.a @ state
            predicted = predict(exact_companion(sys), u[:n], 1)[-1]
            assert state[0] == pytest.approx(predicted, rel=1e-8, abs=1e-10)
            assert state[0] == pytest.approx(u[n], rel=1e-8, abs=1e-10)
