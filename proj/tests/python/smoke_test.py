"""Smoke tests for the Python bindings: core operator algebra, growth,
correlators, oracles and a tiny end-to-end training run."""

import numpy as np

import olrg


def test_pauli_algebra():
    X, Y, Z = olrg.pauli("X"), olrg.pauli("Y"), olrg.pauli("Z")
    assert np.allclose(X @ Y - Y @ X, 2j * Z)
    assert np.allclose(olrg.adjoint_apply(Z, -1, X), 2j * Y)
    assert np.allclose(olrg.kron([np.eye(2), np.eye(2)]), np.eye(4))


def test_tfim_and_growth():
    X, Z = olrg.pauli("X"), olrg.pauli("Z")
    ref = np.kron(Z, Z) + np.kron(X, np.eye(2)) + np.kron(np.eye(2), X)
    assert np.allclose(olrg.tfim_hamiltonian(2, 1.0), ref)

    s2 = olrg.initial_set(2, 1.0)
    s3 = olrg.grow_set(s2, 1.0, 1)
    assert s3.n_sites == 3 and s3.dim == 8
    assert np.allclose(s3.hamiltonian, olrg.tfim_hamiltonian(3, 1.0))
    assert np.allclose(s3.observable, np.kron(olrg.two_point_observable(2, 1, 2), np.eye(2)))


def test_qr_isometry():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4))
    v = olrg.thin_qr_isometry(m)
    assert np.abs(v.conj().T @ v - np.eye(4)).max() < 1e-12
    assert np.allclose(olrg.thin_qr_isometry(np.zeros((6, 3), complex)), np.eye(6)[:, :3])


def test_dynamics_and_oracle():
    Z, X, Y = olrg.pauli("Z"), olrg.pauli("X"), olrg.pauli("Y")
    out = olrg.heisenberg_evolve(Z.astype(complex), X.astype(complex), np.pi / 4, 1)
    assert np.abs(out[-1] + Y).max() < 1e-12
    assert abs(olrg.exact_expectation(2, 1.0, 1, 2, 0.0) - 1.0) < 1e-12
    assert abs(olrg.exact_expectation(6, 0.0, 1, 2, 2.0) - 1.0) < 1e-10


def test_correlators_and_loss():
    s = olrg.initial_set(3, 1.0)
    chi0 = olrg.eval_tobc(s, [], [], [], 1e-14)
    assert abs(chi0 - 1.0) < 1e-10
    assert olrg.loss_step(s, s, 2, 8, 1.0) < 1e-13


def test_verifiers():
    lhs, rhs, ok = olrg.check_telescoping(2, 1, 2, 1.0, 42)
    assert ok and lhs <= rhs + 1e-12
    lhs, rhs, ok = olrg.check_rt_bound(2, 1, 0.5, 0.05, 7)
    assert ok
    rows = olrg.check_dyson_truncation(0.3, 3, 128)
    errs = [e for _, e in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert abs(olrg.pulse_duration_estimate(1, 10, 1.0) - 2.0) < 1e-12


def test_tiny_training_round_trip():
    cfg = olrg.TrainConfig()
    cfg.mode = "omm"
    cfg.start_n = 2
    cfg.target_n = 3
    cfg.total_time = 0.5
    cfg.checkpoints = 6
    cfg.order = 1
    cfg.tobc_batch = 4
    cfg.depth = 1
    cfg.width = 8
    cfg.noise_dim = 2
    cfg.ensemble_size = 2
    cfg.epochs = 4
    cfg.moving_avg_window = 2
    cfg.seed = 11

    first = olrg.train(cfg)
    second = olrg.train(cfg)
    assert len(first["totals"]) == 4
    assert first["totals"] == second["totals"]
    assert not first["diverged"]
    assert olrg.select_best_epoch(first["totals"], 2) == first["best_epoch"]

    pred = olrg.predict(cfg, first["best_params"])
    assert np.isfinite(pred)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"ok   {name}")
            except AssertionError as exc:
                failures += 1
                print(f"FAIL {name}: {exc}")
    raise SystemExit(1 if failures else 0)
