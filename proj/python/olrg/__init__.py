"""Operator-learning renormalization group: grow a small quantum spin chain
toward a target size while training operator maps against a boundary-correlator
loss. This package wraps the C++ core."""

from ._core import (
    TrainConfig,
    RelevantSet,
    adjoint_apply,
    check_dyson_truncation,
    check_rt_bound,
    check_telescoping,
    eval_tobc,
    exact_expectation,
    expm,
    grow_set,
    heisenberg_evolve,
    initial_set,
    kron,
    loss_step,
    make_set,
    pauli,
    predict,
    pulse_duration_estimate,
    shot_count_estimate,
    select_best_epoch,
    tfim_hamiltonian,
    thin_qr_isometry,
    train,
    two_point_observable,
)

__all__ = [
    "TrainConfig",
    "RelevantSet",
    "adjoint_apply",
    "check_dyson_truncation",
    "check_rt_bound",
    "check_telescoping",
    "eval_tobc",
    "exact_expectation",
    "expm",
    "grow_set",
    "heisenberg_evolve",
    "initial_set",
    "kron",
    "loss_step",
    "make_set",
    "pauli",
    "predict",
    "pulse_duration_estimate",
    "shot_count_estimate",
    "select_best_epoch",
    "tfim_hamiltonian",
    "thin_qr_isometry",
    "train",
    "two_point_observable",
]

__version__ = "0.1.0"
