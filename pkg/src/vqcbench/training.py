"""Task cost functions, parameter-shift gradients, and the training loop.

The classification cost is the mean squared error between the label and the
*continuous* readout expectation <Z_r>; the sign is applied only at
prediction time.  Training on sign(<Z_r>) directly would make the cost
piecewise constant and unusable for line-search methods, so the continuous
surrogate is what gets minimized (recorded as ``surrogate_cost`` in result
metadata).

The autoencoder cost penalizes discarded qubits that are not in |0>:
    C = mean_i  (n_d - sum_{q in discard} <Z_q>_i) / 2
which vanishes exactly when every discarded qubit of every encoded state is
|0>, and equals n_d when they are all |1>.
"""

from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .optimizers import (
    OptimizerConfig,
    TrainRecord,
    gradient_descent_minimize,
    nelder_mead_minimize,
    powell_minimize,
    spsa_minimize,
)
from .simulator import (
    Circuit,
    State,
    _apply_gate_inplace,
    expectation_z,
    expectation_z_batch,
    resolved_angle,
    run_circuit,
    run_circuit_batch,
)

TASKS = ("classify", "autoencode")

# Two-point rule for rotation generators with eigenvalues +-1/2, and the
# four-term rule for controlled rotations (frequencies 1/2 and 1).
_SQRT2 = np.sqrt(2.0)
_SHIFT_RULES = {
    "ry": ((np.pi / 2, 0.5), (-np.pi / 2, -0.5)),
    "rx": ((np.pi / 2, 0.5), (-np.pi / 2, -0.5)),
    "rz": ((np.pi / 2, 0.5), (-np.pi / 2, -0.5)),
    "cry": (
        (np.pi / 2, (_SQRT2 + 1) / (4 * _SQRT2)),
        (-np.pi / 2, -(_SQRT2 + 1) / (4 * _SQRT2)),
        (3 * np.pi / 2, -(_SQRT2 - 1) / (4 * _SQRT2)),
        (-3 * np.pi / 2, (_SQRT2 - 1) / (4 * _SQRT2)),
    ),
}


def _states_matrix(dataset, num_qubits: int) -> np.ndarray:
    """Dataset amplitudes stacked as a (samples, 2^N) complex matrix."""
    if len(dataset) == 0:
        raise ValueError("dataset must be non-empty")
    dim = 1 << num_qubits
    mat = np.empty((len(dataset), dim), dtype=complex)
    for i, rec in enumerate(dataset.records):
        state = np.asarray(rec.state)
        if state.shape != (dim,):
            raise ValueError(
                f"record {i} has {state.shape[0]} amplitudes, expected {dim}"
            )
        mat[i] = state
    return mat


def make_classification_cost(circuit: Circuit, readout: int, dataset):
    """Cost closure evaluating the whole dataset in one batched pass."""
    if not 0 <= readout < circuit.num_qubits:
        raise ValueError(f"readout qubit {readout} out of range")
    mat = _states_matrix(dataset, circuit.num_qubits)
    labels = dataset.labels().astype(float)

    def cost(params) -> float:
        out = run_circuit_batch(circuit, params, mat)
        m = expectation_z_batch(out, circuit.num_qubits, readout)
        return float(np.mean((labels - m) ** 2))

    return cost


def classification_cost(circuit: Circuit, readout: int, dataset, params) -> float:
    """Mean squared error between labels and readout expectations, in [0, 4]."""
    return make_classification_cost(circuit, readout, dataset)(params)


def _check_discard(discard, num_qubits) -> list[int]:
    discard = sorted(set(int(q) for q in discard))
    if not discard:
        raise ValueError("discard set must be non-empty")
    if any(q < 0 or q >= num_qubits for q in discard):
        raise ValueError(f"discard qubits {discard} out of range")
    return discard


def make_autoencoder_cost(encoder: Circuit, discard, dataset):
    discard = _check_discard(discard, encoder.num_qubits)
    mat = _states_matrix(dataset, encoder.num_qubits)
    n_d = len(discard)
    n = encoder.num_qubits

    def cost(params) -> float:
        out = run_circuit_batch(encoder, params, mat)
        z_sum = sum(expectation_z_batch(out, n, q) for q in discard)
        return float(np.mean(0.5 * (n_d - z_sum)))

    return cost


def autoencoder_cost(encoder: Circuit, discard, dataset, params) -> float:
    """Mean reset-penalty cost over the dataset, in [0, n_d]."""
    return make_autoencoder_cost(encoder, discard, dataset)(params)


def _shifted_observables(circuit, params, mat, gate_index, shift, observe):
    """Per-sample observable with one gate occurrence's angle offset by shift.

    The gate list is replayed directly (not via a new Circuit) because the
    substituted bound gate may leave a parameter slot without references,
    which Circuit construction would reject.
    """
    gate = circuit.gates[gate_index]
    bound = replace(gate, angle=resolved_angle(gate, params) + shift, slot=None, scale=1.0)
    amp = mat.copy()
    n = circuit.num_qubits
    for i, g in enumerate(circuit.gates):
        _apply_gate_inplace(amp, n, bound if i == gate_index else g, params)
    return observe(amp)


def param_shift_gradient(
    circuit: Circuit,
    dataset,
    params,
    task: str = "classify",
    readout: int | None = None,
    discard=None,
) -> np.ndarray:
    """Exact gradient of the selected cost via the parameter-shift rule.

    Shared slots accumulate the contributions of every gate occurrence; the
    MSE / linear chain rule is applied outside the expectation-level shift.
    Raises for parameterized gates without a known shift rule.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    params = np.asarray(params, dtype=float)
    mat = _states_matrix(dataset, circuit.num_qubits)
    n = circuit.num_qubits
    occurrences = circuit.parameterized_gates()
    for _, gate in occurrences:
        if gate.kind not in _SHIFT_RULES:
            raise ValueError(f"no shift rule for parameterized gate kind {gate.kind!r}")

    if task == "classify":
        if readout is None:
            raise ValueError("classification gradient needs a readout qubit")
        observe = lambda amp: expectation_z_batch(amp, n, readout)
        expectations = observe(run_circuit_batch(circuit, params, mat))
        # dC/dm_i for C = (1/M) sum (l_i - m_i)^2
        prefactors = 2.0 * (expectations - dataset.labels()) / len(dataset)
    else:
        discard = _check_discard(discard or (), n)
        observe = lambda amp: sum(expectation_z_batch(amp, n, q) for q in discard)
        # dC/ds_i for C = (1/M) sum (n_d - s_i)/2
        prefactors = np.full(len(dataset), -0.5 / len(dataset))

    grad = np.zeros(circuit.param_count)
    for gate_index, gate in occurrences:
        d_expect = np.zeros(len(dataset))
        for shift, coeff in _SHIFT_RULES[gate.kind]:
            d_expect += coeff * _shifted_observables(
                circuit, params, mat, gate_index, shift, observe
            )
        grad[gate.slot] += gate.scale * float(prefactors @ d_expect)
    return grad


def initial_parameters(param_count: int, seed: int) -> np.ndarray:
    """Independent uniform draws from [-pi, pi)."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-np.pi, np.pi, size=param_count)


def train(
    task: str,
    circuit: Circuit,
    dataset,
    optimizer: OptimizerConfig,
    readout: int | None = None,
    discard=None,
    init_params=None,
    init_seed: int = 0,
) -> TrainRecord:
    """Minimize the task cost; wall time covers the optimizer call only."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if task == "classify" and readout is None:
        raise ValueError("classification training needs a readout qubit")
    if task == "autoencode" and not discard:
        raise ValueError("autoencoder training needs a discard set")
    if init_params is not None:
        x0 = np.asarray(init_params, dtype=float)
        if x0.shape != (circuit.param_count,):
            raise ValueError(
                f"init_params must have length {circuit.param_count}, got {x0.shape}"
            )
    else:
        x0 = initial_parameters(circuit.param_count, init_seed)

    if task == "classify":
        cost = make_classification_cost(circuit, readout, dataset)
    else:
        cost = make_autoencoder_cost(circuit, discard, dataset)

    t0 = time.perf_counter()
    if optimizer.kind == "powell":
        x, record = powell_minimize(cost, x0, optimizer)
    elif optimizer.kind == "nelder_mead":
        x, record = nelder_mead_minimize(cost, x0, optimizer)
    elif optimizer.kind == "spsa":
        x, record = spsa_minimize(cost, x0, optimizer)
    elif optimizer.kind == "param_shift_gd":
        grad = lambda p: param_shift_gradient(
            circuit, dataset, p, task=task, readout=readout, discard=discard
        )
        x, record = gradient_descent_minimize(cost, grad, x0, optimizer)
    else:
        raise ValueError(f"unknown optimizer kind {optimizer.kind!r}")
    elapsed = time.perf_counter() - t0

    record.final_params = x
    record.wall_time_total = elapsed
    record.wall_time_per_sample = elapsed / len(dataset)
    return record
