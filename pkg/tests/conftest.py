"""Shared test oracles: dense gate/circuit matrices built independently of
the strided kernels, plus random circuit/state generators."""

import numpy as np
import pytest

from vqcbench import simulator as sim


def embed_1q(u, q, n):
    """kron(I, ..., u at position q, ..., I) under the q0-most-significant order."""
    full = np.eye(1)
    for pos in range(n):
        full = np.kron(full, u if pos == q else np.eye(2))
    return full


def embed_2q(u, qa, qb, n):
    """Embed a 4x4 matrix acting on (qa, qb), qa the high bit of the pair,
    as a sum of kron products of elementary 2x2 matrices."""
    basis = [np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]]),
             np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])]
    # basis[2*i + k] = |i><k|
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=complex)
    for r in range(4):
        for c in range(4):
            if u[r, c] == 0:
                continue
            ia, ja = r >> 1, r & 1
            ka, la = c >> 1, c & 1
            term = np.eye(1)
            for pos in range(n):
                if pos == qa:
                    term = np.kron(term, basis[2 * ia + ka])
                elif pos == qb:
                    term = np.kron(term, basis[2 * ja + la])
                else:
                    term = np.kron(term, np.eye(2))
            full = full + u[r, c] * term
    return full


def gate_full_matrix(gate, n, params=None):
    u = sim.gate_matrix(gate, params)
    if len(gate.targets) == 1:
        return embed_1q(u, gate.targets[0], n)
    qa, qb = gate.targets
    return embed_2q(u, qa, qb, n)


def circuit_full_matrix(circuit, params=None):
    full = np.eye(1 << circuit.num_qubits, dtype=complex)
    for g in circuit.gates:
        full = gate_full_matrix(g, circuit.num_qubits, params) @ full
    return full


def random_state(n, rng):
    amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return sim.State(n, amp / np.linalg.norm(amp))


def random_unitary4(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_circuit(n, rng, n_gates=12, kinds=None, param_count=0):
    """Random circuit; parameterized gates draw slots uniformly if
    param_count > 0, otherwise angles are bound."""
    kinds = kinds or ["ry", "rx", "rz", "x", "h", "cnot", "cz", "cry", "u2"]
    gates = []
    used_slots = set()
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("cnot", "cz", "cry", "u2"):
            qa, qb = rng.choice(n, size=2, replace=False)
            targets = (int(qa), int(qb))
        else:
            targets = (int(rng.integers(n)),)
        angle = None
        slot = None
        if kind in sim.ROTATION_KINDS:
            if param_count > 0:
                slot = int(rng.integers(param_count))
                used_slots.add(slot)
            else:
                angle = float(rng.uniform(-np.pi, np.pi))
        matrix = random_unitary4(rng) if kind == "u2" else None
        gates.append(sim.Gate(kind, targets, angle=angle, slot=slot, matrix=matrix))
    if param_count > 0:
        # make sure every slot is referenced, as the Circuit invariant demands
        for missing in set(range(param_count)) - used_slots:
            gates.append(sim.ry(int(rng.integers(n)), slot=missing))
    return sim.Circuit(n, gates, param_count)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
