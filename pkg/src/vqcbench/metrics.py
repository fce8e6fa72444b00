"""Task evaluation: classifier predictions, accuracy, ROC/AUC, and
autoencoder reconstruction fidelity through the reset channel.

The decoded state after resetting ``n_d`` qubits is mixed, so the reported
fidelity is <psi| rho_dec |psi>, computed as the Kraus sum
    F = sum_b |<psi| Udag K_b U |psi>|^2
with one decoder (inverse-encoder) statevector pass per reset branch.  This
coincides with the plain squared overlap whenever the encoding is exact.
A post-selected variant (conditioning on the all-|0> reset outcome) is
available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .simulator import (
    Circuit,
    State,
    expectation_z,
    expectation_z_batch,
    inverse_circuit,
    kraus_reset_branches,
    run_circuit,
    run_circuit_batch,
    state_overlap,
)

# Default compression inputs: TFI ground states straddling the h=1 boundary
# (the exact critical point is excluded; 0.9 stands in for 1.0).
DEFAULT_COMPRESSION_H = (0.2, 0.6, 0.9, 1.4, 1.8)


@dataclass(frozen=True)
class CompressionSpec:
    """Which qubits an autoencoder discards."""

    discard: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "discard", tuple(sorted(set(int(q) for q in self.discard))))
        if not self.discard:
            raise ValueError("discard set must be non-empty")
        if self.discard[0] < 0:
            raise ValueError("discard qubits must be non-negative")

    @property
    def n_d(self) -> int:
        return len(self.discard)

    @classmethod
    def from_layout(cls, layout, layers: int) -> "CompressionSpec":
        return cls(tuple(layout.discard_after(layers)))


@dataclass
class ClassificationReport:
    accuracy: float
    scores: list[float]
    predictions: list[int]
    labels: list[int]
    confusion: dict
    roc_points: list[tuple[float, float]]
    auc: float | None

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "scores": self.scores,
            "predictions": self.predictions,
            "labels": self.labels,
            "confusion": self.confusion,
            "roc_points": [list(p) for p in self.roc_points],
            "auc": self.auc,
        }


@dataclass
class CompressionReport:
    fidelities: list[float]
    mean_fidelity: float
    n_d: int
    final_cost: float | None = None

    def to_dict(self) -> dict:
        return {
            "fidelities": self.fidelities,
            "mean_fidelity": self.mean_fidelity,
            "n_d": self.n_d,
            "final_cost": self.final_cost,
        }


def predict(circuit: Circuit, readout: int, params, state: State) -> int:
    """sign(<Z_readout>) after the circuit; exact zero maps to +1."""
    m = expectation_z(run_circuit(circuit, params, state), readout)
    return 1 if m >= 0.0 else -1


def roc_points(scores, labels) -> list[tuple[float, float]]:
    """Exact ROC: thresholds sweep every distinct score plus +-inf sentinels.

    A sample is called positive when its score >= threshold.  Points run
    from (0, 0) to (1, 1) and are monotone in both coordinates.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == -1).sum())
    if n_pos == 0 or n_neg == 0:
        return []
    thresholds = [np.inf] + sorted(set(scores.tolist()), reverse=True) + [-np.inf]
    points = []
    for t in thresholds:
        called = scores >= t
        tp = int((called & (labels == 1)).sum())
        fp = int((called & (labels == -1)).sum())
        points.append((fp / n_neg, tp / n_pos))
    return points


def auc_score(scores, labels) -> float | None:
    """AUC as the Mann-Whitney statistic; ties count one half.

    Returns None when only one class is present (undefined marker).
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    pos = scores[labels == 1]
    neg = scores[labels == -1]
    if pos.size == 0 or neg.size == 0:
        return None
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((wins + 0.5 * ties) / (pos.size * neg.size))


def evaluate_classifier(circuit: Circuit, readout: int, params, test) -> ClassificationReport:
    """Accuracy from sign predictions plus the exact ROC curve and AUC."""
    states = test.states()
    if not states:
        raise ValueError("test set must be non-empty")
    labels = [int(l) for l in test.labels()]
    mat = np.array([s.amplitudes for s in states])
    out = run_circuit_batch(circuit, params, mat)
    scores = [float(m) for m in expectation_z_batch(out, circuit.num_qubits, readout)]
    predictions = [1 if m >= 0.0 else -1 for m in scores]
    correct = sum(p == l for p, l in zip(predictions, labels))
    confusion = {
        "tp": sum(1 for p, l in zip(predictions, labels) if p == 1 and l == 1),
        "tn": sum(1 for p, l in zip(predictions, labels) if p == -1 and l == -1),
        "fp": sum(1 for p, l in zip(predictions, labels) if p == 1 and l == -1),
        "fn": sum(1 for p, l in zip(predictions, labels) if p == -1 and l == 1),
    }
    return ClassificationReport(
        accuracy=correct / len(labels),
        scores=scores,
        predictions=predictions,
        labels=labels,
        confusion=confusion,
        roc_points=roc_points(scores, labels),
        auc=auc_score(scores, labels),
    )


def reconstruct_fidelity(
    encoder: Circuit,
    params,
    spec: CompressionSpec,
    state: State,
    post_select: bool = False,
) -> float:
    """Fidelity of the decode(reset(encode(state))) round trip.

    ``post_select=True`` instead conditions on the all-|0> reset outcome and
    normalizes by its probability.
    """
    if spec.discard[-1] >= encoder.num_qubits:
        raise ValueError(f"discard set {spec.discard} invalid for {encoder.num_qubits} qubits")
    encoded = run_circuit(encoder, params, state)
    decoder = inverse_circuit(encoder)
    branches = kraus_reset_branches(encoded, spec.discard)
    if post_select:
        weight = branches[0].norm() ** 2
        if weight == 0.0:
            return 0.0
        decoded = run_circuit(decoder, params, branches[0])
        return abs(state_overlap(state, decoded)) ** 2 / weight
    branch_mat = np.array([b.amplitudes for b in branches])
    decoded = run_circuit_batch(decoder, params, branch_mat)
    overlaps = decoded @ state.amplitudes.conj()
    return float(np.sum(np.abs(overlaps) ** 2))


def evaluate_autoencoder(
    encoder: Circuit,
    params,
    spec: CompressionSpec,
    test,
    final_cost: float | None = None,
) -> CompressionReport:
    states = test.states()
    if not states:
        raise ValueError("test set must be non-empty")
    fidelities = [reconstruct_fidelity(encoder, params, spec, s) for s in states]
    return CompressionReport(
        fidelities=fidelities,
        mean_fidelity=float(np.mean(fidelities)),
        n_d=spec.n_d,
        final_cost=final_cost,
    )
