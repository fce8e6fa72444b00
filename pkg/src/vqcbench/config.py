"""Benchmark configuration: a single JSON document mirrored into dataclasses.

Validation is strict: unknown keys anywhere in the document are rejected
with the offending key named, so typos surface as exit code 2 instead of
silently falling back to defaults.  The exact schema is documented in the
README.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import FAMILIES, HEA_TEMPLATES, AnsatzSpec
from .optimizers import OPTIMIZER_KINDS, OptimizerConfig
from .spinmodels import (
    CRITICAL_POINT,
    DEFAULT_GRID_SIZE,
    DEFAULT_H_RANGE,
    MODEL_KINDS,
    uniform_grid,
)
from .metrics import DEFAULT_COMPRESSION_H

TASKS = ("classify", "autoencode")


class ConfigError(ValueError):
    """Invalid configuration; maps to CLI exit code 2."""


def _check_keys(section: dict, allowed, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return section[key]


def model_spec_from_dict(d: dict, where: str = "model") -> AnsatzSpec:
    _check_keys(d, {"family", "num_qubits", "layers", "weight_sharing", "hea_template"}, where)
    family = _require(d, "family", where)
    if family not in FAMILIES:
        raise ConfigError(
            f"unknown family {family!r} in {where}; expected one of {list(FAMILIES)}"
        )
    template = d.get("hea_template", "single_column")
    if template not in HEA_TEMPLATES:
        raise ConfigError(f"unknown hea_template {template!r} in {where}")
    try:
        return AnsatzSpec(
            family=family,
            num_qubits=int(_require(d, "num_qubits", where)),
            layers=int(_require(d, "layers", where)),
            weight_sharing=bool(d.get("weight_sharing", True)),
            hea_template=template,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid {where}: {exc}") from exc


def model_spec_to_dict(spec: AnsatzSpec) -> dict:
    return {
        "family": spec.family,
        "num_qubits": spec.num_qubits,
        "layers": spec.layers,
        "weight_sharing": spec.weight_sharing,
        "hea_template": spec.hea_template,
    }


@dataclass
class DataSpec:
    kind: str
    num_sites: int
    h_values: list[float]
    h_c: float
    train_fraction: float = 0.75
    seed: int = 0
    solver: str = "auto"
    train_path: str | None = None
    test_path: str | None = None

    @classmethod
    def from_dict(cls, d: dict, task: str, where: str = "data") -> "DataSpec":
        allowed = {"kind", "num_sites", "h_values", "h_start", "h_stop", "h_count",
                   "h_c", "train_fraction", "seed", "solver", "train_path", "test_path"}
        _check_keys(d, allowed, where)
        kind = d.get("kind", "tfi")
        if kind not in MODEL_KINDS:
            raise ConfigError(f"unknown data kind {kind!r} in {where}")
        num_sites = int(_require(d, "num_sites", where))
        h_c = float(d.get("h_c", CRITICAL_POINT[kind]))
        if "h_values" in d:
            if any(k in d for k in ("h_start", "h_stop", "h_count")):
                raise ConfigError(f"{where}: give either h_values or h_start/h_stop/h_count")
            h_values = [float(h) for h in d["h_values"]]
        elif any(k in d for k in ("h_start", "h_stop", "h_count")):
            start = float(d.get("h_start", DEFAULT_H_RANGE[0]))
            stop = float(d.get("h_stop", DEFAULT_H_RANGE[1]))
            count = int(d.get("h_count", DEFAULT_GRID_SIZE))
            h_values = uniform_grid(start, stop, count)
        elif task == "autoencode":
            h_values = list(DEFAULT_COMPRESSION_H)
        else:
            h_values = uniform_grid(*DEFAULT_H_RANGE, DEFAULT_GRID_SIZE)
        default_fraction = 1.0 if task == "autoencode" else 0.75
        fraction = float(d.get("train_fraction", default_fraction))
        if not 0.0 <= fraction <= 1.0:
            raise ConfigError(f"{where}: train_fraction must be in [0, 1]")
        solver = d.get("solver", "auto")
        if solver not in ("auto", "dense", "lanczos"):
            raise ConfigError(f"{where}: unknown solver {solver!r}")
        return cls(
            kind=kind, num_sites=num_sites, h_values=h_values, h_c=h_c,
            train_fraction=fraction, seed=int(d.get("seed", 0)), solver=solver,
            train_path=d.get("train_path"), test_path=d.get("test_path"),
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "num_sites": self.num_sites,
            "h_values": self.h_values, "h_c": self.h_c,
            "train_fraction": self.train_fraction, "seed": self.seed,
            "solver": self.solver,
            "train_path": self.train_path, "test_path": self.test_path,
        }


def optimizer_from_dict(d: dict, where: str = "optimizer") -> OptimizerConfig:
    allowed = {"kind", "max_iterations", "cost_tolerance", "param_tolerance",
               "learning_rate", "spsa", "seed", "line_search_step", "line_search_tol"}
    _check_keys(d, allowed, where)
    kind = d.get("kind", "powell")
    if kind not in OPTIMIZER_KINDS:
        raise ConfigError(f"unknown optimizer kind {kind!r} in {where}")
    kwargs = {"kind": kind}
    for key in ("max_iterations",):
        if key in d:
            kwargs[key] = int(d[key])
    for key in ("cost_tolerance", "param_tolerance", "learning_rate",
                "line_search_step", "line_search_tol"):
        if key in d:
            kwargs[key] = float(d[key])
    if "seed" in d:
        kwargs["seed"] = int(d["seed"])
    spsa = d.get("spsa", {})
    _check_keys(spsa, {"a", "c", "alpha", "gamma"}, f"{where}.spsa")
    for src, dst in (("a", "spsa_a"), ("c", "spsa_c"),
                     ("alpha", "spsa_alpha"), ("gamma", "spsa_gamma")):
        if src in spsa:
            kwargs[dst] = float(spsa[src])
    try:
        return OptimizerConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid {where}: {exc}") from exc


def optimizer_to_dict(cfg: OptimizerConfig) -> dict:
    return {
        "kind": cfg.kind, "max_iterations": cfg.max_iterations,
        "cost_tolerance": cfg.cost_tolerance, "param_tolerance": cfg.param_tolerance,
        "learning_rate": cfg.learning_rate,
        "spsa": {"a": cfg.spsa_a, "c": cfg.spsa_c,
                 "alpha": cfg.spsa_alpha, "gamma": cfg.spsa_gamma},
        "seed": cfg.seed,
        "line_search_step": cfg.line_search_step, "line_search_tol": cfg.line_search_tol,
    }


@dataclass
class BenchConfig:
    task: str
    model: AnsatzSpec
    data: DataSpec
    optimizer: OptimizerConfig
    seed: int = 0
    out_dir: str = "runs"
    models: list[AnsatzSpec] = field(default_factory=list)
    train_sizes: list[int] = field(default_factory=list)
    discard: list[int] | None = None
    eval_on: str | None = None  # defaults: classify -> test, autoencode -> train
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        allowed = {"task", "model", "models", "data", "optimizer", "seed",
                   "out_dir", "train_sizes", "discard", "eval_on"}
        _check_keys(d, allowed, "config")
        task = _require(d, "task", "config")
        if task not in TASKS:
            raise ConfigError(f"unknown task {task!r}; expected one of {list(TASKS)}")
        model = model_spec_from_dict(_require(d, "model", "config"))
        data = DataSpec.from_dict(_require(d, "data", "config"), task)
        optimizer = optimizer_from_dict(d.get("optimizer", {}))
        models = [
            model_spec_from_dict(m, f"models[{i}]") for i, m in enumerate(d.get("models", []))
        ]
        train_sizes = [int(s) for s in d.get("train_sizes", [])]
        if any(s <= 0 for s in train_sizes):
            raise ConfigError("train_sizes must be positive")
        discard = d.get("discard")
        if discard is not None:
            discard = sorted(int(q) for q in discard)
            if any(q < 0 or q >= model.num_qubits for q in discard):
                raise ConfigError(
                    f"discard qubits {discard} out of range for {model.num_qubits} qubits"
                )
        eval_on = d.get("eval_on")
        if eval_on not in (None, "train", "test"):
            raise ConfigError(f"eval_on must be 'train' or 'test', got {eval_on!r}")
        if model.num_qubits != data.num_sites:
            raise ConfigError(
                f"model acts on {model.num_qubits} qubits but data has {data.num_sites} sites"
            )
        for i, m in enumerate(models):
            if m.num_qubits != data.num_sites:
                raise ConfigError(
                    f"models[{i}] acts on {m.num_qubits} qubits but data has "
                    f"{data.num_sites} sites"
                )
        return cls(
            task=task, model=model, data=data, optimizer=optimizer,
            seed=int(d.get("seed", 0)), out_dir=str(d.get("out_dir", "runs")),
            models=models, train_sizes=train_sizes, discard=discard,
            eval_on=eval_on or ("train" if task == "autoencode" else "test"),
            raw=d,
        )

    def benchmark_models(self) -> list[AnsatzSpec]:
        return self.models if self.models else [self.model]


def load_config(path) -> BenchConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return BenchConfig.from_dict(d)


def cell_seed(run_seed: int, model_index: int, size_index: int) -> int:
    """Stable per-cell seed derived from the run seed and cell coordinates."""
    ss = np.random.SeedSequence((run_seed, model_index, size_index))
    return int(ss.generate_state(1)[0])
