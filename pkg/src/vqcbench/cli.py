"""Command-line driver: gen-data, train, eval, benchmark.

Exit codes: 0 success, 2 config or validation error, 3 I/O error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import AnsatzSpec, build_ansatz, param_count, readout_qubit
from .config import (
    BenchConfig,
    ConfigError,
    cell_seed,
    load_config,
    model_spec_to_dict,
    optimizer_to_dict,
)
from .metrics import CompressionSpec, evaluate_autoencoder, evaluate_classifier
from .spinmodels import Dataset, LanczosConvergenceError, generate_dataset
from .storage import (
    config_hash,
    read_dataset,
    read_model,
    write_dataset,
    write_model,
    write_report,
    write_results_csv,
    write_results_json,
    write_train_record,
)
from .training import train


def model_name(spec: AnsatzSpec) -> str:
    name = f"{spec.family}_n{spec.num_qubits}_l{spec.layers}"
    if spec.family.startswith("hea") and spec.hea_template == "double_column":
        name += "_dc"
    if spec.family.startswith("qcnn") and not spec.weight_sharing:
        name += "_unshared"
    return name


def _resolve_discard(config: BenchConfig, spec: AnsatzSpec, layout) -> list[int]:
    if config.discard is not None:
        return list(config.discard)
    if layout is not None:
        return sorted(layout.discard_after(spec.layers))
    raise ConfigError(
        "autoencode with an HEA model needs an explicit 'discard' list in the config"
    )


def _generate(config: BenchConfig) -> tuple[Dataset, Dataset]:
    data = config.data
    return generate_dataset(
        data.kind, data.num_sites, data.h_values, h_c=data.h_c,
        train_fraction=data.train_fraction, seed=data.seed, solver=data.solver,
    )


def _dataset_paths(config: BenchConfig, out_dir: Path) -> tuple[Path, Path]:
    data = config.data
    train_path = Path(data.train_path) if data.train_path else out_dir / "train.jsonl"
    test_path = Path(data.test_path) if data.test_path else out_dir / "test.jsonl"
    return train_path, test_path


def _run_metadata(config: BenchConfig) -> dict:
    return {
        "surrogate_cost": True,  # training minimizes MSE on <Z>, sign applied at prediction
        "h_c": config.data.h_c,
        "hea_template": config.model.hea_template,
        "param_count_formula": "qcnn shared: l*(conv+2)+[l==log2 N]; "
                               "hea: sites*columns (see README)",
        "data": config.data.to_dict(),
        "version": __version__,
    }


def cmd_gen_data(config: BenchConfig, args) -> int:
    out_dir = Path(args.out or config.out_dir)
    train_path, test_path = _dataset_paths(config, out_dir)
    train_ds, test_ds = _generate(config)
    write_dataset(train_ds, train_path)
    write_dataset(test_ds, test_path)
    print(f"wrote {len(train_ds)} train records to {train_path}")
    print(f"wrote {len(test_ds)} test records to {test_path}")
    return 0


def _train_once(config: BenchConfig, spec: AnsatzSpec, dataset, seed: int,
                optimizer=None):
    """Build the circuit for spec and train it on dataset; returns
    (record, params_context) where params_context carries readout/discard."""
    circuit, layout = build_ansatz(spec)
    optimizer = optimizer or config.optimizer
    if config.task == "classify":
        readout = readout_qubit(spec)
        record = train("classify", circuit, dataset, optimizer,
                       readout=readout, init_seed=seed)
        return record, {"circuit": circuit, "readout": readout, "discard": None}
    discard = _resolve_discard(config, spec, layout)
    record = train("autoencode", circuit, dataset, optimizer,
                   discard=discard, init_seed=seed)
    return record, {"circuit": circuit, "readout": None, "discard": discard}


def cmd_train(config: BenchConfig, args) -> int:
    out_dir = Path(args.out or config.out_dir)
    train_path, _ = _dataset_paths(config, out_dir)
    if not train_path.exists():
        raise FileNotFoundError(f"training dataset not found: {train_path}")
    dataset = read_dataset(train_path)
    seed = args.seed if args.seed is not None else config.seed
    record, ctx = _train_once(config, config.model, dataset, seed)
    write_model(
        out_dir / "model.json",
        task=config.task,
        model_spec_dict=model_spec_to_dict(config.model),
        params=record.final_params,
        readout=ctx["readout"],
        discard=ctx["discard"],
        init_seed=seed,
        metadata=_run_metadata(config),
    )
    write_train_record(out_dir / "train_record.json", record)
    status = "converged" if record.converged else "not converged"
    print(
        f"trained {model_name(config.model)} on {len(dataset)} samples: "
        f"final cost {record.cost_history[-1]:.6g} ({status}), "
        f"{record.evaluations} evaluations, {record.wall_time_total:.3f}s"
    )
    return 0


def _eval_dataset(config: BenchConfig, out_dir: Path) -> Dataset:
    train_path, test_path = _dataset_paths(config, out_dir)
    path = train_path if config.eval_on == "train" else test_path
    if not path.exists():
        raise FileNotFoundError(f"evaluation dataset not found: {path}")
    return read_dataset(path)


def cmd_eval(config: BenchConfig, args) -> int:
    out_dir = Path(args.out or config.out_dir)
    model_path = Path(args.model) if args.model else out_dir / "model.json"
    if not model_path.exists():
        raise FileNotFoundError(f"model file not found: {model_path}")
    model = read_model(model_path)
    if model["task"] != config.task:
        raise ConfigError(
            f"model file was trained for task {model['task']!r} "
            f"but the config says {config.task!r}"
        )
    from .config import model_spec_from_dict

    spec = model_spec_from_dict(model["model"], "model file")
    circuit, _ = build_ansatz(spec)
    dataset = _eval_dataset(config, out_dir)
    if config.task == "classify":
        report = evaluate_classifier(circuit, model["readout"], model["params"], dataset)
        headline = f"accuracy {report.accuracy:.4f}, auc {report.auc}"
    else:
        cspec = CompressionSpec(tuple(model["discard"]))
        report = evaluate_autoencoder(circuit, model["params"], cspec, dataset)
        headline = f"mean fidelity {report.mean_fidelity:.4f} over {len(report.fidelities)} states"
    write_report(out_dir / "report.json", config.task, report.to_dict())
    print(f"evaluated {model_name(spec)} on {len(dataset)} samples: {headline}")
    print(f"wrote {out_dir / 'report.json'}")
    return 0


def _subsample(dataset: Dataset, size: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    picks = sorted(rng.permutation(len(dataset))[:size].tolist())
    return Dataset(
        dataset.kind, dataset.num_sites,
        [dataset.records[i] for i in picks], dict(dataset.metadata),
    )


def _benchmark_cell(config: BenchConfig, spec: AnsatzSpec, size: int, seed: int,
                    train_ds: Dataset, eval_ds: Dataset, cell_dir: Path) -> dict:
    row = {
        "model": model_name(spec),
        "family": spec.family,
        "N": spec.num_qubits,
        "layers": spec.layers,
        "n_params": param_count(spec),
        "train_size": size,
        "optimizer": config.optimizer.kind,
        "seed": seed,
        "metric_name": "test_accuracy" if config.task == "classify" else "mean_fidelity",
        "metric_value": None,
        "auc": None,
        "time_total_s": None,
        "time_per_sample_s": None,
        "status": "ok",
    }
    try:
        subset = _subsample(train_ds, size, seed)
        optimizer = replace(config.optimizer, seed=seed)
        record, ctx = _train_once(config, spec, subset, seed, optimizer)
        if config.task == "classify":
            report = evaluate_classifier(
                ctx["circuit"], ctx["readout"], record.final_params, eval_ds
            )
            row["metric_value"] = report.accuracy
            row["auc"] = report.auc
        else:
            cspec = CompressionSpec(tuple(ctx["discard"]))
            report = evaluate_autoencoder(
                ctx["circuit"], record.final_params, cspec, eval_ds,
                final_cost=record.cost_history[-1],
            )
            row["metric_value"] = report.mean_fidelity
        row["time_total_s"] = record.wall_time_total
        row["time_per_sample_s"] = record.wall_time_per_sample
        if not record.converged:
            row["status"] = "ok (optimizer hit iteration cap)"
        write_model(
            cell_dir / "model.json", config.task, model_spec_to_dict(spec),
            record.final_params, readout=ctx["readout"], discard=ctx["discard"],
            init_seed=seed, metadata=_run_metadata(config),
        )
        write_train_record(cell_dir / "train_record.json", record)
        write_report(cell_dir / "report.json", config.task, report.to_dict())
    except Exception as exc:  # cell failures land in the row, the sweep goes on
        row["status"] = f"error: {exc}"
    return row


def cmd_benchmark(config: BenchConfig, args) -> int:
    out_dir = Path(args.out or config.out_dir)
    run_seed = args.seed if args.seed is not None else config.seed
    sizes = config.train_sizes or [None]
    models = config.benchmark_models()

    train_ds, test_ds = _generate(config)
    eval_ds = train_ds if config.eval_on == "train" else test_ds
    if len(eval_ds) == 0:
        raise ConfigError(
            "evaluation split is empty; adjust train_fraction or eval_on"
        )
    sizes = [s if s is not None else len(train_ds) for s in sizes]
    for s in sizes:
        if s > len(train_ds):
            raise ConfigError(
                f"train_size {s} exceeds the {len(train_ds)} available training records"
            )

    cells = []
    for mi, spec in enumerate(models):
        for si, size in enumerate(sizes):
            seed = cell_seed(run_seed, mi, si)
            cell_dir = out_dir / "cells" / f"{model_name(spec)}_size{size}"
            cells.append((spec, size, seed, cell_dir))

    def run_cell(cell):
        spec, size, seed, cell_dir = cell
        return _benchmark_cell(config, spec, size, seed, train_ds, eval_ds, cell_dir)

    if args.threads and args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]

    meta = {
        "run_seed": run_seed,
        "config_hash": config_hash(config.raw),
        "config": config.raw,
        "metadata": _run_metadata(config),
        "rows": len(rows),
    }
    if args.format == "json":
        write_results_json(out_dir / "results.json", rows)
        print(f"wrote {len(rows)} rows to {out_dir / 'results.json'}")
    else:
        write_results_csv(out_dir / "results.csv", rows)
        print(f"wrote {len(rows)} rows to {out_dir / 'results.csv'}")
    import json

    (out_dir / "benchmark_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    failures = [r for r in rows if r["status"].startswith("error")]
    for r in failures:
        print(f"cell {r['model']} size {r['train_size']}: {r['status']}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcbench",
        description="Benchmark QCNN and hardware-efficient ansatze on "
                    "phase classification and state compression.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("gen-data", "generate labeled ground-state datasets"),
        ("train", "train one model per the config"),
        ("eval", "evaluate a trained model file"),
        ("benchmark", "sweep models x training sizes, emit a results table"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads (benchmark)")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="benchmark results format")
        if name == "eval":
            p.add_argument("--model", default=None, help="model file (default: out/model.json)")
    return parser


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (LanczosConvergenceError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
