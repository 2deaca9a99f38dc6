"""Command-line laboratory: seeded experiments with replayable JSONL records.

Every run writes one JSON line per experiment invocation, carrying the
parameters, the master seed, and the metrics.  ``replay`` re-executes each
record and compares metrics bit-exactly; the worker-pool size changes
scheduling only, never results.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from .errors import InvalidConfigError, SchemaVersionError
from .experiments import EXPERIMENTS

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    master_seed: int = 0
    out_path: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidConfigError(f"unknown experiment {self.experiment!r}")


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    parameters: dict
    metrics: dict
    seed: int
    duration_s: float
    schema_version: int = SCHEMA_VERSION
    failures: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "parameters": self.parameters,
            "metrics": self.metrics,
            "seed": self.seed,
            "duration_s": self.duration_s,
            "failures": list(self.failures),
        }


def run(config: ExperimentConfig) -> list[ResultRecord]:
    """Execute one experiment; append its record to the output file."""
    fn = EXPERIMENTS[config.experiment]
    started = time.perf_counter()
    metrics, failures = fn(config.parameters, config.master_seed, config.threads)
    duration = time.perf_counter() - started
    record = ResultRecord(
        experiment=config.experiment,
        parameters=config.parameters,
        metrics=metrics,
        seed=config.master_seed,
        duration_s=duration,
        failures=tuple(failures),
    )
    if config.out_path:
        with open(config.out_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record.to_json_dict()) + "\n")
    return [record]


def replay(path: str) -> dict:
    """Re-run every record in a JSONL file; metrics must match bit-exactly."""
    verdicts = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            if data.get("schema_version") != SCHEMA_VERSION:
                raise SchemaVersionError(
                    f"line {line_no}: schema {data.get('schema_version')} unsupported"
                )
            config = ExperimentConfig(
                experiment=data["experiment"],
                parameters=data["parameters"],
                master_seed=int(data["seed"]),
            )
            fresh, _failures = EXPERIMENTS[config.experiment](
                config.parameters, config.master_seed, config.threads
            )
            reference = data["metrics"]
            # Serialize both the same way so 0.1 compares as 0.1, not repr noise.
            match = json.dumps(fresh, sort_keys=True) == json.dumps(
                reference, sort_keys=True
            )
            verdicts.append({"line": line_no, "experiment": data["experiment"], "match": match})
    return {
        "records": len(verdicts),
        "all_match": all(v["match"] for v in verdicts),
        "mismatches": [v for v in verdicts if not v["match"]],
    }


def _csv_rows(metrics: dict) -> list[dict] | None:
    table = metrics.get("table")
    if isinstance(table, list) and table and isinstance(table[0], dict):
        return table
    return None


def write_csv(rows: list[dict], path: str) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="qubit / symbol-bit count")
    parser.add_argument("--t", type=int, help="circuit length or chain steps")
    parser.add_argument("--l", type=int, help="recursion depth")
    parser.add_argument("--delta", type=float, help="per-level success floor")
    parser.add_argument("--beta", type=float, help="dispersion threshold")
    parser.add_argument("--samples", type=int, help="sample count")
    parser.add_argument("--trials", type=int, help="trial / circuit / walker count")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--group", type=str, help="builtin group name (s3, d4, q8)")
    parser.add_argument("--C", dest="c_factor", type=float, help="length factor: t = C n^3")
    parser.add_argument("--out", type=str, help="JSONL output path (append)")
    parser.add_argument("--csv", type=str, help="also dump tabular metrics as CSV")
    parser.add_argument("--threads", type=int, default=None, help="worker pool size")
    parser.add_argument("--config", type=str, help="JSON file overriding flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oraclelab",
        description="Dispersion, sign-compiled oracles, recursive identification, Pauli chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common(p)
        if name == "dispersion" or name == "oracle":
            p.add_argument("--unitary", choices=["hadamard", "qft", "random"], default="hadamard")
            p.add_argument("--labels", type=int, help="number of labels (oracle)")
        if name == "rfs":
            p.add_argument("--unitary", choices=["hadamard"], default="hadamard")
            p.add_argument(
                "--mode",
                choices=["simulate", "separation", "replay-log", "bound-table"],
                default="simulate",
            )
            p.add_argument("--alpha-n", dest="alpha_n", type=int, help="label bits")
            p.add_argument("--n-list", dest="n_list", type=str, help="comma list of n values")
            p.add_argument("--spec-file", dest="spec_file", type=str)
            p.add_argument("--log-file", dest="log_file", type=str)
        if name == "markov":
            p.add_argument(
                "--mode",
                choices=["gap", "stationary", "lumped-vs-full", "moments"],
                default="gap",
            )
            p.add_argument("--n-list", dest="n_list", type=str, help="comma list of n values")
            p.add_argument("--t-list", dest="t_list", type=str, help="comma list of t values")
    rp = sub.add_parser("replay", help="re-run a JSONL record file and compare")
    rp.add_argument("records", type=str, help="path to the JSONL file")
    return parser


_PARAM_KEYS = (
    "n",
    "t",
    "l",
    "delta",
    "beta",
    "samples",
    "trials",
    "group",
    "unitary",
    "labels",
    "mode",
    "alpha_n",
    "spec_file",
    "log_file",
)


def _collect_params(args: argparse.Namespace) -> dict:
    params: dict = {}
    for key in _PARAM_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if getattr(args, "n_list", None):
        params["n_list"] = [int(v) for v in args.n_list.split(",")]
    if getattr(args, "t_list", None):
        params["t_list"] = [int(v) for v in args.t_list.split(",")]
    if getattr(args, "c_factor", None) is not None and "t" not in params:
        n = int(params.get("n", 6))
        params["t"] = int(args.c_factor * n**3)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            params.update(json.load(fh))
    return params


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        verdict = replay(args.records)
        print(json.dumps(verdict, indent=1))
        return 0 if verdict["all_match"] else 1

    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("LAB_THREADS", "1"))
    config = ExperimentConfig(
        experiment=args.command,
        parameters=_collect_params(args),
        master_seed=args.seed,
        out_path=args.out,
        threads=threads,
    )
    records = run(config)
    status = 0
    for record in records:
        print(f"== {record.experiment}  seed={record.seed}  {record.duration_s:.2f}s")
        for key, value in record.metrics.items():
            print(f"   {key}: {value}")
        if record.failures:
            status = 1
            for failure in record.failures:
                print(f"   FAILED: {failure}")
        else:
            print("   all checks passed")
        if args.csv:
            rows = _csv_rows(record.metrics)
            if rows:
                write_csv(rows, args.csv)
                print(f"   csv -> {args.csv}")
    return status


if __name__ == "__main__":
    sys.exit(main())
