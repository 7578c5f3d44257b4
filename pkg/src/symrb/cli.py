"""Command-line driver.

Subcommands: ``decompose`` (irrep tables of the twirl group), ``simulate``
(run a configured experiment to CSV), ``estimate`` (recover decay
parameters and the average fidelity from a dataset), ``reproduce``
(fidelity-vs-perturbation sweeps for the one- and two-qubit T layers).

Exit codes: 0 success, 2 configuration error, 3 estimation failure,
4 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .channels import average_fidelity_exact, standard_gate
from .estimation import (PencilConfig, bootstrap_fidelity, estimate_fidelity,
                         fit_amplitudes, period_subsample, state_lambdas)
from .groups import (characters_of, decompose_transfer_rep,
                     symmetry_group_for_copies)
from .protocol import (MAX_RECORDS, ExperimentConfig, ExperimentDataset,
                       Scenario, build_scenario, run_scenario)
from .superop import ValidationError
from .svgplot import Series, render_plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ESTIMATION = 3
EXIT_RESOURCE = 4

CONFIG_SCHEMA_VERSION = 1
EPSILON_GRID = (0.001, 0.01, 0.05, 0.1, 0.25)

_EXPERIMENT_KEYS = {"example", "epsilon", "lengths", "num_sequences",
                    "shots", "seed", "state_ids"}
_ESTIMATION_KEYS = {"tau", "pencil", "rank", "bootstrap", "subset",
                    "max_length", "bootstrap_seed"}
_OUTPUT_KEYS = {"dataset_csv", "dataset_json", "result_json", "svg"}


class ConfigError(ValueError):
    """Malformed run-configuration file."""


# ---------------------------------------------------------------------------
# run-configuration files

def _expand_lengths(spec) -> tuple[int, ...]:
    """Lengths given either as an explicit list or as {start, stop, step}."""
    if isinstance(spec, dict):
        extra = set(spec) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"unknown length-range keys {sorted(extra)}")
        return tuple(range(int(spec["start"]), int(spec["stop"]) + 1,
                           int(spec.get("step", 1))))
    return tuple(int(x) for x in spec)


def load_run_config(path) -> tuple[ExperimentConfig, dict, dict]:
    """Parse and validate a JSON run configuration.

    Returns (experiment config, estimation settings, output paths); every
    unknown key anywhere in the document is an error.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be an object")
    if doc.get("schema_version", CONFIG_SCHEMA_VERSION) != CONFIG_SCHEMA_VERSION:
        raise ConfigError("unsupported config schema version")
    extra = set(doc) - {"schema_version", "experiment", "estimation", "output"}
    if extra:
        raise ConfigError(f"unknown top-level keys {sorted(extra)}")
    exp = doc.get("experiment")
    if not isinstance(exp, dict):
        raise ConfigError("missing 'experiment' section")
    extra = set(exp) - _EXPERIMENT_KEYS
    if extra:
        raise ConfigError(f"unknown experiment keys {sorted(extra)}")
    est = doc.get("estimation", {})
    extra = set(est) - _ESTIMATION_KEYS
    if extra:
        raise ConfigError(f"unknown estimation keys {sorted(extra)}")
    out = doc.get("output", {})
    extra = set(out) - _OUTPUT_KEYS
    if extra:
        raise ConfigError(f"unknown output keys {sorted(extra)}")
    try:
        config = ExperimentConfig(
            example=exp["example"],
            epsilon=float(exp["epsilon"]),
            lengths=_expand_lengths(exp["lengths"]),
            num_sequences=int(exp["num_sequences"]),
            shots=int(exp.get("shots", 0)),
            seed=int(exp.get("seed", 0)),
            state_ids=tuple(exp["state_ids"]) if exp.get("state_ids") else None,
        )
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ConfigError(f"invalid experiment section: {exc}") from exc
    return config, dict(est), dict(out)


def _apply_overrides(config: ExperimentConfig,
                     args: argparse.Namespace) -> ExperimentConfig:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "shots", None) is not None:
        updates["shots"] = args.shots
    if not updates:
        return config
    d = config.to_dict()
    d.update(updates)
    return ExperimentConfig.from_dict(d)


# ---------------------------------------------------------------------------
# decompose

def cmd_decompose(args) -> int:
    name = args.gate.upper()
    if name != "T":
        print(f"error: decomposition tables are built in for the T gate only, "
              f"got {args.gate!r}", file=sys.stderr)
        return EXIT_CONFIG
    if not 1 <= args.copies <= args.max_copies:
        print(f"error: copies must lie in [1, {args.max_copies}]",
              file=sys.stderr)
        return EXIT_CONFIG
    G = symmetry_group_for_copies(standard_gate(name), args.copies, name)
    chars = characters_of(G)
    dec = decompose_transfer_rep(G, chars)
    present = dec.present()
    if args.json_out:
        Path(args.json_out).write_text(dec.to_json() + "\n")
    print(f"group order {G.order}; {len(dec.entries)} irreps, "
          f"{len(present)} present; "
          f"sum of multiplicities {dec.num_parameters}")
    print(f"{'irrep':<28}{'dim':>5}{'mult':>6}")
    for label, dim, mult in present:
        word, irrep_name = label
        word_part = ",".join(f"chi{c}" for c in word)
        print(f"{word_part + ';' + irrep_name:<28}{dim:>5}{mult:>6}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args) -> int:
    try:
        config, _, out = load_run_config(args.config)
        config = _apply_overrides(config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    scenario = build_scenario(config)
    total = len(config.lengths) * config.num_sequences * len(scenario.states)
    if total > MAX_RECORDS:
        print(f"resource limit: {total} records exceeds {MAX_RECORDS}",
              file=sys.stderr)
        return EXIT_RESOURCE
    dataset = run_scenario(scenario)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / out.get("dataset_csv", "dataset.csv")
    json_path = out_dir / out.get("dataset_json", "dataset.json")
    dataset.save(csv_path, json_path)
    per_length = config.num_sequences * len(scenario.states)
    for length in sorted(config.lengths):
        print(f"length {length}: {per_length} records")
    print(f"wrote {len(dataset.records)} records to {csv_path} "
          f"(config {config.hash()})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# estimate

def _series_svg(dataset: ExperimentDataset, scenario: Scenario, tau: int,
                pencil: PencilConfig) -> str:
    """Sequence-averaged survival data with the fitted decay model overlaid."""
    plots: list[Series] = []
    idx = 0
    for state in scenario.states:
        lengths, values = dataset.series(state.state_id)
        series = values.mean(axis=1)
        color = None
        plots.append(Series(lengths, series, label=state.state_id,
                            marker=True, color=color))
        if state.pole_groups:
            lams = state_lambdas(lengths, series, state, tau, pencil)
            poles = sorted({complex(v) ** tau for v in lams.values()} | {1.0 + 0j},
                           key=lambda z: (z.real, z.imag))
            model_x, model_y = [], []
            for r, (ks, vals) in sorted(period_subsample(lengths, series,
                                                         tau).items()):
                try:
                    fit = fit_amplitudes(vals, np.array(poles), exponents=ks)
                except ValidationError:
                    continue
                V = np.array(poles)[None, :] ** ks[:, None].astype(float)
                model_x.extend(r + tau * ks)
                model_y.extend((V @ fit.amplitudes).real)
            if model_x:
                order = np.argsort(model_x)
                plots.append(Series(np.array(model_x)[order],
                                    np.array(model_y)[order], dashed=True))
        idx += 1
    return render_plot(plots, title="sequence-averaged survival",
                       xlabel="sequence length", ylabel="survival probability")


def _embed_hash(svg: str, config_hash: str) -> str:
    return svg + f"\n<!-- config_hash: {config_hash} -->\n"


def cmd_estimate(args) -> int:
    data_csv = Path(args.data)
    sidecar = data_csv.with_suffix(".json")
    try:
        dataset = ExperimentDataset.load(data_csv, sidecar)
    except (OSError, ValidationError, json.JSONDecodeError, KeyError) as exc:
        print(f"config error: cannot load dataset: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    est_settings: dict = {}
    if args.config:
        try:
            config, est_settings, _ = load_run_config(args.config)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if config.hash() != dataset.config.hash() and not args.force:
            print(f"config error: config hash {config.hash()} does not match "
                  f"dataset hash {dataset.config.hash()} (use --force to "
                  f"override)", file=sys.stderr)
            return EXIT_CONFIG
    tau = args.tau if args.tau is not None else est_settings.get("tau", 8)
    rank = args.rank if args.rank is not None else est_settings.get("rank")
    B = args.bootstrap if args.bootstrap is not None \
        else est_settings.get("bootstrap", 0)
    subset = args.subset if args.subset is not None \
        else est_settings.get("subset")
    max_length = est_settings.get("max_length")
    pencil = PencilConfig(pencil=est_settings.get("pencil"), rank=rank)
    scenario = build_scenario(dataset.config)
    try:
        result = estimate_fidelity(dataset, scenario, tau, pencil,
                                   max_length=max_length)
        ci_low = ci_high = None
        if B:
            boot = bootstrap_fidelity(dataset, scenario, tau, pencil, B=B,
                                      m=subset,
                                      seed=est_settings.get("bootstrap_seed", 0),
                                      max_length=max_length)
            ci_low, ci_high = boot.ci_low, boot.ci_high
    except (ValidationError, np.linalg.LinAlgError) as exc:
        print(f"estimation failure: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    payload = {
        "epsilon": dataset.config.epsilon,
        "subspace_poles": {slot: [float(np.real(v)), float(np.imag(v))]
                           for slot, v in sorted(result.slot_lambdas.items())},
        "sum_lambda": result.sum_lambda,
        "fidelity": result.fidelity,
        "ci_low": ci_low,
        "ci_high": ci_high,
        "exact_fidelity": average_fidelity_exact(scenario.twirled_noise()),
        "config_hash": dataset.config.hash(),
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result_path = out_dir / "result.json"
    result_path.write_text(json.dumps(payload, indent=2) + "\n")
    if args.svg:
        svg = _series_svg(dataset, scenario, tau, pencil)
        (out_dir / "series.svg").write_text(
            _embed_hash(svg, dataset.config.hash()))
    print(f"fidelity {result.fidelity:.6f} "
          f"(exact {payload['exact_fidelity']:.6f}); wrote {result_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce

def _sweep_config(target: str, epsilon: float, seed: int) -> ExperimentConfig:
    if target == "fig1a":
        return ExperimentConfig("single-T", epsilon, tuple(range(8, 1001, 8)),
                                num_sequences=100, shots=0, seed=seed)
    return ExperimentConfig("two-T", epsilon, tuple(range(8, 1601, 8)),
                            num_sequences=100, shots=0, seed=seed)


def run_sweep(target: str, seed: int, bootstrap: int = 100,
              epsilons=EPSILON_GRID, log=print) -> list[dict]:
    """Fidelity estimates over the perturbation grid for one gate layout."""
    rows = []
    for eps in epsilons:
        config = _sweep_config(target, eps, seed)
        scenario = build_scenario(config)
        dataset = run_scenario(scenario)
        pencil = PencilConfig()
        result = estimate_fidelity(dataset, scenario, 8, pencil)
        ci_low = ci_high = ""
        if bootstrap:
            boot = bootstrap_fidelity(dataset, scenario, 8, pencil,
                                      B=bootstrap, seed=seed)
            ci_low, ci_high = boot.ci_low, boot.ci_high
        exact = average_fidelity_exact(scenario.twirled_noise())
        rows.append({"epsilon": eps, "estimate": result.fidelity,
                     "ci_low": ci_low, "ci_high": ci_high, "exact": exact,
                     "config_hash": config.hash()})
        log(f"epsilon {eps}: estimate {result.fidelity:.6f} "
            f"exact {exact:.6f}")
    return rows


def sweep_svg(rows: list[dict], title: str) -> str:
    eps = np.array([r["epsilon"] for r in rows])
    est = np.array([r["estimate"] for r in rows])
    exact = np.array([r["exact"] for r in rows])
    return render_plot(
        [Series(eps, exact, label="exact average fidelity", dashed=True),
         Series(eps, est, label="estimated", marker=True)],
        title=title, xlabel="perturbation strength",
        ylabel="average gate fidelity")


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_sweep(args.target, args.seed, bootstrap=args.bootstrap)
    csv_path = out_dir / f"{args.target}.csv"
    with open(csv_path, "w") as fh:
        fh.write("epsilon,estimate,ci_low,ci_high,exact,config_hash\n")
        for r in rows:
            fh.write(f"{r['epsilon']},{r['estimate']:.10f},{r['ci_low']},"
                     f"{r['ci_high']},{r['exact']:.10f},{r['config_hash']}\n")
    title = ("single-qubit T layer" if args.target == "fig1a"
             else "two-qubit T layer")
    svg = sweep_svg(rows, f"fidelity recovery, {title}")
    (out_dir / f"{args.target}.svg").write_text(
        _embed_hash(svg, rows[-1]["config_hash"]))
    print(f"wrote {csv_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="symrb",
        description="Randomized benchmarking of individual gates via "
                    "symmetry-group twirling")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose",
                       help="irrep decomposition of the twirl group action")
    d.add_argument("--gate", default="T")
    d.add_argument("--copies", type=int, default=1)
    d.add_argument("--max-copies", type=int, default=4)
    d.add_argument("--json-out", default=None,
                   help="also write the table as JSON")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("simulate", help="run a configured experiment")
    s.add_argument("--config", required=True, help="JSON run configuration")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--shots", type=int, default=None)
    s.add_argument("--out", default=".", help="output directory")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="estimate fidelity from a dataset")
    e.add_argument("--data", required=True,
                   help="dataset CSV (sidecar JSON expected alongside)")
    e.add_argument("--config", default=None,
                   help="run configuration to check provenance against")
    e.add_argument("--tau", type=int, default=None,
                   help="gate period for subsampling (default 8)")
    e.add_argument("--rank", type=int, default=None,
                   help="fixed pencil rank override")
    e.add_argument("--bootstrap", type=int, default=None, metavar="B",
                   help="number of bootstrap resamples")
    e.add_argument("--subset", type=int, default=None, metavar="m",
                   help="sequences per bootstrap resample")
    e.add_argument("--svg", action="store_true",
                   help="also render the survival series and fitted model")
    e.add_argument("--force", action="store_true",
                   help="proceed despite a config-hash mismatch")
    e.add_argument("--out", default=".", help="output directory")
    e.set_defaults(func=cmd_estimate)

    r = sub.add_parser("reproduce",
                       help="fidelity sweep for a built-in gate layout")
    r.add_argument("--target", choices=["fig1a", "fig1b"], required=True)
    r.add_argument("--seed", type=int, default=123)
    r.add_argument("--bootstrap", type=int, default=100, metavar="B")
    r.add_argument("--out", default=".", help="output directory")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        if "limit" in str(exc):
            print(f"resource limit: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
