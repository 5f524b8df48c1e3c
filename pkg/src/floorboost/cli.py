"""Command-line entry point.

Subcommands: ``generate`` (synthetic logs), ``train`` (fit schema +
classifier families), ``evaluate`` (AUC, cascade rates, decision log),
``replay`` (segmented revenue report + lift vs the static baseline), and
``sweep`` (grid search over the two labeling cutoffs).

Values resolve as: built-in default < JSON config file (kebab-case keys
matching the flags) < explicit flag. Every run writes a manifest with the
resolved config and content hashes of its inputs and outputs. Errors exit
nonzero with a single ``error: ...`` line on stderr; outputs are computed
before anything is written, so failures leave no partial artifact behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import artifacts, figures
from .auction import effective_static_reserve
from .boosting import TrainingError, roc_auc, roc_curve
from .cascade import CascadeConfigError, CascadeTargets, cascade_rates
from .features import BucketSchema, EncodingError, filter_outliers, label_arrays, read_logs
from .money import Money
from .pipeline import (
    TrainConfig,
    load_model_bundle,
    make_grid_trainer,
    model_bundle,
    split_records,
    train_policy,
)
from .policy import write_decision_log
from .replay import (
    DegenerateGridPoint,
    compute_lift,
    grid_search_cutoffs,
    replay,
    replay_with_baseline,
    write_lift_json,
)
from .synth import SyntheticConfig, generate_synthetic_logs

_SPLITS = ("train", "validation", "holdout", "all")


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line machine-parseable failure
        raise CLIError(message)


@dataclass(frozen=True)
class Param:
    name: str  # kebab-case, doubles as the config-file key
    type: Callable[[str], Any]
    default: Any = None
    required: bool = False
    help: str = ""
    is_flag: bool = False

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")


_GENERATE_PARAMS = [
    Param("out", str, required=True, help="output log file (JSONL)"),
    Param("n", int, 10000, help="number of auction records"),
    Param("seed", int, 0, help="generator seed"),
    Param("high-value-fraction", float, 0.05, help="share of records in the high bid component"),
    Param("signal-strength", float, 0.7, help="how strongly features determine the top bid, in [0,1]"),
    Param("low-bid-log-mean", float, 0.10, help="log-scale location of the low bid component"),
    Param("low-bid-log-sigma", float, 0.70, help="log-scale spread of the low bid component"),
    Param("high-bid-spread", float, 0.80, help="log-scale spread of the high bid component"),
    Param("high-bid-log-noise", float, 0.15, help="log-scale noise on high bids"),
    Param("gap-scale", float, 0.35, help="mean of gap/top-bid"),
    Param("outlier-cap", str, "41", help="top bids are capped here ($)"),
]

_TRAIN_PARAMS = [
    Param("logs", str, required=True, help="input auction log (JSONL)"),
    Param("out", str, required=True, help="output model file (JSON)"),
    Param("cascade-f", float, required=True, help="max acceptable per-stage false-positive rate"),
    Param("cascade-d", float, required=True, help="min acceptable per-stage detection rate"),
    Param("cascade-f-target", float, required=True, help="overall false-positive rate target"),
    Param("high-value-cutoff", str, "10", help="top-bid cutoff labeling an auction high value ($)"),
    Param("gap-cutoff", str, "1", help="top-two-bid gap labeling significant separation ($)"),
    Param("bucket-edges", str, "0,1,2,5,10,15,20,41", help="ascending price bucket edges ($)"),
    Param("outlier-cap", str, "41", help="drop records with top bid above this ($)"),
    Param("separation-rounds", int, 48, help="boosting rounds for the separation classifier"),
    Param("bucket-rounds", int, 32, help="boosting rounds per winning-bucket classifier"),
    Param("stage-budgets", str, "", help="comma list of starting stump counts per cascade stage"),
    Param("max-stages", int, 25, help="cascade stage safety cap"),
    Param("max-stumps-per-stage", int, 400, help="per-stage stump safety cap"),
    Param("onehot-max", int, 16, help="one-hot encode categoricals up to this cardinality"),
    Param("reserve-scale", float, 1.0, help="scale in (0,1] applied to the predicted bucket floor"),
    Param("seed", int, 0, help="split seed"),
    Param("train-frac", float, 0.6, help="training split fraction"),
    Param("val-frac", float, 0.2, help="validation split fraction"),
    Param("group-map", str, None, help="JSON file mapping buyer seats to the ten groups"),
    Param("figures", bool, True, help="render the cascade stages figure", is_flag=True),
]

_EVALUATE_PARAMS = [
    Param("logs", str, required=True, help="input auction log (JSONL)"),
    Param("model", str, required=True, help="trained model file"),
    Param("out-dir", str, required=True, help="output directory"),
    Param("split", str, "holdout", help="train|validation|holdout|all"),
    Param("figures", bool, True, help="render ROC and importance figures", is_flag=True),
]

_REPLAY_PARAMS = [
    Param("logs", str, required=True, help="input auction log (JSONL)"),
    Param("policy", str, required=True, help="trained model file, or 'none' for the static baseline"),
    Param("out-dir", str, required=True, help="output directory"),
    Param("split", str, "all", help="train|validation|holdout|all"),
    Param("sample-rate", float, None, help="replay only this seeded-hash share of records"),
    Param("sample-seed", int, 0, help="seed for the sampling hash"),
    Param("figures", bool, True, help="render the segment revenue figure", is_flag=True),
]

_SWEEP_PARAMS = [
    q for q in _TRAIN_PARAMS if q.name not in ("out", "high-value-cutoff", "gap-cutoff", "figures")
] + [
    Param("out-dir", str, required=True, help="output directory"),
    Param("hv-cutoffs", str, "5,10,15", help="comma list of high-value cutoffs to sweep ($)"),
    Param("gap-cutoffs", str, "0.5,1,2", help="comma list of gap cutoffs to sweep ($)"),
    Param("threads", int, 0, help="grid points evaluated in parallel (0 = machine parallelism)"),
    Param("figures", bool, True, help="render the lift heatmap", is_flag=True),
]


def _add_params(parser: argparse.ArgumentParser, params: Sequence[Param]) -> None:
    parser.add_argument(
        "--config", type=str, default=None, help="JSON config file; flags override its values"
    )
    for p in params:
        if p.is_flag:
            parser.add_argument(
                f"--{p.name}",
                action=argparse.BooleanOptionalAction,
                default=argparse.SUPPRESS,
                help=f"{p.help} (default: {p.default})",
            )
        else:
            parser.add_argument(
                f"--{p.name}",
                type=p.type,
                default=argparse.SUPPRESS,
                help=f"{p.help} (default: {p.default})" + (" [required]" if p.required else ""),
            )


def _resolve(args: argparse.Namespace, params: Sequence[Param]) -> dict:
    """default < config file < explicit flag; returns a kebab-keyed dict."""
    resolved = {p.name: p.default for p in params}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_conf = json.load(fh)
        except FileNotFoundError:
            raise CLIError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise CLIError(f"config file is not valid JSON: {exc}")
        known = {p.name: p for p in params}
        for key, value in file_conf.items():
            if key not in known:
                raise CLIError(f"unknown config key: {key}")
            p = known[key]
            if value is None or p.is_flag:
                resolved[key] = value
            else:
                resolved[key] = p.type(str(value))
    for p in params:
        if hasattr(args, p.dest):
            resolved[p.name] = getattr(args, p.dest)
    missing = [p.name for p in params if p.required and resolved[p.name] is None]
    if missing:
        raise CLIError("missing required option(s): " + ", ".join(f"--{m}" for m in missing))
    return resolved


def _require_file(path: str, what: str) -> str:
    if not os.path.isfile(path):
        raise CLIError(f"{what} not found: {path}")
    return path


def _money_list(text: str) -> list[Money]:
    return [Money(part.strip()) for part in str(text).split(",") if part.strip()]


def _int_list(text: str) -> list[int] | None:
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    return [int(p) for p in parts] or None


def _bucket_schema_from(conf: dict) -> BucketSchema:
    return BucketSchema(
        price_edges=tuple(_money_list(conf["bucket-edges"])),
        high_value_cutoff=Money(conf["high-value-cutoff"]),
        gap_cutoff=Money(conf["gap-cutoff"]),
        outlier_cap=Money(conf["outlier-cap"]),
    )


def _train_config_from(conf: dict) -> TrainConfig:
    group_map = None
    if conf.get("group-map"):
        with open(_require_file(conf["group-map"], "group map"), "r", encoding="utf-8") as fh:
            group_map = json.load(fh)
    return TrainConfig(
        cascade=CascadeTargets(
            max_stage_fpr=conf["cascade-f"],
            min_stage_tpr=conf["cascade-d"],
            target_fpr=conf["cascade-f-target"],
        ),
        separation_rounds=conf["separation-rounds"],
        bucket_rounds=conf["bucket-rounds"],
        stage_budgets=_int_list(conf["stage-budgets"]),
        max_stages=conf["max-stages"],
        max_stumps_per_stage=conf["max-stumps-per-stage"],
        onehot_max=conf["onehot-max"],
        reserve_scale=conf["reserve-scale"],
        group_map=group_map,
        seed=conf["seed"],
        train_frac=conf["train-frac"],
        val_frac=conf["val-frac"],
    )


def _split_for(conf: dict, records, training: dict):
    which = conf["split"]
    if which == "all":
        return records
    seed = training.get("seed", 0)
    tf = training.get("train_frac", 0.6)
    vf = training.get("val_frac", 0.2)
    train, val, holdout = split_records(records, seed, tf, vf)
    chosen = {"train": train, "validation": val, "holdout": holdout}[which]
    if not chosen:
        raise CLIError(f"split '{which}' selected zero records")
    return chosen


def _reason_counts(decisions) -> dict:
    counts: dict[str, int] = {}
    for d in decisions:
        counts[d.reason.value] = counts.get(d.reason.value, 0) + 1
    return dict(sorted(counts.items()))


# --- subcommands -----------------------------------------------------------


def _cmd_generate(args) -> int:
    conf = _resolve(args, _GENERATE_PARAMS)
    config = SyntheticConfig(
        n_records=conf["n"],
        seed=conf["seed"],
        high_value_fraction=conf["high-value-fraction"],
        feature_signal_strength=conf["signal-strength"],
        low_bid_log_mean=conf["low-bid-log-mean"],
        low_bid_log_sigma=conf["low-bid-log-sigma"],
        high_bid_spread=conf["high-bid-spread"],
        high_bid_log_noise=conf["high-bid-log-noise"],
        gap_scale=conf["gap-scale"],
        outlier_cap=conf["outlier-cap"],
    )
    records = generate_synthetic_logs(config)
    out = Path(conf["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    for rec in records:
        buf.write(json.dumps(rec.to_json_dict(), sort_keys=True))
        buf.write("\n")
    artifacts.atomic_write_text(out, buf.getvalue())
    artifacts.write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "generate", conf, inputs={}, artifacts={"logs": out},
    )
    print(f"wrote {len(records)} records to {out}", file=sys.stderr)
    return 0


def _cmd_train(args) -> int:
    conf = _resolve(args, _TRAIN_PARAMS)
    logs_path = _require_file(conf["logs"], "log file")
    records = read_logs(logs_path)
    bucket_schema = _bucket_schema_from(conf)
    config = _train_config_from(conf)

    def progress(entry):
        print(
            f"stage {entry.stage}: stumps={entry.stumps} theta={entry.threshold:.6f} "
            f"d={entry.detection_rate:.4f} f={entry.false_positive_rate:.4f} "
            f"D={entry.cumulative_detection:.4f} F={entry.cumulative_fpr:.6f}",
            file=sys.stderr,
        )

    trained = train_policy(records, bucket_schema, config, progress=progress)
    if trained.models.high_value.halted:
        print(f"cascade halted early: {trained.models.high_value.diagnostic}", file=sys.stderr)

    out = Path(conf["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    artifacts.write_json(out, model_bundle(trained, config))
    stage_csv = out.with_name(out.stem + ".stages.csv")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "stage", "stumps", "threshold", "detection_rate", "false_positive_rate",
        "cumulative_detection", "cumulative_fpr",
    ])
    for e in trained.stage_log:
        writer.writerow([
            e.stage, e.stumps, repr(e.threshold), repr(e.detection_rate),
            repr(e.false_positive_rate), repr(e.cumulative_detection), repr(e.cumulative_fpr),
        ])
    artifacts.atomic_write_text(stage_csv, buf.getvalue())

    outputs = {"model": out, "stage_log": stage_csv}
    if conf["figures"] and trained.stage_log:
        fig_path = out.with_name(out.stem + ".cascade_stages.png")
        figures.save_cascade_stages_figure(fig_path, trained.stage_log)
        outputs["cascade_stages_figure"] = fig_path
    inputs = {"logs": logs_path}
    if conf.get("group-map"):
        inputs["group_map"] = conf["group-map"]
    artifacts.write_manifest(
        out.with_name(out.name + ".manifest.json"), "train", conf, inputs, outputs
    )
    print(
        f"trained: {len(trained.models.high_value.stages)} cascade stages, "
        f"separation train AUC {trained.separation_train_auc:.3f}",
        file=sys.stderr,
    )
    return 0


def _cmd_evaluate(args) -> int:
    conf = _resolve(args, _EVALUATE_PARAMS)
    if conf["split"] not in _SPLITS:
        raise CLIError(f"unknown split: {conf['split']}")
    logs_path = _require_file(conf["logs"], "log file")
    model_path = _require_file(conf["model"], "model file")
    with open(model_path, "r", encoding="utf-8") as fh:
        policy, training = load_model_bundle(json.load(fh))

    records, _ = filter_outliers(read_logs(logs_path), policy.bucket_schema.outlier_cap)
    chosen = _split_for(conf, records, training)
    X = policy.feature_schema.encode_matrix(chosen)
    y_hv, y_sep, _ = label_arrays(chosen, policy.bucket_schema)
    if np.all(y_hv == y_hv[0]) or np.all(y_sep == y_sep[0]):
        raise CLIError("selected split has single-class labels; cannot evaluate")

    sep_scores = policy.separation.score(X)
    hv_scores = policy.high_value.score(X)
    sep_auc = roc_auc(sep_scores, y_sep)
    hv_auc = roc_auc(hv_scores, y_hv)
    sep_err = float(np.mean(policy.separation.predict(X) != y_sep))
    eps = policy.separation.training_errors
    bound = float(np.prod([2.0 * np.sqrt(e * (1.0 - e)) for e in eps])) if eps else 1.0
    rates = cascade_rates(policy.high_value, X, y_hv)
    statics = [effective_static_reserve(r.reserves) for r in chosen]
    decisions = policy.decide_matrix(X, statics)

    metrics = {
        "split": conf["split"],
        "records": len(chosen),
        "separation": {
            "auc": sep_auc,
            "error": sep_err,
            "training_error_bound": bound,
            "rounds": len(eps),
        },
        "high_value": {
            "auc": hv_auc,
            "overall_detection": rates.overall_detection,
            "overall_fpr": rates.overall_fpr,
            "stages": len(policy.high_value.stages),
            "recorded_rates": [list(r) for r in policy.high_value.stage_rates],
        },
        "decisions": {
            "changed": sum(1 for d in decisions if d.changed),
            "reasons": _reason_counts(decisions),
        },
    }

    out_dir = Path(conf["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts.write_json(out_dir / "metrics.json", metrics)
    write_decision_log(out_dir / "decisions.csv", [r.record_id for r in chosen], decisions, statics)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "stage", "pos_survivors", "pos_passed", "neg_survivors", "neg_passed",
        "detection_rate", "false_positive_rate",
    ])
    for i, ((d_i, f_i), counts) in enumerate(zip(rates.per_stage, rates.stage_counts), start=1):
        writer.writerow([i, counts[0], counts[1], counts[2], counts[3], repr(d_i), repr(f_i)])
    writer.writerow([
        "overall", "", "", "", "", repr(rates.overall_detection), repr(rates.overall_fpr),
    ])
    artifacts.atomic_write_text(out_dir / "cascade_rates.csv", buf.getvalue())

    outputs = {
        "metrics": out_dir / "metrics.json",
        "decisions": out_dir / "decisions.csv",
        "cascade_rates": out_dir / "cascade_rates.csv",
    }
    if conf["figures"]:
        names = policy.feature_schema.feature_names
        sep_curve = roc_curve(sep_scores, y_sep)
        hv_curve = roc_curve(hv_scores, y_hv)
        figures.save_roc_figure(
            out_dir / "roc_separation.png",
            [(conf["split"], sep_curve[0], sep_curve[1], sep_auc)],
            "price separation classifier",
        )
        figures.save_roc_figure(
            out_dir / "roc_high_value.png",
            [(conf["split"], hv_curve[0], hv_curve[1], hv_auc)],
            "high-value cascade",
        )
        outputs["roc_separation"] = out_dir / "roc_separation.png"
        outputs["roc_high_value"] = out_dir / "roc_high_value.png"
        sep_imp = policy.separation.feature_importance()
        figures.save_feature_importance_figure(
            out_dir / "feature_importance_separation.png",
            [names[i] for i in sep_imp], list(sep_imp.values()),
            "separation classifier feature importance",
        )
        outputs["feature_importance_separation"] = out_dir / "feature_importance_separation.png"
        hv_imp: dict[int, float] = {}
        for stage in policy.high_value.stages:
            for i, m in stage.feature_importance().items():
                hv_imp[i] = hv_imp.get(i, 0.0) + m
        if hv_imp:
            figures.save_feature_importance_figure(
                out_dir / "feature_importance_high_value.png",
                [names[i] for i in hv_imp], list(hv_imp.values()),
                "high-value cascade feature importance",
            )
            outputs["feature_importance_high_value"] = out_dir / "feature_importance_high_value.png"
    artifacts.write_manifest(
        out_dir / "manifest.json", "evaluate", conf,
        {"logs": logs_path, "model": model_path}, outputs,
    )
    print(f"separation AUC {sep_auc:.4f}, high-value AUC {hv_auc:.4f} on split '{conf['split']}'")
    return 0


def _cmd_replay(args) -> int:
    conf = _resolve(args, _REPLAY_PARAMS)
    if conf["split"] not in _SPLITS:
        raise CLIError(f"unknown split: {conf['split']}")
    logs_path = _require_file(conf["logs"], "log file")
    records = read_logs(logs_path)
    out_dir = Path(conf["out-dir"])
    inputs = {"logs": logs_path}

    if conf["policy"] == "none":
        report = replay(
            records, None, sample_rate=conf["sample-rate"], sample_seed=conf["sample-seed"]
        )
        out_dir.mkdir(parents=True, exist_ok=True)
        report.write_csv(out_dir / "report.csv")
        artifacts.write_json(out_dir / "report.json", report.to_json_dict())
        artifacts.write_manifest(
            out_dir / "manifest.json", "replay", conf, inputs,
            {"report_csv": out_dir / "report.csv", "report_json": out_dir / "report.json"},
        )
        print(f"baseline revenue {report.total_revenue} over {report.total_auctions} auctions")
        return 0

    model_path = _require_file(conf["policy"], "model file")
    with open(model_path, "r", encoding="utf-8") as fh:
        policy, training = load_model_bundle(json.load(fh))
    inputs["model"] = model_path
    records, _ = filter_outliers(records, policy.bucket_schema.outlier_cap)
    chosen = _split_for(conf, records, training)
    new_report, base_report, decisions, kept = replay_with_baseline(
        chosen, policy, sample_rate=conf["sample-rate"], sample_seed=conf["sample-seed"]
    )
    lift = compute_lift(new_report, base_report)

    out_dir.mkdir(parents=True, exist_ok=True)
    new_report.write_csv(out_dir / "report.csv")
    base_report.write_csv(out_dir / "baseline.csv")
    artifacts.write_json(out_dir / "report.json", new_report.to_json_dict())
    artifacts.write_json(out_dir / "baseline.json", base_report.to_json_dict())
    write_lift_json(out_dir / "lift.json", lift)
    statics = [effective_static_reserve(r.reserves) for r in kept]
    write_decision_log(out_dir / "decisions.csv", [r.record_id for r in kept], decisions, statics)
    outputs = {
        "report_csv": out_dir / "report.csv",
        "baseline_csv": out_dir / "baseline.csv",
        "report_json": out_dir / "report.json",
        "baseline_json": out_dir / "baseline.json",
        "lift": out_dir / "lift.json",
        "decisions": out_dir / "decisions.csv",
    }
    if conf["figures"]:
        figures.save_segment_revenue_figure(
            out_dir / "revenue_segments.png", base_report, new_report
        )
        outputs["revenue_segments_figure"] = out_dir / "revenue_segments.png"
    artifacts.write_manifest(out_dir / "manifest.json", "replay", conf, inputs, outputs)
    print(lift.summary_line())
    return 0


def _cmd_sweep(args) -> int:
    conf = _resolve(args, _SWEEP_PARAMS)
    logs_path = _require_file(conf["logs"], "log file")
    records = read_logs(logs_path)
    hv_cutoffs = _money_list(conf["hv-cutoffs"])
    gap_cutoffs = _money_list(conf["gap-cutoffs"])
    if not hv_cutoffs or not gap_cutoffs:
        raise CLIError("sweep grid is empty")
    edges = tuple(_money_list(conf["bucket-edges"]))
    for hv in hv_cutoffs:
        if hv not in edges:
            raise CLIError(f"high-value cutoff {hv} is not one of the bucket edges")
    base_schema = BucketSchema(
        price_edges=edges,
        high_value_cutoff=hv_cutoffs[0],
        gap_cutoff=gap_cutoffs[0],
        outlier_cap=Money(conf["outlier-cap"]),
    )
    config = _train_config_from(conf)
    threads = conf["threads"] or os.cpu_count() or 1
    result = grid_search_cutoffs(
        records, make_grid_trainer(config), base_schema, hv_cutoffs, gap_cutoffs, threads=threads
    )

    out_dir = Path(conf["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    result.write_csv(out_dir / "sweep.csv")
    best = result.best
    artifacts.write_json(
        out_dir / "best.json",
        None
        if best is None
        else {
            "high_value_cutoff": str(best.high_value_cutoff),
            "gap_cutoff": str(best.gap_cutoff),
            "lift": best.lift,
            "effected_count": best.effected_count,
        },
    )
    outputs = {"sweep": out_dir / "sweep.csv", "best": out_dir / "best.json"}
    if conf["figures"]:
        by_cell = {(p.high_value_cutoff, p.gap_cutoff): p for p in result.points}
        grid = [
            [
                float("nan")
                if by_cell[(hv, gap)].lift is None
                else by_cell[(hv, gap)].lift
                for gap in gap_cutoffs
            ]
            for hv in hv_cutoffs
        ]
        figures.save_sweep_heatmap(out_dir / "sweep_lift.png", hv_cutoffs, gap_cutoffs, np.array(grid))
        outputs["heatmap"] = out_dir / "sweep_lift.png"
    artifacts.write_manifest(out_dir / "manifest.json", "sweep", conf, {"logs": logs_path}, outputs)
    if best is None:
        print("sweep finished: every grid point was skipped")
    else:
        print(
            f"best cutoffs: high-value {best.high_value_cutoff}, gap {best.gap_cutoff}, "
            f"lift {best.lift * 100:.2f}%"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="floorboost",
        description="Train boosted-cascade reserve pricing models and replay auction logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text, params, func in (
        ("generate", "generate a seeded synthetic auction log", _GENERATE_PARAMS, _cmd_generate),
        ("train", "fit schema, separation classifier, cascade and bucket predictors",
         _TRAIN_PARAMS, _cmd_train),
        ("evaluate", "AUC, cascade rates and a decision log on a split",
         _EVALUATE_PARAMS, _cmd_evaluate),
        ("replay", "segmented revenue report and lift vs the static baseline",
         _REPLAY_PARAMS, _cmd_replay),
        ("sweep", "grid search over the two labeling cutoffs", _SWEEP_PARAMS, _cmd_sweep),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_params(p, params)
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (
        CLIError,
        TrainingError,
        CascadeConfigError,
        DegenerateGridPoint,
        EncodingError,
        ValueError,
        OSError,
    ) as exc:
        message = str(exc).replace("\n", " ")
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
