"""End-to-end model training over auction logs.

Records are split train/validation/holdout by a seeded hash of their id
(stable under reordering), outliers dropped, a feature schema fitted on
the training split only, and the three model families trained: the
price-separation classifier, the high-value cascade, and the one-vs-rest
winning-bucket predictors over the high-value buckets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Mapping, Sequence

import numpy as np

from .boosting import StrongClassifier, DecisionStump, adaboost_train, roc_auc
from .cascade import CascadeTargets, StageLogEntry, TrainPools, train_cascade
from .features import BucketSchema, FeatureSchema, RawRecord, filter_outliers, label_arrays
from .policy import PolicyModels
from .replay import (
    DegenerateGridPoint,
    GridEvaluation,
    compute_lift,
    policy_decisions,
    replay_decisions,
)


def _split_key(record_id: str, seed: int) -> float:
    digest = hashlib.sha256(f"split:{seed}:{record_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def split_records(
    records: Sequence[RawRecord], seed: int, train_frac: float = 0.6, val_frac: float = 0.2
) -> tuple[list[RawRecord], list[RawRecord], list[RawRecord]]:
    """Deterministic (train, validation, holdout) split by record id hash."""
    if train_frac <= 0 or val_frac <= 0 or train_frac + val_frac >= 1:
        raise ValueError("need 0 < train_frac, 0 < val_frac, train_frac+val_frac < 1")
    train, val, holdout = [], [], []
    for r in records:
        u = _split_key(r.record_id, seed)
        if u < train_frac:
            train.append(r)
        elif u < train_frac + val_frac:
            val.append(r)
        else:
            holdout.append(r)
    return train, val, holdout


@dataclass
class TrainConfig:
    cascade: CascadeTargets
    separation_rounds: int = 48
    bucket_rounds: int = 32
    stage_budgets: Sequence[int] | None = None
    max_stages: int = 25
    max_stumps_per_stage: int = 400
    onehot_max: int = 16
    reserve_scale: float = 1.0
    group_map: Mapping[str, str] | None = None
    seed: int = 0
    train_frac: float = 0.6
    val_frac: float = 0.2


@dataclass
class TrainedPolicy:
    models: PolicyModels
    stage_log: list[StageLogEntry]
    outliers_removed: int
    split_sizes: tuple[int, int, int]
    separation_train_auc: float
    metrics: dict = dataclass_field(default_factory=dict)


def _constant_negative_classifier() -> StrongClassifier:
    # a bucket with no training examples can never win the argmax
    return StrongClassifier([(1.0, DecisionStump(0, float("-inf"), -1))])


def train_policy(
    records: Sequence[RawRecord],
    bucket_schema: BucketSchema,
    config: TrainConfig,
    progress: Callable[[StageLogEntry], None] | None = None,
) -> TrainedPolicy:
    kept, removed = filter_outliers(records, bucket_schema.outlier_cap)
    train, val, _ = split_records(kept, config.seed, config.train_frac, config.val_frac)
    if not train or not val:
        raise DegenerateGridPoint("train or validation split is empty")

    schema = FeatureSchema.fit(train, group_map=config.group_map, onehot_max=config.onehot_max)
    X_train = schema.encode_matrix(train)
    X_val = schema.encode_matrix(val)
    y_hv, y_sep, buckets = label_arrays(train, bucket_schema)
    y_hv_val, _, _ = label_arrays(val, bucket_schema)

    for name, y in (("high_value", y_hv), ("separation", y_sep)):
        if np.all(y == y[0]):
            raise DegenerateGridPoint(
                f"{name} labels are single-class at cutoff "
                f"hv={bucket_schema.high_value_cutoff} gap={bucket_schema.gap_cutoff}"
            )
    if np.all(y_hv_val == y_hv_val[0]):
        raise DegenerateGridPoint("validation high_value labels are single-class")

    separation = adaboost_train(X_train, y_sep, config.separation_rounds)
    sep_auc = roc_auc(separation.score(X_train), y_sep)

    pools = TrainPools(
        positives=X_train[y_hv > 0],
        negatives=X_train[y_hv < 0],
        validation_x=X_val,
        validation_y=y_hv_val,
    )
    cascade = train_cascade(
        pools,
        config.cascade,
        stage_budgets=config.stage_budgets,
        max_stages=config.max_stages,
        max_stumps_per_stage=config.max_stumps_per_stage,
        progress=progress,
    )

    bucket_classifiers: dict[int, StrongClassifier] = {}
    hv_mask = y_hv > 0
    X_hv = X_train[hv_mask]
    hv_buckets = buckets[hv_mask]
    for b in bucket_schema.high_value_bucket_ids():
        y_b = np.where(hv_buckets == b, 1, -1).astype(np.int8)
        if np.all(y_b == y_b[0]):
            bucket_classifiers[b] = _constant_negative_classifier()
        else:
            bucket_classifiers[b] = adaboost_train(X_hv, y_b, config.bucket_rounds)

    for clf in (separation, *cascade.stages, *bucket_classifiers.values()):
        clf.schema_id = schema.schema_id

    models = PolicyModels(
        feature_schema=schema,
        bucket_schema=bucket_schema,
        separation=separation,
        high_value=cascade,
        bucket_classifiers=bucket_classifiers,
        reserve_scale=config.reserve_scale,
    )
    return TrainedPolicy(
        models=models,
        stage_log=list(cascade.stage_log),
        outliers_removed=removed,
        split_sizes=(len(train), len(val), len(kept) - len(train) - len(val)),
        separation_train_auc=sep_auc,
    )


def model_bundle(trained: TrainedPolicy, config: TrainConfig) -> dict:
    """Serializable model artifact: the policy plus how it was trained."""
    return {
        "format": "floorboost-model-v1",
        "policy": trained.models.to_dict(),
        "training": {
            "seed": config.seed,
            "train_frac": config.train_frac,
            "val_frac": config.val_frac,
            "separation_rounds": config.separation_rounds,
            "bucket_rounds": config.bucket_rounds,
            "cascade_targets": {
                "max_stage_fpr": config.cascade.max_stage_fpr,
                "min_stage_tpr": config.cascade.min_stage_tpr,
                "target_fpr": config.cascade.target_fpr,
            },
            "outliers_removed": trained.outliers_removed,
            "split_sizes": list(trained.split_sizes),
            "separation_train_auc": trained.separation_train_auc,
            "stage_log": [
                {
                    "stage": e.stage,
                    "stumps": e.stumps,
                    "threshold": e.threshold,
                    "detection_rate": e.detection_rate,
                    "false_positive_rate": e.false_positive_rate,
                    "cumulative_detection": e.cumulative_detection,
                    "cumulative_fpr": e.cumulative_fpr,
                }
                for e in trained.stage_log
            ],
        },
    }


def load_model_bundle(bundle: dict) -> tuple[PolicyModels, dict]:
    if bundle.get("format") != "floorboost-model-v1":
        raise ValueError("not a floorboost model file")
    return PolicyModels.from_dict(bundle["policy"]), bundle.get("training", {})


def make_grid_trainer(config: TrainConfig) -> Callable[[Sequence[RawRecord], BucketSchema], GridEvaluation]:
    """Pipeline closure for the cutoff grid search: retrain at the given
    schema, replay the holdout split, return the lift."""

    def train_and_decide(records: Sequence[RawRecord], schema: BucketSchema) -> GridEvaluation:
        kept, _ = filter_outliers(records, schema.outlier_cap)
        _, _, holdout = split_records(kept, config.seed, config.train_frac, config.val_frac)
        if not holdout:
            raise DegenerateGridPoint("holdout split is empty")
        trained = train_policy(records, schema, config)
        decisions = policy_decisions(holdout, trained.models)
        new_report, base_report = replay_decisions(
            holdout, decisions, schema.high_value_cutoff
        )
        lift = compute_lift(new_report, base_report)
        effected = sum(1 for d in decisions if d.changed)
        return GridEvaluation(lift=lift.relative_lift, effected_count=effected)

    return train_and_decide
