"""Per-auction reserve decisions from the two classifier families.

The pipeline gates cheaply first: an auction must be flagged by the
price-separation classifier, then pass the high-value cascade, before the
winning-bucket predictors are consulted at all. A qualifying auction gets
the lower edge of its predicted price bucket as the new hard reserve
(optionally scaled down for risk tuning); everything else keeps its static
effective reserve untouched.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .auction import effective_static_reserve
from .boosting import StrongClassifier
from .cascade import CascadeModel
from .features import BucketSchema, FeatureSchema, RawRecord
from .money import Money


class Reason(str, Enum):
    NOT_SEPARATED = "not_separated"
    NOT_HIGH_VALUE = "not_high_value"
    BUCKET_FLOOR_NOT_ABOVE_STATIC = "bucket_floor_not_above_static"
    APPLIED = "applied"


@dataclass(frozen=True)
class ReserveDecision:
    """What to do with one auction's reserve.

    ``reserve`` is the effective reserve the auction should run under:
    the static one when unchanged, the recommended one when changed.
    """

    changed: bool
    reserve: Money
    reason: Reason
    predicted_bucket: int | None = None
    separation_margin: float = 0.0
    cascade_passed: bool = False

    def __post_init__(self):
        if self.changed and self.reason is not Reason.APPLIED:
            raise ValueError("changed decisions must carry reason 'applied'")


@dataclass
class EvalCounters:
    """How many records each pipeline step actually scored; used to verify
    the gates short-circuit in order."""

    separation: int = 0
    cascade: int = 0
    bucket: int = 0


def bucket_floor(bucket_id: int, schema: BucketSchema) -> Money:
    """Lower edge of a price bucket."""
    return schema.bucket_floor(bucket_id)


@dataclass
class PolicyModels:
    """Everything needed to turn a raw record into a reserve decision."""

    feature_schema: FeatureSchema
    bucket_schema: BucketSchema
    separation: StrongClassifier
    high_value: CascadeModel
    bucket_classifiers: dict[int, StrongClassifier]
    reserve_scale: float = 1.0
    counters: EvalCounters = field(default_factory=EvalCounters)

    def __post_init__(self):
        if not 0.0 < self.reserve_scale <= 1.0:
            raise ValueError(f"reserve_scale must be in (0,1], got {self.reserve_scale}")
        missing = [
            b for b in self.bucket_schema.high_value_bucket_ids()
            if b not in self.bucket_classifiers
        ]
        if missing:
            raise ValueError(f"bucket predictor missing for high-value buckets {missing}")

    # -- scoring -------------------------------------------------------

    def predict_top_bucket(self, X: np.ndarray) -> np.ndarray:
        """Argmax over the per-bucket one-vs-rest margins; exact ties go to
        the lower (cheaper) bucket."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        bucket_ids = sorted(self.bucket_classifiers)
        scores = np.stack([self.bucket_classifiers[b].score(X) for b in bucket_ids])
        ids = np.asarray(bucket_ids)
        return ids[np.argmax(scores, axis=0)]

    def decide_matrix(
        self, X: np.ndarray, static_reserves: Sequence[Money]
    ) -> list[ReserveDecision]:
        """Batch decisions for pre-encoded records; the cascade only ever
        sees rows the separation gate passed, and the bucket predictors
        only rows the cascade passed."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        n = X.shape[0]
        if n != len(static_reserves):
            raise ValueError("one static reserve per record required")
        sep_margin = self.separation.score(X) - self.separation.decision_threshold
        self.counters.separation += n
        separated = sep_margin > 0

        decisions: list[ReserveDecision | None] = [None] * n
        for i in np.flatnonzero(~separated):
            decisions[i] = ReserveDecision(
                changed=False,
                reserve=static_reserves[i],
                reason=Reason.NOT_SEPARATED,
                separation_margin=float(sep_margin[i]),
            )

        sep_idx = np.flatnonzero(separated)
        if sep_idx.size:
            self.counters.cascade += int(sep_idx.size)
            passed = self.high_value.predict(X[sep_idx])
            for i in sep_idx[~passed]:
                decisions[i] = ReserveDecision(
                    changed=False,
                    reserve=static_reserves[i],
                    reason=Reason.NOT_HIGH_VALUE,
                    separation_margin=float(sep_margin[i]),
                )
            hv_idx = sep_idx[passed]
            if hv_idx.size:
                self.counters.bucket += int(hv_idx.size)
                buckets = self.predict_top_bucket(X[hv_idx])
                for i, b in zip(hv_idx, buckets):
                    floor = self.bucket_schema.bucket_floor(int(b))
                    reserve = floor.scale(self.reserve_scale)
                    if reserve > static_reserves[i]:
                        decisions[i] = ReserveDecision(
                            changed=True,
                            reserve=reserve,
                            reason=Reason.APPLIED,
                            predicted_bucket=int(b),
                            separation_margin=float(sep_margin[i]),
                            cascade_passed=True,
                        )
                    else:
                        decisions[i] = ReserveDecision(
                            changed=False,
                            reserve=static_reserves[i],
                            reason=Reason.BUCKET_FLOOR_NOT_ABOVE_STATIC,
                            predicted_bucket=int(b),
                            separation_margin=float(sep_margin[i]),
                            cascade_passed=True,
                        )
        return decisions

    def to_dict(self) -> dict:
        return {
            "feature_schema": self.feature_schema.to_dict(),
            "bucket_schema": self.bucket_schema.to_dict(),
            "separation": self.separation.to_dict(),
            "high_value": self.high_value.to_dict(),
            "bucket_classifiers": {
                str(b): clf.to_dict() for b, clf in sorted(self.bucket_classifiers.items())
            },
            "reserve_scale": self.reserve_scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyModels":
        return cls(
            feature_schema=FeatureSchema.from_dict(d["feature_schema"]),
            bucket_schema=BucketSchema.from_dict(d["bucket_schema"]),
            separation=StrongClassifier.from_dict(d["separation"]),
            high_value=CascadeModel.from_dict(d["high_value"]),
            bucket_classifiers={
                int(b): StrongClassifier.from_dict(c)
                for b, c in d["bucket_classifiers"].items()
            },
            reserve_scale=float(d["reserve_scale"]),
        )


def recommend_reserve(record: RawRecord, models: PolicyModels) -> ReserveDecision:
    """Reserve decision for a single raw record."""
    x = models.feature_schema.encode(record)
    static = effective_static_reserve(record.reserves)
    return models.decide_matrix(x[None, :], [static])[0]


def write_decision_log(path, record_ids: Sequence[str], decisions: Sequence[ReserveDecision],
                       static_reserves: Sequence[Money]) -> None:
    """Per-auction decision trace as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "record_id",
            "reason",
            "static_reserve",
            "recommended_reserve",
            "predicted_bucket",
            "separation_margin",
            "cascade_passed",
        ])
        for rid, dec, static in zip(record_ids, decisions, static_reserves):
            writer.writerow([
                rid,
                dec.reason.value,
                str(static),
                str(dec.reserve),
                "" if dec.predicted_bucket is None else dec.predicted_bucket,
                repr(dec.separation_margin),
                int(dec.cascade_passed),
            ])
