"""Attentional cascade of boosted classifiers.

A cascade predicts positive only when every stage does; any negative
verdict terminates evaluation. Each stage is grown stump by stump until
its conditional false-positive rate on validation-set survivors drops to
the per-stage target, while its threshold is tuned so the conditional
detection rate stays at or above the per-stage minimum. After a stage is
accepted, the negative training pool is rebuilt from the false positives
the cascade still makes on the original negatives, so later stages face
only the hard cases. Overall rates are the per-stage products
D = prod(d_i), F = prod(f_i), both of which fall roughly exponentially
with depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .boosting import AdaBoostTrainer, StrongClassifier, TrainingError


class CascadeConfigError(ValueError):
    """Invalid cascade training targets or budgets."""


@dataclass(frozen=True)
class CascadeTargets:
    """Per-stage and overall rate goals; all three must be set explicitly."""

    max_stage_fpr: float  # f
    min_stage_tpr: float  # d
    target_fpr: float  # overall goal the outer loop drives toward

    def __post_init__(self):
        if not 0.0 < self.max_stage_fpr < 1.0:
            raise CascadeConfigError(f"max_stage_fpr must be in (0,1), got {self.max_stage_fpr}")
        if not 0.0 < self.min_stage_tpr <= 1.0:
            raise CascadeConfigError(f"min_stage_tpr must be in (0,1], got {self.min_stage_tpr}")
        if not 0.0 < self.target_fpr < 1.0:
            raise CascadeConfigError(f"target_fpr must be in (0,1), got {self.target_fpr}")


@dataclass
class TrainPools:
    """Training positives/negatives plus the held-out validation split."""

    positives: np.ndarray
    negatives: np.ndarray
    validation_x: np.ndarray
    validation_y: np.ndarray  # +1 / -1

    def __post_init__(self):
        if len(self.positives) == 0 or len(self.negatives) == 0:
            raise TrainingError("cascade training needs both positive and negative pools")
        if not (np.any(self.validation_y > 0) and np.any(self.validation_y < 0)):
            raise TrainingError("validation split must contain both classes")


@dataclass
class StageLogEntry:
    """One accepted stage, as reported in the training progress log."""

    stage: int
    stumps: int
    threshold: float
    detection_rate: float
    false_positive_rate: float
    cumulative_detection: float
    cumulative_fpr: float


def adjust_stage_threshold(
    stage: StrongClassifier, validation_positives: np.ndarray, d_target: float
) -> float:
    """Largest decision threshold keeping the detection rate on the given
    positives at or above ``d_target``."""
    if not 0.0 < d_target <= 1.0:
        raise CascadeConfigError(f"d_target must be in (0,1], got {d_target}")
    validation_positives = np.atleast_2d(validation_positives)
    if len(validation_positives) == 0:
        raise TrainingError("cannot tune a threshold without validation positives")
    scores = stage.score(validation_positives)
    return threshold_for_scores(scores, d_target)


def threshold_for_scores(positive_scores: np.ndarray, d_target: float) -> float:
    """Threshold just below the detection-rate quantile of positive scores."""
    keep = math.ceil(d_target * len(positive_scores))
    kth = np.sort(positive_scores)[::-1][keep - 1]
    return float(np.nextafter(kth, -np.inf))


class CascadeModel:
    """Ordered conjunction of strong classifiers with recorded stage rates."""

    def __init__(
        self,
        stages: Sequence[StrongClassifier] | None = None,
        stage_rates: Sequence[tuple[float, float]] | None = None,
        targets: CascadeTargets | None = None,
        halted: bool = False,
        diagnostic: str | None = None,
    ):
        self.stages: list[StrongClassifier] = list(stages or [])
        self.stage_rates: list[tuple[float, float]] = [tuple(r) for r in (stage_rates or [])]
        self.targets = targets
        self.halted = halted
        self.diagnostic = diagnostic
        self.stage_log: list[StageLogEntry] = []

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Boolean conjunction over stages; rejected rows stop being
        evaluated at their first negative stage."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        alive = np.ones(X.shape[0], dtype=bool)
        for stage in self.stages:
            if not alive.any():
                break
            idx = np.flatnonzero(alive)
            passed = stage.predict(X[idx]) > 0
            alive[idx[~passed]] = False
        return alive

    def predict_one(self, x: np.ndarray) -> bool:
        return bool(self.predict(np.asarray(x)[None, :])[0])

    def score(self, X: np.ndarray) -> np.ndarray:
        """Ranking score: stages survived, plus the squashed margin at the
        exit stage (or at the final stage for full passes). Monotone with
        how close an example came to passing the whole cascade."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        n = X.shape[0]
        if not self.stages:
            return np.ones(n)
        out = np.zeros(n)
        alive = np.ones(n, dtype=bool)
        for depth, stage in enumerate(self.stages):
            idx = np.flatnonzero(alive)
            if idx.size == 0:
                break
            margins = stage.score(X[idx]) - stage.decision_threshold
            passed = margins > 0
            squashed = 1.0 / (1.0 + np.exp(-margins))
            exited = idx[~passed]
            out[exited] = depth + squashed[~passed]
            if depth == len(self.stages) - 1:
                out[idx[passed]] = depth + 1 + squashed[passed]
            alive[exited] = False
        return out

    def overall_rates(self) -> tuple[float, float]:
        """(D, F) as the products of the recorded per-stage rates."""
        d = f = 1.0
        for d_i, f_i in self.stage_rates:
            d *= d_i
            f *= f_i
        return d, f

    def to_dict(self) -> dict:
        return {
            "stages": [s.to_dict() for s in self.stages],
            "stage_rates": [list(r) for r in self.stage_rates],
            "targets": None
            if self.targets is None
            else {
                "max_stage_fpr": self.targets.max_stage_fpr,
                "min_stage_tpr": self.targets.min_stage_tpr,
                "target_fpr": self.targets.target_fpr,
            },
            "halted": self.halted,
            "diagnostic": self.diagnostic,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CascadeModel":
        targets = d.get("targets")
        return cls(
            stages=[StrongClassifier.from_dict(s) for s in d["stages"]],
            stage_rates=[tuple(r) for r in d["stage_rates"]],
            targets=None if targets is None else CascadeTargets(**targets),
            halted=d.get("halted", False),
            diagnostic=d.get("diagnostic"),
        )


def train_cascade(
    pools: TrainPools,
    targets: CascadeTargets,
    stage_budgets: Sequence[int] | None = None,
    max_stages: int = 25,
    max_stumps_per_stage: int = 400,
    progress: Callable[[StageLogEntry], None] | None = None,
) -> CascadeModel:
    """Grow cascade stages until the overall validation FPR reaches the
    target, or a safety cap converts a would-be endless loop into a halt
    with a partial model and a diagnostic."""
    model = CascadeModel(targets=targets)
    val_pos = pools.validation_x[pools.validation_y > 0]
    val_neg = pools.validation_x[pools.validation_y < 0]
    pos_alive = np.ones(len(val_pos), dtype=bool)
    neg_alive = np.ones(len(val_neg), dtype=bool)
    cum_d, cum_f = 1.0, 1.0
    negatives = pools.negatives

    for stage_index in range(1, max_stages + 1):
        if cum_f <= targets.target_fpr:
            break
        if len(negatives) == 0:
            model.halted = True
            model.diagnostic = (
                "negative training pool exhausted before reaching the target fpr"
            )
            break
        surviving_pos = val_pos[pos_alive]
        surviving_neg = val_neg[neg_alive]
        if len(surviving_pos) == 0 or len(surviving_neg) == 0:
            model.halted = True
            model.diagnostic = "validation survivors exhausted before reaching the target fpr"
            break

        budget = _budget_for(stage_budgets, stage_index - 1)
        X = np.vstack([pools.positives, negatives])
        y = np.concatenate([
            np.ones(len(pools.positives), dtype=np.int8),
            -np.ones(len(negatives), dtype=np.int8),
        ])
        trainer = AdaBoostTrainer(X, y)
        trainer.boost(min(budget, max_stumps_per_stage))
        # margins of the growing stage on the validation survivors, updated
        # incrementally as stumps are added
        pos_scores = np.zeros(len(surviving_pos))
        neg_scores = np.zeros(len(surviving_neg))
        scored = 0
        capped = False
        while True:
            for alpha, stump in trainer.stages[scored:]:
                pos_scores += alpha * stump.predict(surviving_pos)
                neg_scores += alpha * stump.predict(surviving_neg)
            scored = len(trainer.stages)
            theta = threshold_for_scores(pos_scores, targets.min_stage_tpr)
            pass_neg = neg_scores > theta
            f_i = float(np.mean(pass_neg))
            if f_i <= targets.max_stage_fpr:
                break
            if scored >= max_stumps_per_stage:
                capped = True
                break
            trainer.boost(1)
        stage = trainer.classifier()
        stage.decision_threshold = theta
        pass_pos = pos_scores > theta
        d_i = float(np.mean(pass_pos))

        model.stages.append(stage)
        model.stage_rates.append((d_i, f_i))
        pos_alive[pos_alive] = pass_pos
        neg_alive[neg_alive] = pass_neg
        cum_d *= d_i
        cum_f *= f_i
        entry = StageLogEntry(
            stage=stage_index,
            stumps=len(stage.stages),
            threshold=stage.decision_threshold,
            detection_rate=d_i,
            false_positive_rate=f_i,
            cumulative_detection=cum_d,
            cumulative_fpr=cum_f,
        )
        model.stage_log.append(entry)
        if progress is not None:
            progress(entry)

        if capped:
            model.halted = True
            model.diagnostic = (
                f"stage {stage_index} hit the {max_stumps_per_stage}-stump cap before "
                f"meeting the per-stage fpr target {targets.max_stage_fpr}"
            )
            break

        # rebuild the negative pool from the cascade's remaining false positives
        if cum_f > targets.target_fpr:
            negatives = pools.negatives[model.predict(pools.negatives)]
    else:
        if cum_f > targets.target_fpr:
            model.halted = True
            model.diagnostic = (
                f"reached the {max_stages}-stage cap with validation fpr {cum_f:.6f} "
                f"above the target {targets.target_fpr}"
            )
    return model


def _budget_for(stage_budgets: Sequence[int] | None, i: int) -> int:
    if stage_budgets:
        return stage_budgets[min(i, len(stage_budgets) - 1)]
    return 2 << i  # 2, 4, 8, ... doubling start budgets


@dataclass
class CascadeRates:
    """Measured cascade rates on a labeled evaluation set.

    Per-stage rates are conditional on surviving all earlier stages; the
    integer counts are kept so the product identity
    D == prod(d_i), F == prod(f_i) can be checked exactly.
    """

    per_stage: list[tuple[float, float]] = field(default_factory=list)
    stage_counts: list[tuple[int, int, int, int]] = field(default_factory=list)
    # (pos_survivors, pos_passed, neg_survivors, neg_passed) per stage
    overall_detection: float = 1.0
    overall_fpr: float = 1.0

    def product_identity_holds(self) -> bool:
        if not self.stage_counts:
            return True
        n_pos0, _, n_neg0, _ = self.stage_counts[0]
        d = Fraction(1)
        f = Fraction(1)
        for pos_s, pos_p, neg_s, neg_p in self.stage_counts:
            d *= Fraction(pos_p, pos_s) if pos_s else Fraction(1)
            f *= Fraction(neg_p, neg_s) if neg_s else Fraction(1)
        final_pos = self.stage_counts[-1][1]
        final_neg = self.stage_counts[-1][3]
        return d == Fraction(final_pos, n_pos0) and f == Fraction(final_neg, n_neg0)


def cascade_rates(model: CascadeModel, X: np.ndarray, y: np.ndarray) -> CascadeRates:
    """Per-stage conditional and overall (D, F) on a labeled eval set."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y)
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("evaluation set must contain both classes")
    pos = X[y > 0]
    neg = X[y < 0]
    rates = CascadeRates()
    pos_alive = np.ones(len(pos), dtype=bool)
    neg_alive = np.ones(len(neg), dtype=bool)
    for stage in model.stages:
        pos_s, neg_s = int(pos_alive.sum()), int(neg_alive.sum())
        pass_pos = stage.predict(pos[pos_alive]) > 0 if pos_s else np.zeros(0, dtype=bool)
        pass_neg = stage.predict(neg[neg_alive]) > 0 if neg_s else np.zeros(0, dtype=bool)
        pos_p, neg_p = int(pass_pos.sum()), int(pass_neg.sum())
        d_i = pos_p / pos_s if pos_s else 1.0
        f_i = neg_p / neg_s if neg_s else 1.0
        rates.per_stage.append((d_i, f_i))
        rates.stage_counts.append((pos_s, pos_p, neg_s, neg_p))
        pos_alive[pos_alive] = pass_pos
        neg_alive[neg_alive] = pass_neg
    rates.overall_detection = float(pos_alive.sum() / len(pos))
    rates.overall_fpr = float(neg_alive.sum() / len(neg))
    return rates
