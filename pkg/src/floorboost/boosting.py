"""Decision-stump weak learners, AdaBoost training, and ROC/AUC metrics.

The boosting loop follows the classic schedule: start from uniform example
weights, fit the stump minimizing the weighted error, weight it by
alpha = 0.5*ln((1-eps)/eps), multiply example weights by exp(-alpha*y*h(x)),
renormalize, repeat. A trained ensemble scores by the weighted stump sum
and predicts positive strictly above its decision threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EPS_CLAMP = 1e-10


class TrainingError(RuntimeError):
    """Training cannot proceed on the given data."""


def compute_alpha(epsilon: float) -> float:
    """Stage weight for a weak learner with weighted error ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie strictly in (0, 1), got {epsilon}")
    return 0.5 * math.log((1.0 - epsilon) / epsilon)


@dataclass(frozen=True)
class DecisionStump:
    """Single-feature threshold rule: predicts ``polarity`` where the
    feature value is at or above the threshold, ``-polarity`` below."""

    feature_index: int
    threshold: float
    polarity: int  # +1 or -1

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")

    def predict(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.feature_index]
        return np.where(col >= self.threshold, self.polarity, -self.polarity)


class StrongClassifier:
    """Weighted stump ensemble with a tunable decision threshold.

    ``score`` is the signed margin sum(alpha_t * h_t(x)); ``predict`` is +1
    strictly above ``decision_threshold`` and -1 otherwise (ties go
    negative, the conservative side for reserve pricing).
    """

    def __init__(
        self,
        stages: Sequence[tuple[float, DecisionStump]] | None = None,
        decision_threshold: float = 0.0,
        training_errors: Sequence[float] | None = None,
        schema_id: str = "",
    ):
        self.stages: list[tuple[float, DecisionStump]] = list(stages or [])
        self.decision_threshold = float(decision_threshold)
        self.training_errors: list[float] = list(training_errors or [])
        self.schema_id = schema_id

    def score(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        total = np.zeros(X.shape[0], dtype=np.float64)
        for alpha, stump in self.stages:
            total += alpha * stump.predict(X)
        return total

    def score_one(self, x: np.ndarray) -> float:
        return float(self.score(np.asarray(x)[None, :])[0])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.score(X) > self.decision_threshold, 1, -1)

    def predict_one(self, x: np.ndarray) -> int:
        return int(self.predict(np.asarray(x)[None, :])[0])

    def feature_importance(self) -> dict[int, float]:
        """Total |alpha| mass per feature index, largest first."""
        mass: dict[int, float] = {}
        for alpha, stump in self.stages:
            mass[stump.feature_index] = mass.get(stump.feature_index, 0.0) + abs(alpha)
        return dict(sorted(mass.items(), key=lambda kv: (-kv[1], kv[0])))

    def to_dict(self) -> dict:
        return {
            "stages": [
                [alpha, stump.feature_index, stump.threshold, stump.polarity]
                for alpha, stump in self.stages
            ],
            "decision_threshold": self.decision_threshold,
            "training_errors": self.training_errors,
            "schema_id": self.schema_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StrongClassifier":
        stages = [
            (float(a), DecisionStump(int(fi), float(thr), int(pol)))
            for a, fi, thr, pol in d["stages"]
        ]
        return cls(
            stages,
            d["decision_threshold"],
            d.get("training_errors", []),
            d.get("schema_id", ""),
        )


@dataclass
class RoundRecord:
    """Per-round training diagnostics."""

    epsilon_raw: float
    epsilon: float
    alpha: float
    weight_sum: float
    misclassified_weight: float  # under W_{t+1}, of the examples h_t got wrong
    error_bound: float  # running product of 2*sqrt(eps_raw*(1-eps_raw))
    normalizer_bound: float  # running product of the exact weight normalizers
    training_error: float  # empirical error of the ensemble so far


class AdaBoostTrainer:
    """Incremental boosting over a fixed training set.

    Feature columns are argsorted once; each round then costs one weighted
    cumulative sum per candidate feature. Calling :meth:`boost` repeatedly
    keeps extending the same ensemble, which is what lets a cascade stage
    grow its stump count without retraining from scratch.
    """

    def __init__(
        self,
        X: np.ndarray,
        y: np.ndarray,
        feature_subset: Sequence[int] | None = None,
        record_history: bool = False,
    ):
        X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
        y = np.asarray(y)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D matrix")
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y disagree on the number of examples")
        if X.shape[0] == 0:
            raise TrainingError("no training examples")
        if not np.all(np.isin(y, (-1, 1))):
            raise ValueError("labels must be +1/-1")
        if np.all(y == y[0]):
            raise TrainingError(
                "single-class training data: need at least one example of each class"
            )
        self.X = X
        self.y = y.astype(np.float64)
        self.n, self.d = X.shape
        self.columns = (
            list(range(self.d)) if feature_subset is None else sorted(set(feature_subset))
        )
        for c in self.columns:
            if not 0 <= c < self.d:
                raise ValueError(f"feature index {c} outside schema dimension {self.d}")
        self.weights = np.full(self.n, 1.0 / self.n)
        self.stages: list[tuple[float, DecisionStump]] = []
        self.training_errors: list[float] = []
        self.history: list[RoundRecord] = [] if record_history else None
        self._margin = np.zeros(self.n)
        self._bound = 1.0
        self._zprod = 1.0
        # per-column sort order, sorted values, cut positions
        self._order = np.argsort(X, axis=0, kind="stable").astype(np.int32)
        self._sorted = np.take_along_axis(X, self._order, axis=0)
        self._cut_ok = np.empty((self.n, self.d), dtype=bool)
        self._cut_thr = np.empty((self.n, self.d), dtype=np.float64)
        for j in range(self.d):
            col = self._sorted[:, j]
            ok = np.empty(self.n, dtype=bool)
            ok[0] = True  # below-min cut: whole column predicts polarity
            ok[1:] = col[1:] > col[:-1]
            thr = np.empty(self.n, dtype=np.float64)
            thr[0] = col[0] - 1.0
            thr[1:] = 0.5 * (col[1:] + col[:-1])
            self._cut_ok[:, j] = ok
            self._cut_thr[:, j] = thr

    def best_stump(self) -> tuple[DecisionStump, float]:
        """Stump minimizing the current weighted error over all candidate
        (feature, threshold, polarity) triples. Ties break toward the
        lowest feature index, lowest threshold, positive polarity."""
        w_pos = np.where(self.y > 0, self.weights, 0.0)
        w_neg = self.weights - w_pos
        total_neg = float(w_neg.sum())
        best = None  # (err, feature, threshold, polarity)
        for j in self.columns:
            order = self._order[:, j]
            # err_plus(k): cut before sorted position k, polarity +1
            prefix_pos = np.concatenate(([0.0], np.cumsum(w_pos[order])))[:-1]
            prefix_neg = np.concatenate(([0.0], np.cumsum(w_neg[order])))[:-1]
            err_plus = prefix_pos + (total_neg - prefix_neg)
            err = np.where(err_plus <= 0.5, err_plus, 1.0 - err_plus)
            err[~self._cut_ok[:, j]] = np.inf
            k = int(np.argmin(err))
            cand = (
                float(err[k]),
                j,
                float(self._cut_thr[k, j]),
                1 if err_plus[k] <= 0.5 else -1,
            )
            if best is None or (cand[0], cand[1], cand[2], -cand[3]) < (
                best[0],
                best[1],
                best[2],
                -best[3],
            ):
                best = cand
        err, j, thr, pol = best
        return DecisionStump(j, thr, pol), max(err, 0.0)  # guard float-sum dust

    def boost(self, rounds: int = 1) -> None:
        for _ in range(rounds):
            stump, eps_raw = self.best_stump()
            eps = min(max(eps_raw, EPS_CLAMP), 1.0 - EPS_CLAMP)
            alpha = compute_alpha(eps)
            pred = stump.predict(self.X)
            unnormalized = self.weights * np.exp(-alpha * self.y * pred)
            z = float(unnormalized.sum())
            self.weights = unnormalized / z
            self.stages.append((alpha, stump))
            self.training_errors.append(eps)
            self._margin += alpha * pred
            self._bound *= 2.0 * math.sqrt(max(eps_raw * (1.0 - eps_raw), 0.0))
            self._zprod *= z
            if self.history is not None:
                mis = pred != self.y
                ens_pred = np.where(self._margin > 0.0, 1.0, -1.0)
                self.history.append(
                    RoundRecord(
                        epsilon_raw=eps_raw,
                        epsilon=eps,
                        alpha=alpha,
                        weight_sum=float(self.weights.sum()),
                        misclassified_weight=float(self.weights[mis].sum()),
                        error_bound=self._bound,
                        normalizer_bound=self._zprod,
                        training_error=float(np.mean(ens_pred != self.y)),
                    )
                )

    def classifier(self) -> StrongClassifier:
        return StrongClassifier(list(self.stages), 0.0, list(self.training_errors))


def train_stump(X: np.ndarray, y: np.ndarray, weights: np.ndarray) -> tuple[DecisionStump, float]:
    """One-shot weighted stump fit; returns (stump, weighted error).

    Degenerate single-class data yields the constant stump of that class
    with zero error.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    w = np.asarray(weights, dtype=np.float64)
    if abs(float(w.sum()) - 1.0) > 1e-6:
        raise ValueError("weights must be normalized to sum to 1")
    if np.all(y == y[0]):
        pol = int(y[0])
        return DecisionStump(0, float(np.min(X[:, 0])) - 1.0, pol), 0.0
    trainer = AdaBoostTrainer(X, y)
    trainer.weights = w / w.sum()
    return trainer.best_stump()


def adaboost_train(
    X: np.ndarray,
    y: np.ndarray,
    rounds: int,
    feature_subset: Sequence[int] | None = None,
    record_history: bool = False,
) -> StrongClassifier:
    """Boost ``rounds`` stumps per the standard schedule; see module docs."""
    if rounds < 1:
        raise ValueError("need at least one boosting round")
    trainer = AdaBoostTrainer(X, y, feature_subset=feature_subset, record_history=record_history)
    trainer.boost(rounds)
    clf = trainer.classifier()
    if record_history:
        clf.history = trainer.history
    return clf


# --- ROC / AUC -------------------------------------------------------------


def _positive_mask(labels) -> np.ndarray:
    labels = np.asarray(labels)
    pos = labels > 0
    n_pos = int(pos.sum())
    if n_pos == 0 or n_pos == len(labels):
        raise ValueError("AUC needs both classes present")
    return pos


def _tied_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    n = len(values)
    boundaries = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1], True])
    starts, stops = boundaries[:-1], boundaries[1:]
    avg = (starts + stops + 1) / 2.0  # 1-based average rank per tie group
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(avg, stops - starts)
    return ranks


def roc_auc(scores, labels) -> float:
    """Rank-statistic AUC: P(score_pos > score_neg) + 0.5*P(equal)."""
    scores = np.asarray(scores, dtype=np.float64)
    pos = _positive_mask(labels)
    n_pos = int(pos.sum())
    n_neg = len(scores) - n_pos
    ranks = _tied_ranks(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_curve(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ROC sweep over descending score thresholds (predict positive at
    score > threshold). Returns (fpr, tpr, thresholds) starting at (0, 0)."""
    scores = np.asarray(scores, dtype=np.float64)
    pos = _positive_mask(labels)
    n_pos = int(pos.sum())
    n_neg = len(scores) - n_pos
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp = np.cumsum(pos[order])
    fp = np.arange(1, len(scores) + 1) - tp
    distinct = np.r_[sorted_scores[1:] != sorted_scores[:-1], True]
    tp, fp, thr = tp[distinct], fp[distinct], sorted_scores[distinct]
    fpr = np.r_[0.0, fp / n_neg]
    tpr = np.r_[0.0, tp / n_pos]
    return fpr, tpr, np.r_[np.inf, thr]
