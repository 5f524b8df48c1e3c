"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they complete.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from floorboost.auction import BidPair, effective_static_reserve, transaction_revenue
from floorboost.boosting import AdaBoostTrainer, roc_auc
from floorboost.cascade import CascadeModel, CascadeTargets, cascade_rates
from floorboost.cli import main as cli_main
from floorboost.features import BucketSchema, filter_outliers, label_arrays
from floorboost.money import ZERO, Money
from floorboost.pipeline import TrainConfig, make_grid_trainer, split_records, train_policy
from floorboost.replay import (
    RevenueReport,
    compute_lift,
    grid_search_cutoffs,
    oracle_decisions,
    replay_decisions,
    replay_with_baseline,
)
from floorboost.synth import SyntheticConfig, generate_synthetic_logs


@contextmanager
def report(num, name):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {num} ({name}): FAIL")
        raise
    print(f"[acceptance] criterion {num} ({name}): PASS")


# --- criterion 1 -------------------------------------------------------------


def test_criterion_1_revenue_function_grid():
    with report(1, "revenue function piecewise suite"):
        start = time.perf_counter()
        # the worked example, exactly
        bids = BidPair(Money(5), Money(2))
        assert transaction_revenue(Money(1), bids).clearing_price == Money(2)
        assert transaction_revenue(Money("4.5"), bids).clearing_price == Money("4.5")
        assert transaction_revenue(Money(5), bids).clearing_price == Money(5)
        out = transaction_revenue(Money("5.0001"), bids)
        assert not out.sold and out.blocked and out.clearing_price == ZERO

        cases = 0
        for t_ticks in range(0, 80_001, 5000):  # T: $0..$8
            for s_ticks in range(0, t_ticks + 1, 5000):
                pair = BidPair(Money.from_ticks(t_ticks), Money.from_ticks(s_ticks))
                for r_ticks in range(0, 90_001, 1000):
                    r = Money.from_ticks(r_ticks)
                    got = transaction_revenue(r, pair)
                    if r_ticks > t_ticks:
                        assert not got.sold and got.blocked
                    elif r_ticks <= s_ticks:
                        assert got.sold and got.clearing_price.ticks == s_ticks
                    else:
                        assert got.sold and got.clearing_price.ticks == r_ticks
                    cases += 1
        elapsed = time.perf_counter() - start
        assert cases >= 10_000, cases
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


# --- criterion 2 -------------------------------------------------------------


def test_criterion_2_adaboost_invariants():
    with report(2, "adaboost weight/error invariants on 50 random datasets"):
        start = time.perf_counter()
        rng = np.random.default_rng(2)
        for ds in range(50):
            n = int(rng.integers(20, 501))
            d = int(rng.integers(2, 7))
            X = rng.normal(size=(n, d)).round(2)
            noise = rng.normal(size=n) * rng.uniform(0.2, 1.5)
            y = np.where(X[:, 0] + noise > 0, 1, -1)
            if np.all(y == y[0]):
                y[0] = -y[0]
            trainer = AdaBoostTrainer(X, y, record_history=True)
            trainer.boost(10)
            for rec in trainer.history:
                assert abs(rec.weight_sum - 1.0) < 1e-9
                if 0.0 < rec.epsilon_raw < 1.0:
                    assert abs(rec.misclassified_weight - 0.5) < 1e-9
                assert rec.training_error <= rec.error_bound + 1e-12
        assert time.perf_counter() - start < 30.0


# --- criterion 3 -------------------------------------------------------------


def test_criterion_3_cascade_rate_arithmetic():
    with report(3, "cascade rate products and conjunction identity"):
        model = CascadeModel(stage_rates=[(0.95, 0.52)] * 10)
        d, f = model.overall_rates()
        assert d == pytest.approx(0.95**10, abs=1e-12)
        assert f == pytest.approx(0.52**10, abs=1e-12)
        assert d == pytest.approx(0.5987, abs=5e-5)
        assert f == pytest.approx(0.001446, abs=5e-7)
        # the published roundings
        assert round(d * 100) == 60
        assert round(f * 100, 2) == 0.14

        # conjunction identity, exactly, on held-out synthetic data
        records = generate_synthetic_logs(
            SyntheticConfig(n_records=30_000, seed=31, feature_signal_strength=1.0)
        )
        schema = BucketSchema.default()
        cfg = TrainConfig(
            cascade=CascadeTargets(0.52, 0.95, 0.01),
            separation_rounds=8,
            bucket_rounds=8,
            max_stages=8,
            max_stumps_per_stage=400,
            seed=31,
        )
        trained = train_policy(records, schema, cfg)
        kept, _ = filter_outliers(records, schema.outlier_cap)
        _, _, holdout = split_records(kept, 31, 0.6, 0.2)
        X = trained.models.feature_schema.encode_matrix(holdout)
        y_hv, _, _ = label_arrays(holdout, schema)
        rates = cascade_rates(trained.models.high_value, X, y_hv)
        assert rates.product_identity_holds()
        # the planted-signal run reaches the configured overall goal
        assert len(trained.models.high_value.stages) <= 8
        assert not trained.models.high_value.halted
        assert rates.overall_fpr <= 0.01
        assert rates.overall_detection >= 0.6
        d_frac, f_frac = Fraction(1), Fraction(1)
        for pos_s, pos_p, neg_s, neg_p in rates.stage_counts:
            d_frac *= Fraction(pos_p, pos_s) if pos_s else Fraction(1)
            f_frac *= Fraction(neg_p, neg_s) if neg_s else Fraction(1)
        n_pos0 = rates.stage_counts[0][0]
        n_neg0 = rates.stage_counts[0][2]
        assert d_frac == Fraction(int(round(rates.overall_detection * n_pos0)), n_pos0)
        assert f_frac == Fraction(int(round(rates.overall_fpr * n_neg0)), n_neg0)
        # trained to the published-shape targets: deep filtering, most
        # detections kept per stage
        for d_i, _ in trained.models.high_value.stage_rates:
            assert d_i >= 0.95 - 1e-9


# --- criterion 4 -------------------------------------------------------------


def test_criterion_4_auc_oracle_equivalence():
    with report(4, "rank-statistic AUC vs pairwise oracle on 100 sets"):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(4, 201))
            scores = rng.normal(size=n)
            if rng.random() < 0.5:
                scores = scores.round(1)  # force tie groups
            labels = np.where(rng.random(n) < rng.uniform(0.2, 0.8), 1, -1)
            if np.all(labels == labels[0]):
                labels[0] = -labels[0]
            pos = scores[labels > 0]
            neg = scores[labels < 0]
            wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
            oracle = wins / (len(pos) * len(neg))
            assert abs(roc_auc(scores, labels) - oracle) <= 1e-12


# --- criterion 5 -------------------------------------------------------------


def test_criterion_5_published_lift_arithmetic():
    with report(5, "segmented ledger reproduces the published 3.5% lift"):
        base = RevenueReport.from_segment_revenues("30626", "85753", "160761")
        new = RevenueReport.from_segment_revenues("40316", "85647", "160761")
        lift = compute_lift(new, base)
        assert base.total_revenue == Money("277140")
        assert new.total_revenue == Money("286724")
        assert lift.absolute_lift == Money("9584")
        assert abs(lift.relative_lift * 100 - 3.5) <= 0.05


# --- criteria 6 + 7 ----------------------------------------------------------

N_SEEDS = 10
N_RECORDS = 100_000


@pytest.fixture(scope="module")
def seed_runs():
    """Train + replay on ten seeds of calibrated synthetic logs; keeps only
    the measured quantities the criteria assert on."""
    schema = BucketSchema.default()
    runs = []
    start = time.perf_counter()
    for seed in range(N_SEEDS):
        records = generate_synthetic_logs(
            SyntheticConfig(
                n_records=N_RECORDS, seed=seed, feature_signal_strength=0.7
            )
        )
        cfg = TrainConfig(
            cascade=CascadeTargets(0.52, 0.95, 0.02),
            separation_rounds=32,
            bucket_rounds=20,
            max_stages=8,
            max_stumps_per_stage=48,
            seed=seed,
        )
        trained = train_policy(records, schema, cfg)
        kept, _ = filter_outliers(records, schema.outlier_cap)
        _, _, holdout = split_records(kept, seed, cfg.train_frac, cfg.val_frac)
        X = trained.models.feature_schema.encode_matrix(holdout)
        y_hv, y_sep, _ = label_arrays(holdout, schema)
        auc_hv = roc_auc(trained.models.high_value.score(X), y_hv)
        auc_sep = roc_auc(trained.models.separation.score(X), y_sep)

        new, base, decisions, kept_replay = replay_with_baseline(holdout, trained.models)
        lift = compute_lift(new, base)
        oracle_new, oracle_base = replay_decisions(
            holdout, oracle_decisions(holdout, schema), schema.high_value_cutoff
        )
        oracle_lift = compute_lift(oracle_new, oracle_base)

        # criterion-7 quantities for this replay
        blocked_effected_base = ZERO
        for r, dec in zip(kept_replay, decisions):
            if dec.changed and not transaction_revenue(dec.reserve, r.bids).sold:
                base_out = transaction_revenue(effective_static_reserve(r.reserves), r.bids)
                if base_out.sold:
                    blocked_effected_base = blocked_effected_base + base_out.clearing_price

        runs.append(
            {
                "seed": seed,
                "auc_hv": auc_hv,
                "auc_sep": auc_sep,
                "lift": lift.relative_lift,
                "oracle_lift": oracle_lift.relative_lift,
                "uneffected_equal": (
                    new.segments["uneffected"].revenue == base.segments["uneffected"].revenue
                    and new.segments["uneffected"].auction_count
                    == base.segments["uneffected"].auction_count
                ),
                "new_total": new.total_revenue,
                "base_total": base.total_revenue,
                "blocked_effected_base": blocked_effected_base,
            }
        )
    runs_elapsed = time.perf_counter() - start
    return runs, runs_elapsed


def test_criterion_6_property_based_quality(seed_runs):
    with report(6, "synthetic-log quality floors over 10 seeds"):
        runs, elapsed = seed_runs
        assert len(runs) == N_SEEDS
        for run in runs:
            assert run["auc_hv"] >= 0.85, f"seed {run['seed']}: cascade AUC {run['auc_hv']:.4f}"
            assert run["auc_sep"] >= 0.70, f"seed {run['seed']}: separation AUC {run['auc_sep']:.4f}"
            assert run["lift"] > 0.0, f"seed {run['seed']}: lift {run['lift']:.4f}"
            assert run["oracle_lift"] >= run["lift"], f"seed {run['seed']}: oracle below learned"
        assert elapsed < 600.0, f"ten seeds took {elapsed:.0f}s"
        print(
            f"  (10 seeds in {elapsed:.0f}s; cascade AUC "
            f"{min(r['auc_hv'] for r in runs):.3f}..{max(r['auc_hv'] for r in runs):.3f}, "
            f"lift {min(r['lift'] for r in runs) * 100:.2f}%..{max(r['lift'] for r in runs) * 100:.2f}%)"
        )


def test_criterion_7_no_harm_ledger(seed_runs):
    with report(7, "no-harm and blocked-revenue floor on every replay"):
        runs, _ = seed_runs
        for run in runs:
            assert run["uneffected_equal"], f"seed {run['seed']}: untouched revenue drifted"
            floor = run["base_total"] - run["blocked_effected_base"]
            assert run["new_total"] >= floor, f"seed {run['seed']}: ledger floor violated"


# --- criterion 8 -------------------------------------------------------------


def test_criterion_8_grid_search_matches_exhaustive():
    with report(8, "3x3 cutoff sweep equals exhaustive re-evaluation"):
        records = generate_synthetic_logs(
            SyntheticConfig(n_records=12_000, seed=88, feature_signal_strength=0.7)
        )
        base_schema = BucketSchema.default()
        cfg = TrainConfig(
            cascade=CascadeTargets(0.55, 0.95, 0.05),
            separation_rounds=16,
            bucket_rounds=8,
            max_stages=4,
            max_stumps_per_stage=24,
            seed=88,
        )
        trainer = make_grid_trainer(cfg)
        hv = [Money(5), Money(10), Money(15)]
        gap = [Money("0.5"), Money(1), Money(2)]
        result = grid_search_cutoffs(records, trainer, base_schema, hv, gap)
        assert len(result.points) == 9

        best_key, best_cell = None, None
        for h in hv:
            for g in gap:
                schema = BucketSchema(
                    price_edges=base_schema.price_edges,
                    high_value_cutoff=h,
                    gap_cutoff=g,
                    outlier_cap=base_schema.outlier_cap,
                )
                outcome = trainer(records, schema)
                key = (outcome.lift, h.ticks, g.ticks)
                if best_key is None or key > best_key:
                    best_key, best_cell = key, (h, g)
        assert (result.best.high_value_cutoff, result.best.gap_cutoff) == best_cell
        assert result.best.lift == best_key[0]


# --- criterion 9 -------------------------------------------------------------


def test_criterion_9_cli_determinism(tmp_path):
    with report(9, "generate/train/replay byte-identical reruns"):
        quick = [
            "--cascade-f", "0.55", "--cascade-d", "0.95", "--cascade-f-target", "0.05",
            "--separation-rounds", "10", "--bucket-rounds", "6",
            "--max-stages", "3", "--max-stumps-per-stage", "16",
        ]
        artifacts = {}
        for run in ("one", "two"):
            d = tmp_path / run
            logs = d / "logs.jsonl"
            model = d / "model.json"
            replay_dir = d / "replay"
            assert cli_main(["generate", "--out", str(logs), "--n", "3000", "--seed", "77"]) == 0
            assert cli_main(["train", "--logs", str(logs), "--out", str(model), *quick]) == 0
            assert cli_main([
                "replay", "--logs", str(logs), "--policy", str(model),
                "--out-dir", str(replay_dir), "--split", "holdout",
            ]) == 0
            artifacts[run] = {
                "logs": logs.read_bytes(),
                "model": model.read_bytes(),
                "stages": (d / "model.stages.csv").read_bytes(),
                "stage_figure": (d / "model.cascade_stages.png").read_bytes(),
                "report": (replay_dir / "report.csv").read_bytes(),
                "baseline": (replay_dir / "baseline.csv").read_bytes(),
                "lift": (replay_dir / "lift.json").read_bytes(),
                "decisions": (replay_dir / "decisions.csv").read_bytes(),
                "segments_figure": (replay_dir / "revenue_segments.png").read_bytes(),
            }
        for name in artifacts["one"]:
            assert artifacts["one"][name] == artifacts["two"][name], f"{name} differs between runs"
