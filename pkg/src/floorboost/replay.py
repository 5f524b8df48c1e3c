"""Auction-log replay with segmented revenue accounting and lift.

Replay re-runs each logged auction under a reserve decision and books the
outcome into one of three segments: auctions the policy touched, split by
their *true* value class (so misclassifications surface as revenue deltas
inside the right segment), and untouched auctions. All ledger arithmetic
is exact fixed-point; a policy replay and its baseline are built from the
same decisions so untouched auctions contribute bit-identical revenue to
both sides.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .auction import effective_static_reserve, transaction_revenue
from .features import BucketSchema, RawRecord
from .money import ZERO, Money
from .policy import PolicyModels, Reason, ReserveDecision

SEGMENTS = ("effected_high_value", "effected_low_value", "uneffected")


@dataclass
class SegmentLedger:
    revenue: Money = ZERO
    auction_count: int = 0
    sold_count: int = 0
    blocked_count: int = 0

    def book(self, outcome) -> None:
        self.auction_count += 1
        if outcome.sold:
            self.sold_count += 1
            self.revenue = self.revenue + outcome.clearing_price
        elif outcome.blocked:
            self.blocked_count += 1

    def as_dict(self) -> dict:
        return {
            "revenue": str(self.revenue),
            "auction_count": self.auction_count,
            "sold_count": self.sold_count,
            "blocked_count": self.blocked_count,
        }


@dataclass
class RevenueReport:
    segments: dict[str, SegmentLedger] = field(
        default_factory=lambda: {name: SegmentLedger() for name in SEGMENTS}
    )

    @property
    def total_revenue(self) -> Money:
        return sum((s.revenue for s in self.segments.values()), ZERO)

    @property
    def total_auctions(self) -> int:
        return sum(s.auction_count for s in self.segments.values())

    def to_json_dict(self) -> dict:
        return {
            "segments": {name: self.segments[name].as_dict() for name in SEGMENTS},
            "total_revenue": str(self.total_revenue),
            "total_auctions": self.total_auctions,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["segment", "revenue", "auctions", "sold", "blocked"])
            for name in SEGMENTS:
                seg = self.segments[name]
                writer.writerow([
                    name, str(seg.revenue), seg.auction_count, seg.sold_count, seg.blocked_count,
                ])
            writer.writerow([
                "total", str(self.total_revenue), self.total_auctions,
                sum(s.sold_count for s in self.segments.values()),
                sum(s.blocked_count for s in self.segments.values()),
            ])

    @classmethod
    def from_segment_revenues(
        cls, effected_high_value, effected_low_value, uneffected
    ) -> "RevenueReport":
        """Report with only the revenue fields populated (for lift math on
        externally supplied figures)."""
        report = cls()
        for name, value in (
            ("effected_high_value", effected_high_value),
            ("effected_low_value", effected_low_value),
            ("uneffected", uneffected),
        ):
            report.segments[name].revenue = Money(value)
        return report


@dataclass(frozen=True)
class LiftResult:
    absolute_lift: Money  # signed
    relative_lift: float
    segment_deltas: dict[str, Money]  # signed per segment

    def summary_line(self) -> str:
        return (
            f"lift {self.relative_lift * 100:.1f}% "
            f"({'+' if not self.absolute_lift.is_negative() else ''}{self.absolute_lift})"
        )


def compute_lift(new: RevenueReport, base: RevenueReport) -> LiftResult:
    """Exact ledger difference between two replays of the same universe."""
    base_total = base.total_revenue
    if base_total == ZERO:
        raise ValueError("baseline revenue is zero; relative lift undefined")
    new_total = new.total_revenue
    absolute = new_total - base_total
    relative = absolute.ticks / base_total.ticks
    deltas = {
        name: new.segments[name].revenue - base.segments[name].revenue for name in SEGMENTS
    }
    return LiftResult(absolute_lift=absolute, relative_lift=relative, segment_deltas=deltas)


# --- replay engine ---------------------------------------------------------


def _record_sampler(sample_rate: float | None, seed: int) -> Callable[[str], bool]:
    if sample_rate is None:
        return lambda record_id: True
    if not 0.0 < sample_rate <= 1.0:
        raise ValueError(f"sample_rate must be in (0,1], got {sample_rate}")
    threshold = int(sample_rate * 2**64)

    def keep(record_id: str) -> bool:
        digest = hashlib.sha256(f"{seed}:{record_id}".encode()).digest()
        return int.from_bytes(digest[:8], "big") < threshold

    return keep


def baseline_decision(record: RawRecord) -> ReserveDecision:
    static = effective_static_reserve(record.reserves)
    return ReserveDecision(changed=False, reserve=static, reason=Reason.NOT_SEPARATED)


def replay_decisions(
    records: Sequence[RawRecord],
    decisions: Sequence[ReserveDecision],
    high_value_cutoff: Money,
) -> tuple[RevenueReport, RevenueReport]:
    """Book each auction under its decision and under the static baseline,
    with both reports segmented by the decision's effected set."""
    new_report = RevenueReport()
    base_report = RevenueReport()
    for record, decision in zip(records, decisions):
        static = effective_static_reserve(record.reserves)
        base_outcome = transaction_revenue(static, record.bids)
        if decision.changed:
            segment = (
                "effected_high_value"
                if record.bids.top >= high_value_cutoff
                else "effected_low_value"
            )
            new_outcome = transaction_revenue(decision.reserve, record.bids)
        else:
            segment = "uneffected"
            new_outcome = base_outcome
        new_report.segments[segment].book(new_outcome)
        base_report.segments[segment].book(base_outcome)
    return new_report, base_report


def policy_decisions(
    records: Sequence[RawRecord], policy: PolicyModels
) -> list[ReserveDecision]:
    X = policy.feature_schema.encode_matrix(records)
    statics = [effective_static_reserve(r.reserves) for r in records]
    return policy.decide_matrix(X, statics)


def oracle_decisions(
    records: Sequence[RawRecord], schema: BucketSchema
) -> list[ReserveDecision]:
    """Perfect-information policy: reserve := the true top bid on every
    auction that is truly separated and truly high value. Upper-bounds any
    learned policy's revenue on its qualifying traffic."""
    out = []
    for r in records:
        label = schema.label(r)
        static = effective_static_reserve(r.reserves)
        if label.separation > 0 and label.high_value > 0 and r.bids.top > static:
            out.append(
                ReserveDecision(
                    changed=True,
                    reserve=r.bids.top,
                    reason=Reason.APPLIED,
                    predicted_bucket=label.top_bucket,
                    cascade_passed=True,
                )
            )
        else:
            out.append(ReserveDecision(changed=False, reserve=static, reason=Reason.NOT_SEPARATED))
    return out


def replay(
    records: Sequence[RawRecord],
    policy: PolicyModels | None = None,
    *,
    sample_rate: float | None = None,
    sample_seed: int = 0,
    high_value_cutoff: Money | None = None,
) -> RevenueReport:
    """Revenue report for one pass over the logs. Without a policy every
    auction clears under its static effective reserve and books as
    uneffected."""
    keep = _record_sampler(sample_rate, sample_seed)
    records = [r for r in records if keep(r.record_id)]
    if policy is None:
        decisions = [baseline_decision(r) for r in records]
        cutoff = high_value_cutoff or Money("10")
    else:
        decisions = policy_decisions(records, policy)
        cutoff = high_value_cutoff or policy.bucket_schema.high_value_cutoff
    new_report, _ = replay_decisions(records, decisions, cutoff)
    return new_report


def replay_with_baseline(
    records: Sequence[RawRecord],
    policy: PolicyModels,
    *,
    sample_rate: float | None = None,
    sample_seed: int = 0,
) -> tuple[RevenueReport, RevenueReport, list[ReserveDecision], list[RawRecord]]:
    """Policy and aligned-baseline reports plus the decision trace."""
    keep = _record_sampler(sample_rate, sample_seed)
    kept = [r for r in records if keep(r.record_id)]
    decisions = policy_decisions(kept, policy)
    new_report, base_report = replay_decisions(
        kept, decisions, policy.bucket_schema.high_value_cutoff
    )
    return new_report, base_report, decisions, kept


# --- cutoff grid search ----------------------------------------------------


@dataclass
class GridPoint:
    high_value_cutoff: Money
    gap_cutoff: Money
    lift: float | None
    effected_count: int
    skipped: bool = False
    diagnostic: str | None = None


@dataclass
class GridSearchResult:
    points: list[GridPoint]
    best: GridPoint | None

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["hv_cutoff", "gap_cutoff", "lift", "effected_count", "skipped", "diagnostic"])
            for p in self.points:
                writer.writerow([
                    str(p.high_value_cutoff),
                    str(p.gap_cutoff),
                    "" if p.lift is None else repr(p.lift),
                    p.effected_count,
                    int(p.skipped),
                    p.diagnostic or "",
                ])


def grid_search_cutoffs(
    records: Sequence[RawRecord],
    train_and_decide: Callable[[Sequence[RawRecord], BucketSchema], "GridEvaluation"],
    base_schema: BucketSchema,
    high_value_cutoffs: Sequence[Money],
    gap_cutoffs: Sequence[Money],
    threads: int | None = None,
) -> GridSearchResult:
    """Retrain + replay at every cutoff pair; the winner is the highest
    replay lift, ties broken toward the more conservative (higher) cutoffs.

    ``train_and_decide`` owns the split/train/replay pipeline; grid points
    whose labeling degenerates to a single class are skipped with a
    diagnostic.
    """
    grid = [(hv, gap) for hv in high_value_cutoffs for gap in gap_cutoffs]

    def evaluate(point: tuple[Money, Money]) -> GridPoint:
        hv, gap = point
        try:
            schema = BucketSchema(
                price_edges=base_schema.price_edges,
                high_value_cutoff=hv,
                gap_cutoff=gap,
                outlier_cap=base_schema.outlier_cap,
            )
            outcome = train_and_decide(records, schema)
        except DegenerateGridPoint as exc:
            return GridPoint(hv, gap, None, 0, skipped=True, diagnostic=str(exc))
        return GridPoint(hv, gap, outcome.lift, outcome.effected_count)

    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(evaluate, grid))
    else:
        points = [evaluate(p) for p in grid]

    best = None
    for p in points:
        if p.skipped:
            continue
        if best is None or _grid_key(p) > _grid_key(best):
            best = p
    return GridSearchResult(points=points, best=best)


def _grid_key(p: GridPoint):
    return (p.lift, p.high_value_cutoff.ticks, p.gap_cutoff.ticks)


class DegenerateGridPoint(RuntimeError):
    """Labeling at this cutoff pair produced a single class; the point is
    skipped rather than trained."""


@dataclass(frozen=True)
class GridEvaluation:
    lift: float
    effected_count: int


def write_lift_json(path, lift: LiftResult) -> None:
    payload = {
        "absolute_lift": str(lift.absolute_lift),
        "relative_lift": lift.relative_lift,
        "segment_deltas": {k: str(v) for k, v in sorted(lift.segment_deltas.items())},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
