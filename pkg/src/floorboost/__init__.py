"""floorboost: boosted-cascade reserve pricing for second-price ad auctions.

Identify high-value inventory and top-two-bid separation with stump-based
AdaBoost classifiers arranged in an attentional cascade, recommend
per-auction hard reserve prices from the predicted winning-bid bucket, and
replay auction logs to measure the seller revenue lift against the static
reserve baseline.
"""

from .auction import (
    AuctionOutcome,
    BidPair,
    StaticReserves,
    effective_static_reserve,
    transaction_revenue,
    transaction_revenue_soft,
)
from .boosting import (
    AdaBoostTrainer,
    DecisionStump,
    StrongClassifier,
    adaboost_train,
    compute_alpha,
    roc_auc,
    roc_curve,
    train_stump,
)
from .cascade import (
    CascadeModel,
    CascadeTargets,
    TrainPools,
    adjust_stage_threshold,
    cascade_rates,
    train_cascade,
)
from .features import (
    BucketSchema,
    FeatureSchema,
    LabelSet,
    RawRecord,
    bucketize_age,
    encode_record,
    filter_outliers,
    group_buyer_seat,
    label_records,
    read_logs,
    write_logs,
)
from .money import Money
from .pipeline import TrainConfig, TrainedPolicy, split_records, train_policy
from .policy import PolicyModels, Reason, ReserveDecision, bucket_floor, recommend_reserve
from .replay import (
    LiftResult,
    RevenueReport,
    compute_lift,
    grid_search_cutoffs,
    oracle_decisions,
    replay,
    replay_with_baseline,
)
from .synth import SyntheticConfig, generate_synthetic_logs

__version__ = "0.1.0"
