import numpy as np
import pytest

from floorboost.cascade import CascadeTargets
from floorboost.features import BucketSchema
from floorboost.pipeline import TrainConfig, train_policy
from floorboost.synth import SyntheticConfig, generate_synthetic_logs


@pytest.fixture(scope="session")
def small_logs():
    return generate_synthetic_logs(SyntheticConfig(n_records=6000, seed=101))


@pytest.fixture(scope="session")
def bucket_schema():
    return BucketSchema.default()


@pytest.fixture(scope="session")
def quick_train_config():
    return TrainConfig(
        cascade=CascadeTargets(max_stage_fpr=0.52, min_stage_tpr=0.95, target_fpr=0.05),
        separation_rounds=20,
        bucket_rounds=12,
        max_stages=6,
        max_stumps_per_stage=48,
        seed=11,
    )


@pytest.fixture(scope="session")
def trained(small_logs, bucket_schema, quick_train_config):
    return train_policy(small_logs, bucket_schema, quick_train_config)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20170814)
