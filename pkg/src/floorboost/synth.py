"""Seeded synthetic auction-log generation.

The generator is a test harness, not a market model: a designated set of
fields carries a latent signal that drives (a) membership in the
high-value bid component and (b) the size of the top-two-bid gap, so
trained classifiers have something real to learn; the rest is noise. Top
bids come from a two-component log-scale mixture (a cheap component below
the high-value mark and an expensive one above it), and the gap is an
exponential scaled by the top bid. All draws flow from one seed, so a
config reproduces its log byte for byte.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass

import numpy as np

from .auction import BidPair, StaticReserves
from .features import BUYER_GROUPS, RawRecord
from .money import Money

_SITES = [f"site{i:02d}.example" for i in range(48)]
_SECTIONS = [f"sec{i:02d}" for i in range(36)]
_GEOS = [f"geo{i:02d}" for i in range(24)]
_WSEATS = [f"wseat{i:02d}" for i in range(20)]
_SSP_HOSTS = [f"ssp{i}" for i in range(5)]
_LAYOUTS = ["banner", "native", "interstitial", "video_companion"]
_AD_SIZES = ["300x250", "728x90", "160x600", "300x600", "320x50", "970x250"]
_AD_POSITIONS = ["above_fold", "mid_page", "below_fold", "sidebar"]
_GENDERS = ["female", "male", "unknown"]
_DEVICES = ["desktop", "mobile", "tablet", "ctv"]
_BROWSERS = ["chrome", "safari", "firefox", "edge", "other"]
_COLOS = ["colo_east", "colo_west", "colo_eu", "colo_apac"]
_SEATS_PER_GROUP = 16
_BUYER_SEATS = [f"{g}_{k:03d}" for g in BUYER_GROUPS for k in range(_SEATS_PER_GROUP)]

# (vocabulary, importance scale, monotone-in-index latent?) per signal field;
# monotone fields are the ordinal-encoded ones, so threshold stumps can use them
_SIGNAL_FIELDS = {
    "site_tld": (_SITES, 1.0, True),
    "ad_section": (_SECTIONS, 0.8, True),
    "geo": (_GEOS, 0.5, True),
    "winning_demand_seat": (_WSEATS, 0.6, True),
    "buyer_group": (list(BUYER_GROUPS), 0.9, False),
    "ad_size": (_AD_SIZES, 0.7, False),
    "device_type": (_DEVICES, 0.5, False),
    "ssp_host": (_SSP_HOSTS, 0.4, False),
}


@dataclass(frozen=True)
class SyntheticConfig:
    """Knobs for one synthetic log; identical configs yield identical logs."""

    n_records: int
    seed: int
    high_value_fraction: float = 0.05
    feature_signal_strength: float = 0.7
    # top-bid mixture: log-scale location/spread of the low component,
    # spread of the high component above the cutoff
    low_bid_log_mean: float = 0.10
    low_bid_log_sigma: float = 0.70
    high_bid_spread: float = 0.80
    high_bid_log_noise: float = 0.15
    # mean of (gap / top bid)
    gap_scale: float = 0.35
    outlier_cap: str = "41"

    def __post_init__(self):
        if self.n_records < 1:
            raise ValueError("n_records must be positive")
        if not 0.0 < self.high_value_fraction < 1.0:
            raise ValueError("high_value_fraction must be in (0,1)")
        if not 0.0 <= self.feature_signal_strength <= 1.0:
            raise ValueError("feature_signal_strength must be in [0,1]")

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "seed": self.seed,
            "high_value_fraction": self.high_value_fraction,
            "feature_signal_strength": self.feature_signal_strength,
            "low_bid_log_mean": self.low_bid_log_mean,
            "low_bid_log_sigma": self.low_bid_log_sigma,
            "high_bid_spread": self.high_bid_spread,
            "high_bid_log_noise": self.high_bid_log_noise,
            "gap_scale": self.gap_scale,
            "outlier_cap": self.outlier_cap,
        }


def _latent_tables(rng: np.random.Generator, correlation: float = 0.5):
    """Two per-category weight tables per signal field: one driving the
    high-value component, a correlated one driving the gap."""
    hv, sep = {}, {}
    for name, (vocab, scale, monotone) in _SIGNAL_FIELDS.items():
        v = len(vocab)
        if monotone:
            base = np.linspace(-1.0, 1.0, v)
            w1 = scale * (base + 0.15 * rng.normal(size=v))
            w2_base = base + 0.15 * rng.normal(size=v)
        else:
            w1 = scale * rng.normal(size=v)
            w2_base = rng.normal(size=v)
        hv[name] = w1
        sep[name] = scale * (correlation * (w1 / scale) + np.sqrt(1 - correlation**2) * w2_base)
    return hv, sep


def _standardize(v: np.ndarray) -> np.ndarray:
    sd = v.std()
    return (v - v.mean()) / sd if sd > 0 else np.zeros_like(v)


def generate_synthetic_logs(config: SyntheticConfig) -> list[RawRecord]:
    """Deterministic records whose features partially predict the top bid
    component and the bid gap, per ``feature_signal_strength``."""
    n = config.n_records
    rng = np.random.default_rng(config.seed)
    tables_hv, tables_sep = _latent_tables(rng)

    idx = {
        name: rng.integers(0, len(vocab), size=n)
        for name, (vocab, _, _) in _SIGNAL_FIELDS.items()
    }
    hour = rng.integers(0, 24, size=n)
    s_hv = sum(tables_hv[name][idx[name]] for name in _SIGNAL_FIELDS)
    s_hv = s_hv + 0.3 * (hour >= 18)
    s_sep = sum(tables_sep[name][idx[name]] for name in _SIGNAL_FIELDS)
    s_hv = _standardize(s_hv)
    s_sep = _standardize(s_sep)

    w = config.feature_signal_strength
    z_hv = np.sqrt(w) * s_hv + np.sqrt(1.0 - w) * rng.normal(size=n)
    z_sep = np.sqrt(w) * s_sep + np.sqrt(1.0 - w) * rng.normal(size=n)

    # exact high-value share: take the top fraction of the latent
    k = max(1, round(n * config.high_value_fraction))
    order = np.argsort(-z_hv, kind="stable")
    is_high = np.zeros(n, dtype=bool)
    is_high[order[:k]] = True
    tau = z_hv[order[k - 1]]

    cap = Money(config.outlier_cap).to_float()
    cutoff = 10.0
    top = np.empty(n)
    low_draw = np.exp(rng.normal(config.low_bid_log_mean, config.low_bid_log_sigma, size=n))
    top[~is_high] = np.clip(low_draw[~is_high], 0.05, cutoff - 0.01)
    high_noise = rng.normal(0.0, config.high_bid_log_noise, size=n)
    high_draw = cutoff * np.exp(
        config.high_bid_spread * np.maximum(z_hv - tau, 0.0) + high_noise
    )
    top[is_high] = np.clip(high_draw[is_high], cutoff, cap)

    # gap: exponential(mean = gap_scale * top), quantile-coupled to z_sep
    u = (np.argsort(np.argsort(z_sep, kind="stable"), kind="stable") + 1.0) / (n + 1.0)
    gap = config.gap_scale * top * (-np.log1p(-u))
    gap = np.minimum(gap, top)

    # static reserves: systemwide floor always; occasional uniform/deal overlays
    has_uniform = rng.random(n) < 0.35
    uniform_vals = np.clip(np.exp(rng.normal(np.log(0.5), 0.6, size=n)), 0.05, 3.0)
    has_deal = rng.random(n) < 0.12
    deal_vals = np.clip(np.exp(rng.normal(np.log(1.2), 0.5, size=n)), 0.10, 5.0)

    # user-side noise fields
    ages = rng.integers(13, 80, size=n)
    genders = rng.choice(len(_GENDERS), size=n, p=[0.45, 0.45, 0.10])
    browsers = rng.integers(0, len(_BROWSERS), size=n)
    layouts = rng.integers(0, len(_LAYOUTS), size=n)
    positions = rng.integers(0, len(_AD_POSITIONS), size=n)
    colos = rng.integers(0, len(_COLOS), size=n)
    page_views = rng.poisson(20.0, size=n)
    visit_count = rng.poisson(5.0, size=n)
    impressions = rng.poisson(50.0, size=n)
    clicks = rng.binomial(8, 0.05, size=n)
    seat_in_group = rng.integers(0, _SEATS_PER_GROUP, size=n)

    # previous-price fields echo the latent signal (a user who saw high
    # clearing prices tends to see them again), never the realized bids
    signal = np.sqrt(w) * s_hv
    prev_base = np.exp(0.2 + 0.9 * signal + 0.5 * rng.normal(size=n))
    prev_counts = rng.integers(0, 6, size=n)
    prev_noise = rng.normal(0.0, 0.3, size=(n, 5))
    win_mean = np.exp(0.1 + 0.8 * signal + 0.6 * rng.normal(size=n))
    win_max = win_mean * np.exp(np.abs(0.4 * rng.normal(size=n)))
    win_count = rng.poisson(8.0, size=n)

    days = rng.integers(1, 31, size=n)

    records: list[RawRecord] = []
    money_cap = Money(config.outlier_cap)
    for i in range(n):
        t = Money(float(top[i]))
        if t > money_cap:
            t = money_cap
        s = t - Money(float(gap[i]))
        if s.is_negative():
            s = Money(0)
        date = f"2017-06-{days[i]:02d}"
        dow = _dt.date(2017, 6, int(days[i])).weekday()
        group_i = idx["buyer_group"][i]
        c = int(prev_counts[i])
        prev_prices = [
            Money(float(np.clip(prev_base[i] * np.exp(prev_noise[i, j]), 0.01, cap)))
            for j in range(c)
        ]
        records.append(
            RawRecord(
                record_id=f"r{i:08d}",
                ad_section=_SECTIONS[idx["ad_section"][i]],
                site_tld=_SITES[idx["site_tld"][i]],
                layout=_LAYOUTS[layouts[i]],
                ad_size=_AD_SIZES[idx["ad_size"][i]],
                ssp_host=_SSP_HOSTS[idx["ssp_host"][i]],
                ad_position=_AD_POSITIONS[positions[i]],
                age=int(ages[i]),
                gender=_GENDERS[genders[i]],
                device_type=_DEVICES[idx["device_type"][i]],
                geo=_GEOS[idx["geo"][i]],
                browser=_BROWSERS[browsers[i]],
                colo=_COLOS[colos[i]],
                page_views=int(page_views[i]),
                prev_clearing_prices=prev_prices,
                visit_count=int(visit_count[i]),
                impressions=int(impressions[i]),
                clicks=int(clicks[i]),
                prev_win_stats={
                    "max": round(float(win_max[i]), 4),
                    "mean": round(float(win_mean[i]), 4),
                    "count": float(win_count[i]),
                },
                buyer_seat=_BUYER_SEATS[group_i * _SEATS_PER_GROUP + seat_in_group[i]],
                winning_demand_seat=_WSEATS[idx["winning_demand_seat"][i]],
                date=date,
                hour=int(hour[i]),
                dow=dow,
                bids=BidPair(top=t, second=s),
                reserves=StaticReserves(
                    systemwide=Money("0.05"),
                    uniform=Money(float(uniform_vals[i])) if has_uniform[i] else None,
                    deal=Money(float(deal_vals[i])) if has_deal[i] else None,
                ),
            )
        )
    return records
