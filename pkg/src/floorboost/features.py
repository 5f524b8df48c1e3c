"""Auction-log featurization: bucketing, grouping, encoding, labeling.

Raw log records carry publisher, user, buyer and temporal fields plus the
top two bids and static reserves. A fitted :class:`FeatureSchema` turns a
record into a fixed-length numeric vector (one-hot for low-cardinality
categoricals, ordinal index for high-cardinality ones, with a reserved
unknown slot so replay never fails on unseen values). A
:class:`BucketSchema` owns the price bucket edges and the two labeling
cutoffs.
"""

from __future__ import annotations

import bisect
import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .auction import BidPair, StaticReserves
from .money import Money


class EncodingError(ValueError):
    """A record could not be encoded against the fitted schema."""


AGE_BUCKETS = ("0-17", "18-20", "21-24", "25-34", "35-44", "45-54", "55-64", "65+")
_AGE_UPPER = (17, 20, 24, 34, 44, 54, 64)

BUYER_GROUPS = (
    "AdNetwork",
    "AgencyTradingDesk",
    "DSP",
    "DSPPowered",
    "PersonalizedRetargeter",
    "Adx",
    "Gemini",
    "Sidekick",
    "YamPlus",
    "notag",
)
_GROUPS_LOWER = {g.lower(): g for g in BUYER_GROUPS}


def bucketize_age(age: int) -> str:
    """Map an age in years onto its reporting bucket."""
    if age < 0:
        raise ValueError(f"age must be non-negative, got {age}")
    for upper, label in zip(_AGE_UPPER, AGE_BUCKETS):
        if age <= upper:
            return label
    return AGE_BUCKETS[-1]


def group_buyer_seat(seat_id: str, group_map: Mapping[str, str] | None = None) -> str:
    """Collapse a buyer seat id onto one of the ten DSP buyer groups.

    An explicit seat -> group map wins; otherwise the prefix before the
    first underscore is matched against the group names. Anything
    unmapped (including empty ids) falls back to "notag".
    """
    if not seat_id:
        return "notag"
    if group_map is not None and seat_id in group_map:
        group = group_map[seat_id]
        if group not in BUYER_GROUPS:
            raise ValueError(f"group map sends {seat_id!r} to unknown group {group!r}")
        return group
    prefix = seat_id.split("_", 1)[0].lower()
    return _GROUPS_LOWER.get(prefix, "notag")


@dataclass
class RawRecord:
    """One auction log line, fields named exactly as serialized in JSONL."""

    record_id: str
    # publisher
    ad_section: str
    site_tld: str
    layout: str
    ad_size: str
    ssp_host: str
    ad_position: str
    # user
    age: int
    gender: str
    device_type: str
    geo: str
    browser: str
    colo: str
    page_views: int
    prev_clearing_prices: list[Money]
    visit_count: int
    impressions: int
    clicks: int
    prev_win_stats: dict[str, float]
    # buyer
    buyer_seat: str
    winning_demand_seat: str
    # temporal
    date: str  # ISO date
    hour: int
    dow: int
    # auction
    bids: BidPair
    reserves: StaticReserves

    def __post_init__(self):
        if not 0 <= self.hour <= 23:
            raise ValueError(f"hour out of range: {self.hour}")
        if not 0 <= self.dow <= 6:
            raise ValueError(f"dow out of range: {self.dow}")
        if self.age < 0:
            raise ValueError(f"age out of range: {self.age}")

    def to_json_dict(self) -> dict:
        d = {
            "record_id": self.record_id,
            "ad_section": self.ad_section,
            "site_tld": self.site_tld,
            "layout": self.layout,
            "ad_size": self.ad_size,
            "ssp_host": self.ssp_host,
            "ad_position": self.ad_position,
            "age": self.age,
            "gender": self.gender,
            "device_type": self.device_type,
            "geo": self.geo,
            "browser": self.browser,
            "colo": self.colo,
            "page_views": self.page_views,
            "prev_clearing_prices": [str(p) for p in self.prev_clearing_prices],
            "visit_count": self.visit_count,
            "impressions": self.impressions,
            "clicks": self.clicks,
            "prev_win_stats": self.prev_win_stats,
            "buyer_seat": self.buyer_seat,
            "winning_demand_seat": self.winning_demand_seat,
            "date": self.date,
            "hour": self.hour,
            "dow": self.dow,
            "bids": {"top": str(self.bids.top), "second": str(self.bids.second)},
            "reserves": {
                "systemwide": str(self.reserves.systemwide),
                "uniform": None if self.reserves.uniform is None else str(self.reserves.uniform),
                "deal": None if self.reserves.deal is None else str(self.reserves.deal),
            },
        }
        return d

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "RawRecord":
        bids = BidPair(top=Money(d["bids"]["top"]), second=Money(d["bids"]["second"]))
        res = d["reserves"]
        reserves = StaticReserves(
            systemwide=Money(res["systemwide"]),
            uniform=None if res.get("uniform") is None else Money(res["uniform"]),
            deal=None if res.get("deal") is None else Money(res["deal"]),
        )
        return cls(
            record_id=d["record_id"],
            ad_section=d["ad_section"],
            site_tld=d["site_tld"],
            layout=d["layout"],
            ad_size=d["ad_size"],
            ssp_host=d["ssp_host"],
            ad_position=d["ad_position"],
            age=int(d["age"]),
            gender=d["gender"],
            device_type=d["device_type"],
            geo=d["geo"],
            browser=d["browser"],
            colo=d["colo"],
            page_views=int(d["page_views"]),
            prev_clearing_prices=[Money(p) for p in d["prev_clearing_prices"]],
            visit_count=int(d["visit_count"]),
            impressions=int(d["impressions"]),
            clicks=int(d["clicks"]),
            prev_win_stats={k: float(v) for k, v in d["prev_win_stats"].items()},
            buyer_seat=d["buyer_seat"],
            winning_demand_seat=d["winning_demand_seat"],
            date=d["date"],
            hour=int(d["hour"]),
            dow=int(d["dow"]),
            bids=bids,
            reserves=reserves,
        )


def write_logs(path, records: Iterable[RawRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict(), sort_keys=True))
            fh.write("\n")


def read_logs(path) -> list[RawRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RawRecord.from_json_dict(json.loads(line)))
    return records


def filter_outliers(records: Sequence[RawRecord], cap: Money) -> tuple[list[RawRecord], int]:
    """Drop records whose top bid exceeds ``cap``; reports the removed count."""
    if cap <= Money(0):
        raise ValueError("outlier cap must be positive")
    kept = [r for r in records if r.bids.top <= cap]
    return kept, len(records) - len(kept)


# --- labeling -----------------------------------------------------------


@dataclass(frozen=True)
class LabelSet:
    high_value: int  # +1 / -1
    separation: int  # +1 / -1
    top_bucket: int


@dataclass(frozen=True)
class BucketSchema:
    """Price bucket edges plus the two labeling cutoffs.

    Buckets are half-open [e_i, e_{i+1}); the last bucket additionally
    absorbs values equal to the top edge so a record at the outlier cap
    still buckets. The high-value cutoff must coincide with an edge so
    that "high value" is a union of whole buckets.
    """

    price_edges: tuple[Money, ...]
    high_value_cutoff: Money
    gap_cutoff: Money
    outlier_cap: Money

    def __post_init__(self):
        if len(self.price_edges) < 2:
            raise ValueError("need at least two price edges")
        for lo, hi in zip(self.price_edges, self.price_edges[1:]):
            if not lo < hi:
                raise ValueError("price edges must be strictly ascending")
        if self.high_value_cutoff not in self.price_edges:
            raise ValueError(
                f"high_value_cutoff {self.high_value_cutoff} is not a bucket edge"
            )
        if self.gap_cutoff < Money(0):
            raise ValueError("gap_cutoff must be non-negative")

    @classmethod
    def default(cls, high_value_cutoff="10", gap_cutoff="1", outlier_cap="41") -> "BucketSchema":
        edges = tuple(Money(e) for e in ("0", "1", "2", "5", "10", "15", "20", "41"))
        return cls(
            price_edges=edges,
            high_value_cutoff=Money(high_value_cutoff),
            gap_cutoff=Money(gap_cutoff),
            outlier_cap=Money(outlier_cap),
        )

    @property
    def n_buckets(self) -> int:
        return len(self.price_edges) - 1

    def top_bucket_of(self, price: Money) -> int:
        """Index of the half-open bucket containing ``price``; values at or
        above the last edge land in the last bucket."""
        edges = self.price_edges
        if price < edges[0]:
            raise ValueError(f"price {price} below first bucket edge {edges[0]}")
        if price >= edges[-1]:
            return self.n_buckets - 1
        return bisect.bisect_right(edges, price) - 1

    def bucket_floor(self, bucket_id: int) -> Money:
        if not 0 <= bucket_id < self.n_buckets:
            raise ValueError(f"invalid bucket id {bucket_id}")
        return self.price_edges[bucket_id]

    def high_value_bucket_ids(self) -> list[int]:
        return [
            b for b in range(self.n_buckets)
            if self.price_edges[b] >= self.high_value_cutoff
        ]

    def label(self, record: RawRecord) -> LabelSet:
        t, s = record.bids.top, record.bids.second
        return LabelSet(
            high_value=1 if t >= self.high_value_cutoff else -1,
            separation=1 if (t - s) >= self.gap_cutoff else -1,
            top_bucket=self.top_bucket_of(t),
        )

    def to_dict(self) -> dict:
        return {
            "price_edges": [str(e) for e in self.price_edges],
            "high_value_cutoff": str(self.high_value_cutoff),
            "gap_cutoff": str(self.gap_cutoff),
            "outlier_cap": str(self.outlier_cap),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BucketSchema":
        return cls(
            price_edges=tuple(Money(e) for e in d["price_edges"]),
            high_value_cutoff=Money(d["high_value_cutoff"]),
            gap_cutoff=Money(d["gap_cutoff"]),
            outlier_cap=Money(d["outlier_cap"]),
        )


def label_records(records: Sequence[RawRecord], schema: BucketSchema) -> list[LabelSet]:
    return [schema.label(r) for r in records]


def label_arrays(records: Sequence[RawRecord], schema: BucketSchema):
    """Labels as numpy arrays: (high_value +-1, separation +-1, top_bucket)."""
    labels = label_records(records, schema)
    y_hv = np.array([l.high_value for l in labels], dtype=np.int8)
    y_sep = np.array([l.separation for l in labels], dtype=np.int8)
    buckets = np.array([l.top_bucket for l in labels], dtype=np.int32)
    return y_hv, y_sep, buckets


# --- feature encoding -----------------------------------------------------

# categorical fields fitted from data; age and buyer group use fixed vocabularies
_FITTED_CATEGORICALS = (
    "ad_section",
    "site_tld",
    "layout",
    "ad_size",
    "ssp_host",
    "ad_position",
    "gender",
    "device_type",
    "geo",
    "browser",
    "colo",
    "winning_demand_seat",
)

_NUMERIC_FEATURES = (
    "hour",
    "dow",
    "date_ordinal",
    "page_views",
    "visit_count",
    "impressions",
    "clicks",
    "prev_price_max",
    "prev_price_mean",
    "prev_price_count",
    "prev_win_max",
    "prev_win_mean",
    "prev_win_count",
)

UNKNOWN = "<unknown>"


def _field_value(record: RawRecord, name: str) -> str:
    try:
        v = getattr(record, name)
    except AttributeError as exc:
        raise EncodingError(f"record is missing field '{name}'") from exc
    if v is None:
        raise EncodingError(f"record field '{name}' is missing a value")
    return str(v)


def _numeric_values(record: RawRecord) -> list[float]:
    prev = record.prev_clearing_prices
    if prev:
        floats = [p.to_float() for p in prev]
        p_max, p_mean, p_count = max(floats), sum(floats) / len(floats), float(len(floats))
    else:
        p_max = p_mean = p_count = 0.0
    stats = record.prev_win_stats or {}
    try:
        date_ord = float(_dt.date.fromisoformat(record.date).toordinal())
    except ValueError as exc:
        raise EncodingError(f"record field 'date' is not an ISO date: {record.date!r}") from exc
    return [
        float(record.hour),
        float(record.dow),
        date_ord,
        float(record.page_views),
        float(record.visit_count),
        float(record.impressions),
        float(record.clicks),
        p_max,
        p_mean,
        p_count,
        float(stats.get("max", 0.0)),
        float(stats.get("mean", 0.0)),
        float(stats.get("count", 0.0)),
    ]


@dataclass
class FeatureSchema:
    """Fitted record -> vector encoder.

    Categorical fields with at most ``onehot_max`` distinct training
    values are one-hot encoded with a trailing unknown slot; wider ones
    get a single ordinal column (unknown -> 0, known values -> 1..K in
    sorted order). Age is bucketed and one-hot on the fixed bucket list;
    buyer seats collapse to the ten-group one-hot.
    """

    encoders: dict[str, dict] = field(default_factory=dict)
    group_map: dict[str, str] | None = None
    onehot_max: int = 16
    feature_names: list[str] = field(default_factory=list)
    schema_id: str = ""

    @classmethod
    def fit(
        cls,
        records: Sequence[RawRecord],
        group_map: Mapping[str, str] | None = None,
        onehot_max: int = 16,
    ) -> "FeatureSchema":
        if not records:
            raise ValueError("cannot fit a schema on zero records")
        schema = cls(group_map=dict(group_map) if group_map else None, onehot_max=onehot_max)
        for name in _FITTED_CATEGORICALS:
            values = sorted({_field_value(r, name) for r in records})
            kind = "onehot" if len(values) <= onehot_max else "ordinal"
            schema.encoders[name] = {
                "kind": kind,
                "categories": {v: i for i, v in enumerate(values)},
            }
        schema._build_names()
        schema.schema_id = schema._fingerprint()
        return schema

    def _build_names(self):
        names: list[str] = []
        names.extend(f"age_bucket={b}" for b in AGE_BUCKETS)
        names.extend(f"buyer_group={g}" for g in BUYER_GROUPS)
        for fname in _FITTED_CATEGORICALS:
            enc = self.encoders[fname]
            if enc["kind"] == "onehot":
                names.extend(f"{fname}={v}" for v in enc["categories"])
                names.append(f"{fname}={UNKNOWN}")
            else:
                names.append(f"{fname}#ordinal")
        names.extend(_NUMERIC_FEATURES)
        self.feature_names = names

    def _fingerprint(self) -> str:
        payload = json.dumps(
            {"encoders": self.encoders, "group_map": self.group_map, "onehot_max": self.onehot_max},
            sort_keys=True,
        ).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    @property
    def dimension(self) -> int:
        return len(self.feature_names)

    def encode(self, record: RawRecord) -> np.ndarray:
        out = np.zeros(self.dimension, dtype=np.float64)
        pos = 0
        out[pos + AGE_BUCKETS.index(bucketize_age(record.age))] = 1.0
        pos += len(AGE_BUCKETS)
        group = group_buyer_seat(record.buyer_seat, self.group_map)
        out[pos + BUYER_GROUPS.index(group)] = 1.0
        pos += len(BUYER_GROUPS)
        for fname in _FITTED_CATEGORICALS:
            enc = self.encoders[fname]
            cats = enc["categories"]
            value = _field_value(record, fname)
            if enc["kind"] == "onehot":
                idx = cats.get(value, len(cats))  # unknown -> trailing slot
                out[pos + idx] = 1.0
                pos += len(cats) + 1
            else:
                out[pos] = float(cats[value] + 1) if value in cats else 0.0
                pos += 1
        out[pos:] = _numeric_values(record)
        return out

    def encode_matrix(self, records: Sequence[RawRecord]) -> np.ndarray:
        mat = np.zeros((len(records), self.dimension), dtype=np.float64)
        for i, rec in enumerate(records):
            mat[i] = self.encode(rec)
        return mat

    def to_dict(self) -> dict:
        return {
            "encoders": self.encoders,
            "group_map": self.group_map,
            "onehot_max": self.onehot_max,
            "schema_id": self.schema_id,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureSchema":
        schema = cls(
            encoders={k: dict(v, categories=dict(v["categories"])) for k, v in d["encoders"].items()},
            group_map=dict(d["group_map"]) if d.get("group_map") else None,
            onehot_max=int(d["onehot_max"]),
        )
        schema._build_names()
        schema.schema_id = d.get("schema_id") or schema._fingerprint()
        return schema


def encode_record(record: RawRecord, schema: FeatureSchema) -> np.ndarray:
    return schema.encode(record)
