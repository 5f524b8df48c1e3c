"""Second-price auction outcome semantics.

A winning bidder pays the second bid or the reserve, whichever is higher;
a hard reserve above the top bid blocks the sale entirely. The revenue of
a single auction as a function of the reserve r is therefore piecewise:

    r <= second : sold at second
    second < r <= top : sold at r
    r > top : unsold, revenue 0 (opportunity cost)

A soft reserve never blocks; it only supports the clearing price, with a
first-price band between the hard and soft levels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .money import ZERO, Money


@dataclass(frozen=True)
class BidPair:
    """Top and second bids of a single auction (CPM dollars)."""

    top: Money
    second: Money

    def __post_init__(self):
        if self.second < ZERO:
            raise ValueError(f"second bid must be non-negative, got {self.second}")
        if self.top < self.second:
            raise ValueError(
                f"top bid {self.top} below second bid {self.second}"
            )

    @property
    def gap(self) -> Money:
        return self.top - self.second


@dataclass(frozen=True)
class StaticReserves:
    """The static hard reserves that may apply to an auction.

    The systemwide floor (a few cents) always exists; uniform and deal
    reserves are optional overlays.
    """

    systemwide: Money
    uniform: Money | None = None
    deal: Money | None = None

    def __post_init__(self):
        if self.systemwide <= ZERO:
            raise ValueError("systemwide reserve must be positive")
        for name in ("uniform", "deal"):
            v = getattr(self, name)
            if v is not None and v < ZERO:
                raise ValueError(f"{name} reserve must be non-negative")

    def effective(self) -> Money:
        return effective_static_reserve(self)


@dataclass(frozen=True)
class AuctionOutcome:
    """Result of running one auction under a given reserve."""

    sold: bool
    clearing_price: Money
    blocked: bool  # unsold because the reserve exceeded the top bid

    def __post_init__(self):
        if not self.sold and self.clearing_price != ZERO:
            raise ValueError("unsold auction cannot have a clearing price")
        if self.sold and self.clearing_price < ZERO:
            raise ValueError("clearing price must be non-negative")


_BLOCKED = AuctionOutcome(sold=False, clearing_price=ZERO, blocked=True)


def effective_static_reserve(reserves: StaticReserves) -> Money:
    """The single reserve an auction actually runs under: the max of all
    static reserves present."""
    best = reserves.systemwide
    for v in (reserves.uniform, reserves.deal):
        if v is not None and v > best:
            best = v
    return best


def transaction_revenue(r: Money, bids: BidPair) -> AuctionOutcome:
    """Outcome of a second-price auction with hard reserve ``r``.

    The boundary r == top still sells (at top); only r strictly above the
    top bid blocks.
    """
    if r > bids.top:
        return _BLOCKED
    clearing = bids.second if bids.second > r else r
    return AuctionOutcome(sold=True, clearing_price=clearing, blocked=False)


def transaction_revenue_soft(hard: Money, soft: Money, bids: BidPair) -> AuctionOutcome:
    """Outcome under a hard/soft reserve combination.

    Below ``hard`` the sale is blocked. Between ``hard`` and ``soft`` the
    auction runs first-price (winner pays their own bid). At or above
    ``soft`` the auction is second-price with the soft level as a price
    support.
    """
    if hard > soft:
        raise ValueError(f"hard reserve {hard} exceeds soft reserve {soft}")
    if bids.top < hard:
        return _BLOCKED
    if bids.top < soft:
        return AuctionOutcome(sold=True, clearing_price=bids.top, blocked=False)
    clearing = bids.second if bids.second > soft else soft
    return AuctionOutcome(sold=True, clearing_price=clearing, blocked=False)
