"""Fixed-point CPM dollar amounts.

All prices and ledger sums are held as integer counts of $0.0001 ticks so
that arithmetic is exact, associative, and reproducible regardless of how
many records are summed. Binary floats are only produced on explicit
request (model features, plotting).
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation

SCALE = 10_000  # ticks per dollar, i.e. 4 fractional digits


class Money:
    """An exact dollar amount with 4 fractional digits.

    Money itself is a signed quantity so that ledger deltas (e.g. a
    segment losing revenue under a new policy) are representable;
    domain types that require non-negative amounts enforce that at
    their own boundary.
    """

    __slots__ = ("_ticks",)

    def __init__(self, value: "Money | str | int | float | Decimal" = 0):
        if isinstance(value, Money):
            self._ticks = value._ticks
        elif isinstance(value, int):
            self._ticks = value * SCALE
        elif isinstance(value, float):
            # round-half-even on the tick grid; doubles carry far more
            # precision than a tick so this is unambiguous for any
            # realistic CPM price
            self._ticks = round(value * SCALE)
        elif isinstance(value, (str, Decimal)):
            try:
                scaled = Decimal(value) * SCALE
            except InvalidOperation as exc:
                raise ValueError(f"not a money amount: {value!r}") from exc
            ticks = int(scaled)
            if ticks != scaled:
                raise ValueError(f"sub-tick precision in money amount: {value!r}")
            self._ticks = ticks
        else:
            raise TypeError(f"cannot make Money from {type(value).__name__}")

    @classmethod
    def from_ticks(cls, ticks: int) -> "Money":
        m = object.__new__(cls)
        m._ticks = int(ticks)
        return m

    @property
    def ticks(self) -> int:
        return self._ticks

    def to_float(self) -> float:
        return self._ticks / SCALE

    def as_decimal(self) -> Decimal:
        return Decimal(self._ticks) / SCALE

    def scale(self, factor: float) -> "Money":
        """Multiply by a scalar, rounding half-even to the tick grid."""
        return Money.from_ticks(round(self._ticks * factor))

    def is_negative(self) -> bool:
        return self._ticks < 0

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "Money") -> "Money":
        if not isinstance(other, Money):
            return NotImplemented
        return Money.from_ticks(self._ticks + other._ticks)

    def __radd__(self, other):
        # lets sum() start from 0
        if other == 0:
            return self
        return NotImplemented

    def __sub__(self, other: "Money") -> "Money":
        if not isinstance(other, Money):
            return NotImplemented
        return Money.from_ticks(self._ticks - other._ticks)

    def __neg__(self) -> "Money":
        return Money.from_ticks(-self._ticks)

    def __mul__(self, n: int) -> "Money":
        if not isinstance(n, int):
            return NotImplemented
        return Money.from_ticks(self._ticks * n)

    __rmul__ = __mul__

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Money) and self._ticks == other._ticks

    def __lt__(self, other: "Money") -> bool:
        return self._ticks < other._ticks

    def __le__(self, other: "Money") -> bool:
        return self._ticks <= other._ticks

    def __gt__(self, other: "Money") -> bool:
        return self._ticks > other._ticks

    def __ge__(self, other: "Money") -> bool:
        return self._ticks >= other._ticks

    def __hash__(self) -> int:
        return hash(("Money", self._ticks))

    def __bool__(self) -> bool:
        return self._ticks != 0

    def __str__(self) -> str:
        sign = "-" if self._ticks < 0 else ""
        whole, frac = divmod(abs(self._ticks), SCALE)
        return f"{sign}{whole}.{frac:04d}"

    def __repr__(self) -> str:
        return f"Money('{self}')"


ZERO = Money.from_ticks(0)
