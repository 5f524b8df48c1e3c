from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from floorboost.money import SCALE, Money


def test_construction_forms():
    assert Money("2.5") == Money(2.5) == Money.from_ticks(25000)
    assert Money(3) == Money("3.0000")
    assert Money(Decimal("0.0001")).ticks == 1
    assert Money(Money("1.25")) == Money("1.25")


def test_rejects_subtick_precision():
    with pytest.raises(ValueError):
        Money("1.00005")
    with pytest.raises(ValueError):
        Money("abc")
    with pytest.raises(TypeError):
        Money([1])


def test_formatting_fixed_four_places():
    assert str(Money("12.34")) == "12.3400"
    assert str(Money(0)) == "0.0000"
    assert str(Money("-0.0106")) == "-0.0106"
    assert repr(Money("5")) == "Money('5.0000')"


def test_ledger_sum_is_exact():
    # a million ticks of a tenth of a cent never drift
    total = sum((Money("0.0001") for _ in range(10_000)), Money(0))
    assert total == Money("1")


def test_arithmetic_and_comparisons():
    assert Money("1.5") + Money("2.25") == Money("3.75")
    assert Money("5") - Money("2") == Money("3")
    assert Money("2") - Money("5") == Money("-3")
    assert -Money("1") == Money("-1")
    assert Money("0.5") * 3 == Money("1.5")
    assert Money("1") < Money("2") <= Money("2")
    assert Money("2") > Money("1.9999")
    assert bool(Money(0)) is False and bool(Money("0.0001")) is True


def test_scale_rounds_to_tick():
    assert Money("10").scale(0.5) == Money("5")
    assert Money("10").scale(1.0) == Money("10")
    assert Money("0.0001").scale(0.4) == Money(0)  # rounds half-even to grid


def test_float_construction_rounds_cleanly():
    assert Money(0.1) == Money("0.1")
    assert Money(2.675) == Money("2.675")
    assert Money(41.0).ticks == 41 * SCALE


@given(st.integers(min_value=-(10**9), max_value=10**9))
def test_string_round_trip(ticks):
    m = Money.from_ticks(ticks)
    assert Money(str(m)) == m


@given(
    st.integers(min_value=0, max_value=10**8),
    st.integers(min_value=0, max_value=10**8),
    st.integers(min_value=0, max_value=10**8),
)
def test_addition_associative_commutative(a, b, c):
    x, y, z = Money.from_ticks(a), Money.from_ticks(b), Money.from_ticks(c)
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
