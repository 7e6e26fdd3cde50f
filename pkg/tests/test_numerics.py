"""Precision config, arithmetic fields and terminal deduplication."""

from __future__ import annotations

from fractions import Fraction

import pytest

from quidd_sim.errors import ConfigError
from quidd_sim.numerics import (
    ComparisonMode,
    MpField,
    NativeField,
    PrecisionConfig,
    TerminalTable,
    dedup_equal,
    field_for,
    format_complex,
    intern,
)


def test_default_precision_is_128_bit_relative():
    cfg = PrecisionConfig()
    assert cfg.mantissa_bits == 128
    assert cfg.merge_epsilon == 1e-30
    assert cfg.comparison_mode is ComparisonMode.RELATIVE
    assert not cfg.native
    assert isinstance(field_for(cfg), MpField)


def test_double_precision_uses_native_field():
    cfg = PrecisionConfig.double()
    assert cfg.native
    assert isinstance(field_for(cfg), NativeField)


@pytest.mark.parametrize(
    "kwargs, token",
    [
        ({"mantissa_bits": 52}, "precision.mantissa_bits must be >= 53"),
        ({"mantissa_bits": 64.0}, "precision.mantissa_bits must be an integer"),
        ({"merge_epsilon": -1.0}, "precision.merge_epsilon must be finite and >= 0"),
        ({"merge_epsilon": float("nan")}, "precision.merge_epsilon must be finite and >= 0"),
        ({"merge_epsilon": 0.01}, "in relative mode"),
        ({"comparison_mode": "fuzzy"}, "precision.comparison_mode"),
    ],
)
def test_invalid_precision_rejected(kwargs, token):
    with pytest.raises(ConfigError, match=token):
        PrecisionConfig(**kwargs)


def test_large_absolute_epsilon_allowed():
    cfg = PrecisionConfig(mantissa_bits=53, merge_epsilon=0.01, comparison_mode="absolute")
    assert cfg.comparison_mode is ComparisonMode.ABSOLUTE


def test_epsilon_zero_is_exact():
    table = TerminalTable(PrecisionConfig(mantissa_bits=53, merge_epsilon=0.0))
    a = intern(table, 0.1 + 0.2)
    b = intern(table, 0.3)
    assert a != b
    assert len(table) == 2


def test_relative_merge_within_epsilon():
    table = TerminalTable(PrecisionConfig(mantissa_bits=53, merge_epsilon=1e-12))
    a = intern(table, 0.1 + 0.2)
    b = intern(table, 0.3)
    assert a == b
    assert table[a] == pytest.approx(0.1 + 0.2)


def test_first_match_wins_on_non_transitive_chain():
    cfg = PrecisionConfig(mantissa_bits=53, merge_epsilon=1e-3, comparison_mode="absolute")
    table = TerminalTable(cfg)
    first = table.intern(1.0)
    third = table.intern(1.0015)
    assert third != first
    # 1.0008 lies within epsilon of both; the earlier entry is returned
    assert table.intern(1.0008) == first
    assert len(table) == 2


def test_interning_is_stable_and_repeatable():
    table = TerminalTable()
    values = [Fraction(1, 3), 1j, -2, 0]
    indices = [intern(table, v) for v in values]
    assert [intern(table, v) for v in values] == indices
    assert table.lookup(Fraction(1, 3)) == indices[0]
    assert table.lookup(7) is None


def test_tiny_values_stay_distinct_from_zero_in_relative_mode():
    table = TerminalTable()
    field = table.field
    tiny = field.power_of_two(-400)
    assert intern(table, tiny) != intern(table, 0)


def test_dedup_predicate_is_symmetric():
    cfg = PrecisionConfig(mantissa_bits=53, merge_epsilon=1e-9)
    pairs = [(1.0, 1.0 + 1e-10), (1e-3, 1.1e-3), (1j, 1j * (1 + 5e-10))]
    for a, b in pairs:
        assert dedup_equal(a, b, cfg) == dedup_equal(b, a, cfg)
    assert dedup_equal(1.0, 1.0 + 1e-10, cfg)
    assert not dedup_equal(1e-3, 1.1e-3, cfg)


def test_root_of_unity_exact_on_quarter_turns():
    for cfg in (PrecisionConfig.double(), PrecisionConfig()):
        field = field_for(cfg)
        assert field.to_complex(field.root_of_unity(1, 4)) == 1j
        assert field.to_complex(field.root_of_unity(2, 4)) == -1
        assert field.to_complex(field.root_of_unity(-1, 4)) == -1j
        assert field.to_complex(field.root_of_unity(8, 8)) == 1


def test_mp_field_carries_configured_precision():
    field = field_for(PrecisionConfig(mantissa_bits=200))
    assert isinstance(field, MpField)
    third = field.div_real(field.one, 3)
    assert abs(field.mul(third, field.convert(3)) - field.one) < field.real(Fraction(1, 2**190))
    half = field.sqrt(field.real(Fraction(1, 2)))
    assert abs(field.mul(half, half).real - field.real(Fraction(1, 2))) < field.real(Fraction(1, 2**190))


def test_format_complex_is_stable():
    assert format_complex(0.7071067811865476) == "0.707107"
    assert format_complex(-0.5j) == "-0.5i"
    assert format_complex(1 - 2j, digits=3) == "1-2i"
    assert format_complex(1e-20 + 0.25j) == "0.25i"


def test_nearby_inverse_sqrt2_shares_a_terminal():
    table = TerminalTable()
    field = table.field
    root = field.sqrt(field.real(Fraction(1, 2)))
    index = intern(table, root)
    for offset in (Fraction(1, 10**40), Fraction(1, 10**32)):
        assert intern(table, field.add(root, field.convert(offset))) == index
    assert len(table) == 1


@pytest.mark.parametrize("cfg", [PrecisionConfig(), PrecisionConfig.double()], ids=["128-bit", "double"])
def test_hadamard_scale_factors_stay_distinct(cfg):
    table = TerminalTable(cfg)
    field = table.field
    n = 200
    indices = {intern(table, field.power_of_two(-k)) for k in (n // 2, (n + 2) // 2)}
    assert len(indices) == 2


def test_subnormal_doubles_intern_in_relative_mode():
    table = TerminalTable(PrecisionConfig.double())
    a = intern(table, 1e-315)
    b = intern(table, 2e-315j)
    assert a != b
    assert intern(table, 1e-315) == a
    assert table.lookup(5e-324) is None
    assert len(table) == 2


def test_grid_overflow_falls_back_to_exact_keys():
    cfg = PrecisionConfig(mantissa_bits=53, merge_epsilon=1e-300, comparison_mode="absolute")
    table = TerminalTable(cfg)
    a = intern(table, 1e308)
    assert intern(table, 1e308) == a
    assert intern(table, 1.0) != a
