import pickle
import threading
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfext.errors import ModeError, ParseError
from cfext.scalar import (
    Scalar,
    approx_text,
    context,
    cpow,
    format_scalar,
    parse_parts,
    parse_scalar,
    short_text,
)

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)


@given(fractions, fractions)
def test_exact_arithmetic_matches_fraction(x, y):
    X, Y = Scalar(x), Scalar(y)
    assert (X + Y).value == x + y
    assert (X - Y).value == x - y
    assert (X * Y).value == x * y
    if y:
        assert (X / Y).value == x / y


@given(fractions)
def test_exact_text_round_trip(x):
    s = Scalar(x)
    assert parse_scalar(format_scalar(s)) == s


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), st.sampled_from([30, 50, 80]))
def test_float_text_round_trip(z, digits):
    s = Scalar.complex(Fraction(z.real), Fraction(z.imag), digits) / 3
    assert parse_scalar(format_scalar(s), digits) == s


def test_huge_exact_text():
    x = Scalar(Fraction(3**20000 + 1, 7**9000))
    assert parse_scalar(format_scalar(x)) == x
    assert short_text(x).startswith("~")


@pytest.mark.parametrize(
    "text, parts",
    [
        ("3", (3, 0)),
        ("-5/7", (Fraction(-5, 7), 0)),
        ("1.25e-2", (Fraction(1, 80), 0)),
        ("2+i", (2, 1)),
        ("i/2", (0, Fraction(1, 2))),
        ("-i", (0, -1)),
        ("3+1/2i", (3, Fraction(1, 2))),
        ("0.3-0.2i", (Fraction(3, 10), Fraction(-1, 5))),
    ],
)
def test_parse_parts(text, parts):
    assert parse_parts(text) == parts


@pytest.mark.parametrize("text", ["", "abc", "1/0", "2+", "1..2", "i/0"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_parts(text)


def test_parse_rejects_non_string():
    with pytest.raises(ParseError):
        parse_parts(0.1)


def test_complex_text_in_exact_mode_rejected():
    with pytest.raises(ParseError):
        parse_scalar("1+i")


def test_mode_mixing_raises():
    with pytest.raises(ModeError):
        Scalar(1) + Scalar(1, 50)
    with pytest.raises(ModeError):
        Scalar(1).like(Scalar(1, 50))
    assert Scalar(1) != Scalar(1, 50)


def test_mixed_precision_takes_minimum():
    s = Scalar(1, 40) + Scalar(1, 60)
    assert s.digits == 40 and s.mixed


def test_minimum_digits():
    with pytest.raises(ValueError):
        context(20)


def test_explicit_conversion():
    x = Scalar(Fraction(1, 3)).to_complex(50)
    assert abs(x - Scalar.complex(1, 0, 50) / 3) < Scalar(Fraction(1, 10**48), 50)


def test_sqrt_modes():
    assert Scalar(Fraction(9, 4)).sqrt() == Scalar(Fraction(3, 2))
    with pytest.raises(ModeError):
        Scalar(2).sqrt()
    r = Scalar(-4, 50).sqrt()
    assert r == Scalar.complex(0, 2, 50)


def test_principal_power():
    q = Scalar.complex(Fraction(-2, 5), 0, 50)
    half = Scalar.complex(Fraction(1, 2), 0, 50)
    ctx = q.ctx
    assert cpow(q, half).value == ctx.exp(ctx.mpf(0.5) * ctx.log(ctx.mpf("-0.4")))
    assert cpow(Scalar(0, 50), half).is_zero()


def test_immutable_and_picklable():
    s = Scalar.complex(1, 2, 50)
    with pytest.raises(AttributeError):
        s.value = 3
    assert pickle.loads(pickle.dumps(s)) == s
    assert pickle.loads(pickle.dumps(Scalar(Fraction(2, 3)))) == Scalar(Fraction(2, 3))


def test_thread_local_precision_does_not_leak():
    before = mpmath.mp.dps
    out = []

    def work(d):
        x = Scalar(1, d) / 3
        out.append(len(format_scalar(x)) > d - 5)

    threads = [threading.Thread(target=work, args=(d,)) for d in (30, 60, 90, 120)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(out) and mpmath.mp.dps == before


def test_real_ordering_and_abs():
    assert Scalar(1) < Scalar(2)
    assert abs(Scalar.complex(3, 4, 50)) == Scalar(5, 50)
    with pytest.raises(TypeError):
        Scalar.complex(0, 1, 50) < Scalar(1, 50)


def test_approx_text():
    assert approx_text(Scalar(Fraction(1, 3))) == "0.333333"
    assert approx_text(Scalar.complex(1, -2, 50), 3) == "1.0-2.0i"
