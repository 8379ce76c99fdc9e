from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfext.core import approximants, family_source, from_terms, source_from_json, source_to_json, sources_agree
from cfext.errors import ContractionError, ParseError
from cfext.scalar import Scalar
from cfext.transforms import (
    ExtensionScheme,
    bernoulli_cf,
    collapse_zeros,
    contraction_for,
    euler_cf,
    even_part,
    extend,
    odd_part,
)

from conftest import bottom_up, random_source, same_point

nonzero = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)


def S(x):
    return Scalar(Fraction(x))


def seq(*xs):
    return [S(x) for x in xs]


def test_golden_parts():
    g = family_source("golden", {})
    assert [f.value for f in approximants(even_part(g), 3)] == [0, Fraction(1, 2), Fraction(3, 5), Fraction(8, 13)]
    assert [f.value for f in approximants(odd_part(g), 2)] == [1, Fraction(2, 3), Fraction(5, 8)]


@given(nonzero, st.lists(st.tuples(nonzero, nonzero), min_size=8, max_size=8))
def test_parts_are_subsequences(b0, terms):
    src = from_terms(S(b0), [(S(a), S(b)) for a, b in terms])
    ev, od = approximants(even_part(src), 4), approximants(odd_part(src), 3)
    for k in range(5):
        assert same_point(bottom_up(b0, terms, 2 * k), ev[k])
    for k in range(4):
        assert same_point(bottom_up(b0, terms, 2 * k + 1), od[k])


def test_odd_part_with_nonunit_b1():
    # b_1 enters the second odd-part numerator; b_1 = 1 would hide a missing factor
    b0, terms = Fraction(0), [(2, 3), (5, 7), (11, 13), (1, 2), (3, 5)]
    terms = [(Fraction(a), Fraction(b)) for a, b in terms]
    od = approximants(odd_part(from_terms(S(b0), [(S(a), S(b)) for a, b in terms])), 2)
    for k in range(3):
        assert same_point(bottom_up(b0, terms, 2 * k + 1), od[k])


def test_contraction_requires_nonzero_denominators():
    src = from_terms(S(0), [(S(1), S(1)), (S(1), S(0)), (S(1), S(1)), (S(1), S(1))])
    with pytest.raises(ContractionError):
        even_part(src).term(1)
    with pytest.raises(ContractionError):
        odd_part(from_terms(S(0), [(S(1), S(0)), (S(1), S(1))]))


@pytest.mark.parametrize("kind", ["cor1", "cor2"])
def test_round_trip_even(kind, rng):
    for _ in range(40):
        src, _, _ = random_source(rng, 10)
        ext = extend(src, ExtensionScheme(kind))
        assert sources_agree(contraction_for(kind)(ext), src, 10)


def test_round_trip_cor7(rng):
    for _ in range(40):
        src, _, _ = random_source(rng, 10, unit_b=True)
        if src.b0.is_zero():
            continue
        ext = extend(src, ExtensionScheme("cor7"))
        assert ext.b0.is_zero() and ext.length == 21
        assert sources_agree(odd_part(ext), src, 10)


def test_cor1_phantom_keeps_last_term():
    src = from_terms(S(0), [(S(2), S(3))])
    ext = extend(src, ExtensionScheme("cor1"))
    assert ext.length == 2
    assert approximants(ext, 2)[2] == approximants(src, 1)[1]


def test_cor3_uses_sequence_and_validates():
    a = seq(2, 3, 5, 7, 11, 13)
    b1 = S(4)
    target = from_terms(
        S(0), [(a[0], b1 + a[1]), (-a[1] * a[2], a[3] + a[2]), (-a[3] * a[4], a[5] + a[4])]
    )
    ext = extend(target, ExtensionScheme("cor3", {"b1": b1, "a": a}))
    assert sources_agree(even_part(ext), target, 3)
    bad = from_terms(S(0), [(a[0], b1 + a[1] + 1)])
    with pytest.raises(ContractionError):
        extend(bad, ExtensionScheme("cor3", {"b1": b1, "a": a}))
    with pytest.raises(ContractionError):
        extend(target, ExtensionScheme("cor3", {}))


def test_unknown_scheme():
    with pytest.raises(ParseError):
        ExtensionScheme("cor9")


def test_cor7_requires_unit_denominators():
    src = from_terms(S(1), [(S(1), S(2))])
    with pytest.raises(ContractionError):
        extend(src, ExtensionScheme("cor7")).term(2)


def test_bernoulli_reproduces_sequence():
    K = seq(2, 5, 3, Fraction(7, 2), -1)
    assert approximants(bernoulli_cf(K), 4) == K
    with pytest.raises(ContractionError):
        bernoulli_cf(seq(1, 1))


def test_euler_partial_sums():
    a = seq(1, Fraction(1, 3), Fraction(1, 9))
    assert [f.value for f in approximants(euler_cf(a), 2)] == [1, Fraction(4, 3), Fraction(13, 9)]
    with pytest.raises(ContractionError):
        euler_cf(seq(1, 0, 2))


def test_collapse_zeros():
    src = from_terms(S(1), [(S(1), S(0)), (S(1), S(2)), (S(1), S(3))])
    col = collapse_zeros(src)
    # 1 + 1/(0 + 1/(2 + 1/3)) = 1 + 7/3
    assert approximants(col, col.length)[-1] == approximants(src, 3)[-1] == S(Fraction(10, 3))
    assert col.b0 == S(3) and col.length == 1
    with pytest.raises(ContractionError):
        collapse_zeros(from_terms(S(0), [(S(1), S(1)), (S(1), S(0))]))


def test_transform_descriptors_round_trip():
    g = {"b0": "0", "family": "golden"}
    for obj in (
        {"transform": "even", "of": g},
        {"transform": "odd", "of": g},
        {"transform": "extend:cor2", "of": g},
        {"transform": "tail", "m": 3, "of": g},
        {"transform": "collapse", "of": {"b0": "1", "terms": [["1", "0"], ["1", "2"], ["1", "3"]]}},
        {"transform": "bernoulli", "K": ["1", "2", "4"]},
        {"transform": "euler", "a": ["1", "1/2", "1/4"]},
    ):
        src = source_from_json(obj)
        again = source_from_json(source_to_json(src))
        n = 2 if src.length is None else src.length
        assert sources_agree(src, again, n)
