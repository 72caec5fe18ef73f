from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ftgossip.exact import (
    Dyadic,
    chi,
    chi_scan,
    dyadic_add,
    dyadic_cmp,
    dyadic_mul,
    dyadic_normalize,
    exact_rank,
    format_rational,
    is_dyadic,
    parse_rational,
)

dyadics = st.builds(Dyadic, st.integers(-10**6, 10**6), st.integers(0, 40))


@pytest.mark.parametrize("num,exp,want", [(4, 3, (1, 1)), (0, 5, (0, 0)), (6, 2, (3, 1)), (-12, 2, (-3, 0))])
def test_normalize(num, exp, want):
    d = dyadic_normalize(num, exp)
    assert (d.num, d.exp) == want


def test_normalize_rejects_negative_exponent():
    with pytest.raises(ValueError):
        Dyadic(1, -1)


def test_small_arithmetic():
    assert dyadic_add(Dyadic(1, 1), Dyadic(1, 2)) == Dyadic(3, 2)
    assert str(dyadic_add(Dyadic(1, 1), Dyadic(1, 2))) == "3/2^2"
    assert dyadic_mul(Dyadic(1, 1), Dyadic(1, 1)) == Dyadic(1, 2)
    assert dyadic_cmp(Dyadic(3, 2), Dyadic(1, 1)) == 1
    assert dyadic_cmp(Dyadic(1, 1), Dyadic(2, 2)) == 0
    assert dyadic_cmp(Dyadic(-1, 3), Dyadic(0)) == -1


@given(dyadics, dyadics, dyadics)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()
    assert (a * b).to_fraction() == a.to_fraction() * b.to_fraction()


@given(dyadics)
def test_normalized_form_is_stable(a):
    again = dyadic_normalize(a.num, a.exp)
    assert (again.num, again.exp) == (a.num, a.exp)
    # integers keep exp 0, so only fractional values need an odd numerator
    assert a.num % 2 == 1 or a.exp == 0
    assert a.num != 0 or a.exp == 0
    assert Dyadic.from_fraction(a.to_fraction()) == a


@given(dyadics, dyadics)
def test_order_matches_fractions(a, b):
    want = (a.to_fraction() > b.to_fraction()) - (a.to_fraction() < b.to_fraction())
    assert dyadic_cmp(a, b) == want
    assert (a < b) == (a.to_fraction() < b.to_fraction())


def test_chi_examples():
    assert chi(Dyadic(1, 3)) == 3
    assert chi(Dyadic(1)) == 0
    assert chi(Dyadic(3, 2)) == 1
    assert chi_scan(Dyadic(3, 2)) == 1
    assert chi(Fraction(5, 16)) == 2


@pytest.mark.parametrize("bad", [Dyadic(0), Dyadic(-1, 2), Dyadic(3, 1)])
def test_chi_domain(bad):
    with pytest.raises(ValueError):
        chi(bad)


@given(st.integers(1, 2**30), st.integers(0, 64))
def test_chi_brackets_value(num, exp):
    f = Dyadic(num, exp)
    if f > Dyadic(1):
        return
    d = chi(f)
    assert d == chi_scan(f)
    assert Fraction(1, 2**d) <= f.to_fraction()
    if f != Dyadic(1):
        assert f.to_fraction() < Fraction(1, 2 ** (d - 1))


def test_is_dyadic():
    assert is_dyadic(Fraction(3, 8))
    assert not is_dyadic(Fraction(2, 3))
    assert is_dyadic(Fraction(0))


def test_rational_text_round_trip():
    for text, value in [("3", 3), ("-3/4", Fraction(-3, 4)), ("5/2^3", Fraction(5, 8)), ("2/6", Fraction(1, 3))]:
        assert parse_rational(text) == value
    assert format_rational(Fraction(5, 8)) == "5/2^3"
    assert format_rational(Fraction(1, 3)) == "1/3"
    assert format_rational(Fraction(-4)) == "-4"
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational("abc")


@given(st.fractions())
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_exact_rank_small():
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[Fraction(1, 2), 0], [0, Dyadic(1, 3)]]) == 2
    assert exact_rank([[0, 0], [0, 0]]) == 0
    assert exact_rank([[1, 1, 1], [1, 2, 3], [2, 3, 4]]) == 2


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4))
def test_exact_rank_matches_plain_elimination(rows):
    # textbook elimination over Fraction as the reference
    a = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    while rank < len(a) and col < len(a[0]):
        piv = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][col]:
                f = a[r][col] / a[rank][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
        col += 1
    assert exact_rank(rows) == rank
