from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coleman_heights.errors import NonSimpleRootError, PrecisionError
from coleman_heights.padic import (PadicContext, PadicNumber, arithmetic, canonical_key, hensel_roots,
                                   iwasawa_log, teichmuller, valuation_rational)

C7 = PadicContext(7, 12)
C13 = PadicContext(13, 12)


def O(p, k):
    return PadicNumber._make(p, k, 0, k)


def test_additive_identity():
    a = PadicContext(7, 5)(1)
    s = arithmetic(a, PadicNumber.exact_zero(7), "add")
    assert str(s) == "1 + O(7^5)"


def test_self_division_loses_valuation_digits():
    a = PadicContext(7, 5)(7)
    q = arithmetic(a, a, "div")
    assert str(q) == "1 + O(7^4)"


def test_product_against_rational_oracle():
    a = PadicContext(13, 5)(4 * 13 + 2 * 13**2)
    b = PadicNumber.from_rational(13, Fraction(1, 13), 4)
    r = arithmetic(a, b, "mul")
    assert r.absprec == 4
    exact = Fraction(4 * 13 + 2 * 13**2) * Fraction(1, 13)
    assert r == PadicContext(13, 4)(exact)
    assert str(r) == "4 + 2*13 + O(13^4)"


def test_division_errors():
    with pytest.raises(ZeroDivisionError):
        C7(3) / PadicNumber.exact_zero(7)
    with pytest.raises(PrecisionError):
        O(7, 5).inverse()


def test_negative_valuation_display():
    x = C7(Fraction(1, 7)) + 1 + 3 * 7
    assert str(x).startswith("7^-1 + 1 + 3*7 + ")
    assert x.valuation == -1


def test_display_omits_zero_digits_and_unit_coefficients():
    x = PadicContext(7, 6)(7 + 2 * 7**3)
    assert str(x) == "7 + 2*7^3 + O(7^6)"


def test_from_rational_denominator():
    x = PadicNumber.from_rational(7, Fraction(2, 3), 10)
    assert (x * 3) == PadicContext(7, 10)(2)


def test_valuation_rational():
    assert valuation_rational(Fraction(49, 3), 7) == 2
    assert valuation_rational(Fraction(5, 14), 7) == -1


# -- log and teichmuller ----------------------------------------------------

def test_log_trivial_values():
    assert iwasawa_log(C7(1)).is_zero()
    assert iwasawa_log(C7(7)).is_zero()
    assert iwasawa_log(C7(49 * 3)) == iwasawa_log(C7(3))


def test_log_of_zero_raises():
    with pytest.raises(PrecisionError):
        iwasawa_log(PadicNumber.exact_zero(7))


def _series_log(z, p, N):
    """log(1+z) for z in pZ by the plain series, summed in Q and truncated."""
    s = Fraction(0)
    for n in range(1, 8 * N):
        s += Fraction((-1) ** (n + 1) * z**n, n)
    return PadicContext(p, N)(s)


@pytest.mark.parametrize("z", [7, 14, 49 * 3, -7])
def test_log_against_series_oracle(z):
    N = 8
    ours = iwasawa_log(PadicContext(7, N)(1 + z))
    assert ours.agrees_with(_series_log(z, 7, N), N - 2)


@pytest.mark.parametrize("p,x", [(7, 3), (13, 5), (7, 1 + 7)])
def test_teichmuller(p, x):
    ctx = PadicContext(p, 12)
    w = teichmuller(ctx(x))
    assert w.residue() == x % p
    d = w ** (p - 1) - 1
    assert d.is_zero() and d.absprec >= 11
    assert iwasawa_log(w).is_zero()


def test_teichmuller_of_one_unit_is_one():
    assert teichmuller(C7(8)) == C7(1)


def test_teichmuller_rejects_nonunit():
    with pytest.raises((ValueError, PrecisionError)):
        teichmuller(C7(7))


units7 = st.integers(min_value=1, max_value=7**12).filter(lambda n: n % 7)
elems7 = st.integers(min_value=-(7**12), max_value=7**12)


@settings(max_examples=60, deadline=None)
@given(units7, units7, st.integers(0, 3), st.integers(0, 3))
def test_log_multiplicative(a, b, i, j):
    x, y = C7(a * 7**i), C7(b * 7**j)
    lhs = iwasawa_log(x * y)
    rhs = iwasawa_log(x) + iwasawa_log(y)
    assert lhs.agrees_with(rhs, min(lhs.absprec, rhs.absprec))


@settings(max_examples=60, deadline=None)
@given(elems7, elems7, elems7)
def test_ring_axioms(a, b, c):
    x, y, z = C7(a), C7(b), C7(Fraction(c, 7))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) + z == x + (y + z)
    assert x - x == PadicNumber.exact_zero(7) or (x - x).is_zero()


@settings(max_examples=40, deadline=None)
@given(units7)
def test_teichmuller_kills_log(u):
    assert iwasawa_log(teichmuller(C7(u))).is_zero()


# -- roots ----------------------------------------------------------------------

def test_sqrt_two():
    r = C7(2).sqrt()
    assert r * r == C7(2)
    assert r.residue() in (3, 4)


def test_hensel_square_roots_of_two():
    roots = hensel_roots([-2, 0, 1], C7)
    assert len(roots) == 2
    assert (roots[0] + roots[1]).is_zero()
    for r in roots:
        assert (r * r - 2).is_zero()
    assert {str(r).split(" + ")[0] for r in roots} == {"3", "4"}
    assert str(roots[0]).startswith("3 + 7 + 2*7^2")


def test_hensel_linear():
    assert hensel_roots([-5, 1], C7) == [C7(5)]


def test_hensel_deterministic_and_ordered():
    f = [-16, -16, 0, 1]
    r1, r2 = hensel_roots(f, C13), hensel_roots(f, C13)
    assert [str(x) for x in r1] == [str(x) for x in r2]
    assert [canonical_key(x) for x in r1] == sorted(canonical_key(x) for x in r1)


def test_hensel_short_37a_cubic():
    # y^2 = x^3 - 16x + 16
    roots = hensel_roots([16, -16, 0, 1], C13)
    assert any(str(r).startswith("7 + 7*13 + 4*13^2 + 7*13^3 + 6*13^4") for r in roots)
    for r in roots:
        assert (r**3 - 16 * r + 16).is_zero()


def test_hensel_root_outside_zp():
    # 7 x - 1 has the root 1/7
    roots = hensel_roots([-1, 7], C7)
    assert len(roots) == 1 and roots[0].valuation == -1
    assert (roots[0] * 7 - 1).is_zero()


def test_hensel_non_simple_root():
    with pytest.raises(NonSimpleRootError):
        hensel_roots([0, 0, 1], C7)


def test_canonical_key_is_precision_stable():
    for x in (2, 3 + 7, Fraction(1, 7) + 5):
        assert canonical_key(PadicContext(7, 8)(x))[2][:6] == canonical_key(PadicContext(7, 12)(x))[2][:6]


def test_precision_is_lower_bound():
    # recomputing at N+4 agrees on every claimed digit
    for N in (6, 10):
        lo = iwasawa_log(PadicContext(13, N)(Fraction(2, 3)))
        hi = iwasawa_log(PadicContext(13, N + 4)(Fraction(2, 3)))
        assert hi.agrees_with(lo, lo.absprec)


def test_context_rejects_composite():
    with pytest.raises(ValueError):
        PadicContext(9, 5)
