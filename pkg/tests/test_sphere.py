from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spectral04.coefficients import M, ONE, Qm
from spectral04.sphere import (
    HomogeneityError,
    ResidualPositionError,
    closed_form_moment,
    integrate_symbol,
    moment_weight,
    recursive_moment,
    sphere_moment,
)
from spectral04.symbols import Order, SymbolTerm
from spectral04.tensor import Fixed, TensorPolynomial, evaluate_polynomial


@pytest.mark.parametrize("n", [4, 6, 8])
def test_recursion_matches_closed_form(n):
    for degree in range(9):
        for idx in itertools.combinations_with_replacement(range(n), degree):
            exps = [idx.count(a) for a in range(n)]
            assert recursive_moment(idx, n) == closed_form_moment(exps, n), idx


@pytest.mark.parametrize("n", [4, 6, 8])
def test_total_mass(n):
    assert sum(recursive_moment((a, a), n) for a in range(n)) == 1
    # the symbolic degree-2 moment contracts to Vol
    assert sphere_moment((7, 7)).value == TensorPolynomial.scalar(1)


def test_known_values():
    assert recursive_moment((0, 0, 1, 1), 4) == Fraction(1, 24)
    assert recursive_moment((0, 0, 0, 0), 6) == Fraction(1, 16)
    assert closed_form_moment([2], 4) == Fraction(1, 4)
    assert moment_weight(4) == ONE / (2 * M * (2 * M + 2))


@settings(max_examples=30, deadline=None)
@given(st.permutations([11, 12, 13, 14]))
def test_moment_symmetric_under_permutation(perm):
    assert sphere_moment(perm).value == sphere_moment([11, 12, 13, 14]).value


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=0, max_size=6))
def test_symbolic_moment_matches_concrete(labels):
    # evaluating the delta pairings at n = 4 recovers the concrete moment
    value = evaluate_polynomial(sphere_moment([Fixed(x) for x in labels]).value, {"m": 2})
    assert abs(value - float(recursive_moment([x - 1 for x in labels], 4))) < 1e-15


def test_odd_moments_vanish():
    assert sphere_moment((1, 2, 3)).value.is_zero
    assert closed_form_moment([1, 2], 4) == 0


def _term(factors, xi_power):
    return SymbolTerm(ONE, tuple(factors), (), Order.of(xi_power))


def test_integrate_checks_homogeneity():
    with pytest.raises(HomogeneityError):
        integrate_symbol([_term([("Xi", 5)], Order(-2, 0))])


def test_integrate_rejects_position_factors():
    with pytest.raises(ResidualPositionError):
        integrate_symbol([_term([("X", 5), ("Xi", 6), ("Xi", 7)], Order(-2, -2))])


def test_integrate_pairs_xi():
    out = integrate_symbol([_term([("Xi", 5), ("Xi", 5)], Order(-2, -2))])
    ((coeff, factors, word),) = list(out.words())
    assert coeff == ONE and factors == () and word == ()
