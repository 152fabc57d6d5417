"""Monomial integrals over the unit cosphere ``|xi| = 1`` in dimension ``n = 2m``.

Results are exact multiples of the sphere volume ``Vol = 2 pi^m / Gamma(m)``,
which is carried as a tag rather than a number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .clifford import CliffordPolynomial, perfect_matchings
from .coefficients import ONE, Qm
from .tensor import TensorPolynomial

__all__ = [
    "SphereMoment",
    "HomogeneityError",
    "ResidualPositionError",
    "sphere_moment",
    "moment_weight",
    "closed_form_moment",
    "recursive_moment",
    "integrate_symbol",
]


class HomogeneityError(ValueError):
    """The integrand is not homogeneous of degree ``-2m`` in ``xi``."""


class ResidualPositionError(ValueError):
    """A position-dependent factor survived to the integration step."""


@dataclass(frozen=True)
class SphereMoment:
    """``integral xi_{l1} ... xi_{l2k} dsigma = value * Vol``."""

    degree: int
    value: TensorPolynomial
    volume_tag: str = "Vol"


@lru_cache(maxsize=None)
def moment_weight(degree: int) -> Qm:
    """``1 / (n (n+2) ... (n + degree - 2))``: the weight of each delta pairing."""
    w = ONE
    for j in range(degree // 2):
        # 2k - 2 + n at k = j + 1
        w = w / Qm.poly(2 * j, 2)
    return w


def sphere_moment(labels: Sequence) -> SphereMoment:
    """Moment of the given index labels as a sum of delta products.

    Follows the recursion
    ``I^{g1..g2k} = 1/(2k-2+n) sum_j delta^{g1 gj} I^{rest}``, which unrolls to
    ``moment_weight(2k)`` times the sum over all pairings.
    """
    labels = tuple(labels)
    out = TensorPolynomial()
    if len(labels) % 2:
        return SphereMoment(len(labels), out)
    w = moment_weight(len(labels))
    for _, pairs in perfect_matchings(len(labels)):
        out.add_term(w, [("D", labels[i], labels[j]) for i, j in pairs])
    return SphereMoment(len(labels), out)


def recursive_moment(indices: Sequence[int], n: int) -> Fraction:
    """Moment of concrete coordinate indices divided by ``Vol``, by the delta recursion."""
    return _recursive(tuple(sorted(indices)), n)


@lru_cache(maxsize=None)
def _recursive(idx: tuple, n: int) -> Fraction:
    if not idx:
        return Fraction(1)
    if len(idx) % 2:
        return Fraction(0)
    first, rest = idx[0], idx[1:]
    total = Fraction(0)
    for j, g in enumerate(rest):
        if g == first:
            total += _recursive(rest[:j] + rest[j + 1 :], n)
    return total / (len(idx) - 2 + n)


def _rising_half(b: int) -> Fraction:
    """``Gamma(b + 1/2) / Gamma(1/2)``."""
    out = Fraction(1)
    for j in range(b):
        out *= Fraction(2 * j + 1, 2)
    return out


def closed_form_moment(exponents: Sequence[int], n: int) -> Fraction:
    """``integral prod xi_i^{a_i} dsigma / Vol`` from the Gamma closed form.

    ``2 prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2)`` divided by
    ``2 pi^{n/2} / Gamma(n/2)``; evaluated exactly through the functional equation.
    """
    exps = list(exponents) + [0] * (n - len(exponents))
    if any(a % 2 for a in exps):
        return Fraction(0)
    out = Fraction(1)
    for a in exps:
        out *= _rising_half(a // 2)
    # Gamma(n/2) / Gamma(n/2 + k)
    k = sum(exps) // 2
    for j in range(k):
        out /= Fraction(n, 2) + j
    return out


def integrate_symbol(terms) -> CliffordPolynomial:
    """Integrate symbol terms of total order ``-2m`` over the cosphere.

    Each term must provide ``coeff``, ``factors``, ``word``, ``xi_power`` and
    ``order``; ``Xi`` factors are replaced by moment pairings and the power of
    ``|xi|`` drops out.  The result is the coefficient of ``Vol``.
    """
    out = CliffordPolynomial()
    target = (-2, 0)
    for t in terms:
        if tuple(t.order) != target:
            raise HomogeneityError(f"order {t.order} differs from -2m")
        xi_labels = []
        rest = []
        for f in t.factors:
            if f[0] == "Xi":
                xi_labels.append(f[1])
            elif f[0] in ("X", "W"):
                raise ResidualPositionError(f"factor {f!r} left at the base point")
            else:
                rest.append(f)
        if len(xi_labels) % 2:
            continue
        w = t.coeff * moment_weight(len(xi_labels))
        for _, pairs in perfect_matchings(len(xi_labels)):
            deltas = [("D", xi_labels[i], xi_labels[j]) for i, j in pairs]
            out.add_term(w, rest + deltas, t.word)
    return out
