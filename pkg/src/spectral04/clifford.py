"""Clifford words over abstract frame generators and their normalized trace.

Generators obey ``c(e_a) c(e_b) + c(e_b) c(e_a) = -2 delta_ab``.  Words are
stored macro-expanded: a tuple of index labels, ``(a, b, c)`` meaning
``c(e_a) c(e_b) c(e_c)``; the component factors produced by expanding
``c(u_i)`` and ``c(xi)`` live in the tensor coefficient.

Traces are normalized, ``tr[w] / tr[id]``; the ``2^m`` is restored only in the
final prefactor.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .coefficients import M, ONE, ZERO, Qm
from .tensor import (
    Fixed,
    TensorPolynomial,
    fresh,
    label_key,
    label_name,
    normalize_term,
    render_term,
)

__all__ = [
    "BasisVec",
    "SlotVec",
    "XiVec",
    "DxVec",
    "CliffordWord",
    "CliffordPolynomial",
    "expand_macros",
    "clifford_reduce",
    "clifford_trace",
    "perfect_matchings",
]


class BasisVec(NamedTuple):
    """``c(e_index)``."""

    index: object


class SlotVec(NamedTuple):
    """``c(u_slot) = sum_a u^slot_a c(e_a)``."""

    slot: int


class XiVec(NamedTuple):
    """``c(xi) = sum_a xi_a c(e_a)``."""


class DxVec(NamedTuple):
    """``c(dx_j)``; identified with ``c(e_j)`` at the base point of normal coordinates."""

    index: object


Generator = Union[BasisVec, SlotVec, XiVec, DxVec]


class CliffordWord(NamedTuple):
    """``coeff * prod(factors) * gens[0] gens[1] ...`` with possibly unexpanded generators."""

    gens: tuple
    coeff: Qm = ONE
    factors: tuple = ()


def _expand_gen(g) -> tuple[object, list]:
    if isinstance(g, BasisVec):
        return g.index, []
    if isinstance(g, DxVec):
        return g.index, []
    a = fresh()
    if isinstance(g, SlotVec):
        return a, [("U", g.slot, a)]
    if isinstance(g, XiVec):
        return a, [("Xi", a)]
    # bare labels are accepted as basis generators
    return g, []


def expand_macros(word: CliffordWord) -> "CliffordPolynomial":
    """Replace every slot/xi/dx generator by basis generators with component factors."""
    labels = []
    factors = list(word.factors)
    for g in word.gens:
        label, extra = _expand_gen(g)
        labels.append(label)
        factors.extend(extra)
    return CliffordPolynomial().add_term(word.coeff, factors, labels)


class CliffordPolynomial:
    """Sum of expanded Clifford words keyed by ``(word, factors, i_power)``."""

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: dict = {}

    def _add(self, coeff: Qm, factors: tuple, word: tuple):
        if coeff.is_zero:
            return
        key = (word, factors, coeff.i_power)
        total = self.terms.get(key, ZERO) + coeff
        if total.is_zero:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def add_term(self, coeff: Qm, factors: Iterable, word: Sequence) -> "CliffordPolynomial":
        for c, fs, w in normalize_term(Qm.of(coeff), factors, word):
            self._add(c, fs, w)
        return self

    @classmethod
    def of(cls, *gens, coeff=ONE, factors=()) -> "CliffordPolynomial":
        return expand_macros(CliffordWord(tuple(gens), Qm.of(coeff), tuple(factors)))

    def words(self) -> Iterator[tuple[Qm, tuple, tuple]]:
        for (word, factors, _), coeff in self.terms.items():
            yield coeff, factors, word

    def __iter__(self):
        return self.words()

    def __len__(self):
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CliffordPolynomial") -> "CliffordPolynomial":
        out = CliffordPolynomial()
        out.terms = dict(self.terms)
        for c, fs, w in other.words():
            out._add(c, fs, w)
        return out

    def __eq__(self, other):
        if not isinstance(other, CliffordPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def render(self, style: str = "plain") -> str:
        if not self.terms:
            return "0"
        return " + ".join(render_word(c, fs, w, style) for c, fs, w in self.words())

    def __repr__(self):
        return f"CliffordPolynomial({self.render()})"


def render_word(coeff: Qm, factors: Sequence, word: Sequence, style: str = "plain") -> str:
    if style == "latex":
        gens = "".join(f"c(e_{{{label_name(x)}}})" for x in word)
    else:
        gens = "".join(f"c(e_{label_name(x)})" for x in word)
    head = render_term(coeff, factors, style)
    if not word:
        return head
    if head == "1":
        return gens
    if head == "-1":
        return "-" + gens
    return f"{head}{' ' if style == 'latex' else '*'}{gens}"


# -- relation-based reduction -------------------------------------------------------


def clifford_reduce(word: Union[CliffordWord, "CliffordPolynomial"]) -> CliffordPolynomial:
    """Rewrite into strictly ordered, repetition-free words using the Clifford relation.

    ``c_x c_y -> -c_y c_x - 2 delta_xy`` for out-of-order neighbours and
    ``c_x c_x -> -1`` (concrete) or ``-2m`` (summed label) for repeats.
    """
    poly = expand_macros(word) if isinstance(word, CliffordWord) else word
    todo = list(poly.words())
    out = CliffordPolynomial()
    guard = 0
    while todo:
        guard += 1
        if guard > 200_000:
            raise RuntimeError("Clifford reduction did not terminate")
        coeff, factors, w = todo.pop()
        pos = next(
            (k for k in range(len(w) - 1) if label_key(w[k]) >= label_key(w[k + 1])),
            None,
        )
        if pos is None:
            out._add(coeff, factors, w)
            continue
        x, y = w[pos], w[pos + 1]
        rest = w[:pos] + w[pos + 2 :]
        if x == y:
            # c_x c_x = -delta_xx: -1 for a concrete index, -2m when x is summed
            todo.extend(normalize_term(-coeff, list(factors) + [("D", x, x)], rest))
            continue
        swapped = w[:pos] + (y, x) + w[pos + 2 :]
        todo.extend(normalize_term(-coeff, factors, swapped))
        todo.extend(normalize_term(coeff * -2, list(factors) + [("D", x, y)], rest))
    return out


# -- trace by pairing expansion -------------------------------------------------------


@lru_cache(maxsize=None)
def perfect_matchings(n: int) -> tuple:
    """All perfect matchings of positions ``0..n-1`` with their crossing signs."""
    if n % 2:
        return ()
    if n == 0:
        return ((1, ()),)

    def rec(items):
        if not items:
            yield 1, ()
            return
        first, rest = items[0], items[1:]
        for k, partner in enumerate(rest):
            remaining = rest[:k] + rest[k + 1 :]
            sign = -1 if k % 2 else 1
            for s, pairs in rec(remaining):
                yield sign * s, ((first, partner),) + pairs

    return tuple(rec(tuple(range(n))))


def clifford_trace(p: Union[CliffordPolynomial, CliffordWord]) -> TensorPolynomial:
    """Normalized trace ``tr[p]/tr[id]`` as a tensor polynomial.

    A word of ``2k`` generators contributes ``sum_matchings sign * prod(-delta)``;
    odd words trace to zero.
    """
    if isinstance(p, CliffordWord):
        p = expand_macros(p)
    out = TensorPolynomial()
    for coeff, factors, word in p.words():
        n = len(word)
        if n % 2:
            continue
        base = coeff if (n // 2) % 2 == 0 else -coeff
        for sign, pairs in perfect_matchings(n):
            deltas = [("D", word[i], word[j]) for i, j in pairs]
            out.add_term(base * sign, list(factors) + deltas)
    return out
