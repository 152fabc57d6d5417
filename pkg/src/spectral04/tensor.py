"""Indexed tensor monomials: contraction, curvature symmetries, basis projection.

Factors are plain tuples tagged by their first entry:

=========================  =============================================
``("U", slot, i)``         component ``i`` of the slot vector ``u_slot``
``("DU", slot, j, i)``     ``d/dx_j`` of ``u_slot`` component ``i`` (opaque)
``("s",)``                 scalar curvature
``("Ric", i, j)``          Ricci tensor, indices sorted
``("R", i, j, k, l)``      Riemann tensor in canonical orientation
``("D", i, j)``            Kronecker delta, indices sorted
``("Xi", i)``              cotangent variable component
``("X", i)``               normal-coordinate Taylor factor ``x^i``
``("W", a, s, t)``         connection coefficient ``<nabla_a e_s, e_t>``
=========================  =============================================

Index labels are ``int`` (abstract; a label occurring twice in a monomial is
summed) or :class:`Fixed` (a concrete value ``1..n``, numeric paths only).

Curvature convention: ``Ric_ab = sum_l R_lalb`` and ``s = sum_a Ric_aa``.
"""

from __future__ import annotations

import itertools
from math import factorial
import json
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .coefficients import M, ONE, ZERO, Qm

__all__ = [
    "Fixed",
    "fresh",
    "TensorMonomial",
    "TensorPolynomial",
    "InvariantVector",
    "UnrecognizedInvariant",
    "BASIS",
    "BASIS_LATEX",
    "PREFACTORS",
    "canonicalize",
    "normalize_term",
    "riemann_canonical",
    "tp_mul",
    "project_to_basis",
    "metric_pattern",
    "factor_indices",
    "with_indices",
    "evaluate_polynomial",
]


class Fixed(NamedTuple):
    """A concrete index value."""

    value: int


_counter = itertools.count(1_000_000)


def fresh() -> int:
    """A new abstract label, never produced by canonical relabeling."""
    return next(_counter)


def label_key(label) -> tuple:
    if isinstance(label, Fixed):
        return (0, label.value)
    if label < 0:
        return (1, -label)
    return (2, label)


_TYPE_ORDER = {"U": 0, "DU": 1, "s": 2, "Ric": 3, "R": 4, "D": 5, "Xi": 6, "X": 7, "W": 8, "dW": 9}
_HEAD = {"U": 2, "DU": 2}  # leading non-index entries


def _idx(f) -> tuple:
    return f[_HEAD.get(f[0], 1):]


def _with_idx(f, new) -> tuple:
    h = _HEAD.get(f[0], 1)
    return f[:h] + tuple(new)


def factor_indices(f) -> tuple:
    """Index labels carried by a factor (slot numbers excluded)."""
    return _idx(f)


def with_indices(f, new) -> tuple:
    """The factor ``f`` with its index labels replaced by ``new``."""
    return _with_idx(f, new)


def _fkey(f) -> tuple:
    h = _HEAD.get(f[0], 1)
    return (_TYPE_ORDER[f[0]], f[1:h], tuple(label_key(x) for x in f[h:]))


# -- Riemann monoterm + first Bianchi ---------------------------------------


def _riemann_orbit(i, j, k, l):
    for (a, b, c, d), sign in (
        ((i, j, k, l), 1),
        ((j, i, k, l), -1),
        ((i, j, l, k), -1),
        ((j, i, l, k), 1),
    ):
        yield (a, b, c, d), sign
        yield (c, d, a, b), sign


def riemann_orient(i, j, k, l, key=label_key) -> tuple[int, tuple]:
    """Least arrangement in the 8-element monoterm orbit, with its sign (0 if R vanishes)."""
    best = None
    signs = {}
    for arr, sign in _riemann_orbit(i, j, k, l):
        signs.setdefault(arr, set()).add(sign)
        if best is None or tuple(map(key, arr)) < tuple(map(key, best)):
            best = arr
    if len(signs[best]) == 2:
        return 0, best
    return signs[best].pop(), best


def riemann_canonical(i, j, k, l, key=label_key) -> list[tuple[int, tuple]]:
    """Monoterm orientation followed by the first-Bianchi rewrite.

    For four distinct labels ``a<b<c<d`` the class ``R(a,d,b,c)`` is replaced
    by ``-R(a,b,c,d) + R(a,c,b,d)``; the two survivors are the independent
    orderings.
    """
    sign, arr = riemann_orient(i, j, k, l, key)
    if sign == 0:
        return []
    if len(set(arr)) == 4:
        a, b, c, d = sorted(arr, key=key)
        if arr == (a, d, b, c):
            return [(-sign, (a, b, c, d)), (sign, (a, c, b, d))]
    return [(sign, arr)]


# -- core normalizer -------------------------------------------------------------


def _counts(factors, word) -> dict:
    counts: dict = {}
    for f in factors:
        for x in _idx(f):
            if not isinstance(x, Fixed):
                counts[x] = counts.get(x, 0) + 1
    for x in word:
        if not isinstance(x, Fixed):
            counts[x] = counts.get(x, 0) + 1
    return counts


def _substitute(factors, word, old, new):
    factors = [_with_idx(f, [new if x == old else x for x in _idx(f)]) for f in factors]
    word = tuple(new if x == old else x for x in word)
    return factors, word


def _contract(coeff: Qm, factors: list, word: tuple):
    """Apply delta substitution and trace rules until nothing changes.

    Returns ``None`` when the monomial vanishes.
    """
    changed = True
    while changed:
        changed = False
        counts = _counts(factors, word)
        bad = [x for x, c in counts.items() if c > 2]
        if bad:
            raise ValueError(f"malformed index pairing: label(s) {bad} occur more than twice")
        for pos, f in enumerate(factors):
            tag = f[0]
            rest = factors[:pos] + factors[pos + 1 :]
            if tag == "D":
                i, j = f[1], f[2]
                if i == j:
                    if not isinstance(i, Fixed):
                        coeff = coeff * (2 * M)
                    factors = rest
                    changed = True
                    break
                if isinstance(i, Fixed) and isinstance(j, Fixed):
                    return None
                if not isinstance(i, Fixed) and counts[i] == 2:
                    factors, word = _substitute(rest, word, i, j)
                    changed = True
                    break
                if not isinstance(j, Fixed) and counts[j] == 2:
                    factors, word = _substitute(rest, word, j, i)
                    changed = True
                    break
            elif tag == "Ric":
                if f[1] == f[2] and not isinstance(f[1], Fixed):
                    factors = rest + [("s",)]
                    changed = True
                    break
            elif tag == "R":
                p = f[1:]
                if p[0] == p[1] or p[2] == p[3]:
                    return None
                trace = None
                for (x, y), (u, v), sign in (
                    ((0, 2), (1, 3), 1),
                    ((0, 3), (1, 2), -1),
                    ((1, 2), (0, 3), -1),
                    ((1, 3), (0, 2), 1),
                ):
                    if p[x] == p[y] and not isinstance(p[x], Fixed):
                        trace = (sign, p[u], p[v])
                        break
                if trace is not None:
                    sign, u, v = trace
                    coeff = coeff * sign
                    factors = rest + [("Ric", u, v)]
                    changed = True
                    break
            elif tag == "W":
                if f[2] == f[3]:
                    return None
            elif tag == "dW":
                if f[3] == f[4]:
                    return None
    return coeff, factors, word


def _orient(coeff: Qm, factors: list):
    out = []
    for f in factors:
        tag = f[0]
        if tag == "R":
            sign, arr = riemann_orient(*f[1:])
            if sign == 0:
                return None
            coeff = coeff * sign
            f = ("R",) + arr
        elif tag in ("Ric", "D"):
            f = (tag,) + tuple(sorted(f[1:], key=label_key))
        elif tag in ("W", "dW"):
            # antisymmetric in the last two (frame) indices
            if label_key(f[-2]) > label_key(f[-1]):
                coeff = -coeff
                f = f[:-2] + (f[-1], f[-2])
        out.append(f)
    out.sort(key=_fkey)
    return coeff, out


_MASK = (3, 0)
_MAX_TIE_PERMUTATIONS = 40320


def _position_class(tag: str, p: int, n: int) -> int:
    """Index positions that a symmetry of the factor can exchange share a class."""
    if tag in ("R", "Ric", "D"):
        return 0
    if tag in ("W", "dW") and p >= n - 2:
        return n - 2
    return p


def _signature(x, factors, dummies) -> tuple:
    """Label-independent description of where the dummy ``x`` occurs."""
    occ = []
    for f in factors:
        idx = _idx(f)
        for p, y in enumerate(idx):
            if y != x:
                continue
            others = tuple(sorted(
                _MASK if z in dummies else label_key(z) for q, z in enumerate(idx) if q != p
            ))
            h = _HEAD.get(f[0], 1)
            occ.append((_TYPE_ORDER[f[0]], f[1:h], _position_class(f[0], p, len(idx)), others))
    return tuple(sorted(occ))


def _relabel(factors: list, word: tuple):
    """Rename summed labels to ``-1, -2, ...`` canonically.

    Dummies that touch the (ordered) word are numbered by first position
    there; the rest by a label-invariant signature.  Dummies with equal
    signatures are tried in every order and the least oriented result kept.
    """
    counts = _counts(factors, word)
    dummies = {x for x, c in counts.items() if c == 2}
    if not dummies:
        return factors, word
    free = {x for x, c in counts.items() if c == 1}
    first = {}
    for k, x in enumerate(word):
        if x in dummies:
            first.setdefault(x, k)
    def rank(x):
        if x in first:
            return (first[x], ())
        return (len(word), _signature(x, factors, dummies))

    keyed = sorted(dummies, key=lambda x: (rank(x), label_key(x)))
    groups = [list(grp) for _, grp in itertools.groupby(keyed, key=rank)]
    targets = list(itertools.islice((k for k in itertools.count(-1, -1) if k not in free), len(dummies)))

    def rename(order):
        mapping = dict(zip(order, targets))
        fs = [_with_idx(f, [mapping.get(x, x) for x in _idx(f)]) for f in factors]
        return fs, tuple(mapping.get(x, x) for x in word)

    total = 1
    for grp in groups:
        total *= factorial(len(grp))
    if total == 1 or total > _MAX_TIE_PERMUTATIONS:
        return rename([x for grp in groups for x in grp])
    best = None
    for choice in itertools.product(*(itertools.permutations(grp) for grp in groups)):
        fs, w = rename([x for grp in choice for x in grp])
        oriented = _orient(ONE, fs)
        key = (0, ()) if oriented is None else (1, tuple(_fkey(f) for f in oriented[1]))
        if best is None or key < best[0]:
            best = (key, fs, w)
    return best[1], best[2]


def normalize_term(coeff: Qm, factors: Iterable, word: Sequence = ()) -> list[tuple[Qm, tuple, tuple]]:
    """Canonical form(s) of ``coeff * prod(factors)`` attached to an ordered ``word``.

    ``word`` is a sequence of labels owned by a non-commuting context (a
    Clifford word); its labels take part in contraction and renaming but its
    order is never changed.  Returns a list of ``(coeff, factors, word)``;
    empty when the term vanishes.
    """
    if coeff.is_zero:
        return []
    res = _contract(coeff, list(factors), tuple(word))
    if res is None:
        return []
    coeff, factors, word = res
    for _ in range(2):
        res = _orient(coeff, factors)
        if res is None:
            return []
        coeff, factors = res
        factors, word = _relabel(factors, word)
    res = _orient(coeff, factors)
    if res is None:
        return []
    coeff, factors = res

    # first Bianchi: expand each Riemann factor over its surviving orderings
    choices = []
    for f in factors:
        if f[0] == "R":
            choices.append([(s, ("R",) + arr) for s, arr in riemann_canonical(*f[1:])])
        else:
            choices.append([(1, f)])
    out = []
    for combo in itertools.product(*choices):
        sign = 1
        fs = []
        for s, f in combo:
            sign *= s
            fs.append(f)
        fs.sort(key=_fkey)
        out.append((coeff * sign, tuple(fs), word))
    return out


# -- monomials and polynomials ------------------------------------------------------


@dataclass(frozen=True)
class TensorMonomial:
    coeff: Qm
    factors: tuple = ()

    def __mul__(self, other):
        if isinstance(other, TensorMonomial):
            return TensorPolynomial.from_monomial(self) * TensorPolynomial.from_monomial(other)
        return TensorMonomial(self.coeff * other, self.factors)

    def render(self, style: str = "plain") -> str:
        return render_term(self.coeff, self.factors, style=style)

    def __str__(self):
        return self.render()


class TensorPolynomial:
    """Sum of canonical monomials keyed by ``(factors, i_power)``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for coeff, factors in terms:
                self._add(coeff, factors)

    def _add(self, coeff: Qm, factors: tuple):
        if coeff.is_zero:
            return
        key = (factors, coeff.i_power)
        total = self.terms.get(key, ZERO) + coeff
        if total.is_zero:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def add_term(self, coeff: Qm, factors: Iterable) -> "TensorPolynomial":
        """Canonicalize ``coeff * prod(factors)`` and accumulate it in place."""
        for c, fs, _ in normalize_term(coeff, factors):
            self._add(c, fs)
        return self

    @classmethod
    def from_monomial(cls, mono: TensorMonomial) -> "TensorPolynomial":
        return cls().add_term(mono.coeff, mono.factors)

    @classmethod
    def scalar(cls, value) -> "TensorPolynomial":
        return cls().add_term(Qm.of(value), ())

    def monomials(self) -> Iterator[TensorMonomial]:
        for (factors, _), coeff in self.terms.items():
            yield TensorMonomial(coeff, factors)

    def __iter__(self):
        return self.monomials()

    def __len__(self):
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TensorPolynomial") -> "TensorPolynomial":
        out = TensorPolynomial()
        out.terms = dict(self.terms)
        for (factors, _), coeff in other.terms.items():
            out._add(coeff, factors)
        return out

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorPolynomial":
        c = Qm.of(c)
        out = TensorPolynomial()
        for (factors, _), coeff in self.terms.items():
            out._add(coeff * c, factors)
        return out

    def __mul__(self, other):
        if isinstance(other, TensorPolynomial):
            return tp_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TensorPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def render(self, style: str = "plain") -> str:
        if not self.terms:
            return "0"
        parts = [render_term(c, f, style=style) for (f, _), c in sorted(self.terms.items(), key=_sort_key)]
        return " + ".join(parts)

    def __repr__(self):
        return f"TensorPolynomial({self.render()})"


def _sort_key(item):
    (factors, ip), _ = item
    return (len(factors), [_fkey(f) for f in factors], ip)


def canonicalize(mono: TensorMonomial) -> TensorPolynomial:
    """Contract deltas and traces, apply curvature symmetries, rename dummies.

    A polynomial is returned because the first-Bianchi rewrite can split one
    Riemann factor into two terms.
    """
    return TensorPolynomial.from_monomial(mono)


def _rename_dummies(factors: Sequence) -> tuple:
    counts = _counts(factors, ())
    mapping = {x: fresh() for x, c in counts.items() if c == 2}
    return tuple(_with_idx(f, [mapping.get(x, x) for x in _idx(f)]) for f in factors)


def tp_mul(a: TensorPolynomial, b: TensorPolynomial) -> TensorPolynomial:
    """Distributed product; summed labels of each operand are renamed apart first."""
    out = TensorPolynomial()
    for (fa, _), ca in a.terms.items():
        fa2 = _rename_dummies(fa)
        for (fb, _), cb in b.terms.items():
            out.add_term(ca * cb, fa2 + _rename_dummies(fb))
    return out


# -- rendering ---------------------------------------------------------------------


def label_name(x) -> str:
    if isinstance(x, Fixed):
        return str(x.value)
    if x < 0:
        letters = string.ascii_lowercase
        k = -x - 1
        return letters[k % 26] + ("" if k < 26 else str(k // 26))
    return f"i{x}"


def render_factor(f, style: str = "plain") -> str:
    tag = f[0]
    names = [label_name(x) for x in _idx(f)]
    if style == "latex":
        sub = "".join(names)
        return {
            "U": lambda: f"u^{{{f[1]}}}_{{{sub}}}",
            "DU": lambda: f"\\partial_{{{names[0]}}}u^{{{f[1]}}}_{{{names[1]}}}",
            "s": lambda: "s",
            "Ric": lambda: f"\\mathrm{{Ric}}_{{{sub}}}",
            "R": lambda: f"R_{{{sub}}}",
            "D": lambda: f"\\delta_{{{sub}}}",
            "Xi": lambda: f"\\xi_{{{sub}}}",
            "X": lambda: f"x^{{{sub}}}",
            "W": lambda: f"w_{{{names[1]}{names[2]}}}(e_{{{names[0]}}})",
            "dW": lambda: f"\\partial_{{{names[0]}}}w_{{{names[2]}{names[3]}}}(e_{{{names[1]}}})",
        }[tag]()
    if tag == "s":
        return "s"
    if tag == "U":
        return f"u{f[1]}[{names[0]}]"
    if tag == "DU":
        return f"d_{names[0]}(u{f[1]}[{names[1]}])"
    return f"{tag}[{','.join(names)}]"


def render_term(coeff: Qm, factors: Sequence, style: str = "plain") -> str:
    c = coeff.render(style)
    if not factors:
        return c
    body = (" " if style == "latex" else "*").join(render_factor(f, style) for f in factors)
    if coeff == ONE:
        return body
    if coeff == -ONE:
        return f"-{body}"
    if style == "plain" and (" " in c):
        c = f"({c})"
    return f"{c}{' ' if style == 'latex' else '*'}{body}"


# -- invariant basis ----------------------------------------------------------------

BASIS = (
    "s*g(u1,u2)*g(u3,u4)",
    "s*g(u1,u3)*g(u2,u4)",
    "s*g(u1,u4)*g(u2,u3)",
    "g(u1,u2)*Ric(u3,u4)",
    "g(u3,u4)*Ric(u1,u2)",
    "g(u1,u3)*Ric(u2,u4)",
    "g(u2,u4)*Ric(u1,u3)",
    "g(u1,u4)*Ric(u2,u3)",
    "g(u2,u3)*Ric(u1,u4)",
    "R(u1,u2,u3,u4)",
    "R(u1,u3,u2,u4)",
)

BASIS_LATEX = (
    "sg(u_1,u_2)g(u_3,u_4)",
    "sg(u_1,u_3)g(u_2,u_4)",
    "sg(u_1,u_4)g(u_2,u_3)",
    "g(u_1,u_2){\\rm Ric}(u_3,u_4)",
    "g(u_3,u_4){\\rm Ric}(u_1,u_2)",
    "g(u_1,u_3){\\rm Ric}(u_2,u_4)",
    "g(u_2,u_4){\\rm Ric}(u_1,u_3)",
    "g(u_1,u_4){\\rm Ric}(u_2,u_3)",
    "g(u_2,u_3){\\rm Ric}(u_1,u_4)",
    "R(u_1,u_2,u_3,u_4)",
    "R(u_1,u_3,u_2,u_4)",
)

_GG_SLOT = {((1, 2), (3, 4)): 0, ((1, 3), (2, 4)): 1, ((1, 4), (2, 3)): 2}
_G_RIC_SLOT = {
    ((1, 2), (3, 4)): 3,
    ((3, 4), (1, 2)): 4,
    ((1, 3), (2, 4)): 5,
    ((2, 4), (1, 3)): 6,
    ((1, 4), (2, 3)): 7,
    ((2, 3), (1, 4)): 8,
}
_RIEM_SLOT = {(1, 2, 3, 4): 9, (1, 3, 2, 4): 10}

# Symbolic global prefactors; Vol = Vol(S^{2m-1}) = 2 pi^m / Gamma(m), tr[id] = 2^m.
PREFACTORS = ("none", "Vol*tr[id]", "-Vol*tr[id]")


class UnrecognizedInvariant(ValueError):
    """A canonical monomial lies outside the span of the invariant basis."""

    def __init__(self, monomial: TensorMonomial):
        self.monomial = monomial
        super().__init__(f"unrecognized invariant: {monomial.render()}")


@dataclass(frozen=True)
class InvariantVector:
    """Exact coefficients over :data:`BASIS` times a symbolic prefactor."""

    coefficients: tuple
    prefactor: str = "none"

    def __post_init__(self):
        if len(self.coefficients) != len(BASIS):
            raise ValueError(f"expected {len(BASIS)} coefficients")
        if self.prefactor not in PREFACTORS:
            raise ValueError(f"unknown prefactor {self.prefactor!r}")
        object.__setattr__(self, "coefficients", tuple(Qm.of(c) for c in self.coefficients))

    @classmethod
    def zero(cls, prefactor: str = "none") -> "InvariantVector":
        return cls((ZERO,) * len(BASIS), prefactor)

    @classmethod
    def unit(cls, k: int) -> "InvariantVector":
        return cls(tuple(ONE if j == k else ZERO for j in range(len(BASIS))))

    def __add__(self, other: "InvariantVector") -> "InvariantVector":
        return InvariantVector(
            tuple(a + b for a, b in zip(self.coefficients, other.coefficients)), self.prefactor
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "InvariantVector":
        c = Qm.of(c)
        return InvariantVector(tuple(a * c for a in self.coefficients), self.prefactor)

    def with_prefactor(self, prefactor: str) -> "InvariantVector":
        return InvariantVector(self.coefficients, prefactor)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coefficients)

    def same_coefficients(self, other: "InvariantVector") -> bool:
        return self.coefficients == other.coefficients

    def at(self, m_value) -> tuple:
        return tuple(c.at(m_value) for c in self.coefficients)

    def evaluate(self, env: dict) -> float:
        """Numeric value of the density on ``env`` (see :func:`evaluate_polynomial`)."""
        m = env["m"]
        g = env["u"] @ env["u"].T
        Ric_uu = env["u"] @ env["Ric"] @ env["u"].T
        R = env["R"]
        u1, u2, u3, u4 = env["u"]
        s = env["s"]
        values = (
            s * g[0, 1] * g[2, 3],
            s * g[0, 2] * g[1, 3],
            s * g[0, 3] * g[1, 2],
            g[0, 1] * Ric_uu[2, 3],
            g[2, 3] * Ric_uu[0, 1],
            g[0, 2] * Ric_uu[1, 3],
            g[1, 3] * Ric_uu[0, 2],
            g[0, 3] * Ric_uu[1, 2],
            g[1, 2] * Ric_uu[0, 3],
            np.einsum("abcd,a,b,c,d->", R, u1, u2, u3, u4),
            np.einsum("abcd,a,b,c,d->", R, u1, u3, u2, u4),
        )
        total = 0.0
        for c, v in zip(self.coefficients, values):
            if c.is_zero:
                continue
            cv = c.at(m)
            if c.is_imaginary:
                raise ValueError("imaginary coefficient in a density")
            total += float(cv) * float(v)
        return total

    def render(self, style: str = "plain") -> str:
        names = BASIS_LATEX if style == "latex" else BASIS
        parts = []
        for c, name in zip(self.coefficients, names):
            if c.is_zero:
                continue
            text = c.render(style)
            if style == "plain":
                if " " in text:
                    text = f"({text})"
                parts.append(f"{text}*{name}")
            else:
                parts.append(f"{text}\\,{name}" if c != ONE else name)
        if not parts:
            return "0"
        joined = " + ".join(parts)
        return joined.replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "basis": list(BASIS),
            "coefficients": [c.render() for c in self.coefficients],
            "prefactor": self.prefactor,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def project_to_basis(p: TensorPolynomial, prefactor: str = "none") -> InvariantVector:
    """Read a fully contracted scalar polynomial off in the basis :data:`BASIS`.

    Raises :class:`UnrecognizedInvariant` for any monomial outside the span.
    """
    coeffs = [ZERO] * len(BASIS)
    for mono in p.monomials():
        for k, c in _project_monomial(mono):
            coeffs[k] = coeffs[k] + c
    return InvariantVector(tuple(coeffs), prefactor)


def _project_monomial(mono: TensorMonomial) -> list[tuple[int, Qm]]:
    if mono.coeff.is_imaginary:
        raise UnrecognizedInvariant(mono)
    slot_of = {}
    curv = []
    for f in mono.factors:
        if f[0] == "U":
            slot_of.setdefault(f[2], []).append(f[1])
        elif f[0] in ("s", "Ric", "R"):
            curv.append(f)
        else:
            raise UnrecognizedInvariant(mono)
    slots = sorted(s for v in slot_of.values() for s in v)
    if slots != [1, 2, 3, 4] or len(curv) != 1:
        raise UnrecognizedInvariant(mono)
    (f,) = curv
    pairs = sorted(tuple(sorted(v)) for v in slot_of.values() if len(v) == 2)
    singles = {x: v[0] for x, v in slot_of.items() if len(v) == 1}
    if f[0] == "s":
        if len(pairs) != 2:
            raise UnrecognizedInvariant(mono)
        return [(_GG_SLOT[tuple(pairs)], mono.coeff)]
    if f[0] == "Ric":
        if len(pairs) != 1 or set(f[1:]) != set(singles):
            raise UnrecognizedInvariant(mono)
        ric = tuple(sorted(singles[x] for x in f[1:]))
        return [(_G_RIC_SLOT[(pairs[0], ric)], mono.coeff)]
    if pairs or set(f[1:]) != set(singles):
        raise UnrecognizedInvariant(mono)
    args = [singles[x] for x in f[1:]]
    return [
        (_RIEM_SLOT[arr], mono.coeff * sign)
        for sign, arr in riemann_canonical(*args, key=lambda v: v)
    ]


def metric_pattern(p: TensorPolynomial) -> tuple[Qm, Qm, Qm]:
    """Coefficients of ``(g12 g34, g13 g24, g14 g23)`` in a curvature-free scalar."""
    out = [ZERO, ZERO, ZERO]
    for mono in p.monomials():
        slot_of = {}
        for f in mono.factors:
            if f[0] != "U":
                raise UnrecognizedInvariant(mono)
            slot_of.setdefault(f[2], []).append(f[1])
        pairs = sorted(tuple(sorted(v)) for v in slot_of.values())
        if mono.coeff.is_imaginary or tuple(pairs) not in _GG_SLOT:
            raise UnrecognizedInvariant(mono)
        k = _GG_SLOT[tuple(pairs)]
        out[k] = out[k] + mono.coeff
    return tuple(out)


# -- numeric evaluation -------------------------------------------------------------


def evaluate_polynomial(p: TensorPolynomial, env: dict) -> complex:
    """Evaluate a polynomial numerically, summing abstract labels over ``0..n-1``.

    ``env`` holds ``m`` plus numpy arrays ``R`` (n,n,n,n), ``Ric`` (n,n),
    scalar ``s``, ``u`` (4,n) and optionally ``xi`` (n,).  Concrete labels
    :class:`Fixed` are 1-based.
    """
    total = 0j
    for mono in p.monomials():
        total += _evaluate_monomial(mono, env)
    return total


def _evaluate_monomial(mono: TensorMonomial, env: dict) -> complex:
    letters = {}
    operands = []
    subs = []
    scalar = 1.0
    n = 2 * env["m"]

    def letter(x):
        if x not in letters:
            letters[x] = string.ascii_letters[len(letters)]
        return letters[x]

    for f in mono.factors:
        tag = f[0]
        if tag == "s":
            scalar *= env["s"]
            continue
        arr = {
            "U": lambda: env["u"][f[1] - 1],
            "Ric": lambda: env["Ric"],
            "R": lambda: env["R"],
            "D": lambda: np.eye(n),
            "Xi": lambda: env["xi"],
        }.get(tag)
        if arr is None:
            raise ValueError(f"cannot evaluate factor {f!r} numerically")
        arr = arr()
        idx = _idx(f)
        sl = tuple(x.value - 1 if isinstance(x, Fixed) else slice(None) for x in idx)
        arr = arr[sl]
        sub = "".join(letter(x) for x in idx if not isinstance(x, Fixed))
        operands.append(arr)
        subs.append(sub)
    c = mono.coeff.at(env["m"])
    if mono.coeff.is_imaginary:
        cval = complex(0, float(c.im))
    else:
        cval = float(c)
    if not operands:
        return cval * scalar
    value = np.einsum(",".join(subs) + "->", *operands)
    return cval * scalar * value
