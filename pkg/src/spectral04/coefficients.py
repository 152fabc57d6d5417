"""Exact scalar coefficients: rational functions of the half-dimension ``m``.

A :class:`Qm` is ``i**i_power * num(m) / den(m)`` where ``num`` and ``den`` are
integer polynomials stored densely (lowest degree first).  The pair is kept
reduced (polynomial gcd 1, integer content 1, positive leading coefficient in
the denominator), so structural equality is value equality.

Only ``i_power`` 0 and 1 are stored: a product of two imaginary factors folds
``i**2 = -1`` into the sign.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import NamedTuple, Union

Poly = tuple  # tuple[int, ...], low degree first, no trailing zeros

__all__ = [
    "Qm",
    "Gaussian",
    "PoleError",
    "qm_add",
    "qm_mul",
    "qm_eval",
    "M",
    "ZERO",
    "ONE",
    "I",
]


class PoleError(ZeroDivisionError):
    """Raised when a coefficient is evaluated at a root of its denominator."""


class Gaussian(NamedTuple):
    """Exact Gaussian rational ``re + i*im``."""

    re: Fraction
    im: Fraction


# -- dense polynomial helpers -------------------------------------------------


def _trim(p) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(p, q):
    n = max(len(p), len(q))
    return _trim(
        (p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)
    )


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def _pscale(p, c):
    return _trim(a * c for a in p)


def _pdivmod(p, q):
    """Division with remainder over the rationals."""
    p = [Fraction(a) for a in p]
    q = [Fraction(a) for a in q]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and any(p):
        shift = len(p) - len(q)
        c = p[-1] / q[-1]
        quo[shift] = c
        for k, b in enumerate(q):
            p[k + shift] -= c * b
        p = list(_trim(p))
    return _trim(quo), _trim(p)


def _pgcd(p, q):
    while q:
        _, r = _pdivmod(p, q)
        p, q = q, r
    return p


def _peval(p, x):
    acc = 0
    for a in reversed(p):
        acc = acc * x + a
    return acc


def _integerize(p, q):
    """Scale a pair of rational polynomials to coprime-content integer ones."""
    den = 1
    for a in p + q:
        den = den * Fraction(a).denominator // gcd(den, Fraction(a).denominator)
    p = [int(Fraction(a) * den) for a in p]
    q = [int(Fraction(a) * den) for a in q]
    content = 0
    for a in p + q:
        content = gcd(content, a)
    content = content or 1
    if q[-1] < 0:
        content = -content
    return tuple(a // content for a in p), tuple(a // content for a in q)


@lru_cache(maxsize=65536)
def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return (), (1,)
    g = _pgcd(num, den)
    if len(g) > 1:
        num, _ = _pdivmod(num, g)
        den, _ = _pdivmod(den, g)
    return _integerize(tuple(num), tuple(den))


# -- the coefficient type -------------------------------------------------------


class Qm:
    """Reduced ``i**i_power * num(m)/den(m)``; immutable and hashable."""

    __slots__ = ("num", "den", "i_power")

    def __init__(self, num=(), den=(1,), i_power: int = 0):
        num, den = _trim(num), _trim(den)
        i_power %= 4
        if i_power >= 2:
            num = _pscale(num, -1)
            i_power -= 2
        num, den = _reduce(num, den)
        if not num:
            i_power = 0
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "i_power", i_power)

    def __setattr__(self, name, value):
        raise AttributeError("Qm is immutable")

    @classmethod
    def of(cls, value: Union[int, Fraction, "Qm"]) -> "Qm":
        if isinstance(value, Qm):
            return value
        f = Fraction(value)
        return cls((f.numerator,), (f.denominator,))

    @classmethod
    def poly(cls, *coeffs) -> "Qm":
        """Polynomial in ``m`` with rational coefficients, lowest degree first."""
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        return cls(tuple(int(c * den) for c in fr), (den,))

    # predicates -------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_imaginary(self) -> bool:
        return self.i_power == 1

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def real_part_only(self) -> "Qm":
        if self.is_imaginary:
            raise ValueError(f"coefficient {self} is imaginary")
        return self

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self.i_power != other.i_power:
            raise ValueError(
                "cannot add real and imaginary coefficients into one Qm: "
                f"{self} + {other}"
            )
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return Qm(num, _pmul(self.den, other.den), self.i_power)

    __radd__ = __add__

    def __neg__(self):
        return Qm(_pscale(self.num, -1), self.den, self.i_power)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Qm(
            _pmul(self.num, other.num),
            _pmul(self.den, other.den),
            self.i_power + other.i_power,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero coefficient")
        # 1/i = -i
        return Qm(
            _pmul(self.num, other.den),
            _pmul(self.den, other.num),
            self.i_power - other.i_power,
        )

    def __rtruediv__(self, other):
        return _coerce(other) / self

    # comparison -------------------------------------------------------------
    def _key(self):
        return (self.num, self.den, self.i_power)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __bool__(self):
        return not self.is_zero

    # evaluation -------------------------------------------------------------
    def at(self, m_value):
        """Exact value at an integer (or rational) ``m``."""
        return qm_eval(self, m_value)

    def leading_sign(self) -> int:
        """Sign of the numerator's leading coefficient (denominators are positive)."""
        if self.is_zero:
            return 0
        return 1 if self.num[-1] > 0 else -1

    # rendering --------------------------------------------------------------
    def __repr__(self):
        return f"Qm({self.render()!r})"

    def __str__(self):
        return self.render()

    def render(self, style: str = "plain") -> str:
        if style == "latex":
            return _render_latex(self)
        num = _render_poly(self.num)
        body = num
        if self.den != (1,):
            den = _render_poly(self.den)
            if len([a for a in self.num if a]) > 1:
                num = f"({num})"
            if len([a for a in self.den if a]) > 1:
                den = f"({den})"
            body = f"{num}/{den}"
        if self.is_imaginary:
            return f"i·{body}" if not body.startswith("-") else f"-i·{body[1:]}"
        return body


def _coerce(value):
    if isinstance(value, Qm):
        return value
    if isinstance(value, (int, Fraction)):
        return Qm.of(value)
    return NotImplemented


def _render_poly(p, var: str = "m") -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        a = p[k]
        if a == 0:
            continue
        mag = abs(a)
        if k == 0:
            mono = str(mag)
        elif k == 1:
            mono = var if mag == 1 else f"{mag}*{var}"
        else:
            mono = f"{var}^{k}" if mag == 1 else f"{mag}*{var}^{k}"
        if not parts:
            parts.append(mono if a > 0 else f"-{mono}")
        else:
            parts.append(f"+ {mono}" if a > 0 else f"- {mono}")
    return " ".join(parts)


def _render_latex(q: Qm) -> str:
    if q.is_zero:
        return "0"
    num = _render_poly(q.num).replace("*", "")
    sign = ""
    if len([a for a in q.num if a]) == 1 and q.num[-1] < 0:
        sign, num = "-", num[1:]
    if q.den == (1,):
        body = num
    else:
        body = f"\\frac{{{num}}}{{{_render_poly(q.den).replace('*', '')}}}"
    if q.is_imaginary:
        body = f"i{body}"
    return sign + body


# -- functional API ---------------------------------------------------------------


def qm_add(a: Qm, b: Qm) -> Qm:
    """Exact sum; both operands must carry the same power of ``i``."""
    return a + b


def qm_mul(a: Qm, b: Qm) -> Qm:
    return a * b


def qm_eval(a: Qm, m_value) -> Union[Fraction, Gaussian]:
    """Substitute ``m = m_value`` exactly.

    Returns a :class:`~fractions.Fraction` for real coefficients and a
    :class:`Gaussian` for imaginary ones.  Raises :class:`PoleError` when the
    denominator vanishes.
    """
    x = Fraction(m_value)
    d = _peval(a.den, x)
    if d == 0:
        raise PoleError(f"{a} has a pole at m = {m_value}")
    value = Fraction(_peval(a.num, x)) / d
    if a.is_imaginary:
        return Gaussian(Fraction(0), value)
    return value


ZERO = Qm()
ONE = Qm((1,))
I = Qm((1,), (1,), 1)
M = Qm((0, 1))
