"""Pseudo-differential symbols in normal coordinates at a base point ``x0``.

A symbol term is ``coeff * prod(factors) * word * |xi|^p`` where ``p = a*m + b``
is affine in the half-dimension.  Position dependence is carried by Taylor
factors ``X(j)`` (the coordinate ``x^j``), by the connection coefficient
``W(p,s,t) = w_st(e_p)`` and by the components ``U(slot,i)`` of the vector
fields.  Evaluation at ``x0`` drops everything that still depends on ``x``.

Connection coefficients follow ``w_st(e_i) = -<nabla_{e_i} e_s, e_t>``, so in
normal coordinates ``w(x0) = 0`` and ``d_l w_st(e_a)(x0) = -R(l,a,t,s)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .clifford import BasisVec, CliffordWord, SlotVec, XiVec, expand_macros, render_word
from .coefficients import I, ONE, ZERO, Qm
from .tensor import (
    Fixed,
    factor_indices,
    fresh,
    normalize_term,
    render_factor,
    with_indices,
)

__all__ = [
    "Order",
    "SymbolTerm",
    "SymbolExpr",
    "ConnectionTaylor",
    "UnsupportedOrderError",
    "OrderBookkeepingError",
    "laplacian_inverse_symbol",
    "inverse_power_symbols",
    "multiplication_symbol",
    "operator_symbols",
    "ab_symbols",
    "compose",
    "compose_minus_2m",
    "Composition",
    "dx",
    "dxi",
]


class UnsupportedOrderError(ValueError):
    """Symbol data beyond what the Taylor expansions provide was requested."""


class OrderBookkeepingError(ValueError):
    """A composition needed a symbol order that the operand does not supply."""


class Order(NamedTuple):
    """The affine quantity ``m_coeff * m + const``."""

    m_coeff: int
    const: int

    @classmethod
    def of(cls, value: Union[int, "Order"]) -> "Order":
        if isinstance(value, Order):
            return value
        return cls(0, int(value))

    def __add__(self, other):
        other = Order.of(other)
        return Order(self.m_coeff + other.m_coeff, self.const + other.const)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return Order(-self.m_coeff, -self.const)

    def __sub__(self, other):
        return self + (-Order.of(other))

    def __rsub__(self, other):
        return Order.of(other) - self

    def __mul__(self, k: int):
        return Order(self.m_coeff * k, self.const * k)

    __rmul__ = __mul__

    def qm(self) -> Qm:
        return Qm.poly(self.const, self.m_coeff)

    def render(self) -> str:
        return self.qm().render()

    def __str__(self):
        return self.render()


MINUS_2M = Order(-2, 0)


@dataclass(frozen=True)
class SymbolTerm:
    """One term ``coeff * prod(factors) * c(e_word...) * |xi|^xi_power``."""

    coeff: Qm
    factors: tuple
    word: tuple = ()
    xi_power: Order = Order(0, 0)
    tag: str = ""

    @property
    def xi_degree(self) -> int:
        return sum(1 for f in self.factors if f[0] == "Xi")

    @property
    def x_degree(self) -> int:
        return sum(1 for f in self.factors if f[0] == "X")

    @property
    def order(self) -> Order:
        return self.xi_power + self.xi_degree

    def at_base_point(self) -> bool:
        return not any(f[0] in ("X", "W") for f in self.factors)

    def render(self, style: str = "plain") -> str:
        text = render_word(self.coeff, self.factors, self.word, style)
        if self.xi_power != Order(0, 0):
            text += f"*|xi|^({self.xi_power})" if style == "plain" else f"\\|\\xi\\|^{{{self.xi_power}}}"
        return text


@dataclass(frozen=True)
class SymbolExpr:
    """A sum of symbol terms.

    ``taylor`` is the number of x-derivatives at ``x0`` the data supports
    (``None`` for an exact expression such as a differential operator's symbol).
    """

    terms: tuple = ()
    taylor: Optional[int] = None

    def __add__(self, other: "SymbolExpr") -> "SymbolExpr":
        return SymbolExpr(self.terms + other.terms, _min_taylor(self.taylor, other.taylor))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, c) -> "SymbolExpr":
        c = Qm.of(c)
        return SymbolExpr(tuple(replace(t, coeff=t.coeff * c) for t in self.terms), self.taylor)

    def orders(self) -> set:
        return {t.order for t in self.terms}

    def normalized(self) -> "SymbolExpr":
        """Canonicalize every term and merge like terms."""
        acc: dict = {}
        for t in self.terms:
            for c, fs, w in normalize_term(t.coeff, t.factors, t.word):
                key = (fs, w, t.xi_power, t.tag, c.i_power)
                total = acc.get(key, ZERO) + c
                acc[key] = total
        terms = tuple(
            SymbolTerm(c, fs, w, p, tag)
            for (fs, w, p, tag, _), c in acc.items()
            if not c.is_zero
        )
        return SymbolExpr(terms, self.taylor)

    def at_x0(self) -> "SymbolExpr":
        """Evaluate at the base point: ``x = 0``, ``w = 0`` and ``dw = -R/2``."""
        out = []
        for t in self.terms:
            if not t.at_base_point():
                continue
            coeff = t.coeff
            factors = []
            for f in t.factors:
                if f[0] == "dW":
                    _, l, a, s, tt = f
                    coeff = coeff * Fraction(-1, 2)
                    factors.append(("R", l, a, tt, s))
                else:
                    factors.append(f)
            out.append(replace(t, coeff=coeff, factors=tuple(factors)))
        return SymbolExpr(tuple(out), None).normalized()

    def by_tag(self) -> dict:
        out: dict = {}
        for t in self.terms:
            out.setdefault(t.tag, []).append(t)
        return {k: SymbolExpr(tuple(v), self.taylor) for k, v in out.items()}

    def render(self, style: str = "plain") -> str:
        if not self.terms:
            return "0"
        return " + ".join(t.render(style) for t in self.terms)


def _min_taylor(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _term(coeff, factors, word=(), xi_power=Order(0, 0), tag="") -> SymbolTerm:
    return SymbolTerm(Qm.of(coeff), tuple(factors), tuple(word), Order.of(xi_power), tag)


def _fresh_copy(t: SymbolTerm) -> SymbolTerm:
    """Rename every abstract label of a term to a new one."""
    mapping: dict = {}

    def sub(x):
        if isinstance(x, Fixed):
            return x
        if x not in mapping:
            mapping[x] = fresh()
        return mapping[x]

    factors = tuple(with_indices(f, [sub(x) for x in factor_indices(f)]) for f in t.factors)
    word = tuple(sub(x) for x in t.word)
    return replace(t, factors=factors, word=word)


# -- derivatives ---------------------------------------------------------------------


def _dx_terms(terms: Iterable[SymbolTerm], j) -> list:
    out = []
    for t in terms:
        for pos, f in enumerate(t.factors):
            tag = f[0]
            if tag == "X":
                new = ("D", j, f[1])
            elif tag == "W":
                new = ("dW", j) + f[1:]
            elif tag == "U":
                new = ("DU", f[1], j, f[2])
            elif tag in ("DU", "dW"):
                raise UnsupportedOrderError(f"second x-derivative of {render_factor(f)} is not modeled")
            else:
                continue
            out.append(replace(t, factors=t.factors[:pos] + (new,) + t.factors[pos + 1 :]))
    return out


def _dxi_terms(terms: Iterable[SymbolTerm], j) -> list:
    out = []
    for t in terms:
        for pos, f in enumerate(t.factors):
            if f[0] == "Xi":
                new = ("D", j, f[1])
                out.append(replace(t, factors=t.factors[:pos] + (new,) + t.factors[pos + 1 :]))
        if t.xi_power != Order(0, 0):
            # d|xi|^p / dxi_j = p |xi|^(p-2) xi_j
            out.append(
                replace(
                    t,
                    coeff=t.coeff * t.xi_power.qm(),
                    factors=t.factors + (("Xi", j),),
                    xi_power=t.xi_power - 2,
                )
            )
    return out


def _step_taylor(expr: SymbolExpr) -> Optional[int]:
    if expr.taylor is None:
        return None
    if expr.taylor < 1:
        raise UnsupportedOrderError("x-derivative beyond the available Taylor data")
    return expr.taylor - 1


def dx(expr: SymbolExpr, j) -> SymbolExpr:
    """Formal ``d/dx_j``: consumes Taylor factors and differentiates ``w`` and ``u``."""
    return SymbolExpr(tuple(_dx_terms(expr.terms, j)), _step_taylor(expr)).normalized()


def dxi(expr: SymbolExpr, j) -> SymbolExpr:
    """Formal ``d/dxi_j`` on xi components and on powers of ``|xi|``."""
    return SymbolExpr(tuple(_dxi_terms(expr.terms, j)), expr.taylor).normalized()


# -- constructors ----------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionTaylor:
    """Taylor data of the spin connection in normal coordinates.

    ``T_a`` vanishes, ``T_ab = t_ab * R_{bats} c(e_s) c(e_t)`` and ``E = e * s``.
    """

    t_ab: Fraction = Fraction(-1, 8)
    e: Fraction = Fraction(1, 4)

    def T_a(self, a) -> list:
        return []

    def T_ab(self, a, b) -> list:
        s, t = fresh(), fresh()
        return [(Qm.of(self.t_ab), [("R", b, a, t, s)], (s, t))]

    def E(self) -> list:
        return [(Qm.of(self.e), [("s",)], ())]


DIRAC = ConnectionTaylor()


def _products(*lists):
    """Clifford products of lists of ``(coeff, factors, word)``."""
    out = [(ONE, [], ())]
    for lst in lists:
        out = [(c1 * c2, f1 + list(f2), w1 + tuple(w2)) for c1, f1, w1 in out for c2, f2, w2 in lst]
    return out


def laplacian_inverse_symbol(
    k: Union[int, Order], order_offset: int, conn: ConnectionTaylor = DIRAC
) -> SymbolExpr:
    """The order ``-2k - order_offset`` symbol of the inverse power ``k`` of ``D^2``.

    ``k`` may be symbolic (an :class:`Order` such as ``Order(1, 0)`` for ``m``).
    Terms are tagged ``metric``, ``ricci``, ``connection`` or ``endomorphism``
    according to their origin.
    """
    k = Order.of(k)
    kq = k.qm()
    base = -2 * k  # |xi|^{-2k}
    terms = []
    if order_offset == 0:
        a, b, j, l = fresh(), fresh(), fresh(), fresh()
        terms.append(_term(ONE, [("D", a, b), ("Xi", a), ("Xi", b)], (), base - 2, "metric"))
        terms.append(
            _term(
                -kq / 3,
                [("R", a, j, b, l), ("X", j), ("X", l), ("Xi", a), ("Xi", b)],
                (),
                base - 2,
                "metric",
            )
        )
        taylor = 2
    elif order_offset == 1:
        a, l = fresh(), fresh()
        terms.append(
            _term(I * kq * Fraction(-2, 3), [("Ric", a, l), ("X", l), ("Xi", a)], (), base - 2, "ricci")
        )
        a, b = fresh(), fresh()
        for c, fs, w in conn.T_a(a):
            terms.append(_term(I * kq * -2 * c, fs + [("Xi", a)], w, base - 2, "connection"))
        for c, fs, w in conn.T_ab(a, b):
            terms.append(
                _term(I * kq * -2 * c, fs + [("X", b), ("Xi", a)], w, base - 2, "connection")
            )
        taylor = 1
    elif order_offset == 2:
        a, b = fresh(), fresh()
        k1 = kq * (kq + 1)
        terms.append(_term(k1 / 3, [("Ric", a, b), ("Xi", a), ("Xi", b)], (), base - 4, "ricci"))
        for c, fs, w in _products(conn.T_a(a), conn.T_a(b)):
            terms.append(_term(k1 * -2 * c, fs + [("Xi", a), ("Xi", b)], w, base - 4, "connection"))
        a2 = fresh()
        squares = _products(conn.T_a(a2), conn.T_a(a2)) + [
            (-c, fs, w) for c, fs, w in conn.T_ab(a2, a2)
        ]
        for c, fs, w in squares:
            terms.append(_term(kq * c, fs, w, base - 2, "connection"))
        for c, fs, w in conn.T_ab(a, b):
            terms.append(_term(k1 * 2 * c, fs + [("Xi", a), ("Xi", b)], w, base - 4, "connection"))
        for c, fs, w in conn.E():
            terms.append(_term(-kq * c, fs, w, base - 2, "endomorphism"))
        taylor = 0
    else:
        raise UnsupportedOrderError(f"order offset {order_offset} is not modeled (only 0, 1, 2)")
    return SymbolExpr(tuple(terms), taylor).normalized()


def inverse_power_symbols(k: Union[int, Order], conn: ConnectionTaylor = DIRAC) -> dict:
    """``{order: symbol}`` for the three modeled orders of the inverse power ``k``."""
    k = Order.of(k)
    return {-2 * k - r: laplacian_inverse_symbol(k, r, conn) for r in (0, 1, 2)}


def operator_symbols(left_slots: Sequence[int]) -> dict:
    """Symbols of ``c(u_i) c(u_j) D``: orders 1 and 0."""
    gens = [SlotVec(s) for s in left_slots]
    s1 = []
    for c, fs, w in expand_macros(CliffordWord(tuple(gens) + (XiVec(),), I)).words():
        s1.append(SymbolTerm(c, fs, w))
    p, s, t = fresh(), fresh(), fresh()
    s0 = []
    word = CliffordWord(
        tuple(gens) + (BasisVec(p), BasisVec(s), BasisVec(t)),
        Qm.of(Fraction(-1, 4)),
        (("W", p, s, t),),
    )
    for c, fs, w in expand_macros(word).words():
        s0.append(SymbolTerm(c, fs, w))
    return {Order(0, 1): SymbolExpr(tuple(s1)), Order(0, 0): SymbolExpr(tuple(s0))}


def multiplication_symbol(slots: Sequence[int]) -> dict:
    """Symbol of the order-zero multiplication operator ``c(u_i) c(u_j) ...``."""
    poly = expand_macros(CliffordWord(tuple(SlotVec(s) for s in slots)))
    return {Order(0, 0): SymbolExpr(tuple(SymbolTerm(c, fs, w) for c, fs, w in poly.words()))}


# -- composition ---------------------------------------------------------------------------


@dataclass
class Composition:
    """Summands of a composed symbol at one order, keyed ``(|alpha|, left order, right order)``."""

    target: Order
    items: dict = field(default_factory=dict)

    def total(self) -> SymbolExpr:
        out = SymbolExpr()
        for expr in self.items.values():
            out = out + expr
        return out.normalized()


def _alpha_factor(r: int) -> Qm:
    c = ONE
    for k in range(1, r + 1):
        c = c * (-I) / k
    return c


def _above_leading(order: Order, symbols: dict) -> bool:
    """True when ``order`` exceeds the leading order of ``symbols`` (so the piece is zero)."""
    keys = [Order.of(k) for k in symbols]
    if any(k.m_coeff != order.m_coeff for k in keys):
        return False
    return order.const > max(k.const for k in keys)


def compose(
    left: dict,
    right: dict,
    target: Union[int, Order],
    max_alpha: int = 2,
    right_complete: bool = False,
) -> Composition:
    """Order-``target`` part of ``sum_alpha (-i)^|alpha|/alpha! d_xi^alpha left * d_x^alpha right``.

    ``left`` and ``right`` map orders to symbols.  Summands whose xi-derivative
    of the left factor vanishes identically are skipped; any other summand that
    needs a right order below the supplied range raises
    :class:`OrderBookkeepingError` (orders above the leading one are zero).
    With ``right_complete`` the right symbol is a full polynomial symbol and
    every missing order is zero.
    """
    target = Order.of(target)
    out = Composition(target)
    for r in range(max_alpha + 1):
        for kl, lexpr in sorted(left.items(), key=lambda kv: kv[0]):
            js = [fresh() for _ in range(r)]
            lterms = [_fresh_copy(t) for t in lexpr.terms]
            for j in js:
                lterms = _dxi_terms(lterms, j)
            if not lterms:
                continue
            kr = target - Order.of(kl) + r
            if kr not in right and (right_complete or _above_leading(kr, right)):
                continue
            if kr not in right:
                raise OrderBookkeepingError(
                    f"summand |alpha|={r} with left order {Order.of(kl)} needs right order {kr}"
                )
            rexpr = right[kr]
            rterms = [_fresh_copy(t) for t in rexpr.terms]
            taylor = rexpr.taylor
            for j in js:
                taylor = _step_taylor(SymbolExpr((), taylor))
                rterms = _dx_terms(rterms, j)
            scale = _alpha_factor(r)
            prod = [
                SymbolTerm(
                    tl.coeff * tr.coeff * scale,
                    tl.factors + tr.factors,
                    tl.word + tr.word,
                    tl.xi_power + tr.xi_power,
                    tr.tag or tl.tag,
                )
                for tl in lterms
                for tr in rterms
            ]
            expr = SymbolExpr(tuple(prod), _min_taylor(lexpr.taylor, taylor)).normalized()
            for t in expr.terms:
                if t.order != target:
                    raise OrderBookkeepingError(f"term of order {t.order} in the order {target} part")
            out.items[(r, Order.of(kl), kr)] = expr
    return out


def ab_symbols(u_pair_left=(1, 2), u_pair_right=(3, 4)) -> dict:
    """Symbols of orders 2, 1, 0 of ``(c(u)c(u)D)(c(u)c(u)D)`` via the composition formula."""
    a = operator_symbols(u_pair_left)
    b = operator_symbols(u_pair_right)
    return {Order(0, k): compose(a, b, Order(0, k), max_alpha=2, right_complete=True).total() for k in (2, 1, 0)}


def compose_minus_2m(left: dict, right: dict) -> Composition:
    """Order ``-2m`` part of ``left * right`` with every summand evaluated at ``x0``."""
    comp = compose(left, right, MINUS_2M, max_alpha=2)
    comp.items = {key: expr.at_x0() for key, expr in comp.items.items()}
    return comp
