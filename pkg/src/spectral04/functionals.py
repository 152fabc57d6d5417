"""Assembly of the two spectral (0,4)-tensor functionals.

``P = Wres(c(u1)c(u2)c(u3)c(u4) D^{-2m+2})`` and
``Q = Wres(c(u1)c(u2) D c(u3)c(u4) D D^{-2m})``.

Every residue is ``Vol(S^{2m-1}) * tr[id] * integral_M density``.  Each item of
the order ``-2m`` symbol is integrated over the cosphere, traced and projected
onto the invariant basis separately.  It is then compared with a reference
value before the items are summed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .clifford import CliffordPolynomial, clifford_trace
from .coefficients import ZERO, Qm
from .sphere import integrate_symbol
from .symbols import (
    Order,
    SymbolExpr,
    ab_symbols,
    compose_minus_2m,
    inverse_power_symbols,
    multiplication_symbol,
)
from .tensor import BASIS, InvariantVector, TensorPolynomial, project_to_basis

__all__ = [
    "ITEM_TAGS",
    "SUB_ITEM_TAGS",
    "REFERENCE",
    "JSON_SCHEMA",
    "ItemAudit",
    "FunctionalResult",
    "DiscrepancyReport",
    "compute_P",
    "compute_Q",
    "compute",
    "discrepancy_report",
    "wres_assemble",
    "display_sign",
]

ITEM_TAGS = ("I-1", "I-2", "I-3", "II-1", "II-2", "II-3", "II-4", "II-5", "II-6")
SUB_ITEM_TAGS = ("II-3-A", "II-3-B", "II-3-C", "II-4-A", "II-4-B")

# composition summand (|alpha|, left order) -> item tag
_Q_ITEMS = {(0, 0): "II-1", (0, 1): "II-2", (0, 2): "II-3", (1, 2): "II-4", (1, 1): "II-5", (2, 2): "II-6"}
_P_SPLIT = {"ricci": "I-1", "connection": "I-2", "endomorphism": "I-3"}
_Q_SPLIT = {
    "II-3": {"ricci": "II-3-A", "connection": "II-3-B", "endomorphism": "II-3-C"},
    "II-4": {"ricci": "II-4-A", "connection": "II-4-B"},
}
VOL = "Vol*tr[id]"


def _vec(*entries) -> InvariantVector:
    """Vector from up to 11 entries; ``(c0, c1)`` tuples mean ``c0 + c1*m``."""
    coeffs = []
    for e in entries:
        coeffs.append(Qm.poly(*e) if isinstance(e, tuple) else Qm.of(e))
    coeffs += [ZERO] * (len(BASIS) - len(coeffs))
    return InvariantVector(tuple(coeffs), VOL)


def _pattern(c0, c1) -> InvariantVector:
    """``(c0 + c1*m) * (1, -1, 1)`` on the three scalar-curvature slots."""
    f = (Fraction(c0), Fraction(c1))
    return _vec(f, (-f[0], -f[1]), f)


_F = Fraction
_ZERO_VEC = InvariantVector.zero(VOL)

# Reference values of every item, as signed multiples of Vol*tr[id].
REFERENCE: dict = {
    "I-1": _pattern(_F(-1, 6), _F(1, 6)),
    "I-2": _ZERO_VEC,
    "I-3": _pattern(_F(1, 4), _F(-1, 4)),
    "P": _pattern(_F(1, 12), _F(-1, 12)),
    "II-1": _vec(*(_F(k, 8) for k in (2, 0, 0, 4, -1, 3, 1, 3, -2))),
    "II-2": _ZERO_VEC,
    # the summary display carries -(m+2)/12 on the third slot
    "II-3": _vec((_F(2, 12), _F(1, 12)), (_F(-2, 12), _F(-1, 12)), (_F(-2, 12), _F(-1, 12)),
                 0, 0, _F(1, 3), _F(1, 3), _F(-1, 3), _F(-1, 3)),
    "II-3-A": _vec((_F(1, 6), _F(-1, 6)), (_F(2, 6), _F(1, 6)), (_F(-2, 6), _F(-1, 6)),
                   0, 0, _F(1, 3), _F(1, 3), _F(-1, 3), _F(-1, 3)),
    "II-3-B": _ZERO_VEC,
    "II-3-C": _vec((0, _F(1, 4)), (_F(-2, 4), _F(-1, 4)), (_F(2, 4), _F(1, 4))),
    "II-4": _vec(_F(-2, 3), 0, 0, 0, 0, _F(-4, 3), _F(-4, 3), _F(4, 3), _F(4, 3)),
    "II-4-A": _vec(_F(-2, 3), 0, 0, 0, 0, _F(-4, 3), _F(-4, 3), _F(4, 3), _F(4, 3)),
    "II-4-B": _ZERO_VEC,
    "II-5": _ZERO_VEC,
    "II-6": _vec(_F(1, 3), 0, 0, 0, 0, _F(2, 3), _F(2, 3), _F(-2, 3), _F(-2, 3)),
    "Q": _vec((_F(2, 24), _F(2, 24)), (_F(-4, 24), _F(-2, 24)), (_F(4, 24), _F(2, 24)),
              *(_F(k, 24) for k in (12, -3, 1, -5, 17, 2))),
}

# order in which checkpoints are compared and reported
CHECKPOINT_ORDER = (
    "I-1", "I-2", "I-3", "P",
    "II-1", "II-2", "II-3-A", "II-3-B", "II-3-C", "II-3",
    "II-4-A", "II-4-B", "II-4", "II-5", "II-6", "Q",
)

JSON_SCHEMA = {
    "type": "object",
    "required": ["functional", "prefactor", "basis", "coefficients", "per_item", "checkpoints"],
    "properties": {
        "functional": {"enum": ["P", "Q"]},
        "prefactor": {"type": "string"},
        "basis": {"type": "array", "items": {"type": "string"}, "minItems": 11, "maxItems": 11},
        "coefficients": {"type": "array", "items": {"type": "string"}, "minItems": 11, "maxItems": 11},
        "per_item": {
            "type": "object",
            "additionalProperties": {
                "type": "array", "items": {"type": "string"}, "minItems": 11, "maxItems": 11,
            },
        },
        "checkpoints": {
            "type": "object",
            "additionalProperties": {"enum": ["match", "mismatch"]},
        },
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class ItemAudit:
    """One item through the pipeline: symbol at x0, cosphere integral, trace, projection."""

    tag: str
    symbol: SymbolExpr
    integrated: CliffordPolynomial
    traced: TensorPolynomial
    vector: InvariantVector

    def render(self, style: str = "plain") -> str:
        lines = [
            f"[{self.tag}]",
            f"  symbol at x0 ({len(self.symbol)} terms): {self.symbol.render(style)}",
            f"  after cosphere integration ({len(self.integrated)} terms, times Vol): "
            f"{self.integrated.render(style)}",
            f"  after trace ({len(self.traced.terms)} terms, times tr[id]): {self.traced.render(style)}",
            f"  projection: {self.vector.render(style)}",
        ]
        return "\n".join(lines)


def _run_item(tag: str, expr: SymbolExpr) -> ItemAudit:
    integrated = integrate_symbol(expr.terms)
    traced = clifford_trace(integrated)
    vector = project_to_basis(traced, VOL)
    return ItemAudit(tag, expr, integrated, traced, vector)


def display_sign(v: InvariantVector) -> int:
    """Sign that makes the first nonzero coefficient's leading term positive."""
    for c in v.coefficients:
        if not c.is_zero:
            return c.leading_sign()
    return 1


@dataclass
class FunctionalResult:
    """Outcome of one functional.

    ``density`` is the signed coefficient of ``Vol*tr[id]`` and equals the sum
    of ``per_item``.  ``prefactor`` and ``display_density`` give the
    conventional presentation: the sign is pulled out so that the first
    nonzero coefficient has a positive leading term.
    """

    name: str
    density: InvariantVector
    per_item: dict
    sub_items: dict
    audit: dict
    checkpoints: dict = field(default_factory=dict)

    @property
    def sign(self) -> int:
        return display_sign(self.density)

    @property
    def prefactor(self) -> str:
        return VOL if self.sign > 0 else "-" + VOL

    @property
    def display_density(self) -> InvariantVector:
        return self.density.scale(self.sign).with_prefactor(self.prefactor)

    def item(self, tag: str) -> InvariantVector:
        if tag in self.per_item:
            return self.per_item[tag]
        if tag in self.sub_items:
            return self.sub_items[tag]
        if tag == self.name:
            return self.density
        raise KeyError(tag)

    @property
    def mismatches(self) -> list:
        return [t for t in CHECKPOINT_ORDER if self.checkpoints.get(t) == "mismatch"]


def _check(result: FunctionalResult) -> FunctionalResult:
    for tag in CHECKPOINT_ORDER:
        try:
            mine = result.item(tag)
        except KeyError:
            continue
        ok = mine.same_coefficients(REFERENCE[tag])
        result.checkpoints[tag] = "match" if ok else "mismatch"
    return result


def _sum(vectors) -> InvariantVector:
    total = InvariantVector.zero(VOL)
    for v in vectors:
        total = total + v
    return total


@lru_cache(maxsize=None)
def compute_P() -> FunctionalResult:
    """``Wres(c(u1)c(u2)c(u3)c(u4) D^{-2m+2})``."""
    left = multiplication_symbol((1, 2, 3, 4))
    right = inverse_power_symbols(Order(1, -1))
    comp = compose_minus_2m(left, right)
    ((key, expr),) = comp.items.items()
    parts = expr.by_tag()
    audit = {}
    for tag, item in _P_SPLIT.items():
        audit[item] = _run_item(item, parts.get(tag, SymbolExpr()))
    per_item = {t: audit[t].vector for t in ("I-1", "I-2", "I-3")}
    density = _sum(per_item.values())
    return _check(FunctionalResult("P", density, per_item, {}, audit))


@lru_cache(maxsize=None)
def compute_Q() -> FunctionalResult:
    """``Wres(c(u1)c(u2) D c(u3)c(u4) D D^{-2m})``."""
    left = ab_symbols((1, 2), (3, 4))
    right = inverse_power_symbols(Order(1, 0))
    comp = compose_minus_2m(left, right)
    audit = {}
    sub_items = {}
    for (r, kl, _), expr in comp.items.items():
        tag = _Q_ITEMS[(r, kl.const)]
        audit[tag] = _run_item(tag, expr)
        if tag in _Q_SPLIT:
            parts = expr.by_tag()
            for origin, sub in _Q_SPLIT[tag].items():
                audit[sub] = _run_item(sub, parts.get(origin, SymbolExpr()))
                sub_items[sub] = audit[sub].vector
    missing = [t for t in ITEM_TAGS if t.startswith("II-") and t not in audit]
    if missing:
        raise RuntimeError(f"composition produced no summand for {missing}")
    per_item = {t: audit[t].vector for t in ITEM_TAGS if t.startswith("II-")}
    density = _sum(per_item.values())
    return _check(FunctionalResult("Q", density, per_item, sub_items, audit))


def compute(name: str) -> FunctionalResult:
    if name == "P":
        return compute_P()
    if name == "Q":
        return compute_Q()
    raise ValueError(f"unknown functional {name!r}")


# -- reporting -------------------------------------------------------------------


@dataclass(frozen=True)
class DiscrepancyReport:
    """Checkpoints where the derivation and the reference values disagree."""

    functional: str
    first_mismatch: str
    rows: tuple  # (tag, derived, reference, derived - reference)
    audit: ItemAudit

    def render(self) -> str:
        out = [
            f"functional {self.functional}: {len(self.rows)} checkpoint(s) differ from the reference",
            f"first mismatching checkpoint: {self.first_mismatch}",
        ]
        for tag, mine, ref, diff in self.rows:
            out.append(f"  {tag}:")
            out.append(f"    derived   = {mine.render()}")
            out.append(f"    reference = {ref.render()}")
            out.append(f"    difference= {diff.render()}")
        out.append("audit trail of the first mismatch:")
        out.append(self.audit.render())
        return "\n".join(out)


def discrepancy_report(r: FunctionalResult) -> Optional[DiscrepancyReport]:
    """``None`` when every checkpoint matches."""
    tags = r.mismatches
    if not tags:
        return None
    rows = tuple((t, r.item(t), REFERENCE[t], r.item(t) - REFERENCE[t]) for t in tags)
    first_item = next(t for t in tags if t in r.audit)
    return DiscrepancyReport(r.name, tags[0], rows, r.audit[first_item])


_PREFACTOR_TEXT = {
    "plain": {1: "2^m*(2*pi^m/Gamma(m))", -1: "-2^m*(2*pi^m/Gamma(m))"},
    "latex": {1: r"2^{m}\frac{2\pi^{m}}{\Gamma(m)}", -1: r"-2^{m}\frac{2\pi^{m}}{\Gamma(m)}"},
}
_OPERATOR_TEXT = {
    "P": ("Wres(c(u1)c(u2)c(u3)c(u4)D^(-2m+2))", r"\mathrm{Wres}\big(c(u_1)c(u_2)c(u_3)c(u_4)D^{-2m+2}\big)"),
    "Q": ("Wres(c(u1)c(u2)Dc(u3)c(u4)DD^(-2m))", r"\mathrm{Wres}\big(c(u_1)c(u_2)Dc(u_3)c(u_4)DD^{-2m}\big)"),
}


def wres_assemble(r: FunctionalResult, style: str = "plain"):
    """Render ``+-2^m Vol * integral_M {density} dVol`` as text, LaTeX or a JSON dict."""
    if style == "json":
        return {
            "functional": r.name,
            "prefactor": _PREFACTOR_TEXT["plain"][r.sign],
            "basis": list(BASIS),
            "coefficients": [c.render() for c in r.display_density.coefficients],
            "per_item": {t: [c.render() for c in v.coefficients] for t, v in {**r.per_item, **r.sub_items}.items()},
            "checkpoints": dict(r.checkpoints),
        }
    if style not in ("plain", "latex"):
        raise ValueError(f"unknown style {style!r}")
    body = r.display_density.render(style)
    op = _OPERATOR_TEXT[r.name][0 if style == "plain" else 1]
    if r.density.is_zero:
        return f"{op} = 0"
    pre = _PREFACTOR_TEXT[style][r.sign]
    if style == "plain":
        return f"{op} = {pre} * integral_M {{ {body} }} dVol_M"
    return f"{op} = {pre}\\int_M\\Big\\{{{body}\\Big\\}}\\,d\\mathrm{{Vol}}_M"


def dumps(r: FunctionalResult) -> str:
    return json.dumps(wres_assemble(r, "json"), sort_keys=True, indent=2)
