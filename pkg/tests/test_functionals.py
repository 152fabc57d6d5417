"""Derived item values.

The frozen vectors below were produced by the symbolic pipeline and confirmed
independently by the matrix oracle (``spectral04.oracle``) at m = 1, 2, 3; the
per-item oracle comparison is repeated here.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction as F

import jsonschema
import numpy as np
import pytest

from spectral04 import oracle
from spectral04.coefficients import Qm
from spectral04.functionals import (
    JSON_SCHEMA,
    REFERENCE,
    VOL,
    compute,
    discrepancy_report,
    display_sign,
    wres_assemble,
)
from spectral04.tensor import InvariantVector


def vec(*entries):
    """Entries are numbers or ``(c0, c1)`` meaning ``c0 + c1*m``."""
    coeffs = [Qm.poly(*e) if isinstance(e, tuple) else Qm.of(e) for e in entries]
    return InvariantVector(tuple(coeffs) + (Qm.of(0),) * (11 - len(coeffs)), VOL)


def pattern(c0, c1):
    return vec((c0, c1), (-c0, -c1), (c0, c1))


RIC = (0, 0)  # placeholder for the two g(u1,u2)Ric / g(u3,u4)Ric slots

DERIVED = {
    "I-1": pattern(F(-1, 6), F(1, 6)),
    "I-2": vec(),
    "I-3": pattern(F(1, 4), F(-1, 4)),
    "II-1": vec(F(1, 4), F(-1, 4), F(1, 4), *RIC, F(1, 2), F(1, 2), F(-1, 2), F(-1, 2)),
    "II-2": vec(),
    "II-3": vec((F(1, 6), F(-1, 12)), (F(-1, 3), F(1, 12)), (F(1, 3), F(-1, 12)),
                *RIC, F(1, 3), F(1, 3), F(-1, 3), F(-1, 3)),
    "II-3-A": vec((F(1, 6), F(1, 6)), (F(1, 6), F(-1, 6)), (F(-1, 6), F(1, 6)),
                  *RIC, F(1, 3), F(1, 3), F(-1, 3), F(-1, 3)),
    "II-3-B": vec(),
    "II-3-C": vec((0, F(-1, 4)), (F(-1, 2), F(1, 4)), (F(1, 2), F(-1, 4))),
    "II-4": vec(F(-2, 3), F(2, 3), F(-2, 3), *RIC, F(-4, 3), F(-4, 3), F(4, 3), F(4, 3)),
    "II-4-A": vec(F(-2, 3), F(2, 3), F(-2, 3), *RIC, F(-4, 3), F(-4, 3), F(4, 3), F(4, 3)),
    "II-4-B": vec(),
    "II-5": vec(),
    "II-6": vec(F(1, 3), F(-1, 3), F(1, 3), *RIC, F(2, 3), F(2, 3), F(-2, 3), F(-2, 3)),
    "P": pattern(F(1, 12), F(-1, 12)),
    "Q": vec((F(1, 12), F(-1, 12)), (F(-1, 4), F(1, 12)), (F(1, 4), F(-1, 12)),
             *RIC, F(1, 6), F(1, 6), F(-1, 6), F(-1, 6)),
}


def _owner(tag):
    return "P" if tag.startswith("I-") or tag == "P" else "Q"


@pytest.mark.parametrize("tag", sorted(DERIVED))
def test_derived_values(tag):
    assert compute(_owner(tag)).item(tag).same_coefficients(DERIVED[tag])


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("name", ["P", "Q"])
def test_items_agree_with_matrix_oracle(rng, m, name):
    r = compute(name)
    for _ in range(3):
        curv = oracle.NumericCurvature.random(2 * m, rng)
        u = oracle.random_vectors(2 * m, rng)
        env = oracle.make_env(curv, u, m)
        for tag, value in oracle.numeric_items(name, curv, u, m).items():
            sym = r.item(tag).evaluate(env)
            assert abs(value.imag) < 1e-9
            assert abs(value.real - sym) <= 1e-9 * max(1.0, abs(sym)), tag


@pytest.mark.parametrize("name", ["P", "Q"])
def test_density_is_sum_of_items(name):
    r = compute(name)
    total = InvariantVector.zero(VOL)
    for v in r.per_item.values():
        total = total + v
    assert total.same_coefficients(r.density)


@pytest.mark.parametrize("name", ["P", "Q"])
def test_sum_independent_of_order(name):
    r = compute(name)
    items = list(r.per_item.values())
    for seed in range(5):
        random.Random(seed).shuffle(items)
        total = InvariantVector.zero(VOL)
        for v in items:
            total = total + v
        assert total.same_coefficients(r.density)


def test_sub_items_add_up():
    q = compute("Q")
    assert (q.item("II-3-A") + q.item("II-3-B") + q.item("II-3-C")).same_coefficients(q.item("II-3"))
    assert (q.item("II-4-A") + q.item("II-4-B")).same_coefficients(q.item("II-4"))


@pytest.mark.parametrize("name", ["P", "Q"])
def test_riemann_slots_vanish_everywhere(name):
    r = compute(name)
    for v in [r.density, *r.per_item.values(), *r.sub_items.values()]:
        assert v.coefficients[9].is_zero and v.coefficients[10].is_zero


@pytest.mark.parametrize("name", ["P", "Q"])
def test_traces_are_real(name):
    for audit in compute(name).audit.values():
        for mono in audit.traced.monomials():
            assert not mono.coeff.is_imaginary, audit.tag


@pytest.mark.parametrize("name", ["P", "Q"])
def test_flat_space_vanishing(rng, name):
    curv = oracle.NumericCurvature.flat(4)
    env = oracle.make_env(curv, oracle.random_vectors(4, rng), 2)
    assert compute(name).density.evaluate(env) == 0.0


def test_cyclicity_consistency(rng):
    # with u1 = u2 = v: c(v)c(v) = -|v|^2, and moving D around the trace turns
    # Q into -|v|^2 times the two-vector analogue of P, i.e. -(m-1)/12 s g(u3,u4)
    for m in (1, 2, 3):
        n = 2 * m
        curv = oracle.NumericCurvature.random(n, rng)
        u = oracle.random_vectors(n, rng)
        u[1] = u[0]
        env = oracle.make_env(curv, u, m)
        expected = -(u[0] @ u[0]) * (m - 1) / 12 * curv.s * (u[2] @ u[3])
        assert abs(compute("Q").density.evaluate(env) - expected) <= 1e-9 * max(1, abs(expected))


def test_display_sign_and_prefactor():
    p = compute("P")
    assert p.sign == -1 and p.prefactor == "-" + VOL
    assert p.display_density.coefficients[0] == Qm.poly(F(-1, 12), F(1, 12))
    assert display_sign(InvariantVector.zero()) == 1


def test_plain_rendering_of_P():
    text = wres_assemble(compute("P"), "plain")
    assert text.startswith("Wres(c(u1)c(u2)c(u3)c(u4)D^(-2m+2)) = -2^m*(2*pi^m/Gamma(m))")
    assert "((m - 1)/12)*s*g(u1,u2)*g(u3,u4)" in text


def test_latex_rendering():
    text = wres_assemble(compute("P"), "latex")
    assert r"\frac{m - 1}{12}" in text and r"\Gamma(m)" in text


@pytest.mark.parametrize("name", ["P", "Q"])
def test_json_validates(name):
    doc = json.loads(json.dumps(wres_assemble(compute(name), "json")))
    jsonschema.validate(doc, JSON_SCHEMA)
    assert doc["functional"] == name


def test_reference_matches_for_P():
    p = compute("P")
    assert discrepancy_report(p) is None
    assert all(v == "match" for v in p.checkpoints.values())


def test_discrepancy_report_for_Q():
    rep = discrepancy_report(compute("Q"))
    assert rep is not None
    assert rep.first_mismatch == "II-1"
    text = rep.render()
    assert "audit trail" in text and "after cosphere integration" in text and "after trace" in text


def test_reference_table_is_self_consistent():
    # printed Q equals the sum of the printed items once the II-3 third-slot sign is flipped
    fixed_ii3 = REFERENCE["II-3-A"] + REFERENCE["II-3-B"] + REFERENCE["II-3-C"]
    total = REFERENCE["II-1"] + REFERENCE["II-2"] + fixed_ii3 + REFERENCE["II-4"] + REFERENCE["II-5"] + REFERENCE["II-6"]
    assert total.same_coefficients(REFERENCE["Q"])


def test_unknown_functional():
    with pytest.raises(ValueError):
        compute("R")
