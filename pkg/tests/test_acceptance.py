"""Acceptance criteria, one recorded PASS/FAIL line each (see the terminal summary)."""

from __future__ import annotations

import time

import numpy as np
import pytest

from spectral04 import oracle
from spectral04.cli import RunConfig, suite_clifford, suite_sphere, suite_tensor
from spectral04.clifford import CliffordWord, SlotVec, clifford_trace
from spectral04.coefficients import Qm
from spectral04.functionals import REFERENCE, VOL, compute, compute_P, compute_Q, discrepancy_report
from spectral04.sphere import _recursive
from spectral04.symbols import MINUS_2M, Order, ab_symbols, compose, inverse_power_symbols
from spectral04.tensor import InvariantVector

from fractions import Fraction as F


def _vec(*entries):
    coeffs = [Qm.poly(*e) if isinstance(e, tuple) else Qm.of(e) for e in entries]
    return InvariantVector(tuple(coeffs) + (Qm.of(0),) * (11 - len(coeffs)), VOL)


# Theorem vectors over the basis, with their display prefactor signs
THEOREM_P = (_vec((F(1, 12), F(-1, 12)), (F(-1, 12), F(1, 12)), (F(1, 12), F(-1, 12))), -1)
THEOREM_Q = (
    _vec(*((F(a, 24), F(b, 24)) for a, b in ((2, 2), (-4, -2), (4, 2))),
         *(F(k, 24) for k in (12, -3, 1, -5, 17, 2)), 0, 0),
    1,
)


def _failing(cases):
    return [c for c in cases if not c.ok]


def test_criterion_1_theorem(acceptance):
    compute_P.cache_clear()
    compute_Q.cache_clear()
    t0 = time.perf_counter()
    p, q = compute("P"), compute("Q")
    elapsed = time.perf_counter() - t0
    p_ok = p.density.same_coefficients(THEOREM_P[0]) and p.sign == THEOREM_P[1]
    q_strict = q.density.same_coefficients(THEOREM_Q[0]) and q.sign == THEOREM_Q[1]
    detail = [f"P {'exact' if p_ok else 'differs'}"]
    q_ok = q_strict
    if q_strict:
        detail.append("Q exact")
    else:
        # accepted only with a discrepancy report that pinpoints the first
        # mismatching checkpoint and carries its audit trail, and only if the
        # derived density is corroborated by the matrix oracle
        rep = discrepancy_report(q)
        text = rep.render() if rep else ""
        rng = np.random.default_rng(1)
        corroborated = True
        for m in (2, 3):
            curv = oracle.NumericCurvature.random(2 * m, rng)
            u = oracle.random_vectors(2 * m, rng)
            num = oracle.numeric_functional("Q", curv, u, m)
            sym = q.density.evaluate(oracle.make_env(curv, u, m))
            corroborated &= abs(num - sym) <= 1e-9 * max(1.0, abs(sym))
        q_ok = (
            rep is not None
            and rep.first_mismatch in q.audit
            and "after cosphere integration" in text
            and "after trace" in text
            and corroborated
        )
        detail.append(
            f"Q differs from the published vector; discrepancy report "
            f"{'complete' if q_ok else 'incomplete'}, first mismatch {rep.first_mismatch if rep else '-'}"
        )
    detail.append(f"runtime {elapsed:.2f}s < 10s")
    ok = p_ok and q_ok and elapsed < 10
    acceptance((1, ok, ", ".join(detail), elapsed))
    acceptance(("info: strict Q equality", q_strict, "published Q vector reproduced" if q_strict
                else "not reproduced (see ledger)", 0.0))
    assert ok


CHECKPOINTS = ("I-1", "I-2", "I-3", "P", "II-1", "II-2", "II-3", "II-4", "II-5", "II-6")


def test_criterion_2_intermediate_checkpoints(acceptance):
    t0 = time.perf_counter()
    p, q = compute("P"), compute("Q")
    bad = []
    for tag in CHECKPOINTS:
        r = p if tag.startswith("I-") or tag == "P" else q
        if not r.item(tag).same_coefficients(REFERENCE[tag]):
            bad.append(tag)
    elapsed = time.perf_counter() - t0
    detail = "all checkpoints exact" if not bad else f"mismatching: {', '.join(bad)}"
    acceptance((2, not bad, detail, elapsed))
    assert not bad, detail


def test_criterion_3_clifford_oracle(acceptance):
    t0 = time.perf_counter()
    cases = suite_clifford(RunConfig(command="verify", suite="clifford", seed=0, tolerance=1e-9))
    rng = np.random.default_rng(3)
    cyclic = odd = True
    for _ in range(40):
        seq = [int(x) for x in rng.integers(1, 5, size=int(rng.integers(1, 9)))]
        k = int(rng.integers(0, len(seq)))
        tr = clifford_trace(CliffordWord(tuple(SlotVec(s) for s in seq)))
        rot = clifford_trace(CliffordWord(tuple(SlotVec(s) for s in seq[k:] + seq[:k])))
        cyclic &= tr == rot
        if len(seq) % 2:
            odd &= tr.is_zero
    elapsed = time.perf_counter() - t0
    ok = len(cases) == 200 and not _failing(cases) and cyclic and odd and elapsed < 30
    acceptance((3, ok, f"{len(cases) - len(_failing(cases))}/200 traces within 1e-9, "
                       f"cyclicity {cyclic}, odd-zero {odd}", elapsed))
    assert ok


def test_criterion_4_sphere(acceptance):
    _recursive.cache_clear()
    t0 = time.perf_counter()
    cases = suite_sphere(RunConfig(command="verify", suite="sphere"))
    elapsed = time.perf_counter() - t0
    ok = not _failing(cases) and elapsed < 5
    acceptance((4, ok, ", ".join(f"{c.id}: {c.detail}" for c in cases), elapsed))
    assert ok


def test_criterion_5_tensor(acceptance):
    t0 = time.perf_counter()
    cases = suite_tensor(RunConfig(command="verify", suite="tensor", seed=0))
    elapsed = time.perf_counter() - t0
    bad = _failing(cases)
    ok = not bad and elapsed < 10
    acceptance((5, ok, f"{len(cases) - len(bad)}/{len(cases)} checks"
                       + (f", failing {[c.id for c in bad]}" if bad else ""), elapsed))
    assert ok


def test_criterion_6_end_to_end_numeric(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    count = 0
    for m, draws in ((2, 20), (3, 5)):
        for _ in range(draws):
            curv = oracle.NumericCurvature.random(2 * m, rng)
            u = oracle.random_vectors(2 * m, rng)
            env = oracle.make_env(curv, u, m)
            for name in ("P", "Q"):
                num = oracle.numeric_functional(name, curv, u, m)
                sym = compute(name).density.evaluate(env)
                worst = max(worst, abs(num - sym) / max(1.0, abs(sym)))
                count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 120
    acceptance((6, ok, f"{count} comparisons, worst relative error {worst:.1e}", elapsed))
    assert ok


def _raw_q_summand(r, left_const):
    comp = compose(ab_symbols(), inverse_power_symbols(Order(1, 0)), MINUS_2M)
    (expr,) = [e for (rr, kl, _), e in comp.items.items() if rr == r and kl.const == left_const]
    return expr


def _derived_zero_from_symbol(name, tag):
    audit = compute(name).audit[tag]
    return len(audit.symbol) > 0 and audit.vector.is_zero


def _derived_zero_at_base_point(r, left_const, tag):
    raw = _raw_q_summand(r, left_const)
    return len(raw) > 0 and raw.at_x0().is_zero and compute("Q").item(tag).is_zero


STRUCTURAL = {
    "I-2": lambda: _derived_zero_from_symbol("P", "I-2"),
    "II-2": lambda: _derived_zero_at_base_point(0, 1, "II-2"),
    "II-3-B": lambda: _derived_zero_from_symbol("Q", "II-3-B"),
    "II-4-B": lambda: _derived_zero_from_symbol("Q", "II-4-B"),
    "II-5": lambda: _derived_zero_at_base_point(1, 1, "II-5"),
    "slots 10-11": lambda: all(
        v.coefficients[9].is_zero and v.coefficients[10].is_zero
        for name in ("P", "Q")
        for v in (compute(name).density, *compute(name).per_item.values())
    ),
}


@pytest.mark.parametrize("mechanism", list(STRUCTURAL))
def test_criterion_7_structural_zero(acceptance, mechanism):
    t0 = time.perf_counter()
    ok = STRUCTURAL[mechanism]()
    acceptance((7, ok, f"{mechanism} {'derived zero' if ok else 'NOT zero'}", time.perf_counter() - t0))
    assert ok
