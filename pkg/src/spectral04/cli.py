"""Command-line front end: ``compute``, ``audit`` and ``verify``.

Exit status is 0 on success, 1 when a verification or checkpoint fails, and 2
for usage errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import oracle
from .coefficients import ONE, Qm
from .clifford import BasisVec, CliffordWord, clifford_trace
from .functionals import (
    CHECKPOINT_ORDER,
    REFERENCE,
    compute,
    discrepancy_report,
    wres_assemble,
)
from .sphere import closed_form_moment, recursive_moment
from .symbols import (
    MINUS_2M,
    Order,
    ab_symbols,
    compose,
    inverse_power_symbols,
)
from .tensor import (
    Fixed,
    TensorPolynomial,
    evaluate_polynomial,
    riemann_orient,
)

__all__ = ["RunConfig", "Case", "SUITES", "run", "main"]

SUITE_NAMES = ("clifford", "sphere", "tensor", "symbols", "intermediates", "theorem")


@dataclass
class RunConfig:
    command: str = "compute"
    functional: str = "both"
    format: str = "plain"
    suite: str = "all"
    m_values: list = field(default_factory=lambda: [1, 2, 3])
    seed: int = 0
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not set(self.m_values) <= {1, 2, 3}:
            raise ValueError("m values must lie in {1, 2, 3}")


@dataclass(frozen=True)
class Case:
    id: str
    ok: bool
    detail: str = ""


def _close(a: complex, b: complex, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# -- suites ------------------------------------------------------------------------------


def suite_clifford(cfg: RunConfig) -> list:
    rng = np.random.default_rng(cfg.seed)
    out = []
    for k in range(200):
        m = int(rng.choice(cfg.m_values))
        length = int(rng.integers(0, 9))
        word = [int(x) for x in rng.integers(1, 2 * m + 1, size=length)]
        sym = clifford_trace(CliffordWord(tuple(BasisVec(Fixed(w)) for w in word)))
        val = evaluate_polynomial(sym, {"m": m})
        num = oracle.numeric_trace(word, m)
        ok = abs(val - num) <= cfg.tolerance
        out.append(Case(f"clifford/{k:03d}", ok, f"m={m} word={word} symbolic={val.real:+.0f} numeric={num.real:+.3g}"))
    return out


def suite_sphere(cfg: RunConfig) -> list:
    out = []
    for n in (4, 6, 8):
        bad = 0
        count = 0
        for degree in range(0, 9):
            for idx in itertools.combinations_with_replacement(range(n), degree):
                exps = [idx.count(a) for a in range(n)]
                count += 1
                if recursive_moment(idx, n) != closed_form_moment(exps, n):
                    bad += 1
        out.append(Case(f"sphere/n{n}", bad == 0, f"{count} multidegrees, {bad} disagreements"))
    return out


_RIEMANN_SYMMETRIES = (
    ((0, 1, 2, 3), 1),
    ((1, 0, 2, 3), -1),
    ((0, 1, 3, 2), -1),
    ((1, 0, 3, 2), 1),
    ((2, 3, 0, 1), 1),
    ((3, 2, 0, 1), -1),
    ((2, 3, 1, 0), -1),
    ((3, 2, 1, 0), 1),
)


def suite_tensor(cfg: RunConfig) -> list:
    rng = np.random.default_rng(cfg.seed)
    out = []
    bad = 0
    for k in range(50):
        labels = [int(x) for x in rng.integers(1, 7, size=4)]
        ref = TensorPolynomial().add_term(ONE, [("R", *(Fixed(x) for x in labels))])
        for perm, sign in _RIEMANN_SYMMETRIES:
            p = [labels[i] for i in perm]
            other = TensorPolynomial().add_term(Qm.of(sign), [("R", *(Fixed(x) for x in p))])
            if other != ref:
                bad += 1
    out.append(Case("tensor/riemann-symmetries", bad == 0, f"400 checks, {bad} failures"))
    a, b, c, d = (Fixed(x) for x in (1, 2, 3, 4))
    bianchi = (
        TensorPolynomial()
        .add_term(ONE, [("R", a, b, c, d)])
        .add_term(ONE, [("R", a, c, d, b)])
        .add_term(ONE, [("R", a, d, b, c)])
    )
    out.append(Case("tensor/bianchi-kernel", bianchi.is_zero, bianchi.render()))
    trace = TensorPolynomial().add_term(ONE, [("D", 7, 7)])
    out.append(Case("tensor/delta-trace", trace.render() == "2*m", trace.render()))
    for n in (4, 6):
        m = n // 2
        curv = oracle.NumericCurvature.random(n, rng)
        u = oracle.random_vectors(n, rng)
        env = oracle.make_env(curv, u, m)
        worst = 0.0
        for _ in range(25):
            i, j, kk, l = (Fixed(int(x)) for x in rng.integers(1, n + 1, size=4))
            raw = curv.R[i.value - 1, j.value - 1, kk.value - 1, l.value - 1]
            canon = evaluate_polynomial(TensorPolynomial().add_term(ONE, [("R", i, j, kk, l)]), env)
            worst = max(worst, abs(canon - raw))
            # contracted monomial on the u vectors
            s1, s2, s3, s4 = (int(x) for x in rng.permutation(4) + 1)
            fs = [("U", s1, 11), ("U", s2, 12), ("U", s3, 13), ("U", s4, 14), ("R", 11, 12, 13, 14)]
            poly = TensorPolynomial().add_term(ONE, fs)
            direct = np.einsum("a,b,c,d,abcd->", u[s1 - 1], u[s2 - 1], u[s3 - 1], u[s4 - 1], curv.R)
            worst = max(worst, abs(evaluate_polynomial(poly, env) - direct))
        out.append(Case(f"tensor/numeric-n{n}", worst <= 1e-12 * 100, f"max residual {worst:.2e}"))
    sign, _ = riemann_orient(1, 1, 2, 3)
    out.append(Case("tensor/repeated-pair-vanishes", sign == 0, f"sign {sign}"))
    return out


def suite_symbols(cfg: RunConfig) -> list:
    out = []
    comp = compose(ab_symbols(), inverse_power_symbols(Order(1, 0)), MINUS_2M)
    homogeneous = all(t.order == MINUS_2M for e in comp.items.values() for t in e.terms)
    out.append(Case("symbols/homogeneity", homogeneous, f"{len(comp.items)} summands"))
    out.append(Case("symbols/six-summands", len(comp.items) == 6, str(sorted(comp.items))))
    q = compute("Q")
    for tag in ("II-2", "II-5"):
        v = q.per_item[tag]
        out.append(Case(f"symbols/{tag}-vanishes", v.is_zero, v.render()))
    for tag in ("II-3-B", "II-4-B"):
        a = q.audit[tag]
        ok = a.vector.is_zero and len(a.symbol) > 0
        out.append(Case(f"symbols/{tag}-vanishes", ok, f"{len(a.symbol)} symbol terms cancel"))
    p = compute("P")
    a = p.audit["I-2"]
    out.append(Case("symbols/I-2-vanishes", a.vector.is_zero and len(a.symbol) > 0, f"{len(a.symbol)} symbol terms cancel"))
    return out


def suite_intermediates(cfg: RunConfig) -> list:
    out = []
    for name in ("P", "Q"):
        r = compute(name)
        for tag in CHECKPOINT_ORDER:
            if tag in r.checkpoints and tag != name:
                ok = r.checkpoints[tag] == "match"
                detail = "" if ok else f"derived {r.item(tag).render()} | reference {REFERENCE[tag].render()}"
                out.append(Case(f"intermediates/{tag}", ok, detail))
    return out


def suite_theorem(cfg: RunConfig) -> list:
    out = []
    for name in ("P", "Q"):
        r = compute(name)
        ok = r.checkpoints[name] == "match"
        out.append(Case(f"theorem/{name}", ok, "match" if ok else "mismatch"))
    # numeric corroboration of the derived densities
    draws = {2: 20, 3: 5}
    rng = np.random.default_rng(cfg.seed)
    for m, count in draws.items():
        if m not in cfg.m_values:
            continue
        for k in range(count):
            curv = oracle.NumericCurvature.random(2 * m, rng)
            u = oracle.random_vectors(2 * m, rng)
            env = oracle.make_env(curv, u, m)
            for name in ("P", "Q"):
                num = oracle.numeric_functional(name, curv, u, m)
                sym = compute(name).density.evaluate(env)
                ok = _close(num, sym, cfg.tolerance)
                out.append(Case(f"theorem/numeric/{name}/m{m}/{k:02d}", ok, f"numeric={num:.12g} symbolic={sym:.12g}"))
    return out


SUITES: dict = {
    "clifford": suite_clifford,
    "sphere": suite_sphere,
    "tensor": suite_tensor,
    "symbols": suite_symbols,
    "intermediates": suite_intermediates,
    "theorem": suite_theorem,
}


# -- commands ------------------------------------------------------------------------------


def _functionals(cfg: RunConfig) -> list:
    return ["P", "Q"] if cfg.functional == "both" else [cfg.functional]


def _report_mismatches(names, err) -> int:
    status = 0
    for name in names:
        rep = discrepancy_report(compute(name))
        if rep is not None:
            status = 1
            err(f"{name}: checkpoint mismatch at {rep.first_mismatch} ({len(rep.rows)} differing)")
    return status


def cmd_compute(cfg: RunConfig, out, err) -> int:
    names = _functionals(cfg)
    if cfg.format == "json":
        docs = [wres_assemble(compute(n), "json") for n in names]
        out(json.dumps(docs[0] if len(docs) == 1 else docs, indent=2, sort_keys=True))
    else:
        for n in names:
            out(wres_assemble(compute(n), cfg.format))
    return _report_mismatches(names, err)


def cmd_audit(cfg: RunConfig, out, err) -> int:
    names = _functionals(cfg)
    style = "latex" if cfg.format == "latex" else "plain"
    for n in names:
        r = compute(n)
        out(f"== {n} ==")
        for tag, audit in r.audit.items():
            out(audit.render(style))
            out(f"  checkpoint: {r.checkpoints.get(tag, '-')}")
        rep = discrepancy_report(r)
        if rep is not None:
            out(rep.render())
    return _report_mismatches(names, err)


def cmd_verify(cfg: RunConfig, out, err) -> int:
    names = SUITE_NAMES if cfg.suite == "all" else (cfg.suite,)
    out(f"seed {cfg.seed}, tolerance {cfg.tolerance:g}, m in {cfg.m_values}")
    cases = []
    for name in names:
        cases.extend(SUITES[name](cfg))
    failed = 0
    for case in sorted(cases, key=lambda c: c.id):
        line = f"{'PASS' if case.ok else 'FAIL'} {case.id} {case.detail}".rstrip()
        out(line)
        if not case.ok:
            failed += 1
            err(line)
    if cfg.suite in ("theorem", "all"):
        verdict = ", ".join(
            f"{c.id.split('/')[1]}: {'match' if c.ok else 'mismatch'}"
            for c in cases
            if c.id in ("theorem/P", "theorem/Q")
        )
        out(verdict)
    out(f"{len(cases) - failed} passed, {failed} failed")
    return 1 if failed else 0


COMMANDS: dict = {"compute": cmd_compute, "audit": cmd_audit, "verify": cmd_verify}


def run(cfg: RunConfig, out: Callable = print, err: Callable = None) -> int:
    if err is None:
        def err(msg):
            print(msg, file=sys.stderr)
    return COMMANDS[cfg.command](cfg, out, err)


def _m_list(text: str) -> list:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad m list {text!r}")
    if not values or not set(values) <= {1, 2, 3}:
        raise argparse.ArgumentTypeError("m values must lie in {1, 2, 3}")
    return values


def _positive(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral04",
        description="Exact evaluation of the spectral (0,4)-tensor functionals P and Q.",
    )
    sub = parser.add_subparsers(dest="command")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--functional", choices=("P", "Q", "both"), default="both")
    common.add_argument("--format", choices=("plain", "latex", "json"), default="plain")
    common.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    common.add_argument("--m", dest="m_values", type=_m_list, default=[1, 2, 3],
                        help="comma-separated half-dimensions for numeric suites")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=_positive, default=1e-9)
    sub.add_parser("compute", parents=[common], help="print the functionals")
    sub.add_parser("audit", parents=[common], help="print per-item derivations")
    sub.add_parser("verify", parents=[common], help="run a verification suite")
    return parser


def main(argv: Iterable[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    if args.command is None:
        cfg = RunConfig()
    else:
        cfg = RunConfig(
            command=args.command,
            functional=args.functional,
            format=args.format,
            suite=args.suite,
            m_values=args.m_values,
            seed=args.seed,
            tolerance=args.tolerance,
        )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
