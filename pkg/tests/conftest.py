from __future__ import annotations

import numpy as np
import pytest

ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, ok, detail, seconds)`` for the end-of-run summary."""
    store = request.config.stash.setdefault(ACCEPTANCE, [])
    return store.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(ACCEPTANCE, [])
    if not rows:
        return
    grouped: dict = {}
    for crit, ok, detail, seconds in rows:
        grouped.setdefault(crit, []).append((ok, detail, seconds))
    terminalreporter.section("acceptance criteria")
    for crit in sorted(grouped, key=lambda c: (isinstance(c, str), c)):
        entries = grouped[crit]
        ok = all(e[0] for e in entries)
        seconds = sum(e[2] for e in entries)
        detail = "; ".join(e[1] for e in entries)
        label = f"criterion {crit}" if isinstance(crit, int) else crit
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label} ({seconds:.2f}s): {detail}")
