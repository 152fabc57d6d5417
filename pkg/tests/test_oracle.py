from __future__ import annotations

import numpy as np
import pytest

from spectral04 import oracle
from spectral04.functionals import compute


@pytest.mark.parametrize("m", [1, 2, 3])
def test_gamma_anticommutation(m):
    rep = oracle.gamma_rep(m)
    assert rep.anticommutator_residual() <= 1e-12
    assert np.trace(np.eye(rep.dim)) == 2**m
    assert oracle.numeric_trace([], m) == 1


def test_gamma_rep_range():
    with pytest.raises(ValueError):
        oracle.gamma_rep(4)
    with pytest.raises(IndexError):
        oracle.numeric_trace([3], 1)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_curvature_symmetries(rng, n):
    curv = oracle.NumericCurvature.random(n, rng)
    assert curv.symmetry_residual() <= 1e-12
    assert np.allclose(curv.Ric, np.einsum("lalb->ab", curv.R), atol=1e-12)
    assert abs(curv.s - np.trace(curv.Ric)) <= 1e-12
    assert np.abs(curv.R).max() > 0.1


def test_moment_tensor_normalized():
    M2 = oracle.moment_tensor(4, 2)
    assert np.allclose(M2, np.eye(4) / 4)
    assert abs(np.einsum("aabb->", oracle.moment_tensor(4, 4)) - 1) < 1e-14


def test_dimension_mismatch():
    curv = oracle.NumericCurvature.random(4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        oracle.numeric_items("Q", curv, np.zeros((4, 6)), 2)


def test_end_to_end_numeric(rng):
    draws = {2: 20, 3: 5}
    for m, count in draws.items():
        for _ in range(count):
            curv = oracle.NumericCurvature.random(2 * m, rng)
            u = oracle.random_vectors(2 * m, rng)
            env = oracle.make_env(curv, u, m)
            for name in ("P", "Q"):
                num = oracle.numeric_functional(name, curv, u, m)
                sym = compute(name).density.evaluate(env)
                assert abs(num - sym) <= 1e-9 * max(1.0, abs(sym)), (name, m)
