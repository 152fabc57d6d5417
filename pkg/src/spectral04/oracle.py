"""Numeric cross-checks built from explicit matrices.

Nothing here goes through the symbolic trace, sphere or projection code.
Clifford generators are ``2^m x 2^m`` matrices, curvature is a random tensor
projected onto the algebraic curvature tensors, and cosphere integrals use
moment tensors built from the Gamma-function closed form.  Each item
integrand is written out by hand from the composition formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
import numpy as np

from .sphere import closed_form_moment

__all__ = [
    "GammaRep",
    "NumericCurvature",
    "gamma_rep",
    "numeric_trace",
    "moment_tensor",
    "random_vectors",
    "numeric_items",
    "numeric_functional",
    "make_env",
]

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


def _kron(*ms):
    out = np.eye(1, dtype=complex)
    for a in ms:
        out = np.kron(out, a)
    return out


@dataclass(frozen=True)
class GammaRep:
    """``n = 2m`` matrices with ``c_i c_j + c_j c_i = -2 delta_ij``."""

    m: int
    matrices: np.ndarray  # (n, 2^m, 2^m)

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def dim(self) -> int:
        return 2**self.m

    def of(self, v) -> np.ndarray:
        """``c(v) = sum_a v_a c(e_a)``."""
        return np.einsum("a,axy->xy", np.asarray(v, dtype=complex), self.matrices)

    def anticommutator_residual(self) -> float:
        c = self.matrices
        worst = 0.0
        for i in range(self.n):
            for j in range(self.n):
                ac = c[i] @ c[j] + c[j] @ c[i]
                target = -2.0 * np.eye(self.dim) if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(ac - target))))
        return worst


@lru_cache(maxsize=None)
def gamma_rep(m: int) -> GammaRep:
    """Jordan-Wigner Hermitian gammas times ``i``."""
    if m not in (1, 2, 3):
        raise ValueError(f"gamma representation supported for m in 1..3, got {m}")
    mats = []
    for k in range(m):
        head = [_PAULI_Z] * k
        tail = [_ID2] * (m - k - 1)
        for p in (_PAULI_X, _PAULI_Y):
            mats.append(1j * _kron(*head, p, *tail))
    return GammaRep(m, np.array(mats))


def numeric_trace(word, m: int) -> complex:
    """``tr[c_{w1} ... c_{wk}] / 2^m`` for 1-based generator indices."""
    rep = gamma_rep(m)
    out = np.eye(rep.dim, dtype=complex)
    for w in word:
        if not 1 <= w <= rep.n:
            raise IndexError(f"generator index {w} outside 1..{rep.n}")
        out = out @ rep.matrices[w - 1]
    return complex(np.trace(out) / rep.dim)


# -- curvature ------------------------------------------------------------------------


def _alt(T: np.ndarray) -> np.ndarray:
    out = np.zeros_like(T)
    for perm in itertools.permutations(range(4)):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        out += (-1) ** inv * T.transpose(perm)
    return out / 24.0


@dataclass(frozen=True)
class NumericCurvature:
    """Algebraic curvature tensor with ``Ric_ab = sum_l R_lalb`` and ``s = tr Ric``."""

    R: np.ndarray

    @property
    def n(self) -> int:
        return self.R.shape[0]

    @property
    def Ric(self) -> np.ndarray:
        return np.einsum("lalb->ab", self.R)

    @property
    def s(self) -> float:
        return float(np.trace(self.Ric))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "NumericCurvature":
        A = rng.standard_normal((n, n, n, n))
        A = A - A.transpose(1, 0, 2, 3)
        A = A - A.transpose(0, 1, 3, 2)
        A = 0.5 * (A + A.transpose(2, 3, 0, 1))
        return cls(A - _alt(A))

    @classmethod
    def flat(cls, n: int) -> "NumericCurvature":
        return cls(np.zeros((n, n, n, n)))

    def symmetry_residual(self) -> float:
        R = self.R
        checks = [
            R + R.transpose(1, 0, 2, 3),
            R + R.transpose(0, 1, 3, 2),
            R - R.transpose(2, 3, 0, 1),
            R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2),
        ]
        return max(float(np.max(np.abs(c))) for c in checks)


def random_vectors(n: int, rng: np.random.Generator, count: int = 4) -> np.ndarray:
    return rng.standard_normal((count, n))


def make_env(curv: NumericCurvature, u: np.ndarray, m: int) -> dict:
    """Environment for :meth:`InvariantVector.evaluate` and ``evaluate_polynomial``."""
    return {"m": m, "R": curv.R, "Ric": curv.Ric, "s": curv.s, "u": np.asarray(u, dtype=float)}


# -- cosphere moments -------------------------------------------------------------------


@lru_cache(maxsize=None)
def moment_tensor(n: int, degree: int) -> np.ndarray:
    """``integral xi_{a1} ... xi_{ad} dsigma / Vol`` as a dense array."""
    shape = (n,) * degree
    out = np.zeros(shape)
    for idx in itertools.product(range(n), repeat=degree):
        exps = [0] * n
        for a in idx:
            exps[a] += 1
        out[idx] = float(closed_form_moment(exps, n))
    return out


# -- hand-written item integrands ---------------------------------------------------------


def _tr(rep: GammaRep, X) -> complex:
    return np.trace(X) / rep.dim


def numeric_items(name: str, curv: NumericCurvature, u: np.ndarray, m: int) -> dict:
    """Each item's cosphere integral of the normalized trace, as complex numbers."""
    rep = gamma_rep(m)
    n = rep.n
    if curv.n != n or np.asarray(u).shape != (4, n):
        raise ValueError(f"dimension mismatch: expected n = {n}")
    c = rep.matrices
    R, Ric, s = curv.R, curv.Ric, curv.s
    C = [rep.of(v) for v in u]
    K = C[0] @ C[1]
    L = C[2] @ C[3]
    M2 = moment_tensor(n, 2)
    M4 = moment_tensor(n, 4)
    # T_ab = -1/8 sum_st R_bats c_s c_t, E = s/4
    cc = np.einsum("sxy,tyz->stxz", c, c)
    T = -0.125 * np.einsum("bats,stxz->abxz", R, cc)
    E = 0.25 * s
    items = {}

    if name == "P":
        k = m - 1
        word = K @ L
        items["I-1"] = k * (k + 1) / 3 * np.einsum("ab,ab->", Ric, M2) * _tr(rep, word)
        # T_a = 0 removes the T_a T_b and T_a T_a terms
        conn = k * (-np.einsum("aaxy->xy", T))
        conn = conn + 2 * k * (k + 1) * np.einsum("ab,abxy->xy", M2, T)
        items["I-2"] = _tr(rep, word @ conn)
        items["I-3"] = -k * E * _tr(rep, word)
        return items

    if name != "Q":
        raise ValueError(f"unknown functional {name!r}")
    k = m
    # X[f, g] = tr[K c_f L c_g]
    KcL = np.einsum("xy,fyz,zw->fxw", K, c, L)
    X = np.einsum("fxy,gyx->fg", KcL, c) / rep.dim

    # II-1: (-i) d_xi_j sigma_1(A) * d_x_j sigma_0(B) at x0; w(x0)=0 kills the rest
    dw = -0.5 * np.einsum("jpts->jpst", R)  # d_j w_st(e_p)
    ccc = np.einsum("pxy,styz->pstxz", c, cc)
    sigma0_ab = (-1j) * (1j) * (-0.25) * np.einsum("jpst,jxy,pstyz->xz", dw, KcL, ccc)
    items["II-1"] = _tr(rep, sigma0_ab)  # sigma_{-2m}(x0) = |xi|^{-2m} = 1 on the sphere

    # II-2: every term of sigma_{-2m-1} carries a factor x, so it vanishes at x0
    items["II-2"] = 0j

    # II-3: sigma_2(AB) = -K c(xi) L c(xi) times sigma_{-2m-2}
    ric_part = -(k * (k + 1) / 3) * np.einsum("fgab,ab,fg->", M4, Ric, X)
    conn_part = -2 * k * (k + 1) * np.einsum("fgab,fxy,gyz,abzx->", M4, KcL, c, T) / rep.dim
    conn_part += -k * np.einsum("fg,fxy,gyz,zx->", M2, KcL, c, -np.einsum("aaxy->xy", T)) / rep.dim
    endo_part = k * E * np.einsum("fg,fg->", M2, X)
    items["II-3-A"] = ric_part
    items["II-3-B"] = conn_part
    items["II-3-C"] = endo_part
    items["II-3"] = ric_part + conn_part + endo_part

    # II-4: (-i) sum_j d_xi_j sigma_2 * d_x_j sigma_{-2m-1}
    # d_xi_j sigma_2 = -(K c_j L c(xi) + K c(xi) L c_j)
    # d_x_j sigma_{-2m-1} = -(2ki/3) Ric_aj xi_a - 2ki T_aj xi_a
    sym = X + X.T  # tr[K c_j L c_f] + tr[K c_f L c_j], indexed (j, f)
    ric4 = (-1j) * np.einsum("fa,jf,aj->", M2, -sym, (-2j * k / 3) * Ric)
    both = np.einsum("jxy,fyz->jfxz", KcL, c) + np.einsum("fxy,jyz->jfxz", KcL, c)
    conn4 = (-1j) * np.einsum("fa,jfxy,ajyx->", M2, -both, -2j * k * T) / rep.dim
    items["II-4-A"] = ric4
    items["II-4-B"] = conn4
    items["II-4"] = ric4 + conn4

    # II-5: d_x sigma_{-2m} is linear in x, zero at x0
    items["II-5"] = 0j

    # II-6: -1/2 sum_jl d_xi_j d_xi_l sigma_2 * d_x_j d_x_l sigma_{-2m}
    hess = -(k / 3) * (np.einsum("ajbl,ab->jl", R, M2) + np.einsum("albj,ab->jl", R, M2))
    items["II-6"] = -0.5 * np.einsum("jl,jl->", -(X + X.T), hess)
    return items


def numeric_functional(name: str, curv: NumericCurvature, u: np.ndarray, m: int) -> float:
    """Density (coefficient of ``Vol * tr[id]``) from the hand-written integrands."""
    items = numeric_items(name, curv, u, m)
    tags = ("I-1", "I-2", "I-3") if name == "P" else ("II-1", "II-2", "II-3", "II-4", "II-5", "II-6")
    total = sum(items[t] for t in tags)
    scale = max(1.0, max(abs(items[t]) for t in tags))
    if abs(total.imag) > 1e-9 * scale:
        raise ArithmeticError(f"imaginary part {total.imag} survived in {name}")
    return float(total.real)
