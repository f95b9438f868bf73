"""Finite-difference jets of matrix-valued functions and the standard
Levi-Civita curvature assembly from metric derivatives.

Index conventions used throughout the package:

- ``dg[p, a, b]``        first partials  d_p g_ab
- ``d2g[p, q, a, b]``    second partials d_p d_q g_ab (symmetric in p, q)
- ``gamma[a, b, c]``     Christoffel symbols Gamma^a_bc (symmetric in b, c)
- ``dgamma[p, a, b, c]`` partials d_p Gamma^a_bc
- ``rlow[i, j, k, l]``   fully lowered curvature g(R(d_i, d_j) d_k, d_l)

The sign convention is pinned so that on the unit round sphere the
orthonormal-frame component R_1221 equals +1, i.e. sectional curvature is
K(X, Y) = g(R(X, Y)Y, X) for orthonormal X, Y.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "EPS_THIRD",
    "default_steps",
    "matrix_jets",
    "christoffels_from_jets",
    "christoffel_jacobian_from_jets",
    "riemann_from_christoffels",
    "project_curvature_symmetries",
]

_EPS = np.finfo(float).eps
EPS_THIRD = _EPS ** (1.0 / 3.0)  # ~6.1e-6, the classic central-difference step


def default_steps(x: np.ndarray, base: float = EPS_THIRD) -> np.ndarray:
    """Per-axis steps h_p = base * max(1, |x_p|)."""
    return base * np.maximum(1.0, np.abs(np.asarray(x, dtype=float)))


def _plain_jets(
    fun: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    steps: np.ndarray,
    m0: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Second-order central first and second derivatives of fun at x."""
    dim = x.shape[0]
    shape = m0.shape
    dm = np.zeros((dim,) + shape)
    d2m = np.zeros((dim, dim) + shape)
    plus = []
    minus = []
    for p in range(dim):
        e = np.zeros(dim)
        e[p] = steps[p]
        mp = fun(x + e)
        mm = fun(x - e)
        plus.append(mp)
        minus.append(mm)
        dm[p] = (mp - mm) / (2.0 * steps[p])
        d2m[p, p] = (mp - 2.0 * m0 + mm) / steps[p] ** 2
    for p in range(dim):
        ep = np.zeros(dim)
        ep[p] = steps[p]
        for q in range(p + 1, dim):
            eq = np.zeros(dim)
            eq[q] = steps[q]
            mpq = fun(x + ep + eq)
            mpmq = fun(x + ep - eq)
            mmpq = fun(x - ep + eq)
            mmq = fun(x - ep - eq)
            mixed = (mpq - mpmq - mmpq + mmq) / (4.0 * steps[p] * steps[q])
            d2m[p, q] = mixed
            d2m[q, p] = mixed
    return dm, d2m


def matrix_jets(
    fun: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    steps: np.ndarray,
    richardson: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(f, df, d2f) of a matrix-valued function by central differences.

    With ``richardson`` the O(h^2) stencils are combined at h and h/2 into
    O(h^4) estimates, (4 f(h/2) - f(h)) / 3.
    """
    x = np.asarray(x, dtype=float)
    steps = np.asarray(steps, dtype=float)
    m0 = fun(x)
    dm, d2m = _plain_jets(fun, x, steps, m0)
    if richardson:
        dm_half, d2m_half = _plain_jets(fun, x, steps / 2.0, m0)
        dm = (4.0 * dm_half - dm) / 3.0
        d2m = (4.0 * d2m_half - d2m) / 3.0
    return m0, dm, d2m


def christoffels_from_jets(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^a_bc = (1/2) g^ad (d_b g_dc + d_c g_bd - d_d g_bc)."""
    ginv = np.linalg.inv(g)
    s = np.einsum("bdc->dbc", dg) + np.einsum("cbd->dbc", dg) - dg
    return 0.5 * np.einsum("ad,dbc->abc", ginv, s)


def christoffel_jacobian_from_jets(
    g: np.ndarray, dg: np.ndarray, d2g: np.ndarray
) -> np.ndarray:
    """d_p Gamma^a_bc from metric first and second derivatives."""
    ginv = np.linalg.inv(g)
    dginv = -np.einsum("ae,pef,fd->pad", ginv, dg, ginv)
    s = np.einsum("bdc->dbc", dg) + np.einsum("cbd->dbc", dg) - dg
    ds = (
        np.einsum("pbdc->pdbc", d2g)
        + np.einsum("pcbd->pdbc", d2g)
        - d2g
    )
    return 0.5 * (
        np.einsum("pad,dbc->pabc", dginv, s) + np.einsum("ad,pdbc->pabc", ginv, ds)
    )


def riemann_from_christoffels(
    g: np.ndarray, gamma: np.ndarray, dgamma: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Curvature of the Levi-Civita connection.

    Returns (rup, rlow) with R(d_i, d_j) d_k = rup[a, i, j, k] d_a and
    rlow[i, j, k, l] = g(R(d_i, d_j) d_k, d_l).
    """
    rup = (
        np.einsum("iajk->aijk", dgamma)
        - np.einsum("jaik->aijk", dgamma)
        + np.einsum("aim,mjk->aijk", gamma, gamma)
        - np.einsum("ajm,mik->aijk", gamma, gamma)
    )
    rlow = np.einsum("la,aijk->ijkl", g, rup)
    return rup, rlow


def project_curvature_symmetries(r: np.ndarray) -> np.ndarray:
    """Project a 4-tensor onto the algebraic curvature symmetries:
    antisymmetry in (0,1) and (2,3), symmetry under pair exchange.

    After projection, components with a repeated index inside either pair
    are exact floating-point zeros.  First Bianchi is NOT enforced, so it
    remains a meaningful residual check on projected tables.
    """
    r = 0.5 * (r - r.transpose(1, 0, 2, 3))
    r = 0.5 * (r - r.transpose(0, 1, 3, 2))
    r = 0.5 * (r + r.transpose(2, 3, 0, 1))
    return r
