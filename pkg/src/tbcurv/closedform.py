"""Closed-form curvature of (TM, G) at an adapted-frame point.

Every formula is evaluated at a normal-form point: base point q, a
g-orthonormal frame u with u_0 parallel to v, and t = |v|_g, so the fiber
components of v in the frame are (t, 0, ..., 0).  Frame index 0 plays the
distinguished radial role ("index equal to one" in 1-based notation).

The (2n)^4 component table splits into six symmetry classes by the
horizontal/vertical pattern of the four slots:

    hhhh  purely horizontal          (base curvature plus t^2 corrections)
    vvvv  purely vertical            (epsilon pattern with F / H weights)
    hvvv  one horizontal among three vertical: identically zero
    vvhh  vertical pair against horizontal pair
    hvhv  mixed plane block
    hhvh  one vertical among three horizontal (the nabla-R block)

Each class is produced by its own formula; every other index placement is
generated from these by the algebraic curvature symmetries, never by new
formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .basemanifold import (
    AdaptedFramePoint,
    ChartManifold,
    FrameCurvature,
    frame_curvature,
)
from .errors import MissingNablaRError
from .metricfamily import NaturalMetricFamily

__all__ = [
    "TMCurvatureTable",
    "TMSectional",
    "ConstCurvSectional",
    "ExpScalarResult",
    "tm_curvature",
    "tm_sectional",
    "tm_sectional_constcurv",
    "tm_ricci",
    "tm_scalar",
    "scalar_exp_specials",
    "minus_exp_flat_threshold",
    "component_class_masks",
    "gram_diagonal",
    "table_ricci_trace",
    "table_scalar_trace",
    "CLASS_NAMES",
]

CLASS_NAMES = ("hhhh", "vvvv", "hvvv", "vvhh", "hvhv", "hhvh")


def _epsilon(n: int) -> np.ndarray:
    """epsilon_ijkl = delta_il delta_jk - delta_jl delta_ik."""
    eye = np.eye(n)
    return np.einsum("il,jk->ijkl", eye, eye) - np.einsum("jl,ik->ijkl", eye, eye)


def gram_diagonal(fam: NaturalMetricFamily, t: float, n: int) -> np.ndarray:
    """Diagonal of the adapted-frame Gram matrix: n ones, then
    alpha + t^2 beta (radial vertical), then alpha for the rest."""
    t_sq = t * t
    alpha = fam.alpha_at(t_sq)
    delta = fam.delta_at(t_sq)
    return np.array([1.0] * n + [delta] + [alpha] * (n - 1))


def component_class_masks(n: int) -> dict[str, np.ndarray]:
    """Boolean masks over the (2n)^4 table, one per symmetry class."""
    two_n = 2 * n
    is_v = np.arange(two_n) >= n
    a = is_v[:, None, None, None]
    b = is_v[None, :, None, None]
    c = is_v[None, None, :, None]
    d = is_v[None, None, None, :]
    a, b, c, d = np.broadcast_arrays(a, b, c, d)
    count = a.astype(int) + b + c + d
    masks = {
        "hhhh": count == 0,
        "vvvv": count == 4,
        "hvvv": count == 3,
        "hhvh": count == 1,
        "vvhh": (count == 2) & ((a & b) | (c & d)),
        "hvhv": (count == 2) & ~((a & b) | (c & d)),
    }
    return masks


@dataclass(frozen=True)
class TMCurvatureTable:
    """Components <Rbar(e_a, e_b) e_c, e_d> for a, b, c, d in 0..2n-1,
    stored as the six class blocks plus the assembled full table."""

    n: int
    t: float
    blocks: dict
    table: np.ndarray
    fp: Optional[AdaptedFramePoint] = None
    family_name: str = ""
    manifold_id: str = ""

    def __getitem__(self, idx):
        return self.table[idx]


def _check_normal_form(fp: AdaptedFramePoint, g: np.ndarray) -> None:
    if fp.t == 0.0:
        return
    xi = fp.u @ g @ fp.v
    expected = np.zeros_like(xi)
    expected[0] = fp.t
    if not np.allclose(xi, expected, atol=1e-9 * max(1.0, fp.t)):
        raise ValueError(
            "frame point is not in normal form (u_0 not aligned with v); "
            "build it with adapted_frame()"
        )


def _blocks(
    fam: NaturalMetricFamily, fp: AdaptedFramePoint, frame: FrameCurvature
) -> dict:
    n = fp.dim
    t = fp.t
    t_sq = t * t
    jets = fam.jets(t_sq)
    alpha, alpha_d1, beta = jets.alpha, jets.alpha_d1, jets.beta
    f_val = fam.F(t_sq)
    h_val = fam.H(t_sq)

    rt = frame.Rtable
    r1 = rt[:, :, :, 0]  # R_{abc1}
    if frame.dRtable is None:
        raise MissingNablaRError(
            "the one-vertical block needs nabla R; compute frame_curvature "
            "with include_nabla=True"
        )
    dr1 = frame.dRtable[:, :, :, :, 0]  # (nabla_p R)_{abc1}

    # hhhh: base curvature plus quadratic t^2 corrections.
    hhhh = (
        t_sq
        * alpha
        * (
            0.5 * np.einsum("ijr,klr->ijkl", r1, r1)
            + 0.25 * np.einsum("ilr,kjr->ijkl", r1, r1)
            + 0.25 * np.einsum("jlr,ikr->ijkl", r1, r1)
        )
        + rt
    )

    # vvvv: epsilon pattern, weight F away from the radial index, H with it.
    eps = _epsilon(n)
    weight = np.full((n, n, n, n), f_val)
    radial = np.zeros((n, n, n, n), dtype=bool)
    radial[0], radial[:, 0], radial[:, :, 0], radial[:, :, :, 0] = (
        True,
        True,
        True,
        True,
    )
    weight[radial] = h_val
    vvvv = eps * weight

    # vvhh: vertical pair against horizontal pair.
    delta_i0 = np.zeros(n)
    delta_i0[0] = 1.0
    coeff = 2.0 * alpha + (delta_i0[:, None] + delta_i0[None, :]) * beta * t_sq
    vvhh = 0.5 * np.einsum("ij,ijkl->ijkl", coeff, rt)
    vvhh += (
        0.5
        * (beta - 2.0 * alpha_d1)
        * t_sq
        * (
            np.einsum("i,klj->ijkl", delta_i0, r1)
            - np.einsum("j,kli->ijkl", delta_i0, r1)
        )
    )
    vvhh += (alpha**2 * t_sq / 4.0) * (
        np.einsum("krj,rli->ijkl", r1, r1) - np.einsum("kri,rlj->ijkl", r1, r1)
    )

    # hvhv: mixed plane block, with the radial correction
    # (delta_j0 + delta_l0) * alpha' * t^2 / 2 * (R_{kil1} - R_{kij1}).
    dsum = delta_i0[None, :, None, None] + delta_i0[None, None, None, :]
    hvhv = (
        0.5 * alpha * np.einsum("kilj->ijkl", rt)
        + (alpha**2 * t_sq / 4.0) * np.einsum("krj,ril->ijkl", r1, r1)
        + 0.5
        * t_sq
        * alpha_d1
        * dsum
        * (
            np.einsum("kil->ikl", r1)[:, None, :, :]
            - np.einsum("kij->ijk", r1)[:, :, :, None]
        )
    )

    # hhvh: the nabla-R block,
    # (alpha t / 2) [ (nabla_j R)(u_i, u_l) u_k - (nabla_i R)(u_j, u_l) u_k ]_1.
    hhvh = (alpha * t / 2.0) * (
        np.einsum("jilk->ijkl", dr1) - np.einsum("ijlk->ijkl", dr1)
    )

    return {
        "hhhh": hhhh,
        "vvvv": vvvv,
        "hvvv": np.zeros((n, n, n, n)),
        "vvhh": vvhh,
        "hvhv": hvhv,
        "hhvh": hhvh,
    }


def _assemble(blocks: dict, n: int) -> np.ndarray:
    """Populate the full (2n)^4 table from the class blocks using the
    curvature symmetries for every other index placement."""
    two_n = 2 * n
    T = np.zeros((two_n, two_n, two_n, two_n))
    H = slice(0, n)
    V = slice(n, two_n)
    hhhh, vvvv = blocks["hhhh"], blocks["vvvv"]
    vvhh, hvhv, hhvh = blocks["vvhh"], blocks["hvhv"], blocks["hhvh"]

    T[H, H, H, H] = hhhh
    T[V, V, V, V] = vvvv
    # hvvv class vanishes in all placements.
    T[V, V, H, H] = vvhh
    T[H, H, V, V] = np.einsum("klij->ijkl", vvhh)  # pair symmetry
    T[H, V, H, V] = hvhv
    T[V, H, H, V] = -np.einsum("jikl->ijkl", hvhv)
    T[H, V, V, H] = -np.einsum("ijlk->ijkl", hvhv)
    T[V, H, V, H] = np.einsum("jilk->ijkl", hvhv)
    T[H, H, V, H] = hhvh
    T[H, H, H, V] = -np.einsum("ijlk->ijkl", hhvh)
    T[V, H, H, H] = np.einsum("klij->ijkl", hhvh)  # pair symmetry
    T[H, V, H, H] = -np.einsum("klji->ijkl", hhvh)
    return T


def tm_curvature(
    M: ChartManifold,
    fam: NaturalMetricFamily,
    fp: AdaptedFramePoint,
    frame: Optional[FrameCurvature] = None,
) -> TMCurvatureTable:
    """Full closed-form curvature table of (TM, G) at a normal-form point."""
    _check_normal_form(fp, M.metric(fp.q))
    fam.check_point(fp.t * fp.t)
    if frame is None:
        frame = frame_curvature(M, fp, include_nabla=True)
    blocks = _blocks(fam, fp, frame)
    table = _assemble(blocks, fp.dim)
    return TMCurvatureTable(
        n=fp.dim,
        t=fp.t,
        blocks=blocks,
        table=table,
        fp=fp,
        family_name=fam.name,
        manifold_id=M.catalog_id,
    )


# --------------------------------------------------------------------------
# Sectional curvature
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TMSectional:
    """Sectional curvature tables over adapted-frame planes.  Diagonals of
    the hh and vv tables are not planes and are left at zero."""

    hh: np.ndarray  # Kbar(e_i, e_j)
    vv: np.ndarray  # Kbar(e_{n+i}, e_{n+j})
    hv: np.ndarray  # Kbar(e_i, e_{n+j})


def tm_sectional(
    M: ChartManifold,
    fam: NaturalMetricFamily,
    fp: AdaptedFramePoint,
    frame: Optional[FrameCurvature] = None,
) -> TMSectional:
    _check_normal_form(fp, M.metric(fp.q))
    n = fp.dim
    t_sq = fp.t * fp.t
    fam.check_point(t_sq)
    alpha = fam.alpha_at(t_sq)
    delta = fam.delta_at(t_sq)
    if frame is None:
        frame = frame_curvature(M, fp, include_nabla=False)
    rt = frame.Rtable
    r1 = rt[:, :, :, 0]

    kbase = np.einsum("ijji->ij", rt)
    # |R(u_i, u_j) v|^2 = t^2 sum_r R_{ij1r}^2 = t^2 sum_r R_{ijr1}^2
    hh = kbase - 0.75 * alpha * t_sq * np.einsum("ijr,ijr->ij", r1, r1)

    vv = np.full((n, n), fam.F(t_sq) / alpha**2)
    h_over = fam.H(t_sq) / (alpha * delta)
    vv[0, :] = h_over
    vv[:, 0] = h_over
    np.fill_diagonal(vv, 0.0)

    # |R(u_j, v) u_i|^2 = t^2 sum_r R_{j 1 i r}^2
    hv = (alpha / 4.0) * t_sq * np.einsum("jir,jir->ij", rt[:, 0, :, :], rt[:, 0, :, :])
    return TMSectional(hh=hh, vv=vv, hv=hv)


@dataclass(frozen=True)
class ConstCurvSectional:
    """Sectional shortcut for a constant-curvature base.

    ``hv`` comes from substituting the constant-curvature tensor into the
    general mixed-plane formula: quadratic in the curvature constant and
    zero on the aligned plane.  ``hv_shortcut`` is the simpler variant that
    is linear in the constant and nonzero at i = j = 0; the two disagree
    there, so reports must surface ``shortcut_deviation`` instead of
    silently preferring one.
    """

    hh: np.ndarray
    vv: np.ndarray
    hv: np.ndarray
    hv_shortcut: np.ndarray
    shortcut_deviation: float


def tm_sectional_constcurv(
    k0: float, fam: NaturalMetricFamily, t: float, n: int
) -> ConstCurvSectional:
    t_sq = t * t
    fam.check_point(t_sq)
    alpha = fam.alpha_at(t_sq)
    delta = fam.delta_at(t_sq)
    d0 = np.zeros(n)
    d0[0] = 1.0

    hh = k0 - 0.75 * k0 * k0 * alpha * t_sq * (d0[:, None] + d0[None, :])
    np.fill_diagonal(hh, 0.0)

    vv = np.full((n, n), fam.F(t_sq) / alpha**2)
    h_over = fam.H(t_sq) / (alpha * delta)
    vv[0, :] = h_over
    vv[:, 0] = h_over
    np.fill_diagonal(vv, 0.0)

    # General-theorem mixed planes with the constant-curvature tensor:
    # sum_r R_{j1ir}^2 = k0^2 (delta_i0 + delta_ij - 2 [i == j == 0]).
    pattern = d0[:, None] + np.eye(n)
    pattern[0, 0] = 0.0
    hv = (alpha / 4.0) * t_sq * k0 * k0 * pattern

    shortcut = (alpha / 4.0) * k0 * t_sq * (np.eye(n) + d0[:, None])
    return ConstCurvSectional(
        hh=hh,
        vv=vv,
        hv=hv,
        hv_shortcut=shortcut,
        shortcut_deviation=float(np.max(np.abs(hv - shortcut))),
    )


# --------------------------------------------------------------------------
# Ricci and scalar curvature
# --------------------------------------------------------------------------


def tm_ricci(
    M: ChartManifold,
    fam: NaturalMetricFamily,
    fp: AdaptedFramePoint,
    frame: Optional[FrameCurvature] = None,
) -> np.ndarray:
    """Closed-form Ricci table of (TM, G) over the (unnormalized) adapted
    frame, as a symmetric 2n x 2n matrix.

    The horizontal-horizontal and vertical-vertical blocks are closed
    forms; the vertical R^2 coefficient is alpha^2 t^2 / 4, the value
    forced by tracing the curvature table (and the one consistent with the
    scalar-curvature closed form).  The mixed block is obtained by tracing
    the one-vertical curvature block against the orthonormalized frame.
    """
    _check_normal_form(fp, M.metric(fp.q))
    n = fp.dim
    t = fp.t
    t_sq = t * t
    fam.check_point(t_sq)
    alpha = fam.alpha_at(t_sq)
    delta = fam.delta_at(t_sq)
    f_val = fam.F(t_sq)
    h_val = fam.H(t_sq)
    if frame is None:
        frame = frame_curvature(M, fp, include_nabla=True)
    rt = frame.Rtable
    r1 = rt[:, :, :, 0]
    ricci_base = np.einsum("illj->ij", rt)

    hh = ricci_base - (alpha * t_sq / 2.0) * np.einsum("irl,jrl->ij", r1, r1)

    vv = (alpha**2 * t_sq / 4.0) * np.einsum("rli,rlj->ij", r1, r1)
    vv += np.eye(n) * ((n - 2) * f_val / alpha + h_val / delta)
    vv[0, :] = 0.0
    vv[:, 0] = 0.0
    vv[0, 0] = (n - 1) * h_val / alpha

    if frame.dRtable is None:
        raise MissingNablaRError("mixed Ricci block needs nabla R")
    dr1 = frame.dRtable[:, :, :, :, 0]
    hv = (alpha * t / 2.0) * (
        np.einsum("illj->ij", dr1) - np.einsum("lilj->ij", dr1)
    )

    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = 0.5 * (hh + hh.T)
    out[n:, n:] = 0.5 * (vv + vv.T)
    out[:n, n:] = hv
    out[n:, :n] = hv.T
    return out


def tm_scalar(
    M: ChartManifold,
    fam: NaturalMetricFamily,
    fp: AdaptedFramePoint,
    frame: Optional[FrameCurvature] = None,
) -> float:
    """Scalar curvature of (TM, G) at v:

    S(q) - (t^2 alpha / 4) sum R_{irl1}^2 + 2(n-1) H / (alpha Delta)
    + (n-1)(n-2) F / alpha^2, everything evaluated at t^2.
    """
    _check_normal_form(fp, M.metric(fp.q))
    n = fp.dim
    t_sq = fp.t * fp.t
    fam.check_point(t_sq)
    alpha = fam.alpha_at(t_sq)
    delta = fam.delta_at(t_sq)
    if frame is None:
        frame = frame_curvature(M, fp, include_nabla=False)
    rt = frame.Rtable
    r1 = rt[:, :, :, 0]
    s_base = float(np.einsum("illi->", rt))
    return (
        s_base
        - (t_sq * alpha / 4.0) * float(np.einsum("irl,irl->", r1, r1))
        + 2.0 * (n - 1) * fam.H(t_sq) / (alpha * delta)
        + (n - 1) * (n - 2) * fam.F(t_sq) / alpha**2
    )


# --------------------------------------------------------------------------
# Exponential-metric scalar specials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpScalarResult:
    value: float
    flat_threshold: Optional[float]  # |v|^2 where the flat-base minus-exponential
    # scalar crosses zero (dim >= 3); None otherwise


def minus_exp_flat_threshold(n: int) -> float:
    """Positivity threshold of the flat-base minus-exponential scalar:
    |v|^2 = ((n-1) + sqrt(4 n (n-2) + 1)) / (n-2), for n >= 3."""
    if n < 3:
        raise ValueError("threshold defined for dim >= 3")
    return ((n - 1) + math.sqrt(4.0 * n * (n - 2) + 1.0)) / (n - 2)


def scalar_exp_specials(k0: float, n: int, v_sq: float, which: str) -> ExpScalarResult:
    """Specialized scalar curvature of the exponential metrics over a
    constant-curvature base (curvature k0), as a function of |v|^2."""
    s = float(v_sq)
    if which == "plus":
        value = (n - 1) * (
            k0 * (n - 0.5 * k0 * s * math.exp(s))
            - math.exp(-s) * (2.0 + (n - 2) * (1.0 + s)) / (1.0 + s)
        )
        return ExpScalarResult(value=value, flat_threshold=None)
    if which == "minus":
        value = (n - 1) * (
            k0 * (n - 0.5 * k0 * s * math.exp(-s))
            + (math.exp(s) / (1.0 + s))
            * ((n - 2) * (3.0 - s) + (6.0 + 2.0 * s) / (1.0 + s))
        )
        threshold = minus_exp_flat_threshold(n) if n >= 3 else None
        return ExpScalarResult(value=value, flat_threshold=threshold)
    raise ValueError("which must be 'plus' or 'minus'")


# --------------------------------------------------------------------------
# Trace helpers (internal consistency between table, Ricci and scalar)
# --------------------------------------------------------------------------


def table_ricci_trace(table: np.ndarray, gram_diag: np.ndarray) -> np.ndarray:
    """Ricci of a full component table over the orthogonal adapted frame."""
    return np.einsum("accb,c->ab", table, 1.0 / gram_diag)


def table_scalar_trace(table: np.ndarray, gram_diag: np.ndarray) -> float:
    ricci = table_ricci_trace(table, gram_diag)
    return float(np.einsum("aa,a->", ricci, 1.0 / gram_diag))
