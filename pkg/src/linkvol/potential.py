"""The region-weight potential of a link diagram and its corrected value W0.

Each crossing contributes a five-dilogarithm expression in the four region
weights around it (roles j, k, l, m) and the meridian eigenvalues of its two
strands. Points where every weight-direction logarithmic derivative
exponentiates to 1 correspond to representations of the link group, and the
corrected value

    W0 = W - sum_j (w_j dW/dw_j) log w_j
           - sum_filled [ (m_i dW/dm_i)(log m_i + u_i pi i)
                          - (r_i/s_i)(log m_i + u_i pi i)^2 ]

encodes volume and Chern-Simons invariant of the filled manifold as
W0 = i(vol + i cs) up to integer multiples of pi^2.

All logarithms are principal; no branch tracking happens anywhere.
"""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .numerics import PI_SQUARED, principal_log

# The crossing term comes in two mirror forms: an overall sign sigma and the
# meridian exponent (-sigma) inside the four meridian-carrying ratios. Which
# diagram crossing sign uses which form is a convention that cannot be read
# off the strand combinatorics; like the region placements in diagram.py it
# is pinned by the bundled reference examples.
SIGMA_POS = 1

_PI2_6 = math.pi * math.pi / 6.0


class PotentialError(ValueError):
    pass


class DegenerateCrossingWarning(UserWarning):
    pass


@dataclass
class Solution:
    """A candidate point: one weight per region, one eigenvalue per
    component, bound to the diagram that defines the regions."""

    diagram: object
    w: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=complex).reshape(-1)
        self.m = np.asarray(self.m, dtype=complex).reshape(-1)
        d = self.diagram
        if self.w.shape[0] != d.n_regions:
            raise PotentialError(
                f"solution has {self.w.shape[0]} region weights, diagram "
                f"has {d.n_regions} regions")
        if self.m.shape[0] != d.n_components:
            raise PotentialError(
                f"solution has {self.m.shape[0]} meridian values, diagram "
                f"has {d.n_components} components")
        if np.any(self.w == 0) or np.any(self.m == 0):
            raise PotentialError("solution entries must be nonzero")

    def to_json(self):
        return {"w": [[z.real, z.imag] for z in self.w],
                "m": [[z.real, z.imag] for z in self.m]}

    @classmethod
    def from_json(cls, diagram, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        w = [complex(p[0], p[1]) for p in doc["w"]]
        m = [complex(p[0], p[1]) for p in doc["m"]]
        return cls(diagram=diagram, w=w, m=m)


@dataclass
class VolumeResult:
    W0: complex
    vol: float
    cs: float          # defined mod pi^2, normalized into [0, pi^2)
    residual_max: float
    nondegenerate: bool
    gluing: object = None

    def to_json(self):
        doc = {"W0": [self.W0.real, self.W0.imag], "vol": self.vol,
               "cs": self.cs, "residual_max": self.residual_max,
               "nondegenerate": self.nondegenerate}
        if self.gluing is not None:
            doc["gluing_report"] = self.gluing.to_json()
        return doc


# Per crossing the five ratios, in the fixed order used throughout this
# module, are
#     0: A = m_b^(-sigma) w_m / w_j      1: B = m_a^(-sigma) w_k / w_j
#     2: D = m_b^(-sigma) w_l / w_k      3: E = m_a^(-sigma) w_l / w_m
#     4: C = w_j w_l / (w_m w_k)
# and the crossing term is
#     sigma * (Li2(A) + Li2(B) - Li2(D) - Li2(E) + Li2(C)
#              - pi^2/6 + log(A) log(B)).

# Weight-direction logarithmic derivative, one row per role. Entries are
# (role, ratio, kind, sign) with kind 0 = log(1 - ratio), kind 1 =
# log(ratio); every sign is additionally multiplied by the crossing's sigma.
# Roles: 0=j, 1=k, 2=l, 3=m. Ratios indexed as above.
_WDW_PATTERN = (
    (0, 0, 0, 1), (0, 1, 0, 1), (0, 4, 0, -1), (0, 1, 1, -1), (0, 0, 1, -1),
    (1, 1, 0, -1), (1, 2, 0, -1), (1, 4, 0, 1), (1, 0, 1, 1),
    (2, 2, 0, 1), (2, 3, 0, 1), (2, 4, 0, -1),
    (3, 0, 0, -1), (3, 3, 0, -1), (3, 4, 0, 1), (3, 1, 1, 1),
)

# Meridian-direction logarithmic derivative. Rows: 0 = the over strand's
# component, 1 = the under strand's. The sigma factors cancel against the
# flipped meridian exponent, so these signs are NOT multiplied by sigma.
_MDW_PATTERN = (
    (0, 0, 0, 1), (0, 2, 0, -1), (0, 1, 1, -1),
    (1, 1, 0, 1), (1, 3, 0, -1), (1, 0, 1, -1),
)


class _Tables:
    """Flat term tables for one diagram, in the layout _kernels consumes.

    Index sentinels n_regions / n_components point at an appended constant 1
    in the extended weight/meridian vectors.
    """

    def __init__(self, d):
        nw = d.n_regions
        nm = d.n_components
        self.n_w = nw
        self.n_m = nm
        self.sigma = np.array([SIGMA_POS * c.sign for c in d.crossings],
                              dtype=np.int8)

        r_rows = []   # (n1, n2, d1, d2, mi, mexp) per ratio, crossing-major
        for c in d.crossings:
            j, k, l, m = c.regions
            sig = SIGMA_POS * c.sign
            r_rows.extend([
                (m, nw, j, nw, c.beta, -sig),
                (k, nw, j, nw, c.alpha, -sig),
                (l, nw, k, nw, c.beta, -sig),
                (l, nw, m, nw, c.alpha, -sig),
                (j, l, m, k, nm, 0),
            ])
        cols = np.array(r_rows, dtype=np.int64).T
        self.r_n1, self.r_n2, self.r_d1, self.r_d2 = cols[0:4]
        self.r_mi = cols[4]
        self.r_mexp = cols[5].astype(np.int8)

        w_rows = []
        m_rows = []
        for ci, c in enumerate(d.crossings):
            base = 5 * ci
            sig = int(self.sigma[ci])
            for role, ratio, kind, sgn in _WDW_PATTERN:
                w_rows.append((c.regions[role], kind, sgn * sig, base + ratio))
            comps = (c.beta, c.alpha)
            for role, ratio, kind, sgn in _MDW_PATTERN:
                m_rows.append((comps[role], kind, sgn, base + ratio))

        def pack(rows):
            out_row = np.array([r[0] for r in rows], dtype=np.int64)
            kind = np.array([r[1] for r in rows], dtype=np.int8)
            sign = np.array([r[2] for r in rows], dtype=np.int8)
            t = np.array([r[3] for r in rows], dtype=np.int64)
            return (out_row, kind, sign, self.r_n1[t], self.r_n2[t],
                    self.r_d1[t], self.r_d2[t], self.r_mi[t], self.r_mexp[t])

        self.wdw = pack(w_rows)
        self.mdw = pack(m_rows)


def _tables(d):
    t = getattr(d, "_potential_tables", None)
    if t is None or t.sigma.shape[0] != len(d.crossings):
        t = _Tables(d)
        d._potential_tables = t
    return t


def _extended(s):
    w_ext = np.concatenate([s.w, [1.0 + 0j]])
    m_ext = np.concatenate([s.m, [1.0 + 0j]])
    return w_ext, m_ext


def all_ratios(s):
    """All five ratios of every crossing, shape (n_crossings, 5), in the
    fixed order documented at the top of this module."""
    t = _tables(s.diagram)
    w_ext, m_ext = _extended(s)
    R = w_ext[t.r_n1] * w_ext[t.r_n2] / (w_ext[t.r_d1] * w_ext[t.r_d2])
    R = R * m_ext[t.r_mi] ** t.r_mexp.astype(np.int64)
    return R.reshape(-1, 5)


def crossing_ratios(c, s):
    """The five ratios of one crossing."""
    return all_ratios(s)[c.index]


def _crossing_values(s, warn=True):
    d = s.diagram
    t = _tables(d)
    R = all_ratios(s)
    if warn:
        deg = np.abs(R - 1.0) <= 1e-12
        for ci in np.nonzero(np.any(deg, axis=1))[0]:
            warnings.warn(f"degenerate crossing {ci + 1}: ratio equal to 1",
                          DegenerateCrossingWarning, stacklevel=3)
    li = _kernels.dilog_many(np.ascontiguousarray(R.ravel())).reshape(-1, 5)
    vals = np.empty(d.n_crossings, dtype=complex)
    for ci in range(d.n_crossings):
        A, B = R[ci, 0], R[ci, 1]
        vals[ci] = t.sigma[ci] * (
            li[ci, 0] + li[ci, 1] - li[ci, 2] - li[ci, 3] + li[ci, 4]
            - _PI2_6 + principal_log(A) * principal_log(B))
    return vals


def crossing_potential(c, s):
    """The five-dilogarithm term of one crossing, principal branches.

    A ratio equal to 1 is flagged with a DegenerateCrossingWarning; the
    value is still returned (the expression stays finite there).
    """
    return complex(_crossing_values(s)[c.index])


def total_potential(s):
    """Sum of the crossing terms, accumulated in crossing order."""
    vals = _crossing_values(s)
    total = 0j
    for v in vals:
        total += v
    return complex(total)


def _check_ratios_regular(s):
    R = all_ratios(s)
    bad = R == 1.0
    if np.any(bad):
        ci = int(np.nonzero(np.any(bad, axis=1))[0][0])
        raise PotentialError(
            f"degenerate crossing {ci + 1}: a ratio equals 1, the "
            f"logarithmic derivative is singular")


def wdW_all(s):
    """Vector of w_j dW/dw_j over all regions."""
    _check_ratios_regular(s)
    t = _tables(s.diagram)
    w_ext, m_ext = _extended(s)
    row, kind, sign, n1, n2, d1, d2, mi, mexp = t.wdw
    return _kernels.eval_terms(w_ext, m_ext, row, kind, sign, n1, n2, d1, d2,
                               mi, mexp, t.n_w)


def wdW(s, j):
    """w_j dW/dw_j as a finite sum of principal logarithms."""
    if not (0 <= j < s.diagram.n_regions):
        raise PotentialError(f"no region {j + 1}")
    return complex(wdW_all(s)[j])


def mdW_all(s):
    """Vector of m_i dW/dm_i over all components."""
    _check_ratios_regular(s)
    t = _tables(s.diagram)
    w_ext, m_ext = _extended(s)
    row, kind, sign, n1, n2, d1, d2, mi, mexp = t.mdw
    return _kernels.eval_terms(w_ext, m_ext, row, kind, sign, n1, n2, d1, d2,
                               mi, mexp, t.n_m)


def mdW(s, i):
    """m_i dW/dm_i as a finite sum of principal logarithms."""
    if not (0 <= i < s.diagram.n_components):
        raise PotentialError(f"no component {i + 1}")
    return complex(mdW_all(s)[i])


def _tau_roles(c, s):
    """Closed-form tau values of one crossing for roles (j, k, l, m)."""
    j, k, l, m = c.regions
    wj, wk, wl, wm = s.w[j], s.w[k], s.w[l], s.w[m]
    ma, mb = s.m[c.alpha], s.m[c.beta]
    P = wk * wm - wj * wl
    if SIGMA_POS * c.sign == 1:
        tj = (ma * wj - wk) * (mb * wj - wm) / P
        tk = -P / ((wk / ma - wj) * (mb * wk - wl))
        tl = (wl / mb - wk) * (wl / ma - wm) / P
        tm = -P / ((wm / mb - wj) * (ma * wm - wl))
    else:
        tj = P / ((wj / ma - wk) * (wj / mb - wm))
        tk = -(ma * wk - wj) * (wk / mb - wl) / P
        tl = P / ((mb * wl - wk) * (ma * wl - wm))
        tm = -(mb * wm - wj) * (wm / ma - wl) / P
    return (tj, tk, tl, tm)


def tau(c, j, s):
    """Closed-form value of exp(w_j dW_c/dw_j) for one crossing.

    Regions touching the crossing in several roles multiply the role
    values; a region not touching it at all gives the empty product 1.
    """
    out = 1.0 + 0j
    for region, t in zip(c.regions, _tau_roles(c, s)):
        if region == j:
            out *= t
    return complex(out)


def tau_products(s):
    """Per region, the product of tau over all crossings."""
    prod = np.ones(s.diagram.n_regions, dtype=complex)
    for c in s.diagram.crossings:
        for region, t in zip(c.regions, _tau_roles(c, s)):
            prod[region] *= t
    return prod


def is_nondegenerate(s, tol=1e-8):
    """Check that every crossing's five ratios stay away from 0, 1 and
    infinity (a ratio at any of those collapses a tetrahedron; near-0 or
    huge ratios are the numerical signature of a family escaping to such a
    collapse).

    Returns (ok, report); the report lists each offending crossing/ratio.
    """
    R = all_ratios(s)
    report = []
    for ci in range(R.shape[0]):
        for ri in range(5):
            val = R[ci, ri]
            mag = abs(val)
            if not (math.isfinite(val.real) and math.isfinite(val.imag)):
                report.append(f"crossing {ci + 1}: ratio {ri + 1} is not "
                              f"finite")
            elif mag <= tol:
                report.append(
                    f"crossing {ci + 1}: ratio {ri + 1} = {val:.6g} is "
                    f"within {tol:g} of 0")
            elif mag >= 1.0 / tol:
                report.append(
                    f"crossing {ci + 1}: ratio {ri + 1} has magnitude "
                    f"{mag:.3g} >= 1/{tol:g}")
            elif abs(val - 1.0) <= tol:
                report.append(
                    f"crossing {ci + 1}: ratio {ri + 1} = {val:.6g} is "
                    f"within {tol:g} of 1")
    return (not report, report)


@dataclass
class CriticalResiduals:
    """Both forms of the defining residuals: exp of the logarithmic
    derivative minus 1, and the closed-form tau product minus 1."""

    exp_form: np.ndarray
    tau_form: np.ndarray

    @property
    def residual_max(self):
        return float(max(np.max(np.abs(self.exp_form)),
                         np.max(np.abs(self.tau_form))))


def critical_residuals(s):
    """Per-region deviations of the critical-point equations from 0."""
    exp_form = np.exp(wdW_all(s)) - 1.0
    tau_form = tau_products(s) - 1.0
    return CriticalResiduals(exp_form=exp_form, tau_form=tau_form)


def W0(s, f, residual_tol=1e-3, degeneracy_tol=1e-8, filling_tol=1e-6):
    """Corrected potential value and the volume / Chern-Simons split.

    ``f`` lists one slope per component (None = unfilled); every filled
    component needs its longitude eigenvalue and correction integers
    (u, v), and the solution must satisfy the critical equations to
    residual_tol. vol is the imaginary part, cs the negated real part
    normalized into [0, pi^2).
    """
    d = s.diagram
    if f.n_components != d.n_components:
        raise PotentialError(
            f"filling lists {f.n_components} components, diagram has "
            f"{d.n_components}")
    ok, report = is_nondegenerate(s, tol=degeneracy_tol)
    if not ok:
        raise PotentialError("degenerate solution: " + "; ".join(report[:4]))
    for i, sl in enumerate(f.slopes):
        if sl is None:
            continue
        if int(sl[1]) == 0:
            raise PotentialError(
                f"meridional filling (slope with s = 0) on component "
                f"{i + 1} is unsupported")
    f.validate(m=s.m, tol=filling_tol)

    res = critical_residuals(s)
    rmax = res.residual_max
    if rmax > residual_tol:
        raise PotentialError(
            f"critical residuals reach {rmax:.3g}, above {residual_tol:g}: "
            f"not a solution")

    logw = np.array([principal_log(z) for z in s.w])
    val = total_potential(s) - complex(np.sum(wdW_all(s) * logw))
    md = mdW_all(s)
    for i, sl in enumerate(f.slopes):
        if sl is None:
            continue
        r, si = int(sl[0]), int(sl[1])
        u, _v = f.uv[i]
        lm = principal_log(s.m[i]) + u * 1j * math.pi
        val -= md[i] * lm - (r / si) * lm * lm

    cs = (-val.real) % PI_SQUARED
    if cs >= PI_SQUARED:
        cs -= PI_SQUARED
    elif cs < 0.0:
        cs += PI_SQUARED
    return VolumeResult(W0=complex(val), vol=float(val.imag), cs=float(cs),
                        residual_max=rmax, nondegenerate=True)
