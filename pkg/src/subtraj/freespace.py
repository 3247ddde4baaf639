"""Free-space construction for trajectory pairs.

The diagram lives on the parameter rectangle [1, n1] x [1, n2].  Vertex i of
the first trajectory is the vertical line x = i, vertex j of the second the
horizontal line y = j; cell (i, j) spans [i, i+1] x [j, j+1].  Within a cell
the free space is an ellipse slice, so each cell edge carries at most one
closed free interval, and the per-cell boundary contributes at most two
critical points per edge plus the free corners.

Internal critical points live strictly inside cells on the free/non-free
boundary.  Four kinds: the ellipse's leftmost / rightmost point (only relevant
when the matching cell edge is empty), boundary points sharing a y with some
external critical point, and boundary points whose horizontal partner exactly
ell units of arclength to the left is also on a boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ParamInterval, Trajectory, free_interval_point_vs_segment, tol

KIND_V_END = "interval-endpoint-on-vertical-edge"
KIND_H_END = "interval-endpoint-on-horizontal-edge"
KIND_CORNER = "free-cell-corner"

KIND_LEFTMOST = "LeftmostFree"
KIND_RIGHTMOST = "RightmostFree"
KIND_SHARES_Y = "SharesYWithExternal"
KIND_ELL_PAIR = "EllOffsetPair"

# an internal point this close to a cell edge is the business of the
# external enumeration, not ours
_EDGE_GUARD = 1e-9


@dataclass(frozen=True)
class DiscreteFreeGrid:
    n1: int
    n2: int
    free: np.ndarray  # (n1, n2) bool

    def is_free(self, x: int, y: int) -> bool:
        # vertex indices are 1-based
        return bool(self.free[x - 1, y - 1])


def build_discrete_grid(t1: Trajectory, t2: Trajectory, d: float) -> DiscreteFreeGrid:
    """Dense vertex-pair membership matrix of the closed free space."""
    de = d + tol(d)
    a, b = t1.xy, t2.xy
    n1, n2 = t1.n, t2.n
    out = np.empty((n1, n2), dtype=bool)
    block = max(1, int(4e6) // max(n2, 1))
    for i0 in range(0, n1, block):
        chunk = a[i0 : i0 + block]
        dx = chunk[:, 0:1] - b[None, :, 0]
        dy = chunk[:, 1:2] - b[None, :, 1]
        out[i0 : i0 + block] = dx * dx + dy * dy <= de * de
    return DiscreteFreeGrid(n1, n2, out)


def _edge_intervals(points: np.ndarray, a: np.ndarray, u: np.ndarray, de: float):
    """Free fraction of every segment (a[k] .. a[k]+u[k]) against every point.

    Returns (lo, hi) of shape (len(points), len(a)), entries in [0, 1],
    NaN where the free interval is empty.
    """
    w = points[:, None, :] - a[None, :, :]
    L2 = np.einsum("kd,kd->k", u, u)
    safe = np.where(L2 == 0.0, 1.0, L2)
    wu = np.einsum("pkd,kd->pk", w, u)
    w2 = np.einsum("pkd,pkd->pk", w, w)
    disc = wu * wu - safe[None, :] * (w2 - de * de)
    root = np.sqrt(np.maximum(disc, 0.0))
    raw_lo = (wu - root) / safe[None, :]
    raw_hi = (wu + root) / safe[None, :]
    empty = (disc < 0.0) | (raw_hi < 0.0) | (raw_lo > 1.0)
    lo = np.clip(raw_lo, 0.0, 1.0)
    hi = np.clip(raw_hi, 0.0, 1.0)
    dg = L2 == 0.0
    if dg.any():
        # zero-length segment: all or nothing by endpoint distance
        free_dg = w2[:, dg] <= de * de
        empty[:, dg] = ~free_dg
        lo[:, dg] = 0.0
        hi[:, dg] = 1.0
    lo[empty] = np.nan
    hi[empty] = np.nan
    return lo, hi


@dataclass(frozen=True)
class ExternalCriticalPoint:
    x: float
    y: float
    cell: tuple
    kind: str


@dataclass(frozen=True)
class InternalCriticalPoint:
    x: float
    y: float
    cell: tuple
    kind: str
    partner: tuple | None = None  # (x, y) of the arclength-ell point to the left


@dataclass(frozen=True)
class CellFreeSpace:
    cell: tuple
    left: ParamInterval | None
    right: ParamInterval | None
    bottom: ParamInterval | None
    top: ParamInterval | None


def _sort_key(p):
    return (p.x, p.y, p.kind)


class FreeSpaceDiagram:
    """Continuous free-space diagram of a trajectory pair.

    Edge intervals are stored in absolute diagram coordinates: vlo/vhi[i-1,
    j-1] bound the free interval of vertical line x=i within row j, hlo/hhi[
    i-1, j-1] the free interval of horizontal line y=j within column i.
    """

    __slots__ = ("t1", "t2", "d", "n1", "n2", "corners", "vlo", "vhi", "hlo", "hhi", "external", "_internal_cache")

    def __init__(self, t1, t2, d, corners, vlo, vhi, hlo, hhi, external):
        self.t1 = t1
        self.t2 = t2
        self.d = d
        self.n1 = t1.n
        self.n2 = t2.n
        self.corners = corners
        self.vlo = vlo
        self.vhi = vhi
        self.hlo = hlo
        self.hhi = hhi
        self.external = external
        self._internal_cache = None

    def corner_free(self, i: int, j: int) -> bool:
        return bool(self.corners[i - 1, j - 1])

    def vint(self, i: int, j: int) -> ParamInterval | None:
        """Free interval of vertical line x=i within row j, or None."""
        lo = self.vlo[i - 1, j - 1]
        if math.isnan(lo):
            return None
        return ParamInterval(float(lo), float(self.vhi[i - 1, j - 1]))

    def hint(self, i: int, j: int) -> ParamInterval | None:
        """Free interval of horizontal line y=j within column i, or None."""
        lo = self.hlo[i - 1, j - 1]
        if math.isnan(lo):
            return None
        return ParamInterval(float(lo), float(self.hhi[i - 1, j - 1]))

    def slice_v(self, x: float, j: int) -> ParamInterval | None:
        """Free interval of the vertical line at arbitrary x within row j.

        Matches vint() at integer x; the threshold carries the same
        tolerance the stored intervals were built with.
        """
        if not (1 <= j <= self.n2 - 1):
            raise IndexError("row %d out of range" % j)
        if not (1.0 - 1e-9 <= x <= self.n1 + 1e-9):
            raise ValueError("x outside the diagram")
        x = min(max(x, 1.0), float(self.n1))
        iv = free_interval_point_vs_segment(
            self.t1.point_at(x), self.t2.vertex(j), self.t2.vertex(j + 1), self.d
        )
        if iv is None:
            return None
        return ParamInterval(iv.lo + j, iv.hi + j)

    def slice_h(self, y: float, i: int) -> ParamInterval | None:
        """Free interval of the horizontal line at arbitrary y within column i."""
        if not (1 <= i <= self.n1 - 1):
            raise IndexError("column %d out of range" % i)
        if not (1.0 - 1e-9 <= y <= self.n2 + 1e-9):
            raise ValueError("y outside the diagram")
        y = min(max(y, 1.0), float(self.n2))
        iv = free_interval_point_vs_segment(
            self.t2.point_at(y), self.t1.vertex(i), self.t1.vertex(i + 1), self.d
        )
        if iv is None:
            return None
        return ParamInterval(iv.lo + i, iv.hi + i)

    def cell(self, i: int, j: int) -> CellFreeSpace:
        if not (1 <= i <= self.n1 - 1 and 1 <= j <= self.n2 - 1):
            raise IndexError("cell (%d, %d) out of range" % (i, j))
        return CellFreeSpace(
            (i, j),
            left=self.vint(i, j),
            right=self.vint(i + 1, j),
            bottom=self.hint(i, j),
            top=self.hint(i, j + 1),
        )

    def internal_points(self, ell: float, samples: int = 64):
        if not (self.t1 is self.t2 or np.array_equal(self.t1.xy, self.t2.xy)):
            raise ValueError("internal critical points are defined on a self-diagram")
        key = (float(ell), samples)
        if self._internal_cache is None or self._internal_cache[0] != key:
            pts = enumerate_internal_critical_points(self.t1, self.d, ell, fsd=self, samples=samples)
            self._internal_cache = (key, pts)
        return self._internal_cache[1]


def build_continuous_fsd(t1: Trajectory, t2: Trajectory, d: float) -> FreeSpaceDiagram:
    de = d + tol(d)
    n1, n2 = t1.n, t2.n
    if n2 >= 2:
        vf_lo, vf_hi = _edge_intervals(t1.xy, t2.xy[:-1], np.diff(t2.xy, axis=0), de)
    else:
        vf_lo = vf_hi = np.empty((n1, 0))
    if n1 >= 2:
        hf_lo, hf_hi = _edge_intervals(t2.xy, t1.xy[:-1], np.diff(t1.xy, axis=0), de)
        hf_lo, hf_hi = hf_lo.T, hf_hi.T
    else:
        hf_lo = hf_hi = np.empty((0, n2))
    vlo = vf_lo + np.arange(1, max(n2, 1))[None, :]
    vhi = vf_hi + np.arange(1, max(n2, 1))[None, :]
    hlo = hf_lo + np.arange(1, max(n1, 1))[:, None]
    hhi = hf_hi + np.arange(1, max(n1, 1))[:, None]
    corners = build_discrete_grid(t1, t2, d).free

    ci_max = max(n1 - 1, 1)
    cj_max = max(n2 - 1, 1)
    external = []
    for pi, pj in zip(*np.nonzero(~np.isnan(vf_lo))):
        i, j = int(pi) + 1, int(pj) + 1
        cell = (min(i, ci_max), j)
        if vf_lo[pi, pj] > 0.0:
            external.append(ExternalCriticalPoint(float(i), float(vlo[pi, pj]), cell, KIND_V_END))
        if vf_hi[pi, pj] < 1.0:
            external.append(ExternalCriticalPoint(float(i), float(vhi[pi, pj]), cell, KIND_V_END))
    for pi, pj in zip(*np.nonzero(~np.isnan(hf_lo))):
        i, j = int(pi) + 1, int(pj) + 1
        cell = (i, min(j, cj_max))
        if hf_lo[pi, pj] > 0.0:
            external.append(ExternalCriticalPoint(float(hlo[pi, pj]), float(j), cell, KIND_H_END))
        if hf_hi[pi, pj] < 1.0:
            external.append(ExternalCriticalPoint(float(hhi[pi, pj]), float(j), cell, KIND_H_END))
    for pi, pj in zip(*np.nonzero(corners)):
        i, j = int(pi) + 1, int(pj) + 1
        cell = (min(i, ci_max), min(j, cj_max))
        external.append(ExternalCriticalPoint(float(i), float(j), cell, KIND_CORNER))
    external.sort(key=_sort_key)
    return FreeSpaceDiagram(t1, t2, d, corners, vlo, vhi, hlo, hhi, external)


# ---------------------------------------------------------------------------
# internal critical points of the self-diagram F_d(T, T)


def _arclen_at_params(t: Trajectory, elen: np.ndarray, params: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(params) | (params < 1.0) | (params > t.n)
    p = np.where(bad, 1.0, params)
    idx = np.clip(np.floor(p).astype(np.int64), 1, t.n - 1)
    out = t.arclen_prefix[idx - 1] + (p - idx) * elen[idx - 1]
    out[bad] = np.nan
    return out


class _InternalScan:
    """Shared state for one pass over the self-diagram's columns."""

    def __init__(self, t, d, ell, fsd, samples):
        self.t = t
        self.d = d
        self.ell = ell
        self.fsd = fsd
        self.samples = samples
        self.de = d + tol(d)
        self.xy = t.xy
        self.seg = np.diff(t.xy, axis=0)
        self.L2 = np.einsum("kd,kd->k", self.seg, self.seg)
        self.elen = np.sqrt(self.L2)
        self.nus = (np.arange(samples) + 0.5) / samples
        self._branch_cache = {}
        # external line heights, grouped by row, non-integer y only
        n = t.n
        row_sets = [set() for _ in range(n + 1)]
        for p in fsd.external:
            if p.kind == KIND_V_END:
                j = int(math.floor(p.y))
                if 1 <= j <= n - 1 and j < p.y < j + 1:
                    row_sets[j].add(p.y)
        ys, rows = [], []
        for j in range(1, n):
            for y in sorted(row_sets[j]):
                ys.append(y)
                rows.append(j)
        self.lines_y = np.array(ys, dtype=np.float64)
        self.lines_row = np.array(rows, dtype=np.int64)

    # boundary of cell (c, j) as x(nu), the two quadratic branches
    def branch_samples(self, c, j):
        key = (c, j)
        got = self._branch_cache.get(key)
        if got is not None:
            return got
        L, R = self._branch_eval(c, j, self.nus)
        self._branch_cache[key] = (L, R)
        return L, R

    def _branch_eval(self, c, j, nus):
        A = self.L2[c - 1]
        if A <= 0.0:
            nanv = np.full(len(nus), np.nan)
            return nanv, nanv
        u1 = self.seg[c - 1]
        v0 = (self.xy[c - 1] - self.xy[j - 1])[None, :] - nus[:, None] * self.seg[j - 1]
        B = v0 @ u1
        C = np.einsum("kd,kd->k", v0, v0) - self.de * self.de
        disc = B * B - A * C
        ok = disc >= 0.0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        xl = np.where(ok, c + (-B - sq) / A, np.nan)
        xr = np.where(ok, c + (-B + sq) / A, np.nan)
        return xl, xr

    def branch_scalar(self, c, j, nu, side):
        xl, xr = self._branch_eval(c, j, np.array([nu]))
        v = xl[0] if side == 0 else xr[0]
        if not np.isfinite(v) or v < 1.0 or v > self.t.n:
            return None
        return float(v)

    def arclen(self, xs):
        return _arclen_at_params(self.t, self.elen, xs)

    # ---- kind 1: ellipse x-extremes, gated by an empty matching edge ----
    def kind1(self, i):
        out = []
        if self.L2[i - 1] <= 0.0:
            return out
        t = self.t
        seg, L2 = self.seg, self.L2
        u1 = seg[i - 1]
        w = self.xy[i - 1][None, :] - self.xy[:-1]
        nz = L2 > 0.0
        iu2 = np.zeros_like(L2)
        iu2[nz] = 1.0 / L2[nz]
        wu2 = np.einsum("kd,kd->k", w, seg)
        u1u2 = seg @ u1
        pw = w - (wu2 * iu2)[:, None] * seg
        pu1 = u1[None, :] - (u1u2 * iu2)[:, None] * seg
        A = np.einsum("kd,kd->k", pu1, pu1)
        B = np.einsum("kd,kd->k", pw, pu1)
        C = np.einsum("kd,kd->k", pw, pw) - self.de * self.de
        valid = nz & (A > 0.0)
        disc = B * B - A * C
        valid &= disc >= 0.0
        sq = np.sqrt(np.where(valid, disc, 0.0))
        Asafe = np.where(valid, A, 1.0)
        rows = np.arange(1, self.t.n, dtype=np.float64)
        for sgn, kind, line in ((-1.0, KIND_LEFTMOST, i), (1.0, KIND_RIGHTMOST, i + 1)):
            mu = (-B + sgn * sq) / Asafe
            nu = (wu2 + mu * u1u2) * iu2
            xv = i + mu
            yv = rows + nu
            edge_empty = np.isnan(self.fsd.vlo[line - 1, :])
            hit = (
                valid
                & edge_empty
                & (xv > i + _EDGE_GUARD)
                & (xv < i + 1 - _EDGE_GUARD)
                & (yv > rows + _EDGE_GUARD)
                & (yv < rows + 1 - _EDGE_GUARD)
            )
            for k in np.nonzero(hit)[0]:
                j = int(k) + 1
                out.append(InternalCriticalPoint(float(xv[k]), float(yv[k]), (i, j), kind))
        return out

    # ---- kind 2: boundary points on external y-lines ----
    def kind2(self, i):
        out = []
        A = self.L2[i - 1]
        if A <= 0.0 or len(self.lines_y) == 0:
            return out
        u1 = self.seg[i - 1]
        rows = self.lines_row
        nu = self.lines_y - rows
        v0 = (self.xy[i - 1][None, :] - self.xy[rows - 1]) - nu[:, None] * self.seg[rows - 1]
        B = v0 @ u1
        C = np.einsum("kd,kd->k", v0, v0) - self.de * self.de
        disc = B * B - A * C
        ok = disc >= 0.0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        for sgn in (-1.0, 1.0):
            mu = (-B + sgn * sq) / A
            xv = i + mu
            hit = ok & (xv > i + _EDGE_GUARD) & (xv < i + 1 - _EDGE_GUARD)
            if sgn > 0:
                hit &= sq > 0.0  # tangent crossing already reported once
            for k in np.nonzero(hit)[0]:
                out.append(
                    InternalCriticalPoint(
                        float(xv[k]), float(self.lines_y[k]), (i, int(rows[k])), KIND_SHARES_Y
                    )
                )
        return out

    # ---- kind 4: points with a boundary partner ell to the left ----
    def kind4(self, i):
        out = []
        t, ell = self.t, self.ell
        n = t.n
        seen = set()
        for j in range(1, n):
            tgt = self.branch_samples(i, j)
            for tgt_side in (0, 1):
                xt = tgt[tgt_side]
                inside = (xt > i) & (xt < i + 1)
                if not inside.any():
                    continue
                st = self.arclen(np.where(inside, xt, np.nan))
                sp = st - ell
                val = np.isfinite(sp) & (sp >= 0.0)
                if not val.any():
                    continue
                cmin = int(math.floor(t.param_at_arclength(float(np.nanmin(np.where(val, sp, np.nan))))))
                cmax = int(math.floor(t.param_at_arclength(float(np.nanmax(np.where(val, sp, np.nan))))))
                cmin = max(1, min(cmin, n - 1))
                cmax = max(1, min(cmax, n - 1))
                for c in range(cmin, cmax + 1):
                    src = self.branch_samples(c, j)
                    for src_side in (0, 1):
                        if c == i and src_side == tgt_side:
                            continue
                        ss = self.arclen(src[src_side])
                        g = st - ss - ell
                        fin = np.isfinite(g)
                        for k in range(self.samples - 1):
                            if not (fin[k] and fin[k + 1]):
                                continue
                            if (g[k] <= 0.0) == (g[k + 1] <= 0.0):
                                continue
                            got = self._refine(i, c, j, tgt_side, src_side, self.nus[k], self.nus[k + 1])
                            if got is None:
                                continue
                            x_t, x_s, nu_star = got
                            key = (round(x_t, 9), round(nu_star, 9))
                            if key in seen:
                                continue
                            seen.add(key)
                            out.append(
                                InternalCriticalPoint(
                                    x_t, float(j + nu_star), (i, j), KIND_ELL_PAIR,
                                    partner=(x_s, float(j + nu_star)),
                                )
                            )
        return out

    def _refine(self, i, c, j, tgt_side, src_side, nu0, nu1):
        t, ell = self.t, self.ell

        def g(nu):
            x_t = self.branch_scalar(i, j, nu, tgt_side)
            x_s = self.branch_scalar(c, j, nu, src_side)
            if x_t is None or x_s is None:
                return None, None, None
            return (
                float(t.arclength_at(x_t) - t.arclength_at(x_s) - ell),
                x_t,
                x_s,
            )

        g0, _, _ = g(nu0)
        g1, _, _ = g(nu1)
        if g0 is None or g1 is None:
            return None
        for _ in range(60):
            mid = 0.5 * (nu0 + nu1)
            gm, _, _ = g(mid)
            if gm is None:
                return None
            if (gm <= 0.0) == (g0 <= 0.0):
                nu0, g0 = mid, gm
            else:
                nu1, g1 = mid, gm
        nu = 0.5 * (nu0 + nu1)
        gv, x_t, x_s = g(nu)
        if gv is None:
            return None
        if not (
            i + _EDGE_GUARD < x_t < i + 1 - _EDGE_GUARD
            and c <= x_s <= c + 1
            and _EDGE_GUARD < nu < 1.0 - _EDGE_GUARD
        ):
            return None
        if abs(gv) > 4.0 * tol(ell):
            return None
        return float(x_t), float(x_s), float(nu)


def iter_internal_critical_points(t: Trajectory, d: float, ell: float, fsd=None, samples: int = 64):
    """Yield internal critical points of F_d(T, T) in (x, y, kind) order.

    Columns are processed left to right, so at most one column's points are
    held at a time on top of the O(n^2) diagram itself.
    """
    if ell <= 0:
        raise ValueError("ell must be positive")
    if t.n < 2:
        return
    if fsd is None:
        fsd = build_continuous_fsd(t, t, d)
    scan = _InternalScan(t, d, ell, fsd, samples)
    for i in range(1, t.n):
        pts = scan.kind1(i) + scan.kind2(i) + scan.kind4(i)
        pts.sort(key=_sort_key)
        yield from pts
        # partners of later columns start at least ell arclength before them,
        # so branches left of that horizon can be dropped
        if i + 1 < t.n:
            horizon = max(t.arclength_at(float(i + 1)) - ell, 0.0)
            keep_from = int(math.floor(t.param_at_arclength(horizon)))
            for key in [k for k in scan._branch_cache if k[0] < keep_from]:
                del scan._branch_cache[key]


def enumerate_internal_critical_points(t: Trajectory, d: float, ell: float, fsd=None, samples: int = 64):
    return list(iter_internal_critical_points(t, d, ell, fsd=fsd, samples=samples))
