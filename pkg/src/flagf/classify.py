"""Membership of metric f-structures in the Killing / nearly-Kaehler / G1 classes.

For a metric f-structure f on the flag space, with alpha the connection
bilinear map and U its symmetric part, membership in each class is equivalent
to the identical vanishing of a quadratic map on m:

    kill : (1/2)[X, fX]_m   + U(X, fX)      - f(U(X, X))
    nk   : (1/2)[fX, f^2X]_m + U(fX, f^2X)  - f(U(fX, fX))
    g1   : f( 2 U(fX, f^2X) - f(U(fX, fX)) + f(U(f^2X, f^2X)) )

Each map is tested by full polarization: the bilinear extension C(X, Y) is
evaluated on all ordered basis pairs and the quadratic map vanishes
identically iff C(X, Y) + C(Y, X) does.  Residuals are normalized by the
operator norm of f and by (1 + s + t + 1/s + 1/t), so grid sweeps stay
comparable as the U coefficients grow near the parameter boundary.

Membership is declared below 1e-9, non-membership above 1e-3; the band in
between is flagged indeterminate (never observed on this family).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalStructure
from .metricgeom import MetricParams, TripleSplit, block_weights, u_coords_tensor

CONDITION_NAMES = ("kill", "nk", "g1")

TAU_MEMBER = 1e-9
NONMEMBER_MARGIN = 1e-3

# Closed-form U splits into three bracket channels with parameter-dependent
# coefficients; the conditions are affine in U, which lets an evaluator
# precompute one tensor per channel and per condition.
_CHANNELS = ((2, 3), (1, 3), (1, 2))


def _channel_coefficients(params: MetricParams) -> np.ndarray:
    s, t = params.s, params.t
    return np.array([0.5 * (t - s), (t - 1.0) / (2.0 * s), (s - 1.0) / (2.0 * t)])


def _channel_masks(block_index: np.ndarray) -> list[np.ndarray]:
    masks = []
    for a, b in _CHANNELS:
        m = np.zeros((block_index.size, block_index.size))
        m[np.ix_(block_index == a, block_index == b)] = 1.0
        m[np.ix_(block_index == b, block_index == a)] = -1.0
        masks.append(m)
    return masks


def _condition_tensor(name: str, f: np.ndarray, f2: np.ndarray, bm: np.ndarray, u: np.ndarray) -> np.ndarray:
    """C[i, j, :] for the named condition, given the U tensor to use."""
    if name == "kill":
        return (
            0.5 * np.einsum("bj,ibr->ijr", f, bm, optimize=True)
            + np.einsum("bj,ibr->ijr", f, u, optimize=True)
            - np.einsum("rb,ijb->ijr", f, u, optimize=True)
        )
    if name == "nk":
        return (
            0.5 * np.einsum("ai,bj,abr->ijr", f, f2, bm, optimize=True)
            + np.einsum("ai,bj,abr->ijr", f, f2, u, optimize=True)
            - np.einsum("rc,ai,bj,abc->ijr", f, f, f, u, optimize=True)
        )
    if name == "g1":
        inner = (
            2.0 * np.einsum("ai,bj,abr->ijr", f, f2, u, optimize=True)
            - np.einsum("rc,ai,bj,abc->ijr", f, f, f, u, optimize=True)
            + np.einsum("rc,ai,bj,abc->ijr", f, f2, f2, u, optimize=True)
        )
        return np.einsum("rs,ijs->ijr", f, inner, optimize=True)
    raise ValueError(f"unknown condition {name!r}")


@dataclass(frozen=True)
class MembershipResult:
    condition: str
    residual: float
    member: bool
    indeterminate: bool
    witness: tuple[int, int] | None


@dataclass(frozen=True)
class ClassReport:
    """Class residuals and verdicts for one structure at one (s, t)."""

    structure_label: str
    s: float
    t: float
    residuals: dict[str, float]
    memberships: dict[str, bool]
    indeterminate: dict[str, bool]
    witnesses: dict[str, tuple[int, int] | None]

    @property
    def chain_ok(self) -> bool:
        m = self.memberships
        return (not m["kill"] or m["nk"]) and (not m["nk"] or m["g1"])


class ClassEvaluator:
    """Evaluates the three class conditions for one structure on one split.

    With u_mode "closed" the parameter dependence is reduced to three scalar
    channel coefficients, so each grid point costs a few tensor adds.  With
    u_mode "solved" the U tensor is recomputed from the metric equation at
    every call; this is the slow independent route used for cross-checks.
    """

    def __init__(self, f: CanonicalStructure, split: TripleSplit, u_mode: str = "closed"):
        if u_mode not in ("closed", "solved"):
            raise ValueError(f"unknown U mode {u_mode!r}")
        self.structure = f
        self.split = split
        self.u_mode = u_mode
        self.f_matrix = f.op.matrix_on(split.combined)
        self._f2 = self.f_matrix @ self.f_matrix
        self.f_norm = float(np.linalg.norm(self.f_matrix, 2)) or 1.0
        if u_mode == "closed":
            bm = split.bracket_m
            masks = _channel_masks(split.block_index)
            self._kernels = {}
            for name in CONDITION_NAMES:
                base = _condition_tensor(name, self.f_matrix, self._f2, bm, np.zeros_like(bm))
                chans = [
                    _condition_tensor(name, self.f_matrix, self._f2, bm, mask[:, :, None] * bm) - base
                    for mask in masks
                ]
                self._kernels[name] = (base, chans)

    def condition_tensor(self, name: str, params: MetricParams) -> np.ndarray:
        if name not in CONDITION_NAMES:
            raise ValueError(f"unknown condition {name!r}")
        if self.u_mode == "closed":
            base, chans = self._kernels[name]
            coeffs = _channel_coefficients(params)
            out = base.copy()
            for c, ch in zip(coeffs, chans):
                if c != 0.0:
                    out += c * ch
            return out
        u = u_coords_tensor(self.split, params, mode="solved")
        return _condition_tensor(name, self.f_matrix, self._f2, self.split.bracket_m, u)

    def residual(self, name: str, params: MetricParams) -> tuple[float, tuple[int, int]]:
        """Normalized polarized residual and the basis pair achieving it."""
        c = self.condition_tensor(name, params)
        sym = c + c.transpose(1, 0, 2)
        norms = np.linalg.norm(sym, axis=2)
        i, j = np.unravel_index(int(np.argmax(norms)), norms.shape)
        scale = 1.0 + params.s + params.t + 1.0 / params.s + 1.0 / params.t
        return float(norms[i, j] / (self.f_norm * scale)), (int(i), int(j))

    def membership(self, name: str, params: MetricParams) -> MembershipResult:
        res, pair = self.residual(name, params)
        member = res < TAU_MEMBER
        indeterminate = (not member) and res <= NONMEMBER_MARGIN
        return MembershipResult(
            condition=name,
            residual=res,
            member=member,
            indeterminate=indeterminate,
            witness=None if member else pair,
        )

    def report(self, params: MetricParams) -> ClassReport:
        results = {name: self.membership(name, params) for name in CONDITION_NAMES}
        return ClassReport(
            structure_label=self.structure.label,
            s=params.s,
            t=params.t,
            residuals={k: r.residual for k, r in results.items()},
            memberships={k: r.member for k, r in results.items()},
            indeterminate={k: r.indeterminate for k, r in results.items()},
            witnesses={k: r.witness for k, r in results.items()},
        )


def membership(
    f: CanonicalStructure,
    split: TripleSplit,
    params: MetricParams,
    condition: str,
    u_mode: str = "closed",
) -> MembershipResult:
    return ClassEvaluator(f, split, u_mode=u_mode).membership(condition, params)


def metric_compat_residual(f: CanonicalStructure, split: TripleSplit, params: MetricParams) -> float:
    """Max |g(fX, Y) + g(X, fY)| over basis pairs, normalized by kappa."""
    fm = f.op.matrix_on(split.combined)
    gd = block_weights(split, params)
    lhs = fm.T * gd[None, :]  # lhs[i, j] = g(f X_i, X_j) = gd_j F[j, i]
    rhs = gd[:, None] * fm  # rhs[i, j] = g(X_i, f X_j) = gd_i F[i, j]
    return float(np.max(np.abs(lhs + rhs)) / params.kappa)


def check_metric_compat(
    f: CanonicalStructure, split: TripleSplit, params: MetricParams, tol: float = 1e-10
) -> bool:
    """True iff f is skew-adjoint for g(s, t) on all basis pairs."""
    return metric_compat_residual(f, split, params) < tol


def product_compat_residual(p: CanonicalStructure, split: TripleSplit, params: MetricParams) -> float:
    """Max |g(PX, PY) - g(X, Y)| over basis pairs, normalized by kappa
    (the compatibility notion appropriate for almost product structures)."""
    pm = p.op.matrix_on(split.combined)
    g = np.diag(block_weights(split, params))
    return float(np.max(np.abs(pm.T @ g @ pm - g)) / params.kappa)


def build_grid(
    gmin: float = 0.25,
    gmax: float = 3.0,
    step: float = 0.25,
    extras: tuple[tuple[float, float], ...] = ((1.0, 1.0), (1.0, 4.0 / 3.0)),
) -> list[tuple[float, float]]:
    """Row-major (s, t) grid with the special points appended (deduplicated)."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    if gmin <= 0:
        raise ValueError("grid values must be positive")
    count = int(np.floor((gmax - gmin) / step + 1e-9)) + 1
    vals = [gmin + i * step for i in range(count)]
    pts = [(s, t) for s in vals for t in vals]
    for p in extras:
        if p not in pts:
            pts.append((float(p[0]), float(p[1])))
    return pts


def default_grid() -> list[tuple[float, float]]:
    return build_grid()


def sweep(
    f: CanonicalStructure,
    split: TripleSplit,
    grid,
    kappa: float = 1.0,
    u_mode: str = "closed",
) -> list[ClassReport]:
    """One ClassReport per grid point, in grid order."""
    for s, t in grid:
        if not (s > 0 and t > 0):
            raise ValueError(f"grid points must be positive, got ({s}, {t})")
    ev = ClassEvaluator(f, split, u_mode=u_mode)
    return [ev.report(MetricParams(s=s, t=t, kappa=kappa)) for s, t in grid]


@dataclass(frozen=True)
class CharacteristicSet:
    """Detected zero set of a class condition over the (s, t) quadrant.

    kind is "all", "empty", "line" or "points"; lines are (axis, value) with
    axis "s" or "t"; points carry refined coordinates.  Topology the detector
    cannot name cleanly falls back to the raw point list.
    """

    kind: str
    points: tuple[tuple[float, float], ...] = ()
    lines: tuple[tuple[str, float], ...] = ()

    def description(self) -> str:
        if self.kind == "all":
            return "all (s, t)"
        if self.kind == "empty":
            return "empty"
        parts = [f"line {axis}={value:.6f}" for axis, value in self.lines]
        parts += [f"({s:.6f}, {t:.6f})" for s, t in self.points]
        return "; ".join(parts)


def characteristic_set(
    f: CanonicalStructure,
    split: TripleSplit,
    condition: str,
    tol: float = 1e-6,
    grid=None,
    kappa: float = 1.0,
    u_mode: str = "closed",
) -> CharacteristicSet:
    """Locate the zero set of the condition residual by grid scan plus 1-D
    refinement along grid lines.

    Full-member grid lines are reported as lines; residual dips along lines
    are refined by ternary search to ``tol`` and kept when the refined
    residual clears the membership threshold.  Many refined points sharing a
    coordinate are consolidated into a line.
    """
    ev = ClassEvaluator(f, split, u_mode=u_mode)
    grid = list(default_grid() if grid is None else grid)

    def res_at(s: float, t: float) -> float:
        return ev.residual(condition, MetricParams(s=s, t=t, kappa=kappa))[0]

    values = {(s, t): res_at(s, t) for s, t in grid}
    member = {p for p, r in values.items() if r < TAU_MEMBER}
    if len(member) == len(values):
        return CharacteristicSet(kind="all")

    svals = sorted({p[0] for p in grid})
    tvals = sorted({p[1] for p in grid})

    lines: list[tuple[str, float]] = []
    min_cover = max(4, int(0.8 * min(len(svals), len(tvals))))
    for s0 in svals:
        ts = [t for t in tvals if (s0, t) in values]
        if len(ts) >= min_cover and all((s0, t) in member for t in ts):
            lines.append(("s", s0))
    for t0 in tvals:
        ss = [s for s in svals if (s, t0) in values]
        if len(ss) >= min_cover and all((s, t0) in member for s in ss):
            lines.append(("t", t0))

    def on_line(s: float, t: float) -> bool:
        return any(
            (axis == "s" and abs(s - v) < 10 * tol) or (axis == "t" and abs(t - v) < 10 * tol)
            for axis, v in lines
        )

    # Refine residual dips along every sufficiently covered grid line.
    candidates: list[tuple[float, float]] = []
    for s0 in svals:
        ts = [t for t in tvals if (s0, t) in values]
        if len(ts) < 4:
            continue
        prof = [values[(s0, t)] for t in ts]
        for i in range(1, len(ts) - 1):
            if prof[i] <= prof[i - 1] and prof[i] <= prof[i + 1]:
                t_star = _ternary_min(lambda t: res_at(s0, t), ts[i - 1], ts[i + 1], tol)
                candidates.append((s0, t_star))
    for t0 in tvals:
        ss = [s for s in svals if (s, t0) in values]
        if len(ss) < 4:
            continue
        prof = [values[(s, t0)] for s in ss]
        for i in range(1, len(ss) - 1):
            if prof[i] <= prof[i - 1] and prof[i] <= prof[i + 1]:
                s_star = _ternary_min(lambda s: res_at(s, t0), ss[i - 1], ss[i + 1], tol)
                candidates.append((s_star, t0))
    candidates.extend(member)

    # Polish each candidate coordinatewise and keep true zeros off the lines.
    ds = (svals[1] - svals[0]) if len(svals) > 1 else 0.25
    dt = (tvals[1] - tvals[0]) if len(tvals) > 1 else 0.25
    points: list[tuple[float, float]] = []
    for s0, t0 in candidates:
        if on_line(s0, t0):
            continue
        t1 = _ternary_min(lambda t: res_at(s0, t), max(t0 - dt, tvals[0] / 2), t0 + dt, tol)
        s1 = _ternary_min(lambda s: res_at(s, t1), max(s0 - ds, svals[0] / 2), s0 + ds, tol)
        if res_at(s1, t1) < TAU_MEMBER:
            if not any(abs(s1 - ps) < 10 * tol and abs(t1 - pt) < 10 * tol for ps, pt in points):
                points.append((s1, t1))

    # Consolidate point families sharing a coordinate into a line.
    points, lines = _promote_collinear(points, lines, min_count=min_cover, tol=tol)

    if not lines and not points:
        return CharacteristicSet(kind="empty")
    if lines and not points:
        return CharacteristicSet(kind="line", lines=tuple(lines))
    return CharacteristicSet(kind="points", points=tuple(sorted(points)), lines=tuple(lines))


def _ternary_min(fn, lo: float, hi: float, tol: float) -> float:
    # Push well below the requested coordinate tolerance so that a true zero
    # of a V-shaped residual lands under the membership threshold.
    width = max(1e-11, 1e-4 * tol)
    for _ in range(400):
        if hi - lo < width:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _promote_collinear(points, lines, min_count: int, tol: float):
    remaining = list(points)
    lines = list(lines)
    for axis, idx in (("s", 0), ("t", 1)):
        groups: dict[float, list[tuple[float, float]]] = {}
        for p in remaining:
            key = round(p[idx] / (10 * tol)) * (10 * tol)
            groups.setdefault(key, []).append(p)
        for _, grp in sorted(groups.items()):
            if len(grp) >= min_count:
                value = float(np.median([p[idx] for p in grp]))
                lines.append((axis, value))
                remaining = [p for p in remaining if p not in grp]
    return remaining, lines
