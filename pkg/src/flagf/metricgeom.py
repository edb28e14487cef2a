"""Invariant metrics and the connection data on SO(n)/SO(2)xSO(n-3).

The complement m splits into three blocks that no invariant metric mixes:

    m1 <-> entries (0,1), (0,2)          dim 2
    m2 <-> entries (1,j), (2,j), j >= 3  dim 2(n-3)
    m3 <-> entries (0,j), j >= 3         dim n-3

and every invariant Riemannian metric is, up to a positive factor kappa,

    g = g0|m1 + s g0|m2 + t g0|m3,   g0 = kappa Tr(X^T Y),   s, t > 0.

The symmetric part U of the connection comes either from the closed form

    U(X,Y) = (t-s)/2 ([X2,Y3] + [Y2,X3])
           + (t-1)/(2s) ([X1,Y3] + [Y1,X3])
           + (s-1)/(2t) ([X1,Y2] + [Y1,X2])

or, independently, by solving 2 g(U(X,Y), Z) = g(X,[Z,Y]_m) + g([Z,X]_m, Y)
for U in the block basis (the Gram matrix is diagonal there).  Agreement of
the two routes is one of the package's standing cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import LieElement, Subspace, bracket, ad_matrix
from .phispace import PhiSpace, flag_complement_pattern

# Relative residual above which an argument is rejected as not lying in m.
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TripleSplit:
    """The block decomposition m = m1 (+) m2 (+) m3 with precomputed brackets.

    ``combined`` carries the block-adapted orthonormal basis (m1 rows first,
    then m2, then m3); ``block_index`` maps each basis vector to its block
    (1, 2 or 3); ``bracket_m`` is the (d, d, d) tensor of the m-projections of
    basis brackets, bracket_m[i, j] = coords of [X_i, X_j]_m.
    """

    m1: Subspace
    m2: Subspace
    m3: Subspace
    combined: Subspace
    block_index: np.ndarray
    bracket_m: np.ndarray

    @property
    def dim(self) -> int:
        return self.combined.dim


@dataclass(frozen=True)
class MetricParams:
    """Characteristic numbers (s, t) plus the overall normalization kappa."""

    s: float
    t: float
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("s", "t", "kappa"):
            v = getattr(self, name)
            if not (v > 0.0) or not np.isfinite(v):
                raise ValueError(f"{name} must be a positive finite number, got {v}")

    @staticmethod
    def for_space(ps: PhiSpace, s: float, t: float, kappa: float | None = None) -> "MetricParams":
        """Default kappa = n - 1; class memberships do not depend on it."""
        return MetricParams(s=s, t=t, kappa=float(ps.spec.n - 1) if kappa is None else kappa)


def build_split(ps: PhiSpace) -> TripleSplit:
    """Read off the three blocks of m for a single-rotation-block flag space.

    Raises ValueError if the space does not have the m_blocks = 1 pattern.
    All structural invariants (dimensions, exact pairwise orthogonality,
    ad(h)-invariance of each block, and the cyclic bracket relations
    [m_i, m_{i+1}] in m_{i+2}) are verified before returning.
    """
    if ps.spec.m_blocks != 1:
        raise ValueError(
            f"splitting requires the m_blocks=1 flag space, got m_blocks={ps.spec.m_blocks}"
        )
    n = ps.spec.n
    pattern = flag_complement_pattern(n)
    if pattern.dim != ps.m.dim or not all(
        ps.m.member_residual(x) < MEMBERSHIP_TOL for x in pattern.basis
    ):
        raise ValueError("complement does not match the flag block pattern")

    d1, d2, d3 = 2, 2 * (n - 3), n - 3
    combined = pattern
    m1 = Subspace(n, pattern.coords[:d1])
    m2 = Subspace(n, pattern.coords[d1 : d1 + d2])
    m3 = Subspace(n, pattern.coords[d1 + d2 :])
    block_index = np.concatenate([np.full(d1, 1), np.full(d2, 2), np.full(d3, 3)])

    d = combined.dim
    basis = combined.basis
    bm = np.zeros((d, d, d))
    for i in range(d):
        for j in range(i + 1, d):
            c = combined.coords_of(bracket(basis[i], basis[j]))
            bm[i, j] = c
            bm[j, i] = -c

    split = TripleSplit(
        m1=m1, m2=m2, m3=m3, combined=combined, block_index=block_index, bracket_m=bm
    )
    _check_split_invariants(ps, split)
    return split


def _check_split_invariants(ps: PhiSpace, split: TripleSplit) -> None:
    n = ps.spec.n
    dims = (split.m1.dim, split.m2.dim, split.m3.dim)
    if dims != (2, 2 * (n - 3), n - 3):
        raise RuntimeError(f"unexpected block dimensions {dims}")
    # Pairwise trace-form orthogonality is exact: supports are disjoint.
    for a, b in ((split.m1, split.m2), (split.m1, split.m3), (split.m2, split.m3)):
        if a.dim and b.dim and np.max(np.abs(a.coords @ b.coords.T)) > 1e-12:
            raise RuntimeError("blocks are not orthogonal")
    # Each block is ad(h)-invariant.
    for hb in ps.h.basis:
        for blk in (split.m1, split.m2, split.m3):
            for x in blk.basis:
                if blk.member_residual(bracket(hb, x)) > MEMBERSHIP_TOL:
                    raise RuntimeError("block is not ad(h)-invariant")
    # Cyclic relations: cross-block brackets land in the third block, and
    # same-block brackets leave m entirely (they fall into h).
    bi = split.block_index
    for i in range(split.dim):
        for j in range(split.dim):
            out = split.bracket_m[i, j]
            if bi[i] == bi[j]:
                if np.max(np.abs(out)) > 1e-10:
                    raise RuntimeError("same-block bracket has a component in m")
            else:
                expect = ({1, 2, 3} - {int(bi[i]), int(bi[j])}).pop()
                if np.max(np.abs(out[bi != expect])) > 1e-10:
                    raise RuntimeError("bracket relation [m_i, m_{i+1}] in m_{i+2} fails")


def block_weights(split: TripleSplit, params: MetricParams) -> np.ndarray:
    """Diagonal of the metric Gram matrix in the block basis: kappa*(1, s, t)."""
    bi = split.block_index
    w = np.where(bi == 1, 1.0, np.where(bi == 2, params.s, params.t))
    return params.kappa * w


def _require_in_m(split: TripleSplit, *xs: LieElement) -> None:
    for x in xs:
        r = split.combined.member_residual(x)
        if r > MEMBERSHIP_TOL:
            raise ValueError(f"argument is not in the complement m (residual {r:.3e})")


def metric_eval(split: TripleSplit, params: MetricParams, x: LieElement, y: LieElement) -> float:
    """g(X, Y) = kappa (<X1,Y1> + s <X2,Y2> + t <X3,Y3>), <,> = Tr(X^T Y)."""
    _require_in_m(split, x, y)
    xv = split.combined.coords_of(x)
    yv = split.combined.coords_of(y)
    return float(np.sum(block_weights(split, params) * xv * yv))


def u_tensor_closed(split: TripleSplit, params: MetricParams, x: LieElement, y: LieElement) -> LieElement:
    """Closed-form U(X, Y); symmetric in (X, Y) and valued in m."""
    _require_in_m(split, x, y)
    s, t = params.s, params.t
    x1, x2, x3 = split.m1.project(x), split.m2.project(x), split.m3.project(x)
    y1, y2, y3 = split.m1.project(y), split.m2.project(y), split.m3.project(y)
    out = 0.5 * (t - s) * (bracket(x2, y3) + bracket(y2, x3))
    out = out + ((t - 1.0) / (2.0 * s)) * (bracket(x1, y3) + bracket(y1, x3))
    out = out + ((s - 1.0) / (2.0 * t)) * (bracket(x1, y2) + bracket(y1, x2))
    return out


def u_tensor_solved(split: TripleSplit, params: MetricParams, x: LieElement, y: LieElement) -> LieElement:
    """U(X, Y) recovered from 2 g(U, Z) = g(X,[Z,Y]_m) + g([Z,X]_m, Y).

    The block basis diagonalizes g, so the solve is a componentwise rescale.
    This is the independent oracle for :func:`u_tensor_closed`.
    """
    _require_in_m(split, x, y)
    gd = block_weights(split, params)
    xv = split.combined.coords_of(x)
    yv = split.combined.coords_of(y)
    bm = split.bracket_m
    rhs = np.einsum("zjr,j,r->z", bm, yv, gd * xv) + np.einsum("zir,i,r->z", bm, xv, gd * yv)
    return split.combined.lift(rhs / (2.0 * gd))


def u_coords_tensor(split: TripleSplit, params: MetricParams, mode: str = "closed") -> np.ndarray:
    """U on all basis pairs as a (d, d, d) coordinate tensor.

    mode "closed" scales the bracket tensor by the block-pair coefficients of
    the closed form; mode "solved" runs the metric-equation solve.  The two
    agree to rounding for all valid parameters.
    """
    bm = split.bracket_m
    if mode == "closed":
        return u_weight_matrix(split, params)[:, :, None] * bm
    if mode == "solved":
        gd = block_weights(split, params)
        term1 = gd[:, None, None] * bm.transpose(2, 1, 0)
        term2 = gd[None, :, None] * bm.transpose(1, 2, 0)
        return (term1 + term2) / (2.0 * gd[None, None, :])
    raise ValueError(f"unknown U mode {mode!r}")


def u_weight_matrix(split: TripleSplit, params: MetricParams) -> np.ndarray:
    """Pair coefficients: U(X_i, X_j) = w[i, j] [X_i, X_j] on the block basis."""
    s, t = params.s, params.t
    c = {
        (2, 3): 0.5 * (t - s),
        (1, 3): (t - 1.0) / (2.0 * s),
        (1, 2): (s - 1.0) / (2.0 * t),
    }
    bi = split.block_index
    w = np.zeros((split.dim, split.dim))
    for (a, b), coeff in c.items():
        w[np.ix_(bi == a, bi == b)] = coeff
        w[np.ix_(bi == b, bi == a)] = -coeff
    return w


def nomizu(
    split: TripleSplit,
    params: MetricParams,
    x: LieElement,
    y: LieElement,
    u_mode: str = "closed",
) -> LieElement:
    """Connection bilinear map alpha(X, Y) = (1/2)[X, Y]_m + U(X, Y)."""
    u_fn = u_tensor_closed if u_mode == "closed" else u_tensor_solved
    return 0.5 * split.combined.project(bracket(x, y)) + u_fn(split, params, x, y)


def naturally_reductive_residual(split: TripleSplit, params: MetricParams) -> float:
    """Max violation of g([X,Y]_m, Z) = g(X, [Y,Z]_m) over basis triples,
    normalized by kappa."""
    gd = block_weights(split, params)
    bm = split.bracket_m
    lhs = bm * gd[None, None, :]
    rhs = np.einsum("i,jki->ijk", gd, bm)
    return float(np.max(np.abs(lhs - rhs)) / params.kappa)


def check_naturally_reductive(split: TripleSplit, params: MetricParams, tol: float = 1e-9) -> bool:
    return naturally_reductive_residual(split, params) < tol


def ad_h_block_matrices(ps: PhiSpace, split: TripleSplit) -> list[np.ndarray]:
    """ad(h) on the combined block basis, one matrix per h basis element."""
    return [ad_matrix(hb, split.combined) for hb in ps.h.basis]
