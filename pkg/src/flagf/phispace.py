"""Finite-order inner automorphisms of SO(n) and the induced tangent setup.

An automorphism is conjugation by an orthogonal block matrix

    B = diag{1, eps_1, ..., eps_m, -1, ..., -1},

where eps_t is the 2x2 rotation by 2*pi*t/k.  The induced map phi = Ad(B) on
so(n) has fixed-point subalgebra h = ker(phi - id) and canonical complement
m = image(phi - id); theta is phi restricted to m.  These are the data on
which canonical structures and invariant metrics are built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import (
    TAU_NUM,
    EndoOnM,
    Subspace,
    basis_element,
    bracket,
    image,
    lex_pairs,
    nullspace,
    so_dim,
)

_ORDER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class AutomorphismSpec:
    """Conjugation data: the orthogonal matrix B and its intended order k."""

    n: int
    m_blocks: int
    k: int
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if b.shape != (self.n, self.n):
            raise ValueError(f"B must be {self.n}x{self.n}, got {b.shape}")
        if np.max(np.abs(b @ b.T - np.eye(self.n))) > 1e-10:
            raise ValueError("B must be orthogonal")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "b", b)


@dataclass(frozen=True, eq=False)
class PhiSpace:
    """A reductive homogeneous setup on so(n) derived from an automorphism.

    Attributes
    ----------
    spec : AutomorphismSpec
    phi : EndoOnM
        Ad(B) on all of so(n), X -> B X B^-1.
    h : Subspace
        Fixed-point subalgebra ker(phi - id).
    m : Subspace
        Canonical complement image(phi - id).
    theta : EndoOnM
        Restriction of phi to m.
    """

    spec: AutomorphismSpec
    phi: EndoOnM
    h: Subspace
    m: Subspace
    theta: EndoOnM


@dataclass(frozen=True)
class RegularityReport:
    """Results of the equivalent decomposition checks for a PhiSpace.

    All four flags must agree; ``agree`` is False only on an internal
    consistency failure, never for a well-formed space.
    """

    direct_sum: bool
    nonsingular_on_image: bool
    kernel_square_stable: bool
    theta_no_fixed_vector: bool

    @property
    def agree(self) -> bool:
        flags = (
            self.direct_sum,
            self.nonsingular_on_image,
            self.kernel_square_stable,
            self.theta_no_fixed_vector,
        )
        return len(set(flags)) == 1

    @property
    def all_pass(self) -> bool:
        return self.agree and self.direct_sum


def rotation_block(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def build_automorphism(n: int, m_blocks: int = 1, k: int = 4) -> AutomorphismSpec:
    """Construct B = diag{1, eps_1, ..., eps_m, -1, ..., -1} of order k.

    Requires n >= 4, k even and > 2, k >= 2*m_blocks - 2, and enough rows for
    the blocks (n - 2*m_blocks - 1 >= 0).  Conjugation by B is verified to
    have order exactly k as an operator on so(n); a degenerate parameter
    combination that collapses the order is rejected.
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got n={n}")
    if m_blocks < 1:
        raise ValueError(f"need m_blocks >= 1, got {m_blocks}")
    if k % 2 != 0:
        raise ValueError(f"k must be even, got k={k}")
    if k <= 2:
        raise ValueError(f"k must exceed 2, got k={k}")
    if k < 2 * m_blocks - 2:
        raise ValueError(f"need k >= 2*m_blocks - 2, got k={k}, m_blocks={m_blocks}")
    if n - 2 * m_blocks - 1 < 0:
        raise ValueError(f"need n - 2*m_blocks - 1 >= 0, got n={n}, m_blocks={m_blocks}")

    b = np.zeros((n, n))
    b[0, 0] = 1.0
    for t in range(1, m_blocks + 1):
        r = 2 * t - 1
        b[r : r + 2, r : r + 2] = rotation_block(2.0 * np.pi * t / k)
    for r in range(2 * m_blocks + 1, n):
        b[r, r] = -1.0

    spec = AutomorphismSpec(n=n, m_blocks=m_blocks, k=k, b=b)
    order = _conjugation_order(spec, cap=k)
    if order != k:
        raise ValueError(
            f"conjugation by B has order {order}, not {k} "
            f"(degenerate parameters n={n}, m_blocks={m_blocks}, k={k})"
        )
    return spec


def phi_matrix(spec: AutomorphismSpec) -> np.ndarray:
    """Matrix of X -> B X B^-1 over the lexicographic orthonormal so(n) basis."""
    n, b = spec.n, spec.b
    iu = np.triu_indices(n, k=1)
    cols = []
    for i, j in lex_pairs(n):
        conj = b @ basis_element(n, i, j).mat @ b.T
        cols.append(np.sqrt(2.0) * conj[iu])
    return np.array(cols).T


def _conjugation_order(spec: AutomorphismSpec, cap: int) -> int | None:
    p = phi_matrix(spec)
    dg = p.shape[0]
    acc = np.eye(dg)
    for j in range(1, cap + 1):
        acc = p @ acc
        if np.max(np.abs(acc - np.eye(dg))) < _ORDER_TOL:
            return j
    return None


def build_phi_space(spec: AutomorphismSpec) -> PhiSpace:
    """Compute phi, the fixed subalgebra, the canonical complement and theta.

    For the single-rotation-block flag spaces the complement basis is chosen
    block-adapted (rows (0,1), (0,2); then (1,j), (2,j); then (0,j), j >= 3),
    which keeps downstream metric computations exact.  Otherwise an SVD basis
    of image(phi - id) is used.
    """
    n = spec.n
    full = Subspace.full(n)
    phi = EndoOnM(full, phi_matrix(spec))
    a = phi - EndoOnM.identity(full)
    h = nullspace(a)
    m = image(a)

    if spec.m_blocks == 1 and n >= 4:
        pattern = flag_complement_pattern(n)
        if pattern.dim == m.dim and all(
            m.member_residual(x) < TAU_NUM for x in pattern.basis
        ):
            m = pattern

    theta = EndoOnM(m, m.coords @ phi.matrix @ m.coords.T)
    _check_phi_space_invariants(spec, phi, h, m, theta)
    return PhiSpace(spec=spec, phi=phi, h=h, m=m, theta=theta)


def flag_complement_pattern(n: int) -> Subspace:
    """Block-adapted complement for SO(n)/SO(2)xSO(n-3): coordinates (0,1),
    (0,2); (1,j), (2,j); (0,j), for j >= 3."""
    pairs = lex_pairs(n)
    order = [(0, 1), (0, 2)]
    order += [(1, j) for j in range(3, n)]
    order += [(2, j) for j in range(3, n)]
    order += [(0, j) for j in range(3, n)]
    rows = np.zeros((len(order), so_dim(n)))
    for r, p in enumerate(order):
        rows[r, pairs.index(p)] = 1.0
    return Subspace(n, rows)


def _check_phi_space_invariants(spec, phi, h, m, theta) -> None:
    dg = so_dim(spec.n)
    if h.dim + m.dim != dg:
        raise RuntimeError(f"dim h + dim m = {h.dim}+{m.dim} != {dg}")
    # Reductivity: [h, m] stays in m.
    for hb in h.basis:
        for mb in m.basis:
            if m.member_residual(bracket(hb, mb)) > TAU_NUM:
                raise RuntimeError("reductivity failure: [h, m] leaves m")
    if m.dim:
        sv = np.linalg.svd(theta.matrix - np.eye(m.dim), compute_uv=False)
        if sv[-1] < 1e-6:
            raise RuntimeError("theta has a fixed vector")
        tk = np.linalg.matrix_power(theta.matrix, spec.k)
        if np.max(np.abs(tk - np.eye(m.dim))) > 10 * TAU_NUM:
            raise RuntimeError("theta^k is not the identity")


def check_regularity(ps: PhiSpace) -> RegularityReport:
    """Evaluate the equivalent decomposition conditions on a PhiSpace.

    Checks: so(n) = h (+) image(A) as an orthogonal direct sum; A restricted
    to its image is nonsingular; ker A^2 = ker A; and theta has no fixed
    vector.  The four answers agree on every well-formed space.
    """
    full = Subspace.full(ps.spec.n)
    a = ps.phi - EndoOnM.identity(full)
    dg = so_dim(ps.spec.n)

    dims_ok = ps.h.dim + ps.m.dim == dg
    cross = ps.h.coords @ ps.m.coords.T if ps.h.dim and ps.m.dim else np.zeros((1, 1))
    direct_sum = bool(dims_ok and np.max(np.abs(cross)) < TAU_NUM)

    if ps.m.dim:
        a_on_image = ps.m.coords @ a.matrix @ ps.m.coords.T
        sv = np.linalg.svd(a_on_image, compute_uv=False)
        nonsingular = bool(sv[-1] > 1e-6)
    else:
        nonsingular = True

    ker_a = nullspace(a)
    ker_a2 = nullspace(a @ a)
    kernel_stable = ker_a.dim == ker_a2.dim

    if ps.m.dim:
        sv_theta = np.linalg.svd(ps.theta.matrix - np.eye(ps.m.dim), compute_uv=False)
        no_fixed = bool(sv_theta[-1] > 1e-6)
    else:
        no_fixed = True

    return RegularityReport(
        direct_sum=direct_sum,
        nonsingular_on_image=nonsingular,
        kernel_square_stable=kernel_stable,
        theta_no_fixed_vector=no_fixed,
    )


def fixed_subalgebra_dim(n: int, m_blocks: int) -> int:
    """Expected dim of h away from degenerate rotation angles:
    m_blocks + dim so(n - 2*m_blocks - 1)."""
    r = n - 2 * m_blocks - 1
    return m_blocks + r * (r - 1) // 2
