import numpy as np
import pytest

import flagf
from flagf.canonical import structure_by_label
from flagf.classify import (
    CONDITION_NAMES,
    ClassEvaluator,
    build_grid,
    characteristic_set,
    check_metric_compat,
    default_grid,
    membership,
    metric_compat_residual,
    product_compat_residual,
    sweep,
)
from flagf.metricgeom import MetricParams

FOUR_THIRDS = 4.0 / 3.0


class TestMetricCompatibility:
    def test_all_f_structures_compatible_any_metric(self, get_split, get_f_structures, rng):
        for n, k in [(5, 4), (6, 6)]:
            split = get_split(n, k)
            for _ in range(10):
                s, t = rng.uniform(0.1, 5.0, size=2)
                p = MetricParams(float(s), float(t), kappa=float(n - 1))
                for cs in get_f_structures(n, k):
                    assert metric_compat_residual(cs, split, p) < 1e-10
                    assert check_metric_compat(cs, split, p)

    def test_product_structures_preserve_metric(self, get_split, get_products, rng):
        split = get_split(5, 6)
        for _ in range(5):
            s, t = rng.uniform(0.2, 4.0, size=2)
            p = MetricParams(float(s), float(t))
            for cs in get_products(5, 6):
                assert product_compat_residual(cs, split, p) < 1e-10

    def test_product_structure_fails_f_compatibility(self, get_space, get_split, get_products):
        # P3 is symmetric, not skew-adjoint, for g; treating it as an
        # f-structure must be reported honestly while the product-style
        # compatibility g(PX, PY) = g(X, Y) holds.
        split = get_split(5, 6)
        p3 = structure_by_label(get_products(5, 6), "P3")
        p = MetricParams(1.5, 0.8)
        assert metric_compat_residual(p3, split, p) > 1e-3
        assert product_compat_residual(p3, split, p) < 1e-10

    def test_theta_fails_skew_adjointness_generically(self, get_space, get_split):
        # theta itself is not skew-adjoint for generic (s, t), so the check
        # must report that honestly.
        ps = get_space(5, 6)
        split = get_split(5, 6)
        fake = flagf.CanonicalStructure(
            kind="f-structure", label="theta", signature=(),
            theta_polynomial=(0.0, 1.0, 0.0, 0.0, 0.0, 0.0), op=ps.theta,
        )
        assert metric_compat_residual(fake, split, MetricParams(2.0, 0.5)) > 1e-3


class TestOrderFourMemberships:
    """The order-4 structure f0: Killing only at (1, 4/3), nearly Kaehler on
    the line s = 1, G1 for every metric."""

    def test_kill_member_at_special_point(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        res = membership(f0, split, MetricParams(1.0, FOUR_THIRDS, kappa=4.0), "kill")
        assert res.member and res.witness is None

    def test_kill_non_member_at_neutral_params(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        res = membership(f0, split, MetricParams(1.0, 1.0, kappa=4.0), "kill")
        assert not res.member
        assert res.residual > 1e-3
        assert res.witness is not None

    def test_nk_member_at_neutral_params(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        assert membership(f0, split, MetricParams(1.0, 1.0), "nk").member

    @pytest.mark.parametrize("t", [0.3, 1.0, FOUR_THIRDS, 2.5])
    def test_nk_along_the_line(self, get_split, get_f_structures, t):
        split = get_split(6, 4)
        f0 = structure_by_label(get_f_structures(6, 4), "f0")
        assert membership(f0, split, MetricParams(1.0, t), "nk").member
        for s in (0.5, 2.0):
            res = membership(f0, split, MetricParams(s, t), "nk")
            assert not res.member and res.residual > 1e-3

    def test_g1_member_anywhere(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        assert membership(f0, split, MetricParams(2.0, 0.7), "g1").member


@pytest.fixture
def setup(get_split, get_f_structures):
    split = get_split(5, 6)
    fs = get_f_structures(5, 6)
    return split, {lbl: structure_by_label(fs, lbl) for lbl in ("f1", "f2", "f3", "f4")}


class TestOrderSixMemberships:
    """Order 6: f1 behaves like f0; f2, f3 are nearly Kaehler everywhere;
    f4 never is; everything is G1."""

    def test_f1_kill_only_at_special_point(self, setup):
        split, fs = setup
        assert membership(fs["f1"], split, MetricParams(1.0, FOUR_THIRDS), "kill").member
        for s, t in [(1.0, 1.0), (1.0, 2.0), (2.0, FOUR_THIRDS), (0.5, 0.5)]:
            res = membership(fs["f1"], split, MetricParams(s, t), "kill")
            assert not res.member and res.residual > 1e-3

    def test_f2_f3_nk_everywhere(self, setup, rng):
        split, fs = setup
        for _ in range(10):
            s, t = rng.uniform(0.1, 5.0, size=2)
            for lbl in ("f2", "f3"):
                assert membership(fs[lbl], split, MetricParams(float(s), float(t)), "nk").member

    def test_f4_never_nk(self, setup, rng):
        split, fs = setup
        for _ in range(10):
            s, t = rng.uniform(0.1, 5.0, size=2)
            res = membership(fs["f4"], split, MetricParams(float(s), float(t)), "nk")
            assert not res.member and res.residual > 1e-3

    def test_f2_f3_f4_never_kill(self, setup):
        split, fs = setup
        grid = build_grid(0.5, 2.5, 0.5)
        for lbl in ("f2", "f3", "f4"):
            for s, t in grid:
                res = membership(fs[lbl], split, MetricParams(s, t), "kill")
                assert not res.member and res.residual > 1e-3, (lbl, s, t)

    def test_all_g1_everywhere(self, setup, rng):
        split, fs = setup
        for _ in range(5):
            s, t = rng.uniform(0.1, 5.0, size=2)
            for cs in fs.values():
                res = membership(cs, split, MetricParams(float(s), float(t)), "g1")
                assert res.member, (cs.label, res.residual)


class TestEvaluatorInternals:
    def test_closed_kernels_match_direct_evaluation(self, get_split, get_f_structures):
        # The channel-decomposed fast path must agree with assembling the
        # condition tensor from the explicit U tensor.
        from flagf.classify import _condition_tensor
        from flagf.metricgeom import u_coords_tensor

        split = get_split(5, 6)
        f1 = structure_by_label(get_f_structures(5, 6), "f1")
        ev = ClassEvaluator(f1, split, u_mode="closed")
        p = MetricParams(1.7, 0.45, kappa=2.0)
        u = u_coords_tensor(split, p, "closed")
        for name in CONDITION_NAMES:
            direct = _condition_tensor(name, ev.f_matrix, ev.f_matrix @ ev.f_matrix, split.bracket_m, u)
            np.testing.assert_allclose(ev.condition_tensor(name, p), direct, atol=1e-12)

    def test_closed_vs_solved_residuals_agree(self, get_split, get_f_structures):
        split = get_split(5, 6)
        for lbl in ("f1", "f4"):
            cs = structure_by_label(get_f_structures(5, 6), lbl)
            ev_c = ClassEvaluator(cs, split, u_mode="closed")
            ev_s = ClassEvaluator(cs, split, u_mode="solved")
            for s, t in [(1.0, FOUR_THIRDS), (0.25, 3.0), (2.0, 2.0)]:
                p = MetricParams(s, t)
                for name in CONDITION_NAMES:
                    rc, _ = ev_c.residual(name, p)
                    rs, _ = ev_s.residual(name, p)
                    assert abs(rc - rs) < 1e-8
                    assert ev_c.membership(name, p).member == ev_s.membership(name, p).member

    def test_membership_kappa_invariant(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        for s, t in [(1.0, FOUR_THIRDS), (0.5, 2.0), (1.0, 1.0)]:
            a = membership(f0, split, MetricParams(s, t, kappa=1.0), "kill")
            b = membership(f0, split, MetricParams(s, t, kappa=2.0), "kill")
            assert a.member == b.member
            assert abs(a.residual - b.residual) < 1e-12

    def test_polarization_bounds_quadratic_residual(self, get_split, get_f_structures, rng):
        # |C(X, X)| is controlled by the max symmetrized pair value: spot
        # check that a vanishing polarized residual forces the quadratic map
        # to vanish on arbitrary vectors.
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        ev = ClassEvaluator(f0, split)
        for s, t, name in [(1.0, FOUR_THIRDS, "kill"), (1.0, 0.7, "nk"), (2.2, 0.4, "g1")]:
            p = MetricParams(s, t)
            c = ev.condition_tensor(name, p)
            sym = c + c.transpose(1, 0, 2)
            pair_max = np.max(np.linalg.norm(sym, axis=2))
            for _ in range(100):
                x = rng.standard_normal(split.dim)
                quad = np.einsum("ijr,i,j->r", c, x, x)
                bound = 0.5 * pair_max * np.sum(np.abs(x)) ** 2
                assert np.linalg.norm(quad) <= bound + 1e-12

    def test_unknown_condition_rejected(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        with pytest.raises(ValueError, match="unknown condition"):
            ClassEvaluator(f0, split).residual("bogus", MetricParams(1.0, 1.0))

    @pytest.mark.parametrize("n,k,label", [(5, 4, "f0"), (5, 6, "f1"), (6, 6, "f1")])
    def test_nk_bracket_part_vanishes_identically(self, get_split, get_f_structures, n, k, label):
        # (1/2)[fX, f^2 X]_m = 0 for every X, independently of the metric:
        # the parameter-free part of the nearly-Kaehler condition tensor is
        # zero after polarization for f0 and f1.
        from flagf.classify import _condition_tensor

        split = get_split(n, k)
        cs = structure_by_label(get_f_structures(n, k), label)
        f = cs.op.matrix_on(split.combined)
        zero_u = np.zeros_like(split.bracket_m)
        base = _condition_tensor("nk", f, f @ f, split.bracket_m, zero_u)
        sym = base + base.transpose(1, 0, 2)
        assert np.max(np.abs(sym)) < 1e-12


class TestSweep:
    def test_reports_in_grid_order_with_chain(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        grid = build_grid(0.5, 2.0, 0.5)
        reports = sweep(f0, split, grid, kappa=4.0)
        assert [(r.s, r.t) for r in reports] == grid
        assert all(r.chain_ok for r in reports)

    def test_grid_includes_special_points(self):
        grid = default_grid()
        assert (1.0, 1.0) in grid
        assert (1.0, FOUR_THIRDS) in grid

    def test_rejects_nonpositive_grid(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        with pytest.raises(ValueError, match="positive"):
            sweep(f0, split, [(0.0, 1.0)])

    def test_no_indeterminate_verdicts_on_default_grid(self, get_split, get_f_structures):
        split = get_split(5, 6)
        for cs in get_f_structures(5, 6):
            if cs.label.startswith("-"):
                continue
            for rep in sweep(cs, split, default_grid()):
                assert not any(rep.indeterminate.values()), (cs.label, rep.s, rep.t)

    def test_negated_structure_same_classes(self, get_split, get_f_structures):
        split = get_split(5, 6)
        fs = get_f_structures(5, 6)
        plus = structure_by_label(fs, "f4")
        minus = structure_by_label(fs, "-f4")
        for s, t in [(1.0, 1.0), (2.0, 0.5)]:
            p = MetricParams(s, t)
            for name in CONDITION_NAMES:
                assert (
                    membership(plus, split, p, name).member
                    == membership(minus, split, p, name).member
                )


class TestCharacteristicSets:
    def test_kill_single_point_refined(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        cs = characteristic_set(f0, split, "kill", tol=1e-6)
        assert cs.kind == "points"
        assert len(cs.points) == 1
        s, t = cs.points[0]
        assert abs(s - 1.0) < 1e-6
        assert abs(t - FOUR_THIRDS) < 1e-6

    def test_kill_point_found_without_special_grid_points(self, get_split, get_f_structures):
        # Even if (1, 4/3) is not a grid node, the dip refinement on the
        # s = 1 line must locate it.
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        grid = build_grid(0.25, 3.0, 0.25, extras=())
        cs = characteristic_set(f0, split, "kill", tol=1e-6, grid=grid)
        assert cs.kind == "points"
        s, t = cs.points[0]
        assert abs(s - 1.0) < 1e-6 and abs(t - FOUR_THIRDS) < 1e-6

    def test_nk_line(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        cs = characteristic_set(f0, split, "nk")
        assert cs.kind == "line"
        assert cs.lines == (("s", 1.0),)

    def test_g1_all(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        assert characteristic_set(f0, split, "g1").kind == "all"

    def test_f2_kill_empty(self, get_split, get_f_structures):
        split = get_split(5, 6)
        f2 = structure_by_label(get_f_structures(5, 6), "f2")
        assert characteristic_set(f2, split, "kill").kind == "empty"

    def test_f4_nk_empty(self, get_split, get_f_structures):
        split = get_split(5, 6)
        f4 = structure_by_label(get_f_structures(5, 6), "f4")
        assert characteristic_set(f4, split, "nk").kind == "empty"

    def test_description_strings(self, get_split, get_f_structures):
        split = get_split(5, 4)
        f0 = structure_by_label(get_f_structures(5, 4), "f0")
        assert characteristic_set(f0, split, "g1").description() == "all (s, t)"
        assert "line s=1.0" in characteristic_set(f0, split, "nk").description()


class TestGridBuilder:
    def test_default_spacing(self):
        grid = build_grid()
        svals = sorted({p[0] for p in grid})
        assert svals[:3] == [0.25, 0.5, 0.75]
        assert svals[-1] == 3.0

    def test_bad_step_rejected(self):
        with pytest.raises(ValueError, match="step"):
            build_grid(step=0.0)

    def test_nonpositive_min_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            build_grid(gmin=-1.0)
