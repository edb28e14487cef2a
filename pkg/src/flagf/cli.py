"""Command line front end: build spaces, verify, classify, sweep.

    flagf verify   --n 5 --k 4
    flagf classify --n 5 --k 4 --f f0 --s 1 --t 1.3333333
    flagf sweep    --n 5 --k 6 --out reports/ --format json

Exit codes: 0 all checks pass / report written, 1 check or I/O failure,
2 invalid configuration.  Reports are deterministic for a fixed config and
seed; sweep output files are written atomically.  The environment variable
FLAGF_THREADS caps sweep parallelism (default 1).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import canonical, classify, metricgeom, phispace
from .liealg import bracket, random_skew, trace_form
from .report import atomic_write_text, csv_text, fmt_float, json_dumps

SPECIAL_POINTS = ((1.0, 1.0), (1.0, 4.0 / 3.0))


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int
    m_blocks: int
    k: int
    f_label: str | None
    s: float | None
    t: float | None
    grid_min: float
    grid_max: float
    grid_step: float
    extra_points: tuple[tuple[float, float], ...]
    fmt: str
    out: str | None
    seed: int
    kappa: float | None

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "n": self.n,
            "m_blocks": self.m_blocks,
            "k": self.k,
            "f": self.f_label,
            "s": self.s,
            "t": self.t,
            "grid": {"min": self.grid_min, "max": self.grid_max, "step": self.grid_step},
            "extra_points": [list(p) for p in self.extra_points],
            "format": self.fmt,
            "seed": self.seed,
            "kappa": self.kappa,
        }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="matrix size n of SO(n)")
    common.add_argument("--m-blocks", type=int, default=1, help="number of rotation blocks")
    common.add_argument("--k", type=int, required=True, help="even order of the automorphism")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--kappa", type=float, default=None, help="metric normalization (default n-1)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", type=str, default=None, help="output file (verify/classify) or directory (sweep)")

    parser = argparse.ArgumentParser(
        prog="flagf",
        description="Canonical f-structures on SO(n)/SO(2)xSO(n-3) and their metric classes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the full verification suite")

    pc = sub.add_parser("classify", parents=[common], help="class membership of one structure at one (s, t)")
    pc.add_argument("--f", type=str, required=True, help="structure label (f0, or f1..f4)")
    pc.add_argument("--s", type=float, required=True)
    pc.add_argument("--t", type=float, required=True)

    pw = sub.add_parser("sweep", parents=[common], help="sweep the (s, t) grid for every f-structure")
    pw.add_argument("--grid-min", type=float, default=0.25)
    pw.add_argument("--grid-max", type=float, default=3.0)
    pw.add_argument("--grid-step", type=float, default=0.25)
    pw.add_argument("--extra-points", type=str, default="", help='extra grid points, e.g. "0.3,2.0;1.5,1.5"')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    extras = []
    raw = getattr(args, "extra_points", "") or ""
    for chunk in raw.replace(" ", "").split(";"):
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ConfigError(f"cannot parse extra point {chunk!r} (expected s,t)")
        try:
            s, t = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ConfigError(f"cannot parse extra point {chunk!r}: {exc}") from exc
        if s <= 0 or t <= 0:
            raise ConfigError(f"extra points must be positive, got ({s}, {t})")
        extras.append((s, t))

    cfg = RunConfig(
        command=args.command,
        n=args.n,
        m_blocks=args.m_blocks,
        k=args.k,
        f_label=getattr(args, "f", None),
        s=getattr(args, "s", None),
        t=getattr(args, "t", None),
        grid_min=getattr(args, "grid_min", 0.25),
        grid_max=getattr(args, "grid_max", 3.0),
        grid_step=getattr(args, "grid_step", 0.25),
        extra_points=tuple(extras),
        fmt=args.format,
        out=args.out,
        seed=args.seed,
        kappa=args.kappa,
    )
    if cfg.command == "sweep" and cfg.out is None:
        raise ConfigError("sweep requires --out DIRECTORY")
    if cfg.command in ("verify", "classify") and cfg.fmt == "csv":
        raise ConfigError(f"format csv is not supported for {cfg.command}")
    if cfg.command == "sweep" and cfg.grid_step <= 0:
        raise ConfigError("--grid-step must be positive")
    if cfg.command == "sweep" and (cfg.grid_min <= 0 or cfg.grid_max < cfg.grid_min):
        raise ConfigError("grid bounds must satisfy 0 < min <= max")
    if cfg.command == "classify" and (cfg.s <= 0 or cfg.t <= 0):
        raise ConfigError("--s and --t must be positive")
    if cfg.kappa is not None and cfg.kappa <= 0:
        raise ConfigError("--kappa must be positive")
    return cfg


def _setup_space(cfg: RunConfig) -> phispace.PhiSpace:
    try:
        spec = phispace.build_automorphism(cfg.n, cfg.m_blocks, cfg.k)
        return phispace.build_phi_space(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _space_dict(ps: phispace.PhiSpace) -> dict:
    return {
        "n": ps.spec.n,
        "m_blocks": ps.spec.m_blocks,
        "k": ps.spec.k,
        "dims": {"g": ps.h.dim + ps.m.dim, "h": ps.h.dim, "m": ps.m.dim},
    }


def _structure_dict(cs: canonical.CanonicalStructure, check: canonical.StructureCheck | None = None) -> dict:
    d = {
        "id": cs.label,
        "kind": cs.kind,
        "signature": list(cs.signature),
        "polynomial": [float(c) for c in cs.theta_polynomial],
    }
    if check is not None:
        d["checks"] = {
            "defining_residual": check.defining_residual,
            "polynomial_residual": check.polynomial_residual,
            "theta_commutation": check.theta_commutation,
            "ad_invariance": check.ad_invariance,
            "pairwise_commutation": check.pairwise_commutation,
        }
    return d


# ----------------------------------------------------------------- verify --


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    """Run the whole structural verification suite; exit 0 iff all pass."""
    ps = _setup_space(cfg)
    rng = np.random.default_rng(cfg.seed)
    n, k = cfg.n, cfg.k
    checks: list[dict] = []

    def add(name: str, passed: bool, residual: float | None = None, detail=None):
        entry: dict = {"name": name, "passed": bool(passed)}
        if residual is not None:
            entry["residual"] = float(residual)
        if detail is not None:
            entry["detail"] = detail
        checks.append(entry)

    reg = phispace.check_regularity(ps)
    add("regularity-direct-sum", reg.direct_sum)
    add("regularity-nonsingular-restriction", reg.nonsingular_on_image)
    add("regularity-kernel-stable", reg.kernel_square_stable)
    add("regularity-theta-no-fixed-vector", reg.theta_no_fixed_vector)
    add("regularity-conditions-agree", reg.agree)

    if cfg.m_blocks == 1:
        add("complement-dimension", ps.m.dim == 3 * n - 7, detail={"dim_m": ps.m.dim, "expected": 3 * n - 7})

    dev_b, dev_iso = 0.0, 0.0
    for _ in range(10):
        x, y = random_skew(rng, n), random_skew(rng, n)
        px, py = ps.phi.apply(x), ps.phi.apply(y)
        dev_b = max(dev_b, (ps.phi.apply(bracket(x, y)) - bracket(px, py)).norm)
        dev_iso = max(dev_iso, abs(trace_form(px, py) - trace_form(x, y)))
    add("phi-preserves-bracket", dev_b < 1e-9, dev_b)
    add("phi-isometry", dev_iso < 1e-9, dev_iso)

    tk = np.linalg.matrix_power(ps.theta.matrix, k)
    res_order = float(np.max(np.abs(tk - np.eye(ps.m.dim)))) if ps.m.dim else 0.0
    add("theta-order", res_order < 1e-9, res_order)

    fs = canonical.generate_f_structures(ps)
    prods = canonical.generate_product_structures(ps)
    expected_f = {4: 2, 6: 8}.get(k)
    expected_p = {4: 4, 6: 8}.get(k)
    add(
        "f-structure-count",
        expected_f is None or len(fs) == expected_f,
        detail={"count": len(fs), "up_to_sign": len(fs) // 2, "expected": expected_f},
    )
    add(
        "product-structure-count",
        expected_p is None or len(prods) == expected_p,
        detail={"count": len(prods), "up_to_sign": len(prods) // 2, "expected": expected_p},
    )

    everything = fs + prods
    worst = {"defining": 0.0, "poly": 0.0, "theta": 0.0, "ad": 0.0, "pair": 0.0}
    for cs in everything:
        chk = canonical.verify_structure(cs, ps, others=everything)
        worst["defining"] = max(worst["defining"], chk.defining_residual)
        worst["poly"] = max(worst["poly"], chk.polynomial_residual)
        worst["theta"] = max(worst["theta"], chk.theta_commutation)
        worst["ad"] = max(worst["ad"], chk.ad_invariance)
        worst["pair"] = max(worst["pair"], chk.pairwise_commutation)
    add("structure-defining-identities", worst["defining"] < 1e-10, worst["defining"])
    add("structure-polynomial-reconstruction", worst["poly"] < 1e-10, worst["poly"])
    add("structure-theta-commutation", worst["theta"] < 1e-10, worst["theta"])
    add("structure-ad-invariance", worst["ad"] < 1e-10, worst["ad"])
    add("structure-pairwise-commutation", worst["pair"] < 1e-10, worst["pair"])

    for family in (fs, prods):
        ok = all(
            any(np.max(np.abs(cs.op.matrix + other.op.matrix)) < 1e-10 for other in family)
            for cs in family
        )
        add(f"{'f' if family is fs else 'product'}-negation-closure", ok)

    if k in (4, 6) and cfg.m_blocks == 1:
        golden = canonical.golden_action_check(ps)
        add("golden-action", golden.passed, golden.max_deviation)

    if cfg.m_blocks == 1:
        split = metricgeom.build_split(ps)
        from .liealg import decompose_orthogonal

        add(
            "split-dimensions",
            (split.m1.dim, split.m2.dim, split.m3.dim) == (2, 2 * (n - 3), n - 3),
            detail={"dims": [split.m1.dim, split.m2.dim, split.m3.dim]},
        )
        add("split-orthogonal-decomposition", decompose_orthogonal(ps.m, [split.m1, split.m2, split.m3]))

        kappa = float(n - 1) if cfg.kappa is None else cfg.kappa
        dev_u = 0.0
        for s_, t_ in [tuple(rng.uniform(0.1, 5.0, 2)) for _ in range(5)] + [(1.0, 1.0)]:
            p = metricgeom.MetricParams(s=float(s_), t=float(t_), kappa=kappa)
            uc = metricgeom.u_coords_tensor(split, p, "closed")
            us = metricgeom.u_coords_tensor(split, p, "solved")
            dev_u = max(dev_u, float(np.max(np.abs(uc - us))))
        add("u-oracle-agreement", dev_u < 1e-9, dev_u)
        p11 = metricgeom.MetricParams(1.0, 1.0, kappa)
        u11 = float(np.max(np.abs(metricgeom.u_coords_tensor(split, p11, "closed"))))
        add("u-vanishes-at-neutral-metric", u11 < 1e-12, u11)

        dev_mc = 0.0
        dev_pc = 0.0
        for _ in range(5):
            s_, t_ = rng.uniform(0.1, 5.0, 2)
            p = metricgeom.MetricParams(float(s_), float(t_), kappa)
            for cs in fs:
                dev_mc = max(dev_mc, classify.metric_compat_residual(cs, split, p))
            for cs in prods:
                dev_pc = max(dev_pc, classify.product_compat_residual(cs, split, p))
        add("metric-f-compatibility", dev_mc < 1e-10, dev_mc)
        add("metric-product-compatibility", dev_pc < 1e-10, dev_pc)

        r_nat = metricgeom.naturally_reductive_residual(split, p11)
        add("naturally-reductive-at-neutral-metric", r_nat < 1e-9, r_nat)
        r_off = min(
            metricgeom.naturally_reductive_residual(split, metricgeom.MetricParams(2.0, 1.0, kappa)),
            metricgeom.naturally_reductive_residual(split, metricgeom.MetricParams(1.0, 2.0, kappa)),
        )
        add("not-naturally-reductive-off-neutral", r_off > 1e-3, r_off)

        dev_nomizu = 0.0
        p_rand = metricgeom.MetricParams(float(rng.uniform(0.2, 4.0)), float(rng.uniform(0.2, 4.0)), kappa)
        for _ in range(10):
            x = split.combined.lift(rng.standard_normal(split.dim))
            y = split.combined.lift(rng.standard_normal(split.dim))
            z = split.combined.lift(rng.standard_normal(split.dim))
            val = metricgeom.metric_eval(split, p_rand, metricgeom.nomizu(split, p_rand, z, x), y)
            val += metricgeom.metric_eval(split, p_rand, x, metricgeom.nomizu(split, p_rand, z, y))
            dev_nomizu = max(dev_nomizu, abs(val) / kappa)
        add("connection-metric-compatibility", dev_nomizu < 1e-8, dev_nomizu)

        chain_ok = True
        for cs in fs:
            ev = classify.ClassEvaluator(cs, split)
            for s_, t_ in SPECIAL_POINTS:
                chain_ok = chain_ok and ev.report(metricgeom.MetricParams(s_, t_, kappa)).chain_ok
        add("class-chain-at-special-points", chain_ok)

    passed = all(c["passed"] for c in checks)
    report = {
        "command": "verify",
        "config": cfg.as_dict(),
        "space": _space_dict(ps),
        "structures": {
            "f": [cs.label for cs in fs],
            "product": [cs.label for cs in prods],
        },
        "checks": checks,
        "passed": passed,
    }
    return (0 if passed else 1), report


def _verify_text(report: dict) -> str:
    lines = [
        f"flagf verify: n={report['space']['n']} k={report['space']['k']} "
        f"m_blocks={report['space']['m_blocks']} "
        f"dims(g,h,m)=({report['space']['dims']['g']},{report['space']['dims']['h']},{report['space']['dims']['m']})"
    ]
    for c in report["checks"]:
        mark = "PASS" if c["passed"] else "FAIL"
        extra = f"  residual={fmt_float(c['residual'])}" if "residual" in c else ""
        detail = f"  {c['detail']}" if "detail" in c else ""
        lines.append(f"[{mark}] {c['name']}{extra}{detail}")
    lines.append(f"result: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- classify --


def cmd_classify(cfg: RunConfig) -> tuple[int, dict]:
    ps = _setup_space(cfg)
    if cfg.m_blocks != 1:
        raise ConfigError("classification requires the m_blocks=1 flag space")
    split = metricgeom.build_split(ps)
    fs = canonical.generate_f_structures(ps)
    try:
        cs = canonical.structure_by_label(fs, cfg.f_label)
    except KeyError as exc:
        raise ConfigError(f"unknown structure {cfg.f_label!r}; known: "
                          + ", ".join(sorted(c.label for c in fs))) from exc

    params = metricgeom.MetricParams.for_space(ps, cfg.s, cfg.t, cfg.kappa)
    compat = classify.metric_compat_residual(cs, split, params)
    rep = classify.ClassEvaluator(cs, split).report(params)

    report = {
        "command": "classify",
        "config": cfg.as_dict(),
        "space": _space_dict(ps),
        "structure": _structure_dict(cs),
        "params": {"s": params.s, "t": params.t, "kappa": params.kappa},
        "metric_compatibility_residual": compat,
        "results": {
            name: {
                "residual": rep.residuals[name],
                "member": rep.memberships[name],
                "indeterminate": rep.indeterminate[name],
            }
            for name in classify.CONDITION_NAMES
        },
        "chain_ok": rep.chain_ok,
    }
    return 0, report


def _classify_text(report: dict) -> str:
    lines = [
        f"flagf classify: {report['structure']['id']} on n={report['space']['n']} "
        f"k={report['space']['k']} at (s, t)=({fmt_float(report['params']['s'])}, "
        f"{fmt_float(report['params']['t'])})"
    ]
    for name in classify.CONDITION_NAMES:
        r = report["results"][name]
        verdict = "member" if r["member"] else ("indeterminate" if r["indeterminate"] else "non-member")
        lines.append(f"{name.upper():>4}: {verdict}  residual={fmt_float(r['residual'])}")
    lines.append(f"chain_ok: {report['chain_ok']}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ sweep --


def cmd_sweep(cfg: RunConfig) -> tuple[int, dict]:
    ps = _setup_space(cfg)
    if cfg.m_blocks != 1:
        raise ConfigError("sweep requires the m_blocks=1 flag space")
    split = metricgeom.build_split(ps)
    fs = canonical.generate_f_structures(ps)
    reps = sorted((cs for cs in fs if not cs.label.startswith("-")), key=lambda c: c.label)
    kappa = float(cfg.n - 1) if cfg.kappa is None else cfg.kappa
    grid = classify.build_grid(
        cfg.grid_min, cfg.grid_max, cfg.grid_step, extras=SPECIAL_POINTS + cfg.extra_points
    )

    def run_one(cs: canonical.CanonicalStructure):
        reports = classify.sweep(cs, split, grid, kappa=kappa)
        summary = {
            name: classify.characteristic_set(cs, split, name, grid=grid, kappa=kappa)
            for name in classify.CONDITION_NAMES
        }
        return cs, reports, summary

    try:
        workers = max(1, int(os.environ.get("FLAGF_THREADS", "1") or "1"))
    except ValueError:
        workers = 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, reps))
    else:
        results = [run_one(cs) for cs in reps]

    outdir = Path(cfg.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        summary_all = {}
        for cs, reports, summary in results:
            chk = canonical.verify_structure(cs, ps, others=fs)
            sdict = {name: _charset_dict(summary[name]) for name in classify.CONDITION_NAMES}
            summary_all[cs.label] = sdict
            doc = {
                "command": "sweep",
                "config": cfg.as_dict(),
                "space": _space_dict(ps),
                "structures": [_structure_dict(cs, chk)],
                "sweep": [
                    {
                        "s": r.s,
                        "t": r.t,
                        "residuals": {n_: r.residuals[n_] for n_ in classify.CONDITION_NAMES},
                        "memberships": {n_: r.memberships[n_] for n_ in classify.CONDITION_NAMES},
                        "chain_ok": r.chain_ok,
                    }
                    for r in reports
                ],
                "summary": sdict,
            }
            path = outdir / f"{cs.label}.{_ext(cfg.fmt)}"
            atomic_write_text(path, _render_sweep(doc, reports, cfg.fmt))
            written.append(str(path))

        summary_doc = {
            "command": "sweep",
            "config": cfg.as_dict(),
            "space": _space_dict(ps),
            "structures": summary_all,
        }
        spath = outdir / "summary.json"
        atomic_write_text(spath, json_dumps(summary_doc))
        written.append(str(spath))
    except OSError as exc:
        print(f"flagf: I/O failure: {exc}", file=sys.stderr)
        return 1, {}
    return 0, {"written": written, "summary": summary_all}


def _ext(fmt: str) -> str:
    return {"json": "json", "csv": "csv", "text": "txt"}[fmt]


def _charset_dict(cs: classify.CharacteristicSet) -> dict:
    return {
        "kind": cs.kind,
        "lines": [{"axis": a, "value": v} for a, v in cs.lines],
        "points": [[s, t] for s, t in cs.points],
        "description": cs.description(),
    }


def _render_sweep(doc: dict, reports, fmt: str) -> str:
    if fmt == "json":
        return json_dumps(doc)
    if fmt == "csv":
        header = ["s", "t", "kill_residual", "nk_residual", "g1_residual", "kill", "nk", "g1"]
        rows = [
            [
                fmt_float(r.s),
                fmt_float(r.t),
                fmt_float(r.residuals["kill"]),
                fmt_float(r.residuals["nk"]),
                fmt_float(r.residuals["g1"]),
                str(r.memberships["kill"]).lower(),
                str(r.memberships["nk"]).lower(),
                str(r.memberships["g1"]).lower(),
            ]
            for r in reports
        ]
        return csv_text(header, rows)
    lines = [f"structure {doc['structures'][0]['id']}"]
    for r in reports:
        cells = " ".join(
            f"{n_}={fmt_float(r.residuals[n_])}{'*' if r.memberships[n_] else ''}"
            for n_ in classify.CONDITION_NAMES
        )
        lines.append(f"s={fmt_float(r.s)} t={fmt_float(r.t)} {cells}")
    lines.append("summary:")
    for n_ in classify.CONDITION_NAMES:
        lines.append(f"  {n_}: {doc['summary'][n_]['description']}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- main --


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "verify":
            code, report = cmd_verify(cfg)
            _deliver(cfg, report, _verify_text)
            return code
        if cfg.command == "classify":
            code, report = cmd_classify(cfg)
            _deliver(cfg, report, _classify_text)
            return code
        code, info = cmd_sweep(cfg)
        if code == 0:
            for path in info["written"]:
                print(path)
            for label, conds in info["summary"].items():
                descs = "; ".join(f"{n_}: {conds[n_]['description']}" for n_ in classify.CONDITION_NAMES)
                print(f"{label}: {descs}")
        return code
    except ConfigError as exc:
        print(f"flagf: invalid configuration: {exc}", file=sys.stderr)
        return 2


def _deliver(cfg: RunConfig, report: dict, to_text) -> None:
    text = json_dumps(report) if cfg.fmt == "json" else to_text(report)
    if cfg.out:
        atomic_write_text(Path(cfg.out), text)
        print(cfg.out)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    raise SystemExit(main())
