"""Reproducible experiment driver.

Configs are YAML/JSON validated against a JSON schema; every run writes a
manifest with the resolved config, seeds, wall-clock and sha256 digests of all
outputs. With a fixed seed and --threads 1 the CSV outputs are byte-identical
across re-runs (the kernels are chunk-deterministic, so in practice any thread
count reproduces them).

Exit codes: 0 success, 1 stage failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .exact import ModelParams
from .lattice import Direction

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "threads": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
        "model": {
            "type": "object",
            "properties": {
                "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "q": {"type": "number", "minimum": 1},
                "box": {"type": "integer", "minimum": 2},
                "bc": {"enum": ["free", "wired"]},
            },
            "required": ["p", "q"],
        },
        "sampler": {
            "type": "object",
            "properties": {
                "algorithm": {"enum": ["auto", "bernoulli", "heat-bath", "cluster-move"]},
                "sweeps": {"type": "integer", "minimum": 1},
                "burn_in": {"type": "integer", "minimum": 0},
                "thinning": {"type": "integer", "minimum": 1},
            },
        },
        "observables": {
            "type": "object",
            "properties": {
                "two_point": {
                    "type": "object",
                    "properties": {
                        "direction_angle": {"type": "number"},
                        "n_max": {"type": "integer", "minimum": 2},
                        "samples": {"type": "integer", "minimum": 100},
                    },
                },
                "lengths": {
                    "type": "object",
                    "properties": {
                        "delta": {"type": "number"},
                        "n_max": {"type": "integer"},
                        "samples": {"type": "integer"},
                    },
                },
                "halfspace": {
                    "type": "object",
                    "properties": {
                        "direction_angle": {"type": "number"},
                        "L": {"type": "integer", "minimum": 1},
                        "m_max": {"type": "integer", "minimum": 2},
                        "samples": {"type": "integer"},
                    },
                },
            },
        },
        "explore": {
            "type": "object",
            "properties": {
                "direction_angle": {"type": "number"},
                "L": {"type": "integer", "minimum": 1},
                "n_slices": {"type": "integer", "minimum": 0},
                "budget": {"type": "integer", "minimum": 1},
                "max_traces": {"type": "integer", "minimum": 1},
                "cone_alpha": {"type": "number"},
            },
            "required": ["L", "n_slices", "budget"],
        },
        "kmrp": {
            "type": "object",
            "properties": {
                "law": {"type": "string"},
                "kappa": {"type": "number"},
                "min_pieces": {"type": "integer", "minimum": 1},
                "n_check": {"type": "integer", "minimum": 1},
                "clt": {
                    "type": "object",
                    "properties": {
                        "n": {"type": "integer"},
                        "trials": {"type": "integer"},
                    },
                },
            },
        },
        "wulff": {
            "type": "object",
            "properties": {
                "grid": {"type": "integer", "minimum": 8},
                "L": {"type": "integer", "minimum": 1},
                "zeta_samples": {"type": "integer"},
                "drift_budget": {"type": "integer"},
                "xi_samples": {"type": "integer"},
            },
        },
    },
    "required": ["model"],
}

DEFAULTS = {
    "seed": 0,
    "threads": 0,  # 0 = numba default
    "out": "ozlab-out",
    "model": {"q": 1.0, "box": 64, "bc": "free"},
    "sampler": {"algorithm": "auto", "sweeps": 10000, "burn_in": 500, "thinning": 2},
}


def _merge_defaults(cfg: dict) -> dict:
    out = json.loads(json.dumps(cfg))
    for k, v in DEFAULTS.items():
        if isinstance(v, dict):
            out.setdefault(k, {})
            for kk, vv in v.items():
                out[k].setdefault(kk, vv)
        else:
            out.setdefault(k, v)
    return out


def load_config(path) -> dict:
    import jsonschema

    with open(path) as fh:
        cfg = yaml.safe_load(fh)
    jsonschema.validate(cfg, CONFIG_SCHEMA)
    return _merge_defaults(cfg)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[h]) for h in header) + "\n")


def _digest(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _run_id(cfg: dict) -> str:
    """Hash of the physics-determining config (output path and thread count excluded)."""
    core = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
    blob = json.dumps(core, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _set_threads(n):
    if n and n > 0:
        import numba

        numba.set_num_threads(n)


def _cache_dir():
    d = os.environ.get("OZLAB_CACHE")
    if d:
        Path(d).mkdir(parents=True, exist_ok=True)
    return d


def _cached(kind, key_parts, compute):
    """npz cache keyed by the exact inputs; used only when OZLAB_CACHE is set."""
    d = _cache_dir()
    if not d:
        return compute()
    key = hashlib.sha256(json.dumps([kind] + list(key_parts)).encode()).hexdigest()[:24]
    path = Path(d) / f"{kind}-{key}.npz"
    if path.exists():
        data = np.load(path, allow_pickle=False)
        return tuple(data[f"arr_{i}"] for i in range(len(data.files)))
    result = compute()
    np.savez(path, *result)
    return result


# --------------------------------------------------------------------------------------- stages


def stage_lengths(cfg, outdir, run_id, rows_lengths):
    from .observables import characteristic_length

    oc = cfg["observables"]["lengths"]
    params = ModelParams(cfg["model"]["p"], cfg["model"]["q"])
    est = characteristic_length(params, delta=oc.get("delta", 0.05),
                                n_max=oc.get("n_max", 128),
                                n_samples=oc.get("samples", 20000),
                                seed=cfg["seed"] + 11)
    rows_lengths.append({"run_id": run_id, "method": est.method, "value": est.value,
                         "stderr": est.stderr, "window_lo": est.window[0],
                         "window_hi": est.window[1]})
    return est


def stage_two_point(cfg, outdir, run_id, rows_lengths):
    from .observables import estimate_xi, two_point_curve

    oc = cfg["observables"]["two_point"]
    params = ModelParams(cfg["model"]["p"], cfg["model"]["q"])
    v = Direction.from_angle(oc.get("direction_angle", 0.0))
    n_list = list(range(1, oc.get("n_max", 24) + 1))
    curve = two_point_curve(v, n_list, params, n_samples=oc.get("samples", 10**6),
                            seed=cfg["seed"] + 21, box_side=cfg["model"]["box"])
    rows = []
    for i in range(len(curve.n)):
        rows.append({
            "run_id": run_id,
            "direction": f"{v.wx:.6f}:{v.wy:.6f}",
            "n": int(curve.n[i]),
            "estimate": float(curve.estimate[i]),
            "stderr": float(curve.stderr[i]),
            "samples": curve.samples,
        })
    write_csv(outdir / "two_point.csv",
              ["run_id", "direction", "n", "estimate", "stderr", "samples"], rows)
    for corr in ("none", "oz"):
        try:
            fit = estimate_xi(curve, correction=corr)
        except ValueError:
            continue
        rows_lengths.append({"run_id": run_id, "method": fit.estimate.method,
                             "value": fit.estimate.value, "stderr": fit.estimate.stderr,
                             "window_lo": fit.estimate.window[0],
                             "window_hi": fit.estimate.window[1]})
    return curve


def stage_halfspace(cfg, outdir, run_id, rows_lengths):
    from .observables import estimate_zeta, halfspace_profile

    oc = cfg["observables"]["halfspace"]
    params = ModelParams(cfg["model"]["p"], cfg["model"]["q"])
    w = Direction.from_angle(oc.get("direction_angle", 0.0))
    L = oc["L"]
    m, est, err, hits = halfspace_profile(w, params, L, m_max=oc.get("m_max", 12),
                                          n_samples=oc.get("samples", 10**6),
                                          seed=cfg["seed"] + 31)
    rows = [{"run_id": run_id, "m": int(m[i]), "L": L, "estimate": float(est[i]),
             "stderr": float(err[i]), "hits": int(hits[i])} for i in range(len(m))]
    write_csv(outdir / "halfspace.csv",
              ["run_id", "m", "L", "estimate", "stderr", "hits"], rows)
    zeta = estimate_zeta(w, params, L=L, n_samples=oc.get("samples", 10**6),
                         seed=cfg["seed"] + 32, min_hits=50)
    rows_lengths.append({"run_id": run_id, "method": zeta.method, "value": zeta.value,
                         "stderr": zeta.stderr, "window_lo": zeta.window[0],
                         "window_hi": zeta.window[1]})
    return zeta


def stage_explore(cfg, outdir, run_id):
    from .explorer import conditioned_ensemble, write_traces_jsonl

    oc = cfg["explore"]
    params = ModelParams(cfg["model"]["p"], cfg["model"]["q"])
    w = Direction.from_angle(oc.get("direction_angle", 0.0))
    traces, info = conditioned_ensemble(
        params, w, oc["L"], oc["n_slices"], oc["budget"], seed=cfg["seed"] + 41,
        max_traces=oc.get("max_traces", 2000), alpha=oc.get("cone_alpha", 4.0))
    write_traces_jsonl(outdir / "traces.jsonl", traces)
    with open(outdir / "explore_info.json", "w") as fh:
        json.dump({"acceptance": info["acceptance"], "accepted": info["accepted"],
                   "budget": info["budget"]}, fh, indent=1, sort_keys=True)
    return traces, info


def stage_kmrp(cfg, outdir, run_id, traces=None):
    from .kmrp import (StepLaw, asymptotic_check, local_clt_check, rates_csv_rows,
                       solve_rate)

    oc = cfg["kmrp"]
    law_src = oc.get("law", "from-exploration")
    if law_src == "from-exploration":
        if not traces:
            raise RuntimeError("kmrp.law = from-exploration requires the explore stage")
        from .explorer import empirical_step_law

        law = empirical_step_law(traces, kappa=oc.get("kappa", 0.5),
                                 min_pieces=oc.get("min_pieces", 1000))
        name = "from-exploration"
    else:
        law = StepLaw.from_json(Path(law_src).read_text())
        name = Path(law_src).name
    sol = solve_rate(law)
    write_csv(outdir / "rates.csv",
              ["run_id", "law", "R_p", "zeta", "amplitude", "mass_gap_margin"],
              rates_csv_rows(name, sol, run_id))
    dev = asymptotic_check(law, oc.get("n_check", 300))
    report = {"R_p": sol.R_p, "zeta": sol.zeta, "amplitude": sol.amplitude,
              "asymptotic_deviation": dev}
    if "clt" in oc:
        clt = local_clt_check(law, oc["clt"].get("n", 2000),
                              oc["clt"].get("trials", 10**5), cfg["seed"] + 51)
        report["ks_distance"] = clt.ks_distance
        report["supnorm"] = clt.supnorm
        _write_clt_hist(outdir, run_id, law, oc["clt"], cfg["seed"] + 51)
    with open(outdir / "kmrp_report.json", "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    return sol


def _write_clt_hist(outdir, run_id, law, clt_cfg, seed):
    from scipy.stats import norm

    from .kmrp import _simulate_sums, tilted_law

    tl = tilted_law(law)
    w = tl.interior_prob
    mu = float(w @ tl.interior_dx)
    sig = math.sqrt(float(w @ (tl.interior_dx - mu) ** 2))
    n = clt_cfg.get("n", 2000)
    trials = clt_cfg.get("trials", 10**5)
    _, ends = _simulate_sums(np.cumsum(w), tl.interior_dx, n, trials, seed,
                             np.empty(0, dtype=np.int64))
    z = (ends - n * mu) / (sig * math.sqrt(n))
    edges = np.linspace(-4, 4, 81)
    counts, _ = np.histogram(z, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    rows = []
    for c, cnt in zip(centers, counts):
        rows.append({"run_id": run_id, "z": float(c), "density": float(cnt / trials / width),
                     "gaussian": float(norm.pdf(c)), "count": int(cnt)})
    write_csv(outdir / "clt_hist.csv",
              ["run_id", "z", "density", "gaussian", "count"], rows)


def stage_wulff(cfg, outdir, run_id):
    from .wulff import build_shapes, duality_check, measure_direction_grid, wulff_csv_rows

    oc = cfg["wulff"]
    params = ModelParams(cfg["model"]["p"], cfg["model"]["q"])
    profiles, xa, xv, xe = measure_direction_grid(
        params, oc["L"], n_quadrant=oc.get("grid", 16),
        zeta_samples=oc.get("zeta_samples", 10**6),
        drift_budget=oc.get("drift_budget", 10**6),
        xi_samples=oc.get("xi_samples", 10**6), seed=cfg["seed"] + 61)
    xi_map = {round(a, 9): v for a, v in zip(xa, xv)}
    write_csv(outdir / "wulff.csv",
              ["run_id", "theta_w", "zeta", "mu", "sigma", "theta_v", "xi_star", "xi"],
              wulff_csv_rows(profiles, xi_map, run_id))
    shapes = build_shapes(xa, xv, xe, profiles, params.p, params.q)
    rep = duality_check(shapes, profiles)
    with open(outdir / "shapes.json", "w") as fh:
        json.dump({
            "p": params.p, "q": params.q,
            "u_polygon": shapes.u_vertices().tolist(),
            "w_polygon": shapes.w_vertices().tolist(),
            "duality_max_violation_sigmas": rep.max_violation_sigmas,
            "reconstruction_rel_dev": rep.reconstruction_rel_dev,
        }, fh, indent=1, sort_keys=True)
    return profiles


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.out is not None:
        cfg["out"] = args.out
    _set_threads(cfg["threads"])
    run_id = _run_id(cfg)
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "run_id": run_id,
        "version": __version__,
        "resolved_config": cfg,
        "seed": cfg["seed"],
        "status": "running",
        "outputs": {},
    }
    t0 = time.time()
    rows_lengths = []
    traces = None
    try:
        if "lengths" in cfg.get("observables", {}):
            stage_lengths(cfg, outdir, run_id, rows_lengths)
        if "two_point" in cfg.get("observables", {}):
            stage_two_point(cfg, outdir, run_id, rows_lengths)
        if "halfspace" in cfg.get("observables", {}):
            stage_halfspace(cfg, outdir, run_id, rows_lengths)
        if "explore" in cfg:
            traces, _ = stage_explore(cfg, outdir, run_id)
        if "kmrp" in cfg:
            stage_kmrp(cfg, outdir, run_id, traces)
        if "wulff" in cfg:
            stage_wulff(cfg, outdir, run_id)
        if rows_lengths:
            write_csv(outdir / "lengths.csv",
                      ["run_id", "method", "value", "stderr", "window_lo", "window_hi"],
                      rows_lengths)
        manifest["status"] = "ok"
    except Exception as exc:  # partial manifest on failure
        manifest["status"] = f"failed: {exc}"
        _finalize_manifest(manifest, outdir, t0)
        print(f"ozlab: stage failure: {exc}", file=sys.stderr)
        return 1
    _finalize_manifest(manifest, outdir, t0)
    print(f"ozlab: run {run_id} complete in {time.time() - t0:.1f}s -> {outdir}")
    return 0


def _finalize_manifest(manifest, outdir, t0):
    manifest["wall_clock_s"] = time.time() - t0
    for f in sorted(outdir.iterdir()):
        if f.name != "manifest.json" and f.is_file():
            manifest["outputs"][f.name] = _digest(f)
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)


def cmd_kmrp_solve(args) -> int:
    from .kmrp import StepLaw, rates_csv_rows, solve_rate

    law = StepLaw.from_json(Path(args.law).read_text())
    sol = solve_rate(law)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    run_id = _run_id({"law": _digest(args.law)})
    write_csv(outdir / "rates.csv",
              ["run_id", "law", "R_p", "zeta", "amplitude", "mass_gap_margin"],
              rates_csv_rows(Path(args.law).name, sol, run_id))
    print(f"R_p={sol.R_p!r} zeta={sol.zeta!r} amplitude={sol.amplitude!r}")
    return 0


def cmd_kmrp_check(args) -> int:
    from .kmrp import StepLaw, asymptotic_check

    law = StepLaw.from_json(Path(args.law).read_text())
    dev = asymptotic_check(law, args.n)
    print(f"asymptotic deviation at n={args.n}: {dev!r}")
    return 0 if dev <= args.tol else 1


def cmd_explore(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    _set_threads(args.threads or cfg.get("threads", 0))
    outdir = Path(args.out or cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    stage_explore(cfg, outdir, _run_id(cfg))
    print(f"traces -> {outdir / 'traces.jsonl'}")
    return 0


def cmd_wulff(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    _set_threads(args.threads or cfg.get("threads", 0))
    outdir = Path(args.out or cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    stage_wulff(cfg, outdir, _run_id(cfg))
    print(f"wulff tables -> {outdir}")
    return 0


def cmd_verify_oracle(args) -> int:
    """Fast exact-vs-sampler gate: full-histogram chi^2 on tiny graphs."""
    from .exact import BoundaryCondition, ExactMeasure, single_edge, square_2x2
    from .sampler import SamplerSpec, chain_histogram
    from .stats import chi2_pooled

    _set_threads(args.threads)
    failures = []
    n_rec = 200000
    for graph in (single_edge(), square_2x2()):
        for q in (1.0, 2.0):
            for bc in ("free", "wired"):
                params = ModelParams(0.5, q)
                mu = ExactMeasure(graph, params,
                                  BoundaryCondition.wired(graph) if bc == "wired"
                                  else BoundaryCondition.free(graph))
                for algo in ("heat-bath", "cluster-move"):
                    spec = SamplerSpec(params=params, algorithm=algo, sweeps=n_rec,
                                       burn_in=500, thinning=4, seed=12345, bc=bc)
                    hist = chain_histogram(graph, spec)
                    stat, dof, pval = chi2_pooled(hist, mu.probs)
                    tag = f"{graph.name} q={q} bc={bc} {algo}"
                    ok = pval >= 0.01
                    print(f"{'PASS' if ok else 'FAIL'} {tag}: chi2={stat:.1f} "
                          f"dof={dof} p={pval:.4f}")
                    if not ok:
                        failures.append(tag)
    if failures:
        print(f"oracle verification FAILED for {len(failures)} cases", file=sys.stderr)
        return 1
    print("oracle verification passed")
    return 0


def cmd_report(args) -> int:
    """Stage plot-ready CSVs from a finished run directory."""
    import shutil

    rundir = Path(args.run)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    staged = []
    for name in ("two_point.csv", "halfspace.csv", "wulff.csv", "clt_hist.csv",
                 "shapes.json", "lengths.csv", "rates.csv"):
        src = rundir / name
        if src.exists():
            shutil.copyfile(src, outdir / name)
            staged.append(name)
    run_id_from = (json.loads((rundir / "manifest.json").read_text())["run_id"]
                   if (rundir / "manifest.json").exists() else "adhoc")
    tp = rundir / "two_point.csv"
    if tp.exists():
        # stage the fit overlay so plots never recompute statistics
        import numpy as np

        from .lattice import Direction
        from .observables import TwoPointCurve, estimate_xi

        lines = tp.read_text().strip().splitlines()[1:]
        rows = [ln.split(",") for ln in lines]
        n = np.array([int(r[2]) for r in rows])
        est = np.array([float(r[3]) for r in rows])
        err = np.array([float(r[4]) for r in rows])
        keep = n >= 1
        curve = TwoPointCurve(Direction(1, 0), n[keep], est[keep], err[keep],
                              est[keep] * int(rows[0][5]) < 10, int(rows[0][5]))
        try:
            fit = estimate_xi(curve, correction="oz")
            xi = fit.estimate.value
            c = fit.fit.intercept
            frows = []
            for nn in curve.n:
                if fit.window[0] <= nn <= fit.window[1]:
                    fitted = math.exp(c - nn / xi - 0.5 * math.log(nn))
                    frows.append({"run_id": run_id_from, "n": int(nn), "fitted": fitted})
            write_csv(outdir / "twopoint_fit.csv", ["run_id", "n", "fitted"], frows)
            staged.append("twopoint_fit.csv")
        except ValueError:
            pass
    traces = rundir / "traces.jsonl"
    if traces.exists():
        from .explorer import read_traces_jsonl

        trs = read_traces_jsonl(traces)
        gaps = {}
        for tr in trs:
            for a, b in zip(tr.S, tr.S[1:]):
                gaps[b - a] = gaps.get(b - a, 0) + 1
        run_id = json.loads((rundir / "manifest.json").read_text())["run_id"] \
            if (rundir / "manifest.json").exists() else "adhoc"
        rows = [{"run_id": run_id, "gap": g, "count": c}
                for g, c in sorted(gaps.items())]
        write_csv(outdir / "gaps.csv", ["run_id", "gap", "count"], rows)
        staged.append("gaps.csv")
    print(f"staged {', '.join(staged)} -> {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ozlab",
                                 description="random-cluster simulation lab")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the stages of a config file")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--threads", type=int)
    p_run.add_argument("--out")
    p_run.set_defaults(func=cmd_run)

    p_kmrp = sub.add_parser("kmrp", help="renewal-calculus utilities")
    ksub = p_kmrp.add_subparsers(dest="kmrp_command", required=True)
    p_solve = ksub.add_parser("solve", help="solve the survival rate of a step law")
    p_solve.add_argument("law")
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=cmd_kmrp_solve)
    p_check = ksub.add_parser("check", help="check the pure-exponential asymptotics")
    p_check.add_argument("law")
    p_check.add_argument("--n", type=int, default=300)
    p_check.add_argument("--tol", type=float, default=0.02)
    p_check.set_defaults(func=cmd_kmrp_check)

    p_exp = sub.add_parser("explore", help="grow a conditioned trace ensemble")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--seed", type=int)
    p_exp.add_argument("--threads", type=int)
    p_exp.add_argument("--out")
    p_exp.set_defaults(func=cmd_explore)

    p_w = sub.add_parser("wulff", help="direction-resolved shape analysis")
    p_w.add_argument("--config", required=True)
    p_w.add_argument("--seed", type=int)
    p_w.add_argument("--threads", type=int)
    p_w.add_argument("--out")
    p_w.set_defaults(func=cmd_wulff)

    p_v = sub.add_parser("verify", help="verification suites")
    vsub = p_v.add_subparsers(dest="verify_command", required=True)
    p_vo = vsub.add_parser("oracle", help="sampler vs exact enumeration gate")
    p_vo.add_argument("--threads", type=int)
    p_vo.set_defaults(func=cmd_verify_oracle)

    p_r = sub.add_parser("report", help="stage plot inputs from a run directory")
    p_r.add_argument("--run", required=True)
    p_r.add_argument("--out", required=True)
    p_r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"ozlab: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"ozlab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
