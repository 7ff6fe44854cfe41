"""Command-line surface: spectrum, birkhoff, invert, evolve, counterexample,
verify.

Configuration may come from a JSON file (--config, "schema": 1) with flags
overriding file values.  Every run writes its artifact files plus a
manifest.json recording inputs, versions, seeds, and wall time.  Exit codes:
0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import birkhoff as bk
from . import counterexample as ce
from . import flow
from .io import write_csv, write_manifest
from .lax import assemble_lax_matrix, eigendecompose
from .potentials import make_potential, potential_from_json
from .verify import SUITES, run_suite


class ValidationError(Exception):
    pass


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("BO_BIRKHOFF_JOBS", "1")))
    except ValueError:
        return 1


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        if cfg.get("schema", 1) != 1:
            raise ValidationError(f"unsupported config schema {cfg.get('schema')!r}")
    return cfg


def _get(args, cfg, key, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _resolve_potential(args, cfg):
    if _get(args, cfg, "input"):
        with open(_get(args, cfg, "input")) as fh:
            return potential_from_json(json.load(fh)), {"input": _get(args, cfg, "input")}
    family = _get(args, cfg, "family", "cosine")
    n_max = int(_get(args, cfg, "n_max", 16))
    params = {}
    if family == "cosine":
        params["amplitude"] = float(_get(args, cfg, "amplitude", 1.0))
    elif family == "random":
        params["seed"] = int(_get(args, cfg, "seed", 0))
        params["decay"] = float(_get(args, cfg, "decay", 2.0))
        params["amplitude"] = float(_get(args, cfg, "amplitude", 1.0))
    elif family == "counterexample":
        params["beta"] = float(_get(args, cfg, "beta", 2.0))
        params["q"] = float(_get(args, cfg, "q_single", 0.9))
    elif family != "zero":
        raise ValidationError(f"unknown family {family!r}")
    return make_potential(family, n_max, **params), {"family": family, "n_max": n_max, **params}


def _outdir(args, cfg) -> Path:
    out = Path(_get(args, cfg, "out", "."))
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ValidationError(f"output directory not writable: {exc}")
    return out


def cmd_spectrum(args) -> int:
    started = time.time()
    cfg = _load_config(args)
    u, meta = _resolve_potential(args, cfg)
    M = int(_get(args, cfg, "modes", 256))
    out = _outdir(args, cfg)
    sd = eigendecompose(assemble_lax_matrix(u, M))
    K = sd.reliable_count
    rows = []
    for n in range(K + 1):
        g = 0.0 if n == 0 else sd.gaps[n - 1]
        rows.append((n, sd.lambdas[n], g, sd.inner1[n].real, sd.inner1[n].imag))
    path = out / "spectrum.csv"
    write_csv(path, ["n", "lambda", "gamma", "inner1_re", "inner1_im"], rows)
    write_manifest(out, "spectrum", {"modes": M, **meta}, [path], started=started)
    print(f"wrote {path} ({K + 1} reliable rows)")
    return 0


def cmd_birkhoff(args) -> int:
    started = time.time()
    cfg = _load_config(args)
    u, meta = _resolve_potential(args, cfg)
    M = int(_get(args, cfg, "modes", 256))
    out = _outdir(args, cfg)
    co = bk.birkhoff_forward(u, M, refine=bool(_get(args, cfg, "refine", False)))
    rows = [(0, 0.0, 0.0, 0.0, co.kappas[0])]
    for n in range(1, co.count + 1):
        z = co.zetas[n - 1]
        rows.append((n, z.real, z.imag, co.gaps[n - 1], co.kappas[n]))
    path = out / "birkhoff.csv"
    write_csv(path, ["n", "zeta_re", "zeta_im", "gamma", "kappa"], rows)
    write_manifest(out, "birkhoff", {"modes": M, **meta}, [path], started=started)
    print(f"wrote {path}")
    return 0


def cmd_invert(args) -> int:
    started = time.time()
    cfg = _load_config(args)
    M = int(_get(args, cfg, "modes", 128))
    out = _outdir(args, cfg)
    zeta_path = _get(args, cfg, "zeta")
    if not zeta_path:
        raise ValidationError("invert requires --zeta pointing at a birkhoff.csv")
    import csv as _csv

    with open(zeta_path) as fh:
        reader = _csv.DictReader(fh)
        zr = [(int(r["n"]), float(r["zeta_re"]), float(r["zeta_im"])) for r in reader]
    zr = [t for t in zr if t[0] >= 1]
    zr.sort()
    target = np.array([re + 1j * im for _, re, im in zr])
    n_max = int(_get(args, cfg, "n_max", min(len(target), M // 2)))
    res = bk.birkhoff_inverse(target, n_max=n_max, M=M)
    pot_path = out / "potential.json"
    from .potentials import potential_to_json
    pot_path.write_text(json.dumps(potential_to_json(res.potential), indent=1) + "\n")
    log_path = out / "inverse_log.csv"
    write_csv(log_path, ["iteration", "residual", "step_norm"], res.log)
    write_manifest(out, "invert", {"modes": M, "n_max": n_max, "zeta": str(zeta_path)},
                   [pot_path, log_path], started=started)
    print(f"wrote {pot_path} (residual {res.residual_norm:.3e}, "
          f"converged {res.converged})")
    return 0 if res.converged else 2


def cmd_evolve(args) -> int:
    started = time.time()
    cfg = _load_config(args)
    u, meta = _resolve_potential(args, cfg)
    M = int(_get(args, cfg, "modes", 128))
    method = _get(args, cfg, "method", "birkhoff")
    t_end = float(_get(args, cfg, "t_end", 1.0))
    samples = int(_get(args, cfg, "samples", 11))
    dt = float(_get(args, cfg, "dt", 1e-4))
    grid = int(_get(args, cfg, "grid", max(256, 4 * u.n_max)))
    out = _outdir(args, cfg)
    tgrid = np.linspace(0.0, t_end, samples)
    if method == "birkhoff":
        traj = flow.evolve_birkhoff_trajectory(u, tgrid, M)
    elif method == "direct":
        traj = flow.evolve_direct_trajectory(u, tgrid, dt, grid)
    else:
        raise ValidationError(f"unknown method {method!r}")
    n_rep = max(s.n_max for s in traj.states)
    header = ["t"]
    for n in range(1, n_rep + 1):
        header += [f"u{n}_re", f"u{n}_im"]
    rows = []
    for t, s in zip(traj.times, traj.states):
        c = np.zeros(n_rep, dtype=complex)
        c[:s.n_max] = s.coeffs
        row = [t]
        for v in c:
            row += [v.real, v.imag]
        rows.append(row)
    path = out / "trajectory.csv"
    write_csv(path, header, rows)
    write_manifest(out, "evolve",
                   {"modes": M, "method": method, "t_end": t_end,
                    "samples": samples, "dt": dt, "grid": grid, **meta},
                   [path], started=started)
    print(f"wrote {path}")
    return 0


def _ce_row(task):
    beta, q, run_observable = task
    p = ce.CounterexampleParams(beta, q)
    cv = ce.cross_validate_lambda0(p)
    trend = ce.norm_and_weak_trend(beta, [q])[0]
    ratio = float("nan")
    observable = None
    if run_observable:
        rep = flow.weak_limit_observable(beta, q, np.linspace(0.0, 1.0, 21),
                                         coeff_tail=1e-3, inverse_tol=1e-3)
        ratio = rep.ratio
        observable = (rep.times, rep.xi)
    row = (q, p.eps,
           float("nan") if cv.mu_root is None else cv.mu_root,
           cv.lambda0, trend.norm_sqrtlog, ratio)
    return row, observable


def cmd_counterexample(args) -> int:
    started = time.time()
    cfg = _load_config(args)
    beta = float(_get(args, cfg, "beta", 2.0))
    qlist = _get(args, cfg, "q", "0.9,0.99")
    if isinstance(qlist, str):
        qvals = [float(s) for s in qlist.split(",")]
    else:
        qvals = [float(s) for s in qlist]
    run_obs = bool(_get(args, cfg, "observable", False))
    jobs = int(_get(args, cfg, "jobs", _default_jobs()))
    out = _outdir(args, cfg)
    tasks = [(beta, q, run_obs) for q in qvals]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_ce_row, tasks))
    else:
        results = [_ce_row(t) for t in tasks]
    rows = [r for r, _ in results]
    path = out / "ce_sweep.csv"
    write_csv(path, ["q", "eps", "mu_q", "lambda0_matrix", "norm_sqrtlog",
                     "xi_window_ratio"], rows)
    outputs = [path]
    for (q, *_), (_, obs) in zip(rows, results):
        if obs is not None:
            times, xi = obs
            opath = out / f"observable_q{q:g}.csv"
            write_csv(opath, ["t", "xi_re", "xi_im"],
                      [(t, z.real, z.imag) for t, z in zip(times, xi)])
            outputs.append(opath)
    write_manifest(out, "counterexample",
                   {"beta": beta, "q": qvals, "observable": run_obs, "jobs": jobs},
                   outputs, started=started)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    suite = _get(args, cfg, "suite", "all")
    M = int(_get(args, cfg, "modes", 128))
    seed = int(_get(args, cfg, "seed", 0))
    names = "all" if suite == "all" else [suite]
    if names != "all":
        for name in names:
            if name not in SUITES:
                raise ValidationError(f"unknown suite {name!r}; have {sorted(SUITES)}")
    rows = run_suite(names, M=M, seed=seed)
    width = max(len(r[1]) for r in rows) + 2
    failures = 0
    for suite_name, label, passed, detail in rows:
        status = "PASS" if passed else "FAIL"
        if not passed:
            failures += 1
        print(f"[{status}] {suite_name:15s} {label:<{width}s} {detail}")
    print(f"{len(rows) - failures}/{len(rows)} checks passed")
    return 0 if failures == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bolax",
                                description="Benjamin-Ono Lax spectrum, Birkhoff "
                                            "coordinates, and flows")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, potential=True):
        sp.add_argument("--config", help="JSON config file (flags override)")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--modes", type=int, help="operator truncation M")
        if potential:
            sp.add_argument("--family",
                            choices=["zero", "cosine", "random", "counterexample"])
            sp.add_argument("--amplitude", type=float)
            sp.add_argument("--n-max", dest="n_max", type=int)
            sp.add_argument("--seed", type=int)
            sp.add_argument("--decay", type=float)
            sp.add_argument("--beta", type=float)
            sp.add_argument("--q-single", dest="q_single", type=float)
            sp.add_argument("--input", help="potential JSON file")

    sp = sub.add_parser("spectrum", help="eigenvalues, gaps, inner products")
    add_common(sp)
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("birkhoff", help="coordinates, actions, norming constants")
    add_common(sp)
    sp.add_argument("--refine", action="store_true", default=None)
    sp.set_defaults(fn=cmd_birkhoff)

    sp = sub.add_parser("invert", help="recover a potential from coordinates")
    add_common(sp, potential=False)
    sp.add_argument("--zeta", help="birkhoff.csv with target coordinates")
    sp.add_argument("--n-max", dest="n_max", type=int)
    sp.set_defaults(fn=cmd_invert)

    sp = sub.add_parser("evolve", help="time evolution (birkhoff or direct)")
    add_common(sp)
    sp.add_argument("--method", choices=["birkhoff", "direct"])
    sp.add_argument("--t-end", dest="t_end", type=float)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--grid", type=int)
    sp.set_defaults(fn=cmd_evolve)

    sp = sub.add_parser("counterexample", help="escaping-eigenvalue family sweep")
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--q", help="comma-separated q values")
    sp.add_argument("--observable", action="store_true", default=None)
    sp.add_argument("--jobs", type=int)
    sp.set_defaults(fn=cmd_counterexample)

    sp = sub.add_parser("verify", help="run the self-check suites")
    sp.add_argument("--config")
    sp.add_argument("--suite", default=None,
                    help="all or one of: " + ", ".join(sorted(SUITES)))
    sp.add_argument("--modes", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical failures
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
