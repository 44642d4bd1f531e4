"""Command-line front end and experiment orchestration.

Subcommands: generate (ensemble member to a matrix file), analyze
(single-network report), sweep (small-world ensemble sweep to CSV),
converge (analytic-versus-empirical convergence experiment to CSV) and
simulate (dump a sampled trajectory).  All randomness derives from a
master seed through indexed stream splitting, so output is byte-identical
across runs and independent of the worker count.

Exit codes: 0 success, 1 "not synchronizable" verdict, 2 usage or input
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import motifs, netgen, simulate, spectral, synccore
from .errors import (
    LinsyncError,
    MatrixFormatError,
    SimulationRefusedError,
    ValidityError,
)

__all__ = ["SweepSpec", "run_sweep", "run_converge", "main"]

EXIT_OK = 0
EXIT_NOT_SYNCHRONIZABLE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if row.get(k) is None else _fmt(row[k]) for k in header) + "\n")


@dataclass(frozen=True)
class SweepSpec:
    n: int
    d: int
    c_values: tuple
    p_values: tuple
    realizations: int
    seed: int
    dynamics: synccore.DynamicsParams
    low_orders: tuple = (2, 10, 50)
    tol: float = 1e-10
    max_terms: int = 1_000_000
    output_path: str = "sweep"

    def validate(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not self.p_values:
            raise ValueError("p value list must not be empty")
        if not self.c_values:
            raise ValueError("c value list must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError("p values must lie in [0, 1]")
        if any(m < 0 for m in self.low_orders):
            raise ValueError("low orders must be >= 0")
        netgen.RingEnsembleParams(
            n=self.n, d=self.d, c=self.c_values[0], p=self.p_values[0]
        ).validate()


def _realization_seed(master: int, cell: int, realization: int) -> int:
    seq = np.random.SeedSequence(master, spawn_key=(cell, realization))
    return int(seq.generate_state(1, np.uint64)[0])


def _make_network(n, d, c, p, master_seed, cell, realization):
    params = netgen.RingEnsembleParams(n=n, d=d, c=c, p=p, seed=master_seed)
    rng = netgen.split_rng(master_seed, cell, realization)
    return netgen.rewire(netgen.build_ring(params), params, rng)


def _sweep_task(args):
    spec, cell, c, p, r = args
    C = _make_network(spec.n, spec.d, c, p, spec.seed, cell, r)
    summary = spectral.classify(C)
    row = {
        "p": p,
        "c": c,
        "realization_id": r,
        "seed": _realization_seed(spec.seed, cell, r),
        "sigma2": None,
        "re_lambda1": summary.re_lambda1,
        "re_lambda2": summary.re_lambda2,
        "rho_CU": summary.rho_CU,
        "valid": summary.rho_CU < 1.0,
    }
    for M in spec.low_orders:
        row[f"sigma2_M{M}"] = None
    if row["valid"]:
        est = synccore.sigma2(
            C, spec.dynamics, tol=spec.tol, max_terms=spec.max_terms, method="fixed_point"
        )
        row["sigma2"] = est.sigma2
        if spec.low_orders:
            ledger = motifs.sigma2_low_order(C, spec.dynamics, max(spec.low_orders))
            for M in spec.low_orders:
                row[f"sigma2_M{M}"] = float(ledger.cumulative_sigma2[M])
    return (cell, r, row)


def _map_tasks(task_fn, tasks, threads: int):
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(task_fn, tasks, chunksize=4))
    return [task_fn(t) for t in tasks]


def run_sweep(spec: SweepSpec, threads: int = 1):
    """Run the ensemble sweep; returns (rows, summary_rows)."""
    spec.validate()
    cells = [(c, p) for p in spec.p_values for c in spec.c_values]
    tasks = [
        (spec, cell, c, p, r)
        for cell, (c, p) in enumerate(cells)
        for r in range(spec.realizations)
    ]
    results = _map_tasks(_sweep_task, tasks, threads)
    results.sort(key=lambda item: (item[0], item[1]))
    rows = [row for _, _, row in results]

    summary_rows = []
    for cell, (c, p) in enumerate(cells):
        cell_rows = [row for row in rows if row["c"] == c and row["p"] == p]
        valid = [row for row in cell_rows if row["valid"]]
        summary = {
            "p": p,
            "c": c,
            "rows_total": len(cell_rows),
            "rows_valid": len(valid),
            "rows_discarded": len(cell_rows) - len(valid),
        }
        def _stats(key):
            vals = np.array([row[key] for row in valid], dtype=float)
            if len(vals) == 0:
                return None, None
            sd = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            return float(vals.mean()), sd
        summary["mean_sigma2"], summary["sd_sigma2"] = _stats("sigma2")
        for M in spec.low_orders:
            summary[f"mean_sigma2_M{M}"], summary[f"sd_sigma2_M{M}"] = _stats(
                f"sigma2_M{M}"
            )
        summary["mean_re_lambda1"], summary["sd_re_lambda1"] = _stats("re_lambda1")
        summary["mean_re_lambda2"], summary["sd_re_lambda2"] = _stats("re_lambda2")
        summary_rows.append(summary)
    return rows, summary_rows


def write_sweep_csv(spec: SweepSpec, rows, summary_rows) -> tuple[str, str]:
    header = ["p", "c", "realization_id", "seed", "sigma2"]
    header += [f"sigma2_M{M}" for M in spec.low_orders]
    header += ["re_lambda1", "re_lambda2", "rho_CU", "valid"]
    rows_path = spec.output_path + "_rows.csv"
    summary_path = spec.output_path + "_summary.csv"
    _write_csv(rows_path, header, rows)
    sheader = ["p", "c", "rows_total", "rows_valid", "rows_discarded", "mean_sigma2", "sd_sigma2"]
    for M in spec.low_orders:
        sheader += [f"mean_sigma2_M{M}", f"sd_sigma2_M{M}"]
    sheader += ["mean_re_lambda1", "sd_re_lambda1", "mean_re_lambda2", "sd_re_lambda2"]
    _write_csv(summary_path, sheader, summary_rows)
    return rows_path, summary_path


def _converge_task(args):
    n, d, c, p, L, master_seed, cell, r, dynamics, dt, tol = args
    C = _make_network(n, d, c, p, master_seed, cell, r)
    summary = spectral.classify(C)
    if summary.rho_CU >= 1.0:
        return (cell, r, None)
    est = synccore.sigma2(C, dynamics, tol=tol, method="fixed_point")
    config = simulate.SimulationConfig(
        params=dynamics, samples=L, seed=_realization_seed(master_seed, cell, r), dt=dt
    )
    batch = simulate.simulate_ou_exact(C, config)
    emp = simulate.empirical_sigma2(batch)
    rel_err = abs(est.sigma2 - emp.sigma2) / est.sigma2
    return (cell, r, rel_err)


def run_converge(
    n: int,
    d: int,
    c: float,
    p_values,
    lengths,
    realizations: int,
    seed: int,
    dynamics: synccore.DynamicsParams,
    dt: float = 1.0,
    tol: float = 1e-10,
    threads: int = 1,
):
    """Analytic-versus-empirical convergence experiment; returns cell rows."""
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    if not p_values or not lengths:
        raise ValueError("p and L lists must not be empty")
    if dynamics.kind != "continuous":
        raise ValueError("the convergence experiment uses continuous dynamics")
    cells = [(p, L) for p in p_values for L in lengths]
    tasks = [
        (n, d, c, p, L, seed, cell, r, dynamics, dt, tol)
        for cell, (p, L) in enumerate(cells)
        for r in range(realizations)
    ]
    results = _map_tasks(_converge_task, tasks, threads)
    by_cell = {}
    discarded = {}
    for cell, r, rel_err in results:
        if rel_err is None:
            discarded[cell] = discarded.get(cell, 0) + 1
        else:
            by_cell.setdefault(cell, []).append(rel_err)
    rows = []
    for cell, (p, L) in enumerate(cells):
        errs = np.array(by_cell.get(cell, []))
        row = {
            "p": p,
            "L": L,
            "count": len(errs),
            "discarded": discarded.get(cell, 0),
            "mean_rel_abs_err": float(errs.mean()) if len(errs) else None,
            "sd_log10_rel_err": (
                float(np.log10(np.maximum(errs, 1e-300)).std(ddof=1))
                if len(errs) > 1
                else None
            ),
        }
        rows.append(row)
    return rows


def _threads_from(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("LINSYNC_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _dynamics_from(args) -> synccore.DynamicsParams:
    return synccore.DynamicsParams(kind=args.kind, theta=args.theta, zeta=args.zeta)


def _add_dynamics_args(sub):
    sub.add_argument("--kind", choices=("continuous", "discrete"), default="continuous")
    sub.add_argument("--theta", type=float, default=1.0)
    sub.add_argument("--zeta", type=float, default=1.0)


def _cmd_generate(args) -> int:
    params = netgen.RingEnsembleParams(n=args.n, d=args.d, c=args.c, p=args.p, seed=args.seed)
    params.validate()
    rng = netgen.split_rng(args.seed, 0, 0)
    C = netgen.rewire(netgen.build_ring(params), params, rng)
    netgen.write_matrix(C, args.out)
    report = netgen.check_zero_mode(C)
    summary = spectral.classify(C)
    print(f"wrote {args.out}: n={C.n}")
    print(f"zero-mode residual: {report.residual:.3g}")
    print(f"rho(CU): {summary.rho_CU:.12g}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    C = netgen.read_matrix(args.matrix)
    summary = spectral.classify(C)
    print(f"n: {C.n}")
    print(f"zero mode: {'present' if summary.zero_mode_index is not None else 'absent'}")
    print(f"re_lambda1: {summary.re_lambda1:.12g}")
    print(f"re_lambda2: {summary.re_lambda2:.12g}")
    print(f"rho(CU): {summary.rho_CU:.12g}")
    print(f"sync_continuous: {summary.sync_continuous}")
    print(f"sync_discrete: {summary.sync_discrete}")
    if summary.rho_CU >= 1.0:
        print("verdict: not synchronizable (rho(CU) >= 1); no sigma2 computed")
        return EXIT_NOT_SYNCHRONIZABLE

    dynamics = _dynamics_from(args)
    est = synccore.sigma2(
        C, dynamics, tol=args.tol, max_terms=args.max_terms, method=args.method
    )
    if not est.converged:
        print(
            f"numerical failure: sigma2 did not converge within {args.max_terms} "
            f"terms (residual {est.residual:.3g})",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL
    print(
        f"sigma2: {est.sigma2:.12g} (method={est.method}, terms={est.terms_used}, "
        f"residual={est.residual:.3g})"
    )
    report = {
        "sigma2": est.sigma2,
        "method": est.method,
        "terms": est.terms_used,
        "residual": est.residual,
        "re_lambda1": summary.re_lambda1,
        "re_lambda2": summary.re_lambda2,
        "rho_CU": summary.rho_CU,
        "sync_continuous": summary.sync_continuous,
        "sync_discrete": summary.sync_discrete,
        "symmetric_closed_form": None,
        "kemeny_constant": None,
    }
    if C.is_symmetric():
        if dynamics.kind == "continuous":
            closed = spectral.sigma2_symmetric_continuous(summary, C.n)
            closed *= dynamics.zeta**2 / dynamics.theta
        else:
            closed = spectral.sigma2_symmetric_discrete(summary, C.n)
            closed *= dynamics.zeta**2
        print(f"symmetric closed form: {closed:.12g}")
        report["symmetric_closed_form"] = closed
        if np.all(C.weights >= 0):
            K = spectral.kemeny_constant(summary, C.n)
            print(f"Kemeny constant: {K:.12g}")
            report["kemeny_constant"] = K
    if args.csv:
        _write_csv(args.csv, list(report), [report])
    if args.motifs:
        ledger = motifs.sigma2_low_order(C, dynamics, args.motif_order)
        ledger.write_csv(args.motifs)
        print(f"wrote motif ledger to {args.motifs}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    dynamics_cfg = cfg.get("dynamics", {})
    kind = args.kind or dynamics_cfg.get("kind", "continuous")
    dynamics = synccore.DynamicsParams(
        kind=kind,
        theta=args.theta if args.theta is not None else dynamics_cfg.get("theta", 1.0),
        zeta=args.zeta if args.zeta is not None else dynamics_cfg.get("zeta", 1.0),
    )

    def pick(flag, key, default=None):
        if flag is not None:
            return flag
        return cfg.get(key, default)

    spec = SweepSpec(
        n=pick(args.n, "n"),
        d=pick(args.d, "d"),
        c_values=tuple(pick(args.c_values, "c_values", [])),
        p_values=tuple(pick(args.p_values, "p_values", [])),
        realizations=pick(args.realizations, "realizations", 200),
        seed=pick(args.seed, "seed", 0),
        dynamics=dynamics,
        low_orders=tuple(pick(args.low_orders, "low_orders", [2, 10, 50])),
        tol=pick(args.tol, "tol", 1e-10),
        output_path=pick(args.out, "output_path", "sweep"),
    )
    if spec.n is None or spec.d is None:
        raise ValueError("n and d must be given via flags or the config file")
    spec.validate()
    rows, summary_rows = run_sweep(spec, threads=_threads_from(args))
    rows_path, summary_path = write_sweep_csv(spec, rows, summary_rows)
    for s in summary_rows:
        mean = "n/a" if s["mean_sigma2"] is None else f"{s['mean_sigma2']:.6g}"
        print(
            f"p={s['p']:g} c={s['c']:g}: mean sigma2 {mean} "
            f"({s['rows_valid']}/{s['rows_total']} valid)"
        )
    print(f"wrote {rows_path} and {summary_path}")
    return EXIT_OK


def _cmd_converge(args) -> int:
    dynamics = synccore.DynamicsParams(kind="continuous", theta=args.theta, zeta=args.zeta)
    rows = run_converge(
        n=args.n,
        d=args.d,
        c=args.c,
        p_values=args.p_values,
        lengths=args.lengths,
        realizations=args.realizations,
        seed=args.seed,
        dynamics=dynamics,
        dt=args.dt,
        threads=_threads_from(args),
    )
    header = ["p", "L", "count", "discarded", "mean_rel_abs_err", "sd_log10_rel_err"]
    _write_csv(args.out, header, rows)
    for row in rows:
        err = "n/a" if row["mean_rel_abs_err"] is None else f"{row['mean_rel_abs_err']:.4g}"
        print(f"p={row['p']:g} L={row['L']}: mean rel err {err} ({row['count']} networks)")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    C = netgen.read_matrix(args.matrix)
    dynamics = _dynamics_from(args)
    config = simulate.SimulationConfig(
        params=dynamics,
        samples=args.samples,
        seed=args.seed,
        dt=args.dt,
        burn_in=args.burn_in,
    )
    if dynamics.kind == "continuous":
        batch = simulate.simulate_ou_exact(C, config)
    else:
        batch = simulate.simulate_var(C, config)
    batch.write_csv(args.out)
    emp = simulate.empirical_sigma2(batch)
    print(f"wrote {args.out}: {args.samples} samples of {C.n} nodes")
    print(f"empirical sigma2: {emp.sigma2:.12g} (stderr {emp.residual:.3g})")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linsync",
        description="Analytic and simulated distance from synchronization "
        "for weighted directed networks under noise-driven linear dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate an ensemble network to a matrix file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--c", type=float, required=True)
    g.add_argument("--p", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    a = sub.add_parser("analyze", help="analyze a network from a matrix file")
    a.add_argument("matrix")
    _add_dynamics_args(a)
    a.add_argument("--method", choices=("fixed_point", "series"), default="fixed_point")
    a.add_argument("--tol", type=float, default=1e-10)
    a.add_argument("--max-terms", type=int, default=1_000_000)
    a.add_argument("--csv", help="write the report as a one-row CSV")
    a.add_argument("--motifs", help="write the motif ledger CSV to this path")
    a.add_argument("--motif-order", type=int, default=50)
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("sweep", help="ensemble sweep over p and c values")
    s.add_argument("--config", help="JSON file mirroring the sweep spec fields")
    s.add_argument("--n", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--c-values", type=_float_list)
    s.add_argument("--p-values", type=_float_list)
    s.add_argument("--realizations", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--kind", choices=("continuous", "discrete"))
    s.add_argument("--theta", type=float)
    s.add_argument("--zeta", type=float)
    s.add_argument("--low-orders", type=_int_list)
    s.add_argument("--tol", type=float)
    s.add_argument("--out", help="output path prefix for the rows/summary CSVs")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=_cmd_sweep)

    v = sub.add_parser("converge", help="empirical-vs-analytic convergence experiment")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--c", type=float, required=True)
    v.add_argument("--p-values", type=_float_list, required=True)
    v.add_argument("--lengths", type=_int_list, required=True)
    v.add_argument("--realizations", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dt", type=float, default=1.0)
    v.add_argument("--theta", type=float, default=1.0)
    v.add_argument("--zeta", type=float, default=1.0)
    v.add_argument("--out", required=True)
    v.add_argument("--threads", type=int)
    v.set_defaults(func=_cmd_converge)

    m = sub.add_parser("simulate", help="sample a trajectory and dump it as CSV")
    m.add_argument("matrix")
    _add_dynamics_args(m)
    m.add_argument("--samples", type=int, required=True)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--dt", type=float, default=1.0)
    m.add_argument("--burn-in", type=int, default=None)
    m.add_argument("--out", required=True)
    m.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SimulationRefusedError, ValidityError) as exc:
        print(f"not synchronizable: {exc}", file=sys.stderr)
        return EXIT_NOT_SYNCHRONIZABLE
    except (MatrixFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LinsyncError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
