"""Batch experiment runner.

Subcommands: generate, expansion-audit, sep-lab, hgp, decode-bench,
thermal, selftest.  Every run is fully determined by (config, master
seed); CSV outputs are byte-identical across reruns and worker counts.
A flat key=value config file can supply any long option; explicit flags
win.  Each --out write is accompanied by a .manifest.json echoing the
configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .bench import (SCHEMA_VERSION, family_checks, family_params,
                    memory_time_campaign, parse_time_spec, threshold_bench)
from .seeds import default_workers, derive_seed


def _write_manifest(out_path, args, t0):
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "config") and not callable(v)}
    manifest = {
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": {k: (v if isinstance(v, (int, float, str, bool, type(None)))
                       else str(v)) for k, v in config.items()},
        "wall_time_s": round(time.time() - t0, 3),
    }
    with open(str(out_path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def _write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in columns})


def _build_code(args):
    from .diffusion import build_diffusion_code
    from .generators import gen_gallager, gen_geometric

    rng = np.random.default_rng(args.seed)
    if args.kind == "diffusion":
        m = args.m if args.m is not None else family_checks(
            args.n, args.wbit, args.wcheck)
        params = family_params(args.n, args.wbit, args.wcheck, args.T,
                               args.seed, args.time_mode)
        if args.m is not None and args.m != params.m:
            from .diffusion import DiffusionParams

            params = DiffusionParams(n=args.n, m=m, wbit=args.wbit,
                                     wcheck=args.wcheck,
                                     T=parse_time_spec(args.T, args.n,
                                                       args.n * args.wbit),
                                     time_mode=args.time_mode, seed=args.seed)
        return build_diffusion_code(params)
    if args.kind == "gallager":
        m = args.m if args.m is not None else args.n * args.wbit // args.wcheck
        return gen_gallager(args.n, m, args.wbit, args.wcheck, rng)
    if args.kind == "geometric":
        return gen_geometric(args.n, args.m, args.wbit, args.dim,
                             args.beta, args.alpha, rng)
    raise SystemExit(f"error: unknown --kind {args.kind!r}")


def cmd_generate(args):
    t0 = time.time()
    G = _build_code(args)
    G.save(args.out)
    if "final_positions" in G.provenance:
        with open(str(args.out) + ".positions", "w") as fh:
            for v in G.provenance["final_positions"]:
                fh.write(f"{v}\n")
    _write_manifest(args.out, args, t0)
    print(f"wrote {args.out}.json ({G.n_bits} bits, {G.n_checks} checks, "
          f"{G.n_edges} edges)")
    return 0


def cmd_expansion_audit(args):
    from .expansion import (audit_confinement, audit_left_expansion,
                            audit_right_expansion, audit_unique_neighbor)
    from .tanner import TannerGraph

    t0 = time.time()
    G = TannerGraph.load(args.input)
    gamma = Fraction(args.gamma_num, args.gamma_den)
    rng = np.random.default_rng(args.seed)
    kwargs = dict(mode=args.mode, rng=rng, n_samples=args.n_samples)
    if args.side == "left":
        report = audit_left_expansion(G, args.delta, gamma, **kwargs)
    elif args.side == "right":
        report = audit_right_expansion(G, args.delta, gamma, **kwargs)
    elif args.side == "unique":
        report = audit_unique_neighbor(G, args.delta, gamma, **kwargs)
    elif args.side == "confinement":
        H = G.to_parity_check_matrix("parity")
        report = audit_confinement(H, args.delta, gamma, args.mode)
    else:
        raise SystemExit(f"error: unknown --side {args.side!r}")
    payload = report.summary()
    payload["schema_version"] = SCHEMA_VERSION
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    _write_manifest(args.out, args, t0)
    print(f"{args.side} audit: certified={report.certified} "
          f"worst_ratio={report.worst_ratio}")
    return 0


def cmd_sep_lab(args):
    from .sep import (GapVector, coupled_gap_run, gap_transition_matrix,
                      sep_run_instrumented, SepState, small_gap_tail,
                      stationary_distribution, tv_distance,
                      vertex_removal_smaller)

    t0 = time.time()
    rows = []
    if args.mode == "monotonicity":
        for trial in range(args.trials):
            rng = np.random.default_rng(
                derive_seed(args.seed, "sep/monotonicity", trial))
            gaps = 1 + rng.integers(0, max(2, args.N // args.k), size=args.k)
            g = GapVector(gaps)
            gp = vertex_removal_smaller(
                g, int(rng.integers(0, g.N - args.k + 1)), rng)
            out = coupled_gap_run(g, gp, args.steps, rng)
            rows.append({
                "schema_version": SCHEMA_VERSION, "mode": args.mode,
                "trial": trial, "N": g.N, "N_prime": gp.N, "k": args.k,
                "steps": args.steps, "observable": "ordering_held",
                "value": int(out["ordering_held"]),
                "master_seed": args.seed,
            })
        columns = ["schema_version", "mode", "trial", "N", "N_prime", "k",
                   "steps", "observable", "value", "master_seed"]
    elif args.mode == "induced-chain":
        rng = np.random.default_rng(derive_seed(args.seed, "sep/induced", 0))
        pos = rng.choice(args.N, size=args.k, replace=False)
        out = sep_run_instrumented(SepState(args.N, pos), args.steps, rng)
        for cat in sorted(out["counts"], key=str):
            mu = out["expected"][cat]
            sd = out["variance"][cat] ** 0.5
            rows.append({
                "schema_version": SCHEMA_VERSION, "mode": args.mode,
                "trial": 0, "N": args.N, "N_prime": "", "k": args.k,
                "steps": args.steps, "observable": f"count[{cat}]",
                "value": f"{out['counts'][cat]};expected={mu:.3f};sigma={sd:.3f}",
                "master_seed": args.seed,
            })
        columns = ["schema_version", "mode", "trial", "N", "N_prime", "k",
                   "steps", "observable", "value", "master_seed"]
    elif args.mode == "tail-bound":
        for d in range(1, args.d_max + 1):
            for Q in range(1, args.k + 1):
                out = small_gap_tail(args.N, args.k, d, Q)
                rows.append({
                    "schema_version": SCHEMA_VERSION, "mode": args.mode,
                    "trial": 0, "N": args.N, "N_prime": "", "k": args.k,
                    "steps": f"d={d};Q={Q}",
                    "observable": "exact_prob;bound",
                    "value": f"{out['exact_prob']};{out['bound']}",
                    "master_seed": args.seed,
                })
        columns = ["schema_version", "mode", "trial", "N", "N_prime", "k",
                   "steps", "observable", "value", "master_seed"]
    elif args.mode == "mixing":
        states, P = gap_transition_matrix(args.N, args.k)
        pi = stationary_distribution(P)
        uniform = np.full(len(states), 1.0 / len(states))
        rows.append({
            "schema_version": SCHEMA_VERSION, "mode": args.mode, "trial": 0,
            "N": args.N, "N_prime": "", "k": args.k, "steps": 0,
            "observable": "tv_stationary_to_uniform",
            "value": tv_distance(pi, uniform), "master_seed": args.seed,
        })
        columns = ["schema_version", "mode", "trial", "N", "N_prime", "k",
                   "steps", "observable", "value", "master_seed"]
    else:
        raise SystemExit(f"error: unknown --mode {args.mode!r}")
    _write_csv(args.out, rows, columns)
    _write_manifest(args.out, args, t0)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_hgp(args):
    from .hgp import hypergraph_product, save_css
    from .tanner import TannerGraph

    t0 = time.time()
    G = TannerGraph.load(args.input)
    code = hypergraph_product(G)
    save_css(code, args.out)
    _write_manifest(args.out, args, t0)
    print(f"wrote {args.out}.json (n_qubits={code.n_qubits}, "
          f"checks={code.n_x_checks}+{code.n_z_checks})")
    return 0


def cmd_decode_bench(args):
    t0 = time.time()
    p_grid = [float(x) for x in args.p_grid.split(",") if x]
    n_grid = [int(x) for x in args.n_grid.split(",") if x]
    if not p_grid:
        raise SystemExit("error: --p-grid is empty")
    if not n_grid:
        raise SystemExit("error: --n-grid is empty")
    rows = threshold_bench(
        args.decoder, n_grid, p_grid, args.trials, args.codes_per_size,
        args.seed, wbit=args.wbit, wcheck=args.wcheck, T_spec=args.T,
        max_iters=args.max_iters, workers=args.workers,
        edge_mode=args.edge_mode)
    columns = ["schema_version", "decoder", "n", "m", "wbit", "wcheck",
               "T_spec", "p", "trials", "failures", "failure_rate",
               "stderr", "master_seed"]
    _write_csv(args.out, rows, columns)
    _write_manifest(args.out, args, t0)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_thermal(args):
    from .thermal import (AnnealSchedule, SpinSystem, equilibrium_energy,
                          quantum_thermal_system, run_anneal)

    t0 = time.time()
    rows = []
    if args.protocol in ("heat", "cool"):
        for instance in range(args.instances):
            code_seed = derive_seed(args.seed, "thermal/code", instance)
            cargs = argparse.Namespace(**vars(args))
            cargs.seed = code_seed
            cargs.kind = args.code_kind.replace("hgp-", "")
            G = _build_code(cargs)
            if args.code_kind.startswith("hgp-"):
                from .hgp import hypergraph_product

                system = quantum_thermal_system(
                    hypergraph_product(G, args.edge_mode), args.sector)
            else:
                system = SpinSystem.from_tanner(G, args.edge_mode)
            if args.protocol == "cool":
                system.spins = np.where(
                    np.random.default_rng(
                        derive_seed(args.seed, "thermal/init", instance)
                    ).random(system.n) < 0.5, -1, 1).astype(np.int8)
                system.recompute()
            sched = AnnealSchedule(
                args.tau_start, args.tau_end, args.delta_tau,
                equil_sweeps=args.equil_sweeps,
                sample_every=args.sample_every, t_eq=args.t_eq)
            rng = np.random.default_rng(
                derive_seed(args.seed, "thermal/dynamics", instance))
            for tau, sweep, e in run_anneal(system, sched, rng):
                rows.append({
                    "schema_version": SCHEMA_VERSION,
                    "protocol": args.protocol, "tau": tau, "sweep": sweep,
                    "energy_density": e, "memory_time": "", "censored": "",
                    "instance_id": instance, "master_seed": args.seed,
                })
    elif args.protocol == "memory":
        records = memory_time_campaign(
            args.n, args.tau, args.trials, args.seed, wbit=args.wbit,
            wcheck=args.wcheck, T_spec=args.T, check_every=args.check_every,
            max_sweeps=args.max_sweeps, workers=args.workers,
            edge_mode=args.edge_mode)
        for i, rec in enumerate(records):
            rows.append({
                "schema_version": SCHEMA_VERSION, "protocol": "memory",
                "tau": args.tau, "sweep": "", "energy_density": "",
                "memory_time": rec["time"], "censored": int(rec["censored"]),
                "instance_id": i, "master_seed": args.seed,
            })
    else:
        raise SystemExit(f"error: unknown --protocol {args.protocol!r}")
    columns = ["schema_version", "protocol", "tau", "sweep", "energy_density",
               "memory_time", "censored", "instance_id", "master_seed"]
    _write_csv(args.out, rows, columns)
    _write_manifest(args.out, args, t0)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_selftest(args):
    """Quick oracle checks across the modules (seconds, not the full
    pytest suite)."""
    import math

    from .gf2 import BitMatrix, rank
    from .sep import (GapVector, coupled_gap_run, gap_transition_matrix,
                      n_compositions, small_gap_tail,
                      stationary_distribution, tv_distance)
    from .diffusion import DiffusionParams, build_diffusion_code
    from .hgp import css_validate, hypergraph_product

    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        failures += 0 if ok else 1

    check("gf2 identity rank", rank(BitMatrix.identity(8)) == 8)
    states, P = gap_transition_matrix(10, 3)
    pi = stationary_distribution(P)
    check("gap chain stationary uniform",
          tv_distance(pi, np.full(len(states), 1 / len(states))) < 1e-10
          and len(states) == n_compositions(10, 3))
    out = small_gap_tail(14, 3, 1, 1)
    check("tail bound dominates", out["exact_prob"] <= out["bound"] + 1e-15)
    rng = np.random.default_rng(0)
    res = coupled_gap_run(GapVector([3, 2, 4]), GapVector([2, 2, 3]),
                          20_000, rng)
    check("coupled ordering holds", res["ordering_held"])
    G = build_diffusion_code(
        DiffusionParams(n=8, m=7, wbit=6, wcheck=7, T=48.0, seed=1))
    check("hgp css identity", css_validate(hypergraph_product(G)))
    print(f"selftest: {5 - failures}/5 passed")
    return 1 if failures else 0


def _add_code_options(p, need_out=True):
    p.add_argument("--kind", default="diffusion",
                   choices=["diffusion", "gallager", "geometric"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None,
                   help="default: ceil(n*wbit/wcheck)")
    p.add_argument("--wbit", type=int, default=9)
    p.add_argument("--wcheck", type=int, default=11)
    p.add_argument("--T", default="N",
                   help="diffusion sweeps: float, 'N', 'n', or 'c*n^a'")
    p.add_argument("--time-mode", default="discrete",
                   choices=["discrete", "continuous"])
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    if need_out:
        p.add_argument("--out", required=True)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diffcodes",
        description="diffusion-code construction, audits and experiments")
    parser.add_argument("--config", default=None,
                        help="flat key=value defaults file; flags override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="construct and serialize a code")
    _add_code_options(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("expansion-audit", help="certify/refute expansion")
    p.add_argument("--input", required=True, help="code file prefix")
    p.add_argument("--side", default="left",
                   choices=["left", "right", "unique", "confinement"])
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--gamma-num", type=int, required=True)
    p.add_argument("--gamma-den", type=int, default=1)
    p.add_argument("--mode", default="exhaustive",
                   choices=["exhaustive", "connected_sets", "sampled"])
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expansion_audit)

    p = sub.add_parser("sep-lab", help="exclusion/gap-process experiments")
    p.add_argument("--mode", required=True,
                   choices=["monotonicity", "induced-chain", "tail-bound",
                            "mixing"])
    p.add_argument("--N", type=int, default=24)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--d-max", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sep_lab)

    p = sub.add_parser("hgp", help="hypergraph product of a stored code")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hgp)

    p = sub.add_parser("decode-bench", help="threshold benchmark")
    p.add_argument("--decoder", required=True, choices=["flip", "bp"])
    p.add_argument("--p-grid", required=True)
    p.add_argument("--n-grid", required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--codes-per-size", type=int, default=5)
    p.add_argument("--wbit", type=int, default=9)
    p.add_argument("--wcheck", type=int, default=11)
    p.add_argument("--T", default="N")
    p.add_argument("--max-iters", type=int, default=60)
    p.add_argument("--edge-mode", default="simple",
                   choices=["simple", "parity"],
                   help="parallel-edge handling of the decoded matrix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode_bench)

    p = sub.add_parser("thermal", help="heating/cooling/memory experiments")
    p.add_argument("--protocol", required=True,
                   choices=["heat", "cool", "memory"])
    p.add_argument("--code-kind", default="diffusion",
                   choices=["diffusion", "gallager", "hgp-diffusion"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--wbit", type=int, default=9)
    p.add_argument("--wcheck", type=int, default=11)
    p.add_argument("--T", default="N")
    p.add_argument("--time-mode", default="discrete")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--sector", default="Z", choices=["X", "Z"])
    p.add_argument("--edge-mode", default="simple",
                   choices=["simple", "parity"])
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--tau-start", type=float, default=0.0)
    p.add_argument("--tau-end", type=float, default=4.0)
    p.add_argument("--delta-tau", type=float, default=0.05)
    p.add_argument("--equil-sweeps", type=int, default=1000)
    p.add_argument("--t-eq", type=int, default=200)
    p.add_argument("--sample-every", type=int, default=10)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--check-every", type=int, default=10)
    p.add_argument("--max-sweeps", type=int, default=200_000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("selftest", help="fast oracle checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def _apply_config(parser, argv):
    """Load key=value defaults from --config, if given."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = argv[idx + 1]
    overrides = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            overrides[key.strip().replace(".", "-")] = value.strip()
    expanded = list(argv)
    for key, value in overrides.items():
        flag = f"--{key}"
        if flag not in argv:
            expanded += [flag, value]
    return expanded


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
    except OSError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, int):
            return exc.code
        print(exc.code, file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
