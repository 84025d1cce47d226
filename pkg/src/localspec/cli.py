"""Command-line front end: generate, simulate, localizability, analyze, cluster, demo.

Every command that writes files also writes a manifest recording the command,
all parameters, the seed, and the library version; timing lives in its own
manifest field so the numeric payloads stay byte-identical across reruns with
the same seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from . import __version__, dynsys, embedding, io, localizability, spectral


def _err(kind: str, message: str) -> int:
    print(json.dumps({"error": message, "type": kind}), file=sys.stderr)
    return 1


def _write_manifest(path, command, params, seed, inputs, outputs, started, duration):
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "timing": {
            "started_utc": datetime.fromtimestamp(started, tz=timezone.utc).isoformat(),
            "duration_seconds": duration,
        },
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n")


def _parse_x0(args, n, rng_label="--x0-seed"):
    if args.x0 is not None:
        values = np.array([float(v) for v in args.x0.split(",")], dtype=float)
    elif args.x0_seed is not None:
        values = np.random.default_rng(args.x0_seed).standard_normal(n)
    else:
        raise ValueError(f"provide --x0 or {rng_label}")
    if values.shape[0] != n:
        raise ValueError(f"x0 has dimension {values.shape[0]}, system needs {n}")
    return values


def _add_common(parser):
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--seed", type=int, default=0, help="generator seed")
    parser.add_argument("--tol-rank", type=float, default=1e-10,
                        help="relative singular-value cutoff for rank decisions")
    parser.add_argument("--tol-distinct", type=float, default=1e-9,
                        help="eigenvalue distinctness tolerance")
    parser.add_argument("--quiet", action="store_true", help="suppress stdout summaries")


def cmd_generate(args) -> int:
    started = time.time()
    out = Path(args.out) if args.out else Path(f"{args.kind}.json")
    inputs = []
    if args.kind == "sbm":
        sizes = [int(v) for v in args.sizes.split(",")]
        w = dynsys.generate_sbm(
            sizes, args.intra_p, args.inter_p, args.intra_weight, args.inter_weight,
            seed=args.seed,
        )
        io.save_adjacency(out, w)
    elif args.kind == "bipartite":
        io.save_system(out, dynsys.bipartite_fixture())
    elif args.kind == "coupled":
        io.save_system(out, dynsys.coupled_cell_fixture(args.seed))
    elif args.kind == "wave":
        if not args.adjacency:
            raise ValueError("generate wave needs --adjacency")
        inputs.append(args.adjacency)
        w = io.load_adjacency(args.adjacency)
        lap = dynsys.normalized_laplacian(w)
        io.save_system(out, dynsys.build_wave_system(lap, args.wave_speed))
    elif args.kind == "random":
        rng = np.random.default_rng(args.seed)
        a = rng.standard_normal((args.dim, args.dim))
        a /= np.max(np.abs(np.linalg.eigvals(a)))
        io.save_system(out, dynsys.LinearSystem(a))
    else:
        raise ValueError(f"unknown generate kind {args.kind}")
    params = {k: v for k, v in vars(args).items() if k not in ("func", "quiet")}
    _write_manifest(f"{out}.manifest.json", f"generate {args.kind}", params,
                    args.seed, inputs, [out], started, time.time() - started)
    if not args.quiet:
        print(f"wrote {out}")
    return 0


def cmd_simulate(args) -> int:
    started = time.time()
    system = io.load_system(args.system)
    out = Path(args.out) if args.out else Path("trajectory.csv")
    if isinstance(system, dynsys.CoupledCellSystem):
        x0 = _parse_x0(args, 2 * system.d)
        if args.lift:
            lifted = dynsys.koopman_lift(system)
            traj = dynsys.simulate(lifted, dynsys.lift_state(system, x0), args.steps)
        else:
            traj = dynsys.simulate_coupled(system, x0, args.steps)
    else:
        if args.lift:
            raise ValueError("--lift only applies to coupled systems")
        x0 = _parse_x0(args, system.n)
        traj = dynsys.simulate(system, x0, args.steps)
    io.save_trajectory(out, traj.states)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "quiet")}
    _write_manifest(f"{out}.manifest.json", "simulate", params, args.x0_seed,
                    [args.system], [out], started, time.time() - started)
    if not args.quiet:
        print(f"wrote {out} ({traj.states.shape[0]} states of dimension {traj.n})")
    return 0


def cmd_localizability(args) -> int:
    started = time.time()
    system = io.load_system(args.system)
    if isinstance(system, dynsys.CoupledCellSystem):
        system = dynsys.koopman_lift(system)
    if args.vertex is not None:
        reports = [localizability.is_localizable(system, args.vertex, args.tol_rank)]
        everywhere = None
    else:
        everywhere, reports = localizability.localizable_everywhere(system, args.tol_rank)
    payload = {"reports": [r.to_json_dict() for r in reports]}
    if everywhere is not None:
        payload["localizable_everywhere"] = everywhere
    text = json.dumps(payload, indent=2) + "\n"
    outputs = []
    if args.out:
        Path(args.out).write_text(text)
        outputs.append(args.out)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "quiet")}
        _write_manifest(f"{args.out}.manifest.json", "localizability", params, None,
                        [args.system], outputs, started, time.time() - started)
    if not args.quiet or not args.out:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    started = time.time()
    states = io.load_trajectory(args.trajectory)
    n = states.shape[1]
    if not 1 <= args.vertex <= n:
        raise ValueError(f"vertex {args.vertex} out of range 1..{n}")
    s = args.delays if args.delays else n
    u = states[:, args.vertex - 1]
    report = spectral.analyze_vertex(
        u,
        s,
        vertex=args.vertex,
        check_bipartite=not args.no_bipartite,
        compute_components=not args.no_components,
        detect_clusters=args.gap,
        max_k=args.max_k,
        svd_tol=args.tol_rank,
        distinct_tol=args.tol_distinct,
        imag_tol=np.inf if args.gap else spectral.DEFAULT_IMAG_TOL,
    )
    text = json.dumps(report.to_json_dict(), indent=2) + "\n"
    outputs = []
    if args.out:
        Path(args.out).write_text(text)
        outputs.append(args.out)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "quiet")}
        _write_manifest(f"{args.out}.manifest.json", "analyze", params, None,
                        [args.trajectory], outputs, started, time.time() - started)
    if not args.quiet or not args.out:
        sys.stdout.write(text)
    return 0


def cmd_cluster(args) -> int:
    started = time.time()
    states = io.load_trajectory(args.trajectory)
    n = states.shape[1]
    s = args.delays if args.delays else n
    comps: dict[int, np.ndarray] = {}
    spectra: dict[int, np.ndarray] = {}
    for v in range(1, n + 1):
        u = states[:, v - 1]
        model = embedding.fit_companion(u, s, svd_tol=args.tol_rank)
        eigs = spectral.local_eigenvalues(model)
        spectra[v] = eigs
        comps[v] = spectral.local_eigenvector_components(
            u, eigs, svd_tol=args.tol_rank, distinct_tol=args.tol_distinct
        )
    if args.k == "auto":
        k = spectral.consensus_cluster_count(spectra, max_k=(s + 1) // 2)
    else:
        k = int(args.k)
    labels = (
        {v: 0 for v in comps} if k < 2 else spectral.decentralized_cluster_labels(comps, k)
    )
    labels_out = Path(args.out) if args.out else Path("labels.json")
    payload = {
        "cluster_count": k,
        "labels": [{"vertex": v, "cluster": labels[v]} for v in sorted(labels)],
    }
    labels_out.write_text(json.dumps(payload, indent=2) + "\n")
    outputs = [labels_out]
    comps_out = Path(args.components_out) if args.components_out else labels_out.with_name(
        labels_out.stem + "_components.csv"
    )
    with open(comps_out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["vertex"]
            + [f"c{l}_{part}" for l in range(1, s + 1) for part in ("re", "im")]
        )
        for v in sorted(comps):
            row = [v]
            for c in comps[v]:
                row += [io.format_float(c.real), io.format_float(c.imag)]
            writer.writerow(row)
    outputs.append(comps_out)
    params = {k_: v for k_, v in vars(args).items() if k_ not in ("func", "quiet")}
    _write_manifest(f"{labels_out}.manifest.json", "cluster", params, None,
                    [args.trajectory], outputs, started, time.time() - started)
    if not args.quiet:
        print(f"{k} clusters over {n} vertices -> {labels_out}")
    return 0


def _demo_fig1(seed, outdir):
    """Bipartite benchmark: localizability, local spectra, bipartiteness."""
    outdir.mkdir(parents=True, exist_ok=True)
    system = dynsys.bipartite_fixture()
    io.save_system(outdir / "system.json", system)
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(system.n)
    traj = dynsys.simulate(system, x0, 4 * system.n)
    io.save_trajectory(outdir / "trajectory.csv", traj.states)

    everywhere, _ = localizability.localizable_everywhere(system)
    direct = spectral.sort_eigenvalues(np.linalg.eigvals(system.a))
    reports = {}
    with open(outdir / "eigenvalues.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "re", "im"])
        for lam in direct:  # vertex 0 marks the direct global spectrum
            writer.writerow([0, io.format_float(lam.real), io.format_float(lam.imag)])
        for v in (1, 3, 5):
            report = spectral.analyze_vertex(traj.local(v), system.n, vertex=v)
            reports[v] = report
            for lam in report.eigenvalues:
                writer.writerow([v, io.format_float(lam.real), io.format_float(lam.imag)])
    analysis = {
        "localizable_everywhere": everywhere,
        "x0": [float(v) for v in x0],
        "vertices": {str(v): r.to_json_dict() for v, r in reports.items()},
    }
    (outdir / "analysis.json").write_text(json.dumps(analysis, indent=2) + "\n")
    return [outdir / "system.json", outdir / "trajectory.csv",
            outdir / "eigenvalues.csv", outdir / "analysis.json"]


# Fit length for the clustering demo; resolves the three near-1 modes of a
# 15-vertex three-block graph while the weak modes stay excited.
FIG2_STEPS = 150


def _demo_fig2(seed, outdir):
    """Three-cluster SBM: decentralized spectral clustering from local data."""
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    # weakly coupled three-block graph; resample (bounded) until connected,
    # since a vertex's trajectory carries no information about components it
    # is not attached to
    w = None
    for _ in range(100):
        candidate = dynsys.generate_sbm(
            [5, 5, 5], 0.7, 0.05, 1.0, 0.2, seed=int(rng.integers(2**63))
        )
        count, _ = connected_components(
            scipy.sparse.csr_matrix(candidate != 0), directed=False
        )
        if count == 1:
            w = candidate
            break
    if w is None:
        raise dynsys.GenerationError("no connected SBM draw in 100 tries")
    io.save_adjacency(outdir / "adjacency.json", w)
    n = w.shape[0]
    lap = dynsys.normalized_laplacian(w)
    system = dynsys.LinearSystem(np.eye(n) - 0.5 * lap)
    io.save_system(outdir / "system.json", system)
    x0 = rng.standard_normal(n)
    traj = dynsys.simulate(system, x0, FIG2_STEPS)
    io.save_trajectory(outdir / "trajectory.csv", traj.states)

    comps, spectra = {}, {}
    for v in range(1, n + 1):
        u = traj.local(v)
        model = embedding.fit_companion(u, n)
        eigs = spectral.local_eigenvalues(model)
        spectra[v] = eigs
        comps[v] = spectral.local_eigenvector_components(u, eigs)
    k = spectral.consensus_cluster_count(spectra, max_k=(n + 1) // 2)
    labels = spectral.decentralized_cluster_labels(comps, max(k, 2))

    mu_true = np.sort(np.linalg.eigvalsh(lap))
    consensus = np.mean(
        np.vstack([np.sort(spectra[v].real)[::-1] for v in sorted(spectra)]), axis=0
    )
    mu_estimated = np.sort(2.0 * (1.0 - consensus))
    with open(outdir / "laplacian_spectrum.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "mu_true", "mu_estimated"])
        for i, (mt, me) in enumerate(zip(mu_true, mu_estimated), start=1):
            writer.writerow([i, io.format_float(mt), io.format_float(me)])
    with open(outdir / "components.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "c2_re", "c3_re"])
        for v in sorted(comps):
            writer.writerow([v, io.format_float(comps[v][1].real),
                             io.format_float(comps[v][2].real)])
    payload = {
        "cluster_count": k,
        "labels": [{"vertex": v, "cluster": labels[v]} for v in sorted(labels)],
        "x0": [float(v) for v in x0],
    }
    (outdir / "labels.json").write_text(json.dumps(payload, indent=2) + "\n")
    return [outdir / "adjacency.json", outdir / "system.json", outdir / "trajectory.csv",
            outdir / "laplacian_spectrum.csv", outdir / "components.csv",
            outdir / "labels.json"]


def _demo_fig3(seed, outdir):
    """Coupled cells: exact Koopman lift and the locally learned predictor."""
    outdir.mkdir(parents=True, exist_ok=True)
    system = dynsys.coupled_cell_fixture(seed)
    io.save_system(outdir / "coupled_system.json", system)
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(2 * system.d)
    n_lift = 3 * system.d
    fit_steps = 4 * n_lift
    total = fit_steps + 50

    traj = dynsys.simulate_coupled(system, x0, total)
    lifted_sys = dynsys.koopman_lift(system)
    lifted = dynsys.simulate(lifted_sys, dynsys.lift_state(system, x0), total)
    lift_dev = float(
        np.max(np.abs(lifted.states[:, 0::3] - traj.states[:, 0::2]))
    )

    u = traj.states[:, 0]  # x_{1,1}
    model = embedding.fit_companion(u[: fit_steps + 1], n_lift)
    localized = embedding.predict(model, u[:n_lift], total + 1 - n_lift)
    with open(outdir / "trajectory.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "x11_nonlinear", "x11_localized"])
        for k in range(total + 1):
            writer.writerow([k, io.format_float(u[k]), io.format_float(localized[k])])
    run_max = np.maximum.accumulate(np.abs(u))
    max_err = float(np.max(np.abs(localized - u) / np.maximum(run_max, 1e-300)))
    comparison = {
        "x0": [float(v) for v in x0],
        "lift_max_abs_deviation": lift_dev,
        "localized_max_growth_normalized_error": max_err,
        "fit_steps": fit_steps,
        "model": model.to_json_dict(),
    }
    (outdir / "comparison.json").write_text(json.dumps(comparison, indent=2) + "\n")
    return [outdir / "coupled_system.json", outdir / "trajectory.csv",
            outdir / "comparison.json"]


def cmd_demo(args) -> int:
    started = time.time()
    outdir = Path(args.outdir) if args.outdir else Path(f"demo_{args.name}")
    builder = {"fig1": _demo_fig1, "fig2": _demo_fig2, "fig3": _demo_fig3}[args.name]
    outputs = builder(args.seed, outdir)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "quiet")}
    _write_manifest(outdir / "manifest.json", f"demo {args.name}", params,
                    args.seed, [], outputs, started, time.time() - started)
    if not args.quiet:
        print(f"wrote demo bundle to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localspec",
        description="Recover global spectral properties of networked dynamics "
                    "from single-vertex trajectories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a system or adjacency file")
    p.add_argument("kind", choices=["sbm", "bipartite", "coupled", "wave", "random"])
    p.add_argument("--sizes", default="5,5,5", help="sbm cluster sizes, comma-separated")
    p.add_argument("--intra-p", type=float, default=0.7)
    p.add_argument("--inter-p", type=float, default=0.05)
    p.add_argument("--intra-weight", type=float, default=1.0)
    p.add_argument("--inter-weight", type=float, default=0.2)
    p.add_argument("--adjacency", help="adjacency JSON consumed by kind=wave")
    p.add_argument("--wave-speed", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=6, help="dimension for kind=random")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="simulate a system file to a trajectory CSV")
    p.add_argument("system")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--x0-seed", type=int, help="draw x0 from a seeded standard normal")
    p.add_argument("--lift", action="store_true",
                   help="simulate the Koopman-lifted linear system of a coupled file")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("localizability", help="rank-of-R localizability reports")
    p.add_argument("system")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--vertex", type=int)
    group.add_argument("--all", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_localizability)

    p = sub.add_parser("analyze", help="spectral report from one vertex's trajectory")
    p.add_argument("trajectory")
    p.add_argument("--vertex", type=int, default=1)
    p.add_argument("--delays", type=int, help="embedding length (default: state dimension)")
    p.add_argument("--no-bipartite", action="store_true")
    p.add_argument("--no-components", action="store_true")
    p.add_argument("--gap", action="store_true", help="detect cluster count from spectral gaps")
    p.add_argument("--max-k", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("cluster", help="decentralized sign-pattern clustering")
    p.add_argument("trajectory")
    p.add_argument("--k", default="auto", help="cluster count, or 'auto' for gap detection")
    p.add_argument("--delays", type=int)
    p.add_argument("--components-out", help="per-vertex component CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("demo", help="figure-reproduction data bundles")
    p.add_argument("name", choices=["fig1", "fig2", "fig3"])
    p.add_argument("--outdir")
    _add_common(p)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, dynsys.GenerationError) as exc:
        return _err(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
