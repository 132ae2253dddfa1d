"""Command line front end.

Subcommands: gen, find, verify, density, janson, factor, absorber,
experiment.  All randomness flows from an explicit --seed (a fixed default
is used and printed otherwise).  Exit codes: 0 on verified success, 2 on
failure, 1 on usage errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import sys
import time
from pathlib import Path

from hampow import absorber as absorber_mod
from hampow import janson as janson_mod
from hampow.core import (
    CycleCertificate,
    Hypergraph,
    VertexTuple,
    is_power_path,
    is_tight_path,
    power_path_template,
    verify_certificate,
)
from hampow.density import RootedTemplate, m1_density, m_density
from hampow.factor import almost_factor
from hampow.matcher import PhaseFailure
from hampow.pipeline import (
    DEFAULT_SEED,
    FailureReport,
    ModelSpec,
    Parameters,
    find_hamilton,
    find_hamilton_detailed,
    implied_threshold,
    resolve_plan,
)
from hampow.randmodels import derive, sample_bipartite, sample_uniform_hypergraph

MATERIALIZE_LIMIT = 20_000_000


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"base seed (default {DEFAULT_SEED})")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mode", choices=["power", "tight"], default="power")
    p.add_argument("--ell", type=int, default=None, help="backbone block count (odd >= 5)")
    p.add_argument("--connector-len", type=int, default=None)
    p.add_argument("--merge-len", type=int, default=None)
    p.add_argument("--absorb-size", type=int, default=None,
                   help="absorbable set size override")
    p.add_argument("--t-cover", type=int, default=None, help="cover part count override")
    p.add_argument("--retries", type=int, default=5)


def _params_from(args: argparse.Namespace, seed: int, input_rate: float | None) -> Parameters:
    return Parameters(
        k=args.k,
        mode=args.mode,
        ell=args.ell,
        connector_len=args.connector_len,
        merge_len=args.merge_len,
        absorb_size=args.absorb_size,
        t_cover=args.t_cover,
        retries=args.retries,
        seed=seed,
        input_rate=input_rate,
    )


def _load_graph(path: str) -> Hypergraph:
    return Hypergraph.from_text(Path(path).read_text())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hampow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a random (hyper)graph")
    g.add_argument("--model", choices=["gnp", "hgnp", "bip"], required=True)
    g.add_argument("--k", type=int, default=2, help="uniformity (hgnp)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--out", required=True)
    _add_seed(g)

    f = sub.add_parser("find", help="search for a spanning cycle")
    f.add_argument("--graph", default=None, help="host graph file")
    f.add_argument("--model", choices=["gnp", "hgnp"], default=None)
    f.add_argument("--n", type=int, default=None)
    f.add_argument("--p", type=float, default=None)
    f.add_argument("--out", default=None, help="certificate output file")
    _add_params(f)
    _add_seed(f)

    v = sub.add_parser("verify", help="check a certificate")
    v.add_argument("--graph", default=None)
    v.add_argument("--model", choices=["gnp", "hgnp"], default=None)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--p", type=float, default=None)
    v.add_argument("--k", type=int, default=2, help="uniformity for --model hgnp")
    v.add_argument("--attempt", type=int, default=0,
                   help="attempt index whose host to regenerate (--model only)")
    v.add_argument("--cert", required=True)
    _add_seed(v)

    d = sub.add_parser("density", help="exact (rooted) 1-density")
    d.add_argument("--input", required=True, help="hypergraph file")
    d.add_argument("--root", default=None, help="comma-separated root vertices")

    j = sub.add_parser("janson", help="lower-tail bound parameters")
    j.add_argument("--n", type=int, required=True)
    j.add_argument("--p", type=float, required=True)
    j.add_argument("--template", required=True,
                   help="FILE or builtin:triangle or builtin:path-K-L")
    j.add_argument("--gamma", type=float, default=0.5)
    j.add_argument("--exact", action="store_true", help="enumerate mu and delta exactly")

    fa = sub.add_parser("factor", help="greedy almost-factor")
    fa.add_argument("--graph", required=True)
    fa.add_argument("--template", required=True)
    fa.add_argument("--epsilon", type=float, required=True)

    ab = sub.add_parser("absorber", help="absorber demo on a complete host")
    ab.add_argument("--k", type=int, default=2)
    ab.add_argument("--ell", type=int, default=5)
    ab.add_argument("--mode", choices=["power", "tight"], default="power")
    ab.add_argument("--demo", action="store_true")
    ab.add_argument("--validate", type=int, default=0,
                    help="check this many random absorb subsets")
    _add_seed(ab)

    e = sub.add_parser("experiment", help="Monte-Carlo success grid")
    e.add_argument("--n-list", required=True, help="comma-separated host sizes")
    e.add_argument("--p-grid", required=True, help="comma-separated edge rates")
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--csv", required=True)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--zero-timings", action="store_true",
                   help="write runtime_ms as 0 for byte-reproducible output")
    _add_params(e)
    _add_seed(e)

    return parser


# -- subcommand bodies --------------------------------------------------------


def _cmd_gen(args) -> int:
    if args.model == "bip":
        b = sample_bipartite(args.n, args.p, args.seed)
        lines = [f"bip {b.left} {b.right} {b.edge_count}"]
        lines += [f"{l} {r}" for l, r in sorted(b.edges)]
        Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"wrote bipartite {b.left}x{b.right} with {b.edge_count} edges (seed {args.seed})")
        return 0
    k = 2 if args.model == "gnp" else args.k
    g = sample_uniform_hypergraph(k, args.n, args.p, args.seed)
    if g.edge_count > MATERIALIZE_LIMIT:
        print(f"refusing to write {g.edge_count} edges (> {MATERIALIZE_LIMIT})", file=sys.stderr)
        return 2
    Path(args.out).write_text(g.to_text())
    print(f"wrote {g!r} (seed {args.seed})")
    return 0


def _resolve_find_source(args, cfg: Parameters):
    if (args.graph is None) == (args.model is None):
        raise SystemExit(_usage("exactly one of --graph or --model is required"))
    if args.graph is not None:
        return _load_graph(args.graph)
    if args.n is None or args.p is None:
        raise SystemExit(_usage("--model requires --n and --p"))
    return ModelSpec(n=args.n, p=args.p)


def _usage(msg: str) -> int:
    print(f"hampow: error: {msg}", file=sys.stderr)
    return 1


def _cmd_find(args) -> int:
    cfg = _params_from(args, args.seed, input_rate=args.p)
    source = _resolve_find_source(args, cfg)
    n = source.n
    formula, value = implied_threshold(n, cfg)
    chosen = args.p if args.p is not None else "n/a (fixed graph)"
    print(f"seed {args.seed}; implied threshold {formula} = {value:.6g}; chosen p = {chosen}")
    try:
        plan = resolve_plan(n, cfg)
    except ValueError as err:
        print(f"infeasible configuration: {err}", file=sys.stderr)
        return 2
    print(plan.describe())
    result, attempt = find_hamilton_detailed(source, cfg)
    if isinstance(result, FailureReport):
        print(result, file=sys.stderr)
        return 2
    text = result.to_text()
    print(f"succeeded on attempt {attempt}")
    if args.out:
        Path(args.out).write_text(text)
        print(f"verified {result.mode} certificate written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    if (args.graph is None) == (args.model is None):
        return _usage("exactly one of --graph or --model is required")
    cert = CycleCertificate.from_text(Path(args.cert).read_text())
    if args.graph is not None:
        host = _load_graph(args.graph)
    else:
        if args.n is None or args.p is None:
            return _usage("--model requires --n and --p")
        k = 2 if args.model == "gnp" else args.k
        from hampow.randmodels import sample_three_rounds

        attempt_seed = derive(args.seed, 17, args.attempt)
        _, _, _, host = sample_three_rounds(k, args.n, args.p, derive(attempt_seed, 1))
    try:
        ok = verify_certificate(host, cert)
    except ValueError as err:
        print(f"malformed certificate: {err}", file=sys.stderr)
        return 2
    print("certificate OK" if ok else "certificate REJECTED")
    return 0 if ok else 2


def _cmd_density(args) -> int:
    g = _load_graph(args.input)
    if args.root:
        root = VertexTuple(int(x) for x in args.root.split(","))
        value = m_density(RootedTemplate(template=g, root=root))
    else:
        value = m1_density(g)
    print(f"{value.numerator}/{value.denominator}")
    return 0


def _janson_template(spec: str) -> Hypergraph:
    if spec == "builtin:triangle":
        return Hypergraph(2, 3, [(0, 1), (0, 2), (1, 2)])
    if spec.startswith("builtin:path-"):
        try:
            _, k, ell = spec.rsplit("-", 2)
            return power_path_template(int(k), int(ell))
        except ValueError as err:
            raise SystemExit(_usage(f"bad builtin template {spec!r}: {err}"))
    return _load_graph(spec)


def _cmd_janson(args) -> int:
    template = _janson_template(args.template)
    if args.exact:
        mu, delta = janson_mod.exact_mu_delta(args.n, template, args.p)
        label = "exact"
    else:
        mu = janson_mod.expected_lex_copies(args.n, template, args.p)
        delta = janson_mod.delta_upper_bound(args.n, template, args.p)
        label = "bound"
    params = janson_mod.JansonParams.compute(mu=mu, delta=delta, gamma=args.gamma)
    print(f"mu = {mu:.10g}")
    print(f"delta ({label}) = {delta:.10g}")
    print(f"tail bound (gamma={args.gamma}) = {params.bound:.10g}")
    return 0


def _cmd_factor(args) -> int:
    g = _load_graph(args.graph)
    template = _load_graph(args.template)
    try:
        copies = almost_factor(g, template, args.epsilon)
    except PhaseFailure as err:
        print(f"factor failed: {err}", file=sys.stderr)
        return 2
    covered = {v for emb in copies for v in emb.values()}
    print(f"copies found: {len(copies)}")
    print(f"leftover vertices: {g.n - len(covered)}")
    return 0


def _cmd_absorber(args) -> int:
    host, ab = absorber_mod.demo_absorber(args.k, args.ell, args.mode)
    with_x = absorber_mod.absorb_single(ab, include_x=True)
    without_x = absorber_mod.absorb_single(ab, include_x=False)
    if args.demo or not args.validate:
        print(f"host: complete {host.k}-uniform on {host.n} vertices")
        print(f"a = {tuple(ab.a)}, b = {tuple(ab.b)}, x = {ab.x}")
        print("traversal including x: ", " ".join(map(str, with_x)))
        print("traversal without x:   ", " ".join(map(str, without_x)))
    checker = is_power_path if args.mode == "power" else lambda h, s, _k: is_tight_path(h, s)
    ok = checker(host, with_x, args.k) and checker(host, without_x, args.k)
    if args.validate:
        for i in range(args.validate):
            include = bool(derive(args.seed, i) & 1)
            path = absorber_mod.absorb_single(ab, include_x=include)
            ok = ok and checker(host, path, args.k)
        print(f"validated {args.validate} random absorb choices "
              f"(seed {args.seed}): {'OK' if ok else 'FAILED'}")
    return 0 if ok else 2


def _experiment_row(task) -> tuple:
    (n, p, trial, seed, cfg_fields, zero_timings) = task
    cfg = Parameters(**cfg_fields, seed=seed)
    start = time.perf_counter()
    result = find_hamilton(ModelSpec(n=n, p=p), cfg)
    elapsed_ms = 0 if zero_timings else int((time.perf_counter() - start) * 1000)
    success = not isinstance(result, FailureReport)
    phase = "" if success else result.phase_failed
    return (n, p, trial, seed, int(success), phase, elapsed_ms)


def _cmd_experiment(args) -> int:
    n_list = [int(x) for x in args.n_list.split(",") if x]
    p_grid = [float(x) for x in args.p_grid.split(",") if x]
    cfg_fields = dict(
        k=args.k,
        mode=args.mode,
        ell=args.ell,
        connector_len=args.connector_len,
        merge_len=args.merge_len,
        absorb_size=args.absorb_size,
        t_cover=args.t_cover,
        retries=args.retries,
        input_rate=None,
    )
    tasks = []
    row = 0
    for n in n_list:
        for p in p_grid:
            for trial in range(args.trials):
                tasks.append((n, p, trial, derive(args.seed, row), cfg_fields, args.zero_timings))
                row += 1
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_experiment_row, tasks))
    else:
        rows = [_experiment_row(t) for t in tasks]
    lines = ["n,p,trial,seed,success,phase_failed,runtime_ms"]
    for n, p, trial, seed, success, phase, ms in rows:
        lines.append(f"{n},{p:g},{trial},{seed},{success},{phase},{ms}")
    Path(args.csv).write_text("\n".join(lines) + "\n")
    done = sum(r[4] for r in rows)
    print(f"{done}/{len(rows)} trials succeeded; results in {args.csv} (seed {args.seed})")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "find": _cmd_find,
        "verify": _cmd_verify,
        "density": _cmd_density,
        "janson": _cmd_janson,
        "factor": _cmd_factor,
        "absorber": _cmd_absorber,
        "experiment": _cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except ValueError as err:
        print(f"hampow: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"hampow: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
