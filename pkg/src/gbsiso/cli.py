"""Command-line front end.

Exit codes: 0 for a definite verdict (or a successful non-test command),
2 for an indeterminate verdict, 1 for any error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .baselines import FIXTURES, color_refinement, fixture, wl1_compare
from .correlations import correlation_tensor
from .encoding import encode, moments_from_sampler
from .errors import GbsIsoError
from .graph import (
    MODELS,
    Graph,
    brute_force_isomorphism,
    emit_edge_list,
    emit_graph6,
    generate,
    isomorphic_copy,
    parse_edge_list,
    parse_graph6,
)
from .pipeline import Config, Pair, report, run, run_corpus, versions

EXIT_OK, EXIT_ERROR, EXIT_INDETERMINATE = 0, 1, 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors share the generic error code
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def load_graph(spec: str, fmt: str | None = None) -> Graph:
    """Read a graph from a ``.g6`` / ``.el`` file, or resolve a fixture name."""
    path = Path(spec)
    if not path.exists():
        if spec in FIXTURES:
            return fixture(spec)
        raise CliError(f"no such file or fixture: {spec}")
    text = path.read_text()
    if fmt is None:
        fmt = "graph6" if path.suffix in (".g6", ".graph6") else "edgelist"
    if fmt == "graph6":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise CliError(f"{spec}: empty graph6 file")
        g = parse_graph6(lines[0])
    else:
        g = parse_edge_list(text)
    return Graph(g.adjacency, path.stem)


def _dump(payload: Any, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args: argparse.Namespace) -> Config:
    return Config(
        kmax=args.kmax,
        alpha=args.alpha,
        tau_rel=args.tau_rel,
        enum_cap=args.enum_cap,
        cost_scale=args.cost_scale,
        threads=args.threads,
        seed=args.seed,
        timings=args.timings,
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_test(args: argparse.Namespace) -> int:
    config = _config(args)
    g1, g2 = load_graph(args.g1, args.format), load_graph(args.g2, args.format)
    verdict = run(g1, g2, config)
    payload = report(verdict, config, graphs=[args.g1, args.g2])
    if args.json or args.out:
        _dump(payload, args.out)
    if not args.json:
        print(verdict.summary())
        if verdict.witness is not None:
            print("witness:", " ".join(map(str, verdict.witness)))
        for s in verdict.trace:
            print(f"  k={s.k} popcount={s.sigma_popcount} {s.classify} count={s.count}")
    return verdict.exit_code


def cmd_gen(args: argparse.Namespace) -> int:
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    params = {"p": args.p, "d": args.d}
    written = []
    rows = []
    for idx in range(args.pairs):
        seed = args.seed + idx
        g = generate(args.model, args.order, seed, **params)
        stem = f"{args.model}_{args.order}_{seed}"
        if args.pair == "iso":
            h, perm = isomorphic_copy(g, seed)
            expected = "iso"
        else:
            h = generate(args.model, args.order, seed + 2**32, **params)
            perm = None
            if args.order <= 10:
                expected = "iso" if brute_force_isomorphism(g, h) is not None else "noniso"
            else:
                expected = "?"
        ext, emit = (".el", emit_edge_list) if args.format == "edgelist" else (".g6", lambda x: emit_graph6(x) + "\n")
        names = (f"{stem}_a{ext}", f"{stem}_b{ext}")
        for name, graph in zip(names, (g, h)):
            (outdir / name).write_text(emit(graph))
            written.append(str(outdir / name))
        rows.append([stem, *names, expected])
        if perm is not None:
            (outdir / f"{stem}_perm.json").write_text(json.dumps(list(perm)) + "\n")
    if args.pairs > 1 or args.manifest:
        with open(outdir / "pairs.tsv", "w", newline="") as fh:
            csv.writer(fh, delimiter="\t", lineterminator="\n").writerows(rows)
        written.append(str(outdir / "pairs.tsv"))
    print("\n".join(written))
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    g = load_graph(args.graph, args.format)
    enc = encode(g.adjacency, args.alpha)
    _dump(
        {
            "graph": args.graph,
            "alpha": args.alpha,
            "scale": enc.scale,
            "eigenvalues": enc.eigenvalues.tolist(),
            "squeezing": enc.squeezing.tolist(),
            "unitary": {"real": enc.unitary.real.tolist(), "imag": enc.unitary.imag.tolist()},
            "versions": versions(),
        },
        args.out,
    )
    return EXIT_OK


def cmd_corr(args: argparse.Namespace) -> int:
    g = load_graph(args.graph, args.format)
    mom = moments_from_sampler(encode(g.adjacency, args.alpha))
    tensor = correlation_tensor(mom, args.k, max_order=args.max_order)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(args.k)] + ["value"])
        for idx in itertools.product(range(g.order), repeat=args.k):
            w.writerow([*idx, repr(float(tensor.values[idx]))])
        if args.out:
            Path(args.out).write_text(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
    else:
        _dump({"graph": args.graph, "k": args.k, "alpha": args.alpha, "values": tensor.to_nested()}, args.out)
    return EXIT_OK


def read_corpus(path: str, fmt: str | None = None) -> list[Pair]:
    """Pairs from ``<dir>/pairs.tsv`` (or a TSV file): ``id, g1, g2[, iso|noniso|?]``."""
    p = Path(path)
    manifest = p / "pairs.tsv" if p.is_dir() else p
    if not manifest.exists():
        raise CliError(f"no corpus manifest at {manifest}")
    base = manifest.parent
    pairs = []
    for lineno, row in enumerate(csv.reader(manifest.read_text().splitlines(), delimiter="\t"), 1):
        if not row or row[0].startswith("#"):
            continue
        if len(row) < 3:
            raise CliError(f"{manifest}:{lineno}: expected id, g1, g2[, expected]")
        resolve = lambda s: s if (s in FIXTURES and not (base / s).exists()) else str(base / s)
        expected = {"iso": True, "noniso": False}.get(row[3].strip() if len(row) > 3 else "?")
        pairs.append(Pair(row[0], load_graph(resolve(row[1]), fmt), load_graph(resolve(row[2]), fmt), expected))
    return pairs


def cmd_bench(args: argparse.Namespace) -> int:
    config = _config(args)
    pairs = read_corpus(args.corpus, args.format)
    baselines = [args.baseline] if args.baseline != "none" else []
    result = run_corpus(pairs, config, baselines)
    result["config"] = config.to_dict()
    result["versions"] = versions()
    _dump(result, args.out)
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    graphs = [load_graph(s, args.format) for s in args.graphs]
    payload: dict[str, Any] = {"colorings": {}}
    for name, g in zip(args.graphs, graphs):
        c = color_refinement(g)
        payload["colorings"][name] = {"colors": list(c.colors), "rounds": c.rounds, "class_sizes": c.class_sizes()}
    if len(graphs) == 2:
        payload["wl1_compare"] = wl1_compare(*graphs)
    _dump(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_run_flags(p: argparse.ArgumentParser) -> None:
    d = Config()
    p.add_argument("--kmax", type=int, default=d.kmax, help="highest correlation order")
    p.add_argument("--alpha", type=float, default=d.alpha, help="target spectral radius in (0, 1)")
    p.add_argument("--tau-rel", type=float, default=d.tau_rel, help="relative equality quantum")
    p.add_argument("--enum-cap", type=int, default=d.enum_cap, help="search-node budget for enumeration")
    p.add_argument("--cost-scale", type=float, default=d.cost_scale, help="multiplier on the next-order cost model")
    p.add_argument("--threads", type=int, default=d.threads)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--timings", action="store_true", help="record wall-clock millis (breaks byte-identical reports)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gbsiso", description="Graph isomorphism from sampler correlations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["graph6", "edgelist"], help="override extension-based detection")
    common.add_argument("--out", help="write output to a file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", parents=[common], help="test two graphs for isomorphism")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    _add_run_flags(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("gen", parents=[common], help="generate graphs or pair corpora")
    p.add_argument("model", choices=MODELS)
    p.add_argument("order", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, help="edge probability (erdos_renyi)")
    p.add_argument("--d", type=int, help="degree (random_regular)")
    p.add_argument("--pair", choices=["iso", "none"], default="iso")
    p.add_argument("--pairs", type=int, default=1, help="number of pairs; >1 also writes pairs.tsv")
    p.add_argument("--manifest", action="store_true", help="write pairs.tsv even for one pair")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", parents=[common], help="emit sampler parameters for a graph")
    p.add_argument("graph")
    p.add_argument("--alpha", type=float, default=Config().alpha)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corr", parents=[common], help="emit the order-k correlation tensor")
    p.add_argument("graph")
    p.add_argument("k", type=int)
    p.add_argument("--alpha", type=float, default=Config().alpha)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--max-order", type=int, default=Config().max_order)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("bench", parents=[common], help="run a corpus of pairs")
    p.add_argument("corpus", help="directory holding pairs.tsv, or a TSV file")
    p.add_argument("--baseline", choices=["wl1", "none"], default="wl1")
    _add_run_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("baseline", parents=[common], help="colour refinement on one or two graphs")
    p.add_argument("graphs", nargs="+")
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GbsIsoError, OSError, ValueError) as exc:
        print(f"gbsiso: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
