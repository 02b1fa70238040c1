"""Command-line driver.

Exit codes: 0 success, 2 usage, 3 parse, 4 numerical/degenerate, 5 I/O.
Every file written with ``--out`` gets a ``<file>.manifest.json`` next to it;
``graphspread replay <manifest>`` re-runs the recorded command.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .distances import Diffusion, ExplicitLengths, InverseSimilarityGeodesic, NaiveGeodesic, distances
from .errors import ContractError, GraphSpreadError, ParseError
from .generators import FAMILIES, image_grid_graph, random_geometric_graph, randomize_weights, trial_rng
from .graph import check_unit_norm, eigendecompose, normalize, normalized_laplacian
from .io import curve_csv, gnuplot_block, mean_curve_csv, parse_graph, parse_lengths, parse_signal, read_pgm
from .spreads import dirichlet_form, graph_spread, spectral_spread
from .uncertainty import mean_curve, normalize_curve, sandwich_curve

log = logging.getLogger("graphspread")

DEFAULT_SEED = 20150101
EXIT_USAGE, EXIT_PARSE, EXIT_NUMERICAL, EXIT_IO = 2, 3, 4, 5


def parse_kind(text: str, generated_lengths=None):
    """``naive``, ``invsim``, ``diffusion[:alpha]``, ``explicit[:file]``.

    Bare ``explicit`` means the lengths produced by the graph generator
    (the Euclidean matrix of a random geometric graph).
    """
    name, _, arg = text.partition(":")
    if name == "naive" and not arg:
        return NaiveGeodesic()
    if name == "invsim" and not arg:
        return InverseSimilarityGeodesic()
    if name == "diffusion":
        try:
            return Diffusion(float(arg) if arg else 1.0)
        except ValueError:
            raise ContractError(f"bad diffusion parameter in {text!r}") from None
    if name == "explicit":
        if arg:
            return ExplicitLengths(parse_lengths(Path(arg).read_text()), label=text)
        if generated_lengths is None:
            raise ContractError("bare 'explicit' needs a graph family that produces lengths")
        return ExplicitLengths(generated_lengths, label="explicit")
    raise ContractError(f"unknown distance kind {text!r}")


def kind_label(text: str) -> str:
    return text.replace(":", "-").replace("/", "_")


def build_graph(args, rng=None, reweight=False):
    """Graph and optional generator lengths for ``args.family``."""
    if args.family == "file":
        if not args.graph:
            raise ContractError("--family file requires --graph PATH")
        g = parse_graph(Path(args.graph).read_text())
        lengths = None
    elif args.family == "random-geometric":
        g, lengths, _ = random_geometric_graph(args.n, args.radius, args.alpha, args.beta, rng)
        return g, lengths
    else:
        g = FAMILIES[args.family](args.n)
        lengths = None
    if reweight:
        g = randomize_weights(g, rng)
    return g, lengths


def _trial_curve(args, trial: int):
    rng = trial_rng(args.seed, trial)
    g, lengths = build_graph(args, rng, reweight=True)
    kind = parse_kind(args.kind, lengths)
    try:
        c = sandwich_curve(g, args.u0, kind, args.tol, relative=True)
    except GraphSpreadError as e:
        raise type(e)(f"trial {trial}: {e}") from e
    return normalize_curve(c)


def _manifest_header(args) -> dict:
    return {
        "family": args.family,
        "n": getattr(args, "n", None),
        "kind": getattr(args, "kind", None),
        "u0": args.u0,
        "tol": args.tol,
        "seed": getattr(args, "seed", None),
    }


def write_output(path: str | None, text: str, args, argv, extra=None):
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    manifest = {
        "command": list(argv),
        "output": os.path.basename(path),
        "seed": getattr(args, "seed", None),
        "family": getattr(args, "family", None),
        "parameters": {
            k: getattr(args, k, None) for k in ("n", "radius", "alpha", "beta", "graph", "image", "trials", "grid")
        },
        "kind": getattr(args, "kind", None),
        "u0": getattr(args, "u0", None),
        "tol": getattr(args, "tol", None),
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    Path(path + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", path)


def _gnuplot_path(out: str) -> str:
    return str(Path(out).with_suffix(".dat"))


def cmd_curve(args, argv) -> int:
    g, lengths = build_graph(args, trial_rng(args.seed, 0), reweight=args.random_weights)
    kind = parse_kind(args.kind, lengths)
    c = sandwich_curve(g, args.u0, kind, args.tol, relative=args.normalize)
    if args.normalize:
        c = normalize_curve(c)
    write_output(args.out, curve_csv(c), args, argv)
    if args.gnuplot and args.out:
        block = gnuplot_block((c.s, c.g), _manifest_header(args))
        Path(_gnuplot_path(args.out)).write_text(block)
    return 0


def cmd_mean_curve(args, argv) -> int:
    if args.trials < 1:
        raise ContractError("--trials must be at least 1")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            curves = list(pool.map(_trial_curve, [args] * args.trials, range(args.trials)))
    else:
        curves = [_trial_curve(args, t) for t in range(args.trials)]
    mc = mean_curve(curves, args.grid)
    write_output(args.out, mean_curve_csv(mc), args, argv)
    if args.gnuplot and args.out:
        block = gnuplot_block((mc.s, mc.mean_g, mc.stddev_g), _manifest_header(args), ("s", "mean_g", "stddev_g"))
        Path(_gnuplot_path(args.out)).write_text(block)
    return 0


def cmd_spread(args, argv) -> int:
    g, lengths = build_graph(args, trial_rng(args.seed, 0), reweight=args.random_weights)
    kind = parse_kind(args.kind, lengths)
    x = parse_signal(Path(args.signal).read_text(), g.n)
    if args.normalize:
        x = normalize(x)
    check_unit_norm(x)
    d = distances(g, kind, args.u0)
    decomp = eigendecompose(normalized_laplacian(g))
    print(f"spectral_spread={spectral_spread(decomp, x):.17g}")
    print(f"graph_spread={graph_spread(d, x):.17g}")
    print(f"dirichlet_2={dirichlet_form(g, x, 2):.17g}")
    return 0


def cmd_image_curve(args, argv) -> int:
    img = read_pgm(Path(args.image).read_bytes())
    g = image_grid_graph(img, args.alpha, args.beta)
    stem = args.out[:-4] if args.out and args.out.endswith(".csv") else args.out
    for text in args.kind or ["invsim", "diffusion:1"]:
        kind = parse_kind(text)
        c = normalize_curve(sandwich_curve(g, args.u0, kind, args.tol, relative=True))
        out = f"{stem}-{kind_label(text)}.csv" if stem else None
        write_output(out, curve_csv(c), args, argv, {"kind": text})
        if args.gnuplot and out:
            header = {"family": f"image {args.image}", "kind": text, "u0": args.u0, "tol": args.tol}
            Path(_gnuplot_path(out)).write_text(gnuplot_block((c.s, c.g), header))
    return 0


def cmd_replay(args, argv) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    command = list(manifest["command"])
    if args.out:
        cleaned, skip = [], False
        for tok in command:
            if skip:
                skip = False
                continue
            if tok == "--out":
                skip = True
                continue
            if tok.startswith("--out="):
                continue
            cleaned.append(tok)
        command = cleaned + ["--out", args.out]
    return run(command)


def _graph_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--family", choices=sorted(FAMILIES) + ["random-geometric", "file"], default="complete")
    p.add_argument("--graph", help="graph file for --family file")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--radius", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=1.0, help="Gaussian kernel scale")
    p.add_argument("--beta", type=float, default=1.0, help="Gaussian kernel decay")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--random-weights", action="store_true", help="draw edge weights uniformly from (0, 1)")
    p.add_argument("--kind", default="invsim", help="naive | invsim | diffusion[:alpha] | explicit[:file]")
    p.add_argument("--u0", type=int, default=0)
    return p


def _curve_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.add_argument("--gnuplot", action="store_true")
    return p


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphspread", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    graph_opts, curve_opts = _graph_options(), _curve_options()

    p = sub.add_parser("curve", parents=[graph_opts, curve_opts], help="trace one uncertainty curve")
    p.add_argument("--normalize", action="store_true", help="scale so the curve starts at g = 1")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("mean-curve", parents=[graph_opts, curve_opts], help="mean normalized curve over random trials")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_mean_curve)

    p = sub.add_parser("spread", parents=[graph_opts], help="spreads of one signal")
    p.add_argument("--signal", required=True)
    p.add_argument("--normalize", action="store_true", help="normalize the signal to unit norm")
    p.set_defaults(func=cmd_spread)

    p = sub.add_parser("image-curve", parents=[curve_opts], help="normalized curves of an 8-neighbour image graph")
    p.add_argument("--image", required=True, help="PGM file (P2 or P5, 8-bit)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--kind", action="append", help="repeatable; default invsim and diffusion:1")
    p.add_argument("--u0", type=int, default=0)
    p.set_defaults(func=cmd_image_curve, family="image")

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to this path instead of the recorded one")
    p.set_defaults(func=cmd_replay)
    return parser


def _configure_logging():
    level = os.environ.get("GRAPHSPREAD_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def run(argv) -> int:
    argv = list(argv)
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    try:
        return args.func(args, argv)
    except GraphSpreadError as e:
        print(f"graphspread: error: {e}", file=sys.stderr)
        return e.exit_code
    except UnicodeDecodeError as e:
        print(f"graphspread: error: {ParseError(e)}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"graphspread: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    _configure_logging()
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
