"""``tda-nhst`` command-line entry point.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import read_matrix_csv
from .diagrams import read_diagram_file, read_diagram_set, write_diagram_file, write_diagram_set
from .filtrations import concurrence_filtration, dichotomize
from .matching import InfinitePolicy, diagram_distance, pairwise_distance_matrix
from .nhst import DEFAULT_MAX_RELABELINGS, Labeling, draw_seed, exhaustive_test, randomization_test
from .persistence import compute_persistence, rips_persistence
from .pht import pht
from .shapes import PRESETS, preset, run_sweep, write_sweep_csv

log = logging.getLogger("tda_nhst")

EXIT_USAGE = 1
EXIT_DATA = 2

# every CPU, capped by TDA_NHST_THREADS
AUTO_JOBS = -1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _policy(text):
    try:
        return InfinitePolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _fmt(x):
    return format(float(x), ".17g")


def _diagram_dir(paths_or_dir):
    """Diagram files in a directory: manifest order if present, else sorted ``*.dgm``."""
    directory = Path(paths_or_dir)
    if (directory / "labels.csv").is_file():
        names, diagrams, _ = read_diagram_set(directory)
        return names, diagrams
    names = sorted(p.name for p in directory.glob("*.dgm"))
    if not names:
        raise ValueError(f"{directory}: no diagram files found")
    return names, [read_diagram_file(directory / n) for n in names]


def cmd_dist(args):
    a, b = read_diagram_file(args.file_a), read_diagram_file(args.file_b)
    print(_fmt(diagram_distance(a, b, args.inf)))


def cmd_pairwise(args):
    names, diagrams = _diagram_dir(args.directory)
    d = pairwise_distance_matrix(diagrams, args.inf, n_jobs=AUTO_JOBS)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + names)
        for name, row in zip(names, d):
            writer.writerow([name] + [_fmt(x) for x in row])


def _write_degrees(diagrams, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for dgm in diagrams:
        write_diagram_file(dgm, out / f"dim{dgm.hom_dim}.dgm")


def cmd_rips(args):
    pts = read_matrix_csv(args.points)
    _write_degrees(rips_persistence(pts, args.maxdim, args.maxradius), args.output)


def _concurrence_diagrams(path, cutoff, maxdim, budget):
    activity = dichotomize(read_matrix_csv(path), cutoff)
    fc = concurrence_filtration(activity, maxdim + 1, budget=budget)
    return compute_persistence(fc, maxdim)


def cmd_concurrence(args):
    src = Path(args.matrix)
    if src.is_dir():
        # a labelled set of matrices becomes one diagram set per degree
        with open(src / "labels.csv", newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        per_subject = [_concurrence_diagrams(src / n, args.cutoff, args.maxdim, args.budget) for n, _ in rows]
        names = [Path(n).stem + ".dgm" for n, _ in rows]
        labels = [lab for _, lab in rows]
        for k in range(args.maxdim + 1):
            write_diagram_set([dg[k] for dg in per_subject], labels, Path(args.output) / f"dim{k}", names)
    else:
        _write_degrees(_concurrence_diagrams(src, args.cutoff, args.maxdim, args.budget), args.output)


def cmd_pht(args):
    rep = pht(read_matrix_csv(args.polygon), args.dirs, args.normalize)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(args.dirs - 1)))
    for k, dgm in enumerate(rep.diagrams):
        write_diagram_file(dgm, out / f"dir{k:0{width}d}.dgm")
    np.savetxt(out / "directions.csv", rep.directions, delimiter=",", fmt="%.17g")


def cmd_test(args):
    names, diagrams, labels = read_diagram_set(args.directory)
    labeling = Labeling.from_labels(labels)
    d = pairwise_distance_matrix(diagrams, args.inf, n_jobs=AUTO_JOBS)
    seed = args.seed
    if args.exhaustive:
        result = exhaustive_test(d, labeling, args.max_relabelings)
    else:
        if seed is None:
            seed = draw_seed()
            log.warning("no --seed given; using seed %d", seed)
        result = randomization_test(d, labeling, args.reps, seed=seed, n_jobs=AUTO_JOBS)
    p = result.p_value_add_one if args.add_one else result.p_value
    if args.json:
        payload = result.to_dict()
        payload["p_value_reported"] = p
        payload["groups"] = {str(c): len(g) for c, g in zip(np.unique(labels), labeling.groups)}
        payload["provenance"] = {
            "version": __version__,
            "command": "test",
            "flags": {
                "directory": str(args.directory),
                "reps": args.reps,
                "seed": seed,
                "exhaustive": args.exhaustive,
                "inf": str(args.inf),
                "add_one": args.add_one,
            },
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"observed_loss {_fmt(result.observed_loss)}")
        print(f"replicates {result.n_replicates}")
        print(f"count {result.count}")
        print(f"p_value {_fmt(p)}")
        if result.seed is not None:
            print(f"seed {result.seed}")


def cmd_simulate(args):
    overrides = {}
    if args.reps is not None:
        overrides["n_replicates"] = args.reps
    seed = args.seed
    if seed is None:
        seed = draw_seed()
        log.warning("no --seed given; using seed %d", seed)
    cfg = preset(args.preset, args.scale, seed, n_jobs=AUTO_JOBS, **overrides)
    write_sweep_csv(run_sweep(cfg), args.output)


def build_parser():
    parser = _Parser(prog="tda-nhst", description="Permutation tests on persistence diagrams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="matching distance between two diagram files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--inf", type=_policy, default=InfinitePolicy(), help="drop | truncate=<cap>")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("pairwise", help="distance matrix of a directory of diagrams")
    p.add_argument("directory")
    p.add_argument("--inf", type=_policy, default=InfinitePolicy())
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pairwise)

    p = sub.add_parser("rips", help="Rips persistence of a point cloud CSV")
    p.add_argument("points")
    p.add_argument("--maxdim", type=_nonneg_int, required=True, help="largest homology degree")
    p.add_argument("--maxradius", type=float, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_rips)

    p = sub.add_parser("concurrence", help="concurrence persistence of an activity matrix CSV")
    p.add_argument("matrix", help="matrix CSV, or a directory of them with labels.csv")
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--maxdim", type=_nonneg_int, required=True, help="largest homology degree")
    p.add_argument("--budget", type=_positive_int, default=2_000_000)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_concurrence)

    p = sub.add_parser("pht", help="degree-0 persistent homology transform of a polygon CSV")
    p.add_argument("polygon")
    p.add_argument("--dirs", type=_positive_int, default=64)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pht)

    p = sub.add_parser("test", help="randomization test on a labelled diagram set")
    p.add_argument("directory")
    p.add_argument("--reps", type=_positive_int, default=10000)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--max-relabelings", type=_positive_int, default=DEFAULT_MAX_RELABELINGS)
    p.add_argument("--inf", type=_policy, default=InfinitePolicy())
    p.add_argument("--add-one", action="store_true", help="report (count+1)/(N+1)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="p-value sweep for a simulation preset")
    p.add_argument("--preset", choices=sorted(PRESETS), required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not 0 < args.scale <= 1:
        parser.error("--scale must lie in (0, 1]")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"tda-nhst: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
