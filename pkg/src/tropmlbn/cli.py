"""Command line front end: ``tropmlbn {simulate,estimate,census,metrics}``.

Exit codes: 0 on success, 1 for configuration errors, 2 for data errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, DataError
from .harness import (ExperimentConfig, format_matrix, run_census, run_real_data,
                      run_simulation, write_estimate)
from .metrics import evaluate


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--seed", type=int, help="base random seed (required here or in the config)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. model.d=[5,10]")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tropmlbn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="mode", required=True)
    sub.add_parser("simulate", parents=[common], help="run a simulation study")
    est = sub.add_parser("estimate", parents=[common], help="learn a DAG from a CSV file")
    est.add_argument("csv", nargs="?", help="data file (overrides data.path)")
    sub.add_parser("census", parents=[common], help="census of dual triangulations")
    met = sub.add_parser("metrics", parents=[common], help="compare two graphs given as JSON")
    met.add_argument("true_graph")
    met.add_argument("est_graph")
    return p


def _load_edges(path):
    obj = json.loads(Path(path).read_text())
    if "result" in obj:
        obj = obj["result"]
    return obj.get("d"), {(int(e[0]), int(e[1])) for e in obj["edges"]}


def _simulate(cfg, out):
    table = run_simulation(cfg)
    table.write(out)
    for row in table.rows:
        print(f"d={row['d']} completed={row['completed']}/{row['repetitions']} "
              f"TPR {row['tpr_display']}  FDR {row['fdr_display']}  nSHD {row['nshd_display']}")


def _estimate(cfg, out, csv_path):
    path = csv_path or cfg["data"]["path"]
    if path is None:
        raise ConfigError("estimate needs a CSV path (argument or data.path)")
    t = cfg["estimator"]["threshold"]
    result, star, info = run_real_data(path, cfg["data"]["preprocess"], cfg["data"]["columns"],
                                       cfg.scoring, t)
    write_estimate(out, cfg, result, star, info)
    names = info["columns"]
    print(f"rows used {info['rows_used']}, dropped (nonpositive) {info['dropped_nonpositive']}, "
          f"dropped (missing) {info['dropped_missing']}")
    print("estimate C_hat:")
    print(format_matrix(result.C_hat, names))
    if star is None:
        print("Kleene star: diverges (negative cycle)")
    else:
        print("Kleene star of C_hat:")
        print(format_matrix(star, names))
    print("acyclic" if result.is_acyclic else f"cycle: {[names[v] for v in result.cycle]}")


def _census(cfg, out):
    sizes = run_census(cfg, out)
    for d, s in sizes.items():
        print(f"d={d}: set cover sizes {{{', '.join(map(str, s))}}}")


def _metrics(args):
    d1, E = _load_edges(args.true_graph)
    d2, Ehat = _load_edges(args.est_graph)
    d = d1 if d1 is not None else d2
    if d1 is not None and d2 is not None and d1 != d2:
        raise DataError(f"graphs on {d1} and {d2} nodes")
    report = evaluate(E, Ehat, d)
    print(json.dumps({k: v for k, v in report.as_floats().items()}))


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.mode == "metrics":
            _metrics(args)
            return 0
        cfg = ExperimentConfig.load(args.config, args.set, mode=args.mode, seed=args.seed,
                                    output=args.out, threads=args.threads)
        out = cfg["output"]
        if args.mode == "simulate":
            _simulate(cfg, out)
        elif args.mode == "estimate":
            _estimate(cfg, out, args.csv)
        else:
            _census(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    return 0
