"""Config-driven experiments: simulation studies, real data and census runs.

Every output file starts with comment lines recording the package version
and the fully resolved configuration, so a result can be regenerated from
the file alone.  Nothing time- or host-dependent is written, which keeps
outputs byte-identical for a given configuration and seed.
"""

from concurrent.futures import ThreadPoolExecutor
import copy
import csv
from dataclasses import dataclass, field
import io
import json
import logging
import math
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import AllRowsDropped, ConfigError, NegativeCycle, ParseError
from .learning import (ScoreConfig, calibrate_threshold, edges_of, estimate_with_ordering,
                       known_dag_estimate, score_differences)
from .metrics import evaluate
from .model import InnovationSpec, generate_sample, random_model
from .setcover import census
from .tropical import kleene_star, matrix_to_json

log = logging.getLogger(__name__)

EXECUTION_KEYS = ("threads", "output")
METRICS = ("shd", "nshd", "fdr", "fpr", "tpr")

DEFAULTS = {
    "mode": "simulate",
    "seed": None,
    "output": "results",
    "threads": 1,
    "model": {"d": [5], "p": 1.0, "tau": 1.0, "permute": False},
    "innovation": {"kind": "gaussian", "mean": 0.0, "std": 1.0, "alpha": 1.0},
    "sampling": {"n": 1000, "repetitions": 50},
    "estimator": {"method": "ordering", "threshold": 1.0, "truth": "auto"},
    "scoring": {"kind": "top_k", "k": 30, "r_hi": 0.95, "r_lo": 0.5},
    "census": {"d": [3, 4], "num_samples": 200, "greedy_repetitions": 100, "budget": 1_000_000},
    "data": {"path": None, "preprocess": "neg_log", "columns": None},
}


def _merge(base, extra):
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def parse_override(text):
    """``"a.b=VALUE"`` -> nested dict; ``VALUE`` is read as a TOML literal if possible."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form KEY=VALUE")
    key, raw = text.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    out = value
    for part in reversed(key.strip().split(".")):
        out = {part: out}
    return out


@dataclass
class ExperimentConfig:
    """Resolved configuration; ``raw`` keeps the nested form echoed to outputs."""

    raw: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    @classmethod
    def load(cls, path=None, overrides=(), **top):
        raw = copy.deepcopy(DEFAULTS)
        if path is not None:
            try:
                with open(path, "rb") as fh:
                    raw = _merge(raw, tomllib.load(fh))
            except (OSError, tomllib.TOMLDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for text in overrides:
            raw = _merge(raw, parse_override(text))
        for key, value in top.items():
            if value is not None:
                raw[key] = value
        cfg = cls(raw)
        cfg.validate()
        return cfg

    @classmethod
    def from_dict(cls, data):
        cfg = cls(_merge(DEFAULTS, data))
        cfg.validate()
        return cfg

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def seed(self):
        return self.raw["seed"]

    @property
    def d_values(self):
        d = self.raw["model"]["d"]
        return [int(v) for v in (d if isinstance(d, list) else [d])]

    @property
    def innovation(self):
        return InnovationSpec(**self.raw["innovation"])

    @property
    def scoring(self):
        return ScoreConfig(**self.raw["scoring"])

    def validate(self):
        r = self.raw
        if r["mode"] not in ("simulate", "estimate", "census", "metrics"):
            raise ConfigError(f"unknown mode {r['mode']!r}")
        if r["seed"] is None:
            raise ConfigError("a seed is required")
        try:
            int(r["seed"])
            self.innovation
            self.scoring
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        m = r["model"]
        if not 0 < m["p"] <= 1:
            raise ConfigError("model.p must lie in (0, 1]")
        if m["tau"] < 0:
            raise ConfigError("model.tau must be nonnegative")
        if any(d < 1 for d in self.d_values):
            raise ConfigError("model.d must be positive")
        if r["sampling"]["n"] < 1 or r["sampling"]["repetitions"] < 0:
            raise ConfigError("sampling.n must be positive and repetitions nonnegative")
        est = r["estimator"]
        if est["method"] not in ("ordering", "known_dag"):
            raise ConfigError(f"unknown estimator {est['method']!r}")
        if est["truth"] not in ("auto", "closure", "dag"):
            raise ConfigError("estimator.truth must be 'auto', 'closure' or 'dag'")
        t = est["threshold"]
        if t != "auto" and not (isinstance(t, (int, float)) and t > 0):
            raise ConfigError("estimator.threshold must be positive or 'auto'")
        if r["data"]["preprocess"] not in ("neg_log", "none"):
            raise ConfigError("data.preprocess must be 'neg_log' or 'none'")
        if int(r["threads"]) < 1:
            raise ConfigError("threads must be at least 1")

    def provenance(self):
        """Config echoed into outputs.  Thread count and output directory are
        left out because they must not change the bytes written."""
        return {k: v for k, v in self.raw.items() if k not in EXECUTION_KEYS}

    def to_json(self):
        return json.dumps(self.provenance(), sort_keys=True, separators=(",", ":"))


def _header(cfg):
    return f"# tropmlbn {__version__}\n# config: {cfg.to_json()}\n"


def _write_csv(path, cfg, columns, rows):
    buf = io.StringIO()
    buf.write(_header(cfg))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(buf.getvalue())


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_json(path, cfg, payload):
    payload = {"version": __version__, "config": cfg.provenance(), **payload}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


# -- simulation -------------------------------------------------------------


def true_edges(model, truth="closure"):
    """Ground-truth edges in observed labels.

    ``"closure"`` is the support of the Kleene star, the most any estimator
    can identify; ``"dag"`` is the literal edge set.  ``"auto"`` picks the
    closure for the ordering-free estimator and the DAG when it is known.
    """
    if truth == "dag":
        return model.observed_dag().edges
    return edges_of(model.observed_star())


def _one_repetition(cfg, d, r):
    seed = int(cfg.seed)
    m = cfg["model"]
    rec = {"d": d, "rep": r}
    try:
        model = random_model(d, m["p"], m["tau"], m["permute"], (seed, d, r, 0))
        S = generate_sample(model, cfg["sampling"]["n"], cfg.innovation, (seed, d, r, 1))
        if cfg["estimator"]["method"] == "known_dag":
            est_edges = edges_of(known_dag_estimate(S, model.observed_dag()))
            rec["acyclic"] = True
        else:
            t = cfg["estimator"]["threshold"]
            scores = None
            if t == "auto":
                scores = score_differences(S, cfg.scoring)
                t = calibrate_threshold(scores)
            res = estimate_with_ordering(S, t, cfg.scoring, scores=scores)
            est_edges = res.edges
            rec["acyclic"] = res.is_acyclic
        truth = cfg["estimator"]["truth"]
        if truth == "auto":
            truth = "dag" if cfg["estimator"]["method"] == "known_dag" else "closure"
        report = evaluate(true_edges(model, truth), est_edges, d)
        rec.update(report.as_floats())
        rec["shd"] = report.shd
    except Exception as exc:  # recorded per repetition, never aborts the batch
        log.warning("repetition d=%d r=%d failed: %s", d, r, exc)
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


@dataclass
class ResultTable:
    rows: list
    repetitions: list
    config: ExperimentConfig

    SUMMARY_COLUMNS = (
        ["d", "setting", "repetitions", "completed"]
        + [f"{m}_{s}" for m in METRICS for s in ("mean", "sd")]
        + [f"{m}_display" for m in METRICS[1:]]
    )
    REP_COLUMNS = ["run_id", "d", "rep"] + list(METRICS) + ["acyclic", "error"]

    def row(self, d):
        return next(r for r in self.rows if r["d"] == d)

    def write(self, outdir):
        outdir = Path(outdir)
        _write_csv(outdir / "simulation.csv", self.config, self.SUMMARY_COLUMNS, self.rows)
        reps = [{**rec, "run_id": f"d{rec['d']}-r{rec['rep']}"} for rec in self.repetitions]
        _write_csv(outdir / "repetitions.csv", self.config, self.REP_COLUMNS, reps)
        _write_json(outdir / "config.json", self.config, {})


def _setting(cfg):
    m, e = cfg["model"], cfg["estimator"]
    order = "random" if m["permute"] else "fixed"
    return f"{cfg['innovation']['kind']};p={m['p']};{order};{cfg['scoring']['kind']};{e['method']}"


def _summarize(d, recs, cfg):
    done = [r for r in recs if "error" not in r]
    row = {"d": d, "setting": _setting(cfg), "repetitions": len(recs), "completed": len(done)}
    for m in METRICS:
        vals = np.array([r[m] for r in done if r.get(m) is not None], dtype=float)
        if len(vals):
            mean = float(math.fsum(vals) / len(vals))
            sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        else:
            mean = sd = None
        row[f"{m}_mean"], row[f"{m}_sd"] = mean, sd
        if m != "shd":
            row[f"{m}_display"] = "" if mean is None else f"{100 * mean:.1f}% ({100 * sd:.1f}%)"
    return row


def run_simulation(cfg):
    """Repeat model draw, sampling, estimation and evaluation; aggregate per ``d``.

    Repetition ``r`` at size ``d`` draws from streams keyed by
    ``(seed, d, r)``, so the table is independent of the thread count.
    """
    reps = int(cfg["sampling"]["repetitions"])
    if reps == 0:
        log.warning("repetitions = 0: writing an empty table")
    jobs = [(d, r) for d in cfg.d_values for r in range(reps)]
    threads = int(cfg["threads"])
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(lambda job: _one_repetition(cfg, *job), jobs))
    else:
        records = [_one_repetition(cfg, d, r) for d, r in jobs]
    rows = []
    if reps:
        for d in cfg.d_values:
            rows.append(_summarize(d, [rec for rec in records if rec["d"] == d], cfg))
    return ResultTable(rows=rows, repetitions=records, config=cfg)


# -- real data --------------------------------------------------------------

MISSING = {"", "na", "nan", "null", "none"}


def read_csv(path, columns=None, preprocess="neg_log"):
    """Load observations from CSV, optionally applying ``-log``.

    Rows with a missing value, or with a nonpositive value under ``neg_log``,
    are dropped and counted.  Returns ``(X, names, info)``.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    try:
        [float(v) for v in rows[0] if v.strip().lower() not in MISSING]
        names = [f"X{k + 1}" for k in range(len(rows[0]))]
        body, first = rows, 1
    except ValueError:
        names = [v.strip() for v in rows[0]]
        body, first = rows[1:], 2
    if columns:
        idx = []
        for c in columns:
            if isinstance(c, int):
                idx.append(c)
            elif c in names:
                idx.append(names.index(c))
            else:
                raise ParseError(f"column {c!r} not in header", column=c)
    else:
        idx = list(range(len(names)))
    data, missing, nonpositive = [], 0, 0
    for offset, row in enumerate(body):
        lineno = first + offset
        if len(row) != len(names):
            raise ParseError(f"row {lineno} has {len(row)} fields, expected {len(names)}", row=lineno)
        values = []
        for k in idx:
            cell = row[k].strip()
            if cell.lower() in MISSING:
                values = None
                break
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(f"row {lineno}, column {names[k]}: {cell!r} is not a number",
                                 row=lineno, column=names[k]) from None
        if values is None:
            missing += 1
            continue
        if preprocess == "neg_log" and min(values) <= 0:
            nonpositive += 1
            continue
        data.append(values)
    if not data:
        raise AllRowsDropped(f"{path}: every row was dropped")
    X = np.array(data)
    if preprocess == "neg_log":
        X = -np.log(X)
    info = {"rows_used": len(data), "dropped_missing": missing, "dropped_nonpositive": nonpositive}
    return X, [names[k] for k in idx], info


def run_real_data(csv_path, preprocess="neg_log", columns=None, scoring=None, t=1.0):
    """Estimate the DAG behind a CSV of observations.

    Returns ``(result, C_star_hat, info)``; ``C_star_hat`` is ``None`` when the
    estimate contains a negative cycle.
    """
    scoring = scoring or ScoreConfig()
    X, names, info = read_csv(csv_path, columns, preprocess)
    scores = None
    if t == "auto":
        scores = score_differences(X, scoring)
        t = calibrate_threshold(scores)
    result = estimate_with_ordering(X, t, scoring, scores=scores)
    try:
        star = kleene_star(result.C_hat)
    except NegativeCycle:
        star = None
    info = {**info, "columns": names}
    return result, star, info


def write_estimate(outdir, cfg, result, star, info):
    payload = {
        "result": result.to_json(),
        "C_hat": matrix_to_json(result.C_hat),
        "C_star_hat": None if star is None else matrix_to_json(star),
        "info": info,
    }
    _write_json(Path(outdir) / "estimate.json", cfg, payload)


def format_matrix(C, names):
    """Text table of a min-plus matrix with ``inf`` markers."""
    width = max(8, *(len(n) for n in names))
    lines = ["".join(f"{n:>{width}}" for n in [""] + list(names))]
    for name, row in zip(names, C):
        cells = ["inf" if np.isinf(v) else f"{v:.2f}" for v in row]
        lines.append(f"{name:>{width}}" + "".join(f"{c:>{width}}" for c in cells))
    return "\n".join(lines)


# -- census -----------------------------------------------------------------

CENSUS_COLUMNS = ["type_id", "d", "count_seen", "greedy_min", "exact_min"]


def run_census(cfg, outdir=None):
    """Census of dual triangulations for each configured ``d``.

    ``census.num_samples`` is one count for every ``d`` or a list aligned
    with ``census.d``.  Writes ``census.csv`` and ``census_types.json``;
    returns the observed set cover sizes per ``d``.
    """
    c = cfg["census"]
    ds = c["d"] if isinstance(c["d"], list) else [c["d"]]
    counts = c["num_samples"] if isinstance(c["num_samples"], list) else [c["num_samples"]] * len(ds)
    if len(counts) != len(ds):
        raise ConfigError("census.num_samples must be one number or one per entry of census.d")
    rows, types, sizes = [], {}, {}
    for d, num in zip(ds, counts):
        result = census(int(d), int(num), rng_seed=(int(cfg.seed), int(d)),
                        repetitions=int(c["greedy_repetitions"]), budget=int(c["budget"]),
                        threads=int(cfg["threads"]))
        for k, rec in enumerate(result.sorted_types()):
            type_id = f"d{d}-t{k}"
            rows.append({"type_id": type_id, "d": int(d), "count_seen": rec.count_seen,
                         "greedy_min": rec.min_cover_greedy, "exact_min": rec.min_cover_exact})
            types[type_id] = rec.subdivision.to_json()
        sizes[int(d)] = result.cover_sizes("exact") or result.cover_sizes("greedy")
    if outdir is not None:
        _write_csv(Path(outdir) / "census.csv", cfg, CENSUS_COLUMNS, rows)
        _write_json(Path(outdir) / "census_types.json", cfg, {"types": types})
    return sizes
