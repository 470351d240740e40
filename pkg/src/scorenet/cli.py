"""Command-line front end.

Usage::

    scorenet ingest --author-paper AP.tsv --citations CT.tsv --out DIR
    scorenet run TASK [--config FILE] [--seed N] [--workers N] [--out DIR] [--key value ...]

Configuration files hold ``key = value`` lines using the same keys as the
flags (``degree_min`` or ``degree-min``); flags override the file.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import platform
import sys
import warnings
from dataclasses import dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .csvio import parse_id, write_csv
from .graph import Graph, GraphError, read_edge_list, write_edge_list
from .ingest import (DEFAULT_WINDOWS, IngestError, WindowSpec, build_citee_network, build_citee_window_sequence,
                     build_coauthorship, coauthorship_window_sequence, read_author_paper, read_citations,
                     validation_report)
from .models import ModelError, read_param_file, sample_dcmm
from .pipeline import (build_tree, citer_citee_scores, diversity_report, ego_diversity_batch, research_map,
                       sankey, trajectories, write_citer_citee, write_diversity, write_ego, write_research_map,
                       write_sankey, write_sankey_nodes, write_trajectories, write_tree)
from .sgnq import SgnQError
from .spectral import (EigenError, EmbeddingError, SimplexError, estimate_memberships, score_embed, scree_data,
                       top_eigs, vertex_hunt, write_embedding, write_scree)

TASKS = ("citee-map", "trajectories", "diversity", "tree", "ego", "citer-citee", "sankey", "scree", "simulate")
SANKEY_DEFAULT = "1975-1997,1995-2007,2005-2015"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    author_paper: str = ""
    citations: str = ""
    edges: str = ""
    window_edges: str = ""
    params: str = ""
    windows: str = ""
    sankey_windows: str = SANKEY_DEFAULT
    journals: str = ""
    degree_min: int = 60
    weight_min: int = 2
    fresh_years: int = 10
    m0: int = 1
    K: int = 3
    K0: str = "2"
    k0_overrides: str = ""
    Ks: str = "3,4,3"
    c0: float = 1.0
    t: float = 0.0
    L: int = 15
    t0: int = 1
    p_stop: float = 1e-3
    size_stop: int = 250
    kmax: int = 10
    authors: str = ""
    top_n: int = 0
    quantile_high: float = 0.9
    quantile_low: float = 0.5
    drill_p: float = 0.0
    min_count: int = 1
    min_ego: int = 10
    seed: int = 0
    restarts: int = 20
    workers: int = 0
    out: str = "out"

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)
        need(self.degree_min >= 0, "degree_min must be >= 0")
        need(self.weight_min >= 1, "weight_min must be >= 1")
        need(self.fresh_years >= 1, "fresh_years must be >= 1")
        need(self.m0 >= 1, "m0 must be >= 1")
        need(self.K >= 2, "K must be >= 2")
        need(self.c0 >= 0, "c0 must be >= 0")
        need(self.t >= 0, "t must be >= 0 (0 means log n)")
        need(self.L >= 2, "L must be >= 2")
        need(self.t0 >= 1, "t0 must be >= 1")
        need(0 < self.p_stop < 1, "p_stop must lie in (0, 1)")
        need(self.size_stop >= 1, "size_stop must be >= 1")
        need(self.kmax >= 1, "kmax must be >= 1")
        need(self.top_n >= 0, "top_n must be >= 0")
        need(0 < self.quantile_low <= self.quantile_high < 1, "need 0 < quantile_low <= quantile_high < 1")
        need(0 <= self.drill_p < 1, "drill_p must lie in [0, 1)")
        need(self.min_count >= 1, "min_count must be >= 1")
        need(self.min_ego >= 5, "min_ego must be >= 5")
        need(self.seed >= 0, "seed must be >= 0")
        need(self.restarts >= 1, "restarts must be >= 1")
        need(self.workers >= 0, "workers must be >= 0")
        self.k0_schedule()
        self.k0_override_map()
        self.ks()
        for spec in (self.windows, self.sankey_windows):
            if spec:
                WindowSpec.parse(spec)

    def k0_schedule(self) -> list[int]:
        try:
            sched = [int(x) for x in self.K0.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad K0 schedule {self.K0!r}") from exc
        if not sched or min(sched) < 2:
            raise ConfigError("K0 schedule entries must be >= 2")
        return sched

    def k0_override_map(self) -> dict:
        out = {}
        for item in filter(None, (s.strip() for s in self.k0_overrides.split(";"))):
            label, _, val = item.partition("=")
            try:
                out[label.strip()] = int(val)
            except ValueError as exc:
                raise ConfigError(f"bad K0 override {item!r}") from exc
            if out[label.strip()] < 2:
                raise ConfigError("K0 overrides must be >= 2")
        return out

    def ks(self) -> list[int]:
        try:
            ks = [int(x) for x in self.Ks.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad Ks {self.Ks!r}") from exc
        if min(ks) < 1:
            raise ConfigError("Ks entries must be >= 1")
        return ks

    def window_spec(self) -> WindowSpec:
        return WindowSpec.parse(self.windows) if self.windows else WindowSpec(DEFAULT_WINDOWS)

    def journal_set(self):
        return [parse_id(j.strip()) for j in self.journals.split(",") if j.strip()] or None

    def hash(self) -> str:
        d = dataclasses.asdict(self)
        d.pop("workers")
        d.pop("out")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _convert(name: str, raw):
    typ = _FIELDS[name].type
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {typ}") from exc
    return str(raw)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; unknown keys are rejected."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _convert(key, val)
    return out


def build_config(file_values: dict, flag_values: dict) -> RunConfig:
    merged = {**file_values, **{k: _convert(k, v) for k, v in flag_values.items() if v is not None}}
    cfg = RunConfig(**merged)
    if cfg.workers == 0:
        cfg.workers = os.cpu_count() or 1
    cfg.validate()
    return cfg


# -- task helpers ---------------------------------------------------------------

def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        val = getattr(cfg, name)
        if not val:
            raise ConfigError(f"missing required setting {name}")
        paths = val.split(",") if name == "window_edges" else [val]
        for p in paths:
            if not Path(p).is_file():
                raise ConfigError(f"{name}: file not found: {p}")


def _tables(cfg: RunConfig):
    return read_author_paper(cfg.author_paper), read_citations(cfg.citations)


def _single_graph(cfg: RunConfig, kind: str) -> Graph:
    if cfg.edges:
        return read_edge_list(cfg.edges)
    if kind == "citee":
        ap, ct = _tables(cfg)
        return build_citee_network(ap, ct, cfg.window_spec()[0], cfg.degree_min, cfg.weight_min, cfg.fresh_years)
    ap = read_author_paper(cfg.author_paper)
    return build_coauthorship(ap, cfg.m0, cfg.journal_set())[0]


def _graph_inputs(cfg: RunConfig, kind: str) -> None:
    if cfg.edges:
        _require(cfg, "edges")
    elif kind == "citee":
        _require(cfg, "author_paper", "citations")
    else:
        _require(cfg, "author_paper")


def _window_graphs(cfg: RunConfig, kind: str) -> list[Graph]:
    if cfg.window_edges:
        gs = [read_edge_list(p) for p in cfg.window_edges.split(",")]
        if any(g.node_ids != gs[0].node_ids for g in gs):
            raise GraphError("window edge lists must list the same nodes in the same order")
        return gs
    if kind == "citee":
        ap, ct = _tables(cfg)
        spec = cfg.window_spec()
        ref = build_citee_network(ap, ct, spec[0], cfg.degree_min, cfg.weight_min, cfg.fresh_years)
        return build_citee_window_sequence(ap, ct, spec, list(ref.node_ids), cfg.weight_min, cfg.fresh_years)
    ap = read_author_paper(cfg.author_paper)
    return coauthorship_window_sequence(ap, WindowSpec.parse(cfg.sankey_windows), cfg.m0, cfg.journal_set())


def _window_inputs(cfg: RunConfig, kind: str) -> None:
    if cfg.window_edges:
        _require(cfg, "window_edges")
    elif kind == "citee":
        _require(cfg, "author_paper", "citations")
    else:
        _require(cfg, "author_paper")


def _authors(cfg: RunConfig, g: Graph | None, fallback_ids=None) -> list:
    spec = cfg.authors.strip()
    if spec.startswith("top:"):
        if g is None:
            raise ConfigError("authors = top:N needs a graph")
        deg = g.degrees()
        order = np.lexsort((np.arange(g.n), -deg))[:int(spec[4:])]
        return [g.node_ids[i] for i in order]
    if spec:
        return [parse_id(s.strip()) for s in spec.split(",") if s.strip()]
    return list(g.node_ids if g is not None else fallback_ids)


def _trunc(cfg: RunConfig):
    return None if cfg.t == 0 else cfg.t


# -- tasks -----------------------------------------------------------------------

def task_citee_map(cfg: RunConfig, out: Path) -> list[Path]:
    g = _single_graph(cfg, "citee")
    pairs = top_eigs(g, cfg.K)
    e = score_embed(pairs)
    V = vertex_hunt(e, cfg.K, seed=cfg.seed, n_init=cfg.restarts)
    model = estimate_memberships(e, V, pairs)
    rmap = research_map(e, V, cfg.L, seed=cfg.seed, degrees=g.degrees(), node_ids=g.node_ids,
                        n_init=cfg.restarts)
    files = [out / "network.tsv", out / "embedding.csv", out / "research_map.csv"]
    write_edge_list(g, files[0])
    write_embedding(e, files[1], g.node_ids, model)
    write_research_map(rmap, files[2])
    return files


def task_trajectories(cfg: RunConfig, out: Path, report: bool = False) -> list[Path]:
    gs = _window_graphs(cfg, "citee")
    if cfg.t0 > len(gs):
        raise ConfigError(f"t0={cfg.t0} exceeds the {len(gs)} windows")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ts = trajectories(gs, cfg.t0, cfg.K)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    files = [out / "trajectories.csv"]
    write_trajectories(ts, files[0])
    if ts.E is not None:
        deg = gs[cfg.t0 - 1].degrees()
        rows = diversity_report(ts, cfg.top_n or None, deg, cfg.quantile_high, cfg.quantile_low)
        files.append(out / "diversity.csv")
        write_diversity(rows, files[-1])
    elif report:
        raise ValueError("diversity undefined for single window")
    return files


def task_tree(cfg: RunConfig, out: Path) -> list[Path]:
    g = _single_graph(cfg, "coauthor")
    sched = cfg.k0_schedule()
    tree = build_tree(g, sched[0] if len(sched) == 1 else sched, cfg.p_stop, cfg.size_stop, cfg.seed,
                      overrides=cfg.k0_override_map(), c0=cfg.c0)
    files = [out / "tree.json", out / "tree.txt"]
    write_tree(tree, files[0])
    files[1].write_text(tree.to_text(), encoding="utf-8")
    return files


def task_ego(cfg: RunConfig, out: Path) -> list[Path]:
    g = _single_graph(cfg, "coauthor")
    rows = ego_diversity_batch(g, _authors(cfg, g), cfg.min_ego, cfg.drill_p or None, cfg.seed, cfg.workers)
    path = out / "ego.csv"
    write_ego(rows, path)
    return [path]


def task_citer_citee(cfg: RunConfig, out: Path) -> list[Path]:
    ap, ct = _tables(cfg)
    ids = np.unique(ap.author)
    g = None
    if cfg.authors.startswith("top:"):
        g = build_coauthorship(ap, 1)[0]
    rows = citer_citee_scores(ap, ct, _authors(cfg, g, ids.tolist()), cfg.min_count)
    path = out / "citer_citee.csv"
    write_citer_citee(rows, path)
    return [path]


def task_sankey(cfg: RunConfig, out: Path) -> list[Path]:
    gs = _window_graphs(cfg, "coauthor")
    ks = cfg.ks()
    if len(ks) != len(gs):
        raise ConfigError(f"{len(ks)} Ks for {len(gs)} windows")
    flows = sankey(gs, ks, seed=cfg.seed, c0=cfg.c0)
    files = [out / "sankey.csv", out / "sankey_nodes.csv"]
    write_sankey(flows, files[0])
    write_sankey_nodes(flows, files[1])
    return files


def task_scree(cfg: RunConfig, out: Path) -> list[Path]:
    g = _single_graph(cfg, "coauthor")
    rows = scree_data(g, min(cfg.kmax, g.n), cfg.c0)
    path = out / "scree.csv"
    write_scree(rows, path)
    return [path]


def task_simulate(cfg: RunConfig, out: Path) -> list[Path]:
    params = read_param_file(cfg.params, seed=cfg.seed)
    g = sample_dcmm(params, cfg.seed)
    files = [out / "simulated.tsv", out / "truth.csv"]
    write_edge_list(g, files[0])
    K = params.K
    write_csv(files[1], ["node_id", "theta"] + [f"pi_{k}" for k in range(1, K + 1)],
              ([i, params.theta[i], *params.Pi[i]] for i in range(params.n)))
    return files


def _check_inputs(task: str, cfg: RunConfig) -> None:
    """Validate required inputs before any data is read."""
    if task == "citee-map":
        _graph_inputs(cfg, "citee")
    elif task in ("trajectories", "diversity"):
        _window_inputs(cfg, "citee")
    elif task in ("tree", "ego", "scree"):
        _graph_inputs(cfg, "coauthor")
    elif task == "citer-citee":
        _require(cfg, "author_paper", "citations")
    elif task == "sankey":
        _window_inputs(cfg, "coauthor")
    elif task == "simulate":
        _require(cfg, "params")


RUNNERS = {
    "citee-map": task_citee_map,
    "trajectories": task_trajectories,
    "diversity": lambda cfg, out: task_trajectories(cfg, out, report=True),
    "tree": task_tree,
    "ego": task_ego,
    "citer-citee": task_citer_citee,
    "sankey": task_sankey,
    "scree": task_scree,
    "simulate": task_simulate,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, command: str, cfg: RunConfig, files: list[Path]) -> Path:
    manifest = {
        "command": command,
        "config": dataclasses.asdict(cfg),
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "versions": {"scorenet": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "outputs": {p.name: _sha256(p) for p in files},
        "created": datetime.now(timezone.utc).isoformat(),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


# -- entry point -----------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scorenet", description="Network analysis of coauthorship and citation data.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH")
        for f in fields(RunConfig):
            flag = "--" + f.name.replace("_", "-")
            p.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper())
        return p

    common(sub.add_parser("ingest", help="parse and validate the data tables"))
    run = common(sub.add_parser("run", help="run an analysis task"))
    run.add_argument("task", choices=TASKS)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    flags = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(file_values, flags)
        if args.command == "ingest":
            _require(cfg, "author_paper", "citations")
        else:
            _check_inputs(args.task, cfg)
    except (ConfigError, IngestError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "ingest":
            ap_tab, ct_tab = _tables(cfg)
            report = validation_report(ap_tab, ct_tab)
            path = out / "ingest_report.json"
            path.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n", encoding="utf-8")
            print(json.dumps(report, indent=1, sort_keys=True))
            files, command = [path], "ingest"
        else:
            files, command = RUNNERS[args.task](cfg, out), f"run {args.task}"
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, GraphError, ModelError, SgnQError, EigenError, EmbeddingError, SimplexError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_manifest(out, command, cfg, files)
    for p in files:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
