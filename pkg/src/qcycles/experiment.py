"""Mapping sweeps comparing paired, forward, random and greedy cycle directions."""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .direction import (assign_forward, assign_random, expand_paired, greedy_directions,
                        missing_pairs, rebuild_coverage)
from .faultsim import compensated_pairs, sweep_single_faults
from .quorum import QuorumBase, QuorumSet, find_min_redundant_base, lookup_base, read_bases
from .routing import CycleRoute, RoutingError, links_used, route_all
from .topology import (SHIPPED, NodeMapping, Topology, apply_mapping, generate_mappings,
                       read_topology, shipped_topology)

log = logging.getLogger(__name__)

STRATEGIES = ("paired", "forward", "random", "greedy")
EXHAUSTIVE_MAX_N = 30


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    topology: str
    redundancy: int = 2
    strategies: tuple[str, ...] = STRATEGIES
    mappings: int = 100
    seed: int = 1
    quorum_source: str = "search"
    quorum_budget: int = 200_000
    fault_sweep: bool = True
    compensation: bool = False
    fault_mode: str = "segment"
    members_only: bool = False
    workers: int = 1
    output_dir: str = "results"

    def __post_init__(self):
        if self.mappings < 1:
            raise ConfigError("mappings must be >= 1")
        if self.redundancy < 1:
            raise ConfigError("redundancy must be >= 1")
        if not self.strategies:
            raise ConfigError("at least one strategy is required")
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad:
            raise ConfigError(f"unknown strategies {bad}; choose from {STRATEGIES}")
        if self.fault_mode not in ("whole", "segment"):
            raise ConfigError(f"unknown fault_mode {self.fault_mode!r}")


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def parse_config(text: str, base_dir: str | Path = ".") -> ExperimentConfig:
    """Flat ``key = value`` lines; ``#`` comments. Relative paths resolve against ``base_dir``."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    kw: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in types:
            raise ConfigError(f"line {lineno}: unknown or malformed entry {raw!r}")
        if key == "strategies":
            kw[key] = tuple(s.strip() for s in value.split(",") if s.strip())
        elif types[key] in ("int", int):
            try:
                kw[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer") from None
        elif types[key] in ("bool", bool):
            kw[key] = _parse_bool(value)
        else:
            kw[key] = value
    if "topology" not in kw:
        raise ConfigError("config needs a topology entry")
    base_dir = Path(base_dir)
    if kw["topology"] not in SHIPPED:
        kw["topology"] = str(base_dir / kw["topology"])
    if kw.get("quorum_source", "search") != "search":
        kw["quorum_source"] = str(base_dir / kw["quorum_source"])
    kw["output_dir"] = str(base_dir / kw.get("output_dir", "results"))
    return ExperimentConfig(**kw)


def read_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), path.parent)


def load_any_topology(spec: str) -> Topology:
    """A shipped backbone name or an edge-list file path."""
    if spec in SHIPPED:
        return shipped_topology(spec)
    return read_topology(spec)


def obtain_base(n: int, r: int, source: str = "search", seed: int = 0,
                budget: int = 200_000) -> QuorumBase:
    if source != "search":
        base = lookup_base(read_bases(source), n, r)
        if base is None:
            raise ConfigError(f"{source} has no base for N={n}, R={r}")
        return base
    strategy = "exhaustive" if n <= EXHAUSTIVE_MAX_N else "randomized"
    return find_min_redundant_base(n, r, strategy, seed=seed, budget=budget)


def derived_seed(master: int, strategy: str, mapping: int) -> int:
    h = hashlib.blake2b(f"{master}:{strategy}:{mapping}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


@dataclass
class MappingResult:
    mapping_id: int
    strategy: str
    links_used: int
    fault_free_missing: int
    mean_missing: float | None = None
    coverage_pct: float | None = None
    compensated_missing: int | None = None
    fault_rows: list[tuple[int, int, int]] = field(default_factory=list, repr=False)


@dataclass
class StrategyStats:
    samples: int
    links: tuple[float, float]
    missing_pct: tuple[float, float]
    mean_missing: tuple[float, float] | None
    coverage_pct: tuple[float, float] | None


@dataclass
class AggregateResult:
    network: str
    node_count: int
    strategies: dict[str, StrategyStats]
    rows: list[MappingResult]
    skipped: list[tuple[int, str]]


def mean_ci(values: Sequence[float]) -> tuple[float, float]:
    """Mean and 95% normal-approximation half-width, 1.96 * s / sqrt(n)."""
    x = np.asarray(values, dtype=float)
    if len(x) == 0:
        return math.nan, math.nan
    if len(x) == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(1.96 * x.std(ddof=1) / math.sqrt(len(x)))


def _evaluate(t: Topology, cycles: list[CycleRoute], strategy: str, mapping_id: int,
              cfg: ExperimentConfig) -> MappingResult:
    n = t.node_count
    # paired cycles are already expanded, so each twin's links count once here
    res = MappingResult(mapping_id, strategy, links_used(cycles), 0)
    pc = rebuild_coverage(cycles, [c.direction for c in cycles], n, cfg.members_only)
    miss = missing_pairs(pc)
    res.fault_free_missing = len(miss)
    if cfg.compensation:
        covered = {(a, b) for a in range(n) for b in range(n) if a != b} - miss
        comp = compensated_pairs(covered, {c.hub for c in cycles})
        res.compensated_missing = n * (n - 1) - len(comp)
    if cfg.fault_sweep:
        rep = sweep_single_faults(t, cycles, cfg.fault_mode, cfg.members_only)
        res.mean_missing = rep.mean_missing
        res.coverage_pct = 100.0 * rep.coverage
        res.fault_rows = [(u, v, rep.per_edge[(u, v)][1]) for u, v in rep.edges_swept]
    return res


def run_mapping(t: Topology, mapping_id: int, perm, cfg: ExperimentConfig,
                single_qs: QuorumSet | None, paired_qs: QuorumSet | None) -> list[MappingResult]:
    tm = apply_mapping(t, NodeMapping(tuple(perm)))
    single = route_all(tm, single_qs) if single_qs is not None else None
    pair_routes = route_all(tm, paired_qs) if paired_qs is not None else None
    out = []
    for s in cfg.strategies:
        if s == "paired":
            cycles = expand_paired(pair_routes)
        else:
            if s == "forward":
                dirs = assign_forward(single, t.node_count, cfg.members_only).directions
            elif s == "random":
                dirs = assign_random(single, derived_seed(cfg.seed, s, mapping_id),
                                     t.node_count, cfg.members_only).directions
            else:
                dirs = greedy_directions(single, t.node_count, cfg.members_only)[0].directions
            cycles = [c.with_direction(d) for c, d in zip(single, dirs)]
        out.append(_evaluate(tm, cycles, s, mapping_id, cfg))
    return out


def _run_mapping_safe(args):
    t, mapping_id, perm, cfg, single_qs, paired_qs = args
    try:
        return mapping_id, run_mapping(t, mapping_id, perm, cfg, single_qs, paired_qs), None
    except RoutingError as exc:
        return mapping_id, None, str(exc)


def aggregate_rows(network: str, n: int, strategies: Sequence[str], rows: Sequence[MappingResult],
                   skipped: list[tuple[int, str]] | None = None) -> AggregateResult:
    total = n * (n - 1)
    stats = {}
    for s in strategies:
        rs = [r for r in rows if r.strategy == s]
        swept = all(r.mean_missing is not None for r in rs) and rs
        stats[s] = StrategyStats(
            samples=len(rs),
            links=mean_ci([r.links_used for r in rs]),
            missing_pct=mean_ci([100.0 * r.fault_free_missing / total for r in rs]),
            mean_missing=mean_ci([r.mean_missing for r in rs]) if swept else None,
            coverage_pct=mean_ci([r.coverage_pct for r in rs]) if swept else None,
        )
    return AggregateResult(network, n, stats, list(rows), list(skipped or []))


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> AggregateResult:
    t = load_any_topology(cfg.topology)
    n = t.node_count
    single_qs = paired_qs = None
    if any(s != "paired" for s in cfg.strategies):
        single_qs = QuorumSet.from_base(
            obtain_base(n, cfg.redundancy, cfg.quorum_source, cfg.seed, cfg.quorum_budget))
    if "paired" in cfg.strategies:
        paired_qs = QuorumSet.from_base(
            obtain_base(n, 1, cfg.quorum_source, cfg.seed, cfg.quorum_budget))
    maps = generate_mappings(n, cfg.mappings, cfg.seed)
    jobs = [(t, i, m.permutation, cfg, single_qs, paired_qs) for i, m in enumerate(maps)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_run_mapping_safe, jobs))
    else:
        results = [_run_mapping_safe(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    rows: list[MappingResult] = []
    skipped = []
    for mapping_id, res, err in results:
        if res is None:
            log.warning("mapping %d skipped: %s", mapping_id, err)
            skipped.append((mapping_id, err))
        else:
            rows.extend(res)
    agg = aggregate_rows(t.name, n, cfg.strategies, rows, skipped)
    if write:
        write_outputs(agg, cfg)
    return agg


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


AGGREGATE_HEADER = ("mapping_id", "strategy", "links_used", "fault_free_missing",
                    "mean_missing", "coverage_pct", "compensated_missing")
SUMMARY_HEADER = ("network", "node_count", "strategy", "samples", "skipped",
                  "links_mean", "links_ci", "missing_pct_mean", "missing_pct_ci",
                  "mean_missing_mean", "mean_missing_ci", "coverage_pct_mean", "coverage_pct_ci")


def summary_rows(agg: AggregateResult) -> list[tuple]:
    out = []
    for s, st in agg.strategies.items():
        mm = st.mean_missing or (None, None)
        cv = st.coverage_pct or (None, None)
        out.append((agg.network, agg.node_count, s, st.samples, len(agg.skipped),
                    *st.links, *st.missing_pct, *mm, *cv))
    return out


def write_outputs(agg: AggregateResult, cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "aggregate.csv").write_text(_csv_text(AGGREGATE_HEADER, [
        (r.mapping_id, r.strategy, r.links_used, r.fault_free_missing, r.mean_missing,
         r.coverage_pct, r.compensated_missing) for r in agg.rows]))
    if cfg.fault_sweep:
        (out / "faults.csv").write_text(_csv_text(
            ("mapping_id", "strategy", "failed_edge_u", "failed_edge_v", "missing_count"),
            [(r.mapping_id, r.strategy, u, v, m) for r in agg.rows for u, v, m in r.fault_rows]))
        emit_plot_data(agg, out / "plotdata.txt")
    (out / "summary.csv").write_text(_csv_text(SUMMARY_HEADER, summary_rows(agg)))
    (out / "skipped.txt").write_text("".join(f"{i} {e}\n" for i, e in agg.skipped))
    return out


def emit_plot_data(agg: AggregateResult, path: str | Path | None = None) -> str:
    """Columnar coverage table, one row per strategy, for bar charts."""
    lines = ["network strategy coverage_pct ci_halfwidth samples"]
    for s, st in agg.strategies.items():
        if st.coverage_pct is None:
            continue
        m, hw = st.coverage_pct
        lines.append(f"{agg.network} {s} {m:.6f} {hw:.6f} {st.samples}")
    for v in plot_order_violations(agg):
        log.warning("coverage ordering: %s", v)
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def plot_order_violations(agg: AggregateResult) -> list[str]:
    """Soft check: paired coverage should not fall below any single-cycle strategy."""
    p = agg.strategies.get("paired")
    if p is None or p.coverage_pct is None:
        return []
    out = []
    for s, st in agg.strategies.items():
        if s != "paired" and st.coverage_pct is not None and st.coverage_pct[0] > p.coverage_pct[0]:
            out.append(f"{agg.network}: {s} {st.coverage_pct[0]:.3f} > paired {p.coverage_pct[0]:.3f}")
    return out


@dataclass
class Reduction:
    metric: str
    baseline: float
    candidate: float
    change_pct: float | None

    def formatted(self) -> str:
        return "n/a" if self.change_pct is None else f"{self.change_pct:.2f}"


def percent_change(baseline: float, candidate: float) -> float | None:
    if baseline == 0:
        return None
    return 100.0 * (candidate - baseline) / baseline


def compare_strategies(agg: AggregateResult, baseline: str = "forward",
                       candidate: str = "greedy") -> list[Reduction]:
    """Percent change of ``candidate`` against ``baseline``; negative means fewer missing pairs."""
    try:
        b, c = agg.strategies[baseline], agg.strategies[candidate]
    except KeyError as exc:
        raise ValueError(f"strategy {exc.args[0]!r} not in results") from None
    ids_b = sorted(r.mapping_id for r in agg.rows if r.strategy == baseline)
    ids_c = sorted(r.mapping_id for r in agg.rows if r.strategy == candidate)
    if ids_b != ids_c:
        raise ValueError("strategies were evaluated on different mapping sets")
    out = [Reduction("fault_free_missing_pct", b.missing_pct[0], c.missing_pct[0],
                     percent_change(b.missing_pct[0], c.missing_pct[0]))]
    if b.mean_missing is not None and c.mean_missing is not None:
        out.append(Reduction("fault_mean_missing", b.mean_missing[0], c.mean_missing[0],
                             percent_change(b.mean_missing[0], c.mean_missing[0])))
    out.append(Reduction("links_used", b.links[0], c.links[0], percent_change(b.links[0], c.links[0])))
    return out


def _opt(s: str, conv):
    return None if s == "" else conv(s)


def read_aggregate(directory: str | Path) -> AggregateResult:
    """Rebuild an :class:`AggregateResult` from ``aggregate.csv`` and ``summary.csv``."""
    d = Path(directory)
    with open(d / "summary.csv", newline="") as fh:
        summary = list(csv.DictReader(fh))
    if not summary:
        raise ValueError(f"{d / 'summary.csv'} is empty")
    network, n = summary[0]["network"], int(summary[0]["node_count"])
    strategies = [r["strategy"] for r in summary]
    rows = []
    with open(d / "aggregate.csv", newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append(MappingResult(int(r["mapping_id"]), r["strategy"], int(r["links_used"]),
                                      int(r["fault_free_missing"]),
                                      _opt(r["mean_missing"], float), _opt(r["coverage_pct"], float),
                                      _opt(r["compensated_missing"], int)))
    skipped = []
    sk = d / "skipped.txt"
    if sk.exists():
        for line in sk.read_text().splitlines():
            i, _, e = line.partition(" ")
            skipped.append((int(i), e))
    return aggregate_rows(network, n, strategies, rows, skipped)


def format_summary(agg: AggregateResult) -> str:
    lines = [f"network {agg.network} (N={agg.node_count}), skipped mappings: {len(agg.skipped)}",
             f"{'strategy':<9} {'n':>4} {'links':>18} {'missing %':>16} {'coverage %':>18}"]
    for s, st in agg.strategies.items():
        cov = "-" if st.coverage_pct is None else f"{st.coverage_pct[0]:.2f} ± {st.coverage_pct[1]:.2f}"
        lines.append(f"{s:<9} {st.samples:>4} {st.links[0]:>10.2f} ± {st.links[1]:<5.2f} "
                     f"{st.missing_pct[0]:>8.2f} ± {st.missing_pct[1]:<5.2f} {cov:>18}")
    return "\n".join(lines) + "\n"
