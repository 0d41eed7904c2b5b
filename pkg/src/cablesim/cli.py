"""Command line front end.

Every subcommand reads an input bundle directory, writes its results
(delimited tables, a JSON manifest, and unless suppressed the matching PNG
figures) under one output directory, and touches nothing else. Reruns with
the same inputs and flags produce byte-identical outputs except for the
manifest's duration field.

Exit codes: 0 on success, 1 on input or model errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__, figures, ingest, validation
from .attacks import ASN_CAPACITY, RANDOM, STRATEGIES
from .cascade import FOUR_LAYER, THREE_LAYER, CascadeConfig
from .fixture import (BUNDLE_FILES, RELAY_CORE, RELAY_POLICIES, FixtureSpec,
                      generate_fixture, write_bundle)
from .graph import GraphError
from .ingest import ParseError
from .model import (SCOPE_CLEARNET_ONLY, SCOPE_FULL, SCOPE_MODES, ModelError,
                    RelayTable)
from .montecarlo import (APPORTIONED, DEFAULT_CW_THRESHOLDS,
                         DEFAULT_SENSITIVITY_THRESHOLDS, SAMPLED, CurveConfig,
                         cw_threshold_sweep, default_grid, estimate_pc,
                         four_layer_comparison, pc_evolution,
                         percolation_curve, threshold_sensitivity,
                         tor_bounds_report)
from .tor import SCENARIO_KINDS, TorScenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INTERNAL = 2


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class _Bundle:
    """Lazily parsed input directory; remembers digests of what it read."""

    def __init__(self, root: Path):
        self.root = root
        self.digests: dict[str, str] = {}
        self._cache: dict[str, object] = {}

    def _read(self, key: str) -> str:
        path = self.root / BUNDLE_FILES[key]
        if not path.is_file():
            raise ParseError(f"missing input file: {path}")
        self.digests[BUNDLE_FILES[key]] = _sha256(path)
        return path.read_text()

    def graph(self):
        if "graph" not in self._cache:
            from .graph import build_physical_graph
            cables = ingest.parse_cables(self._read("cables"))
            borders = ingest.parse_borders(self._read("borders"))
            self._cache["graph"] = build_physical_graph(cables, borders)
        return self._cache["graph"]

    def asn_graph(self):
        if "asn" not in self._cache:
            self._cache["asn"] = ingest.parse_asn_relationships(self._read("asn"))
        return self._cache["asn"]

    def snapshots(self):
        if "snapshots" not in self._cache:
            self._cache["snapshots"] = ingest.parse_snapshots(
                self._read("snapshots"))
        return self._cache["snapshots"]

    def relays(self) -> RelayTable:
        if "relays" not in self._cache:
            self._cache["relays"] = ingest.parse_relays(self._read("relays"))
        return self._cache["relays"]

    def events(self):
        if "events" not in self._cache:
            self._cache["events"] = ingest.parse_events(self._read("events"))
        return self._cache["events"]

    def prices(self):
        if "prices" not in self._cache:
            self._cache["prices"] = ingest.parse_prices(self._read("prices"))
        return self._cache["prices"]


def _pick_snapshot(snapshots, wanted: str | None):
    if not snapshots:
        raise ModelError("input bundle holds no snapshots")
    if wanted is None:
        return snapshots[-1]
    for snap in snapshots:
        if snap.timestamp.date().isoformat() == wanted:
            return snap
    available = ", ".join(s.timestamp.date().isoformat() for s in snapshots)
    raise ModelError(f"no snapshot dated {wanted}; available: {available}")


def _grid(step: float) -> tuple[float, ...]:
    if not 0.0 < step <= 1.0:
        raise ModelError("grid step must be in (0, 1]")
    return default_grid(step)


def _scenario(args) -> TorScenario | None:
    name = getattr(args, "scenario", None)
    if name is None:
        return None
    return TorScenario(name)


def _cascade_config(args, layers: str | None = None) -> CascadeConfig:
    scope = getattr(args, "scope", SCOPE_CLEARNET_ONLY)
    if getattr(args, "scenario", None) and scope != SCOPE_FULL:
        logger.info("scenario run: widening node scope to %s", SCOPE_FULL)
        scope = SCOPE_FULL
    return CascadeConfig(
        node_failure_fraction=args.relax_fraction,
        layers=layers or getattr(args, "layers", THREE_LAYER),
        cw_failure_threshold=getattr(args, "cw_threshold", 0.5),
        scope_mode=scope,
        iterate_to_fixpoint=getattr(args, "iterate_to_fixpoint", False),
    )


def _curve_config(args, layers: str | None = None,
                  scenario: TorScenario | None = None) -> CurveConfig:
    return CurveConfig(
        master_seed=args.seed,
        trials=args.trials,
        p_grid=_grid(args.grid_step),
        disconnection_threshold=args.threshold,
        strategy=getattr(args, "strategy", RANDOM),
        cascade=_cascade_config(args, layers),
        scenario=scenario if scenario is not None else _scenario(args),
        scenario_method=getattr(args, "scenario_method", SAMPLED),
        betweenness_submarine_only=getattr(args, "betweenness_submarine_only",
                                           False),
        jobs=args.jobs,
    )


def _config_record(config: CurveConfig, extra: dict | None = None) -> dict:
    record = {
        "seed": config.master_seed,
        "trials": config.trials,
        "grid_points": len(config.p_grid),
        "disconnection_threshold": config.disconnection_threshold,
        "strategy": config.strategy,
        "scenario": config.scenario.kind if config.scenario else None,
        "scenario_method": config.scenario_method,
        "scope": config.cascade.scope_mode,
        "layers": config.cascade.layers,
        "cw_failure_threshold": config.cascade.cw_failure_threshold,
        "relax_fraction": config.cascade.node_failure_fraction,
        "iterate_to_fixpoint": config.cascade.iterate_to_fixpoint,
    }
    if extra:
        record.update(extra)
    return record


class _OutDir:
    def __init__(self, root: str | None):
        if not root:
            raise ModelError(
                "no output directory: pass --out or set CABLESIM_OUT")
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []

    def write_text(self, name: str, text: str) -> Path:
        path = self.root / name
        path.write_text(text)
        self.written.append(name)
        return path

    def path(self, name: str) -> Path:
        self.written.append(name)
        return self.root / name

    def manifest(self, command: str, parameters: dict,
                 input_digests: dict, started: float) -> None:
        payload = {
            "command": command,
            "version": __version__,
            "parameters": parameters,
            "inputs": dict(sorted(input_digests.items())),
            "outputs": sorted(self.written),
            "duration_seconds": round(time.monotonic() - started, 3),
        }
        (self.root / "manifest.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv(rows: list[dict], columns: list[str]) -> str:
    import csv as _csvmod
    import io
    buffer = io.StringIO()
    writer = _csvmod.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(c) is None else row[c] for c in columns])
    return buffer.getvalue()


def _multi_curve_csv(labeled_curves: list[tuple[str, object]],
                     label_column: str) -> str:
    rows = []
    for label, curve in labeled_curves:
        for p, mean, std, stderr in zip(curve.ps, curve.means, curve.stds,
                                        curve.stderrs):
            rows.append({
                label_column: label,
                "p": f"{p:.6f}", "mean": f"{mean:.6f}",
                "std": f"{std:.6f}", "stderr": f"{stderr:.6f}",
            })
    return _csv(rows, [label_column, "p", "mean", "std", "stderr"])


def _fmt_pc(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _prepared_snapshot(bundle: _Bundle, args):
    snap = _pick_snapshot(bundle.snapshots(), args.snapshot_date)
    return ingest.drop_unknown_countries(snap, bundle.graph())


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------

def cmd_percolate(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    snapshot = _prepared_snapshot(bundle, args)
    config = _curve_config(args)
    relays = bundle.relays() if config.cascade.layers == FOUR_LAYER else None
    curve = percolation_curve(config, bundle.graph(), bundle.asn_graph(),
                              snapshot, relays)
    estimate = estimate_pc(curve, statistic=args.statistic)

    out.write_text("curve.csv", curve.to_csv())
    summary = {
        "p_c": estimate.p_c,
        "statistic": estimate.statistic,
        "threshold": estimate.threshold,
        "snapshot": snapshot.label(),
        "scope_nodes": len(snapshot.nodes),
    }
    out.write_text("summary.json",
                   json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if not args.no_figures:
        figures.save_curve_figure(curve, out.path("curve.png"),
                                  threshold=config.disconnection_threshold)
    out.manifest("percolate",
                 _config_record(config, {"snapshot": snapshot.label(),
                                         "statistic": args.statistic}),
                 bundle.digests, started)
    print(f"p_c = {estimate.render()} "
          f"(threshold {config.disconnection_threshold:g}, "
          f"{config.trials} trials)")
    return EXIT_OK


def cmd_attack_compare(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    snapshot = _prepared_snapshot(bundle, args)
    base = _curve_config(args)
    curves = {}
    summary_rows = []
    for strategy in STRATEGIES:
        config = replace(base, strategy=strategy)
        curve = percolation_curve(config, bundle.graph(), bundle.asn_graph(),
                                  snapshot)
        curves[strategy] = curve
        estimate = estimate_pc(curve, statistic=args.statistic)
        routing = strategy == ASN_CAPACITY
        summary_rows.append({
            "strategy": strategy,
            "layer": "routing" if routing else "cable",
            "p_c": _fmt_pc(estimate.p_c),
            "removal_axis": ("fraction_of_routing_capacity" if routing
                             else "fraction_of_cables"),
        })
        print(f"{strategy}: p_c = {estimate.render()}")

    out.write_text("attack_summary.csv", _csv(
        summary_rows, ["strategy", "layer", "p_c", "removal_axis"]))
    out.write_text("attack_curves.csv",
                   _multi_curve_csv(sorted(curves.items()), "strategy"))
    if not args.no_figures:
        figures.save_attack_figure(curves, out.path("attacks.png"),
                                   threshold=base.disconnection_threshold)
    out.manifest("attack-compare",
                 _config_record(base, {"snapshot": snapshot.label(),
                                       "statistic": args.statistic,
                                       "strategy": "all"}),
                 bundle.digests, started)
    return EXIT_OK


def cmd_pc_evolution(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    graph = bundle.graph()
    labeled = [(snap.label(), ingest.drop_unknown_countries(snap, graph))
               for snap in bundle.snapshots()]
    config = _curve_config(args)
    rows = pc_evolution(labeled, graph, bundle.asn_graph(), config)

    csv_rows = [{
        "label": row["label"], "nodes": row["nodes"],
        "countries": row["countries"], "asns": row["asns"],
        "p_c": _fmt_pc(row["p_c"]), "error": row["error"] or "",
    } for row in rows]
    out.write_text("evolution.csv", _csv(
        csv_rows, ["label", "nodes", "countries", "asns", "p_c", "error"]))
    if not args.no_figures:
        figures.save_evolution_figure(rows, out.path("evolution.png"))
    out.manifest("pc-evolution", _config_record(config), bundle.digests,
                 started)
    for row in rows:
        value = "not_reached" if row["p_c"] is None else f"{row['p_c']:.2f}"
        note = f" ({row['error']})" if row["error"] else ""
        print(f"{row['label']}: p_c = {value}{note}")
    return EXIT_OK


def cmd_tor_bounds(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    snapshot = _prepared_snapshot(bundle, args)
    config = _curve_config(args)
    rows = tor_bounds_report(snapshot, bundle.graph(), bundle.asn_graph(),
                             config)

    out.write_text("tor_bounds.csv", _csv(
        [{"scenario": r["scenario"], "p_c": _fmt_pc(r["p_c"])} for r in rows],
        ["scenario", "p_c"]))
    out.write_text("tor_bounds_curves.csv", _multi_curve_csv(
        [(r["scenario"], r["curve"]) for r in rows], "scenario"))
    if not args.no_figures:
        figures.save_tor_bounds_figure(rows, out.path("tor_bounds.png"),
                                       threshold=config.disconnection_threshold)
    out.manifest("tor-bounds",
                 _config_record(config, {"snapshot": snapshot.label(),
                                         "scenario": "all"}),
                 bundle.digests, started)
    for row in rows:
        value = "not_reached" if row["p_c"] is None else f"{row['p_c']:.2f}"
        print(f"{row['scenario']}: p_c = {value}")
    return EXIT_OK


def cmd_four_layer(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    snapshot = _prepared_snapshot(bundle, args)
    config = _curve_config(args)
    result = four_layer_comparison(snapshot, bundle.graph(),
                                   bundle.asn_graph(), bundle.relays(), config)

    summary = {key: result[key] for key in
               ("three_layer_pc", "four_layer_pc", "tor_share", "delta")}
    out.write_text("four_layer.csv", _csv(
        [{"three_layer_pc": _fmt_pc(summary["three_layer_pc"]),
          "four_layer_pc": _fmt_pc(summary["four_layer_pc"]),
          "tor_share": f"{summary['tor_share']:.4f}",
          "delta": "" if summary["delta"] is None else f"{summary['delta']:.2f}"}],
        ["three_layer_pc", "four_layer_pc", "tor_share", "delta"]))
    out.write_text("four_layer_curves.csv", _multi_curve_csv(
        [("three_layer", result["three_curve"]),
         ("four_layer", result["four_curve"])], "layers"))
    if not args.no_figures:
        figures.save_four_layer_figure(result, out.path("four_layer.png"),
                                       threshold=config.disconnection_threshold)
    out.manifest("four-layer",
                 _config_record(config, {"snapshot": snapshot.label()}),
                 bundle.digests, started)
    three = summary["three_layer_pc"]
    four = summary["four_layer_pc"]
    print(f"three layers: p_c = {'not_reached' if three is None else f'{three:.2f}'}")
    print(f"four layers:  p_c = {'not_reached' if four is None else f'{four:.2f}'}")
    return EXIT_OK


def cmd_cw_sweep(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    snapshot = _prepared_snapshot(bundle, args)
    config = _curve_config(args, layers=FOUR_LAYER)
    thresholds = tuple(float(part) for part in args.cw_thresholds.split(","))
    rows = cw_threshold_sweep(snapshot, bundle.graph(), bundle.asn_graph(),
                              bundle.relays(), config, thresholds)

    out.write_text("cw_sweep.csv", _csv(
        [{"cw_threshold": f"{r['cw_threshold']:.2f}",
          "p_c": _fmt_pc(r["p_c"])} for r in rows],
        ["cw_threshold", "p_c"]))
    if not args.no_figures:
        figures.save_cw_sweep_figure(rows, out.path("cw_sweep.png"))
    out.manifest("cw-sweep",
                 _config_record(config, {"snapshot": snapshot.label(),
                                         "cw_thresholds": list(thresholds)}),
                 bundle.digests, started)
    for row in rows:
        value = "not_reached" if row["p_c"] is None else f"{row['p_c']:.2f}"
        print(f"cw threshold {row['cw_threshold']:.2f}: p_c = {value}")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    snapshot = _prepared_snapshot(bundle, args)
    config = _curve_config(args)
    relays = bundle.relays() if config.cascade.layers == FOUR_LAYER else None
    curve = percolation_curve(config, bundle.graph(), bundle.asn_graph(),
                              snapshot, relays)
    thresholds = tuple(float(part) for part in args.thresholds.split(","))
    pairs = threshold_sensitivity(curve, thresholds, args.statistic)

    out.write_text("sensitivity.csv", _csv(
        [{"threshold": f"{t:.2f}", "p_c": _fmt_pc(est.p_c)}
         for t, est in pairs],
        ["threshold", "p_c"]))
    out.write_text("curve.csv", curve.to_csv())
    if not args.no_figures:
        figures.save_sensitivity_figure(pairs, out.path("sensitivity.png"))
    out.manifest("sensitivity",
                 _config_record(config, {"snapshot": snapshot.label(),
                                         "thresholds": list(thresholds),
                                         "statistic": args.statistic}),
                 bundle.digests, started)
    for t, est in pairs:
        print(f"threshold {t:.2f}: p_c = {est.render()}")
    return EXIT_OK


def cmd_validate_events(args) -> int:
    started = time.monotonic()
    bundle = _Bundle(Path(args.inputs))
    out = _OutDir(args.out)
    graph = bundle.graph()
    events = bundle.events()
    matches = validation.match_events(events, bundle.snapshots(),
                                      args.window_days)
    payload = {
        "events_total": len(events),
        "matched": len(matches.matches),
        "unmatched": len(matches.unmatched),
        "window_days": matches.window_days,
    }
    impacts = None
    try:
        impacts = validation.impact_stats(matches, args.impact_threshold)
    except ModelError as exc:
        payload["impact"] = {"error": str(exc)}

    unknown_cables: set[str] = set()
    for event in events:
        _, unknown = validation.edges_for_event(graph, event)
        unknown_cables.update(unknown)
    payload["unknown_cables"] = sorted(unknown_cables)

    if impacts is not None:
        payload["impact"] = {
            "small_share": impacts.small_share,
            "mean": impacts.mean_impact,
            "median": impacts.median_impact,
            "min": impacts.min_impact,
            "max": impacts.max_impact,
            "threshold": impacts.threshold,
        }
        out.write_text("event_impacts.csv", impacts.to_csv())
    else:
        out.write_text("event_impacts.csv",
                       "event_id,date,before_count,after_count,"
                       "global_impact,regional_impact\n")

    if impacts is None:
        payload["price_correlation"] = {"error": "no measurable impacts"}
    else:
        try:
            correlation = validation.price_correlation(impacts, bundle.prices(),
                                                       args.price_horizon)
            payload["price_correlation"] = {
                "n": correlation.n,
                "r": correlation.r,
                "t_stat": correlation.t_stat,
                "p_value": correlation.p_value,
                "ci_low": correlation.interval.low,
                "ci_high": correlation.interval.high,
            }
        except ModelError as exc:
            payload["price_correlation"] = {"error": str(exc)}

    concentration = validation.concentration_metrics(
        bundle.snapshots()[-1], include_tor=not args.exclude_tor)
    payload["concentration"] = {
        "hhi": concentration.hhi,
        "buckets": concentration.buckets,
        "top5_share": concentration.top5_share,
        "top": [[name, share] for name, share in concentration.top()],
    }
    out.write_text("validation.json",
                   json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if not args.no_figures and impacts is not None and impacts.impacts:
        figures.save_impact_figure(impacts, out.path("event_impacts.png"))
    out.manifest("validate-events",
                 {"window_days": args.window_days,
                  "impact_threshold": args.impact_threshold,
                  "price_horizon": args.price_horizon,
                  "exclude_tor": args.exclude_tor},
                 bundle.digests, started)
    if impacts is None:
        print(f"matched {payload['matched']}/{payload['events_total']} events; "
              "no measurable impacts")
    else:
        print(f"matched {payload['matched']}/{payload['events_total']} events; "
              f"share with |impact| < {impacts.threshold:g}: "
              f"{impacts.small_share:.3f}")
    return EXIT_OK


def cmd_gen_fixture(args) -> int:
    started = time.monotonic()
    out = _OutDir(args.out)
    if args.profile == "mini":
        spec = FixtureSpec.mini(seed=args.seed, relay_policy=args.relay_policy)
    else:
        spec = FixtureSpec(seed=args.seed, relay_policy=args.relay_policy)
    bundle = generate_fixture(spec)
    paths = write_bundle(bundle, out.root)
    for path in paths.values():
        out.written.append(Path(path).name)
    out.manifest("gen-fixture",
                 {"profile": args.profile, "seed": args.seed,
                  "relay_policy": args.relay_policy},
                 {}, started)
    print(f"wrote {len(paths)} files to {out.root}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------

def _add_io_flags(parser, needs_inputs: bool = True):
    if needs_inputs:
        parser.add_argument("--inputs", required=True,
                            help="directory holding the input bundle")
    parser.add_argument("--out", default=os.environ.get("CABLESIM_OUT"),
                        help="output directory (default: $CABLESIM_OUT)")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")


def _add_sim_flags(parser, with_strategy: bool = True,
                   with_scenario: bool = True):
    parser.add_argument("--seed", type=int, required=True,
                        help="master seed for the trial streams")
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--grid-step", type=float, default=0.02)
    parser.add_argument("--threshold", type=float, default=0.10,
                        help="disconnection fraction that defines p_c")
    parser.add_argument("--statistic", choices=("mean", "median"),
                        default="mean")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--snapshot-date",
                        help="census date to simulate (default: latest)")
    parser.add_argument("--scope", choices=SCOPE_MODES,
                        default=SCOPE_CLEARNET_ONLY)
    parser.add_argument("--relax-fraction", type=float, default=1.0,
                        dest="relax_fraction",
                        help="probability that a cut-off node actually fails")
    parser.add_argument("--iterate-to-fixpoint", action="store_true")
    if with_strategy:
        parser.add_argument("--strategy", choices=STRATEGIES, default=RANDOM)
        parser.add_argument("--betweenness-submarine-only", action="store_true")
    if with_scenario:
        parser.add_argument("--scenario", choices=SCENARIO_KINDS)
        parser.add_argument("--scenario-method",
                            choices=(SAMPLED, APPORTIONED), default=SAMPLED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cablesim",
        description="Cascading-failure percolation over cable, country, "
                    "routing, and node layers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--verbose", action="store_true",
                        help="log progress details to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("percolate", help="disconnection curve and p_c")
    _add_io_flags(p)
    _add_sim_flags(p)
    p.add_argument("--layers", choices=(THREE_LAYER, FOUR_LAYER),
                   default=THREE_LAYER)
    p.add_argument("--cw-threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_percolate)

    p = sub.add_parser("attack-compare", help="p_c under every strategy")
    _add_io_flags(p)
    _add_sim_flags(p, with_strategy=False, with_scenario=False)
    p.set_defaults(func=cmd_attack_compare)

    p = sub.add_parser("pc-evolution", help="p_c per census snapshot")
    _add_io_flags(p)
    _add_sim_flags(p, with_scenario=False)
    p.set_defaults(func=cmd_pc_evolution)

    p = sub.add_parser("tor-bounds", help="p_c per placement scenario")
    _add_io_flags(p)
    _add_sim_flags(p, with_scenario=False)
    p.set_defaults(func=cmd_tor_bounds)

    p = sub.add_parser("four-layer", help="relay-backed versus clearnet-only")
    _add_io_flags(p)
    _add_sim_flags(p, with_scenario=False)
    p.add_argument("--cw-threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_four_layer)

    p = sub.add_parser("cw-sweep", help="p_c across relay thresholds")
    _add_io_flags(p)
    _add_sim_flags(p, with_scenario=False)
    p.add_argument("--cw-thresholds",
                   default=",".join(f"{t:g}" for t in DEFAULT_CW_THRESHOLDS))
    p.set_defaults(func=cmd_cw_sweep)

    p = sub.add_parser("sensitivity", help="p_c across disconnection thresholds")
    _add_io_flags(p)
    _add_sim_flags(p)
    p.add_argument("--layers", choices=(THREE_LAYER, FOUR_LAYER),
                   default=THREE_LAYER)
    p.add_argument("--cw-threshold", type=float, default=0.5)
    p.add_argument("--thresholds",
                   default=",".join(f"{t:g}"
                                    for t in DEFAULT_SENSITIVITY_THRESHOLDS))
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("validate-events", help="score history against censuses")
    _add_io_flags(p)
    p.add_argument("--window-days", type=int,
                   default=validation.DEFAULT_WINDOW_DAYS)
    p.add_argument("--impact-threshold", type=float,
                   default=validation.SMALL_IMPACT)
    p.add_argument("--price-horizon", type=int, default=1,
                   help="days between the event-side and return-side quotes")
    p.add_argument("--exclude-tor", action="store_true",
                   help="leave the overlay bucket out of concentration")
    p.set_defaults(func=cmd_validate_events)

    p = sub.add_parser("gen-fixture", help="write a synthetic input bundle")
    _add_io_flags(p, needs_inputs=False)
    p.add_argument("--profile", choices=("full", "core-periphery-225", "mini"),
                   default="full")
    p.add_argument("--seed", type=int, default=FixtureSpec.seed)
    p.add_argument("--relay-policy", choices=RELAY_POLICIES,
                   default=RELAY_CORE)
    p.set_defaults(func=cmd_gen_fixture)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse prints its own usage text; fold its exit codes into ours
        # (0 for --help/--version, 1 for any usage problem)
        return EXIT_OK if not exc.code else EXIT_ERROR
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, GraphError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
