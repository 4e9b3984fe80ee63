"""Monte-Carlo sweeps over scenario parameters, CSV reporting, and the CLI.

Run-to-run receipt samples depend only on (seed, run index), never on the
scheme or sweep point, so comparisons across schemes are automatically
matched-sample: run k of every scheme starts from identical holdings.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .clustering import InfeasibleClusterCount, cluster_network
from .core import RunStreams, ScenarioConfig, Scheme
from .mac import TimingConfig
from .protocol import trace_line
from .simulator import run_scenario, sample_initial_receipts

CSV_COLUMNS = (
    "param",
    "scheme",
    "mean_exchanges",
    "sd_exchanges",
    "mean_delay_us",
    "sd_delay_us",
    "full_set_rate",
    "completion_rate",
    "runs",
    "seed",
)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a base scenario, the parameter swept, and the values to visit."""

    base: ScenarioConfig
    parameter: str  # "num_clusters" | "delivery_rate" | "scheme"
    values: tuple
    runs: int = 500

    def __post_init__(self) -> None:
        if self.parameter not in ("num_clusters", "delivery_rate", "scheme"):
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.runs < 1:
            raise ValueError("runs must be positive")


@dataclass(frozen=True)
class AggregateRow:
    """One aggregated sweep point; None marks a column that does not apply."""

    param: str
    scheme: str
    mean_exchanges: float | None
    sd_exchanges: float | None
    mean_delay_us: float | None
    sd_delay_us: float | None
    full_set_rate: float | None
    completion_rate: float | None
    runs: int
    seed: int

    def se_exchanges(self) -> float:
        assert self.sd_exchanges is not None
        return self.sd_exchanges / math.sqrt(self.runs)

    def se_delay(self) -> float:
        assert self.sd_delay_us is not None
        return self.sd_delay_us / math.sqrt(self.runs)

    def as_csv_row(self) -> list[str]:
        def cell(value: float | int | str | None) -> str:
            if value is None or (isinstance(value, float) and math.isnan(value)):
                return ""
            return str(value)

        return [
            self.param,
            self.scheme,
            cell(self.mean_exchanges),
            cell(self.sd_exchanges),
            cell(self.mean_delay_us),
            cell(self.sd_delay_us),
            cell(self.full_set_rate),
            cell(self.completion_rate),
            str(self.runs),
            str(self.seed),
        ]


def _sd(values: np.ndarray) -> float | None:
    if values.size < 2:
        return None
    return float(np.std(values, ddof=1))


def _param_tag(config: ScenarioConfig) -> str:
    # Semicolon, not comma, so CSV cells never need quoting.
    return f"rho={config.delivery_rate:g};N={config.num_clusters}"


def full_set_rate_samples(config: ScenarioConfig, runs: int) -> np.ndarray:
    """Per-run fraction of clusters whose combined holdings are complete.

    Runs the clustering stage only; no exchange is simulated.
    """
    fractions = np.empty(runs)
    for k in range(runs):
        streams = RunStreams(config.seed, k)
        receipts = sample_initial_receipts(
            config.num_uavs, config.num_packets, config.delivery_rate,
            streams.stream("bs-delivery"),
        )
        assignment = cluster_network(receipts, config.num_clusters, streams.stream("tie-break"))
        fractions[k] = assignment.full_cluster_count() / assignment.num_clusters
    return fractions


def scheme_metric_samples(
    config: ScenarioConfig, runs: int, timing: TimingConfig | None = None
) -> dict[str, np.ndarray]:
    """Per-run reported exchanges, delay, and completion for one scheme."""
    exchanges = np.empty(runs)
    delays = np.empty(runs)
    completed = np.empty(runs, dtype=bool)
    full_fraction = np.empty(runs)
    for k in range(runs):
        result = run_scenario(config, k, timing=timing)
        exchanges[k] = result.reported_exchanges
        delays[k] = result.reported_delay_us
        completed[k] = result.all_completed
        full_fraction[k] = result.full_cluster_fraction
    return {
        "exchanges": exchanges,
        "delay_us": delays,
        "completed": completed,
        "full_fraction": full_fraction,
    }


def sweep_full_set_rate(spec: SweepSpec) -> list[AggregateRow]:
    """Full-set rate for each swept cluster count (clustering only, no exchange).

    Infeasible cluster counts produce a metric-less warning row instead of
    aborting the sweep.
    """
    if spec.parameter != "num_clusters":
        raise ValueError("full-set-rate sweeps vary num_clusters")
    rows = []
    for value in spec.values:
        tag = f"rho={spec.base.delivery_rate:g};N={int(value)}"
        try:
            config = replace(spec.base, num_clusters=int(value))
            fractions = full_set_rate_samples(config, spec.runs)
        except (InfeasibleClusterCount, ValueError) as exc:
            print(f"warning: skipping {tag}: {exc}", file=sys.stderr)
            rows.append(
                AggregateRow(tag, spec.base.scheme.value, None, None, None, None,
                             None, None, 0, spec.base.seed)
            )
            continue
        rows.append(
            AggregateRow(
                param=tag,
                scheme=config.scheme.value,
                mean_exchanges=None,
                sd_exchanges=None,
                mean_delay_us=None,
                sd_delay_us=None,
                full_set_rate=float(fractions.mean()),
                completion_rate=float((fractions == 1.0).mean()),
                runs=spec.runs,
                seed=config.seed,
            )
        )
    return rows


def compare_schemes(spec: SweepSpec, timing: TimingConfig | None = None) -> list[AggregateRow]:
    """Mean exchanges and delay per scheme on matched receipt samples.

    Runs whose cluster unions lack packets cannot finish completely; they
    count toward the completion and full-set rates but are left out of the
    delay means, since their delay is dominated by the give-up timeout.
    """
    if spec.parameter != "scheme":
        raise ValueError("compare sweeps vary the scheme")
    rows = []
    for value in spec.values:
        scheme = value if isinstance(value, Scheme) else Scheme(value)
        config = replace(spec.base, scheme=scheme)
        samples = scheme_metric_samples(config, spec.runs, timing=timing)
        finished = samples["completed"]
        delays = samples["delay_us"][finished]
        rows.append(
            AggregateRow(
                param=_param_tag(config),
                scheme=scheme.value,
                mean_exchanges=float(samples["exchanges"].mean()),
                sd_exchanges=_sd(samples["exchanges"]),
                mean_delay_us=float(delays.mean()) if delays.size else None,
                sd_delay_us=_sd(delays),
                full_set_rate=float(samples["full_fraction"].mean()),
                completion_rate=float(finished.mean()),
                runs=spec.runs,
                seed=config.seed,
            )
        )
    return rows


def rows_to_csv(rows: Sequence[AggregateRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv_row())
    return buffer.getvalue()


# -- command line -----------------------------------------------------------

FIG1_HOLDINGS = ((1, 1, 0, 1, 0, 0), (0, 1, 1, 1, 1, 1), (0, 0, 1, 0, 1, 0), (1, 1, 1, 1, 0, 1))


def _fig1_trace(timing: TimingConfig, seed: int) -> tuple[list, object]:
    """Run the built-in four-UAV walkthrough as a single cluster and trace it."""
    from .core import IndicatorVector, stream
    from .simulator import run_cluster_exchange

    holdings = {u: IndicatorVector(bits) for u, bits in enumerate(FIG1_HOLDINGS)}
    trace: list = []
    result = run_cluster_exchange(
        members=range(len(FIG1_HOLDINGS)),
        holdings=holdings,
        timing=timing,
        scheme=Scheme.MECHANISM_ONLY,
        rng=stream(seed, 0, "backoff/0"),
        trace=trace,
    )
    return trace, result


class _Parser(argparse.ArgumentParser):
    # Usage problems exit 1; infeasible scenarios exit 2.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_cluster_values(text: str) -> list[int]:
    """Accept '3', '1,2,5', or '1..10'."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",")]


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


_SCENARIO_KEYS = ("num_uavs", "num_packets", "delivery_rate", "num_clusters",
                  "scheme", "seed", "runs")
_TIMING_KEYS = ("difs_us", "cw_total_us", "preamble_us", "payload_us_per_packet")


def _gather_settings(args: argparse.Namespace) -> tuple[dict, TimingConfig]:
    """Merge defaults, config file, and explicit flags (flags win)."""
    settings: dict = {"seed": 0, "runs": 500, "scheme": "proposed"}
    if getattr(args, "config", None):
        file_settings = _load_config_file(args.config)
        unknown = set(file_settings) - set(_SCENARIO_KEYS) - set(_TIMING_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_settings)
    flag_map = {
        "num_uavs": "uavs",
        "num_packets": "packets",
        "delivery_rate": "rho",
        "seed": "seed",
        "runs": "runs",
    }
    for key, flag in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value
    timing_kwargs = {}
    for key in _TIMING_KEYS:
        if key in settings:
            timing_kwargs[key] = int(settings.pop(key))
        override = getattr(args, key, None)
        if override is not None:
            timing_kwargs[key] = override
    return settings, TimingConfig(**timing_kwargs)


def _scenario_from(settings: dict, num_clusters: int) -> ScenarioConfig:
    missing = [k for k in ("num_uavs", "num_packets", "delivery_rate") if k not in settings]
    if missing:
        raise ValueError(f"missing scenario settings: {missing} (flags or config file)")
    return ScenarioConfig(
        num_uavs=int(settings["num_uavs"]),
        num_packets=int(settings["num_packets"]),
        delivery_rate=float(settings["delivery_rate"]),
        num_clusters=num_clusters,
        scheme=Scheme(settings.get("scheme", "proposed")),
        seed=int(settings.get("seed", 0)),
        runs=int(settings.get("runs", 500)),
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--uavs", type=int, help="fleet size")
    parser.add_argument("--packets", type=int, help="number of common packets")
    parser.add_argument("--rho", type=float, help="per-packet delivery probability")
    parser.add_argument("--runs", type=int, help="Monte-Carlo runs per point (default 500)")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--config", help="JSON file with scenario and timing settings")
    parser.add_argument("--out", help="write CSV here instead of stdout")
    parser.add_argument("--difs-us", dest="difs_us", type=int, help="DIFS override")
    parser.add_argument("--cw-total-us", dest="cw_total_us", type=int,
                        help="contention window override")
    parser.add_argument("--preamble-us", dest="preamble_us", type=int,
                        help="frame preamble override")
    parser.add_argument("--payload-us", dest="payload_us_per_packet", type=int,
                        help="per-packet payload time override")


def _build_parser() -> _Parser:
    parser = _Parser(prog="uavex", description="UAV cluster data-exchange experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("full-set-rate", parents=[], help="cluster-count sweep")
    _add_common_flags(p_rate)
    p_rate.add_argument("--clusters", required=True,
                        help="cluster counts: '3', '1,3,5', or '1..10'")
    p_rate.add_argument("--rhos", help="optional comma list of delivery rates to cross")

    p_cmp = sub.add_parser("compare", help="scheme comparison at one scenario")
    _add_common_flags(p_cmp)
    p_cmp.add_argument("--clusters", type=int, required=True,
                       help="cluster count for the proposed scheme")
    p_cmp.add_argument("--schemes", default="proposed,mechanism_only,baseline_csma",
                       help="comma list of schemes to compare")

    p_trace = sub.add_parser("trace", help="single run with the full event trace")
    _add_common_flags(p_trace)
    p_trace.add_argument("--clusters", type=int, help="cluster count")
    p_trace.add_argument("--scheme", help="scheme for the traced run")
    p_trace.add_argument("--run-index", type=int, default=0, help="which run to replay")
    p_trace.add_argument("--fig1", action="store_true",
                         help="trace the built-in four-UAV walkthrough")

    p_self = sub.add_parser("selftest", help="run the invariant suite")
    p_self.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_full_set_rate(args: argparse.Namespace) -> int:
    settings, _ = _gather_settings(args)
    cluster_values = _parse_cluster_values(args.clusters)
    rhos = ([float(r) for r in args.rhos.split(",")] if args.rhos
            else [float(settings["delivery_rate"])] if "delivery_rate" in settings else None)
    if rhos is None:
        raise ValueError("delivery rate required (--rho, --rhos, or config file)")
    rows = []
    for rho in rhos:
        settings_rho = dict(settings, delivery_rate=rho)
        base = _scenario_from(settings_rho, num_clusters=max(cluster_values))
        spec = SweepSpec(base, "num_clusters", tuple(cluster_values), runs=base.runs)
        rows.extend(sweep_full_set_rate(spec))
    if all(row.runs == 0 for row in rows):
        print("error: every requested cluster count was infeasible", file=sys.stderr)
        return 2
    _emit(rows_to_csv(rows), args.out)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    settings, timing = _gather_settings(args)
    base = _scenario_from(settings, num_clusters=args.clusters)
    schemes = tuple(Scheme(s) for s in args.schemes.split(","))
    spec = SweepSpec(base, "scheme", schemes, runs=base.runs)
    rows = compare_schemes(spec, timing=timing)
    _emit(rows_to_csv(rows), args.out)
    return 0


def _cmd_trace(args: argparse.Namespace) -> int:
    settings, timing = _gather_settings(args)
    seed = int(settings.get("seed", 0))
    if args.fig1:
        trace, result = _fig1_trace(timing, seed)
        results = [result]
        exchanges, delay = result.exchange_count, result.delay_us
        completed = result.completed
    else:
        if args.clusters is None:
            raise ValueError("--clusters is required without --fig1")
        if args.scheme:
            settings["scheme"] = args.scheme
        config = _scenario_from(settings, num_clusters=args.clusters)
        trace = []
        run = run_scenario(config, args.run_index, timing=timing, trace=trace)
        results = list(run.cluster_results)
        exchanges, delay = run.reported_exchanges, run.reported_delay_us
        completed = run.all_completed
    lines = [trace_line(rec) for rec in trace]
    summary = (
        f"# exchanges={exchanges} delay_us={delay} completed={completed} "
        f"clusters={len(results)}\n"
    )
    _emit("\n".join(lines) + ("\n" if lines else "") + summary, args.out)
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    from . import selftest

    failures = selftest.run_all(seed=args.seed)
    return 0 if failures == 0 else 1


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    commands = {
        "full-set-rate": _cmd_full_set_rate,
        "compare": _cmd_compare,
        "trace": _cmd_trace,
        "selftest": _cmd_selftest,
    }
    try:
        return commands[args.command](args)
    except InfeasibleClusterCount as exc:
        print(f"error: infeasible scenario: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(cli_main())
