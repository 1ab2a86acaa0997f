"""Trial orchestration, report CSVs, summary statistics, and charts.

One experiment sweeps every configured cut percentage over ``trials``
independent populations. Within a trial the same demands, valuation factors
and reserve prices are reused for every cut percentage, so cross-cut
comparisons are paired. Per-trial RNG streams derive from the master seed by
trial index, which makes each trial reproducible on its own and the whole
run byte-deterministic.

Artifacts written to the output directory:

* consumer_report.csv - one row per consumer per (cut, trial)
* system_report.csv   - one row per (cut, trial), with a status column
* summary.csv         - per-scenario mean and 95% CI half-width per metric
* charts/*.png        - line charts rendered from summary.csv
* trace_c*_t*.csv     - per-clearing audit rows, only with trace enabled

An infeasible cut is recorded as a data point (status ``infeasible_cut``,
baseline figures), never an abort. Confidence intervals use Student's t with
trials - 1 degrees of freedom.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from scipy.stats import t as student_t

from .agents import AgentState
from .auction import SessionResult, initialize_allocations, run_session
from .loads import aggregate
from .metrics import ConsumerReport, SystemReport, consumer_report, system_report
from .parcut import par_cut
from .pricing import reserve_prices
from .scenario import ScenarioConfig, generate_demands, sample_alphas

STATUS_INFEASIBLE = "infeasible_cut"

CONSUMER_COLUMNS = [
    "cut_percentage",
    "trial",
    "consumer_id",
    "alpha",
    "total_demand",
    "total_obtained",
    "shift_fraction",
    "auction_cost",
    "baseline_cost",
    "saving_fraction",
]

SYSTEM_COLUMNS = [
    "cut_percentage",
    "trial",
    "par_before",
    "par_after",
    "system_cost_before",
    "system_cost_after",
    "producer_revenue_auction",
    "producer_revenue_baseline",
    "satisfied",
    "status",
]

TRACE_COLUMNS = [
    "round",
    "slot",
    "agent_id",
    "bid_qty_kwh",
    "bid_price",
    "won_qty_kwh",
    "clearing_price",
]


@dataclass(frozen=True)
class ScenarioRun:
    """One (cut percentage, trial) cell of the sweep."""

    cut_percentage: float
    trial: int
    status: str
    system: SystemReport
    consumers: tuple[ConsumerReport, ...]
    session: SessionResult | None


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    metric: str
    mean: float
    ci95_halfwidth: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ScenarioConfig
    runs: tuple[ScenarioRun, ...]
    summary: tuple[SummaryRow, ...]

    def runs_for(self, cut_percentage: float) -> list[ScenarioRun]:
        return [r for r in self.runs if r.cut_percentage == cut_percentage]


def run_trial(config: ScenarioConfig, trial: int, record_trace: bool = False) -> list[ScenarioRun]:
    """All cut percentages for one trial population."""
    rng = config.trial_rng(trial)
    demands = generate_demands(config, rng)
    alphas = sample_alphas(config, rng)
    model = config.cost_model()
    original = aggregate(demands, config.slot_count)
    reserves = reserve_prices(model, original)

    runs = []
    for cut in config.cut_percentages:
        result = par_cut(original, cut)
        if not result.feasible:
            consumers = tuple(
                ConsumerReport(
                    consumer_id=d.consumer_id,
                    alpha=alphas[i],
                    total_demand=sum(d.demand.values),
                    total_obtained=sum(d.demand.values),
                    shift_fraction=0.0,
                    auction_cost=sum(d.demand[s] * reserves[s] for s in range(len(d.demand))),
                    baseline_cost=sum(d.demand[s] * reserves[s] for s in range(len(d.demand))),
                    saving_fraction=0.0,
                )
                for i, d in enumerate(demands)
            )
            runs.append(
                ScenarioRun(
                    cut_percentage=cut,
                    trial=trial,
                    status=STATUS_INFEASIBLE,
                    system=system_report(model, cut, original, result, None, reserves),
                    consumers=consumers,
                    session=None,
                )
            )
            continue

        ledger, remaining = initialize_allocations(
            demands, result.load, reserves, config.guarantee_kwh
        )
        agents = [
            AgentState(
                d.consumer_id,
                d.demand,
                alphas[i],
                initial_obtained=ledger.energy_vector(d.consumer_id),
            )
            for i, d in enumerate(demands)
        ]
        session = run_session(
            agents,
            remaining,
            reserves,
            ledger,
            round_cap=config.round_cap,
            record_trace=record_trace,
        )
        consumers = tuple(consumer_report(a, ledger, reserves) for a in agents)
        runs.append(
            ScenarioRun(
                cut_percentage=cut,
                trial=trial,
                status=session.stop_reason,
                system=system_report(model, cut, original, result, session, reserves),
                consumers=consumers,
                session=session,
            )
        )
    return runs


def run_experiment(
    config: ScenarioConfig,
    out_dir: str | Path | None = None,
    record_trace: bool = False,
    charts: bool = True,
) -> ExperimentResult:
    """Run the full sweep; write CSV artifacts when out_dir is given."""
    runs: list[ScenarioRun] = []
    for trial in range(config.trials):
        runs.extend(run_trial(config, trial, record_trace=record_trace))
    summary = summarize(config, runs)
    result = ExperimentResult(config=config, runs=tuple(runs), summary=tuple(summary))
    if out_dir is not None:
        write_artifacts(result, Path(out_dir), charts=charts)
    return result


# ---------------------------------------------------------------------------
# Summary statistics
# ---------------------------------------------------------------------------


def mean_ci(samples: list[float]) -> tuple[float, float]:
    """Sample mean and 95% CI half-width (Student t, n-1 dof)."""
    n = len(samples)
    if n == 0:
        return float("nan"), float("nan")
    mean = sum(samples) / n
    if n == 1:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in samples) / (n - 1)
    half = float(student_t.ppf(0.975, n - 1)) * math.sqrt(var / n)
    return mean, half


def _alpha_groups(config: ScenarioConfig) -> list[float]:
    return sorted(set(config.distribution().values))


def summarize(config: ScenarioConfig, runs: list[ScenarioRun]) -> list[SummaryRow]:
    rows = []
    system_metrics = [
        "par_before",
        "par_after",
        "system_cost_before",
        "system_cost_after",
        "producer_revenue_auction",
        "producer_revenue_baseline",
    ]
    groups = _alpha_groups(config)
    for cut in config.cut_percentages:
        scenario = f"c={cut:g}"
        cell = [r for r in runs if r.cut_percentage == cut]
        for metric in system_metrics:
            mean, half = mean_ci([getattr(r.system, metric) for r in cell])
            rows.append(SummaryRow(scenario, metric, mean, half))
        for group in groups:
            for metric in ("shift_fraction", "auction_cost", "saving_fraction"):
                per_trial = []
                for r in cell:
                    members = [c for c in r.consumers if c.alpha == group]
                    if members:
                        per_trial.append(
                            sum(getattr(c, metric) for c in members) / len(members)
                        )
                mean, half = mean_ci(per_trial)
                rows.append(SummaryRow(scenario, f"{metric}[alpha={group:.1f}]", mean, half))
    return rows


# ---------------------------------------------------------------------------
# CSV artifacts
# ---------------------------------------------------------------------------


def _fmt_money(x: float) -> str:
    return f"{x:.6f}"


def _fmt_value(x: float) -> str:
    return repr(float(x))


def write_artifacts(result: ExperimentResult, out_dir: Path, charts: bool = True) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_consumer_report(result, out_dir / "consumer_report.csv")
    _write_system_report(result, out_dir / "system_report.csv")
    _write_summary(result, out_dir / "summary.csv")
    for run in result.runs:
        if run.session is not None and run.session.trace:
            _write_trace(run, out_dir)
    if charts:
        render_charts(out_dir / "summary.csv", out_dir / "charts")


def _write_consumer_report(result: ExperimentResult, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CONSUMER_COLUMNS)
        for run in result.runs:
            for c in run.consumers:
                writer.writerow(
                    [
                        f"{run.cut_percentage:g}",
                        run.trial,
                        c.consumer_id,
                        f"{c.alpha:.1f}",
                        _fmt_value(c.total_demand),
                        _fmt_value(c.total_obtained),
                        _fmt_value(c.shift_fraction),
                        _fmt_money(c.auction_cost),
                        _fmt_money(c.baseline_cost),
                        _fmt_value(c.saving_fraction),
                    ]
                )


def _write_system_report(result: ExperimentResult, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SYSTEM_COLUMNS)
        for run in result.runs:
            s = run.system
            writer.writerow(
                [
                    f"{run.cut_percentage:g}",
                    run.trial,
                    _fmt_value(s.par_before),
                    _fmt_value(s.par_after),
                    _fmt_money(s.system_cost_before),
                    _fmt_money(s.system_cost_after),
                    _fmt_money(s.producer_revenue_auction),
                    _fmt_money(s.producer_revenue_baseline),
                    str(s.satisfied).lower(),
                    run.status,
                ]
            )


def _write_summary(result: ExperimentResult, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "metric", "mean", "ci95_halfwidth"])
        for row in result.summary:
            writer.writerow([row.scenario, row.metric, _fmt_value(row.mean), _fmt_value(row.ci95_halfwidth)])


def _write_trace(run: ScenarioRun, out_dir: Path) -> None:
    name = f"trace_c{round(run.cut_percentage * 100):02d}_t{run.trial}.csv"
    with open(out_dir / name, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in run.session.trace:
            writer.writerow(
                [
                    row["round"],
                    row["slot"],
                    row["agent_id"],
                    _fmt_value(row["bid_qty_kwh"]),
                    _fmt_money(row["bid_price"]),
                    _fmt_value(row["won_qty_kwh"]),
                    _fmt_money(row["clearing_price"]),
                ]
            )


# ---------------------------------------------------------------------------
# Charts (rendered from summary.csv, not from in-memory state)
# ---------------------------------------------------------------------------


def read_summary_csv(path: Path) -> list[SummaryRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                SummaryRow(
                    rec["scenario"],
                    rec["metric"],
                    float(rec["mean"]),
                    float(rec["ci95_halfwidth"]),
                )
            )
    return rows


def render_charts(summary_csv: Path, chart_dir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = read_summary_csv(summary_csv)
    chart_dir.mkdir(parents=True, exist_ok=True)
    cuts = sorted({float(r.scenario.split("=")[1]) for r in rows})

    def series(metric: str) -> tuple[list[float], list[float], list[float]]:
        xs, means, halves = [], [], []
        for cut in cuts:
            for r in rows:
                if r.scenario == f"c={cut:g}" and r.metric == metric:
                    xs.append(cut)
                    means.append(r.mean)
                    halves.append(r.ci95_halfwidth)
        return xs, means, halves

    written = []

    def save(fig, name: str) -> None:
        path = chart_dir / name
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots()
    for metric, label in (
        ("system_cost_after", "with cut"),
        ("system_cost_before", "baseline"),
    ):
        xs, means, halves = series(metric)
        ax.errorbar(xs, means, yerr=halves, marker="o", label=label)
    ax.set_xlabel("cut percentage")
    ax.set_ylabel("system cost")
    ax.set_title("System cost vs cut percentage")
    ax.legend()
    save(fig, "system_cost_vs_cut.png")

    alpha_metrics = sorted(
        {r.metric for r in rows if r.metric.startswith("shift_fraction[alpha=")}
    )
    alphas = [m.split("=")[1].rstrip("]") for m in alpha_metrics]

    for prefix, ylabel, fname in (
        ("shift_fraction", "mean shift fraction", "shift_by_alpha.png"),
        ("auction_cost", "mean cost paid", "cost_by_alpha.png"),
        ("saving_fraction", "mean saving fraction", "saving_by_alpha.png"),
    ):
        fig, ax = plt.subplots()
        for cut in cuts:
            ys = []
            for a in alphas:
                metric = f"{prefix}[alpha={a}]"
                match = [r for r in rows if r.scenario == f"c={cut:g}" and r.metric == metric]
                ys.append(match[0].mean if match else float("nan"))
            ax.plot([float(a) for a in alphas], ys, marker="o", label=f"c={cut:g}")
        ax.set_xlabel("valuation factor")
        ax.set_ylabel(ylabel)
        ax.set_title(f"{ylabel} by valuation group")
        ax.legend()
        save(fig, fname)

    fig, ax = plt.subplots()
    for metric, label in (
        ("producer_revenue_auction", "auction"),
        ("producer_revenue_baseline", "baseline"),
    ):
        xs, means, halves = series(metric)
        ax.errorbar(xs, means, yerr=halves, marker="o", label=label)
    ax.set_xlabel("cut percentage")
    ax.set_ylabel("producer revenue")
    ax.set_title("Producer revenue vs cut percentage")
    ax.legend()
    save(fig, "revenue_vs_cut.png")

    return written
