"""Command-line entry point.

Subcommands: mttdl, sweep, table1, figure, roc, cost, simulate. Scenarios
live in JSON files with sections scheme / rates / prediction / cost / sim;
unknown keys are rejected with the offending line where it can be found.
All rates enter in hours and are converted internally once (the cost
model's window units come from the declared window_hours). Exactly one
machine format is emitted per invocation; finite numbers round-trip
bitwise through their shortest decimal form, unbounded values serialize
as "inf" (and "--" in rendered tables).

Exit codes: 0 success, 1 validation error, 2 numeric/conditioning error,
3 simulation-censoring unreliability.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import AllCensoredError, ConditioningError
from .markov import MttdlResult, mttdl_hitting_time
from .prediction import (
    ReplacementCost,
    RocCurve,
    auc as curve_auc,
    false_replacement_cost,
    roc_from_auc,
    tpr_for_fpr,
)
from .scheme import ProtectionScheme
from .sim import CompetingMixture, DiskFarm, Exponential, Weibull, simulate_farm
from .sweep import Scenario, SweepPlan, figure_series, protection_comparison, run_sweep

__all__ = ["main", "load_scenario", "scenario_mapping"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_CENSORING = 3

_SCHEME_KINDS = {"raid6": 2, "raid_tp": 3, "rs": None}

_SCHEMA = {
    "scheme": {"kind", "n", "m", "arrays"},
    "rates": {"mttf_hours", "mttr_hours"},
    "prediction": {"tpr", "auc", "p", "fpr", "budget"},
    "cost": {"c", "lifetime_hours", "window_hours"},
    "sim": {"distribution", "scale", "shape", "trials", "seed", "event_cap"},
}


@dataclass(frozen=True)
class CostSection:
    c: float
    lifetime_hours: float
    window_hours: float


@dataclass(frozen=True)
class SimSection:
    distribution: str
    scale: float | None
    shape: float | None
    trials: int
    seed: int
    event_cap: int


@dataclass(frozen=True)
class ScenarioConfig:
    scheme_kind: str
    scenario: Scenario
    cost_section: CostSection | None
    sim_section: SimSection | None


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    """Best-effort line lookup of a key inside its section."""
    lines = text.splitlines()
    start = 0
    for idx, line in enumerate(lines):
        if f'"{section}"' in line:
            start = idx
            break
    else:
        return None
    if key is None:
        return start + 1
    for idx in range(start, len(lines)):
        if f'"{key}"' in lines[idx]:
            return idx + 1
    return start + 1


class _ScenarioError(ValueError):
    pass


def _fail(text: str, section: str, key: str | None, message: str, source: str) -> None:
    line = _line_of(text, section, key)
    where = f"{source}:{line}: " if line else f"{source}: "
    key_part = f"{section}.{key}" if key else section
    raise _ScenarioError(f"{where}{key_part}: {message}")


def _require(mapping: dict, section: str, key: str, text: str, source: str):
    if key not in mapping:
        _fail(text, section, None, f"missing required key {key!r}", source)
    return mapping[key]


def _number(value, section: str, key: str, text: str, source: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(text, section, key, f"expected a number, got {value!r}", source)
    return float(value)


def _integer(value, section: str, key: str, text: str, source: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(text, section, key, f"expected an integer, got {value!r}", source)
    return value


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text()
    return load_scenario_text(text, source=str(path))


def load_scenario_text(text: str, source: str = "<scenario>") -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _ScenarioError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise _ScenarioError(f"{source}: scenario must be a JSON object")

    for section in raw:
        if section not in _SCHEMA:
            line = _line_of(text, section)
            where = f"{source}:{line}: " if line else f"{source}: "
            raise _ScenarioError(f"{where}unknown section {section!r}")
        if not isinstance(raw[section], dict):
            _fail(text, section, None, "section must be a JSON object", source)
        for key in raw[section]:
            if key not in _SCHEMA[section]:
                _fail(text, section, key, "unknown key", source)

    for section in ("scheme", "rates"):
        if section not in raw:
            raise _ScenarioError(f"{source}: missing required section {section!r}")

    scheme_raw = raw["scheme"]
    kind = _require(scheme_raw, "scheme", "kind", text, source)
    if kind not in _SCHEME_KINDS:
        _fail(text, "scheme", "kind", f"must be one of {sorted(_SCHEME_KINDS)}", source)
    n = _integer(_require(scheme_raw, "scheme", "n", text, source), "scheme", "n", text, source)
    arrays = _integer(
        _require(scheme_raw, "scheme", "arrays", text, source), "scheme", "arrays", text, source
    )
    fixed_m = _SCHEME_KINDS[kind]
    if fixed_m is None:
        m = _integer(_require(scheme_raw, "scheme", "m", text, source), "scheme", "m", text, source)
    else:
        m = fixed_m
        if "m" in scheme_raw:
            declared = _integer(scheme_raw["m"], "scheme", "m", text, source)
            if declared != fixed_m:
                _fail(text, "scheme", "m", f"{kind} implies m={fixed_m}, got {declared}", source)
    try:
        scheme = ProtectionScheme(data_disks=n, redundancy_disks=m, arrays=arrays)
    except ValueError as exc:
        _fail(text, "scheme", None, str(exc), source)

    rates_raw = raw["rates"]
    mttf = _number(
        _require(rates_raw, "rates", "mttf_hours", text, source), "rates", "mttf_hours", text, source
    )
    mttr = _number(
        _require(rates_raw, "rates", "mttr_hours", text, source), "rates", "mttr_hours", text, source
    )

    cost_section = None
    cost_model = None
    if "cost" in raw:
        cost_raw = raw["cost"]
        c = _number(_require(cost_raw, "cost", "c", text, source), "cost", "c", text, source)
        lifetime_hours = _number(
            _require(cost_raw, "cost", "lifetime_hours", text, source),
            "cost",
            "lifetime_hours",
            text,
            source,
        )
        window_hours = _number(
            _require(cost_raw, "cost", "window_hours", text, source),
            "cost",
            "window_hours",
            text,
            source,
        )
        if window_hours <= 0:
            _fail(text, "cost", "window_hours", "must be positive", source)
        cost_section = CostSection(c=c, lifetime_hours=lifetime_hours, window_hours=window_hours)
        try:
            cost_model = ReplacementCost(
                cost_per_disk=c,
                lifetime_windows=lifetime_hours / window_hours,
                total_disks=scheme.total_disks,
                failure_rate_per_window=window_hours / mttf,
            )
        except ValueError as exc:
            _fail(text, "cost", None, str(exc), source)

    tpr = roc = fpr = budget = None
    if "prediction" in raw:
        pred = raw["prediction"]
        if "tpr" in pred and ("auc" in pred or "p" in pred):
            _fail(text, "prediction", "tpr", "conflicts with auc/p", source)
        if "auc" in pred and "p" in pred:
            _fail(text, "prediction", "auc", "conflicts with p", source)
        if "fpr" in pred and "budget" in pred:
            _fail(text, "prediction", "fpr", "conflicts with budget", source)
        if "tpr" in pred:
            tpr = _number(pred["tpr"], "prediction", "tpr", text, source)
        if "p" in pred:
            try:
                roc = RocCurve(_number(pred["p"], "prediction", "p", text, source))
            except ValueError as exc:
                _fail(text, "prediction", "p", str(exc), source)
        if "auc" in pred:
            try:
                roc = roc_from_auc(_number(pred["auc"], "prediction", "auc", text, source))
            except ValueError as exc:
                _fail(text, "prediction", "auc", str(exc), source)
        if "fpr" in pred:
            fpr = _number(pred["fpr"], "prediction", "fpr", text, source)
        if "budget" in pred:
            budget = _number(pred["budget"], "prediction", "budget", text, source)

    try:
        scenario = Scenario(
            scheme=scheme,
            mttf_hours=mttf,
            mttr_hours=mttr,
            tpr=tpr,
            roc=roc,
            fpr=fpr,
            budget=budget,
            cost=cost_model,
        )
    except ValueError as exc:
        section = "prediction" if ("tpr" in str(exc) or "fpr" in str(exc) or "budget" in str(exc)) else "rates"
        _fail(text, section, None, str(exc), source)

    sim_section = None
    if "sim" in raw:
        sim_raw = raw["sim"]
        distribution = _require(sim_raw, "sim", "distribution", text, source)
        if distribution not in ("exponential", "weibull", "mixture"):
            _fail(text, "sim", "distribution", "must be exponential, weibull or mixture", source)
        scale = shape = None
        if distribution in ("weibull", "mixture"):
            scale = _number(
                _require(sim_raw, "sim", "scale", text, source), "sim", "scale", text, source
            )
            shape = _number(
                _require(sim_raw, "sim", "shape", text, source), "sim", "shape", text, source
            )
        trials = sim_raw.get("trials", 1000)
        trials = _integer(trials, "sim", "trials", text, source)
        if trials < 1:
            _fail(text, "sim", "trials", "must be >= 1", source)
        seed = _integer(sim_raw.get("seed", 0), "sim", "seed", text, source)
        if seed < 0:
            _fail(text, "sim", "seed", "must be non-negative", source)
        event_cap = _integer(sim_raw.get("event_cap", 1_000_000), "sim", "event_cap", text, source)
        if event_cap < 1:
            _fail(text, "sim", "event_cap", "must be >= 1", source)
        sim_section = SimSection(
            distribution=distribution,
            scale=scale,
            shape=shape,
            trials=trials,
            seed=seed,
            event_cap=event_cap,
        )

    return ScenarioConfig(
        scheme_kind=kind,
        scenario=scenario,
        cost_section=cost_section,
        sim_section=sim_section,
    )


def scenario_mapping(config: ScenarioConfig) -> dict:
    """Normalized mapping for a config; loading it back yields the same config."""
    scenario = config.scenario
    scheme = scenario.scheme
    out: dict = {
        "scheme": {
            "kind": config.scheme_kind,
            "n": scheme.data_disks,
            "m": scheme.redundancy_disks,
            "arrays": scheme.arrays,
        },
        "rates": {
            "mttf_hours": scenario.mttf_hours,
            "mttr_hours": scenario.mttr_hours,
        },
    }
    prediction: dict = {}
    if scenario.tpr is not None:
        prediction["tpr"] = scenario.tpr
    if scenario.roc is not None:
        prediction["p"] = scenario.roc.shape
    if scenario.fpr is not None:
        prediction["fpr"] = scenario.fpr
    if scenario.budget is not None:
        prediction["budget"] = scenario.budget
    if prediction:
        out["prediction"] = prediction
    if config.cost_section is not None:
        out["cost"] = {
            "c": config.cost_section.c,
            "lifetime_hours": config.cost_section.lifetime_hours,
            "window_hours": config.cost_section.window_hours,
        }
    if config.sim_section is not None:
        sim = {"distribution": config.sim_section.distribution}
        if config.sim_section.scale is not None:
            sim["scale"] = config.sim_section.scale
            sim["shape"] = config.sim_section.shape
        sim["trials"] = config.sim_section.trials
        sim["seed"] = config.sim_section.seed
        sim["event_cap"] = config.sim_section.event_cap
        out["sim"] = sim
    return out


def _lifetime_distribution(config: ScenarioConfig):
    sim = config.sim_section
    rate = 1.0 / config.scenario.mttf_hours
    if sim.distribution == "exponential":
        return Exponential(rate)
    if sim.distribution == "weibull":
        return Weibull(scale_hours=sim.scale, shape=sim.shape)
    return CompetingMixture(exponential_rate=rate, weibull_scale=sim.scale, weibull_shape=sim.shape)


def _fmt(value) -> str:
    if isinstance(value, float):
        # repr is the shortest decimal that parses back to the same bits
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def _sanitize(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _emit_rows(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    headers = list(rows[0].keys())
    if fmt == "json":
        return json.dumps({"rows": _sanitize(rows)}, indent=2)
    lines = []
    if fmt == "csv":
        lines.append(",".join(headers))
        for row in rows:
            lines.append(",".join(_fmt(row[h]) for h in headers))
        return "\n".join(lines)
    cells = [headers] + [[_fmt(row[h]) for h in headers] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(headers))]
    for line in cells:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(line, widths)))
    return "\n".join(lines)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _result_row(result: MttdlResult) -> dict:
    return {
        "method": result.method,
        "mttdl_hours": result.mttdl_hours,
        "mttdl_days": result.mttdl_days,
        "saturation": result.saturation,
        "warnings": "; ".join(result.warnings),
    }


def cmd_mttdl(args) -> int:
    config = load_scenario(args.config)
    scenario = config.scenario
    laplace = scenario.mttdl("laplace")
    if laplace.is_infinite:
        hitting = laplace
        rows = [_result_row(laplace)]
    else:
        hitting = mttdl_hitting_time(scenario.chain())
        rows = [_result_row(laplace), _result_row(hitting)]

    if args.format == "text":
        lines = [
            f"scheme: {config.scheme_kind} n={scenario.scheme.data_disks}"
            f" m={scenario.scheme.redundancy_disks} arrays={scenario.scheme.arrays}"
            f" (N={scenario.scheme.total_disks})",
            f"rates: mttf_hours={_fmt(scenario.mttf_hours)} mttr_hours={_fmt(scenario.mttr_hours)}",
            f"tpr: {_fmt(scenario.resolved_tpr())}",
            f"saturation: {laplace.saturation}",
            f"loss_vector: {[float(v) for v in laplace.loss_values]}",
        ]
        for result in (laplace, hitting) if not laplace.is_infinite else (laplace,):
            lines.append(
                f"{result.method}: mttdl_days={_fmt(result.mttdl_days)}"
                f" mttdl_hours={_fmt(result.mttdl_hours)}"
            )
            for warning in result.warnings:
                lines.append(f"  warning: {warning}")
        _write("\n".join(lines), args.out)
    elif args.format == "json":
        payload = {
            "scenario": scenario_mapping(config),
            "results": {row["method"]: _sanitize(row) for row in rows},
        }
        _write(json.dumps(payload, indent=2), args.out)
    else:
        _write(_emit_rows(rows, "csv"), args.out)
    return EXIT_OK


def _parse_axis(spec: str) -> tuple[str, tuple[float, ...]]:
    if "=" not in spec:
        raise ValueError(f"axis must look like name=v1,v2,... got {spec!r}")
    name, _, values = spec.partition("=")
    try:
        parsed = tuple(float(v) for v in values.split(",") if v != "")
    except ValueError as exc:
        raise ValueError(f"axis {name!r}: {exc}") from exc
    if not parsed:
        raise ValueError(f"axis {name!r} has no values")
    return name.strip(), parsed


def cmd_sweep(args) -> int:
    config = load_scenario(args.config)
    axes = tuple(_parse_axis(spec) for spec in args.axis or [])
    plan = SweepPlan(base=config.scenario, axes=axes, output=args.output)
    rows = run_sweep(plan)
    _write(_emit_rows(rows, args.format), args.out)
    return EXIT_OK


def _parse_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v != "")
    except ValueError as exc:
        raise ValueError(f"{flag}: {exc}") from exc
    if not values:
        raise ValueError(f"{flag} has no values")
    return values


def cmd_table1(args) -> int:
    tprs = _parse_list(args.tpr, "--tpr")
    mttrs = _parse_list(args.mttr, "--mttr")
    table = protection_comparison(args.mttf_hours, tprs, mttrs)
    if args.format == "text":
        _write(table.render(), args.out)
    else:
        _write(_emit_rows(table.to_records(), args.format), args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    data = figure_series(args.id, resolution=args.resolution)
    rows = [
        {"figure": data["figure"], "series": s["label"], data["x"]: x, data["y"]: y}
        for s in data["series"]
        for x, y in s["points"]
    ]
    _write(_emit_rows(rows, args.format), args.out)
    return EXIT_OK


def cmd_roc(args) -> int:
    if (args.p is None) == (args.auc is None):
        raise ValueError("give exactly one of --p or --auc")
    curve = RocCurve(args.p) if args.p is not None else roc_from_auc(args.auc)
    area = curve_auc(curve)
    if args.fpr is not None:
        fprs = [args.fpr]
    else:
        fprs = [i / args.points for i in range(args.points + 1)]
    rows = [
        {"p": curve.shape, "auc": area, "fpr": fpr, "tpr": tpr_for_fpr(curve, fpr)}
        for fpr in fprs
    ]
    _write(_emit_rows(rows, args.format), args.out)
    return EXIT_OK


def cmd_cost(args) -> int:
    model = ReplacementCost(
        cost_per_disk=args.cost_per_disk,
        lifetime_windows=args.lifetime_hours / args.window_hours,
        total_disks=args.disks,
        failure_rate_per_window=args.window_hours / args.mttf_hours,
    )
    if args.fpr is not None:
        fprs = [args.fpr]
    else:
        fprs = [i / args.points for i in range(args.points + 1)]
    rows = [
        {"fpr": fpr, "cost_per_window": false_replacement_cost(model, fpr)} for fpr in fprs
    ]
    _write(_emit_rows(rows, args.format), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = load_scenario(args.config)
    if config.sim_section is None:
        raise ValueError("scenario has no sim section")
    sim = config.sim_section
    trials = args.trials if args.trials is not None else sim.trials
    seed = args.seed if args.seed is not None else sim.seed
    farm = DiskFarm(
        scheme=config.scenario.scheme,
        lifetime=_lifetime_distribution(config),
        repair_mean_hours=config.scenario.mttr_hours,
        tpr=config.scenario.resolved_tpr(),
    )
    result = simulate_farm(farm, seed=seed, trials=trials, event_cap=sim.event_cap)
    row = {
        "trials": result.trials,
        "mean_ttdl_hours": result.mean_ttdl_hours,
        "mean_ttdl_days": result.mean_ttdl_hours / 24.0,
        "std_error_hours": result.std_error_hours,
        "ci95_low_hours": result.ci95_hours[0],
        "ci95_high_hours": result.ci95_hours[1],
        "censored_trials": result.censored_trials,
        "seed": result.seed,
        "unreliable": result.unreliable,
    }
    if args.format == "json":
        _write(json.dumps(_sanitize(row), indent=2), args.out)
    else:
        _write(_emit_rows([row], args.format), args.out)
    return EXIT_CENSORING if result.unreliable else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diskrely",
        description="Disk-farm MTTDL modelling with failure-prediction economics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        p.add_argument("--format", choices=("text", "csv", "json"), default="text")
        p.add_argument("--out", help="write output to a file instead of stdout")
        if config:
            p.add_argument("--config", required=True, help="scenario JSON file")

    p = sub.add_parser("mttdl", help="solve one scenario with both methods")
    common(p, config=True)
    p.set_defaults(handler=cmd_mttdl)

    p = sub.add_parser("sweep", help="sweep scenario fields over a grid")
    common(p, config=True)
    p.add_argument("--axis", action="append", help="name=v1,v2,... (repeatable)")
    p.add_argument("--output", choices=("mttdl", "cost", "both"), default="mttdl")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("table1", help="three-layout MTTDL comparison grid")
    common(p)
    p.add_argument("--mttf-hours", type=float, default=5 * 365 * 24.0)
    p.add_argument("--tpr", default="0.80,0.85,0.90,0.95")
    p.add_argument("--mttr", default="5,10,15")
    p.set_defaults(handler=cmd_table1)

    p = sub.add_parser("figure", help="numeric series behind a report figure")
    common(p)
    p.add_argument("id", type=int, choices=(3, 4, 5, 6))
    p.add_argument("--resolution", type=int, default=50)
    p.set_defaults(handler=cmd_figure)

    p = sub.add_parser("roc", help="operating-curve points and area")
    common(p)
    p.add_argument("--p", type=float, default=None, help="curve shape (>= 1)")
    p.add_argument("--auc", type=float, default=None, help="target area in [0.5, 1)")
    p.add_argument("--fpr", type=float, default=None, help="single fpr instead of a grid")
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(handler=cmd_roc)

    p = sub.add_parser("cost", help="false-replacement cost per window")
    common(p)
    p.add_argument("--cost-per-disk", type=float, default=375.0)
    p.add_argument("--disks", type=int, default=100000)
    p.add_argument("--lifetime-hours", type=float, default=5 * 365 * 24.0)
    p.add_argument("--window-hours", type=float, default=6.0)
    p.add_argument("--mttf-hours", type=float, default=5 * 365 * 24.0)
    p.add_argument("--fpr", type=float, default=None)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(handler=cmd_cost)

    p = sub.add_parser("simulate", help="event-driven farm simulation")
    common(p, config=True)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--trials", type=int, default=None, help="override the scenario trials")
    p.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; fold into the validation code
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.handler(args)
    except (ValueError, AllCensoredError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConditioningError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
