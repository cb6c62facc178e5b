"""Command-line front end.

Three subcommands:

  bounds    analytic report (lower bound, round-robin exact/upper, slope,
            gap constants) for one population
  simulate  one Monte-Carlo run with per-terminal statistics and the
            empirical inter-delivery age floor next to the analytic bound
  sweep     the N-sweep experiment over the heterogeneous error grid
            p0 = [1/N, ..., 1], written as CSV or JSON, one row per
            (N, policy)

Populations are given either as an explicit ``--p0`` list or as ``--n N``
for the standard grid. Sweeps are reproducible: the output is a pure
function of the spec, including the seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .bounds import (
    Population,
    aoi_lower_bound,
    bounds_report,
    grid_population,
    rrp_exact,
    rrp_upper,
)
from .errors import InsufficientSamplesError, ParameterError
from .harq import HarqModel, ModelKind, TerminalChannel
from .moments import MomentMode
from .policies import POLICY_IDS, policy_code
from .rng import derive_seed
from .sim import SimConfig, backend_name, inter_delivery_check, run

CSV_COLUMNS = (
    "N",
    "policy",
    "model",
    "lambda",
    "seed",
    "sim_aoi",
    "lower_bound",
    "rrp_exact",
    "rrp_upper",
    "sim_norm",
    "upper_norm",
)


@dataclass(frozen=True)
class SweepSpec:
    """The sweep experiment grid; one simulation per (N, policy) point."""

    kind: ModelKind
    lam: float
    n_min: int
    n_max: int
    n_step: int
    slots: int
    seed: int
    policies: tuple[str, ...]
    r_trunc: int
    out: str
    fmt: str  # "csv" | "json"

    def __post_init__(self):
        if self.n_min < 1:
            raise ParameterError(f"--n-min must be >= 1, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ParameterError("--n-max must be >= --n-min")
        if self.n_step < 1:
            raise ParameterError(f"--n-step must be >= 1, got {self.n_step}")
        if self.slots < 1:
            raise ParameterError(f"--slots must be >= 1, got {self.slots}")
        if self.kind is ModelKind.EXPONENTIAL_DECAY and not (0 < self.lam < 1):
            raise ParameterError(f"--lambda must be inside (0, 1), got {self.lam}")
        if not self.policies:
            raise ParameterError("at least one --policy is required")
        for p in self.policies:
            policy_code(p)
        if self.r_trunc < 1:
            raise ParameterError(f"--r-trunc must be >= 1, got {self.r_trunc}")
        if self.fmt not in ("csv", "json"):
            raise ParameterError(f"--format must be csv or json, got {self.fmt}")


@dataclass(frozen=True)
class SweepRow:
    """One output row; ``sim_stderr`` is carried for callers but not
    written to the fixed-column table."""

    n: int
    policy: str
    model: str
    lam: float
    seed: int
    sim_aoi: float
    lower_bound: float
    rrp_exact: float
    rrp_upper: float
    sim_norm: float
    upper_norm: float
    sim_stderr: float

    def cells(self) -> list:
        return [
            self.n,
            self.policy,
            self.model,
            self.lam,
            self.seed,
            self.sim_aoi,
            self.lower_bound,
            self.rrp_exact,
            self.rrp_upper,
            self.sim_norm,
            self.upper_norm,
        ]


def run_sweep(spec: SweepSpec, max_workers: int | None = None) -> list[SweepRow]:
    """Simulate every (N, policy) point of ``spec`` and return sorted rows.

    Points run in parallel; each point's stream is derived from
    (seed, N, policy), so results do not depend on worker scheduling.
    """
    points = []
    for n in range(spec.n_min, spec.n_max + 1, spec.n_step):
        pop = grid_population(spec.kind, spec.lam, n)
        lb = aoi_lower_bound(pop)
        exact = rrp_exact(pop)
        if spec.kind is ModelKind.RECIPROCAL_DECAY:
            upper = rrp_upper(pop)
        else:
            upper = rrp_upper(pop, MomentMode.PREFER_BOUND, spec.r_trunc)
        for policy in spec.policies:
            points.append((n, pop, policy, lb, exact, upper))

    def one_point(point) -> SweepRow:
        n, pop, policy, lb, exact, upper = point
        config = SimConfig(
            population=pop,
            policy=policy,
            horizon=spec.slots,
            seed=derive_seed(spec.seed, n, policy_code(policy)),
        )
        result = run(config)
        return SweepRow(
            n=n,
            policy=policy,
            model=spec.kind.value,
            lam=spec.lam,
            seed=spec.seed,
            sim_aoi=result.avg_aoi,
            lower_bound=lb,
            rrp_exact=exact,
            rrp_upper=upper,
            sim_norm=result.avg_aoi / lb,
            upper_norm=upper / lb,
            sim_stderr=result.aoi_stderr,
        )

    workers = max_workers or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(one_point, points))
    rows.sort(key=lambda row: (row.n, row.policy))
    return rows


def write_rows(rows: list[SweepRow], path: str, fmt: str) -> None:
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow(row.cells())
    else:
        payload = [dict(zip(CSV_COLUMNS, row.cells())) for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _parse_population(args) -> Population:
    kind = ModelKind(args.model)
    model = HarqModel(kind, args.lam)
    if args.p0 is not None:
        try:
            values = tuple(float(x) for x in args.p0.split(","))
        except ValueError:
            raise ParameterError(f"could not parse --p0 list {args.p0!r}") from None
        return Population(model, tuple(TerminalChannel(v) for v in values))
    if args.n is not None:
        return grid_population(kind, args.lam, args.n)
    raise ParameterError("one of --n or --p0 is required")


def cmd_bounds(args) -> int:
    pop = _parse_population(args)
    report = bounds_report(pop, args.r_trunc)
    exact = "exact moments"
    upper_label = (
        exact
        if report.rrp_upper_exactness.value == "exact"
        else f"bound moments, R={args.r_trunc}"
    )
    lines = [
        ("model", pop.model.kind.value, ""),
        ("lambda", pop.model.lam, ""),
        ("terminals", pop.n, ""),
        ("lower_bound", report.lower_bound, exact),
        ("lb_relaxed", report.lb_relaxed, exact),
        ("rrp_exact", report.rrp_exact, exact),
        ("rrp_upper", report.rrp_upper, upper_label),
        ("asymptotic_slope", report.asymptotic_slope, exact),
        ("gap_from_moments", report.gap_from_moments, "this population"),
        ("gamma_bound", report.gamma_bound, "universal for the model"),
    ]
    for name, value, label in lines:
        suffix = f"  [{label}]" if label else ""
        print(f"{name:18} {value}{suffix}")
    if args.out:
        payload = {name: value for name, value, _ in lines}
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_simulate(args) -> int:
    pop = _parse_population(args)
    weights = None
    if args.weights is not None:
        try:
            weights = tuple(float(x) for x in args.weights.split(","))
        except ValueError:
            raise ParameterError(
                f"could not parse --weights list {args.weights!r}"
            ) from None
    config = SimConfig(
        population=pop,
        policy=args.policy[0] if args.policy else "rrp",
        horizon=args.slots,
        seed=args.seed,
        warmup=args.warmup,
        weights=weights,
    )
    result = run(config)
    lb = aoi_lower_bound(pop)
    print(f"backend            {backend_name()}")
    print(f"policy             {config.policy}")
    print(f"slots              {config.horizon}   seed {config.seed}")
    print(f"avg_aoi            {result.avg_aoi}   (stderr {result.aoi_stderr:.3g})")
    print(f"lower_bound        {lb}   [analytic]")
    try:
        floor = inter_delivery_check(result)
        print(f"inter_delivery_floor {floor}   [empirical]")
    except InsufficientSamplesError as exc:
        print(f"inter_delivery_floor unavailable: {exc}")
    print("terminal  p0        attempts  deliveries  delta_mean  delta_m2")
    for i, ch in enumerate(pop.channels):
        print(
            f"{i:8d}  {ch.p0:<8.4g}  {int(result.attempts[i]):8d}  "
            f"{int(result.deliveries[i]):10d}  {result.delta_mean[i]:<10.6g}  "
            f"{result.delta_m2[i]:<10.6g}"
        )
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        kind=ModelKind(args.model),
        lam=args.lam,
        n_min=args.n_min,
        n_max=args.n_max,
        n_step=args.n_step,
        slots=args.slots,
        seed=args.seed,
        policies=tuple(args.policy) if args.policy else ("rrp",),
        r_trunc=args.r_trunc,
        out=args.out,
        fmt=args.format,
    )
    rows = run_sweep(spec)
    write_rows(rows, spec.out, spec.fmt)
    print(f"wrote {len(rows)} rows to {spec.out}")
    return 0


def _add_population_args(parser) -> None:
    parser.add_argument(
        "--model",
        choices=[k.value for k in ModelKind],
        default="fading",
        help="error decay law: fading (reciprocal) or fbl (exponential)",
    )
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=0.5,
        help="decay rate of the exponential model (default 0.5)",
    )
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--n", type=int, help="N terminals on the grid p0=[1/N..1]")
    group.add_argument("--p0", help="comma-separated per-terminal p0 values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoi-harq",
        description="Status-update scheduling with HARQ: simulator and bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="analytic report for one population")
    _add_population_args(p_bounds)
    p_bounds.add_argument("--r-trunc", type=int, default=4)
    p_bounds.add_argument("--out", help="also write the report as JSON")
    p_bounds.set_defaults(func=cmd_bounds)

    p_sim = sub.add_parser("simulate", help="one Monte-Carlo run")
    _add_population_args(p_sim)
    p_sim.add_argument(
        "--policy", action="append", choices=POLICY_IDS, help="default rrp"
    )
    p_sim.add_argument("--slots", type=int, default=1_000_000)
    p_sim.add_argument("--seed", type=int, default=1)
    p_sim.add_argument("--warmup", type=int, default=0)
    p_sim.add_argument("--weights", help="rand policy: comma-separated weights")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="N-sweep over the p0=[1/N..1] grid")
    p_sweep.add_argument(
        "--model", choices=[k.value for k in ModelKind], default="fading"
    )
    p_sweep.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p_sweep.add_argument("--n-min", type=int, default=3)
    p_sweep.add_argument("--n-max", type=int, default=100)
    p_sweep.add_argument("--n-step", type=int, default=1)
    p_sweep.add_argument("--slots", type=int, default=1_000_000)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument(
        "--policy", action="append", choices=POLICY_IDS, help="repeatable; default rrp"
    )
    p_sweep.add_argument("--r-trunc", type=int, default=4)
    p_sweep.add_argument("--out", required=True, help="output table path")
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
