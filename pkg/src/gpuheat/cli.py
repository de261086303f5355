"""Command-line surface: simulate, compare, classify, hardware.

Every success path exits 0; validation and numerical aborts exit 1 with
the offending fields on stderr. Output depends only on the input files,
never on clock, locale or environment.
"""

import argparse
import sys
from pathlib import Path

from .errors import GpuHeatError, ConfigurationError
from .gpu import classify_workload
from .hardware import (
    BUILTIN_CATALOG,
    ProductKind,
    best_by,
    cost_ratio,
    format_price_efficiency,
    format_size_efficiency,
    load_catalog,
    price_efficiency,
    size_efficiency,
)
from .scenario import load_scenario
from .scheduling import POLICY_IDS
from .simulation import compare_policies, run_to_files, with_policy


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    stem = Path(args.scenario).stem or "scenario"
    trace_path = args.trace if args.trace else f"{stem}.trace.csv"
    summary_path = args.summary if args.summary else f"{stem}.summary.json"
    summary = run_to_files(scenario, trace_path, summary_path)
    print(
        f"band_violation={summary.band_violation_fraction:.2%} "
        f"flops={summary.total_flops} "
        f"heater_energy_saved_j={summary.heater_energy_saved_j:.1f} "
        f"(trace: {trace_path}, summary: {summary_path})"
    )
    return 0


def cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    rows = compare_policies(scenario, args.policies)
    header = (
        f"{'policy':<12} {'fragments':>9} {'flops':>16} {'gpu_energy_j':>14} "
        f"{'heater_energy_j':>15} {'heater_saved_j':>14} {'flops_gained':>16} "
        f"{'band_viol':>9} {'peak_gpu_c':>10}"
    )
    print(header)
    print("-" * len(header))
    for row in rows:
        s = row.summary
        print(
            f"{row.policy_id:<12} {s.fragments_completed:>9} {s.total_flops:>16} "
            f"{s.gpu_energy_j:>14.1f} {s.heater_energy_j:>15.1f} "
            f"{s.heater_energy_saved_j:>14.1f} {row.flops_gained:>16} "
            f"{s.band_violation_fraction:>9.2%} {s.peak_temperature_c['gpu']:>10.2f}"
        )
    return 0


def cmd_classify(args) -> int:
    print(classify_workload(args.flops, args.accesses))
    return 0


def cmd_hardware(args) -> int:
    catalog = load_catalog(args.catalog) if args.catalog else BUILTIN_CATALOG
    header = (
        f"{'product':<28} {'kind':<7} {'price_usd':>10} {'power_w':>8} "
        f"{'size_cm3':>9} {'usd_per_w':>10} {'cm3_per_w':>10}"
    )
    print(header)
    print("-" * len(header))
    for p in catalog:
        print(
            f"{p.name:<28} {p.kind.value:<7} {p.price_usd:>10.2f} {p.power_w:>8.1f} "
            f"{p.size_cm3:>9.3f} {format_price_efficiency(price_efficiency(p)):>10} "
            f"{format_size_efficiency(size_efficiency(p)):>10}"
        )
    gpu_price = best_by(catalog, "price", ProductKind.GPU)
    heater_price = best_by(catalog, "price", ProductKind.HEATER)
    gpu_size = best_by(catalog, "size", ProductKind.GPU)
    heater_size = best_by(catalog, "size", ProductKind.HEATER)
    ratio = cost_ratio(gpu_price, heater_price)
    print()
    print(
        f"most price-efficient gpu:    {gpu_price.name} "
        f"({format_price_efficiency(price_efficiency(gpu_price))} $/W)"
    )
    print(
        f"most price-efficient heater: {heater_price.name} "
        f"({format_price_efficiency(price_efficiency(heater_price))} $/W)"
    )
    print(
        f"most size-efficient gpu:     {gpu_size.name} "
        f"({format_size_efficiency(size_efficiency(gpu_size))} cm3/W)"
    )
    print(
        f"most size-efficient heater:  {heater_size.name} "
        f"({format_size_efficiency(size_efficiency(heater_size))} cm3/W)"
    )
    print(f"gpu/heater cost ratio:       {ratio:.4f} (~1/{round(1 / ratio)})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpuheat",
        description=(
            "Simulate satellites that heat themselves with GPU compute during "
            "orbital eclipse, and compare the hardware economics."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario, write trace + summary")
    p.add_argument("scenario", help="scenario file path ('default.scenario' is bundled)")
    p.add_argument("--trace", help="trace CSV output path")
    p.add_argument("--summary", help="summary JSON output path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("compare", help="run several policies on one scenario")
    p.add_argument("scenario")
    p.add_argument(
        "--policies",
        nargs="+",
        default=list(POLICY_IDS),
        choices=list(POLICY_IDS),
        help="policies to compare (default: all)",
    )
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("classify", help="classify a workload by arithmetic intensity")
    p.add_argument("--flops", type=int, required=True)
    p.add_argument("--accesses", type=int, required=True)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser(
        "hardware",
        aliases=["compare-hardware"],
        help="price/size efficiency table: GPUs vs dedicated heaters",
    )
    p.add_argument("--catalog", help="catalog CSV (default: built-in)")
    p.set_defaults(fn=cmd_hardware)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 1
    except (GpuHeatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
