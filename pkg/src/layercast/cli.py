"""Command-line front end.

Four subcommands cover the artifact workflows: ``validate`` compares the
analytic window model against Monte-Carlo decoding, ``allocate`` plans one
scenario point, ``sweep`` runs the scenario's full scheme/field grid, and
``pack-tb`` sizes transport blocks for the scenario's capacity table.  All
file output is CSV with the scenario digest and seed in a comment header.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from .experiment import (
    run_scenario,
    validate_approximation,
    write_plans_csv,
    write_rows_csv,
    write_validation_csv,
)
from .lte import pack_tb
from .scenario import Scenario, load_scenario

__all__ = ["main"]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layercast",
        description="Layered network-coded multicast: models, allocation, reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    val = sub.add_parser("validate", help="compare the analytic window model to simulation")
    val.add_argument("--scenario", type=Path, help="optional scenario supplying seed and digest")
    val.add_argument("--layers", type=_int_list, default=[5, 5, 5], help="layer sizes, comma separated")
    val.add_argument("--p", type=_float_list, default=[0.1, 0.3], help="erasure rates")
    val.add_argument("--q", type=_int_list, default=[2, 256], help="field sizes")
    val.add_argument("--extras", type=_int_list, default=list(range(11)),
                     help="packets beyond each window size")
    val.add_argument("--trials", type=int, default=10_000)
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--out", type=Path, default=Path("results"))

    for name, help_text in (
        ("allocate", "plan and evaluate one scheme/field point"),
        ("sweep", "plan and evaluate the scenario's full grid"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", type=Path, required=True)
        cmd.add_argument("--schemes", type=lambda t: t.split(","), default=None)
        cmd.add_argument("--q", type=_int_list, default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--out", type=Path, default=Path("results"))

    pack = sub.add_parser("pack-tb", help="min-max transport-block sizing for the capacity table")
    pack.add_argument("--scenario", type=Path, required=True)
    pack.add_argument("--out", type=Path, default=None)
    return parser


def _cmd_validate(args: argparse.Namespace) -> int:
    if args.scenario is not None:
        scn = load_scenario(args.scenario)
        digest, seed = scn.source_sha256, scn.seed
    else:
        spec = f"layers={args.layers} p={args.p} q={args.q} extras={args.extras}"
        digest, seed = hashlib.sha256(spec.encode()).hexdigest(), 7
    if args.seed is not None:
        seed = args.seed
    rows = validate_approximation(
        args.layers, args.p, args.q, args.extras, args.trials, seed
    )
    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / "validation.csv"
    write_validation_csv(target, rows, digest, seed)
    worst = max(rows, key=lambda r: r.gap)
    print(f"wrote {target} ({len(rows)} rows)")
    print(
        f"worst gap {worst.gap:.6f} at window={worst.window} "
        f"p={worst.p} q={worst.field_size} extra={worst.extra} "
        f"(std error {worst.std_error:.6f})"
    )
    return 0


def _run_points(scn: Scenario, args: argparse.Namespace, single_point: bool) -> int:
    schemes = args.schemes if args.schemes is not None else list(scn.schemes)
    fields = args.q if args.q is not None else list(scn.field_sizes)
    if single_point:
        schemes, fields = schemes[:1], fields[:1]
    seed = args.seed if args.seed is not None else scn.seed
    result = run_scenario(scn, schemes, fields)
    args.out.mkdir(parents=True, exist_ok=True)
    plans_path = args.out / "plans.csv"
    users_path = args.out / "users.csv"
    write_plans_csv(plans_path, result.plans, scn.source_sha256, seed)
    write_rows_csv(users_path, result.rows, scn.source_sha256, seed)
    for rec in result.plans:
        mcs = ",".join(str(m) for m in rec.mcs) or "-"
        print(
            f"{rec.scheme:>7} q={rec.field_size:<3} {rec.status:<10} "
            f"total={rec.total_transmissions:<5} mcs=[{mcs}]"
            + (f"  ({rec.note})" if rec.note else "")
        )
    print(f"wrote {plans_path} and {users_path}")
    return 0


def _cmd_pack(args: argparse.Namespace) -> int:
    scn = load_scenario(args.scenario)
    table = scn.mcs_table
    packing = pack_tb(table.bit_capacities, table.max_blocks)
    print(f"packet_bits={packing.packet_bits} worst_slack={packing.worst_slack}")
    for m, (cap, blocks) in enumerate(
        zip(table.bit_capacities, packing.blocks), start=table.mcs_range.lowest
    ):
        print(f"mcs={m:<3} capacity={cap:<5} blocks={blocks}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        target = args.out / "pack.csv"
        with target.open("w", encoding="utf-8", newline="") as out:
            out.write(f"# scenario_sha256={scn.source_sha256} seed={scn.seed}\n")
            out.write("mcs,capacity_bits,blocks,slack_bits\n")
            for m, (cap, blocks) in enumerate(
                zip(table.bit_capacities, packing.blocks), start=table.mcs_range.lowest
            ):
                out.write(f"{m},{cap},{blocks},{blocks * cap - packing.packet_bits}\n")
        print(f"wrote {target}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "pack-tb":
        return _cmd_pack(args)
    scn = load_scenario(args.scenario)
    return _run_points(scn, args, single_point=args.command == "allocate")


if __name__ == "__main__":
    sys.exit(main())
