"""Command-line entry point: run scenarios, sweep parameters, query oracles.

Exit codes: 0 success, 2 configuration/validation error, 3 oracle-agreement
failure when --check is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as flio
from .errors import FringelabError
from .scenarios import load_config, oracle_visibility, parse_quantity, run_scenario, sweep


def _parse_values(text: str) -> list[float]:
    if text.startswith(("linspace:", "logspace:")):
        kind, a, b, n = text.split(":")
        a, b, n = parse_quantity(a), parse_quantity(b), int(n)
        import numpy as np

        if kind == "linspace":
            return list(np.linspace(a, b, n))
        return list(np.geomspace(a, b, n))
    return [parse_quantity(v) for v in text.split(",") if v.strip()]


def _write_outputs(table, out_dir: Path, scenario: str, scan=None):
    out_dir.mkdir(parents=True, exist_ok=True)
    table.write_csv(out_dir / "result.csv")
    flio.write_result_json(out_dir / "result.json", table.to_record())
    if scan is not None:
        flio.write_scan_csv(out_dir / "fringe_scan.csv", scan)
        flio.write_two_column(
            out_dir / f"{scenario}_fringe.dat", scan.phase, scan.power, "phase power"
        )
    vis = getattr(table, "visibility", None)
    if vis is not None:
        flio.write_result_json(
            out_dir / "visibility.json",
            flio.visibility_record(vis, scenario, oracle=table.rows[0].v_oracle),
        )
    if len(table.rows) > 1:
        flio.write_two_column(
            out_dir / f"{scenario}_sweep.dat",
            [r.param for r in table.rows],
            [r.v_mc for r in table.rows],
            f"{table.param_path} v_mc",
        )


def _print_rows(table):
    print("param          v_mc     ci95     v_oracle  phi0      baseline")
    for r in table.rows:
        print(
            f"{r.param:<14.6g} {r.v_mc:<8.4f} {r.ci95:<8.4f} {r.v_oracle:<9.4f} "
            f"{r.phi0:<9.4f} {r.baseline:.6g}"
        )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fringelab",
        description="Monte-Carlo interference scenarios with analytic oracle checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a TOML config")
    p_run.add_argument("config")
    p_sweep = sub.add_parser("sweep", help="sweep one numeric config field")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True, help="dotted path, e.g. kernel.width")
    p_sweep.add_argument(
        "--values",
        required=True,
        help="comma list (unit suffixes ok) or linspace:a:b:n / logspace:a:b:n",
    )
    p_oracle = sub.add_parser("oracle", help="print the oracle prediction only")
    p_oracle.add_argument("config")

    for p in (p_run, p_sweep, p_oracle):
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--out", default=None, help="output directory")
    for p in (p_run, p_sweep):
        p.add_argument("--workers", type=int, default=1)
        p.add_argument(
            "--check",
            action="store_true",
            help="exit 3 unless every |V_mc - V_oracle| <= max(0.05, 3*ci95)",
        )

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.ensemble.seed = args.seed
        if args.command == "oracle":
            value = oracle_visibility(cfg)
            print(f"v_oracle {value:.6f}")
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
                flio.write_result_json(
                    out / "oracle.json", {"scenario": cfg.scenario, "v_oracle": value}
                )
            return 0
        if args.command == "run":
            table = run_scenario(cfg, workers=args.workers)
            scan = getattr(table, "scan", None)
        else:
            table = sweep(cfg, args.param, _parse_values(args.values), workers=args.workers)
            scan = None
        _print_rows(table)
        if args.out:
            _write_outputs(table, Path(args.out), cfg.scenario, scan)
        if args.check and not table.agreement_ok():
            print("oracle agreement FAILED", file=sys.stderr)
            return 3
        return 0
    except (FringelabError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
