"""``alloycode`` command line.

Exit status: 0 on success, 1 when ``verify`` finds a failing check, 2 for an
invalid configuration.
"""
from __future__ import annotations

import argparse
import sys

from .experiments import (
    ExperimentConfig,
    cmd_compare,
    cmd_stability,
    cmd_sweep,
    cmd_threshold,
    cmd_verify,
)

COMMANDS = {
    "threshold": cmd_threshold,
    "compare": cmd_compare,
    "stability": cmd_stability,
    "sweep": cmd_sweep,
}


def _field(value: str):
    return "real" if value.lower() == "real" else int(value)


def _ints(value: str) -> list[int]:
    return [int(v) for v in value.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alloycode", description="Coded distributed matrix multiplication simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("threshold", "compare", "stability", "sweep", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--scheme", dest="schemes", type=lambda s: s.split(","),
                       help="comma list of global-padic, alloy, ep")
        for dim in ("x", "y", "z", "P", "S", "Q"):
            p.add_argument(f"--{dim}", type=int)
        p.add_argument("--q", type=_field, help="prime field size, or 'real'")
        p.add_argument("--pf", dest="p_f", type=float)
        p.add_argument("--eps", dest="epsilon", type=float)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--n", type=int, help="equal worker count for compare")
        p.add_argument("--delta", type=int, help="extra workers above the typical threshold")
        p.add_argument("--rate-fraction", dest="rate_fraction", type=float)
        p.add_argument("--sizes", type=_ints, help="comma list of x*y sizes for sweep")
        p.add_argument("--decomp", help="decomposition JSON to include in verify")
        p.add_argument("--out", help="CSV output path (stdout if omitted)")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values, overridden by any flags given on the command line."""
    data = ExperimentConfig.read(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            data[key] = value
    if args.command == "stability":
        data.setdefault("z", 1)
        data.setdefault("schemes", ["global-padic", "ep"])
        data.setdefault("q", None)
    if data.get("q") == "real":
        data["q"] = None
    return ExperimentConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "verify":
            ok, report = cmd_verify(cfg)
            sys.stdout.write(report)
            return 0 if ok else 1
        text = COMMANDS[args.command](cfg)
    except ValueError as e:
        print(f"alloycode: invalid config: {e}", file=sys.stderr)
        return 2
    if not cfg.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
