"""``harmonic-entropy`` command line.

Settings are layered: built-in defaults, then ``--config``, then flags.
Exit status is 0 when every verdict passes, 1 on a numeric verdict failure
and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError
from .experiments import ExperimentConfig, load_config, run

THREADS_ENV = "HARMONIC_ENTROPY_THREADS"

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _index_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML or JSON config file")
    common.add_argument("--seed", type=_u64, metavar="U64")
    common.add_argument("--threads", type=_positive, metavar="N",
                        help=f"worker threads (default: ${THREADS_ENV} or 1)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))

    parser = _Parser(prog="harmonic-entropy",
                     description="Entanglement entropy experiments for harmonic oscillator lattices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common], help="run every invariant suite")
    p = sub.add_parser("area-law", parents=[common], help="disorder-averaged entropies of Anderson chains")
    p.add_argument("--realizations", type=_positive)
    p.add_argument("--region", type=_index_list, metavar="I,J,...",
                   help="explicit 0-based sites instead of centered intervals")
    p = sub.add_parser("divergence", parents=[common], help="entropy growth of the ordered chain")
    p.add_argument("--lattice", choices=("z", "n", "Z", "N"), required=True)
    p = sub.add_parser("szego", parents=[common], help="Toeplitz log-determinants against alpha^2 H_n")
    p.add_argument("--alpha", type=float)
    p = sub.add_parser("matel", parents=[common], help="limit-matrix entries, closed form vs quadrature")
    p.add_argument("--which", choices=("R", "S", "limit"))
    return parser


def _threads_from_env() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return value


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = load_config(args.config) if args.config else {}
    kind = {"validate": "validate", "area-law": "area_law", "szego": "szego", "matel": "matel"}.get(args.command)
    if args.command == "divergence":
        kind = f"divergence_{args.lattice.lower()}"
    data["kind"] = kind
    env_threads = _threads_from_env()
    if env_threads is not None and "threads" not in data:
        data["threads"] = env_threads
    overrides = {
        "seed": args.seed,
        "threads": args.threads,
        "output": args.out,
        "format": args.format,
        "realizations": getattr(args, "realizations", None),
        "region": getattr(args, "region", None),
        "alpha": getattr(args, "alpha", None),
        "which": getattr(args, "which", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"harmonic-entropy: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run(cfg)
    text = report.render(cfg.format)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for name, ok in report.verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
