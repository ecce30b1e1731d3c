"""Command-line entry point: ``relaysec run|validate|list-experiments``.

Exit codes: 0 success, 2 spec error, 3 numerical failure (including a
non-converged game when the spec sets ``require_convergence = true``).
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (EXPERIMENTS, ExperimentError, SpecError, load_spec, nonconverged_runs,
                          run_experiment, with_seed)

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_NUMERIC = 3


def _parser():
    parser = argparse.ArgumentParser(prog="relaysec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment spec and write its CSV")
    run.add_argument("spec")
    run.add_argument("--out", help="CSV path (default: standard output)")
    run.add_argument("--seed", type=int, help="override the spec's seed")
    run.add_argument("--quiet", action="store_true", help="no progress messages")
    sub.add_parser("list-experiments", help="print the known experiment names")
    validate = sub.add_parser("validate", help="check a spec file without running it")
    validate.add_argument("spec")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-experiments":
        print("\n".join(EXPERIMENTS))
        return EXIT_OK

    try:
        spec = load_spec(args.spec)
        if getattr(args, "seed", None) is not None:
            spec = with_seed(spec, args.seed)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    if args.command == "validate":
        print(f"{args.spec}: ok ({spec.name})")
        return EXIT_OK

    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    log(f"running {spec.name} (seed {spec.seed})")
    try:
        table = run_experiment(spec)
    except ExperimentError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        table.write(args.out)
        log(f"wrote {len(table.rows)} rows to {args.out}")
    else:
        sys.stdout.write(table.to_csv())
    failed = nonconverged_runs(table)
    if failed:
        print(f"warning: {failed} game run(s) did not converge", file=sys.stderr)
        if spec.require_convergence:
            return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
