"""Command line: ``gmatrix run`` and ``gmatrix describe``.

Exit status of ``run``: 0 when every check passes, 1 when a check fails
(the report is still written), 2 for an unreadable config, 3 when the
space cannot be built.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import algebra
from .errors import SpaceError
from .io import SUITES, ConfigError, load_config, validate_config
from .space import DiscreteSpace, check_conditions, default_deltas
from .suites import run_suite

log = logging.getLogger("gmatrix")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SPACE = 0, 1, 2, 3


def describe_space(space: DiscreteSpace, deltas=None) -> str:
    deltas = default_deltas() if deltas is None else deltas
    w = space.weights
    lines = [f"{space.size} nodes ({space.kind}, resolution {space.resolution})",
             f"weights min {w.min():.6g} max {w.max():.6g}",
             f"diameter {space.diameter:.6g}"]
    if algebra.has_unit(space):
        lines.append("unit exists")
    else:
        cond = check_conditions(space, deltas)
        mark = lambda ok: "✓" if ok else "✗"
        lines.append(f"C1 {mark(cond.c1)} C2 {mark(cond.c2)}")
    return "\n".join(lines)


def _run(args) -> int:
    try:
        cfg = load_config(args.config)
        if args.suite is not None:
            cfg.suite = args.suite
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        validate_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        space = cfg.space.build()
    except (SpaceError, ValueError) as exc:
        print(f"space error: {exc}", file=sys.stderr)
        return EXIT_SPACE

    start = time.perf_counter()
    report = run_suite(cfg.suite, space, cfg, seed=cfg.seed)
    report.meta.update({"seed": cfg.seed, "deltas": list(cfg.deltas)})
    # wall time goes to the log only, so reports stay byte-reproducible
    log.info("suite %s finished in %.2fs", cfg.suite, time.perf_counter() - start)

    text = report.to_json() + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    for c in report.failures():
        print(f"FAIL {c.name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _describe(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        space = cfg.space.build()
    except (SpaceError, ValueError) as exc:
        print(f"space error: {exc}", file=sys.stderr)
        return EXIT_SPACE
    print(describe_space(space, cfg.deltas))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmatrix", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a verification suite and write a JSON report")
    run.add_argument("--config", required=True)
    run.add_argument("--suite", choices=SUITES)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.set_defaults(func=_run)
    desc = sub.add_parser("describe", help="summarize the space described by a config")
    desc.add_argument("--config", required=True)
    desc.set_defaults(func=_describe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
