"""Command line front end: ``riesz-lab <task> [flags]``.

Every task subcommand takes the same flags.  ``--config FILE`` loads a JSON
config first; flags given on the command line then replace the matching
keys (flags win).  ``riesz-lab run --config FILE`` takes the task from the
file, and ``riesz-lab schema`` prints the config JSON schema.

Lambda and gamma grids are written either as a comma list (``10,100,1000``)
or as a range ``min:max:points[:log|linear]``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import TASKS, ExperimentConfig, load, schema_json
from .errors import InvalidArgument, RieszLabError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _grid(text, name):
    """'a,b,c' -> [a, b, c];  'lo:hi:n[:spacing]' -> range dict."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4):
                raise ValueError
            spec = {"min": float(parts[0]), "max": float(parts[1]), "points": int(parts[2])}
            if len(parts) == 4:
                spec["spacing"] = parts[3]
            return spec
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise InvalidArgument(f"malformed {name} grid {text!r}") from None


def _add_flags(p):
    p.add_argument("--config", metavar="FILE", help="JSON config; flags override its keys")
    p.add_argument("--domain", help="domain descriptor, e.g. box:1,1 or ball:1@2")
    p.add_argument("--family", help="family descriptor, e.g. box2d_aspect:1,6+ball")
    p.add_argument("--candidate", dest="candidates", action="append", metavar="DOMAIN",
                   help="trial-union base body (repeatable)")
    p.add_argument("--base-lambda", dest="base_lambda", metavar="LIST", help="base lambdas for trial unions")
    p.add_argument("--bc", help="dirichlet or neumann")
    p.add_argument("--gamma", type=float, help="Riesz exponent")
    p.add_argument("--gamma-grid", dest="gamma_grid", metavar="GRID", help="gamma grid (critical task)")
    p.add_argument("--lambda", dest="lambda_", metavar="GRID", help="lambda list or range")
    p.add_argument("--grid", type=int, help="parameter grid points per family coordinate")
    p.add_argument("--tol", type=float, help="optimizer parameter tolerance")
    p.add_argument("--alpha", type=float, help="remainder decay exponent (weyl task)")
    p.add_argument("--out", help="output prefix; writes PREFIX.csv and PREFIX.json")
    p.add_argument("--budget", type=int, help="cap on enumerated eigenvalues")
    p.add_argument("--threads", type=int, help="worker threads (default: RIESZ_LAB_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riesz-lab", description="Riesz means of Laplace eigenvalues: experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for task in TASKS + ("run",):
        _add_flags(sub.add_parser(task, help="run a config file" if task == "run" else f"{task} task"))
    sub.add_parser("schema", help="print the config JSON schema")
    return parser


def cli_parse(argv) -> ExperimentConfig:
    """Turn an argument vector into a validated config."""
    args = build_parser().parse_args(list(argv))
    if args.command == "schema":
        raise InvalidArgument("'schema' does not describe an experiment")
    raw = load(args.config) if args.config else {}
    if args.command != "run":
        raw["task"] = args.command
    elif "task" not in raw:
        raise InvalidArgument("'run' needs --config with a task key")
    flags = {
        "domain": args.domain,
        "family": args.family,
        "candidates": args.candidates,
        "base_lambda": None if args.base_lambda is None else _grid(args.base_lambda, "base lambda"),
        "bc": None if args.bc is None else args.bc.lower(),
        "gamma": args.gamma,
        "gamma_grid": None if args.gamma_grid is None else _grid(args.gamma_grid, "gamma"),
        "lambda": None if args.lambda_ is None else _grid(args.lambda_, "lambda"),
        "grid": args.grid,
        "tol": args.tol,
        "alpha": args.alpha,
        "out": args.out,
        "budget": args.budget,
        "threads": args.threads,
    }
    if isinstance(flags["base_lambda"], dict):
        raise InvalidArgument("--base-lambda takes a comma list")
    if flags["bc"] in ("d", "n"):
        flags["bc"] = {"d": "dirichlet", "n": "neumann"}[flags["bc"]]
    raw.update({k: v for k, v in flags.items() if v is not None})
    return ExperimentConfig.from_dict(raw)


def _num(x):
    return repr(float(x))


def _render_grid(v):
    if isinstance(v, list):
        return ",".join(_num(x) for x in v)
    return f"{_num(v['min'])}:{_num(v['max'])}:{v['points']}:{v['spacing']}"


def render(config) -> list:
    """Argument vector that :func:`cli_parse` maps back to ``config``."""
    cfg = config.data if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config).data
    argv = [cfg["task"]]
    for key in ("domain", "family", "bc", "out"):
        if key in cfg:
            argv += [f"--{key}", cfg[key]]
    for c in cfg.get("candidates", ()):
        argv += ["--candidate", c]
    if "base_lambda" in cfg:
        argv += ["--base-lambda", _render_grid(cfg["base_lambda"])]
    for key in ("gamma", "tol", "alpha"):
        if key in cfg:
            argv += [f"--{key}", _num(cfg[key])]
    for key in ("grid", "budget", "threads"):
        if key in cfg:
            argv += [f"--{key}", str(cfg[key])]
    if "lambda" in cfg:
        argv += ["--lambda", _render_grid(cfg["lambda"])]
    if "gamma_grid" in cfg:
        argv += ["--gamma-grid", _render_grid(cfg["gamma_grid"])]
    return argv


def main(argv=None) -> int:
    from .runner import run

    argv = sys.argv[1:] if argv is None else list(argv)
    if argv[:1] == ["schema"]:
        sys.stdout.write(schema_json())
        return 0
    try:
        config = cli_parse(argv)
        report = run(config)
    except RieszLabError as exc:
        print(f"riesz-lab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if not config.get("out"):
        sys.stdout.write(report.json_text())
    else:
        print(json.dumps({"csv": f"{config['out']}.csv", "json": f"{config['out']}.json"}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
