"""Command-line experiment driver.

    curvedflow run <experiment> [--config FILE] [--out DIR] [--full]
                   [--key value ...]
    curvedflow list

Flag grammar: every --key value pair must match a config key of the chosen
experiment (unknown keys are rejected).  Precedence: defaults < config file
< command line.  The config file holds one `key = value` per line with `#`
comments.  The default output directory is $CURVEDFLOW_OUTPUT_DIR or
./outputs, with one subdirectory per experiment.  Exit status: 0 on
success, 2 on configuration errors, 3 on numerical blow-up (the last good
snapshot and manifest are preserved).
"""

import argparse
import os
import sys

from . import experiments, fields_io
from .torus_solver import BlowUpError

ENV_OUTPUT_DIR = "CURVEDFLOW_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def _coerce(raw, like):
    if isinstance(like, bool):
        if str(raw).lower() in ("1", "true", "yes", "on"):
            return True
        if str(raw).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(like, int) and not isinstance(like, bool):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return str(raw)


def load_config_file(path):
    pairs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in body.split("=", 1))
            pairs[key] = val
    return pairs


def resolve_config(experiment, file_pairs=None, cli_pairs=None, full=False):
    """Validated config dict for the experiment (unknown keys rejected)."""
    if experiment not in experiments.EXPERIMENTS:
        known = ", ".join(sorted(experiments.EXPERIMENTS))
        raise ConfigError(f"unknown experiment {experiment!r} (known: {known})")
    defaults, _ = experiments.EXPERIMENTS[experiment]
    cfg = dict(defaults)
    if full:
        cfg.update(experiments.FULL_SCALE.get(experiment, {}))
    for source in (file_pairs or {}), (cli_pairs or {}):
        for key, raw in source.items():
            if key not in defaults:
                raise ConfigError(
                    f"unknown config key {key!r} for {experiment} "
                    f"(known: {', '.join(sorted(defaults))})"
                )
            cfg[key] = _coerce(raw, defaults[key])
    return cfg


def run_experiment(experiment, cfg, outdir):
    """Execute one experiment and write its manifest; returns manifest path."""
    os.makedirs(outdir, exist_ok=True)
    _, runner = experiments.EXPERIMENTS[experiment]
    files = runner(cfg, outdir)
    return fields_io.write_manifest(outdir, experiment, cfg, files)


def _parse_pairs(tokens):
    pairs = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"expected --key, got {tok!r}")
        key = tok[2:].replace("-", "_")
        try:
            pairs[key] = next(it)
        except StopIteration:
            raise ConfigError(f"flag --{key} is missing a value") from None
    return pairs


def main(argv=None):
    parser = argparse.ArgumentParser(prog="curvedflow", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser("run", help="run one experiment")
    runp.add_argument("experiment")
    runp.add_argument("--config", default=None, help="key = value config file")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--full", action="store_true", help="paper-scale settings")
    sub.add_parser("list", help="list experiments and their defaults")

    args, extra = parser.parse_known_args(argv)
    if args.command == "list":
        for name, (defaults, _) in sorted(experiments.EXPERIMENTS.items()):
            print(name)
            for key, val in sorted(defaults.items()):
                print(f"  {key} = {val}")
        return 0
    if args.command != "run":
        parser.print_help()
        return 2

    try:
        file_pairs = load_config_file(args.config) if args.config else {}
        cli_pairs = _parse_pairs(extra)
        cfg = resolve_config(args.experiment, file_pairs, cli_pairs, full=args.full)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    base = args.out or os.environ.get(ENV_OUTPUT_DIR) or "outputs"
    outdir = os.path.join(base, args.experiment)
    try:
        manifest = run_experiment(args.experiment, cfg, outdir)
    except BlowUpError as exc:
        print(f"error: numerical blow-up: {exc}", file=sys.stderr)
        return 3
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
