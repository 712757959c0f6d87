"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

Command line entry point:

    evotrain run <config> [--seed N] [--runs N] [--threads N] [--fast] [-o DIR]
    evotrain aggregate <csv>... [-o PATH]
    evotrain plotdata <csv>... -o PATH
    evotrain validate <config | netspec | genome>
    evotrain params <netspec | architecture>

"""

import argparse
import logging
import sys
from pathlib import Path

import yaml

from .version import __version__
from .architectures import COUNT_DISCREPANCY_NOTE, architectures, get_architecture, published_param_counts
from .bench import aggregate, emit_plotdata, load_experiment_network, run_experiment
from .config import SECTIONS, config_from_document
from .errors import ConfigError, DataError, EvotrainError, ShapeError
from .network import count_params
from .netspec import network_from_document
from .record import frame_to_csv_text, read_records_csv, records_to_frame, write_frame_csv
from .topo import genome_from_document, validate_genome

log = logging.getLogger("evotrain.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_SOLVER = 4


def _read_document(path):
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from None


def _is_experiment(doc):
    # genome documents carry a 'training' block next to their layers
    return isinstance(doc, dict) and 'layers' not in doc and bool(set(doc) & set(SECTIONS))


def _load_records(paths):
    for path in paths:
        if not Path(path).is_file():
            raise DataError(f"record file not found: {path}")
    try:
        return read_records_csv(paths)
    except (ValueError, KeyError) as exc:
        raise DataError(f"cannot read records: {exc}") from None


def cmd_run(args):
    path = Path(args.config)
    config = config_from_document(_read_document(path), path.parent)
    config = config.with_overrides(seed=args.seed, runs=args.runs, threads=args.threads,
        fast=True if args.fast else None)
    records = run_experiment(config, threads=args.threads, output_dir=args.output)
    print(f"{len(records)} records from {len({(r.solver, r.schedule, r.run_id) for r in records})} runs")
    return EXIT_OK


def cmd_aggregate(args):
    summary = aggregate(_load_records(args.records))
    if args.output:
        write_frame_csv(summary, args.output, kind="summary")
    else:
        sys.stdout.write(frame_to_csv_text(summary, kind="summary"))
    return EXIT_OK


def cmd_plotdata(args):
    records = _load_records(args.records)
    emit_plotdata(records_to_frame(records), args.output)
    return EXIT_OK


def _describe_network(network):
    shapes = network.check()
    print(f"{network!r}")
    print(f"output shape {list(shapes[-1])}, {count_params(network)} trainable parameters")


def cmd_validate(args):
    path = Path(args.target)
    doc = _read_document(path)

    if _is_experiment(doc):
        config = config_from_document(doc, path.parent).validate()
        if config.network.spec is not None or config.network.architecture is not None:
            _describe_network(load_experiment_network(config.network))
        print(f"{config.kind.value} experiment: {config.experiment.runs} runs from seed "
            f"{config.experiment.base_seed}, ok")
        return EXIT_OK

    if isinstance(doc, dict) and 'training' in doc:
        genome, input_shape = genome_from_document(doc)
        num_classes = genome.layers[-1].units if genome.layers else 0
        violations = validate_genome(genome, input_shape, num_classes)
        if violations:
            raise ConfigError(f"invalid genome: {'; '.join(violations)}")
        _describe_network(genome.network(input_shape))
        print("genome ok")
        return EXIT_OK

    _describe_network(network_from_document(doc))
    print("network ok")
    return EXIT_OK


def cmd_params(args):
    target = args.target
    if Path(target).is_file():
        network = network_from_document(_read_document(target))
        name = Path(target).stem.lower()
    else:
        try:
            network = get_architecture(target)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        name = target.lower().replace('-', '').replace('_', '')
    network.check()
    print(count_params(network))
    if name == 'cifar10g':
        print(f"note: {COUNT_DISCREPANCY_NOTE} (published {published_param_counts[name]})")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="evotrain",
        description="Gradient and metaheuristic CNN training, layer schedules and topology search.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="more log output (repeatable)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('run', help="run an experiment config")
    p.add_argument('config', help="experiment YAML file")
    p.add_argument('--seed', type=int, help="override experiment.base_seed")
    p.add_argument('--runs', type=int, help="override experiment.runs")
    p.add_argument('--threads', type=int, help="worker cap (1 is bit-deterministic)")
    p.add_argument('--fast', action='store_true', help="cap topology search training epochs")
    p.add_argument('-o', '--output', help="output directory (default experiment.output_dir)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser('aggregate', help="summary table of final-epoch metrics")
    p.add_argument('records', nargs='+', help="record CSV files")
    p.add_argument('-o', '--output', help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser('plotdata', help="per-epoch mean and std series")
    p.add_argument('records', nargs='+', help="record CSV files")
    p.add_argument('-o', '--output', required=True, help="output CSV")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser('validate', help="dry-run checks of a config, network or genome document")
    p.add_argument('target')
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('params', help="trainable parameter count")
    p.add_argument('target', help=f"network spec file or one of {sorted(architectures)}")
    p.set_defaults(func=cmd_params)

    return parser


def exit_code(exc):
    # a network that does not compile is a configuration problem
    if isinstance(exc, (ConfigError, ShapeError)):
        return EXIT_CONFIG
    if isinstance(exc, DataError):
        return EXIT_DATA
    return EXIT_SOLVER


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s")
    log.debug("evotrain version %s: %s", __version__, args.command)

    try:
        return args.func(args)
    except EvotrainError as exc:
        message = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"evotrain: error: {type(exc).__name__}: {message}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
