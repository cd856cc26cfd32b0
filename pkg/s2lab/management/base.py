import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from s2lab import config
from s2lab.exceptions import InputError, S2LabError
from s2lab.experiments import InstanceSpec
from s2lab.utils import read_text


class S2LabCommand(BaseCommand):
    """
    Base for the s2lab commands: subclasses implement `run(**options)` and any
    S2LabError becomes a CommandError carrying the error's exit code
    (2 for bad input, 3 for infeasible parameters).
    """

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except S2LabError as e:
            raise CommandError(str(e), returncode=e.exit_code)

    def run(self, **options):
        raise NotImplementedError

    def write_json(self, data):
        self.stdout.write(json.dumps(data, indent=2, default=str))


def add_instance_arguments(parser):
    parser.add_argument('--graph', help='Edge-list file')
    parser.add_argument('--labels', help='Label file for --graph')
    parser.add_argument('--spec', help='JSON instance spec file: {"family": ..., "params": {...}}')


def instance_spec_from_options(options) -> InstanceSpec:
    if options.get('spec'):
        return InstanceSpec.from_json(read_text(options['spec']))
    if options.get('graph') and options.get('labels'):
        return InstanceSpec('files', {'graph': options['graph'], 'labels': options['labels']})
    raise InputError('Give either --spec or both --graph and --labels')


def add_run_arguments(parser):
    parser.add_argument('--algorithm', choices=['s2', 'random', 'bisect'], default='s2')
    parser.add_argument('--budget', default=None, help='Logical query budget: N or auto (budget bound)')
    parser.add_argument('--gamma', type=float, default=0.0, help='Oracle flip probability')
    parser.add_argument('--epsilon', type=float, default=config.DEFAULT_EPSILON)
    parser.add_argument('--repetitions', type=int, default=None,
                        help='Raw queries per logical query (default: from gamma, n and epsilon)')
    parser.add_argument('--stop', choices=['budget', 'boundary', 'holdout'], default='budget')
    parser.add_argument('--holdout-threshold', type=float, default=0.05)
    parser.add_argument('--seed', type=int, default=config.DEFAULT_SEED)


def output_path(prefix, suffix):
    return str(Path(f"{prefix}{suffix}"))
