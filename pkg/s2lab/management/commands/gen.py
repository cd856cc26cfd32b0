import json

from s2lab.complexity import summarize
from s2lab.experiments import InstanceSpec
from s2lab.export_utils import export_edge_list, export_labels
from s2lab.management.base import S2LabCommand, output_path
from s2lab.utils import read_text

# option name -> instance parameter name
PARAMETERS = {
    'rows': 'rows', 'cols': 'cols', 'split_col': 'split_col',
    'side': 'side', 'core_side': 'core_side', 'dither_prob': 'dither_prob', 'instance_seed': 'seed',
    'w': 'w', 'd': 'd', 'lower': 'lower', 'upper': 'upper', 'margin': 'margin',
    'r': 'r', 'k': 'k', 'p': 'p', 'n': 'n', 'm': 'm',
}


class Command(S2LabCommand):
    help = 'Generate a graph and ground-truth labeling (grid, dithered, lattice or chain) as edge-list and label files'

    def add_arguments(self, parser):
        parser.add_argument('family', nargs='?', choices=['grid', 'dithered', 'lattice', 'chain'])
        parser.add_argument('--spec', help='JSON instance spec file instead of flags')
        parser.add_argument('--out', required=True, help='Output prefix; writes PREFIX.edges and PREFIX.labels')
        grid = parser.add_argument_group('grid')
        grid.add_argument('--rows', type=int)
        grid.add_argument('--cols', type=int)
        grid.add_argument('--split-col', type=int)
        dithered = parser.add_argument_group('dithered')
        dithered.add_argument('--side', type=int)
        dithered.add_argument('--core-side', type=int)
        dithered.add_argument('--dither-prob', type=float)
        dithered.add_argument('--instance-seed', type=int, help='Seed of randomized generators')
        lattice = parser.add_argument_group('lattice')
        lattice.add_argument('--w', type=int)
        lattice.add_argument('--d', type=int)
        lattice.add_argument('--lower', type=float, nargs='+')
        lattice.add_argument('--upper', type=float, nargs='+')
        lattice.add_argument('--margin', type=float)
        chain = parser.add_argument_group('chain')
        chain.add_argument('--r', type=int)
        chain.add_argument('--k', type=int)
        chain.add_argument('--p', type=int)
        chain.add_argument('--n', type=int)
        chain.add_argument('--m', type=int)

    def run(self, **options):
        if options.get('spec'):
            spec = InstanceSpec.from_json(read_text(options['spec']))
        else:
            params = {
                name: options[option]
                for option, name in PARAMETERS.items()
                if options.get(option) is not None
            }
            spec = InstanceSpec(options.get('family') or 'grid', params)
        instance = spec.build()
        edges = export_edge_list(instance.graph, output_path(options['out'], '.edges'))
        labels = export_labels(instance.truth, output_path(options['out'], '.labels'))
        self.stdout.write(f"Generated {instance.description}: n={instance.graph.n}, edges={instance.graph.edge_count}")
        self.stdout.write(f"Wrote {edges} and {labels}")
        self.stdout.write(json.dumps(summarize(instance.graph, instance.truth).to_dict()))
