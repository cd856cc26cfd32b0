from s2lab import config
from s2lab.complexity import summarize
from s2lab.export_utils import export_to_json
from s2lab.management.base import S2LabCommand, add_instance_arguments, instance_spec_from_options


class Command(S2LabCommand):
    help = 'Compute the complexity summary (|C|, |dC|, m, kappa*, beta, k) of a graph and labeling'

    def add_arguments(self, parser):
        add_instance_arguments(parser)
        parser.add_argument('--epsilon', type=float, default=config.DEFAULT_EPSILON,
                            help='Failure probability for the reported budget bound')
        parser.add_argument('--kappa', type=int, help='Assumed clusteredness for the budget bound (default kappa*)')
        parser.add_argument('--out', help='Write the summary JSON to this file')

    def run(self, **options):
        instance = instance_spec_from_options(options).build()
        summary = summarize(instance.graph, instance.truth)
        data = summary.to_dict()
        data['budget_bound'] = summary.budget(options['epsilon'], options.get('kappa'))
        data['epsilon'] = options['epsilon']
        if options.get('out'):
            export_to_json(data, options['out'])
        self.write_json(data)
