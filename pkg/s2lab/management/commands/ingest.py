from s2lab.exceptions import InputError
from s2lab.export_utils import export_edge_list, export_labels
from s2lab.generators import knn_graph, largest_component_ids, threshold_graph
from s2lab.graph_core import induced_subgraph
from s2lab.management.base import S2LabCommand, output_path
from s2lab.utils import read_features


class Command(S2LabCommand):
    help = 'Build a k-NN or distance-threshold graph from a CSV feature file'

    def add_arguments(self, parser):
        parser.add_argument('features', help='CSV file, one row of real features per item')
        parser.add_argument('--mode', choices=['knn', 'threshold'], default='knn')
        parser.add_argument('--k', type=int, default=10, help='Neighbors per item in knn mode')
        parser.add_argument('--t', type=float, default=0.5, help='Distance threshold in threshold mode')
        parser.add_argument('--largest', action='store_true', help='Keep only the largest connected component')
        parser.add_argument('--class-column', action='store_true', help='Last column holds integer classes')
        parser.add_argument('--positive-class', type=int, help='Class labeled +1; every other class is -1')
        parser.add_argument('--out', required=True, help='Output prefix; writes PREFIX.edges (and PREFIX.labels)')

    def run(self, **options):
        if options['positive_class'] is not None and not options['class_column']:
            raise InputError('--positive-class needs --class-column')
        features = read_features(options['features'], class_column=options['class_column'])
        if options['mode'] == 'knn':
            g = knn_graph(features, options['k'])
        else:
            g = threshold_graph(features, options['t'])
        ids = tuple(range(g.n))
        if options['largest']:
            g, ids = induced_subgraph(g, largest_component_ids(g))
        path = export_edge_list(g, output_path(options['out'], '.edges'))
        self.stdout.write(f"Built {options['mode']} graph: n={g.n}, edges={g.edge_count}; wrote {path}")
        if options['positive_class'] is not None:
            labeling = features.labeling(options['positive_class'], ids)
            path = export_labels(labeling, output_path(options['out'], '.labels'))
            self.stdout.write(f"Wrote {path}")
