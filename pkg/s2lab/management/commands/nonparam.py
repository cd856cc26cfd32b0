from s2lab import config
from s2lab.experiments import loglog_slope, nonparam_budget, nonparam_experiment
from s2lab.export_utils import export_to_csv
from s2lab.generators import GeometricTruth
from s2lab.management.base import S2LabCommand


class Command(S2LabCommand):
    help = 'Excess risk of noise tolerant S2 on lattices against sample budget, or the sample budget formula itself'

    def add_arguments(self, parser):
        parser.add_argument('--d', type=int, default=2)
        parser.add_argument('--gamma', type=float, default=0.25, help='Label margin of the geometric oracle')
        parser.add_argument('--lower', type=float, nargs='+', help='Lower corner of the +1 box')
        parser.add_argument('--upper', type=float, nargs='+', help='Upper corner of the +1 box')
        parser.add_argument('--budgets', type=int, nargs='+', default=[2000, 20000, 200000])
        parser.add_argument('--trials', type=int, default=1)
        parser.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
        parser.add_argument('--c1', type=float, default=1.0)
        parser.add_argument('--all-w', action='store_true', help='Allow even lattice sides')
        parser.add_argument('--out', help='CSV file for the (budget, w, repetitions, queries, excess_risk) rows')
        formula = parser.add_argument_group('budget formula only')
        formula.add_argument('--w', type=int, help='Evaluate the sample budget for this lattice side and exit')
        formula.add_argument('--k', type=int, default=2)
        formula.add_argument('--beta', type=float, default=0.25)
        formula.add_argument('--flip', type=float, default=0.25, help='Label flip rate for the formula')
        formula.add_argument('--epsilon', type=float, help='Failure probability (default 1/w)')

    def run(self, **options):
        d = options['d']
        if options.get('w') is not None:
            value = nonparam_budget(options['w'], d, options['c1'], options['k'], options['beta'],
                                    options['flip'], options.get('epsilon'))
            self.write_json({'w': options['w'], 'd': d, 'samples': value})
            return
        truth = GeometricTruth(
            d=d,
            lower=tuple(options['lower'] or [0.0] * d),
            upper=tuple(options['upper'] or [0.5] + [1.0] * (d - 1)),
            margin=options['gamma'],
        )
        points = nonparam_experiment(d, options['gamma'], truth, options['budgets'], options['seed'],
                                     trials=options['trials'], c1=options['c1'], odd_lattice=not options['all_w'])
        if options.get('out'):
            export_to_csv(list(points[0]._fields), (list(p) for p in points), options['out'])
        data = {'points': [p._asdict() for p in points]}
        if len(points) > 1 and all(p.excess_risk > 0 for p in points):
            data['loglog_slope'] = loglog_slope(points)
        self.write_json(data)
