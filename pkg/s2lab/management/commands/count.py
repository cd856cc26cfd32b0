from s2lab.exceptions import InputError
from s2lab.experiments import chain_family_count, count_grid_cuts
from s2lab.management.base import S2LabCommand


class Command(S2LabCommand):
    help = 'Enumeration counts behind the lower bounds: grid cuts or the chained block labeling family'

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=['grid-cuts', 'chain-family'])
        parser.add_argument('--r', type=int, required=True, help='Grid side, or paths per block')
        parser.add_argument('--max-cut', type=int, help='Largest cut size counted (default r)')
        parser.add_argument('--k', type=int, help='Odd path length parameter of the chain family')
        parser.add_argument('--p', type=int, help='Blocks in the chain')
        parser.add_argument('--m', type=int, default=1, help='Blocks carrying cuts')

    def run(self, **options):
        r = options['r']
        if options['kind'] == 'grid-cuts':
            max_cut = options['max_cut'] if options['max_cut'] is not None else r
            self.write_json({'r': r, 'max_cut': max_cut, 'count': count_grid_cuts(r, max_cut), 'lower_bound': 2 ** r})
            return
        if options['k'] is None or options['p'] is None:
            raise InputError('chain-family needs --k and --p')
        count = chain_family_count(r, options['k'], options['p'], options['m'])
        self.write_json({'r': r, 'k': options['k'], 'p': options['p'], 'm': options['m'], **count._asdict()})
