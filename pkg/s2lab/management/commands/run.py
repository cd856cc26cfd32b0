from s2lab.complexity import summarize
from s2lab.engine import run
from s2lab.experiments import ExperimentConfig
from s2lab.export_utils import export_run_log, export_to_json, format_run_log
from s2lab.management.base import (
    S2LabCommand,
    add_instance_arguments,
    add_run_arguments,
    instance_spec_from_options,
    output_path,
)
from s2lab.oracle import NoisyOracle


class Command(S2LabCommand):
    help = 'Run one active learning strategy on an instance and emit its query log'

    def add_arguments(self, parser):
        add_instance_arguments(parser)
        add_run_arguments(parser)
        parser.add_argument('--oracle-seed', type=int, help='Oracle seed (default: --seed)')
        parser.add_argument('--out', help='Output prefix; writes PREFIX.log and PREFIX.json')

    def run(self, **options):
        cfg = ExperimentConfig(
            instance=instance_spec_from_options(options),
            algorithm=options['algorithm'],
            gamma=options['gamma'],
            epsilon=options['epsilon'],
            budget=options['budget'],
            stop=options['stop'],
            holdout_threshold=options['holdout_threshold'],
            repetitions=options['repetitions'],
            base_seed=options['seed'],
        )
        instance = cfg.instance.build()
        summary = summarize(instance.graph, instance.truth)
        budget = cfg.resolve_budget(instance, summary)
        oracle_seed = options['oracle_seed'] if options.get('oracle_seed') is not None else options['seed']
        result = run(
            cfg.algorithm,
            instance.graph,
            NoisyOracle(instance.truth, cfg.gamma, oracle_seed),
            cfg.stopping_rule(budget, summary),
            seed=options['seed'],
            truth=instance.truth,
            repetitions=cfg.resolve_repetitions(instance.graph.n),
        )
        data = result.summary()
        if options.get('out'):
            export_run_log(result, output_path(options['out'], '.log'))
            export_to_json(data, output_path(options['out'], '.json'))
        else:
            self.stdout.write(format_run_log(result), ending='')
        self.write_json(data)
