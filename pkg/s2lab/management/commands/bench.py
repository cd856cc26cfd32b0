from s2lab import config
from s2lab.experiments import ExperimentConfig, bench
from s2lab.management.base import (
    S2LabCommand,
    add_instance_arguments,
    add_run_arguments,
    instance_spec_from_options,
    output_path,
)
from s2lab.models import BenchRecord


class Command(S2LabCommand):
    help = 'Benchmark a strategy over seeded trials: dC-query complexity, queries used and cut recovery'

    def add_arguments(self, parser):
        add_instance_arguments(parser)
        add_run_arguments(parser)
        parser.add_argument('--trials', type=int, default=10)
        parser.add_argument('--jobs', type=int, default=config.DEFAULT_JOBS, help='Parallel trial workers')
        parser.add_argument('--no-timing', action='store_true', help='Write ms_elapsed as 0 for byte-stable output')
        parser.add_argument('--out', help='Output prefix; writes PREFIX.csv and PREFIX.json')
        parser.add_argument('--record', action='store_true', help='Store the aggregate as a BenchRecord')

    def run(self, **options):
        out = options.get('out')
        cfg = ExperimentConfig(
            instance=instance_spec_from_options(options),
            algorithm=options['algorithm'],
            gamma=options['gamma'],
            epsilon=options['epsilon'],
            budget=options['budget'],
            stop=options['stop'],
            holdout_threshold=options['holdout_threshold'],
            repetitions=options['repetitions'],
            trials=options['trials'],
            base_seed=options['seed'],
            jobs=options['jobs'],
            timing=not options['no_timing'],
            csv_path=output_path(out, '.csv') if out else None,
            json_path=output_path(out, '.json') if out else None,
        )
        report = bench(cfg)
        if options['record']:
            record = BenchRecord.from_report(report)
            record.save()
            self.stdout.write(f"Stored bench record {record.pk}")
        self.write_json(report.to_dict())
