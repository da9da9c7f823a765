import json
from pathlib import Path

from core.commands import IrisCommand
from core.exceptions import ConfigError
from identify.gallery import Gallery, load_probes
from identify.search import SearchConfig, search_1n, write_candidates_csv
from identify.timing import EventKind, TimingLog, timing_report


class Command(IrisCommand):
    """Run 1:N searches of probe templates against a gallery"""
    help = ('Searches every probe of a probe manifest (probe_id, eye, '
            'template_path) against a gallery and writes candidate lists '
            '(probe_id, rank, identity_id, score).')
    config_flags = ('probes', 'gallery', 'matcher', 'candidate_list_length',
                    'max_shift', 'strategy', 'failure_policy', 'workers',
                    'sentinels')

    def add_command_arguments(self, parser):
        parser.add_argument('--probes', help='probe manifest CSV')
        parser.add_argument('--gallery', help='gallery directory')
        parser.add_argument('--output', required=True,
                            help='candidate list CSV to write')
        parser.add_argument('--timing', help='timing report JSON to write')
        parser.add_argument('--matcher',
                            choices=('hdbif', 'angular', 'euclidean',
                                     'crypts_emd'))
        parser.add_argument('--candidates', type=int,
                            dest='candidate_list_length')
        parser.add_argument('--max-shift', type=int, dest='max_shift')
        parser.add_argument('--strategy',
                            choices=('exhaustive', 'even_then_neighbors'))
        parser.add_argument('--failure-policy', dest='failure_policy',
                            choices=('propagate', 'sentinel'))
        parser.add_argument('--workers', type=int)
        parser.add_argument('--sentinels', help='sentinel table file')

    def run(self, config, **options):
        if config.probes is None or config.gallery is None:
            raise ConfigError('both --probes and --gallery are required')
        cfg = SearchConfig.from_run_config(config)
        probes = load_probes(config.probes)
        gallery = Gallery.load(config.gallery)

        log = TimingLog()
        results = []
        for probe_id in sorted(probes):
            with log.measure(EventKind.SEARCH, probe_id):
                result = search_1n(probes[probe_id], gallery, cfg)
            results.append((probe_id, result.candidates))
            for identity_id, reason in sorted(result.failures.items()):
                self.stderr.write(f'{probe_id} vs {identity_id}: {reason}')
        write_candidates_csv(options['output'], results)

        report = timing_report(log, config.template_budget,
                               config.search_budget)
        if options['timing']:
            Path(options['timing']).write_text(
                json.dumps(report.as_dict(), indent=2) + '\n')
        self.stdout.write(self.style.SUCCESS(
            f'Searched {len(results)} probes against {len(gallery)} '
            f'identities, {len(report.failures)} over budget'
        ))
