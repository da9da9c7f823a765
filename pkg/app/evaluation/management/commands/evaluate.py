from pathlib import Path

from core.commands import IrisCommand
from core.exceptions import ConfigError
from evaluation.metrics import compute_metrics, read_rank_source
from evaluation.protocols import (
    protocol_discard, protocol_failure_as_nonmatch, protocol_intersection,
)
from evaluation.reports import dumps, metrics_to_dict, render_table
from evaluation.scores import by_method, read_scores_csv
from evaluation.sentinels import Orientation, load_sentinels


class Command(IrisCommand):
    """Compute verification and identification metrics from score files"""
    help = ('Applies a failure protocol (discard, nonmatch or intersection) '
            'to score CSVs and reports EER, AUC, d\', FNMR@FMR, Rank-k and '
            'FTE per method as JSON and as a text table.')
    config_flags = ('protocol', 'sentinels', 'fte_threshold')

    def add_command_arguments(self, parser):
        parser.add_argument('scores', nargs='+', help='score CSV files')
        parser.add_argument('--protocol',
                            choices=('discard', 'nonmatch', 'intersection'))
        parser.add_argument('--sentinels', help='sentinel table file')
        parser.add_argument('--fte-threshold', type=float,
                            dest='fte_threshold')
        parser.add_argument('--candidates',
                            help='candidate list CSV for Rank-k')
        parser.add_argument('--mates',
                            help='probe_id, identity_id CSV of true mates')
        parser.add_argument('--output', required=True,
                            help='metrics JSON to write')
        parser.add_argument('--table', help='text table to write')

    def run(self, config, **options):
        records = []
        for name in options['scores']:
            records += read_scores_csv(self.require_file(name, 'score CSV'))
        sentinels = load_sentinels(config.sentinels)
        rank_source = None
        if options['candidates'] or options['mates']:
            if not (options['candidates'] and options['mates']):
                raise ConfigError('--candidates and --mates go together')
            rank_source = read_rank_source(
                self.require_file(options['candidates'], 'candidate CSV'),
                self.require_file(options['mates'], 'mates CSV'),
            )

        grouped = by_method(records)
        orientations = {
            method_id: sentinels[method_id].orientation
            if method_id in sentinels else Orientation.DISSIMILARITY
            for method_id in grouped
        }
        excluded = {}
        if config.protocol == 'intersection':
            result = protocol_intersection(grouped, config.fte_threshold,
                                           orientations)
            score_sets, excluded = result.sets, result.excluded
        elif config.protocol == 'nonmatch':
            score_sets = {m: protocol_failure_as_nonmatch(r, sentinels)
                          for m, r in grouped.items()}
        else:
            score_sets = {m: protocol_discard(r, orientations[m])
                          for m, r in grouped.items()}

        reports = {
            method_id: compute_metrics(score_set, config.fmr_targets,
                                       rank_source, config.ranks)
            for method_id, score_set in sorted(score_sets.items())
        }
        Path(options['output']).write_text(dumps({
            'protocol': config.protocol,
            'methods': {m: metrics_to_dict(r) for m, r in reports.items()},
            'excluded': excluded,
        }))
        table = render_table(reports) if reports else ''
        if options['table']:
            Path(options['table']).write_text(table)
        self.stdout.write(table)
        self.stdout.write(self.style.SUCCESS(
            f'Evaluated {len(reports)} methods under {config.protocol}'
        ))
