from pathlib import Path

from core.commands import IrisCommand
from evaluation.parity import emit_delta_histogram, parity
from evaluation.reports import dumps, parity_to_dict
from evaluation.scores import read_scores_csv


class Command(IrisCommand):
    """Compare two implementations' scores on the same pairs"""
    help = ('Reports MAD, max |delta| and R^2 (B as reference) for genuine '
            'and imposter pairs of two score CSVs, plus a histogram of '
            'A - B.')
    config_flags = ('histogram_bins',)

    def add_command_arguments(self, parser):
        parser.add_argument('scores_a', help='score CSV under test')
        parser.add_argument('scores_b', help='reference score CSV')
        parser.add_argument('--output', required=True,
                            help='parity JSON to write')
        parser.add_argument('--histogram', help='delta histogram CSV')
        parser.add_argument('--bins', type=int, dest='histogram_bins')

    def run(self, config, **options):
        a = read_scores_csv(self.require_file(options['scores_a'],
                                              'score CSV'))
        b = read_scores_csv(self.require_file(options['scores_b'],
                                              'score CSV'))
        report = parity(a, b)
        histogram = emit_delta_histogram(a, b, config.histogram_bins)
        Path(options['output']).write_text(dumps({
            'parity': parity_to_dict(report),
            'histogram': histogram.as_dict(),
        }))
        if options['histogram']:
            histogram.write_csv(options['histogram'])
        self.stdout.write(self.style.SUCCESS(
            f'Compared {report.matched} pairs '
            f'({report.only_a} only in A, {report.only_b} only in B)'
        ))
