import logging

from biotemplates.codec import read_template
from core.commands import IrisCommand
from core.exceptions import (
    Corrupt, InsufficientOverlap, NoComparablePair, NotATemplate,
)
from core.manifests import read_pairs
from evaluation.scores import ScoreRecord, write_scores_csv
from identify.matchers import get_matcher
from identify.search import SearchConfig

logger = logging.getLogger(__name__)

COMPARISON_FAILURES = (InsufficientOverlap, NoComparablePair)
TEMPLATE_FAILURES = (OSError, NotATemplate, Corrupt)


class Command(IrisCommand):
    """Score listed template pairs one to one"""
    help = ('Compares the template pairs of a pairs CSV (probe_id, '
            'probe_path, gallery_id, gallery_path, genuine) and writes a '
            'score CSV; unreadable templates and failed comparisons score '
            'FAIL.')
    config_flags = ('matcher', 'max_shift', 'strategy')

    def add_command_arguments(self, parser):
        parser.add_argument('pairs', help='pairs CSV')
        parser.add_argument('--output', required=True,
                            help='score CSV to write')
        parser.add_argument('--matcher',
                            choices=('hdbif', 'angular', 'euclidean',
                                     'crypts_emd'))
        parser.add_argument('--max-shift', type=int, dest='max_shift')
        parser.add_argument('--strategy',
                            choices=('exhaustive', 'even_then_neighbors'))

    def run(self, config, **options):
        cfg = SearchConfig.from_run_config(config)
        matcher = get_matcher(cfg.matcher)
        cache = {}

        def template(path):
            if path not in cache:
                try:
                    cache[path] = matcher.check(read_template(path).payload)
                except TEMPLATE_FAILURES as exc:
                    logger.warning('%s: no template (%s)', path, exc)
                    cache[path] = None
            return cache[path]

        records = []
        for pair in read_pairs(self.require_file(options['pairs'],
                                                 'pairs CSV')):
            probe, reference = template(pair['probe_path']), \
                template(pair['gallery_path'])
            score = None
            if probe is not None and reference is not None:
                try:
                    score = matcher.compare(probe, reference, cfg)
                except COMPARISON_FAILURES as exc:
                    logger.info('%s vs %s failed: %s', pair['probe_id'],
                                pair['gallery_id'], exc)
            records.append(ScoreRecord(matcher.method_id, pair['probe_id'],
                                       pair['gallery_id'], pair['genuine'],
                                       score))
        write_scores_csv(options['output'], records)
        failed = sum(1 for r in records if r.failed)
        self.stdout.write(self.style.SUCCESS(
            f'Scored {len(records)} pairs, {failed} failed'
        ))
