import logging

import numpy as np

from biotemplates.schema import CryptMaskTemplate
from core.commands import IrisCommand
from core.exceptions import ConfigError, ImageFormatError
from core.manifests import read_pairs
from crypts.emd import EmdConfig, emd_2d
from crypts.morphology import area_open, fill_holes
from evaluation.scores import ScoreRecord, write_scores_csv
from geometry.rasters import read_mask

logger = logging.getLogger(__name__)

METHOD_ID = 'CRYPTS'


def identity_subset(pairs, fraction, seed):
    """Pairs between identities of a seeded random share of all identities"""
    if fraction >= 1.0:
        return pairs
    if any('probe_identity' not in p or 'gallery_identity' not in p
           or not p['probe_identity'] or not p['gallery_identity']
           for p in pairs):
        raise ConfigError('a subset needs probe_identity and '
                          'gallery_identity columns')
    identities = sorted({p['probe_identity'] for p in pairs}
                        | {p['gallery_identity'] for p in pairs})
    count = max(1, int(round(fraction * len(identities))))
    rng = np.random.default_rng(seed)
    chosen = set(rng.choice(identities, size=count, replace=False).tolist())
    return [p for p in pairs if p['probe_identity'] in chosen
            and p['gallery_identity'] in chosen]


class Command(IrisCommand):
    """Score crypt-mask pairs with the 2D Earth Mover's Distance"""
    help = ('Matches the crypt masks of a pairs CSV (probe_id, probe_path, '
            'gallery_id, gallery_path, genuine) with EMD and writes a score '
            'CSV. Optional probe_identity/gallery_identity columns allow a '
            'seeded identity subset.')
    config_flags = ('subset_fraction', 'seed', 'emd_size_ratio_max',
                    'emd_min_overlap', 'connectivity')

    def add_command_arguments(self, parser):
        parser.add_argument('pairs', help='pairs CSV of crypt masks')
        parser.add_argument('--output', required=True,
                            help='score CSV to write')
        parser.add_argument('--subset-fraction', type=float,
                            dest='subset_fraction')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--size-ratio-max', type=float,
                            dest='emd_size_ratio_max')
        parser.add_argument('--min-overlap', type=float,
                            dest='emd_min_overlap')
        parser.add_argument('--min-area', type=int, default=1,
                            help='drop crypts smaller than this many pixels')
        parser.add_argument('--fill-holes', action='store_true')
        parser.add_argument('--connectivity', type=int, choices=(4, 8))

    def run(self, config, **options):
        pairs = read_pairs(self.require_file(options['pairs'], 'pairs CSV'))
        pairs = identity_subset(pairs, config.subset_fraction, config.seed)
        emd_config = EmdConfig(config.emd_size_ratio_max,
                               config.emd_min_overlap,
                               config.emd_max_iterations)
        cache = {}

        def crypts(path):
            if path not in cache:
                try:
                    mask = CryptMaskTemplate(read_mask(path).bits)
                except (OSError, ImageFormatError) as exc:
                    logger.warning('%s: no crypt mask (%s)', path, exc)
                    cache[path] = None
                    return None
                if options['fill_holes']:
                    mask = fill_holes(mask)
                if options['min_area'] > 1:
                    mask = area_open(mask, options['min_area'],
                                     config.connectivity)
                cache[path] = mask
            return cache[path]

        records = []
        for pair in pairs:
            probe, reference = crypts(pair['probe_path']), \
                crypts(pair['gallery_path'])
            score = None
            if probe is not None and reference is not None:
                score = emd_2d(probe, reference, emd_config)
            records.append(ScoreRecord(METHOD_ID, pair['probe_id'],
                                       pair['gallery_id'], pair['genuine'],
                                       score))
        write_scores_csv(options['output'], records)
        self.stdout.write(self.style.SUCCESS(
            f'Matched {len(records)} crypt-mask pairs'
        ))
