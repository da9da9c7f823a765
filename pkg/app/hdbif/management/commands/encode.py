import json
from pathlib import Path

import numpy as np

from biotemplates.codec import write_template
from biotemplates.schema import EyeLabel, Template
from core.commands import IrisCommand
from core.exceptions import ConfigError, InvalidTemplate
from geometry.normalization import NormalizedIris
from geometry.rasters import read_gray, read_mask
from hdbif.encoding import encode
from hdbif.filters import default_filter_bank, load_filter_bank
from identify.timing import EventKind, TimingLog, timing_report

POLAR_MASK_SUFFIX = '.mask.pgm'


def polar_inputs(names):
    """Polar images to encode, each with its ``.mask.pgm`` if present"""
    for name in names:
        path = Path(name)
        if path.name.endswith(POLAR_MASK_SUFFIX):
            continue
        mask = path.with_name(path.stem + POLAR_MASK_SUFFIX)
        yield path, mask if mask.is_file() else None


class Command(IrisCommand):
    """Encode polar iris images into binary-code templates"""
    help = ('Encodes normalized polar images into HDBIF binary-code '
            'templates (<id>.irxt); masks named <id>.mask.pgm are picked '
            'up automatically.')
    config_flags = ('filter_bank', 'seed')

    def add_command_arguments(self, parser):
        parser.add_argument('images', nargs='+', help='polar images (PGM)')
        parser.add_argument('--output-dir', required=True)
        parser.add_argument('--filter-bank', dest='filter_bank',
                            help='HDBIF-FILTERS file; default is a seeded '
                                 'random bank')
        parser.add_argument('--seed', type=int,
                            help='seed of the default filter bank')
        parser.add_argument('--eye', default='U',
                            help='eye label stored in the templates')
        parser.add_argument('--timing', help='template timing report JSON')

    def run(self, config, **options):
        try:
            eye = EyeLabel.parse(options['eye'])
        except InvalidTemplate as exc:
            raise ConfigError(str(exc)) from exc
        if config.filter_bank is not None:
            bank = load_filter_bank(config.filter_bank)
        else:
            bank = default_filter_bank(config.filter_count,
                                       config.filter_size, config.seed)
        output = self.output_dir(options['output_dir'])
        log = TimingLog()
        count = 0
        for path, mask_path in polar_inputs(options['images']):
            self.require_file(path, 'polar image')
            with log.measure(EventKind.TEMPLATE, path.stem):
                pixels = read_gray(path).pixels
                mask = read_mask(mask_path).bits if mask_path \
                    else np.ones(pixels.shape, dtype=bool)
                code = encode(NormalizedIris(pixels, mask), bank)
                write_template(Template(eye, code),
                               output / f'{path.stem}.irxt')
            count += 1

        report = timing_report(log, template_budget=config.template_budget)
        if options['timing']:
            Path(options['timing']).write_text(
                json.dumps(report.as_dict(), indent=2) + '\n')
        self.stdout.write(self.style.SUCCESS(
            f'Encoded {count} templates, {len(report.failures)} over budget'
        ))
