from pathlib import Path

from django.conf import settings

from core.commands import IrisCommand
from core.exceptions import EmptyMask
from geometry.circles import write_circles_csv
from geometry.hough import fit_circles_hough
from geometry.preprocessing import preprocess_mask
from geometry.rasters import read_mask


class Command(IrisCommand):
    """Fit pupil and iris circles to segmentation masks"""
    help = ('Fits pupil and iris circles to binary segmentation masks and '
            'writes them, in each mask\'s own pixel frame, to a circles CSV.')

    def add_command_arguments(self, parser):
        parser.add_argument('masks', nargs='+', help='mask images (PGM/PNG)')
        parser.add_argument('--output', required=True,
                            help='circles CSV to write')

    def run(self, config, **options):
        width, height = settings.IRIS_SEGMENTATION_SIZE
        circles = {}
        for name in options['masks']:
            path = self.require_file(name, 'mask')
            mask, transform = preprocess_mask(read_mask(path), width, height)
            try:
                fit = fit_circles_hough(mask)
            except EmptyMask:
                self.stderr.write(f'{path.name}: empty mask, skipped')
                continue
            if fit.degenerate:
                self.stdout.write(f'{path.name}: no pupil boundary, '
                                  f'using the fallback pupil')
            circles[path.stem] = transform.to_source(fit.params)
        write_circles_csv(circles, Path(options['output']))
        self.stdout.write(self.style.SUCCESS(
            f'Fitted circles for {len(circles)} of '
            f'{len(options["masks"])} masks'
        ))
