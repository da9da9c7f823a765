import csv
import logging
from pathlib import Path

from django.conf import settings

from core.commands import IrisCommand
from core.exceptions import ConfigError
from geometry.circles import quality_gate, read_circles_csv
from geometry.normalization import rubber_sheet
from geometry.preprocessing import preprocess_image, preprocess_mask
from geometry.rasters import (
    BinaryMask, GrayImage, read_gray, read_mask, write_gray, write_mask,
)

logger = logging.getLogger(__name__)

MASK_SUFFIXES = ('.png', '.pgm')
POLAR_MASK_SUFFIX = '.mask.pgm'


def find_mask(masks_dir, stem):
    for suffix in MASK_SUFFIXES:
        candidate = Path(masks_dir) / f'{stem}{suffix}'
        if candidate.is_file():
            return candidate
    return None


class Command(IrisCommand):
    """Unwrap eye images into polar images and polar occlusion masks"""
    help = ('Rescales eye images, gates their circles and writes rubber-sheet '
            'polar images (<id>.pgm) with polar masks (<id>.mask.pgm).')
    config_flags = ('radial_res', 'angular_res')

    def add_command_arguments(self, parser):
        parser.add_argument('images', nargs='+', help='eye images (PGM/PNG)')
        parser.add_argument('--circles', required=True,
                            help='circles CSV in the raw image frames')
        parser.add_argument('--masks-dir',
                            help='directory of <id>.png/.pgm occlusion masks')
        parser.add_argument('--output-dir', required=True)
        parser.add_argument('--radial-res', type=int, dest='radial_res')
        parser.add_argument('--angular-res', type=int, dest='angular_res')

    def run(self, config, **options):
        circles = read_circles_csv(self.require_file(options['circles'],
                                                     'circles CSV'))
        output = self.output_dir(options['output_dir'])
        width, height = settings.IRIS_NORMALIZATION_SIZE
        rejected = []
        written = 0
        for name in options['images']:
            path = self.require_file(name, 'image')
            if path.stem not in circles:
                raise ConfigError(f'no circles for {path.stem}')
            image, transform = preprocess_image(read_gray(path), width,
                                                height)
            c = transform.to_target(circles[path.stem])
            mask = None
            if options['masks_dir']:
                mask_path = find_mask(options['masks_dir'], path.stem)
                if mask_path is None:
                    raise ConfigError(f'no mask for {path.stem}')
                mask, _ = preprocess_mask(read_mask(mask_path), width, height)
            verdict = quality_gate(c, mask)
            if not verdict.accepted:
                logger.warning('%s rejected: %s', path.stem,
                               verdict.describe())
                rejected.append((path.stem, verdict.describe()))
                continue
            polar = rubber_sheet(image, c, mask, config.radial_res,
                                 config.angular_res)
            write_gray(GrayImage(polar.polar_image),
                       output / f'{path.stem}.pgm')
            write_mask(BinaryMask(polar.polar_mask),
                       output / f'{path.stem}{POLAR_MASK_SUFFIX}')
            written += 1

        with open(output / 'rejected.csv', 'w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(('image_id', 'reasons'))
            writer.writerows(rejected)
        self.stdout.write(self.style.SUCCESS(
            f'Normalized {written} images, rejected {len(rejected)}'
        ))
