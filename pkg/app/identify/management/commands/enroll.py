from core.commands import IrisCommand
from identify.gallery import Gallery


class Command(IrisCommand):
    """Build a gallery directory from an enrollment manifest"""
    help = ('Enrolls the templates listed in a manifest CSV (identity_id, '
            'eye, template_path) into a gallery directory, replacing its '
            'previous contents.')

    def add_command_arguments(self, parser):
        parser.add_argument('manifest', help='enrollment manifest CSV')
        parser.add_argument('--gallery', required=True,
                            help='gallery directory to write')

    def run(self, config, **options):
        manifest = self.require_file(options['manifest'], 'manifest')
        gallery = Gallery.from_manifest(manifest)
        gallery.save(options['gallery'])
        templates = sum(len(entry.templates) for entry in gallery)
        self.stdout.write(self.style.SUCCESS(
            f'Enrolled {len(gallery)} identities ({templates} templates) '
            f'into {options["gallery"]}'
        ))
