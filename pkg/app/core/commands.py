"""Shared plumbing of the batch management commands.

Exit codes: 0 on success, 1 when the inputs or the configuration are
invalid, 2 when processing valid inputs fails.
"""
from pathlib import Path

from django.core.management import BaseCommand, CommandError

from core.config import load_run_config
from core.exceptions import ConfigError, IrisError

VALIDATION_ERROR = 1
PROCESSING_ERROR = 2


class IrisCommand(BaseCommand):
    """Base command: ``--config`` loading and error-to-exit-code mapping.

    Subclasses list the run-config keys their flags override in
    ``config_flags`` and implement ``run(config, **options)``.
    """
    config_flags = ()

    def add_arguments(self, parser):
        parser.add_argument(
            '--config', help='run configuration file (key = value lines)',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            config = load_run_config(
                options.pop('config', None),
                **{name: options.get(name) for name in self.config_flags},
            )
            self.run(config, **options)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=VALIDATION_ERROR)
        except IrisError as exc:
            raise CommandError(str(exc), returncode=PROCESSING_ERROR)

    def run(self, config, **options):
        raise NotImplementedError

    @staticmethod
    def require_file(path, what='input'):
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f'{what} {path} does not exist')
        return path

    @staticmethod
    def output_dir(path):
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        return path
