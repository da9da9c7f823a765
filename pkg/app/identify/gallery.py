"""Enrolled identities and their on-disk directory form.

A gallery directory holds ``manifest.csv`` (``identity_id, eye,
template_path``) and the canonical template files it names.
"""
import csv
import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from biotemplates.codec import read_template, write_template
from biotemplates.schema import EyeLabel, Template
from core.exceptions import ConfigError, IrisError
from core.manifests import read_manifest, resolve

logger = logging.getLogger(__name__)

MANIFEST = 'manifest.csv'
MANIFEST_FIELDS = ('identity_id', 'eye', 'template_path')
PROBE_FIELDS = ('probe_id', 'eye', 'template_path')
TEMPLATE_DIR = 'templates'


@dataclass(frozen=True)
class GalleryEntry:
    identity_id: str
    templates: tuple

    def __post_init__(self):
        object.__setattr__(self, 'templates', tuple(self.templates))
        if not self.templates:
            raise ValueError(f'identity {self.identity_id!r} has no templates')


class Gallery:
    """Identities in enrollment order.

    Enrolling while a search holds the gallery raises ``RuntimeError``.
    Searches may share the gallery across threads.
    """

    def __init__(self, entries=()):
        self._lock = threading.Lock()
        self._entries = {}
        self._searches = 0
        self._indexes = {}
        for entry in entries:
            self.enroll(entry)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def __getitem__(self, identity_id):
        return self._entries[identity_id]

    def enroll(self, entry):
        """Add an identity; templates of a known identity are appended"""
        with self._lock:
            if self._searches:
                raise RuntimeError('cannot enroll while a search is running')
            existing = self._entries.get(entry.identity_id)
            if existing is not None:
                entry = GalleryEntry(entry.identity_id,
                                     existing.templates + entry.templates)
            self._entries[entry.identity_id] = entry
            self._indexes.clear()

    @contextmanager
    def searching(self):
        with self._lock:
            self._searches += 1
        try:
            yield self
        finally:
            with self._lock:
                self._searches -= 1

    def cached_index(self, key, build):
        """Index built once per key, even when searches race for it"""
        with self._lock:
            if key not in self._indexes:
                self._indexes[key] = build(self)
            return self._indexes[key]

    @classmethod
    def from_manifest(cls, path):
        """Identities from a manifest; its eye column labels the templates"""
        grouped = {}
        for row in read_manifest(path, MANIFEST_FIELDS):
            template = _read(resolve(path, row['template_path']))
            eye = _eye(row, path)
            if template.eye is not EyeLabel.UNSPECIFIED \
                    and template.eye is not eye:
                logger.warning('%s: template says %s, manifest says %s',
                               row['template_path'], template.eye, eye)
            grouped.setdefault(row['identity_id'], []).append(
                Template(eye, template.payload))
        return cls(GalleryEntry(identity_id, templates)
                   for identity_id, templates in grouped.items())

    @classmethod
    def load(cls, directory):
        manifest = Path(directory) / MANIFEST
        if not manifest.is_file():
            raise ConfigError(f'{directory} is not a gallery: '
                              f'no {MANIFEST}')
        gallery = cls.from_manifest(manifest)
        logger.info('loaded %d identities from %s', len(gallery), directory)
        return gallery

    def save(self, directory):
        directory = Path(directory)
        templates = directory / TEMPLATE_DIR
        templates.mkdir(parents=True, exist_ok=True)
        for stale in templates.glob('*.irxt'):
            stale.unlink()
        rows = []
        for number, (identity_id, template) in enumerate(
                (entry.identity_id, template)
                for entry in self for template in entry.templates):
            relative = Path(TEMPLATE_DIR) / f'{number:07d}.irxt'
            write_template(template, directory / relative)
            rows.append((identity_id, str(template.eye),
                         relative.as_posix()))
        with open(directory / MANIFEST, 'w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(MANIFEST_FIELDS)
            writer.writerows(rows)
        return directory


def _eye(row, path):
    try:
        return EyeLabel.parse(row['eye'])
    except IrisError as exc:
        raise ConfigError(f'{path}: {exc}') from exc


def _read(path):
    try:
        return read_template(path)
    except OSError as exc:
        raise ConfigError(f'{path}: {exc}') from exc
    except IrisError as exc:
        raise type(exc)(f'{path}: {exc}') from exc


def load_probes(path):
    """Probe manifest rows grouped into templates per probe id"""
    probes = {}
    for row in read_manifest(path, PROBE_FIELDS):
        template = _read(resolve(path, row['template_path']))
        probes.setdefault(row['probe_id'], []).append(
            Template(_eye(row, path), template.payload))
    return probes
