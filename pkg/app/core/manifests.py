"""CSV manifests naming the inputs of a batch run"""
import csv
from pathlib import Path

from core.exceptions import ConfigError

PAIR_FIELDS = ('probe_id', 'probe_path', 'gallery_id', 'gallery_path',
               'genuine')


def read_manifest(path, fields):
    """Rows of a CSV manifest as dicts; every listed column must be filled"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f'manifest {path} does not exist')
    with open(path, newline='') as handle:
        reader = csv.DictReader(handle)
        missing = set(fields) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(
                f'{path}: missing columns {", ".join(sorted(missing))}'
            )
        rows = list(reader)
    for number, row in enumerate(rows, start=2):
        if not all(row[name] for name in fields):
            raise ConfigError(f'{path}:{number}: empty value in {row}')
    return rows


def resolve(base, value):
    """Manifest paths are relative to the manifest's directory"""
    path = Path(value)
    return path if path.is_absolute() else Path(base).parent / path


def read_pairs(path):
    """Comparison list: ids, file paths and the 0/1 genuine flag"""
    pairs = []
    for number, row in enumerate(read_manifest(path, PAIR_FIELDS), start=2):
        if row['genuine'] not in ('0', '1'):
            raise ConfigError(f'{path}:{number}: genuine must be 0 or 1')
        pairs.append(dict(
            row,
            probe_path=resolve(path, row['probe_path']),
            gallery_path=resolve(path, row['gallery_path']),
            genuine=row['genuine'] == '1',
        ))
    return pairs
