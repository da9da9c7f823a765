"""Run configuration shared by the management commands.

A run config file is flat ``key = value`` text; ``#`` starts a comment.
Values start from the ``IRIS_*`` settings, the file overrides them and
command-line flags override the file.
"""
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

from django.conf import settings

from core.exceptions import ConfigError

logger = logging.getLogger(__name__)

MATCHERS = ('hdbif', 'angular', 'euclidean', 'crypts_emd')
STRATEGIES = ('exhaustive', 'even_then_neighbors')
POLICIES = ('propagate', 'sentinel')
PROTOCOLS = ('discard', 'nonmatch', 'intersection')


def _path(text):
    return Path(text) if text not in (None, '') else None


def _optional_int(text):
    if text in (None, '', 'none', 'None'):
        return None
    return int(text)


def _floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(',') if v.strip())


def _ints(text):
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).split(',') if v.strip())


@dataclass(frozen=True)
class RunConfig:
    filter_bank: Path = None
    filter_count: int = 7
    filter_size: int = 9
    seed: int = 0
    gallery: Path = None
    probes: Path = None
    sentinels: Path = None
    matcher: str = 'hdbif'
    candidate_list_length: int = 50
    max_shift: int = 16
    strategy: str = 'even_then_neighbors'
    failure_policy: str = 'sentinel'
    workers: int = 1
    radial_res: int = 64
    angular_res: int = 512
    emd_size_ratio_max: float = 2.0
    emd_min_overlap: float = 0.1
    emd_max_iterations: int = None
    connectivity: int = 8
    protocol: str = 'discard'
    fte_threshold: float = 0.30
    fmr_targets: tuple = (0.001, 0.01)
    ranks: tuple = (1, 5, 10)
    histogram_bins: int = 50
    subset_fraction: float = 1.0
    template_budget: float = 1.5
    search_budget: float = 25.0

    @classmethod
    def from_settings(cls):
        return cls(
            filter_count=settings.IRIS_FILTER_COUNT,
            filter_size=settings.IRIS_FILTER_SIZE,
            seed=settings.IRIS_FILTER_SEED,
            candidate_list_length=settings.IRIS_CANDIDATE_LIST_LENGTH,
            max_shift=settings.IRIS_MAX_SHIFT,
            strategy=settings.IRIS_SHIFT_STRATEGY,
            failure_policy=settings.IRIS_FAILURE_POLICY,
            workers=settings.IRIS_SEARCH_WORKERS,
            radial_res=settings.IRIS_POLAR_RADIAL_RES,
            angular_res=settings.IRIS_POLAR_ANGULAR_RES,
            emd_size_ratio_max=settings.IRIS_EMD_SIZE_RATIO_MAX,
            emd_min_overlap=settings.IRIS_EMD_MIN_OVERLAP,
            emd_max_iterations=settings.IRIS_EMD_MAX_ITERATIONS,
            connectivity=settings.IRIS_CRYPT_CONNECTIVITY,
            fte_threshold=settings.IRIS_FTE_THRESHOLD,
            fmr_targets=tuple(settings.IRIS_FMR_TARGETS),
            ranks=tuple(settings.IRIS_RANKS),
            histogram_bins=settings.IRIS_HISTOGRAM_BINS,
            template_budget=settings.IRIS_TEMPLATE_BUDGET_SECONDS,
            search_budget=settings.IRIS_SEARCH_BUDGET_SECONDS,
        )

    def validate(self):
        checks = (
            (self.filter_count >= 1, 'filter_count must be positive'),
            (self.filter_size >= 1 and self.filter_size % 2 == 1,
             'filter_size must be a positive odd number'),
            (self.matcher in MATCHERS,
             f'matcher must be one of {", ".join(MATCHERS)}'),
            (self.strategy in STRATEGIES,
             f'strategy must be one of {", ".join(STRATEGIES)}'),
            (self.failure_policy in POLICIES,
             f'failure_policy must be one of {", ".join(POLICIES)}'),
            (self.protocol in PROTOCOLS,
             f'protocol must be one of {", ".join(PROTOCOLS)}'),
            (self.candidate_list_length >= 1,
             'candidate_list_length must be positive'),
            (self.max_shift >= 0, 'max_shift must be non-negative'),
            (self.workers >= 1, 'workers must be positive'),
            (self.radial_res >= 2, 'radial_res must be at least 2'),
            (self.angular_res >= 4, 'angular_res must be at least 4'),
            (self.emd_size_ratio_max >= 1,
             'emd_size_ratio_max must be at least 1'),
            (0 <= self.emd_min_overlap <= 1,
             'emd_min_overlap must lie in [0, 1]'),
            (self.emd_max_iterations is None or self.emd_max_iterations >= 1,
             'emd_max_iterations must be positive'),
            (self.connectivity in (4, 8), 'connectivity must be 4 or 8'),
            (0 <= self.fte_threshold <= 1,
             'fte_threshold must lie in [0, 1]'),
            (all(0 <= t <= 1 for t in self.fmr_targets),
             'fmr_targets must lie in [0, 1]'),
            (all(k >= 1 for k in self.ranks), 'ranks must be positive'),
            (self.histogram_bins >= 1, 'histogram_bins must be positive'),
            (0 < self.subset_fraction <= 1,
             'subset_fraction must lie in (0, 1]'),
            (self.template_budget > 0 and self.search_budget > 0,
             'budgets must be positive'),
        )
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        for name in ('filter_bank', 'probes', 'sentinels'):
            path = getattr(self, name)
            if path is not None and not path.is_file():
                raise ConfigError(f'{name}: {path} does not exist')
        if self.gallery is not None and not self.gallery.is_dir():
            raise ConfigError(f'gallery: {self.gallery} is not a directory')
        return self

    def replace(self, **values):
        return dataclasses.replace(self, **values)


CONVERTERS = {
    'filter_bank': _path,
    'gallery': _path,
    'probes': _path,
    'sentinels': _path,
    'emd_max_iterations': _optional_int,
    'fmr_targets': _floats,
    'ranks': _ints,
}
for _field in dataclasses.fields(RunConfig):
    CONVERTERS.setdefault(_field.name, _field.type if _field.type in
                          (int, float, str) else str)


def convert(name, value):
    if name not in CONVERTERS:
        raise ConfigError(f'unknown config key {name!r}')
    try:
        return CONVERTERS[name](value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'{name}: bad value {value!r}') from exc


def parse_run_config(text, source='<config>'):
    """``key = value`` lines into a dict of converted values"""
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f'{source}:{number}: expected key = value')
        key, value = (part.strip() for part in line.split('=', 1))
        try:
            values[key] = convert(key, value)
        except ConfigError as exc:
            raise ConfigError(f'{source}:{number}: {exc}') from exc
    return values


def load_run_config(path=None, **overrides):
    config = RunConfig.from_settings()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f'config file {path} does not exist')
        config = config.replace(**parse_run_config(path.read_text(),
                                                   str(path)))
        logger.debug('loaded run config from %s', path)
    flags = {name: convert(name, value)
             for name, value in overrides.items() if value is not None}
    return config.replace(**flags).validate()
