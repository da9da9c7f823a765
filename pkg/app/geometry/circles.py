"""Pupil/iris circle parameters and the biological-viability quality gate"""
import csv
import enum
import math
from dataclasses import dataclass, fields

from core.exceptions import InvalidGeometry

MIN_PUPIL_RADIUS = 12
MIN_IRIS_RADIUS = 16
MIN_RATIO = 0.1
MAX_RATIO = 0.8
MIN_VISIBLE_FRACTION = 0.1
MAX_CONCENTRIC_DEVIATION = 0.5

CSV_FIELDS = ('image_id', 'px', 'py', 'pr', 'ix', 'iy', 'ir')


@dataclass(frozen=True)
class CircleParams:
    """Pupil circle (px, py, pr) and iris circle (ix, iy, ir), in pixels"""
    px: float
    py: float
    pr: float
    ix: float
    iy: float
    ir: float

    def __post_init__(self):
        for field in fields(self):
            value = float(getattr(self, field.name))
            if not math.isfinite(value):
                raise InvalidGeometry(f'{field.name} is not finite')
            object.__setattr__(self, field.name, value)
        if self.pr <= 0 or self.ir <= 0:
            raise InvalidGeometry('radii must be strictly positive')

    @property
    def ratio(self):
        """Pupil-to-iris radius ratio (alpha)"""
        return self.pr / self.ir

    @property
    def center_offset(self):
        return math.hypot(self.px - self.ix, self.py - self.iy)

    @property
    def annulus_area(self):
        return math.pi * (self.ir + self.pr) * (self.ir - self.pr)

    def as_tuple(self):
        return (self.px, self.py, self.pr, self.ix, self.iy, self.ir)


class Rejection(enum.Enum):
    ABNORMAL_RADII = 'AbnormalRadii'
    INSUFFICIENT_RADII = 'InsufficientRadii'
    ABNORMAL_RATIO = 'AbnormalRatio'
    INSUFFICIENT_IRIS_VISIBLE = 'InsufficientIrisVisible'
    EXCESSIVE_CONCENTRIC_DEVIATION = 'ExcessiveConcentricDeviation'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class QualityVerdict:
    reasons: frozenset

    @property
    def accepted(self):
        return not self.reasons

    def describe(self):
        """Stable, sorted reason codes for logs and reports"""
        return ','.join(sorted(str(reason) for reason in self.reasons))


def quality_gate(c, mask=None):
    """Reject biologically unviable geometry.

    Every rule is evaluated and every triggered reason reported. The radius
    floors reject when *either* radius is too small.
    """
    reasons = set()
    if c.ir <= c.pr:
        reasons.add(Rejection.ABNORMAL_RADII)
    if c.pr <= MIN_PUPIL_RADIUS or c.ir <= MIN_IRIS_RADIUS:
        reasons.add(Rejection.INSUFFICIENT_RADII)
    if not MIN_RATIO <= c.ratio <= MAX_RATIO:
        reasons.add(Rejection.ABNORMAL_RATIO)
    if mask is not None:
        annulus = c.annulus_area
        # ir <= pr makes the ratio negative or undefined: both reject
        if annulus <= 0 or mask.area / annulus < MIN_VISIBLE_FRACTION:
            reasons.add(Rejection.INSUFFICIENT_IRIS_VISIBLE)
    if c.center_offset / c.ir > MAX_CONCENTRIC_DEVIATION:
        reasons.add(Rejection.EXCESSIVE_CONCENTRIC_DEVIATION)

    return QualityVerdict(frozenset(reasons))


def read_circles_csv(path):
    """Read ``image_id,px,py,pr,ix,iy,ir`` rows into a dict keyed by id"""
    circles = {}
    with open(path, newline='') as handle:
        for row in csv.DictReader(handle):
            try:
                circles[row['image_id']] = CircleParams(
                    *(float(row[name]) for name in CSV_FIELDS[1:])
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidGeometry(f'{path}: bad circle row {row}') \
                    from exc
    return circles


def write_circles_csv(circles, path):
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_FIELDS)
        for image_id in sorted(circles):
            writer.writerow(
                [image_id] + [repr(v) for v in circles[image_id].as_tuple()]
            )
