"""Wall-clock budgets for template creation and 1:N search"""
import enum
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)

PERCENTILES = (50, 90, 95, 99)


class EventKind(enum.Enum):
    TEMPLATE = 'template'
    SEARCH = 'search'


@dataclass(frozen=True)
class TimingEvent:
    kind: EventKind
    label: str
    seconds: float


class TimingLog:
    def __init__(self, clock=time.perf_counter):
        self.events = []
        self._clock = clock

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def record(self, kind, label, seconds):
        event = TimingEvent(EventKind(kind), str(label), float(seconds))
        self.events.append(event)
        return event

    @contextmanager
    def measure(self, kind, label):
        """Time the block; the event is recorded even when it raises"""
        start = self._clock()
        try:
            yield
        finally:
            event = self.record(kind, label, self._clock() - start)
            logger.debug('%s %s took %.3f s', event.kind.value, event.label,
                         event.seconds)


@dataclass(frozen=True)
class EventVerdict:
    event: TimingEvent
    budget: float

    @property
    def passed(self):
        return self.event.seconds <= self.budget


@dataclass(frozen=True)
class TimingReport:
    verdicts: tuple
    summary: dict

    @property
    def failures(self):
        return [v for v in self.verdicts if not v.passed]

    def as_dict(self):
        return {
            'events': [
                {
                    'kind': v.event.kind.value,
                    'label': v.event.label,
                    'seconds': v.event.seconds,
                    'budget': v.budget,
                    'passed': v.passed,
                }
                for v in self.verdicts
            ],
            'summary': self.summary,
        }


def timing_report(log, template_budget=None, search_budget=None):
    budgets = {
        EventKind.TEMPLATE: template_budget
        if template_budget is not None
        else settings.IRIS_TEMPLATE_BUDGET_SECONDS,
        EventKind.SEARCH: search_budget
        if search_budget is not None
        else settings.IRIS_SEARCH_BUDGET_SECONDS,
    }
    verdicts = tuple(EventVerdict(event, budgets[event.kind])
                     for event in log)
    summary = {}
    for kind in EventKind:
        seconds = np.array([v.event.seconds for v in verdicts
                            if v.event.kind is kind])
        if seconds.size == 0:
            continue
        stats = {f'p{q}': float(np.percentile(seconds, q))
                 for q in PERCENTILES}
        stats.update(
            count=int(seconds.size),
            max=float(seconds.max()),
            over_budget=int(np.count_nonzero(seconds > budgets[kind])),
            budget=budgets[kind],
        )
        summary[kind.value] = stats
    for verdict in verdicts:
        if not verdict.passed:
            logger.warning('%s %s took %.2f s, budget %.2f s',
                           verdict.event.kind.value, verdict.event.label,
                           verdict.event.seconds, verdict.budget)
    return TimingReport(verdicts, summary)
