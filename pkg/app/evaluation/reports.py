"""JSON and text renderings of evaluation results"""
import json
import math

TABLE_ROWS = (
    ('EER (%)', lambda r: 100 * r.eer),
    ('AUC', lambda r: r.auc),
    ("d'", lambda r: r.dprime),
)


def _number(value):
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return 'NaN'
        return 'Infinity' if value > 0 else 'NegativeInfinity'
    return value


def _clean(value):
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    return _number(value)


def metrics_to_dict(report):
    return _clean({
        'auc': report.auc,
        'eer': report.eer,
        'dprime': report.dprime,
        'fnmr_at_fmr': report.fnmr_at_fmr,
        'rank_k': report.rank_k,
        'fte': report.fte,
        'counts': {
            'genuine': report.genuine_count,
            'imposter': report.imposter_count,
            'failed': report.failed_count,
        },
    })


def _stats_to_dict(stats):
    if stats is None:
        return None
    return {'count': stats.count, 'mad': stats.mad,
            'max_delta': stats.max_delta, 'r2': stats.r2}


def parity_to_dict(report):
    return _clean({
        'genuine': _stats_to_dict(report.genuine),
        'imposter': _stats_to_dict(report.imposter),
        'matched': report.matched,
        'only_a': report.only_a,
        'only_b': report.only_b,
    })


def dumps(data):
    return json.dumps(_clean(data), indent=2, sort_keys=True,
                      allow_nan=False) + '\n'


def _format_target(target):
    return f'{100 * target:g}%'


def render_table(reports):
    """Metric rows against method columns, aligned"""
    methods = list(reports)
    rows = []
    targets = sorted({t for r in reports.values() for t in r.fnmr_at_fmr})
    for target in targets:
        rows.append((f'FNMR @ FMR={_format_target(target)}', [
            _cell(r.fnmr_at_fmr.get(target), digits=4)
            for r in reports.values()
        ]))
    for label, pick in TABLE_ROWS:
        rows.append((label, [_cell(pick(r)) for r in reports.values()]))
    ranks = sorted({k for r in reports.values() for k in r.rank_k})
    for k in ranks:
        for convention in ('mated', 'all'):
            rows.append((f'Rank-{k} (%) {convention}', [
                _cell(100 * r.rank_k[k][convention]) if k in r.rank_k
                else '-'
                for r in reports.values()
            ]))
    rows.append(('FTE (%)', [_cell(100 * r.fte) for r in reports.values()]))

    label_width = max(len(label) for label, _ in rows)
    widths = [max([len(m)] + [len(cells[i]) for _, cells in rows])
              for i, m in enumerate(methods)]
    lines = [' ' * label_width + ''.join(
        f'  {m:>{w}}' for m, w in zip(methods, widths))]
    for label, cells in rows:
        lines.append(f'{label:<{label_width}}' + ''.join(
            f'  {c:>{w}}' for c, w in zip(cells, widths)))
    return '\n'.join(lines) + '\n'


def _cell(value, digits=2):
    if value is None:
        return '-'
    if isinstance(value, float) and not math.isfinite(value):
        return str(_number(value))
    return f'{value:.{digits}f}'
