"""
Markdown tables and SVG charts for the rank, evaluate, replicability and
report commands. All text is produced with the Cheetah templates in
templates/.
"""

import logging
import os

from Cheetah.Template import Template

logger = logging.getLogger('pyBenchRank.report')

SCRIPTDIR = os.path.dirname(__file__)

# Preload the templates
def _load(name):
    with open(os.path.join(SCRIPTDIR, 'templates', name), 'rb') as f:
        return f.read().decode('utf-8')

TABLE_TEMPLATE = _load('table.tmpl')
REPORT_TEMPLATE = _load('report.tmpl')
SCATTER_TEMPLATE = _load('scatter.tmpl')
IMPACT_TEMPLATE = _load('impact.tmpl')

PALETTE = ('rgb(31,119,180)', 'rgb(255,127,14)', 'rgb(44,160,44)', 'rgb(214,39,40)',
           'rgb(148,103,189)', 'rgb(140,86,75)', 'rgb(227,119,194)', 'rgb(127,127,127)',
           'rgb(188,189,34)', 'rgb(23,190,207)')

NA = 'NA'


def color(i):
    return PALETTE[i % len(PALETTE)]

def fmt(value, digits=4):
    if value is None:
        return NA
    return '%.*f' % (digits, value)

def escape(text):
    return (str(text).replace('&', '&amp;').replace('<', '&lt;')
            .replace('>', '&gt;').replace('"', '&quot;'))

def render(template, **values):
    t = Template(template)
    for name, value in values.items():
        setattr(t, name, value)
    return str(t)

def write_text(path, text):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        f.write(text)
    logger.debug('wrote %s', path)
    return path


def markdown_table(title, header, rows, caption='', notes=()):
    cell = lambda v: str(v).replace('|', '\\|')
    return render(TABLE_TEMPLATE,
                  title=title,
                  underline='-' * len(title),
                  caption=caption,
                  header=' | '.join(cell(h) for h in header),
                  rule=' | '.join('---' for _ in header),
                  rows=[' | '.join(cell(v) for v in row) for row in rows],
                  notes=list(notes))

def document(title, matrix, sections, version, excluded=()):
    return render(REPORT_TEMPLATE,
                  title=title,
                  underline='=' * len(title),
                  dataset=matrix.dataset or '-',
                  configs=len(matrix),
                  dimensions=' x '.join('%s(%d)' % (d.name, len(d))
                                        for d in matrix.space.dimensions),
                  queries=', '.join(matrix.queries),
                  version=version,
                  excluded=', '.join(excluded),
                  sections=list(sections))


#
# Tables
#

def query_ranks_table(matrix, per_query):
    """Mean runtime and rank of every configuration in every query."""
    rows = []
    for i, label in enumerate(matrix.labels):
        row = [label]
        for j, q in enumerate(matrix.queries):
            row.append('%.3f (%d)' % (matrix.runtime[i, j], per_query.positions[q][label]))
        rows.append(row)
    return markdown_table('Configuration rankings by query runtime', ['config'] + list(matrix.queries),
                          rows, caption='mean runtime in ms, rank in parentheses')

def sd_table(table):
    header = ['option'] + ['r%d' % r for r in range(1, table.d + 1)] + ['R']
    rows = [[option] + table.occurrences[o].tolist() + [fmt(table.scores[o])]
            for o, option in enumerate(table.options)]
    return markdown_table('Rank scores of %s' % table.dimension, header, rows,
                          caption='%d queries, %d options' % (table.query_count, table.d))

def topk_table(top, k, conformance=None, skipped=None):
    """
    Top k configurations of every criterion side by side. 'top' maps the
    criterion name to its RankingSet; 'conformance' to its conformance.
    """
    names = list(top)
    rows = []
    for i in range(k):
        rows.append(['%d' % (i + 1)] + [top[n].labels[i] if i < len(top[n]) else ''
                                        for n in names])
    if conformance:
        rows.append(['conformance'] + [fmt(conformance.get(n)) for n in names])
    notes = ['%s skipped: %s' % (n, why) for n, why in sorted((skipped or {}).items())]
    return markdown_table('Top-%d configurations' % k, ['rank'] + names, rows, notes=notes)

def metrics_table(rows, mode, k, h):
    """rows: (criterion, conformance, coherence or None)"""
    return markdown_table('Ranking criteria evaluation',
                          ['criterion', 'conformance', 'coherence'],
                          [(name, fmt(a), fmt(c)) for name, a, c in rows],
                          caption='k=%d, h=%d, coherence mode %s' % (k, h, mode))

def coherence_tables(grids, logs, mode, k):
    """One table per criterion, row log against column log; '-' on the diagonal."""
    names = ['L%d' % (i + 1) for i in range(len(logs))]
    notes = ['%s: %s' % (n, path) for n, path in zip(names, logs)]
    tables = []
    for title, grid in grids.items():
        rows = [[names[i]] + ['-' if i == j else fmt(v) for j, v in enumerate(line)]
                for i, line in enumerate(grid)]
        tables.append(markdown_table('Coherence of %s' % title, ['log'] + names, rows,
                                     caption='k=%d, coherence mode %s' % (k, mode),
                                     notes=notes))
    return '\n'.join(tables)

def global_table(columns, dim):
    ok = [c for c in columns if c.table is not None]
    options = ok[0].table.ranked_options() if ok else []
    rows = []
    for option in options:
        rows.append([option] + [fmt(c.table.score_of(option), 2) if c.table else NA
                                for c in columns])
    notes = ['%s: %s' % (c.title, c.error) for c in columns if c.error]
    return markdown_table('Global ranking of %s' % dim, [dim] + [c.title for c in columns],
                          rows, notes=notes)

def replicability_table(reports):
    if not reports:
        return ''
    groups = [g.option for g in reports[0].groups]
    rows = []
    for r in reports:
        rows.append(['%s vs %s' % (r.option_a, r.option_b)] +
                    [NA if g.percent is None else '%.1f%%' % g.percent for g in r.groups])
    return markdown_table('Replicability of %s by %s' % (reports[0].dimension, reports[0].group_by),
                          ['comparison'] + groups, rows,
                          caption='share of cells where the first option is strictly faster')

def impact_table(rows, target, varying):
    return markdown_table('Impact of %s on %s' % (varying, target),
                          [target, varying, 'mean', 'min', 'max', 'cells'],
                          [(r.target, r.varying, fmt(r.mean, 3), fmt(r.min, 3), fmt(r.max, 3),
                            r.cells) for r in rows])


#
# Charts
#

def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]

def scatter_svg(title, points, xlabel, ylabel, width=480, height=400):
    """
    points: (label, x, y, front). Front 0 is drawn in the first palette
    colour, later fronts in the following ones.
    """
    left, right, top, bottom = 60, width - 20, 40, height - 60
    xs = [p[1] for p in points] or [0.0]
    ys = [p[2] for p in points] or [0.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = lambda v: left + (v - x0) / (x1 - x0) * (right - left) if x1 > x0 else (left + right) / 2
    sy = lambda v: bottom - (v - y0) / (y1 - y0) * (bottom - top) if y1 > y0 else (top + bottom) / 2

    ticks = []
    for v in _ticks(x0, x1):
        ticks.append({'x': '%.1f' % sx(v), 'y': bottom + 14, 'anchor': 'middle', 'text': '%.3g' % v})
    for v in _ticks(y0, y1):
        ticks.append({'x': left - 4, 'y': '%.1f' % (sy(v) + 3), 'anchor': 'end', 'text': '%.3g' % v})

    drawn = []
    for label, x, y, front in points:
        drawn.append({'x': '%.1f' % sx(x), 'y': '%.1f' % sy(y), 'fill': color(front),
                      'label': escape(label), 'front': front})
    fronts = sorted({p[3] for p in points})[:len(PALETTE)]
    legend = [{'x': right - 70, 'y': top + 12 * i, 'tx': right - 62, 'ty': top + 12 * i + 3,
               'fill': color(f), 'text': 'front %d' % f} for i, f in enumerate(fronts)]
    return render(SCATTER_TEMPLATE, width=width, height=height, title=escape(title),
                  left=left, right=right, top=top, bottom=bottom,
                  mid=(left + right) // 2, mid_y=(top + bottom) // 2, xlabel_y=height - 20,
                  xlabel=escape(xlabel), ylabel=escape(ylabel),
                  ticks=ticks, points=drawn, legend=legend)

def impact_svg(rows, target, varying, width=640, height=400):
    """Bars from min to max with the mean marked, per target option and varying option."""
    left, right, top, bottom = 70, width - 20, 40, height - 50
    targets = list(dict.fromkeys(r.target for r in rows))
    varyings = list(dict.fromkeys(r.varying for r in rows))
    hi = max([r.max for r in rows] or [1.0])
    sy = lambda v: bottom - v / hi * (bottom - top)
    slot = (right - left) / max(len(targets), 1)
    bar = slot * 0.8 / max(len(varyings), 1)

    boxes = []
    for r in rows:
        t = targets.index(r.target)
        v = varyings.index(r.varying)
        x = left + t * slot + slot * 0.1 + v * bar
        boxes.append({'x': '%.1f' % x, 'w': '%.1f' % (bar * 0.9), 'cx': '%.1f' % (x + bar * 0.45),
                      'ymax': '%.1f' % sy(r.max), 'ymin': '%.1f' % sy(r.min),
                      'ymean': '%.1f' % sy(r.mean), 'hmean': '%.1f' % (bottom - sy(r.mean)),
                      'fill': color(v),
                      'title': escape('%s / %s: mean %.3f, min %.3f, max %.3f'
                                      % (r.target, r.varying, r.mean, r.min, r.max))})
    groups = [{'x': '%.1f' % (left + (t + 0.5) * slot), 'y': bottom + 16, 'text': escape(name)}
              for t, name in enumerate(targets)]
    ticks = [{'x': left - 4, 'y': '%.1f' % (sy(v) + 3), 'text': '%.3g' % v}
             for v in _ticks(0.0, hi)]
    legend = [{'x': left + 90 * i, 'y': height - 22, 'tx': left + 90 * i + 14,
               'ty': height - 13, 'fill': color(i), 'text': escape(name)}
              for i, name in enumerate(varyings)]
    return render(IMPACT_TEMPLATE, width=width, height=height,
                  title=escape('Impact of %s on %s' % (varying, target)),
                  left=left, right=right, top=top, bottom=bottom,
                  mid=(left + right) // 2, mid_y=(top + bottom) // 2,
                  ticks=ticks, groups=groups, boxes=boxes, legend=legend)
