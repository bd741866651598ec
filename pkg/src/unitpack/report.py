"""Static report emitter: index + per-entry pages + SVG plots.

Output is a closed set of files under the output directory:

    index.md                    (or .html)
    groups/<value>.md           one overview per group value, if grouping
    entries/<identifier>.md     one page per entry
    plots/<identifier>.svg      hand-assembled SVG 1.1 line plot

Rendering is deterministic: identical collection + config produce a
byte-identical tree.
"""

from __future__ import annotations

import html as html_lib
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .collection import Collection
from .datapackage import Entry
from .errors import (
    AmbiguousKey,
    NonNumericCell,
    PathNotFound,
    TooFewPoints,
    UnitpackError,
)
from .metadata import canonical_scalar, get_path, is_scalar
from .tabular import render_cell

MISSING = "—"

_VIEW_W, _VIEW_H = 400, 300
_MARGIN_X, _MARGIN_Y = 20, 15  # 5% of each dimension


@dataclass(frozen=True)
class ReportConfig:
    out_dir: Path
    plot_x: str
    plot_y: str
    group_by: str | None = None
    descriptor_columns: tuple[tuple[str, str], ...] = ()
    format: str = "markdown"

    def __post_init__(self):
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if self.plot_x == self.plot_y:
            raise UnitpackError("plot_x and plot_y must differ",
                                code="REPORT_CONFIG_INVALID")
        if self.format not in ("markdown", "html"):
            raise UnitpackError(
                f"format must be 'markdown' or 'html', got {self.format!r}",
                code="REPORT_CONFIG_INVALID")

    @property
    def ext(self) -> str:
        return "md" if self.format == "markdown" else "html"


def _axis_label(entry: Entry, name: str) -> str:
    unit = entry.field(name).unit
    return f"{name} [{unit}]" if unit else name


def _xml_escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
                .replace(">", "&gt;"))


def render_plot(entry: Entry, x: str, y: str) -> str:
    """Standalone SVG line plot of column y over column x.

    Points are mapped linearly into the 400×300 viewport with 5%
    margins; a degenerate (zero-range) axis maps every point to the
    midline.
    """
    x_cells = entry.table.column_values(entry.field(x).name)
    y_cells = entry.table.column_values(entry.field(y).name)
    points = []
    for xc, yc in zip(x_cells, y_cells):
        if xc is None or yc is None:
            continue
        for cell, name in ((xc, x), (yc, y)):
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise NonNumericCell(
                    f"field {name!r} holds non-numeric cell {cell!r}")
        points.append((float(xc), float(yc)))
    if len(points) < 2:
        raise TooFewPoints(
            f"need at least 2 numeric rows to plot, found {len(points)}")

    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    plot_w = _VIEW_W - 2 * _MARGIN_X
    plot_h = _VIEW_H - 2 * _MARGIN_Y

    def map_x(v: float) -> float:
        if x_max == x_min:
            return _VIEW_W / 2
        return _MARGIN_X + (v - x_min) / (x_max - x_min) * plot_w

    def map_y(v: float) -> float:
        if y_max == y_min:
            return _VIEW_H / 2
        return _VIEW_H - _MARGIN_Y - (v - y_min) / (y_max - y_min) * plot_h

    coords = " ".join(f"{map_x(px):.2f},{map_y(py):.2f}"
                      for px, py in points)
    x_label = _xml_escape(_axis_label(entry, x))
    y_label = _xml_escape(_axis_label(entry, y))
    mid_y = _VIEW_H / 2
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_VIEW_W} {_VIEW_H}" width="{_VIEW_W}" '
        f'height="{_VIEW_H}">\n'
        f'  <rect x="{_MARGIN_X}" y="{_MARGIN_Y}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#555" stroke-width="1"/>\n'
        f'  <polyline fill="none" stroke="#1f77b4" stroke-width="1.5" '
        f'points="{coords}"/>\n'
        f'  <text x="{_VIEW_W // 2}" y="{_VIEW_H - 3}" font-size="11" '
        f'font-family="sans-serif" text-anchor="middle">{x_label}</text>\n'
        f'  <text x="11" y="{mid_y:.0f}" font-size="11" '
        f'font-family="sans-serif" text-anchor="middle" '
        f'transform="rotate(-90 11 {mid_y:.0f})">{y_label}</text>\n'
        f'</svg>\n'
    )


def _node_text(node) -> str:
    if is_scalar(node):
        return canonical_scalar(node)
    return json.dumps(node, ensure_ascii=False)


def _descriptor_cells(entry: Entry, cfg: ReportConfig) -> list[tuple[str, str]]:
    cells = []
    for label, path in cfg.descriptor_columns:
        try:
            value = _node_text(get_path(entry.metadata, path))
        except (PathNotFound, AmbiguousKey):
            value = MISSING
        cells.append((label, value))
    return cells


def _group_value(entry: Entry, cfg: ReportConfig) -> str:
    try:
        node = get_path(entry.metadata, cfg.group_by)
    except (PathNotFound, AmbiguousKey):
        return "ungrouped"
    return canonical_scalar(node) if is_scalar(node) else "ungrouped"


def _slug(value: str, taken: set[str]) -> str:
    base = re.sub(r"[^a-z0-9._-]+", "-", value.lower()).strip("-.") or "group"
    slug = base
    counter = 2
    while slug in taken:
        slug = f"{base}-{counter}"
        counter += 1
    taken.add(slug)
    return slug


# --- format helpers ---------------------------------------------------------

def _md_cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def _md_table(headers: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(_md_cell(h) for h in headers) + " |",
             "| " + " | ".join("---" for _ in headers) + " |"]
    for row in rows:
        lines.append("| " + " | ".join(_md_cell(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


def _html_table(headers: list[str], rows: list[list[str]],
                raw_columns: set[int] = frozenset()) -> str:
    head = "".join(f"<th>{html_lib.escape(h)}</th>" for h in headers)
    body = []
    for row in rows:
        cells = "".join(
            f"<td>{cell if i in raw_columns else html_lib.escape(cell)}</td>"
            for i, cell in enumerate(row))
        body.append(f"<tr>{cells}</tr>")
    return (f"<table>\n<thead><tr>{head}</tr></thead>\n"
            f"<tbody>\n" + "\n".join(body) + "\n</tbody>\n</table>\n")


def _md_tree(node, depth: int = 0) -> list[str]:
    pad = "  " * depth
    lines = []
    if isinstance(node, dict):
        for key, value in node.items():
            if is_scalar(value):
                lines.append(f"{pad}- **{key}:** {canonical_scalar(value)}")
            else:
                lines.append(f"{pad}- **{key}:**")
                lines.extend(_md_tree(value, depth + 1))
    elif isinstance(node, list):
        for item in node:
            if is_scalar(item):
                lines.append(f"{pad}- {canonical_scalar(item)}")
            else:
                lines.append(f"{pad}-")
                lines.extend(_md_tree(item, depth + 1))
    else:
        lines.append(f"{pad}- {canonical_scalar(node)}")
    return lines


def _html_tree(node) -> str:
    if isinstance(node, dict):
        items = []
        for key, value in node.items():
            items.append(f"<dt>{html_lib.escape(str(key))}</dt>"
                         f"<dd>{_html_tree(value)}</dd>")
        return "<dl>" + "".join(items) + "</dl>"
    if isinstance(node, list):
        items = "".join(f"<li>{_html_tree(item)}</li>" for item in node)
        return f"<ul>{items}</ul>"
    return html_lib.escape(canonical_scalar(node))


def _html_page(title: str, body: str) -> str:
    return (
        "<!DOCTYPE html>\n"
        "<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{html_lib.escape(title)}</title>\n"
        "<style>\n"
        "body { font-family: sans-serif; margin: 2em; max-width: 60em; }\n"
        "table { border-collapse: collapse; }\n"
        "td, th { border: 1px solid #999; padding: 0.3em 0.6em; }\n"
        "dl dl { margin-left: 1.5em; }\n"
        "dt { font-weight: bold; }\n"
        "img.thumb { width: 160px; }\n"
        "</style>\n</head>\n<body>\n"
        f"{body}"
        "</body>\n</html>\n"
    )


def render_entry_page(entry: Entry, cfg: ReportConfig) -> str:
    """One page per entry: descriptors, plot, data preview, metadata.

    Plot failures degrade to a placeholder; page generation itself
    never fails on them.
    """
    try:
        render_plot(entry, cfg.plot_x, cfg.plot_y)
        plot_ref: str | None = f"../plots/{entry.identifier}.svg"
    except UnitpackError:
        plot_ref = None

    preview_headers = [_axis_label(entry, f.name) for f in entry.fields]
    preview_rows = [[render_cell(cell) for cell in row]
                    for row in entry.table.rows[:10]]
    descriptor_cells = _descriptor_cells(entry, cfg)

    if cfg.format == "markdown":
        parts = [f"# {entry.identifier}\n"]
        if descriptor_cells:
            parts.append(_md_table(["descriptor", "value"],
                                   [[l, v] for l, v in descriptor_cells]))
        if plot_ref is not None:
            parts.append(f"![{entry.identifier}]({plot_ref})\n")
        else:
            parts.append("*no plot available*\n")
        parts.append("## Data preview\n")
        parts.append(_md_table(preview_headers, preview_rows))
        parts.append(f"{entry.table.row_count} row(s) total; full data in "
                     f"the package CSV.\n")
        parts.append("## Metadata\n")
        tree = _md_tree(entry.metadata.root)
        parts.append("\n".join(tree) + "\n" if tree else "*empty*\n")
        return "\n".join(parts)

    body = [f"<h1>{html_lib.escape(entry.identifier)}</h1>\n"]
    if descriptor_cells:
        body.append(_html_table(["descriptor", "value"],
                                [[l, v] for l, v in descriptor_cells]))
    if plot_ref is not None:
        body.append(f'<p><img src="{plot_ref}" '
                    f'alt="{html_lib.escape(entry.identifier)}"></p>\n')
    else:
        body.append("<p><em>no plot available</em></p>\n")
    body.append("<h2>Data preview</h2>\n")
    body.append(_html_table(preview_headers, preview_rows))
    body.append(f"<p>{entry.table.row_count} row(s) total; full data in the "
                f"package CSV.</p>\n")
    body.append("<h2>Metadata</h2>\n")
    body.append(_html_tree(entry.metadata.root) + "\n")
    return _html_page(entry.identifier, "".join(body))


def _overview_table(entries: list[Entry], cfg: ReportConfig,
                    prefix: str, plot_ids: set[str]) -> str:
    headers = (["plot"] + [label for label, _ in cfg.descriptor_columns]
               + ["entry"])
    rows = []
    for entry in entries:
        if cfg.format == "markdown":
            thumb = (f"![{entry.identifier}]({prefix}plots/"
                     f"{entry.identifier}.svg)"
                     if entry.identifier in plot_ids else MISSING)
            link = f"[{entry.identifier}]({prefix}entries/" \
                   f"{entry.identifier}.{cfg.ext})"
        else:
            thumb = (f'<img class="thumb" src="{prefix}plots/'
                     f'{entry.identifier}.svg" '
                     f'alt="{html_lib.escape(entry.identifier)}">'
                     if entry.identifier in plot_ids else MISSING)
            link = (f'<a href="{prefix}entries/{entry.identifier}.{cfg.ext}">'
                    f'{html_lib.escape(entry.identifier)}</a>')
        rows.append([thumb] + [v for _, v in _descriptor_cells(entry, cfg)]
                    + [link])
    if cfg.format == "markdown":
        return _md_table(headers, rows)
    raw = {0, len(headers) - 1}
    return _html_table(headers, rows, raw_columns=raw)


def render_index(c: Collection, cfg: ReportConfig) -> dict[str, str]:
    """Render the complete page set as {relative path: content}.

    With `group_by`, one overview page per distinct group value plus a
    root index; otherwise a single root overview.  Every entry appears
    exactly once across overview tables, and every link resolves inside
    the returned set.
    """
    pages: dict[str, str] = {}
    plot_ids: set[str] = set()
    for entry in c.entries:
        try:
            pages[f"plots/{entry.identifier}.svg"] = render_plot(
                entry, cfg.plot_x, cfg.plot_y)
            plot_ids.add(entry.identifier)
        except UnitpackError:
            pass
    for entry in c.entries:
        pages[f"entries/{entry.identifier}.{cfg.ext}"] = \
            render_entry_page(entry, cfg)

    title = "Collection report"
    if cfg.group_by is None:
        body_table = _overview_table(list(c.entries), cfg, "", plot_ids) \
            if len(c) else ""
        if cfg.format == "markdown":
            content = f"# {title}\n\n{len(c)} entr" \
                      f"{'y' if len(c) == 1 else 'ies'}.\n"
            content += "\n" + body_table if body_table else ""
            pages[f"index.{cfg.ext}"] = content
        else:
            body = (f"<h1>{title}</h1>\n<p>{len(c)} entr"
                    f"{'y' if len(c) == 1 else 'ies'}.</p>\n")
            body += body_table
            pages[f"index.{cfg.ext}"] = _html_page(title, body)
        return pages

    groups: dict[str, list[Entry]] = {}
    for entry in c.entries:
        groups.setdefault(_group_value(entry, cfg), []).append(entry)
    taken: set[str] = set()
    slugs = {value: _slug(value, taken) for value in sorted(groups)}

    for value in sorted(groups):
        slug = slugs[value]
        table = _overview_table(groups[value], cfg, "../", plot_ids)
        if cfg.format == "markdown":
            pages[f"groups/{slug}.{cfg.ext}"] = \
                f"# {value}\n\n{len(groups[value])} entr" \
                f"{'y' if len(groups[value]) == 1 else 'ies'}.\n\n{table}"
        else:
            body = (f"<h1>{html_lib.escape(value)}</h1>\n"
                    f"<p>{len(groups[value])} entr"
                    f"{'y' if len(groups[value]) == 1 else 'ies'}.</p>\n")
            pages[f"groups/{slug}.{cfg.ext}"] = _html_page(value, body + table)

    if cfg.format == "markdown":
        lines = [f"# {title}\n", f"{len(c)} entr"
                 f"{'y' if len(c) == 1 else 'ies'} in {len(groups)} "
                 f"group(s).\n"]
        rows = [[f"[{value}](groups/{slugs[value]}.{cfg.ext})",
                 str(len(groups[value]))] for value in sorted(groups)]
        lines.append(_md_table(["group", "entries"], rows))
        pages[f"index.{cfg.ext}"] = "\n".join(lines)
    else:
        rows = [[f'<a href="groups/{slugs[value]}.{cfg.ext}">'
                 f'{html_lib.escape(value)}</a>', str(len(groups[value]))]
                for value in sorted(groups)]
        body = (f"<h1>{title}</h1>\n<p>{len(c)} entr"
                f"{'y' if len(c) == 1 else 'ies'} in {len(groups)} "
                f"group(s).</p>\n"
                + _html_table(["group", "entries"], rows, raw_columns={0}))
        pages[f"index.{cfg.ext}"] = _html_page(title, body)
    return pages


def write_report(c: Collection, cfg: ReportConfig) -> list[Path]:
    """Render and write the full page tree under cfg.out_dir."""
    pages = render_index(c, cfg)
    written = []
    for rel_path in sorted(pages):
        target = cfg.out_dir / rel_path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(pages[rel_path], encoding="utf-8")
        written.append(target)
    return written
