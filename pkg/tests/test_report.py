import posixpath
import re

import pytest

from unitpack.collection import Collection
from unitpack.datapackage import Entry, FieldSpec
from unitpack.errors import NonNumericCell, TooFewPoints, UnknownField
from unitpack.metadata import MetadataDoc
from unitpack.report import (
    ReportConfig,
    render_entry_page,
    render_index,
    render_plot,
    write_report,
)
from unitpack.tabular import Table

from conftest import material_entry


def _cfg(tmp_path, **overrides):
    kwargs = dict(
        out_dir=tmp_path / "site", plot_x="t", plot_y="U",
        group_by="system.electrodes.working_electrode.material",
        descriptor_columns=(("user", "user"),
                            ("material",
                             "system.electrodes.working_electrode.material")),
        format="markdown")
    kwargs.update(overrides)
    return ReportConfig(**kwargs)


# -------------------------------
# render_plot
# -------------------------------

def test_plot_demo_entry(demo_entry):
    svg = render_plot(demo_entry, "t", "U")
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 1
    points = re.search(r'points="([^"]+)"', svg).group(1).split()
    assert len(points) == 3
    assert "U [mV]" in svg
    assert "t [s]" in svg


def test_plot_two_points_is_segment():
    entry = material_entry("seg", "Pt", rows=((0, 1.0), (1, 2.0)))
    svg = render_plot(entry, "t", "U")
    points = re.search(r'points="([^"]+)"', svg).group(1).split()
    assert len(points) == 2


def test_plot_constant_y_maps_to_midline():
    entry = material_entry("flat", "Pt", rows=((0, 5.0), (1, 5.0), (2, 5.0)))
    svg = render_plot(entry, "t", "U")
    points = re.search(r'points="([^"]+)"', svg).group(1).split()
    # oracle: the mapping formula with zero y-range puts every point at
    # the vertical center of the 300-high viewport
    for pair in points:
        assert pair.endswith(",150.00")


def test_plot_error_cases(demo_entry):
    with pytest.raises(UnknownField):
        render_plot(demo_entry, "t", "nope")
    single = material_entry("one", "Pt", rows=((0, 1.0),))
    with pytest.raises(TooFewPoints):
        render_plot(single, "t", "U")
    stringy = Entry(
        identifier="s",
        fields=(FieldSpec(name="t"), FieldSpec(name="U", type="string")),
        table=Table(columns=("t", "U"), rows=((0, "a"), (1, "b"))),
        metadata=MetadataDoc(root={}))
    with pytest.raises(NonNumericCell):
        render_plot(stringy, "t", "U")


def test_plot_deterministic(demo_entry):
    assert render_plot(demo_entry, "t", "U") == \
        render_plot(demo_entry, "t", "U")


# -------------------------------
# render_entry_page
# -------------------------------

def test_entry_page_preview_header(demo_entry, tmp_path):
    page = render_entry_page(demo_entry, _cfg(tmp_path, group_by=None,
                                              descriptor_columns=()))
    assert "| t [s] | U [mV] | T [K] |" in page
    assert page.startswith("# data\n")
    assert "![data](../plots/data.svg)" in page


def test_entry_page_missing_descriptor_is_dash(demo_entry, tmp_path):
    cfg = _cfg(tmp_path, descriptor_columns=(("ghost", "no.such.path"),))
    page = render_entry_page(demo_entry, cfg)
    assert "| ghost | — |" in page


def test_entry_page_placeholder_on_plot_failure(tmp_path):
    stringy = Entry(
        identifier="s",
        fields=(FieldSpec(name="t", type="string"),
                FieldSpec(name="U", type="string")),
        table=Table(columns=("t", "U"), rows=(("a", "b"),)),
        metadata=MetadataDoc(root={"user": "x"}))
    page = render_entry_page(stringy, _cfg(tmp_path, descriptor_columns=()))
    assert "no plot available" in page
    assert "plots/" not in page


def test_entry_page_preview_capped_at_10_rows(tmp_path):
    entry = material_entry("long", "Pt",
                           rows=tuple((i, float(i)) for i in range(25)))
    page = render_entry_page(entry, _cfg(tmp_path, descriptor_columns=()))
    data_rows = [line for line in page.splitlines()
                 if re.match(r"^\| \d", line)]
    assert len(data_rows) == 10
    assert "25 row(s) total" in page


def test_entry_page_html(demo_entry, tmp_path):
    page = render_entry_page(demo_entry, _cfg(tmp_path, format="html",
                                              descriptor_columns=()))
    assert page.startswith("<!DOCTYPE html>")
    assert "<script" not in page
    assert "<h1>data</h1>" in page
    assert 'src="../plots/data.svg"' in page


# -------------------------------
# render_index
# -------------------------------

def test_grouped_page_set(material_collection, tmp_path):
    pages = render_index(material_collection, _cfg(tmp_path))
    # oracle: 2 group pages (Pt, Au) + 3 entry pages + 1 root index
    # + 3 plots
    groups = [p for p in pages if p.startswith("groups/")]
    entries = [p for p in pages if p.startswith("entries/")]
    plots = [p for p in pages if p.startswith("plots/")]
    assert len(groups) == 2
    assert len(entries) == 3
    assert len(plots) == 3
    assert "index.md" in pages
    assert sorted(groups) == ["groups/au.md", "groups/pt.md"]


def test_every_entry_once_across_overviews(material_collection, tmp_path):
    pages = render_index(material_collection, _cfg(tmp_path))
    overview_text = "".join(v for k, v in pages.items()
                            if k.startswith("groups/"))
    for identifier in material_collection.identifiers:
        assert overview_text.count(f"(../entries/{identifier}.md)") == 1


def test_ungrouped_index_lists_all(material_collection, tmp_path):
    pages = render_index(material_collection, _cfg(tmp_path, group_by=None))
    assert [p for p in pages if p.startswith("groups/")] == []
    index = pages["index.md"]
    rows = [line for line in index.splitlines()
            if line.startswith("| ![")]
    assert len(rows) == 3
    # sorted by identifier
    assert index.find("cv-au-1") < index.find("cv-pt-1") \
        < index.find("cv-pt-2")


def test_empty_collection_index(tmp_path):
    pages = render_index(Collection(entries=()), _cfg(tmp_path,
                                                      group_by=None))
    assert list(pages) == ["index.md"]
    assert "0 entries" in pages["index.md"]


def test_missing_group_value_becomes_ungrouped(tmp_path):
    entry = material_entry("nogroup", "Pt")
    cfg = _cfg(tmp_path, group_by="no.such.path")
    pages = render_index(Collection(entries=(entry,)), cfg)
    assert "groups/ungrouped.md" in pages


# -------------------------------
# determinism + link closure
# -------------------------------

def test_render_deterministic(material_collection, tmp_path):
    cfg = _cfg(tmp_path)
    assert render_index(material_collection, cfg) == \
        render_index(material_collection, cfg)


def _links_in(page_path: str, content: str, fmt: str):
    if fmt == "markdown":
        for match in re.finditer(r"\]\(([^)]+)\)", content):
            yield match.group(1)
    else:
        for match in re.finditer(r'(?:src|href)="([^"]+)"', content):
            yield match.group(1)


@pytest.mark.parametrize("fmt", ["markdown", "html"])
def test_link_closure(material_collection, tmp_path, fmt):
    pages = render_index(material_collection, _cfg(tmp_path, format=fmt))
    for page_path, content in pages.items():
        if page_path.endswith(".svg"):
            continue
        base = posixpath.dirname(page_path)
        for link in _links_in(page_path, content, fmt):
            resolved = posixpath.normpath(posixpath.join(base, link))
            assert resolved in pages, \
                f"{page_path} links to {link} -> {resolved} (missing)"


def test_write_report_writes_closed_tree(material_collection, tmp_path):
    cfg = _cfg(tmp_path)
    written = write_report(material_collection, cfg)
    assert all(path.is_file() for path in written)
    out_dir = cfg.out_dir
    on_disk = {str(p.relative_to(out_dir)) for p in out_dir.rglob("*")
               if p.is_file()}
    assert on_disk == set(render_index(material_collection, cfg))


def test_config_validation(tmp_path):
    with pytest.raises(Exception):
        ReportConfig(out_dir=tmp_path, plot_x="t", plot_y="t")
    with pytest.raises(Exception):
        ReportConfig(out_dir=tmp_path, plot_x="t", plot_y="U",
                     format="pdf")
