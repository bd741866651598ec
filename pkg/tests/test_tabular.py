import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitpack import tabular
from unitpack.errors import (
    DuplicateColumnName,
    HeaderRowOutOfRange,
    LoaderSpecError,
    RaggedRow,
    RenameSourceMissing,
)
from unitpack.tabular import LoaderSpec, Table


# -------------------------------
# read_table
# -------------------------------

def test_read_demo_csv(tmp_path, demo_paths):
    table = tabular.read_table(demo_paths[0])
    assert table.columns == ("t", "U", "T")
    assert table.rows[0] == (0, 1.01, 275)
    assert table.row_count == 3


def test_header_only_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("t,U,T\n", encoding="utf-8")
    table = tabular.read_table(path)
    assert table.columns == ("t", "U", "T")
    assert table.row_count == 0


def test_duplicate_column_rejected(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("t,U,U\n0,1,2\n", encoding="utf-8")
    with pytest.raises(DuplicateColumnName):
        tabular.read_table(path)


def test_ragged_row_reports_index(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("t,U\n0,1\n2\n", encoding="utf-8")
    with pytest.raises(RaggedRow) as excinfo:
        tabular.read_table(path)
    assert excinfo.value.row_index == 1


def test_quoted_fields_and_embedded_commas(tmp_path):
    path = tmp_path / "quoted.csv"
    path.write_text('name,note\nx,"a, b"\ny,"line1\nline2"\n',
                    encoding="utf-8")
    table = tabular.read_table(path)
    assert table.rows[0] == ("x", "a, b")
    assert table.rows[1] == ("y", "line1\nline2")


def test_cell_typing_rules(tmp_path):
    path = tmp_path / "typed.csv"
    path.write_text("a,b,c,d,e,f\n1,1.5,-2e3,NaN,inf,\n", encoding="utf-8")
    row = tabular.read_table(path).rows[0]
    assert row == (1, 1.5, -2000.0, "NaN", "inf", None)
    assert isinstance(row[0], int) and isinstance(row[1], float)


def test_bom_tolerated(tmp_path):
    path = tmp_path / "bom.csv"
    path.write_bytes(b"\xef\xbb\xbft,U\n0,1\n")
    assert tabular.read_table(path).columns == ("t", "U")


# -------------------------------
# write_table
# -------------------------------

def test_write_read_roundtrip(tmp_path):
    table = Table(columns=("t", "note", "x"),
                  rows=((0, "plain", 1.25), (1, "with, comma", None),
                        (2, 'quo"te', -3.5e-7)))
    path = tmp_path / "out.csv"
    tabular.write_table(table, path)
    assert tabular.read_table(path) == table


def test_comma_cell_is_quoted(tmp_path):
    table = Table(columns=("note",), rows=(("a, b",),))
    path = tmp_path / "q.csv"
    tabular.write_table(table, path)
    assert '"a, b"' in path.read_text(encoding="utf-8")


def test_zero_row_table_writes_header_only(tmp_path):
    table = Table(columns=("t", "U"), rows=())
    path = tmp_path / "zero.csv"
    tabular.write_table(table, path)
    assert path.read_text(encoding="utf-8") == "t,U\n"


# -------------------------------
# LoaderSpec + apply_loader
# -------------------------------

WILD_FILE = """Device: Frobulator 3000
Operator: MD
Started: 09:00
voltage [mV],temp
1.5,275
2.5,275
3.5,276
END OF RUN
STATUS OK
"""


def test_loader_standardizes_wild_file(tmp_path):
    path = tmp_path / "wild.txt"
    path.write_text(WILD_FILE, encoding="utf-8")
    spec = LoaderSpec(header_row=3, skip_footer=2,
                      rename={"voltage [mV]": "U"})
    table = tabular.apply_loader(path, spec)
    assert table.columns == ("U", "temp")
    # oracle: manual line count (3 preamble + header + 3 data + 2 footer)
    assert table.row_count == 3
    assert table.column_values("U") == (1.5, 2.5, 3.5)


def test_default_spec_equals_read_table(tmp_path, demo_paths):
    direct = tabular.read_table(demo_paths[0])
    assert tabular.apply_loader(demo_paths[0], LoaderSpec()) == direct


def test_loader_preserves_cell_values(tmp_path):
    path = tmp_path / "wild.txt"
    path.write_text(WILD_FILE, encoding="utf-8")
    spec = LoaderSpec(header_row=3, skip_footer=2,
                      rename={"voltage [mV]": "U"})
    table = tabular.apply_loader(path, spec)
    source_numbers = sorted([1.5, 275, 2.5, 275, 3.5, 276])
    loaded = sorted(c for row in table.rows for c in row)
    assert loaded == source_numbers


def test_comment_prefix_lines_dropped(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("# setup note\nt,U\n# mid comment\n0,1\n",
                    encoding="utf-8")
    table = tabular.apply_loader(path, LoaderSpec(comment_prefix="#"))
    assert table.row_count == 1


def test_decimal_comma(tmp_path):
    path = tmp_path / "de.csv"
    path.write_text("t;U\n0;1,5\n1;2,25\n", encoding="utf-8")
    spec = LoaderSpec(delimiter=";", decimal_separator=",")
    table = tabular.apply_loader(path, spec)
    assert table.column_values("U") == (1.5, 2.25)


def test_header_row_out_of_range(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("t,U\n0,1\n", encoding="utf-8")
    with pytest.raises(HeaderRowOutOfRange):
        tabular.apply_loader(path, LoaderSpec(header_row=5))


def test_rename_source_missing(tmp_path, demo_paths):
    with pytest.raises(RenameSourceMissing):
        tabular.apply_loader(demo_paths[0], LoaderSpec(rename={"nope": "U"}))


def test_spec_validation():
    with pytest.raises(LoaderSpecError):
        LoaderSpec(delimiter=",", decimal_separator=",")
    with pytest.raises(LoaderSpecError):
        LoaderSpec(rename={"a": "X", "b": "X"})
    with pytest.raises(LoaderSpecError):
        LoaderSpec(delimiter="")
    with pytest.raises(LoaderSpecError):
        LoaderSpec(skip_footer=-1)


def test_load_loader_spec_file(tmp_path):
    path = tmp_path / "loader.yaml"
    path.write_text(
        'delimiter: ","\ndecimal_separator: "."\nheader_row: 3\n'
        'skip_footer: 2\ncomment_prefix: "#"\nrename:\n'
        '  "voltage [mV]": "U"\n', encoding="utf-8")
    spec = tabular.load_loader_spec(path)
    assert spec.header_row == 3
    assert spec.skip_footer == 2
    assert spec.rename == {"voltage [mV]": "U"}
    bad = tmp_path / "bad.yaml"
    bad.write_text("unknown_key: 1\n", encoding="utf-8")
    with pytest.raises(LoaderSpecError):
        tabular.load_loader_spec(bad)


# -------------------------------
# round-trip property
# -------------------------------

_names = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_", min_size=1,
                 max_size=8)
# strings that cannot be mistaken for numbers or empty cells
_safe_text = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyz ,\"'\n", min_size=1, max_size=12
).filter(lambda s: s.strip() != "")
_cells = st.one_of(st.none(),
                   st.integers(min_value=-10**6, max_value=10**6),
                   st.floats(allow_nan=False, allow_infinity=False),
                   _safe_text)


@st.composite
def tables(draw):
    columns = draw(st.lists(_names, min_size=1, max_size=5, unique=True))
    n_rows = draw(st.integers(min_value=0, max_value=8))
    rows = tuple(tuple(draw(_cells) for _ in columns) for _ in range(n_rows))
    return Table(columns=tuple(columns), rows=rows)


@settings(max_examples=150, deadline=None)
@given(tables())
def test_roundtrip_property(tmp_path_factory, table):
    path = tmp_path_factory.mktemp("rt") / "t.csv"
    tabular.write_table(table, path)
    assert tabular.read_table(path) == table
