"""unitpack: file-system-native toolkit for unit-aware data packages.

Auto-annotate research files with sidecar metadata, bundle CSV +
metadata into single-resource data packages whose fields carry units,
and filter, rescale, compute with, and report on collections of those
packages.
"""

from .collection import (
    Collection,
    Profile,
    describe,
    from_archive,
    from_directory,
)
from .datapackage import (
    Entry,
    FieldSpec,
    build_entry,
    field_quantity,
    load_entry,
    rescale,
    save_entry,
)
from .errors import UnitpackError
from .metadata import (
    MetadataDoc,
    SchemaDoc,
    load_document,
    load_schema,
    scan_metadata_directory,
    validate,
)
from .tabular import LoaderSpec, Table, apply_loader, read_table, write_table
from .units import (
    Dimension,
    Quantity,
    UnitExpr,
    conversion_factor,
    convert_to,
    parse_quantity,
    parse_unit,
)

__version__ = "0.1.0"

__all__ = [
    "Collection",
    "Dimension",
    "Entry",
    "FieldSpec",
    "LoaderSpec",
    "MetadataDoc",
    "Profile",
    "Quantity",
    "SchemaDoc",
    "Table",
    "UnitExpr",
    "UnitpackError",
    "apply_loader",
    "build_entry",
    "conversion_factor",
    "convert_to",
    "describe",
    "field_quantity",
    "from_archive",
    "from_directory",
    "load_document",
    "load_entry",
    "load_schema",
    "parse_quantity",
    "parse_unit",
    "read_table",
    "rescale",
    "save_entry",
    "scan_metadata_directory",
    "validate",
    "write_table",
]
