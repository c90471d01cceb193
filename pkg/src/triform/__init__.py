"""triform: one common-graph data model, three schema dialects.

Validates common graphs against SHACL, ShEx, and PG-Schema core
schemas, checks membership in the shared fragment the three dialects
agree on, compiles that fragment to the other two dialects, and ships a
differential harness that cross-checks all of it.
"""

from .model import (
    CommonGraph,
    DuplicateKeyValue,
    EdgeNotInGraph,
    EdgeTriple,
    Focus,
    FormatError,
    InstanceTooLarge,
    NeighborhoodTooLarge,
    Node,
    NotInFragment,
    NotNormalized,
    PropTriple,
    SortClash,
    SortError,
    TriformError,
    UnknownValueType,
    Val,
    Value,
    ValueTypeRegistry,
    bool_v,
    build_graph,
    content,
    int_v,
    neigh,
    neigh_signed,
    str_v,
    value_type_member,
)
from .report import ValidationReport

__version__ = "0.1.0"
