"""stax-kit: streaming RDF toolkit.

Parse and serialize flat (N-Triples/N-Quads) and grouped (framed or
directory-backed) RDF streams, classify them against a stream type
taxonomy, convert between stream types, and validate stream type
annotation manifests.
"""

from .annotate import (
    AnnotationManifest,
    CrossCheckEntry,
    StreamTypeUsage,
    ValidationReport,
    Violation,
    cross_check,
    emit_turtle,
    load_manifest,
    validate_usages,
)
from .classify import (
    ClassificationReport,
    ClassifierConfig,
    ClassifierState,
    ElementVerdict,
    SubjectRegistry,
    TypeVerdict,
    candidate_subject_nodes,
    check_named_graph_shape,
    check_timestamped_named_graph,
    classify_element,
    classify_stream,
)
from .convert import (
    convert,
    extend,
    flatten_datasets,
    flatten_graphs,
    group_statements,
    payload_kind,
    project,
)
from .errors import (
    CycleError,
    DanglingReference,
    EmptyUsages,
    InvalidBatchSize,
    MalformedIri,
    MixedPayload,
    NamedGraphPresent,
    NoConversionPath,
    ParseError,
    SchemaError,
    StaxError,
    UnknownStreamType,
    UnknownType,
)
from .io import (
    Framing,
    LineKind,
    ParsedLine,
    parse_statement_line,
    read_flat_stream,
    read_grouped_stream,
    serialize_statement,
    serialize_term,
    write_dir_stream,
    write_flat_stream,
    write_grouped_stream,
)
from .model import (
    RDF_LANGSTRING,
    XSD_STRING,
    BlankNode,
    Dataset,
    Graph,
    Iri,
    Literal,
    Quad,
    Triple,
)
from .taxonomy import (
    ConversionStep,
    InferredTaxonomy,
    STAX_NS,
    StreamType,
    Taxonomy,
    TypeKind,
    conversion_path,
    default_taxonomy,
    infer_closure,
    load_taxonomy,
    most_specific,
    relates,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationManifest",
    "BlankNode",
    "ClassificationReport",
    "ClassifierConfig",
    "ClassifierState",
    "ConversionStep",
    "CrossCheckEntry",
    "CycleError",
    "DanglingReference",
    "Dataset",
    "ElementVerdict",
    "EmptyUsages",
    "Framing",
    "Graph",
    "InferredTaxonomy",
    "InvalidBatchSize",
    "Iri",
    "LineKind",
    "Literal",
    "MalformedIri",
    "MixedPayload",
    "NamedGraphPresent",
    "NoConversionPath",
    "ParseError",
    "ParsedLine",
    "Quad",
    "RDF_LANGSTRING",
    "STAX_NS",
    "SchemaError",
    "StaxError",
    "StreamType",
    "StreamTypeUsage",
    "SubjectRegistry",
    "Taxonomy",
    "Triple",
    "TypeKind",
    "TypeVerdict",
    "UnknownStreamType",
    "UnknownType",
    "ValidationReport",
    "Violation",
    "XSD_STRING",
    "candidate_subject_nodes",
    "check_named_graph_shape",
    "check_timestamped_named_graph",
    "classify_element",
    "classify_stream",
    "conversion_path",
    "convert",
    "cross_check",
    "default_taxonomy",
    "emit_turtle",
    "extend",
    "flatten_datasets",
    "flatten_graphs",
    "group_statements",
    "infer_closure",
    "load_manifest",
    "load_taxonomy",
    "most_specific",
    "parse_statement_line",
    "payload_kind",
    "project",
    "read_flat_stream",
    "read_grouped_stream",
    "relates",
    "serialize_statement",
    "serialize_term",
    "validate_usages",
    "write_dir_stream",
    "write_flat_stream",
    "write_grouped_stream",
]
