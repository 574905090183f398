"""Stream conversions: flatten, group, extend, project, and composition.

Flattening concatenates element contents in order.  Grouping batches a
flat stream into count-sized elements.  Extending embeds triples/graphs
into the quad/dataset world by placing everything in the default graph;
projection is its safe inverse and refuses named-graph content.

convert() composes these primitives along a taxonomy conversion path, so
e.g. a graph stream reaches a flat quad stream via extend then flatten
under the transitive policy.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence, Union

from .errors import InvalidBatchSize, MixedPayload, NamedGraphPresent, NoConversionPath
from .model import Dataset, Graph, Quad, Statement, Triple
from .taxonomy import InferredTaxonomy, conversion_path

Element = Union[Graph, Dataset]


def flatten_graphs(elements: Iterable[Graph]) -> Iterator[Triple]:
    """Concatenate the triples of each graph, preserving both orders."""
    for g in elements:
        yield from g


def flatten_datasets(elements: Iterable[Dataset]) -> Iterator[Quad]:
    """Concatenate dataset contents: default graph first, then named graphs
    in first-occurrence order."""
    for d in elements:
        for t in d.default_graph:
            yield Quad(t.subject, t.predicate, t.object)
        for name, graph in d.named_items():
            for t in graph:
                yield Quad(t.subject, t.predicate, t.object, name)


def group_statements(
    statements: Iterable[Statement],
    batch_size: int = 1,
    kind: str | None = None,
) -> Iterator[Element]:
    """Batch consecutive statements into elements of batch_size (last may
    be smaller).

    kind forces 'graphs' or 'datasets'; by default the first statement
    decides (Triple -> graphs, Quad -> datasets).  Duplicates within one
    batch are absorbed by set semantics.
    """
    if batch_size < 1:
        raise InvalidBatchSize(f"batch size must be >= 1, got {batch_size}")
    if kind not in (None, "graphs", "datasets"):
        raise ValueError(f"kind must be 'graphs' or 'datasets', got {kind!r}")

    def emit(batch: list[Statement], want: str) -> Element:
        if want == "graphs":
            triples = []
            for st in batch:
                if isinstance(st, Quad):
                    if st.graph_label is not None:
                        raise MixedPayload("cannot group a named-graph quad into a graph")
                    st = st.triple()
                triples.append(st)
            return Graph(triples)
        return Dataset.from_quads(
            st if isinstance(st, Quad) else Quad(st.subject, st.predicate, st.object)
            for st in batch
        )

    def run() -> Iterator[Element]:
        want = kind
        batch: list[Statement] = []
        for st in statements:
            if want is None:
                want = "datasets" if isinstance(st, Quad) else "graphs"
            batch.append(st)
            if len(batch) == batch_size:
                yield emit(batch, want)
                batch = []
        if batch:
            assert want is not None
            yield emit(batch, want)

    return run()


def extend(items: Iterable, source_kind: str) -> Iterator:
    """Embed triples as default-graph quads or graphs as datasets."""
    if source_kind == "triples":
        for st in items:
            if not isinstance(st, Triple):
                raise MixedPayload(f"extend expected Triple, got {type(st).__name__}")
            yield Quad(st.subject, st.predicate, st.object)
    elif source_kind == "graphs":
        for g in items:
            if not isinstance(g, Graph):
                raise MixedPayload(f"extend expected Graph, got {type(g).__name__}")
            yield Dataset(default_graph=g)
    else:
        raise ValueError(f"source_kind must be 'triples' or 'graphs', got {source_kind!r}")


def project(items: Iterable, source_kind: str) -> Iterator:
    """Inverse of extend; fails on the first element with named-graph content."""
    if source_kind == "quads":
        for i, st in enumerate(items):
            if not isinstance(st, Quad):
                raise MixedPayload(f"project expected Quad, got {type(st).__name__}")
            if st.graph_label is not None:
                raise NamedGraphPresent(i, f"quad {i} has graph label {st.graph_label}")
            yield st.triple()
    elif source_kind == "datasets":
        for i, d in enumerate(items):
            if not isinstance(d, Dataset):
                raise MixedPayload(f"project expected Dataset, got {type(d).__name__}")
            if d.named_items():
                raise NamedGraphPresent(i, f"dataset {i} contains named graphs")
            yield d.default_graph
    else:
        raise ValueError(f"source_kind must be 'quads' or 'datasets', got {source_kind!r}")


# ---------------------------------------------------------------------------
# Composition along taxonomy paths
# ---------------------------------------------------------------------------

_KIND_ANCHORS = (
    ("flatTripleStream", "triples"),
    ("flatQuadStream", "quads"),
    ("graphStream", "graphs"),
    ("datasetStream", "datasets"),
)


def payload_kind(inferred: InferredTaxonomy, type_id: str) -> str:
    """Payload kind of a concrete type: which built-in anchor it descends from."""
    inferred.taxonomy.type(type_id)
    matches = [
        kind
        for anchor, kind in _KIND_ANCHORS
        if type_id == anchor or (type_id, anchor) in inferred.broader_closure
    ]
    if len(matches) != 1:
        raise ValueError(f"cannot determine the payload kind of {type_id}")
    return matches[0]


def convert(
    items: Iterable,
    from_type: str,
    to_type: str,
    inferred: InferredTaxonomy,
    policy: str = "strict",
    batch_size: int | None = None,
) -> Iterator:
    """Convert a stream between two concrete stream types.

    Applies the primitives dictated by conversionPath(policy); grouping
    steps use batch_size (default 1).  Raises NoConversionPath when the
    policy admits no plan.
    """
    for type_id in (from_type, to_type):
        t = inferred.taxonomy.type(type_id)
        if t.kind.value != "concrete":
            raise ValueError(f"conversion endpoints must be concrete types, got {type_id}")
    if batch_size is not None and batch_size < 1:
        raise InvalidBatchSize(f"batch size must be >= 1, got {batch_size}")
    steps = conversion_path(inferred, from_type, to_type, policy)
    if steps is None:
        raise NoConversionPath(from_type, to_type, policy)

    kind = payload_kind(inferred, from_type)
    out: Iterable = items
    for step in steps:
        if step.relation == "flatten":
            if kind == "graphs":
                out, kind = flatten_graphs(out), "triples"
            elif kind == "datasets":
                out, kind = flatten_datasets(out), "quads"
            else:
                raise MixedPayload(f"cannot flatten a {kind} stream")
        elif step.relation == "group":
            if kind == "triples":
                out, kind = group_statements(out, batch_size or 1, kind="graphs"), "graphs"
            elif kind == "quads":
                out, kind = group_statements(out, batch_size or 1, kind="datasets"), "datasets"
            else:
                raise MixedPayload(f"cannot group a {kind} stream")
        elif step.relation == "extend":
            if kind == "triples":
                out, kind = extend(out, "triples"), "quads"
            elif kind == "graphs":
                out, kind = extend(out, "graphs"), "datasets"
            else:
                raise MixedPayload(f"cannot extend a {kind} stream")
        else:  # pragma: no cover - conversion_path emits only these three
            raise AssertionError(step.relation)
    expect = payload_kind(inferred, to_type)
    if kind != expect:
        raise MixedPayload(
            f"conversion plan ends at a {kind} stream but {to_type} holds {expect}"
        )
    return iter(out)


def element_sizes(elements: Sequence[Element]) -> list[int]:
    """Statement count per element; handy for size-preserving regroup checks."""
    out = []
    for e in elements:
        out.append(len(e) if isinstance(e, Graph) else e.statement_count())
    return out
