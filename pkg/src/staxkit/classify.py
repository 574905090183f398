"""Single-pass stream classifier.

Checks every concrete stream type applicable to the input's framing:

* flat framings are classified by the framing itself (a triple file is a
  flat triple stream, a quad file a flat quad stream);
* graph framings check, per element, whether some IRI node reaches every
  node of the graph along subject-to-object edges and is unused so far in
  the stream (subject graph stream);
* dataset framings check the one-named-graph shape (named graph stream)
  and the presence of a timestamp triple about the graph name in the
  default graph, with non-decreasing timestamps (timestamped named graph
  stream).

The engine reads each element once.  Memory is bounded except for the
subject registry (one entry per element of a conforming subject graph
stream) and the capped evidence buffer.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, Union

from .io import Framing, Source, read_flat_stream, read_grouped_stream
from .model import Dataset, Graph, Iri, Literal, Quad, Statement, Term
from .taxonomy import InferredTaxonomy, default_taxonomy, infer_closure, most_specific

PROV_GENERATED_AT_TIME = Iri("http://www.w3.org/ns/prov#generatedAtTime")

XSD_DATETIME = "http://www.w3.org/2001/XMLSchema#dateTime"
XSD_DATE = "http://www.w3.org/2001/XMLSchema#date"
XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"
XSD_DECIMAL = "http://www.w3.org/2001/XMLSchema#decimal"


@dataclass(frozen=True, slots=True)
class ClassifierConfig:
    timestamp_predicates: frozenset[Iri] = frozenset({PROV_GENERATED_AT_TIME})
    check_timestamp_order: bool = True
    max_evidence: int = 10

    def __post_init__(self) -> None:
        if not self.timestamp_predicates:
            raise ValueError("timestamp_predicates must not be empty")
        if self.max_evidence < 0:
            raise ValueError("max_evidence must be non-negative")


class SubjectRegistry:
    """Chosen subject IRIs, each mapped to the element index that first used it."""

    __slots__ = ("_used",)

    def __init__(self) -> None:
        self._used: dict[str, int] = {}

    def __contains__(self, iri: Iri) -> bool:
        return iri.value in self._used

    def first_use(self, iri: Iri) -> int:
        return self._used[iri.value]

    def register(self, iri: Iri, element_index: int) -> None:
        if iri.value in self._used:
            raise ValueError(f"subject {iri} already registered")
        self._used[iri.value] = element_index

    def __len__(self) -> int:
        return len(self._used)


@dataclass(frozen=True, slots=True)
class TypeVerdict:
    passed: bool
    reason: str | None = None
    detail: str | None = None


@dataclass(frozen=True, slots=True)
class ElementVerdict:
    element_index: int
    per_type: dict[str, TypeVerdict]
    notes: tuple[str, ...] = ()

    def failed_types(self) -> tuple[str, ...]:
        return tuple(t for t, v in self.per_type.items() if not v.passed)


@dataclass(frozen=True, slots=True)
class FirstViolation:
    element_index: int
    reason: str


@dataclass(frozen=True)
class ClassificationReport:
    framing: Framing
    element_count: int
    statement_count: int
    applicable: tuple[str, ...]
    conforming: tuple[str, ...]
    most_specific: tuple[str, ...]
    first_violation: dict[str, FirstViolation]
    vacuous: bool
    ambiguous: bool
    notes: tuple[str, ...]
    evidence: tuple[ElementVerdict, ...]

    def to_dict(self) -> dict:
        return {
            "framing": self.framing.value,
            "elementCount": self.element_count,
            "statementCount": self.statement_count,
            "applicable": list(self.applicable),
            "conforming": list(self.conforming),
            "mostSpecific": list(self.most_specific),
            "vacuous": self.vacuous,
            "ambiguous": self.ambiguous,
            "firstViolation": {
                t: {"elementIndex": v.element_index, "reason": v.reason}
                for t, v in sorted(self.first_violation.items())
            },
            "notes": list(self.notes),
            "evidence": [
                {
                    "elementIndex": ev.element_index,
                    "verdicts": {
                        t: (
                            {"pass": True}
                            if v.passed
                            else {
                                "pass": False,
                                "reason": v.reason,
                                **({"detail": v.detail} if v.detail else {}),
                            }
                        )
                        for t, v in ev.per_type.items()
                    },
                    "notes": list(ev.notes),
                }
                for ev in self.evidence
            ],
        }


# ---------------------------------------------------------------------------
# Element-level checks
# ---------------------------------------------------------------------------


def candidate_subject_nodes(graph: Graph) -> frozenset[Iri]:
    """IRI nodes from which every node of the graph is reachable.

    Reachability follows subject-to-object edges only.  Predicates are not
    nodes.  An empty graph has no candidates.
    """
    nodes = graph.nodes()
    if not nodes:
        return frozenset()
    adjacency: dict[Term, list[Term]] = {}
    for t in graph:
        adjacency.setdefault(t.subject, []).append(t.object)
    out: set[Iri] = set()
    for start in nodes:
        if not isinstance(start, Iri):
            continue
        seen: set[Term] = {start}
        stack: list[Term] = [start]
        while stack:
            n = stack.pop()
            for m in adjacency.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        if len(seen) == len(nodes):
            out.add(start)
    return frozenset(out)


def check_named_graph_shape(dataset: Dataset) -> tuple[Term, Graph] | None:
    """The (name, graph) pair when the dataset has exactly one named graph.

    Default-graph content never disqualifies the shape.
    """
    items = dataset.named_items()
    if len(items) != 1:
        return None
    return items[0]


def check_timestamped_named_graph(
    dataset: Dataset, cfg: ClassifierConfig
) -> tuple[Term, Iri, Term] | None:
    """The (name, predicate, timestamp) of the first timestamp triple.

    Requires the one-named-graph shape; the timestamp triple must sit in
    the default graph with the graph name as its subject.  When several
    triples qualify the first one in document order wins.
    """
    shape = check_named_graph_shape(dataset)
    if shape is None:
        return None
    name, _ = shape
    predicates = {p.value for p in cfg.timestamp_predicates}
    for t in dataset.default_graph:
        if t.subject == name and t.predicate.value in predicates:
            return name, t.predicate, t.object
    return None


def _count_timestamp_triples(dataset: Dataset, name: Term, cfg: ClassifierConfig) -> int:
    predicates = {p.value for p in cfg.timestamp_predicates}
    return sum(
        1
        for t in dataset.default_graph
        if t.subject == name and t.predicate.value in predicates
    )


def comparable_timestamp(term: Term) -> tuple[str, object] | None:
    """(comparability domain, value) for an orderable timestamp, else None.

    Chronological values split into offset-aware and naive domains because
    the two cannot be compared; dates are promoted to naive midnights.
    Numeric timestamps share one decimal domain.  Everything else is
    incomparable and never participates in order checking.
    """
    if not isinstance(term, Literal):
        return None
    lex = term.lexical.strip()
    try:
        if term.datatype == XSD_DATETIME:
            dt = datetime.fromisoformat(lex.replace("Z", "+00:00"))
            domain = "chrono-aware" if dt.tzinfo is not None else "chrono-naive"
            return domain, dt
        if term.datatype == XSD_DATE:
            dt = datetime.fromisoformat(lex.replace("Z", "+00:00"))
            if dt.tzinfo is not None:
                dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
            return "chrono-naive", datetime(dt.year, dt.month, dt.day)
        if term.datatype in (XSD_INTEGER, XSD_DECIMAL):
            return "numeric", Decimal(lex)
    except (ValueError, InvalidOperation):
        return None
    return None


# ---------------------------------------------------------------------------
# Streaming engine
# ---------------------------------------------------------------------------

GRAPH_TYPES = ("graphStream", "subjectGraphStream")
DATASET_TYPES = ("datasetStream", "namedGraphStream", "timestampedNamedGraphStream")

_PASS = TypeVerdict(True)


class ClassifierState:
    """Mutable cross-element state of one classification run."""

    __slots__ = ("subjects", "order_max")

    def __init__(self) -> None:
        self.subjects = SubjectRegistry()
        # (predicate value, comparability domain) -> (max value, its element index)
        self.order_max: dict[tuple[str, str], tuple[object, int]] = {}


def classify_element(
    element: Union[Graph, Dataset],
    state: ClassifierState,
    cfg: ClassifierConfig,
    element_index: int = 0,
) -> ElementVerdict:
    """Verdicts for one element; updates the registry and order state."""
    if isinstance(element, Graph):
        return _classify_graph(element, state, element_index)
    if isinstance(element, Dataset):
        return _classify_dataset(element, state, cfg, element_index)
    raise TypeError(f"cannot classify {type(element).__name__}")


def _classify_graph(graph: Graph, state: ClassifierState, idx: int) -> ElementVerdict:
    per_type: dict[str, TypeVerdict] = {"graphStream": _PASS}
    notes: list[str] = []
    candidates = candidate_subject_nodes(graph)
    if len(graph) == 0:
        per_type["subjectGraphStream"] = TypeVerdict(
            False, "no candidate subject node", "element is an empty graph"
        )
    elif not candidates:
        per_type["subjectGraphStream"] = TypeVerdict(
            False,
            "no candidate subject node",
            "no IRI node reaches every node of the graph",
        )
    else:
        ordered = sorted(candidates, key=lambda c: c.value)
        if len(ordered) > 1:
            unused = [c for c in ordered if c not in state.subjects]
            if unused:
                chosen = unused[0]
                state.subjects.register(chosen, idx)
                notes.append(
                    f"element {idx}: {len(ordered)} candidate subjects; chose {chosen.value}"
                )
                per_type["subjectGraphStream"] = _PASS
            else:
                notes.append(
                    f"element {idx}: {len(ordered)} candidate subjects; all already used"
                )
                per_type["subjectGraphStream"] = TypeVerdict(
                    False, "subject not unique in stream", "every candidate already used"
                )
        else:
            chosen = ordered[0]
            if chosen in state.subjects:
                per_type["subjectGraphStream"] = TypeVerdict(
                    False,
                    "subject not unique in stream",
                    f"{chosen.value} first used by element {state.subjects.first_use(chosen)}",
                )
            else:
                state.subjects.register(chosen, idx)
                per_type["subjectGraphStream"] = _PASS
    return ElementVerdict(idx, per_type, tuple(notes))


def _classify_dataset(
    dataset: Dataset, state: ClassifierState, cfg: ClassifierConfig, idx: int
) -> ElementVerdict:
    per_type: dict[str, TypeVerdict] = {"datasetStream": _PASS}
    notes: list[str] = []
    shape = check_named_graph_shape(dataset)
    if shape is None:
        n = len(dataset.named_items())
        reason = f"expected exactly one named graph, found {n}"
        per_type["namedGraphStream"] = TypeVerdict(False, "not a single named graph", reason)
        per_type["timestampedNamedGraphStream"] = TypeVerdict(
            False, "not a single named graph", reason
        )
        return ElementVerdict(idx, per_type, tuple(notes))

    per_type["namedGraphStream"] = _PASS
    found = check_timestamped_named_graph(dataset, cfg)
    if found is None:
        per_type["timestampedNamedGraphStream"] = TypeVerdict(
            False,
            "no timestamp triple",
            "default graph has no timestamp triple about the graph name",
        )
        return ElementVerdict(idx, per_type, tuple(notes))

    name, predicate, value = found
    if _count_timestamp_triples(dataset, name, cfg) > 1:
        notes.append(f"element {idx}: multiple timestamp triples; first in document order wins")

    verdict = _PASS
    if cfg.check_timestamp_order:
        comparable = comparable_timestamp(value)
        if comparable is not None:
            domain, v = comparable
            key = (predicate.value, domain)
            prev = state.order_max.get(key)
            if prev is not None and v < prev[0]:  # type: ignore[operator]
                verdict = TypeVerdict(
                    False,
                    "timestamp order violation",
                    f"timestamp precedes the one from element {prev[1]}",
                )
            else:
                state.order_max[key] = (v, idx)
    per_type["timestampedNamedGraphStream"] = verdict
    return ElementVerdict(idx, per_type, tuple(notes))


def _element_statements(element: Union[Graph, Dataset]) -> int:
    if isinstance(element, Graph):
        return len(element)
    return element.statement_count()


def classify_stream(
    source: Union[Source, Iterable],
    framing: Framing,
    cfg: ClassifierConfig | None = None,
    inferred: InferredTaxonomy | None = None,
) -> ClassificationReport:
    """Classify a whole stream in one pass.

    source may be bytes, a path, a binary file object, or an already
    materialized iterable of statements (flat framings) or elements
    (grouped framings).
    """
    cfg = cfg or ClassifierConfig()
    inferred = inferred or infer_closure(default_taxonomy())
    if framing.is_flat:
        return _classify_flat(source, framing, cfg, inferred)
    return _classify_grouped(source, framing, cfg, inferred)


def _as_statement_iter(source, framing: Framing) -> Iterator[Statement]:
    if isinstance(source, (bytes, str, os.PathLike)) or hasattr(source, "read"):
        return read_flat_stream(source, framing)
    return iter(source)


def _as_element_iter(source, framing: Framing) -> Iterator[Union[Graph, Dataset]]:
    if isinstance(source, (bytes, str, os.PathLike)) or hasattr(source, "read"):
        return read_grouped_stream(source, framing)
    return iter(source)


def _classify_flat(
    source, framing: Framing, cfg: ClassifierConfig, inferred: InferredTaxonomy
) -> ClassificationReport:
    applicable = ("flatTripleStream",) if framing is Framing.FLAT_TRIPLES else ("flatQuadStream",)
    count = 0
    all_default_graph = True
    for st in _as_statement_iter(source, framing):
        count += 1
        if isinstance(st, Quad) and st.graph_label is not None:
            all_default_graph = False
    notes: list[str] = []
    if framing is Framing.FLAT_QUADS and count > 0 and all_default_graph:
        notes.append("projectable to flat triple stream: every quad is in the default graph")
    conforming = applicable
    return ClassificationReport(
        framing=framing,
        element_count=count,
        statement_count=count,
        applicable=applicable,
        conforming=conforming,
        most_specific=most_specific(inferred, conforming),
        first_violation={},
        vacuous=count == 0,
        ambiguous=False,
        notes=tuple(notes),
        evidence=(),
    )


def _classify_grouped(
    source, framing: Framing, cfg: ClassifierConfig, inferred: InferredTaxonomy
) -> ClassificationReport:
    applicable = GRAPH_TYPES if framing.element_kind == "graph" else DATASET_TYPES
    state = ClassifierState()
    first_violation: dict[str, FirstViolation] = {}
    evidence: list[ElementVerdict] = []
    notes: list[str] = []
    element_count = 0
    statement_count = 0
    for idx, element in enumerate(_as_element_iter(source, framing)):
        element_count += 1
        statement_count += _element_statements(element)
        verdict = classify_element(element, state, cfg, idx)
        for note in verdict.notes:
            notes.append(note)
        failed = verdict.failed_types()
        if failed:
            for t in failed:
                if t not in first_violation:
                    v = verdict.per_type[t]
                    first_violation[t] = FirstViolation(idx, v.reason or "failed")
            if len(evidence) < cfg.max_evidence:
                evidence.append(verdict)
    conforming = tuple(t for t in applicable if t not in first_violation)
    ambiguous = any("candidate subjects" in n for n in notes)
    return ClassificationReport(
        framing=framing,
        element_count=element_count,
        statement_count=statement_count,
        applicable=applicable,
        conforming=conforming,
        most_specific=most_specific(inferred, conforming),
        first_violation=first_violation,
        vacuous=element_count == 0,
        ambiguous=ambiguous,
        notes=tuple(dict.fromkeys(notes)),
        evidence=tuple(evidence),
    )
