"""Stream type taxonomy: types, relations, and inferred closures.

A taxonomy is a set of stream types (abstract or concrete) connected by
four relations:

* broader: the type hierarchy (narrower type points at its broader type)
* canBeFlattenedInto: a grouped formulation can be flattened to a flat one
* canBeGroupedInto: a flat formulation can be batched into a grouped one
* canBeTriviallyExtendedInto: embed without restructuring (triple kinds
  into quad kinds, graphs into single-graph datasets)

Inference closes broader transitively (irreflexive) and then propagates
each conversion relation down the hierarchy: whatever a broader type can
convert into, its narrower types can convert into as well.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import CycleError, DanglingReference, SchemaError, UnknownType
from .model import Iri

STAX_NS = "https://w3id.org/stax/ontology#"

BROADER = "broader"
FLATTEN = "canBeFlattenedInto"
GROUP = "canBeGroupedInto"
EXTEND = "canBeTriviallyExtendedInto"
RELATION_NAMES = (BROADER, FLATTEN, GROUP, EXTEND)

# Short aliases accepted wherever a relation is named by the caller.
_RELATION_ALIASES = {
    "broader": BROADER,
    "flatten": FLATTEN,
    "group": GROUP,
    "extend": EXTEND,
    BROADER: BROADER,
    FLATTEN: FLATTEN,
    GROUP: GROUP,
    EXTEND: EXTEND,
}

# Anchor type ids used for side checks and payload-kind derivation when the
# taxonomy defines them.
ROOT_TYPE = "rdfStream"
GROUPED_SIDE = "groupedStream"
FLAT_SIDE = "flatStream"


def normalize_relation(name: str) -> str:
    rel = _RELATION_ALIASES.get(name)
    if rel is None:
        raise ValueError(f"unknown relation name: {name!r}")
    return rel


class TypeKind(enum.Enum):
    ABSTRACT = "abstract"
    CONCRETE = "concrete"


@dataclass(frozen=True, slots=True)
class StreamType:
    id: str
    iri: str
    kind: TypeKind
    label: str


Edge = tuple[str, str]


class Taxonomy:
    """Validated set of stream types plus base relation edges."""

    __slots__ = ("_types", "_relations")

    def __init__(
        self,
        types: Iterable[StreamType],
        relations: Mapping[str, Iterable[Edge]] | None = None,
    ):
        by_id: dict[str, StreamType] = {}
        for t in types:
            if t.id in by_id:
                raise SchemaError(f"duplicate stream type id: {t.id}")
            by_id[t.id] = t
        rels: dict[str, tuple[Edge, ...]] = {name: () for name in RELATION_NAMES}
        for name, edges in (relations or {}).items():
            rel = normalize_relation(name)
            seen: dict[Edge, None] = {}
            for a, b in edges:
                seen[(a, b)] = None
            rels[rel] = tuple(seen)
        self._types = by_id
        self._relations = rels
        self._validate()

    # -- basic access -------------------------------------------------------

    @property
    def types(self) -> dict[str, StreamType]:
        return dict(self._types)

    def type(self, type_id: str) -> StreamType:
        t = self._types.get(type_id)
        if t is None:
            raise UnknownType(f"unknown stream type: {type_id}")
        return t

    def has_type(self, type_id: str) -> bool:
        return type_id in self._types

    def type_ids(self) -> tuple[str, ...]:
        return tuple(self._types)

    def edges(self, relation: str) -> tuple[Edge, ...]:
        return self._relations[normalize_relation(relation)]

    def concrete_ids(self) -> tuple[str, ...]:
        return tuple(i for i, t in self._types.items() if t.kind is TypeKind.CONCRETE)

    def by_iri(self, iri: str) -> StreamType | None:
        for t in self._types.values():
            if t.iri == iri:
                return t
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self._types == other._types and {
            k: frozenset(v) for k, v in self._relations.items()
        } == {k: frozenset(v) for k, v in other._relations.items()}

    def __hash__(self) -> int:  # pragma: no cover - not used as dict key
        return hash(frozenset(self._types))

    def __repr__(self) -> str:
        return f"Taxonomy({len(self._types)} types)"

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        for name, edges in self._relations.items():
            for a, b in edges:
                for endpoint in (a, b):
                    if endpoint not in self._types:
                        raise DanglingReference(
                            f"{name} edge ({a}, {b}) references unknown type {endpoint}"
                        )
        self._check_broader_acyclic()
        ancestors = {i: self._ancestors(i) for i in self._types}
        for t in self._types.values():
            if t.kind is TypeKind.CONCRETE:
                if not any(
                    self._types[a].kind is TypeKind.ABSTRACT for a in ancestors[t.id]
                ):
                    raise SchemaError(
                        f"concrete type {t.id} has no abstract ancestor"
                    )
        if GROUPED_SIDE in self._types and FLAT_SIDE in self._types:
            self._check_sides(ancestors)

    def _check_broader_acyclic(self) -> None:
        succ: dict[str, list[str]] = {i: [] for i in self._types}
        for a, b in self._relations[BROADER]:
            succ[a].append(b)
        state: dict[str, int] = {}  # 0 visiting, 1 done

        def visit(node: str, trail: list[str]) -> None:
            mark = state.get(node)
            if mark == 1:
                return
            if mark == 0:
                cycle = trail[trail.index(node):] + [node]
                raise CycleError("broader cycle: " + " -> ".join(cycle))
            state[node] = 0
            trail.append(node)
            for nxt in succ[node]:
                visit(nxt, trail)
            trail.pop()
            state[node] = 1

        for start in self._types:
            visit(start, [])

    def _ancestors(self, type_id: str) -> frozenset[str]:
        """Strict broader ancestors of type_id."""
        succ: dict[str, list[str]] = {i: [] for i in self._types}
        for a, b in self._relations[BROADER]:
            succ[a].append(b)
        out: set[str] = set()
        stack = list(succ[type_id])
        while stack:
            n = stack.pop()
            if n not in out:
                out.add(n)
                stack.extend(succ[n])
        return frozenset(out)

    def _check_sides(self, ancestors: Mapping[str, frozenset[str]]) -> None:
        def side(type_id: str) -> str | None:
            reach = ancestors[type_id] | {type_id}
            if GROUPED_SIDE in reach:
                return "grouped"
            if FLAT_SIDE in reach:
                return "flat"
            return None

        expectations = {
            FLATTEN: ("grouped", "flat"),
            GROUP: ("flat", "grouped"),
        }
        for rel, (want_from, want_to) in expectations.items():
            for a, b in self._relations[rel]:
                if side(a) != want_from or side(b) != want_to:
                    raise SchemaError(
                        f"{rel} edge ({a}, {b}) must go from the {want_from} side "
                        f"to the {want_to} side"
                    )
        for a, b in self._relations[EXTEND]:
            if side(a) is None or side(a) != side(b):
                raise SchemaError(
                    f"{EXTEND} edge ({a}, {b}) must stay on one side of the hierarchy"
                )

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "types": [
                {"id": t.id, "iri": t.iri, "kind": t.kind.value, "label": t.label}
                for t in self._types.values()
            ],
            "relations": [
                [a, name, b]
                for name in RELATION_NAMES
                for a, b in sorted(self._relations[name])
            ],
        }


def load_taxonomy(text: str) -> Taxonomy:
    """Parse a JSON taxonomy document.

    Shape: {"types": [{"id", "iri", "kind", "label"?}, ...],
            "relations": [[fromId, relationName, toId], ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"taxonomy is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("taxonomy document must be a JSON object")
    extra = set(doc) - {"types", "relations"}
    if extra:
        raise SchemaError(f"unknown taxonomy keys: {', '.join(sorted(extra))}")
    if "types" not in doc:
        raise SchemaError("taxonomy document needs a 'types' array")
    raw_types = doc["types"]
    if not isinstance(raw_types, list):
        raise SchemaError("'types' must be an array")

    types: list[StreamType] = []
    for entry in raw_types:
        if not isinstance(entry, dict):
            raise SchemaError("every type entry must be an object")
        extra = set(entry) - {"id", "iri", "kind", "label"}
        if extra:
            raise SchemaError(f"unknown type entry keys: {', '.join(sorted(extra))}")
        for key in ("id", "iri", "kind"):
            if key not in entry or not isinstance(entry[key], str):
                raise SchemaError(f"type entry needs a string '{key}'")
        try:
            kind = TypeKind(entry["kind"])
        except ValueError:
            raise SchemaError(
                f"type kind must be 'abstract' or 'concrete', got {entry['kind']!r}"
            ) from None
        try:
            Iri(entry["iri"])
        except Exception as exc:
            raise SchemaError(f"type {entry['id']}: bad iri: {exc}") from exc
        label = entry.get("label", entry["id"])
        if not isinstance(label, str):
            raise SchemaError(f"type {entry['id']}: label must be a string")
        types.append(StreamType(entry["id"], entry["iri"], kind, label))

    relations: dict[str, list[Edge]] = {name: [] for name in RELATION_NAMES}
    raw_relations = doc.get("relations", [])
    if not isinstance(raw_relations, list):
        raise SchemaError("'relations' must be an array")
    for entry in raw_relations:
        if not (isinstance(entry, list) and len(entry) == 3 and all(isinstance(x, str) for x in entry)):
            raise SchemaError("every relation entry must be [fromId, relation, toId]")
        a, name, b = entry
        try:
            rel = normalize_relation(name)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        relations[rel].append((a, b))
    return Taxonomy(types, relations)


def default_taxonomy() -> Taxonomy:
    """The built-in stream type taxonomy (10 types, 4 relations)."""
    def st(type_id: str, kind: TypeKind, label: str) -> StreamType:
        return StreamType(type_id, STAX_NS + type_id, kind, label)

    types = [
        st("rdfStream", TypeKind.ABSTRACT, "RDF stream"),
        st("groupedStream", TypeKind.ABSTRACT, "grouped RDF stream"),
        st("flatStream", TypeKind.ABSTRACT, "flat RDF stream"),
        st("graphStream", TypeKind.CONCRETE, "RDF graph stream"),
        st("subjectGraphStream", TypeKind.CONCRETE, "RDF subject graph stream"),
        st("datasetStream", TypeKind.CONCRETE, "RDF dataset stream"),
        st("namedGraphStream", TypeKind.CONCRETE, "RDF named graph stream"),
        st("timestampedNamedGraphStream", TypeKind.CONCRETE, "timestamped RDF named graph stream"),
        st("flatTripleStream", TypeKind.CONCRETE, "flat RDF triple stream"),
        st("flatQuadStream", TypeKind.CONCRETE, "flat RDF quad stream"),
    ]
    relations = {
        BROADER: [
            ("groupedStream", "rdfStream"),
            ("flatStream", "rdfStream"),
            ("graphStream", "groupedStream"),
            ("subjectGraphStream", "graphStream"),
            ("datasetStream", "groupedStream"),
            ("namedGraphStream", "datasetStream"),
            ("timestampedNamedGraphStream", "namedGraphStream"),
            ("flatTripleStream", "flatStream"),
            ("flatQuadStream", "flatStream"),
        ],
        FLATTEN: [
            ("graphStream", "flatTripleStream"),
            ("datasetStream", "flatQuadStream"),
        ],
        GROUP: [
            ("flatTripleStream", "graphStream"),
            ("flatQuadStream", "datasetStream"),
        ],
        EXTEND: [
            ("graphStream", "datasetStream"),
            ("flatTripleStream", "flatQuadStream"),
        ],
    }
    return Taxonomy(types, relations)


# ---------------------------------------------------------------------------
# Inference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InferredTaxonomy:
    """A taxonomy plus its inferred relation closures."""

    taxonomy: Taxonomy
    broader_closure: frozenset[Edge]
    flatten_closure: frozenset[Edge]
    group_closure: frozenset[Edge]
    extend_closure: frozenset[Edge]

    def closure(self, relation: str) -> frozenset[Edge]:
        rel = normalize_relation(relation)
        return {
            BROADER: self.broader_closure,
            FLATTEN: self.flatten_closure,
            GROUP: self.group_closure,
            EXTEND: self.extend_closure,
        }[rel]


def infer_closure(taxonomy: Taxonomy) -> InferredTaxonomy:
    """Compute the transitive broader closure and propagated conversion closures.

    broader closure: least transitive superset of the broader edges
    (irreflexive; the hierarchy is acyclic so no reflexive pairs appear).
    Conversion closures: least fixpoint of
        rel ∪ {(x, z) | (x, y) in broaderClosure and (y, z) in rel}
    """
    broader = _transitive_closure(taxonomy.edges(BROADER))

    def propagate(base: tuple[Edge, ...]) -> frozenset[Edge]:
        closure = set(base)
        changed = True
        while changed:
            changed = False
            for x, y in broader:
                for (src, z) in tuple(closure):
                    if src == y and (x, z) not in closure:
                        closure.add((x, z))
                        changed = True
        return frozenset(closure)

    return InferredTaxonomy(
        taxonomy=taxonomy,
        broader_closure=broader,
        flatten_closure=propagate(taxonomy.edges(FLATTEN)),
        group_closure=propagate(taxonomy.edges(GROUP)),
        extend_closure=propagate(taxonomy.edges(EXTEND)),
    )


def _transitive_closure(edges: Iterable[Edge]) -> frozenset[Edge]:
    closure = set(edges)
    changed = True
    while changed:
        changed = False
        for a, b in tuple(closure):
            for c, d in tuple(closure):
                if b == c and (a, d) not in closure:
                    closure.add((a, d))
                    changed = True
    return frozenset(closure)


def relates(inferred: InferredTaxonomy, relation: str, from_id: str, to_id: str) -> bool:
    """True when (from, to) is in the inferred closure of the relation."""
    inferred.taxonomy.type(from_id)
    inferred.taxonomy.type(to_id)
    return (from_id, to_id) in inferred.closure(relation)


def most_specific(inferred: InferredTaxonomy, type_ids: Iterable[str]) -> tuple[str, ...]:
    """Drop every type that has a strictly narrower type in the set."""
    ids = list(dict.fromkeys(type_ids))
    for i in ids:
        inferred.taxonomy.type(i)
    keep = [
        t
        for t in ids
        if not any(u != t and (u, t) in inferred.broader_closure for u in ids)
    ]
    return tuple(sorted(keep))


# ---------------------------------------------------------------------------
# Conversion paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ConversionStep:
    relation: str  # 'flatten' | 'group' | 'extend'
    source: str
    target: str


_STEP_RELATIONS = (("flatten", FLATTEN), ("group", GROUP), ("extend", EXTEND))
_STEP_RANK = {"flatten": 0, "group": 1, "extend": 2}


def conversion_path(
    inferred: InferredTaxonomy,
    from_id: str,
    to_id: str,
    policy: str = "strict",
) -> list[ConversionStep] | None:
    """Plan a conversion from one stream type to another.

    Returns [] when the source type already is the target type or a
    narrower one (nothing to do), a list of steps otherwise, or None when
    no plan exists under the policy.

    * strict: at most one step, taken directly from an inferred closure.
    * transitive: shortest chain of closure steps; ties are broken by
      preferring flatten over group over extend at the end of the chain.
    """
    if policy not in ("strict", "transitive"):
        raise ValueError(f"policy must be 'strict' or 'transitive', got {policy!r}")
    taxonomy = inferred.taxonomy
    taxonomy.type(from_id)
    taxonomy.type(to_id)
    if from_id == to_id or (from_id, to_id) in inferred.broader_closure:
        return []

    if policy == "strict":
        for short, rel in _STEP_RELATIONS:
            if (from_id, to_id) in inferred.closure(rel):
                return [ConversionStep(short, from_id, to_id)]
        return None

    def reaches(node: str) -> bool:
        return node == to_id or (node, to_id) in inferred.broader_closure

    # Breadth-first over closure steps; collect every shortest path and pick
    # a deterministic winner.
    paths: list[tuple[ConversionStep, ...]] = [()]
    for _ in range(len(taxonomy.type_ids())):
        hits = [p for p in paths if p and reaches(p[-1].target)]
        if hits:
            return list(min(hits, key=_path_key))
        nxt: list[tuple[ConversionStep, ...]] = []
        for p in paths:
            here = p[-1].target if p else from_id
            visited = {from_id} | {s.target for s in p}
            for short, rel in _STEP_RELATIONS:
                for a, b in inferred.closure(rel):
                    if a == here and b not in visited:
                        nxt.append(p + (ConversionStep(short, a, b),))
        if not nxt:
            return None
        paths = nxt
    return None


def _path_key(path: tuple[ConversionStep, ...]) -> tuple:
    return tuple((_STEP_RANK[s.relation], s.target) for s in reversed(path))
