"""Streaming readers and writers for flat and grouped RDF streams.

Flat streams are N-Triples / N-Quads files (W3C RDF 1.1 grammar subset):
one statement per line terminated by '.', IRIs as <...> with \\u/\\U escapes,
literals in double quotes with optional @lang or ^^<iri>, blank nodes as
_:label, '#' comments to end of line.

Grouped streams come in two on-disk conventions:

* framed files: elements are separated by a delimiter line whose entire
  content is '#---'.  Because '#' lines are comments in N-Triples/N-Quads,
  a framed file degrades gracefully to a flat stream of the same statements.
* directories: every *.nt (graphs) or *.nq (datasets) member file, in
  byte-wise lexicographic filename order, is one element.

Serialization is canonical: single spaces between terms, ' .' line endings,
minimal literal escapes (\\" \\\\ \\n \\r \\t), datatype suffix omitted for
xsd:string, UTF-8 throughout, '\\n' line endings.  read(write(s)) reproduces
s exactly; write(read(f)) is byte-identical for files already canonical.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from io import BytesIO
from typing import IO, Iterable, Iterator, Union

from .errors import MixedPayload, ParseError
from .model import (
    XSD_STRING,
    BlankNode,
    Dataset,
    Graph,
    Iri,
    Literal,
    Quad,
    Statement,
    Term,
    Triple,
)

FRAME_DELIMITER = "#---"

Source = Union[bytes, "os.PathLike[str]", str, IO[bytes]]


class Framing(enum.Enum):
    """On-disk convention determining a stream's element boundaries."""

    FLAT_TRIPLES = "flat-triples"
    FLAT_QUADS = "flat-quads"
    FRAMED_GRAPHS = "framed-graphs"
    FRAMED_DATASETS = "framed-datasets"
    DIR_GRAPHS = "dir-graphs"
    DIR_DATASETS = "dir-datasets"

    @property
    def is_flat(self) -> bool:
        return self in (Framing.FLAT_TRIPLES, Framing.FLAT_QUADS)

    @property
    def is_grouped(self) -> bool:
        return not self.is_flat

    @property
    def is_dir(self) -> bool:
        return self in (Framing.DIR_GRAPHS, Framing.DIR_DATASETS)

    @property
    def quads_payload(self) -> bool:
        """True when the framing's payload lines are N-Quads."""
        return self in (Framing.FLAT_QUADS, Framing.FRAMED_DATASETS, Framing.DIR_DATASETS)

    @property
    def element_kind(self) -> str:
        return {
            Framing.FLAT_TRIPLES: "triple",
            Framing.FLAT_QUADS: "quad",
            Framing.FRAMED_GRAPHS: "graph",
            Framing.DIR_GRAPHS: "graph",
            Framing.FRAMED_DATASETS: "dataset",
            Framing.DIR_DATASETS: "dataset",
        }[self]


class LineKind(enum.Enum):
    STATEMENT = "statement"
    COMMENT = "comment"
    BLANK = "blank"
    FRAME_DELIMITER = "frame-delimiter"


@dataclass(frozen=True, slots=True)
class ParsedLine:
    kind: LineKind
    line_no: int
    statement: Statement | None = None


# ---------------------------------------------------------------------------
# Line-level parsing
# ---------------------------------------------------------------------------

_HEX = set("0123456789abcdefABCDEF")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_LABEL_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.-")


class _Scanner:
    """Single-line cursor over one N-Triples/N-Quads statement."""

    __slots__ = ("text", "pos", "line_no")

    def __init__(self, text: str, line_no: int):
        self.text = text
        self.pos = 0
        self.line_no = line_no

    def fail(self, reason: str, column: int | None = None) -> "ParseError":
        raise ParseError(self.line_no, (self.pos if column is None else column) + 1, reason)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def _unicode_escape(self) -> str:
        # Cursor sits on 'u' or 'U'.
        width = 4 if self.text[self.pos] == "u" else 8
        start = self.pos
        self.pos += 1
        digits = self.text[self.pos : self.pos + width]
        if len(digits) < width or any(d not in _HEX for d in digits):
            self.fail(f"bad \\{self.text[start]} escape", column=start - 1)
        self.pos += width
        code = int(digits, 16)
        if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
            self.fail(f"escape U+{code:X} is not a valid scalar value", column=start - 1)
        return chr(code)

    def parse_iri(self) -> Iri:
        start = self.pos
        self.pos += 1  # consume '<'
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                self.fail("unterminated IRI", column=start)
            c = self.text[self.pos]
            if c == ">":
                self.pos += 1
                break
            if c == "\\":
                self.pos += 1
                if self.peek() not in ("u", "U"):
                    self.fail("only \\u/\\U escapes are allowed in IRIs", column=self.pos - 1)
                out.append(self._unicode_escape())
            else:
                out.append(c)
                self.pos += 1
        try:
            return Iri("".join(out))
        except Exception as exc:
            self.fail(str(exc), column=start)
            raise AssertionError  # unreachable

    def parse_blank(self) -> BlankNode:
        start = self.pos
        if not self.text.startswith("_:", self.pos):
            self.fail("expected '_:'")
        self.pos += 2
        end = self.pos
        while end < len(self.text) and self.text[end] in _LABEL_CHARS:
            end += 1
        # Trailing dots belong to the statement terminator, not the label.
        while end > self.pos and self.text[end - 1] == ".":
            end -= 1
        label = self.text[self.pos : end]
        self.pos = end
        try:
            return BlankNode(label)
        except Exception as exc:
            self.fail(str(exc), column=start)
            raise AssertionError

    def parse_literal(self) -> Literal:
        start = self.pos
        self.pos += 1  # consume '"'
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                self.fail("unterminated literal", column=start)
            c = self.text[self.pos]
            if c == '"':
                self.pos += 1
                break
            if c == "\\":
                self.pos += 1
                e = self.peek()
                if e in _ECHAR:
                    out.append(_ECHAR[e])
                    self.pos += 1
                elif e in ("u", "U"):
                    out.append(self._unicode_escape())
                else:
                    self.fail(f"bad escape '\\{e}'", column=self.pos - 1)
            else:
                out.append(c)
                self.pos += 1
        lexical = "".join(out)
        if self.peek() == "@":
            tag_start = self.pos
            self.pos += 1
            end = self.pos
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "-"):
                end += 1
            tag = self.text[self.pos : end]
            if not tag or not tag[0].isalpha():
                self.fail("bad language tag", column=tag_start)
            self.pos = end
            return Literal(lexical, language=tag)
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            if self.peek() != "<":
                self.fail("expected '<' after '^^'")
            dt = self.parse_iri()
            try:
                return Literal(lexical, datatype=dt.value)
            except Exception as exc:
                self.fail(str(exc), column=start)
        return Literal(lexical)

    def parse_term(self) -> Term:
        c = self.peek()
        if c == "<":
            return self.parse_iri()
        if c == "_":
            return self.parse_blank()
        if c == '"':
            return self.parse_literal()
        self.fail("expected IRI, blank node, or literal")
        raise AssertionError


def parse_statement_line(line: str, mode: str, line_no: int = 1) -> ParsedLine:
    """Classify and parse one input line.

    mode is 'triples' or 'quads'.  A line whose entire content is '#---' is
    a frame delimiter; other '#'-first lines are comments; whitespace-only
    lines are blank.  In triples mode a fourth term is an error; in quads
    mode a three-term statement becomes a default-graph quad.
    """
    if mode not in ("triples", "quads"):
        raise ValueError(f"mode must be 'triples' or 'quads', got {mode!r}")
    if line == FRAME_DELIMITER:
        return ParsedLine(LineKind.FRAME_DELIMITER, line_no)
    stripped = line.strip()
    if not stripped:
        return ParsedLine(LineKind.BLANK, line_no)
    if stripped.startswith("#"):
        return ParsedLine(LineKind.COMMENT, line_no)

    sc = _Scanner(line, line_no)
    sc.skip_ws()
    subj_col = sc.pos
    subject = sc.parse_term()
    if isinstance(subject, Literal):
        sc.fail("subject must be an IRI or blank node", column=subj_col)
    sc.skip_ws()
    pred_col = sc.pos
    predicate = sc.parse_term()
    if not isinstance(predicate, Iri):
        sc.fail("predicate must be an IRI", column=pred_col)
    sc.skip_ws()
    obj = sc.parse_term()
    sc.skip_ws()

    graph_label: Iri | BlankNode | None = None
    if sc.peek() and sc.peek() != ".":
        label_col = sc.pos
        if mode == "triples":
            sc.fail("statement has a fourth term but framing expects triples", column=label_col)
        term = sc.parse_term()
        if isinstance(term, Literal):
            sc.fail("graph label must be an IRI or blank node", column=label_col)
        graph_label = term
        sc.skip_ws()
    if sc.peek() != ".":
        sc.fail("expected '.' at end of statement")
    sc.pos += 1
    sc.skip_ws()
    if sc.peek() and sc.peek() != "#":
        sc.fail("unexpected content after '.'")

    stmt: Statement
    if mode == "triples":
        stmt = Triple(subject, predicate, obj)
    else:
        stmt = Quad(subject, predicate, obj, graph_label)
    return ParsedLine(LineKind.STATEMENT, line_no, stmt)


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


def _iter_lines(source: Source) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, line without trailing newline/CR)."""
    if isinstance(source, bytes):
        handle: IO[bytes] = BytesIO(source)
        close = False
    elif isinstance(source, (str, os.PathLike)):
        handle = open(source, "rb")
        close = True
    else:
        handle = source
        close = False
    try:
        for no, raw in enumerate(handle, start=1):
            text = raw.decode("utf-8")
            if text.endswith("\n"):
                text = text[:-1]
            if text.endswith("\r"):
                text = text[:-1]
            yield no, text
    finally:
        if close:
            handle.close()


def read_flat_stream(source: Source, framing: Framing) -> Iterator[Statement]:
    """Yield statements of an N-Triples/N-Quads stream in file order.

    Comments and blank lines are skipped; a '#---' line inside a flat stream
    is an ordinary comment.
    """
    if not framing.is_flat:
        raise ValueError(f"read_flat_stream needs a flat framing, got {framing.value}")
    mode = "quads" if framing.quads_payload else "triples"
    for no, line in _iter_lines(source):
        parsed = parse_statement_line(line, mode, no)
        if parsed.kind is LineKind.STATEMENT:
            assert parsed.statement is not None
            yield parsed.statement


def _statements_to_element(statements: list[Statement], framing: Framing):
    if framing.quads_payload:
        return Dataset.from_quads(statements)  # type: ignore[arg-type]
    return Graph(statements)  # type: ignore[arg-type]


def _parse_grouped_line(line: str, no: int, framing: Framing) -> ParsedLine:
    # Graph payloads are parsed in quads mode so that a named graph label is
    # reported as a payload mismatch rather than a grammar error.
    parsed = parse_statement_line(line, "quads", no)
    if (
        parsed.kind is LineKind.STATEMENT
        and not framing.quads_payload
        and isinstance(parsed.statement, Quad)
        and parsed.statement.graph_label is not None
    ):
        raise MixedPayload(f"line {no}: named graph label inside a graph framing")
    return parsed


def read_grouped_stream(source: Source, framing: Framing) -> Iterator[Graph | Dataset]:
    """Yield the elements of a grouped stream.

    Framed sources split on '#---' delimiter lines: n delimiters make n+1
    elements (elements may be empty), except that zero-byte input is an
    empty stream.  Directory sources yield one element per member file.
    """
    if not framing.is_grouped:
        raise ValueError(f"read_grouped_stream needs a grouped framing, got {framing.value}")
    if framing.is_dir:
        yield from _read_dir_stream(source, framing)
        return

    quads_payload = framing.quads_payload
    current: list[Statement] = []
    saw_line = False
    for no, line in _iter_lines(source):
        saw_line = True
        parsed = _parse_grouped_line(line, no, framing)
        if parsed.kind is LineKind.FRAME_DELIMITER:
            yield _statements_to_element(_strip_labels(current, quads_payload), framing)
            current = []
        elif parsed.kind is LineKind.STATEMENT:
            assert parsed.statement is not None
            current.append(parsed.statement)
    if saw_line:
        yield _statements_to_element(_strip_labels(current, quads_payload), framing)


def _strip_labels(statements: list[Statement], quads_payload: bool) -> list[Statement]:
    if quads_payload:
        return statements
    return [s.triple() for s in statements if isinstance(s, Quad)]


def _read_dir_stream(source: Source, framing: Framing) -> Iterator[Graph | Dataset]:
    if isinstance(source, bytes) or hasattr(source, "read"):
        raise ValueError("directory framing requires a directory path")
    ext = ".nq" if framing.quads_payload else ".nt"
    names = sorted(
        (n for n in os.listdir(source) if n.endswith(ext)),
        key=lambda n: n.encode("utf-8"),
    )
    for name in names:
        path = os.path.join(os.fspath(source), name)
        statements: list[Statement] = []
        for no, line in _iter_lines(path):
            parsed = _parse_grouped_line(line, no, framing)
            if parsed.kind is LineKind.STATEMENT:
                assert parsed.statement is not None
                statements.append(parsed.statement)
            # '#---' inside a member file is a delimiter line type, but a
            # directory element is the whole file; treat it as a comment.
        yield _statements_to_element(_strip_labels(statements, framing.quads_payload), framing)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_LITERAL_ESC = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_IRI_ESC = {"\\", "{", "}", "|", "^", "`"} | {chr(i) for i in range(0x21)}


def _escape_iri(value: str) -> str:
    if not any(c in _IRI_ESC for c in value):
        return value
    return "".join(f"\\u{ord(c):04X}" if c in _IRI_ESC else c for c in value)


def escape_literal(value: str) -> str:
    return "".join(_LITERAL_ESC.get(c, c) for c in value)


def serialize_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{_escape_iri(term.value)}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        body = f'"{escape_literal(term.lexical)}"'
        if term.language is not None:
            return f"{body}@{term.language}"
        if term.datatype != XSD_STRING:
            return f"{body}^^<{_escape_iri(term.datatype)}>"
        return body
    raise TypeError(f"not an RDF term: {term!r}")


def serialize_statement(statement: Statement) -> str:
    """One canonical N-Triples/N-Quads line, without the trailing newline."""
    s = serialize_term(statement.subject)
    p = serialize_term(statement.predicate)
    o = serialize_term(statement.object)
    if isinstance(statement, Quad) and statement.graph_label is not None:
        return f"{s} {p} {o} {serialize_term(statement.graph_label)} ."
    return f"{s} {p} {o} ."


def _element_lines(element: Graph | Dataset, framing: Framing) -> list[str]:
    if framing.quads_payload:
        if not isinstance(element, Dataset):
            raise MixedPayload(
                f"dataset framing {framing.value} cannot serialize {type(element).__name__}"
            )
        lines = [serialize_statement(Quad(t.subject, t.predicate, t.object)) for t in element.default_graph]
        for name, graph in element.named_items():
            lines.extend(
                serialize_statement(Quad(t.subject, t.predicate, t.object, name)) for t in graph
            )
        return lines
    if not isinstance(element, Graph):
        raise MixedPayload(
            f"graph framing {framing.value} cannot serialize {type(element).__name__}"
        )
    return [serialize_statement(t) for t in element]


def write_flat_stream(statements: Iterable[Statement], framing: Framing) -> bytes:
    """Serialize a flat stream canonically; statement kinds must match framing."""
    if not framing.is_flat:
        raise ValueError(f"write_flat_stream needs a flat framing, got {framing.value}")
    want_quads = framing.quads_payload
    out: list[str] = []
    for st in statements:
        if want_quads and not isinstance(st, Quad):
            raise MixedPayload("flat-quads framing cannot serialize a Triple")
        if not want_quads and not isinstance(st, Triple):
            raise MixedPayload("flat-triples framing cannot serialize a Quad")
        out.append(serialize_statement(st))
        out.append("\n")
    return "".join(out).encode("utf-8")


def write_grouped_stream(elements: Iterable[Graph | Dataset], framing: Framing) -> bytes:
    """Serialize a framed grouped stream: '#---' between elements, none at edges.

    A stream of exactly one empty element serializes to zero bytes and will
    read back as an empty stream; every other boundary layout round-trips.
    """
    if framing.is_dir or not framing.is_grouped:
        raise ValueError(f"write_grouped_stream needs a framed framing, got {framing.value}")
    chunks: list[str] = []
    for i, element in enumerate(elements):
        if i:
            chunks.append(FRAME_DELIMITER + "\n")
        for line in _element_lines(element, framing):
            chunks.append(line + "\n")
    return "".join(chunks).encode("utf-8")


def write_dir_stream(
    elements: Iterable[Graph | Dataset],
    framing: Framing,
    directory: "os.PathLike[str] | str",
) -> list[str]:
    """Write one member file per element; returns the filenames created."""
    if not framing.is_dir:
        raise ValueError(f"write_dir_stream needs a dir framing, got {framing.value}")
    os.makedirs(directory, exist_ok=True)
    ext = ".nq" if framing.quads_payload else ".nt"
    names: list[str] = []
    for i, element in enumerate(elements):
        name = f"{i:05d}{ext}"
        payload = "".join(line + "\n" for line in _element_lines(element, framing))
        with open(os.path.join(os.fspath(directory), name), "wb") as f:
            f.write(payload.encode("utf-8"))
        names.append(name)
    return names
