"""Command-line front end.

Subcommands: classify, convert, taxonomy (relate/closure/path), annotate,
validate.  Exit codes: 0 success (or an answered query); 1 semantic
nonconformance (failed --expect, inconsistent manifest, failed cross
check, no conversion path); 2 usage errors; 3 parse/data errors.

The STAX_TAXONOMY environment variable may point to a taxonomy manifest
that replaces the built-in taxonomy for every subcommand.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .annotate import cross_check, emit_turtle, load_manifest, validate_usages, ValidationReport
from .classify import ClassificationReport, ClassifierConfig, classify_stream
from .convert import convert, payload_kind
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
    UnknownStreamType,
    UnknownType,
)
from .io import (
    Framing,
    read_flat_stream,
    read_grouped_stream,
    write_dir_stream,
    write_flat_stream,
    write_grouped_stream,
)
from .model import Iri
from .taxonomy import (
    RELATION_NAMES,
    Taxonomy,
    conversion_path,
    default_taxonomy,
    infer_closure,
    load_taxonomy,
    normalize_relation,
    relates,
)

_FRAMING_NAMES = [f.value for f in Framing]

# payload kind of a stream type -> default on-disk framings (file, directory)
_KIND_FRAMINGS = {
    "triples": (Framing.FLAT_TRIPLES, None),
    "quads": (Framing.FLAT_QUADS, None),
    "graphs": (Framing.FRAMED_GRAPHS, Framing.DIR_GRAPHS),
    "datasets": (Framing.FRAMED_DATASETS, Framing.DIR_DATASETS),
}

_KIND_BY_ELEMENT = {"triple": "triples", "quad": "quads", "graph": "graphs", "dataset": "datasets"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stax-kit",
        description="Classify, convert, annotate, and validate RDF streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a stream against the taxonomy")
    p.add_argument("--input", required=True, help="input path, or - for stdin")
    p.add_argument("--framing", required=True, choices=_FRAMING_NAMES)
    p.add_argument(
        "--timestamp-predicate",
        action="append",
        default=[],
        metavar="IRI",
        help="timestamp predicate IRI (repeatable; default prov:generatedAtTime)",
    )
    p.add_argument("--no-order-check", action="store_true", help="skip timestamp order checking")
    p.add_argument("--max-evidence", type=int, default=10, metavar="N")
    p.add_argument("--expect", metavar="TYPE", help="exit 1 unless TYPE conforms")
    p.add_argument("--json", action="store_true", help="emit a JSON report")

    p = sub.add_parser("convert", help="convert a stream between stream types")
    p.add_argument("--input", required=True, help="input path, or - for stdin")
    p.add_argument("--output", required=True, help="output path, or - for stdout")
    p.add_argument("--from", dest="from_type", required=True, metavar="TYPE")
    p.add_argument("--to", dest="to_type", required=True, metavar="TYPE")
    p.add_argument("--policy", choices=["strict", "transitive"], default="strict")
    p.add_argument("--batch-size", type=int, default=None, metavar="N")
    p.add_argument("--input-framing", choices=_FRAMING_NAMES, default=None)
    p.add_argument("--output-framing", choices=_FRAMING_NAMES, default=None)

    p = sub.add_parser("taxonomy", help="query the stream type taxonomy")
    tsub = p.add_subparsers(dest="taxonomy_command", required=True)
    pr = tsub.add_parser("relate", help="test an inferred relation between two types")
    pr.add_argument("relation", help="broader|flatten|group|extend or an ontology name")
    pr.add_argument("from_type", metavar="FROM")
    pr.add_argument("to_type", metavar="TO")
    pc = tsub.add_parser("closure", help="print all inferred relation pairs")
    pc.add_argument("--json", action="store_true")
    pp = tsub.add_parser("path", help="plan a conversion between two types")
    pp.add_argument("from_type", metavar="FROM")
    pp.add_argument("to_type", metavar="TO")
    pp.add_argument("--policy", choices=["strict", "transitive"], default="strict")
    pp.add_argument("--json", action="store_true")

    p = sub.add_parser("annotate", help="emit Turtle for an annotation manifest")
    p.add_argument("--manifest", required=True, help="manifest path")
    p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("validate", help="validate an annotation manifest")
    p.add_argument("--manifest", required=True, help="manifest path")
    p.add_argument("--data", default=None, help="stream to cross-check against")
    p.add_argument("--framing", choices=_FRAMING_NAMES, default=None)
    p.add_argument("--policy", choices=["strict", "transitive"], default="strict")
    p.add_argument("--json", action="store_true")
    return parser


def _active_taxonomy() -> Taxonomy:
    override = os.environ.get("STAX_TAXONOMY")
    if not override:
        return default_taxonomy()
    with open(override, "r", encoding="utf-8") as f:
        return load_taxonomy(f.read())


def _read_source(path: str, framing: Framing):
    """Path or stdin bytes, ready for the io readers."""
    if path == "-":
        if framing.is_dir:
            raise MixedPayload("directory framings cannot read standard input")
        return sys.stdin.buffer.read()
    return path


def _print_json(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_classify(args: argparse.Namespace) -> int:
    taxonomy = _active_taxonomy()
    inferred = infer_closure(taxonomy)
    framing = Framing(args.framing)
    predicates = []
    for value in args.timestamp_predicate:
        try:
            predicates.append(Iri(value))
        except MalformedIri as exc:
            print(f"stax-kit: bad --timestamp-predicate: {exc}", file=sys.stderr)
            return 2
    if args.max_evidence < 0:
        print("stax-kit: --max-evidence must be non-negative", file=sys.stderr)
        return 2
    kwargs = {"check_timestamp_order": not args.no_order_check, "max_evidence": args.max_evidence}
    if predicates:
        kwargs["timestamp_predicates"] = frozenset(predicates)
    cfg = ClassifierConfig(**kwargs)
    if args.expect is not None:
        taxonomy.type(args.expect)  # unknown names are usage errors
    report = classify_stream(_read_source(args.input, framing), framing, cfg, inferred)
    if args.json:
        _print_json(report.to_dict())
    else:
        _print_report(report)
    if args.expect is not None and args.expect not in report.conforming:
        print(f"stax-kit: stream does not conform to {args.expect}", file=sys.stderr)
        return 1
    return 0


def _print_report(report: ClassificationReport) -> None:
    w = sys.stdout.write
    w(f"framing: {report.framing.value}\n")
    w(f"elements: {report.element_count}\n")
    w(f"statements: {report.statement_count}\n")
    w(f"conforming: {', '.join(report.conforming) or '(none)'}\n")
    w(f"most specific: {', '.join(report.most_specific) or '(none)'}\n")
    w(f"vacuous: {'true' if report.vacuous else 'false'}\n")
    w(f"ambiguous: {'true' if report.ambiguous else 'false'}\n")
    if report.first_violation:
        w("first violations:\n")
        for type_id in sorted(report.first_violation):
            v = report.first_violation[type_id]
            w(f"  {type_id} @ element {v.element_index}: {v.reason}\n")
    if report.notes:
        w("notes:\n")
        for note in report.notes:
            w(f"  - {note}\n")


def _framing_for(kind: str, path: str, override: str | None, flag: str) -> Framing:
    if override is not None:
        framing = Framing(override)
        if _KIND_BY_ELEMENT[framing.element_kind] != kind:
            raise MixedPayload(
                f"{flag} {framing.value} cannot carry a stream of {kind}"
            )
        return framing
    file_framing, dir_framing = _KIND_FRAMINGS[kind]
    if dir_framing is not None and path != "-" and os.path.isdir(path):
        return dir_framing
    return file_framing


def _cmd_convert(args: argparse.Namespace) -> int:
    taxonomy = _active_taxonomy()
    inferred = infer_closure(taxonomy)
    from_kind = payload_kind(inferred, args.from_type)
    to_kind = payload_kind(inferred, args.to_type)
    in_framing = _framing_for(from_kind, args.input, args.input_framing, "--input-framing")
    out_framing = _framing_for(to_kind, args.output, args.output_framing, "--output-framing")

    source = _read_source(args.input, in_framing)
    if in_framing.is_flat:
        items = read_flat_stream(source, in_framing)
    else:
        items = read_grouped_stream(source, in_framing)
    out = convert(items, args.from_type, args.to_type, inferred, args.policy, args.batch_size)

    if out_framing.is_dir:
        names = write_dir_stream(out, out_framing, args.output)
        print(f"stax-kit: wrote {len(names)} element file(s) to {args.output}", file=sys.stderr)
        return 0
    if out_framing.is_flat:
        payload = write_flat_stream(out, out_framing)
    else:
        payload = write_grouped_stream(out, out_framing)
    if args.output == "-":
        sys.stdout.buffer.write(payload)
    else:
        with open(args.output, "wb") as f:
            f.write(payload)
        print(f"stax-kit: wrote {len(payload)} byte(s) to {args.output}", file=sys.stderr)
    return 0


def _cmd_taxonomy(args: argparse.Namespace) -> int:
    taxonomy = _active_taxonomy()
    inferred = infer_closure(taxonomy)
    if args.taxonomy_command == "relate":
        try:
            relation = normalize_relation(args.relation)
        except ValueError as exc:
            print(f"stax-kit: {exc}", file=sys.stderr)
            return 2
        answer = relates(inferred, relation, args.from_type, args.to_type)
        print("true" if answer else "false")
        return 0
    if args.taxonomy_command == "closure":
        if args.json:
            _print_json(
                {
                    name: [[a, b] for a, b in sorted(inferred.closure(name))]
                    for name in RELATION_NAMES
                }
            )
        else:
            for name in RELATION_NAMES:
                print(f"{name}:")
                for a, b in sorted(inferred.closure(name)):
                    print(f"  {a} -> {b}")
        return 0
    # path
    steps = conversion_path(inferred, args.from_type, args.to_type, args.policy)
    if args.json:
        _print_json(
            {
                "from": args.from_type,
                "to": args.to_type,
                "policy": args.policy,
                "path": None
                if steps is None
                else [
                    {"relation": s.relation, "source": s.source, "target": s.target}
                    for s in steps
                ],
            }
        )
    elif steps is None:
        pass
    elif not steps:
        print("(identity)")
    else:
        for s in steps:
            print(f"{s.relation}: {s.source} -> {s.target}")
    if steps is None:
        print(
            f"stax-kit: no {args.policy} conversion path from {args.from_type} "
            f"to {args.to_type}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_annotate(args: argparse.Namespace) -> int:
    taxonomy = _active_taxonomy()
    with open(args.manifest, "r", encoding="utf-8") as f:
        manifest = load_manifest(f.read(), taxonomy)
    turtle = emit_turtle(manifest, taxonomy)
    if args.out is None:
        sys.stdout.write(turtle)
    else:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(turtle)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    taxonomy = _active_taxonomy()
    inferred = infer_closure(taxonomy)
    with open(args.manifest, "r", encoding="utf-8") as f:
        manifest = load_manifest(f.read(), taxonomy)
    report = validate_usages(manifest, inferred, args.policy)
    if args.data is not None:
        if args.framing is None:
            print("stax-kit: --data requires --framing", file=sys.stderr)
            return 2
        framing = Framing(args.framing)
        classification = classify_stream(
            _read_source(args.data, framing), framing, ClassifierConfig(), inferred
        )
        checked = cross_check(manifest, classification, inferred)
        report = ValidationReport(report.violations, checked.cross_check)
    if args.json:
        _print_json(report.to_dict())
    else:
        print(f"consistent: {'true' if report.consistent else 'false'}")
        for v in report.violations:
            print(f"  [{v.rule}] {', '.join(v.usages)}: {v.message}")
        if report.cross_check is not None:
            print("cross check:")
            for e in report.cross_check:
                status = "pass" if e.passed else "fail"
                print(f"  {e.stream_type}: {status} ({e.message})")
    return 0 if report.consistent and report.cross_check_passed else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_DATA_ERRORS = (
    ParseError,
    MixedPayload,
    SchemaError,
    UnknownStreamType,
    EmptyUsages,
    CycleError,
    DanglingReference,
    MalformedIri,
    NamedGraphPresent,
)

_COMMANDS = {
    "classify": _cmd_classify,
    "convert": _cmd_convert,
    "taxonomy": _cmd_taxonomy,
    "annotate": _cmd_annotate,
    "validate": _cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NoConversionPath as exc:
        print(f"stax-kit: {exc}", file=sys.stderr)
        return 1
    except InvalidBatchSize as exc:
        print(f"stax-kit: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"stax-kit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except UnknownType as exc:
        print(f"stax-kit: {exc}", file=sys.stderr)
        return 2
    except UnicodeDecodeError as exc:
        print(f"stax-kit: input is not valid UTF-8: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"stax-kit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
