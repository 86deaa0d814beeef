"""Command line entry point: ``xsdmin <subcommand> ...``.

Exit status: 0 success, 1 usage error, 2 processing error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, codec
from .bench import BenchConfig, render_report, run_bench
from .binding import build_manifest, emit_source, load_templates, manifest_from_json, manifest_to_json
from .compressor import DEFAULT_LEVEL
from .corpus import idmef_pipeline, load_corpus
from .errors import ChecksumMismatch, XsdMinError
from .minifier import minify, write_dictionary, write_minified_schema
from .schema import SchemaSet, parse_schema, resolve_references

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _log(args, msg: str):
    if not getattr(args, "quiet", False):
        print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# loading helpers


def _schema_docs(path: str | None):
    """Original schema set; locations are relative to the primary file's
    directory so that dictionary paths do not depend on where it lives."""
    if path is None:
        return [idmef_pipeline().schema]
    primary = Path(path)
    base = primary.parent

    def loader(location: str) -> bytes:
        return (base / location).read_bytes()

    root = parse_schema(primary.read_bytes(), primary.name)
    return resolve_references(root, loader), loader


def _load(path: str | None):
    if path is None:
        p = idmef_pipeline()
        return [p.schema], p.result
    docs, loader = _schema_docs(path)
    return docs, minify(docs[-1], loader)


def _manifest(path: str | None):
    if path is None:
        return idmef_pipeline().manifest
    return manifest_from_json(Path(path).read_bytes())


def _schemas_for(path: str | None):
    return _load(path)[0] if path else [idmef_pipeline().schema]


def _write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


# ---------------------------------------------------------------------------
# subcommands


def cmd_minify(args) -> int:
    docs, loader = _schema_docs(args.schema)
    primary = Path(args.schema)
    out_dir = Path(args.out_dir)
    inputs = [primary.parent / d.location for d in docs]
    result = minify(docs[-1], loader)
    outputs = [out_dir / name for name, _ in write_minified_schema(result)] + [out_dir / result.dictionary_name]
    if not args.force and all(p.exists() for p in outputs):
        newest_input = max(p.stat().st_mtime for p in inputs)
        if min(p.stat().st_mtime for p in outputs) >= newest_input:
            _log(args, f"up to date: {', '.join(str(p) for p in outputs)} (use --force to regenerate)")
            return EXIT_OK
    for name, data in write_minified_schema(result):
        _write(out_dir / name, data)
    _write(out_dir / result.dictionary_name, write_dictionary(result.dictionary))
    _log(args, f"wrote {len(outputs)} files to {out_dir} ({len(result.dictionary)} dictionary entries)")
    return EXIT_OK


def cmd_manifest(args) -> int:
    docs, result = _load(args.schema)
    if args.min_dir:
        dic_path = Path(args.min_dir) / result.dictionary_name
        if dic_path.read_bytes() != write_dictionary(result.dictionary):
            raise ChecksumMismatch(f"{dic_path} does not correspond to {args.schema}; re-run minify")
    manifest = build_manifest(docs, result)
    data = manifest_to_json(manifest)
    if args.out:
        _write(Path(args.out), data)
        _log(args, f"wrote {args.out} ({len(manifest.types)} types)")
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_emit(args) -> int:
    manifest = manifest_from_json(Path(args.manifest).read_bytes())
    templates = load_templates(args.templates)
    for name, data in emit_source(manifest, templates, args.module):
        _write(Path(args.out_dir) / name, data)
        _log(args, f"wrote {Path(args.out_dir) / name}")
    return EXIT_OK


def cmd_transcode(args) -> int:
    manifest = _manifest(args.manifest)
    schemas = _schemas_for(args.schema)
    payload = Path(args.input).read_bytes() if args.input != "-" else sys.stdin.buffer.read()
    source = codec.WireMessage(payload, args.source, "gzip" if args.gunzip else "none")
    tree = codec.decode(source, manifest, schemas)
    if args.source != "xml":
        codec.validate(tree, codec.as_schema_set(schemas))
    out = codec.encode(tree, args.to, manifest, "gzip" if args.gzip else "none", args.gzip_level).payload
    if args.out:
        _write(Path(args.out), out)
        _log(args, f"{len(payload)} -> {len(out)} bytes ({args.source} -> {args.to})")
    else:
        sys.stdout.buffer.write(out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    schemas = _schemas_for(args.schema)
    rows = []
    for path in args.inputs:
        tree = codec.parse_instance(Path(path).read_bytes(), schemas)
        m = codec.analyze_structure(tree, codec.to_xml(tree))
        rows.append({"file": path, "bytes": m.byte_size, "nodes": m.node_count,
                     "attributes": m.attribute_count, "depth": m.depth})
    print(json.dumps(rows if len(rows) != 1 else rows[0], indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    manifest = _manifest(args.manifest)
    schemas = _schemas_for(args.schema)
    corpus = load_corpus(args.corpus)
    if not corpus:
        raise XsdMinError(f"no *.xml messages in {args.corpus or 'bundled corpus'}")
    try:
        config = BenchConfig(args.iterations, args.warmup, args.gzip_level)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    report = run_bench(corpus, manifest, config, schemas, timings=not args.sizes_only)
    data = render_report(report, args.format, include_timings=not args.sizes_only)
    if args.out:
        _write(Path(args.out), data)
        _log(args, f"wrote {args.out}: {len(report.messages)} messages, "
                   f"mean reduction {report.mean_reduction():.2f}%")
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def _bind(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise _UsageError(f"--bind expects HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


def cmd_serve(args) -> int:
    from .transport import serve

    handle = serve(_bind(args.bind), _schemas_for(args.schema), _manifest(args.manifest))
    _log(args, f"listening on {handle.url} (POST /ingest, GET /stats); Ctrl-C to stop")
    try:
        handle._thread.join()
    except KeyboardInterrupt:
        pass
    finally:
        handle.close()
        _log(args, json.dumps(handle.stats.snapshot()))
    return EXIT_OK


def cmd_send(args) -> int:
    from .transport import send_burst

    manifest = _manifest(args.manifest)
    schemas = _schemas_for(args.schema)
    corpus = load_corpus(args.corpus)
    trees = [codec.parse_instance(xml, schemas) for _, xml in corpus]
    result = send_burst(args.endpoint, trees, args.encoding, "gzip" if args.gzip else "none", args.n, manifest)
    print(json.dumps({
        "encoding": args.encoding,
        "compression": "gzip" if args.gzip else "none",
        "sent": result.sent,
        "failures": result.failures,
        "digest_mismatches": result.digest_mismatches,
        "mean_rtt_us": round(result.mean_us, 1),
    }))
    return EXIT_OK if result.failures == 0 and result.digest_mismatches == 0 else EXIT_FAILURE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress progress messages")

    parser = _Parser(prog="xsdmin", description="Schema-driven name minification for XML messages.",
                     parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("minify", parents=[common], help="write NAME.min.xsd files and NAME.dic")
    p.add_argument("schema", metavar="IN.xsd")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--force", action="store_true", help="regenerate even if outputs are newer than inputs")
    p.set_defaults(func=cmd_minify)

    p = sub.add_parser("manifest", parents=[common], help="derive manifest.json")
    p.add_argument("--schema", help="original schema (default: bundled IDMEF)")
    p.add_argument("--min-dir", help="directory holding the .dic written by minify; checked for drift")
    p.add_argument("--out")
    p.set_defaults(func=cmd_manifest)

    p = sub.add_parser("emit", parents=[common], help="generate binding source from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--templates", help="directory of *.tmpl files (default: bundled Python set)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--module", default="bindings")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("transcode", parents=[common], help="convert one message between encodings")
    p.add_argument("--in", dest="input", required=True, help="input file or - for stdin")
    p.add_argument("--from", dest="source", choices=codec.ENCODINGS, default="xml")
    p.add_argument("--to", choices=codec.ENCODINGS, required=True)
    p.add_argument("--gzip", action="store_true", help="gzip the output")
    p.add_argument("--gunzip", action="store_true", help="input is gzip-compressed")
    p.add_argument("--gzip-level", type=int, default=DEFAULT_LEVEL, choices=range(1, 10), metavar="1..9")
    p.add_argument("--schema")
    p.add_argument("--manifest")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transcode)

    p = sub.add_parser("analyze", parents=[common], help="structure metrics of XML messages")
    p.add_argument("inputs", nargs="+", metavar="MSG.xml")
    p.add_argument("--schema")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", parents=[common], help="size and timing report over a corpus")
    p.add_argument("--corpus", help="directory of *.xml messages (default: bundled corpus)")
    p.add_argument("--schema")
    p.add_argument("--manifest")
    p.add_argument("--out")
    p.add_argument("--gzip-level", type=int, default=DEFAULT_LEVEL)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--warmup", type=int, default=50)
    p.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    p.add_argument("--sizes-only", action="store_true", help="skip timings; output is reproducible")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP ingest service")
    p.add_argument("--bind", default="127.0.0.1:8080", metavar="HOST:PORT")
    p.add_argument("--schema")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("send", parents=[common], help="send a burst of corpus messages")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--corpus")
    p.add_argument("--encoding", choices=codec.ENCODINGS, default="min_json")
    p.add_argument("--gzip", action="store_true")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--schema")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_send)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (XsdMinError, OSError) as exc:
        print(f"xsdmin: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
