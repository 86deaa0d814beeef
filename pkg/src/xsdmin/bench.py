"""Size and timing measurements over a message corpus."""

from __future__ import annotations

import csv
import io
import json
import platform
import statistics
import time
from dataclasses import dataclass, field

from . import codec
from .binding import BindingManifest
from .compressor import DEFAULT_LEVEL, gzip_compress, gzip_decompress, xmill_available, xmill_compress
from .errors import XsdMinError

# operation label -> short description
OPERATIONS = {
    "XML": "serialize tree to canonical XML",
    "De XML": "parse canonical XML to tree",
    "GZip XML": "serialize to XML and gzip",
    "De GZip XML": "gunzip and parse XML",
    "Min JSON": "serialize tree to minified JSON",
    "De Min JSON": "parse minified JSON to tree",
    "GZip Min JSON": "serialize to minified JSON and gzip",
    "De GZip Min JSON": "gunzip and parse minified JSON",
}

SIZE_KEYS = ("xml", "min_xml", "json", "min_json", "gzip_xml", "gzip_min_json", "min_xml_whitespace")

CSV_COLUMNS = (
    "message", "xml_bytes", "min_xml_bytes", "json_bytes", "min_json_bytes", "gzip_xml_bytes",
    "gzip_min_json_bytes", "nodes", "attributes", "depth", "reduction_pct", "gzip_reduction_pct",
)


@dataclass(frozen=True)
class BenchConfig:
    iterations: int = 500
    warmup: int = 50
    gzip_level: int = DEFAULT_LEVEL

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.warmup < 0:
            raise ValueError("warmup must be non-negative")
        if not 1 <= self.gzip_level <= 9:
            raise ValueError("gzip level must be 1..9")


@dataclass(frozen=True)
class TimingStats:
    min: float
    max: float
    mean: float
    median: float
    stddev: float

    @classmethod
    def of(cls, samples_us: list[float]) -> TimingStats:
        return cls(
            min(samples_us), max(samples_us), statistics.fmean(samples_us), statistics.median(samples_us),
            statistics.pstdev(samples_us),
        )


@dataclass
class MessageResult:
    name: str
    structure: codec.StructureMetrics
    sizes: dict[str, int]
    timings: dict[str, TimingStats] = field(default_factory=dict)

    @property
    def reduction_pct(self) -> float:
        return 100.0 * (self.sizes["xml"] - self.sizes["min_json"]) / self.sizes["xml"]

    @property
    def gzip_reduction_pct(self) -> float:
        return 100.0 * (self.sizes["xml"] - self.sizes["gzip_min_json"]) / self.sizes["xml"]


@dataclass
class BenchReport:
    messages: list[MessageResult]
    config: BenchConfig
    host: str = ""

    def mean_reduction(self, key: str = "min_json") -> float:
        if not self.messages:
            return 0.0
        return statistics.fmean(
            100.0 * (m.sizes["xml"] - m.sizes[key]) / m.sizes["xml"] for m in self.messages
        )


def _time(fn, arg, config: BenchConfig) -> TimingStats:
    for _ in range(config.warmup):
        fn(arg)
    samples = []
    clock = time.perf_counter_ns
    for _ in range(config.iterations):
        t0 = clock()
        fn(arg)
        dt = clock() - t0
        assert dt >= 0, "monotonic clock went backwards"
        samples.append(dt / 1000.0)
    return TimingStats.of(samples)


def measure_message(name: str, xml: bytes, manifest: BindingManifest, config: BenchConfig,
                    schemas=None, timings: bool = True) -> MessageResult:
    level = config.gzip_level
    tree = codec.parse_instance(xml, schemas)
    canonical = codec.to_xml(tree)
    min_json = codec.to_min_json(tree, manifest)
    sizes = {
        "xml": len(canonical),
        "min_xml": len(codec.to_min_xml(tree, manifest)),
        "json": len(codec.to_json(tree, manifest)),
        "min_json": len(min_json),
        "gzip_xml": len(gzip_compress(canonical, level)),
        "gzip_min_json": len(gzip_compress(min_json, level)),
        "min_xml_whitespace": len(codec.to_min_xml_whitespace(canonical)),
    }
    if xmill_available():
        packed = xmill_compress(canonical)
        if packed is not None:
            sizes["xmill"] = len(packed)
    result = MessageResult(name, codec.analyze_structure(tree, canonical), sizes)
    if not timings:
        return result
    gz_xml = gzip_compress(canonical, level)
    gz_mj = gzip_compress(min_json, level)
    ops = {
        "XML": (codec.to_xml, tree),
        "De XML": (codec.parse_instance, canonical),
        "GZip XML": (lambda t: gzip_compress(codec.to_xml(t), level), tree),
        "De GZip XML": (lambda b: codec.parse_instance(gzip_decompress(b)), gz_xml),
        "Min JSON": (lambda t: codec.to_min_json(t, manifest), tree),
        "De Min JSON": (lambda b: codec.from_min_json(b, manifest), min_json),
        "GZip Min JSON": (lambda t: gzip_compress(codec.to_min_json(t, manifest), level), tree),
        "De GZip Min JSON": (lambda b: codec.from_min_json(gzip_decompress(b), manifest), gz_mj),
    }
    for label, (fn, arg) in ops.items():
        result.timings[label] = _time(fn, arg, config)
    return result


def run_bench(corpus, manifest: BindingManifest, config: BenchConfig | None = None,
              schemas=None, timings: bool = True) -> BenchReport:
    """Measure every ``(name, xml)`` in ``corpus``.

    Sizes are taken from actually produced payloads; timings are
    microseconds on ``time.perf_counter_ns``.
    """
    config = config or BenchConfig()
    results = []
    for name, xml in corpus:
        try:
            results.append(measure_message(name, xml, manifest, config, schemas, timings))
        except XsdMinError as exc:
            raise XsdMinError(f"message '{name}': {exc}") from exc
    host = f"{platform.python_implementation()} {platform.python_version()} on {platform.machine()}"
    return BenchReport(results, config, host)


# ---------------------------------------------------------------------------
# rendering


def _report_dict(report: BenchReport, include_timings: bool) -> dict:
    out = {
        "config": {
            "iterations": report.config.iterations,
            "warmup": report.config.warmup,
            "gzip_level": report.config.gzip_level,
        },
        "messages": [],
        "mean_reduction_pct": round(report.mean_reduction(), 2),
        "mean_gzip_reduction_pct": round(report.mean_reduction("gzip_min_json"), 2),
    }
    if include_timings:
        out["host"] = report.host
    for m in report.messages:
        entry = {
            "name": m.name,
            "structure": {
                "bytes": m.structure.byte_size,
                "nodes": m.structure.node_count,
                "attributes": m.structure.attribute_count,
                "depth": m.structure.depth,
            },
            "sizes": dict(sorted(m.sizes.items())),
            "reduction_pct": round(m.reduction_pct, 2),
        }
        if include_timings and m.timings:
            entry["timings_us"] = {
                label: {k: round(getattr(s, k), 3) for k in ("min", "max", "mean", "median", "stddev")}
                for label, s in m.timings.items()
            }
        out["messages"].append(entry)
    return out


def render_report(report: BenchReport, fmt: str = "json", include_timings: bool = True) -> bytes:
    """Render as ``json``, ``csv`` (columns in ``CSV_COLUMNS``) or ``markdown``.

    With ``include_timings=False`` the output depends only on sizes and is
    byte-identical across runs.
    """
    if fmt == "json":
        return (json.dumps(_report_dict(report, include_timings), indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for m in report.messages:
            s = m.sizes
            writer.writerow([
                m.name, s["xml"], s["min_xml"], s["json"], s["min_json"], s["gzip_xml"], s["gzip_min_json"],
                m.structure.node_count, m.structure.attribute_count, m.structure.depth,
                f"{m.reduction_pct:.2f}", f"{m.gzip_reduction_pct:.2f}",
            ])
        return buf.getvalue().encode("utf-8")
    if fmt == "markdown":
        return _markdown(report, include_timings).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def _table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return lines


def _markdown(report: BenchReport, include_timings: bool) -> str:
    out = ["## Message structure", ""]
    out += _table(
        ["Message", "XML bytes", "Nodes", "Attributes", "Levels"],
        [(m.name, m.structure.byte_size, m.structure.node_count, m.structure.attribute_count, m.structure.depth)
         for m in report.messages],
    )
    out += ["", "## Size: XML vs minified JSON", ""]
    out += _table(
        ["Message", "XML", "Minified JSON", "Reduction %"],
        [(m.name, m.sizes["xml"], m.sizes["min_json"], f"{m.reduction_pct:.2f}") for m in report.messages],
    )
    out += ["", "## Size by technique (bytes)", ""]
    has_xmill = any("xmill" in m.sizes for m in report.messages)
    header = ["Message", "GZipMinJSON", "GZipXML"] + (["XMill"] if has_xmill else []) + ["MinJSON", "XML"]
    out += _table(header, [
        [m.name, m.sizes["gzip_min_json"], m.sizes["gzip_xml"]]
        + ([m.sizes.get("xmill", "")] if has_xmill else []) + [m.sizes["min_json"], m.sizes["xml"]]
        for m in report.messages
    ])
    if include_timings and any(m.timings for m in report.messages):
        labels = list(OPERATIONS)
        out += ["", "## Mean execution time (ms)", ""]
        out += _table(["Message"] + labels, [
            [m.name] + [f"{m.timings[l].mean / 1000:.3f}" for l in labels] for m in report.messages
        ])
    out += ["", f"Mean reduction (min_json vs xml): {report.mean_reduction():.2f}%",
            f"Mean reduction (gzip min_json vs xml): {report.mean_reduction('gzip_min_json'):.2f}%",
            f"gzip level: {report.config.gzip_level}", ""]
    return "\n".join(out)
