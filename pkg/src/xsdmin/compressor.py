"""GZip framing for wire payloads, plus optional XMill passthrough."""

from __future__ import annotations

import gzip
import shutil
import subprocess
import tempfile
import zlib
from pathlib import Path

from .errors import CorruptStream

DEFAULT_LEVEL = 6


def gzip_compress(payload: bytes, level: int = DEFAULT_LEVEL) -> bytes:
    if not 1 <= level <= 9:
        raise ValueError(f"gzip level must be 1..9, got {level}")
    # mtime=0 keeps the output byte-identical across runs
    return gzip.compress(payload, compresslevel=level, mtime=0)


def gzip_decompress(data: bytes) -> bytes:
    """Inverse of :func:`gzip_compress`; CRC and framing errors raise CorruptStream."""
    # the stdlib accepts b"" as zero members; a wire payload must hold one
    if data[:2] != b"\x1f\x8b":
        raise CorruptStream("gzip stream rejected: missing gzip header")
    try:
        return gzip.decompress(data)
    except (OSError, EOFError, zlib.error) as exc:
        raise CorruptStream(f"gzip stream rejected: {exc}") from None


def xmill_available() -> bool:
    return shutil.which("xmill") is not None and shutil.which("xdemill") is not None


def xmill_compress(payload: bytes) -> bytes | None:
    """Compress with an external ``xmill`` binary; ``None`` when absent."""
    exe = shutil.which("xmill")
    if exe is None:
        return None
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "m.xml"
        src.write_bytes(payload)
        subprocess.run([exe, "-f", str(src)], check=True, capture_output=True, cwd=tmp)
        out = Path(tmp) / "m.xmi"
        return out.read_bytes()
