import gzip
import zlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xsdmin import codec
from xsdmin.compressor import DEFAULT_LEVEL, gzip_compress, gzip_decompress, xmill_available, xmill_compress
from xsdmin.errors import CorruptStream


def test_empty_round_trip():
    assert gzip_decompress(gzip_compress(b"")) == b""


def test_heartbeat_min_json_shrinks(heartbeat, manifest):
    payload = codec.to_min_json(heartbeat, manifest)
    assert len(gzip_compress(payload)) < len(payload)


def test_output_is_standard_gzip_with_crc():
    data = gzip_compress(b"hello hello hello")
    assert data[:2] == b"\x1f\x8b"
    assert gzip.decompress(data) == b"hello hello hello"
    assert int.from_bytes(data[-8:-4], "little") == zlib.crc32(b"hello hello hello")


def test_deterministic_bytes():
    assert gzip_compress(b"abc" * 100) == gzip_compress(b"abc" * 100)


def test_levels():
    data = bytes(range(256)) * 64
    sizes = [len(gzip_compress(data, level)) for level in range(1, 10)]
    assert all(gzip_decompress(gzip_compress(data, level)) == data for level in range(1, 10))
    assert sizes[8] <= sizes[0]
    assert DEFAULT_LEVEL == 6
    for level in (0, 10):
        with pytest.raises(ValueError):
            gzip_compress(data, level)


def test_every_single_byte_flip_is_detected(heartbeat, manifest):
    # bytes 4..9 (mtime, flags, OS) sit outside the CRC in the gzip header
    data = gzip_compress(codec.to_min_json(heartbeat, manifest))
    for pos in range(10, len(data)):
        bad = bytearray(data)
        bad[pos] ^= 0x01
        with pytest.raises(CorruptStream):
            gzip_decompress(bytes(bad))


@pytest.mark.parametrize("data", [b"", b"not gzip at all", b"\x1f\x8b\x08"])
def test_garbage_rejected(data):
    with pytest.raises(CorruptStream):
        gzip_decompress(data)


def test_truncated_stream():
    data = gzip_compress(b"x" * 1000)
    with pytest.raises(CorruptStream):
        gzip_decompress(data[:-3])


def test_gzip_smaller_than_xml_gzip(corpus_trees, manifest):
    for name, tree in corpus_trees.items():
        assert len(gzip_compress(codec.to_min_json(tree, manifest))) < len(gzip_compress(codec.to_xml(tree))), name


def test_xmill_optional():
    if not xmill_available():
        assert xmill_compress(b"<a/>") is None
    else:
        assert xmill_compress(b"<a/>")


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=64 * 1024), st.integers(1, 9))
def test_round_trip_random_payloads(payload, level):
    assert gzip_decompress(gzip_compress(payload, level)) == payload
