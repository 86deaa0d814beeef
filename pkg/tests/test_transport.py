import http.client
import json
import socket
import threading

import pytest

from xsdmin import codec
from xsdmin.errors import ConnectionFailure
from xsdmin.transport import (
    DIGEST_HEADER,
    encoding_from_headers,
    fetch_stats,
    send_burst,
    serve,
    tree_digest,
    wire_headers,
)


@pytest.fixture
def service(schema_set, manifest):
    with serve(("127.0.0.1", 0), schema_set, manifest) as handle:
        yield handle


def post(service, body, headers, path="/ingest"):
    host, port = service.address
    conn = http.client.HTTPConnection(host, port, timeout=10)
    conn.request("POST", path, body=body, headers=headers)
    resp = conn.getresponse()
    data = resp.read()
    conn.close()
    return resp, data


@pytest.mark.parametrize("ctype, min_enc, cenc, expected", [
    ("application/xml", None, None, ("xml", "none")),
    ("text/xml; charset=utf-8", None, "identity", ("xml", "none")),
    ("application/xml", "min_xml", "gzip", ("min_xml", "gzip")),
    ("application/json", "min_json", None, ("min_json", "none")),
    ("application/json", None, "gzip", ("json", "gzip")),
    ("application/json", "min_xml", None, None),
    ("application/yaml", None, None, None),
    (None, None, None, None),
    ("application/json", None, "br", None),
])
def test_encoding_from_headers(ctype, min_enc, cenc, expected):
    assert encoding_from_headers(ctype, min_enc, cenc) == expected


def test_wire_headers_invert(heartbeat, manifest):
    for enc in codec.ENCODINGS:
        for comp in codec.COMPRESSIONS:
            h = wire_headers(codec.encode(heartbeat, enc, manifest, comp))
            assert encoding_from_headers(h.get("Content-Type"), h.get("X-Min-Encoding"),
                                         h.get("Content-Encoding")) == (enc, comp)


def test_post_valid_min_json(service, heartbeat, manifest):
    msg = codec.encode(heartbeat, "min_json", manifest)
    resp, data = post(service, msg.payload, wire_headers(msg))
    assert resp.status == 200
    assert resp.getheader(DIGEST_HEADER) == json.loads(data)["digest"] == tree_digest(heartbeat)
    stats = service.stats.snapshot()["encodings"]["min_json"]
    assert stats == {"received": 1, "failures": 0, "payload_bytes": len(msg.payload)}


def test_post_unknown_wire_key(service, heartbeat, manifest):
    msg = codec.encode(heartbeat, "min_json", manifest)
    resp, data = post(service, msg.payload.replace(b'{"a":"abc', b'{"zz":"abc'), wire_headers(msg))
    assert resp.status == 400
    assert "zz" in json.loads(data)["error"]
    assert service.stats.snapshot()["encodings"]["min_json"]["failures"] == 1


def test_post_unknown_encoding(service):
    resp, _ = post(service, b"a: 1", {"Content-Type": "application/yaml"})
    assert resp.status == 415
    assert service.stats.snapshot()["rejected"] == 1


def test_post_invalid_xml_counted(service):
    resp, _ = post(service, b"<IDMEF-Message", {"Content-Type": "application/xml"})
    assert resp.status == 400
    assert service.stats.snapshot()["encodings"]["xml"]["failures"] == 1


def test_post_corrupt_gzip(service, heartbeat, manifest):
    msg = codec.encode(heartbeat, "json", manifest, "gzip")
    resp, _ = post(service, msg.payload[:-4], wire_headers(msg))
    assert resp.status == 400


def test_not_found(service):
    resp, _ = post(service, b"", {"Content-Type": "application/xml"}, path="/elsewhere")
    assert resp.status == 404


def test_stats_after_three_posts(service, heartbeat, manifest):
    for enc in ("xml", "json", "min_json"):
        msg = codec.encode(heartbeat, enc, manifest)
        assert post(service, msg.payload, wire_headers(msg))[0].status == 200
    stats = fetch_stats(service.url)
    assert sum(s["received"] for s in stats["encodings"].values()) == 3


def test_single_sample(service, heartbeat, manifest):
    result = send_burst(service.url, [heartbeat], "min_json", n=1, manifest=manifest)
    assert result.sent == 1 and len(result.samples_us) == 1
    assert result.failures == 0 and result.digest_mismatches == 0 and not result.partial


def test_burst_whole_corpus_every_encoding(service, corpus_trees, manifest):
    trees = list(corpus_trees.values())
    for enc in codec.ENCODINGS:
        for comp in codec.COMPRESSIONS:
            result = send_burst(service.url, trees, enc, comp, n=2, manifest=manifest)
            assert (result.sent, result.failures, result.digest_mismatches) == (2 * len(trees), 0, 0)
    stats = fetch_stats(service.url)["encodings"]
    for enc in codec.ENCODINGS:
        assert stats[enc]["received"] == 2 * 2 * len(trees)


def test_burst_accepts_raw_xml(service, corpus):
    result = send_burst(service.url, [dict(corpus)["heartbeat"]], "xml", n=3)
    assert result.sent == 3 and result.failures == 0


def test_conservation_with_failures(service, heartbeat, manifest):
    good = codec.encode(heartbeat, "min_json", manifest)
    for i in range(6):
        body = good.payload if i % 2 else b"{" + good.payload
        post(service, body, wire_headers(good))
    s = service.stats.snapshot()["encodings"]["min_json"]
    assert s["received"] + s["failures"] == 6 and s["failures"] == 3


def test_concurrent_senders(service, heartbeat, manifest):
    errors = []

    def run():
        try:
            r = send_burst(service.url, [heartbeat], "min_json", n=25, manifest=manifest)
            assert r.failures == 0 and r.digest_mismatches == 0
        except Exception as exc:  # surfaced below
            errors.append(exc)

    threads = [threading.Thread(target=run) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert service.stats.snapshot()["encodings"]["min_json"]["received"] == 100


def _closed_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_wrong_port(heartbeat):
    with pytest.raises(ConnectionFailure) as info:
        send_burst(f"http://127.0.0.1:{_closed_port()}", [heartbeat], "xml")
    assert info.value.partial is not None and info.value.partial.sent == 0
    with pytest.raises(ConnectionFailure):
        fetch_stats(f"http://127.0.0.1:{_closed_port()}")


def test_burst_to_stopped_server(schema_set, manifest, heartbeat):
    handle = serve(("127.0.0.1", 0), schema_set, manifest)
    url = handle.url
    send_burst(url, [heartbeat], "xml", n=1)
    handle.close()
    with pytest.raises(ConnectionFailure):
        send_burst(url, [heartbeat], "xml", n=5)


def test_close_stops_listening(schema_set, manifest):
    handle = serve(("127.0.0.1", 0), schema_set, manifest)
    host, port = handle.address
    handle.close()
    with pytest.raises(OSError):
        socket.create_connection((host, port), timeout=1).close()


def test_connection_dropped_mid_burst_flags_partial(heartbeat):
    listener = socket.create_server(("127.0.0.1", 0))
    digest = tree_digest(heartbeat)

    def answer_once():
        conn, _ = listener.accept()
        with conn:
            request = b""
            while b"\r\n\r\n" not in request:
                request += conn.recv(65536)
            head, _, body = request.partition(b"\r\n\r\n")
            length = int(next(line.split(b":")[1] for line in head.split(b"\r\n")
                              if line.lower().startswith(b"content-length")))
            while len(body) < length:
                body += conn.recv(65536)
            conn.sendall(b"HTTP/1.1 200 OK\r\nContent-Length: 0\r\n"
                         + f"{DIGEST_HEADER}: {digest}\r\n\r\n".encode())
        listener.close()

    thread = threading.Thread(target=answer_once)
    thread.start()
    with pytest.raises(ConnectionFailure) as info:
        send_burst("http://127.0.0.1:%d" % listener.getsockname()[1], [heartbeat], "xml", n=5)
    thread.join()
    partial = info.value.partial
    assert partial.partial and partial.sent == 1 and len(partial.samples_us) == 1
