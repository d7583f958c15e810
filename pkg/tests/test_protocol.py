import io
import math
import socket
import threading
import time
from pathlib import Path

import pytest

from synstate.grammar import make_pcfg
from synstate.protocol import (
    ExternalScorerClient,
    ProtocolError,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
    score_batch,
    serve_scorer,
)
from synstate.scorers import EarleyScorer, ScorerFailure, StubPieceScorer
from synstate.suites import subordination_suite
from synstate.toygrammars import subordination_grammar

FIXTURE = Path(__file__).parent / "fixtures" / "protocol_transcript.txt"


def test_request_round_trip():
    line = encode_request(7, ["a", "b"], True)
    req = decode_request(line)
    assert req == {"id": 7, "tokens": ["a", "b"], "want_eos": True}


def test_response_round_trip_with_infinity():
    line = encode_response(3, [0.25, float("inf")], eos=float("inf"))
    assert '"inf"' in line
    resp = decode_response(line)
    assert resp["surprisals"] == [0.25, float("inf")]
    assert resp["eos"] == float("inf")


def test_response_precision():
    value = 0.123456789123456
    resp = decode_response(encode_response(1, [value], eos=None))
    assert resp["surprisals"][0] == pytest.approx(value, abs=1e-12)


def test_decode_request_rejects_garbage():
    for bad in ("nope", "{}", '{"id": 1, "tokens": "x"}', '{"id": 1, "tokens": [1]}'):
        with pytest.raises(ProtocolError):
            decode_request(bad)


def run_server_inline(scorer, request_lines):
    rfile = io.BytesIO(("\n".join(request_lines) + "\n").encode("utf-8"))
    wfile = io.BytesIO()
    serve_scorer(scorer, rfile, wfile)
    return wfile.getvalue().decode("utf-8").splitlines()


def test_transcript_fixture_is_reproduced_exactly():
    lines = FIXTURE.read_text().splitlines()
    requests = [l[2:] for l in lines if l.startswith("> ")]
    expected = [l[2:] for l in lines if l.startswith("< ")]
    got = run_server_inline(StubPieceScorer(), requests)
    assert got == expected


def test_server_continues_after_malformed_line():
    out = run_server_inline(
        StubPieceScorer(),
        ["garbage", encode_request(1, ["hi"], True)],
    )
    assert decode_response(out[0])["status"] == "error"
    assert decode_response(out[1])["status"] == "ok"


def test_server_empty_token_list():
    out = run_server_inline(StubPieceScorer(), [encode_request(1, [], False)])
    resp = decode_response(out[0])
    assert resp["surprisals"] == [] and resp["eos"] is None


class SlowScorer:
    name = "slow"

    def __init__(self, delay, fail_tokens=()):
        self.delay = delay
        self.fail_tokens = set(fail_tokens)

    def score(self, tokens):
        if set(tokens) & self.fail_tokens:
            raise ScorerFailure("refused token")
        time.sleep(self.delay)
        return [1.0] * len(tokens), 1.0


@pytest.fixture
def tcp_server():
    def start(scorer):
        server = socket.create_server(("127.0.0.1", 0))
        host, port = server.getsockname()

        def run():
            while True:
                try:
                    conn, _ = server.accept()
                except OSError:
                    return
                with conn:
                    try:
                        serve_scorer(scorer, conn.makefile("rb"), conn.makefile("wb"))
                    except (BrokenPipeError, ConnectionResetError):
                        pass

        thread = threading.Thread(target=run, daemon=True)
        thread.start()
        return server, f"tcp:{host}:{port}"

    servers = []

    def factory(scorer):
        server, endpoint = start(scorer)
        servers.append(server)
        return endpoint

    yield factory
    for s in servers:
        s.close()


def test_tcp_round_trip_matches_direct(tcp_server):
    g = subordination_grammar()
    direct = EarleyScorer(g, name="earley")
    endpoint = tcp_server(EarleyScorer(g, name="earley"))
    exp = subordination_suite()
    sent = exp.items[0].sentences[("sub", "matrix")]
    with ExternalScorerClient(endpoint, timeout=10) as client:
        got_s, got_e = client.score(list(sent.tokens))
    want_s, want_e = direct.score(list(sent.tokens))
    assert got_s == pytest.approx(want_s, abs=1e-9)
    assert got_e == pytest.approx(want_e, abs=1e-9)


def test_score_batch_partial_failure(tcp_server):
    exp = subordination_suite()
    exp = type(exp)(
        name=exp.name,
        factors=exp.factors,
        region_names=exp.region_names,
        items=exp.items[:2],
        builtin_effects=exp.builtin_effects,
    )
    fail_word = exp.items[0].sentences[("sub", "matrix")].tokens[1]
    endpoint = tcp_server(SlowScorer(0.0, fail_tokens={fail_word}))
    with ExternalScorerClient(endpoint, timeout=10) as client:
        table, failures = score_batch(client, exp)
    assert failures, "expected at least one per-sentence failure"
    assert all(reason == "refused token" for _, _, reason in failures)
    scored = {(r.item_id, r.condition) for r in table.rows}
    failed = {(i, c) for i, c, _ in failures}
    assert not scored & failed
    assert len(scored) + len(failed) == 8


def test_timeout_marks_sentence_failed(tcp_server):
    endpoint = tcp_server(SlowScorer(0.6))
    exp = subordination_suite()
    exp = type(exp)(
        name=exp.name,
        factors=exp.factors,
        region_names=exp.region_names,
        items=exp.items[:1],
        builtin_effects=(),
    )
    with ExternalScorerClient(endpoint, timeout=0.05) as client:
        table, failures = score_batch(client, exp)
    assert len(failures) == 4
    assert all(reason == "timeout" for _, _, reason in failures)


def test_connection_refused_raises():
    client = ExternalScorerClient("tcp:127.0.0.1:1", timeout=0.5)
    with pytest.raises(ProtocolError, match="refused"):
        client.score(["a"])


class MisalignedScorer:
    name = "bad"

    def score(self, tokens):
        return [1.0] * (len(tokens) + 1), 1.0


def test_length_mismatch_marked(tcp_server):
    endpoint = tcp_server(MisalignedScorer())
    with ExternalScorerClient(endpoint, timeout=5) as client:
        with pytest.raises(ScorerFailure, match="length mismatch"):
            client.score(["a", "b"])
