"""Line protocol for external surprisal scorers.

One UTF-8 JSON record per line. Requests carry id, tokens, want_eos;
responses echo the id and report surprisals in bits (decimal text, at least
9 significant digits; infinity as the literal string "inf"), an eos field
only when requested, and a status. Responses are written in request order;
malformed input produces an error response, never termination.

Keeping surprisal (bits) rather than raw log-probabilities on the wire puts
the unit convention in exactly one place, and a line protocol is trivially
implementable from any ecosystem hosting a neural LM.
"""

from __future__ import annotations

import json
import math
import select
import shlex
import socket
import subprocess
import sys
from dataclasses import dataclass

from synstate.scorers import ScorerFailure, SurprisalRow, SurprisalTable

DEFAULT_PORT = 9337
DEFAULT_TIMEOUT = 30.0


class ProtocolError(RuntimeError):
    pass


def _encode_bits(x: float):
    if math.isinf(x):
        return "inf"
    # Integral values get a fixed one-decimal form so independent
    # implementations can match transcripts byte for byte; everything else
    # uses shortest round-trip decimal (>= 9 significant digits).
    if x == int(x) and abs(x) < 1e15:
        return f"{x:.1f}"
    return repr(x)


def _decode_bits(v) -> float:
    if v == "inf":
        return float("inf")
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ProtocolError(f"bad surprisal value {v!r}")
    x = float(v)
    if math.isnan(x):
        raise ProtocolError("NaN surprisal")
    return x


def encode_request(request_id: int, tokens, want_eos: bool) -> str:
    return json.dumps(
        {"id": request_id, "tokens": list(tokens), "want_eos": bool(want_eos)},
        ensure_ascii=False,
        separators=(", ", ": "),
    )


def decode_request(line: str) -> dict:
    try:
        obj = json.loads(line)
        request_id = int(obj["id"])
        tokens = obj["tokens"]
        want_eos = bool(obj.get("want_eos", False))
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise ValueError("tokens must be a list of strings")
    except (ValueError, KeyError, TypeError) as exc:
        raise ProtocolError(f"parse: {exc}") from exc
    return {"id": request_id, "tokens": tokens, "want_eos": want_eos}


def encode_response(request_id, surprisals=None, eos=None, error=None) -> str:
    """Fixed key order so transcripts are byte-deterministic."""
    parts = []
    if request_id is not None:
        parts.append(f'"id": {int(request_id)}')
    if error is None:
        encoded = ", ".join(
            json.dumps(_encode_bits(s)) if math.isinf(s) else _encode_bits(s)
            for s in surprisals
        )
        parts.append(f'"surprisals": [{encoded}]')
        if eos is not None:
            parts.append(
                f'"eos": {json.dumps(_encode_bits(eos)) if math.isinf(eos) else _encode_bits(eos)}'
            )
        parts.append('"status": "ok"')
    else:
        parts.append('"status": "error"')
        parts.append(f'"message": {json.dumps(error, ensure_ascii=False)}')
    return "{" + ", ".join(parts) + "}"


def decode_response(line: str) -> dict:
    try:
        obj = json.loads(line)
    except ValueError as exc:
        raise ProtocolError(f"unparseable response: {exc}") from exc
    if obj.get("status") == "ok":
        return {
            "id": int(obj["id"]),
            "surprisals": [_decode_bits(v) for v in obj["surprisals"]],
            "eos": _decode_bits(obj["eos"]) if "eos" in obj else None,
            "status": "ok",
        }
    return {
        "id": int(obj["id"]) if "id" in obj else None,
        "status": "error",
        "message": obj.get("message", ""),
    }


# -- server --------------------------------------------------------------------


def serve_scorer(scorer, rfile, wfile):
    """Serve one connection: read request lines, write one response per
    request in order. Returns when the stream closes."""
    for raw in rfile:
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line:
            continue
        try:
            req = decode_request(line)
        except ProtocolError:
            _write_line(wfile, encode_response(None, error="parse"))
            continue
        try:
            surps, eos = scorer.score(req["tokens"])
            out = encode_response(
                req["id"], surps, eos if req["want_eos"] else None
            )
        except ScorerFailure as exc:
            out = encode_response(req["id"], error=str(exc))
        _write_line(wfile, out)


def _write_line(wfile, text):
    data = text + "\n"
    if hasattr(wfile, "buffer"):
        wfile = wfile.buffer
    try:
        wfile.write(data.encode("utf-8"))
    except TypeError:
        wfile.write(data)
    wfile.flush()


def serve_stdio(scorer):
    serve_scorer(scorer, sys.stdin.buffer, sys.stdout.buffer)


def serve_tcp(scorer, host="127.0.0.1", port=DEFAULT_PORT, ready_callback=None):
    """Accept connections forever, one at a time per the one-stream-per-
    connection model."""
    with socket.create_server((host, port)) as server:
        if ready_callback is not None:
            ready_callback(server.getsockname())
        while True:
            conn, _ = server.accept()
            with conn:
                rfile = conn.makefile("rb")
                wfile = conn.makefile("wb")
                try:
                    serve_scorer(scorer, rfile, wfile)
                except (BrokenPipeError, ConnectionResetError):
                    pass


# -- client --------------------------------------------------------------------


class _TcpConnection:
    def __init__(self, host, port, timeout):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.rfile = self.sock.makefile("rb")

    def send(self, line):
        self.sock.sendall((line + "\n").encode("utf-8"))

    def recv_line(self, timeout):
        self.sock.settimeout(timeout)
        try:
            raw = self.rfile.readline()
        except (socket.timeout, TimeoutError) as exc:
            raise TimeoutError("scorer timed out") from exc
        if not raw:
            raise ProtocolError("connection closed")
        return raw.decode("utf-8").strip()

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass


class _SubprocessConnection:
    def __init__(self, argv, timeout):
        self.proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE
        )

    def send(self, line):
        self.proc.stdin.write((line + "\n").encode("utf-8"))
        self.proc.stdin.flush()

    def recv_line(self, timeout):
        ready, _, _ = select.select([self.proc.stdout], [], [], timeout)
        if not ready:
            raise TimeoutError("scorer timed out")
        raw = self.proc.stdout.readline()
        if not raw:
            raise ProtocolError("scorer process closed its output")
        return raw.decode("utf-8").strip()

    def close(self):
        for stream in (self.proc.stdin, self.proc.stdout):
            try:
                stream.close()
            except OSError:
                pass
        self.proc.terminate()
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()


class ExternalScorerClient:
    """Client for a scorer endpoint.

    endpoint forms: "tcp:HOST:PORT" or "cmd:<shell command>"; request ids
    are strictly increasing per connection and responses are read in order.
    """

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT, name=None):
        self.endpoint = endpoint
        self.timeout = timeout
        self.name = name or f"extern:{endpoint}"
        self._next_id = 1
        self._conn = None

    def _connect(self):
        if self.endpoint.startswith("tcp:"):
            _, host, port = self.endpoint.split(":", 2)
            try:
                return _TcpConnection(host, int(port), self.timeout)
            except OSError as exc:
                raise ProtocolError(f"connection refused: {exc}") from exc
        if self.endpoint.startswith("cmd:"):
            return _SubprocessConnection(
                shlex.split(self.endpoint[len("cmd:") :]), self.timeout
            )
        raise ProtocolError(f"bad endpoint {self.endpoint!r} (want tcp:... or cmd:...)")

    def _ensure(self):
        if self._conn is None:
            self._conn = self._connect()
        return self._conn

    def close(self):
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def __enter__(self):
        self._ensure()
        return self

    def __exit__(self, *exc):
        self.close()

    def score(self, tokens, want_eos=True):
        """Score one sentence; raises ScorerFailure on per-sentence errors
        and TimeoutError/ProtocolError on transport problems."""
        conn = self._ensure()
        request_id = self._next_id
        self._next_id += 1
        try:
            conn.send(encode_request(request_id, tokens, want_eos))
            resp = decode_response(conn.recv_line(self.timeout))
        except (TimeoutError, ProtocolError, OSError):
            # The stream may be desynchronized; reconnect for later requests.
            self.close()
            raise
        if resp["status"] != "ok":
            raise ScorerFailure(resp.get("message") or "scorer error")
        if resp["id"] != request_id:
            self.close()
            raise ProtocolError(
                f"response id {resp['id']} does not match request {request_id}"
            )
        if len(resp["surprisals"]) != len(tokens):
            raise ScorerFailure("length mismatch")
        if want_eos and resp["eos"] is None:
            raise ScorerFailure("missing eos")
        return resp["surprisals"], resp["eos"]


def score_batch(client: ExternalScorerClient, experiment, sentences=None):
    """Score an experiment's sentences through an external endpoint.

    Returns (SurprisalTable, failures); timeouts and per-sentence errors are
    recorded as failures, connection-refused raises.
    """
    rows = []
    failures = []
    for item in experiment.items:
        for cond in experiment.conditions():
            sent = item.sentences.get(cond)
            if sent is None:
                continue
            try:
                surps, eos = client.score(list(sent.tokens), want_eos=True)
            except ScorerFailure as exc:
                failures.append((item.id, cond, str(exc)))
                continue
            except TimeoutError:
                failures.append((item.id, cond, "timeout"))
                continue
            region_of = {}
            for name, (start, end) in sent.regions.items():
                for i in range(start, end):
                    region_of[i] = name
            for i, (tok, bits) in enumerate(zip(sent.tokens, surps)):
                rows.append(
                    SurprisalRow(
                        scorer=client.name,
                        experiment=experiment.name,
                        item_id=item.id,
                        condition=cond,
                        token_index=i,
                        token=tok,
                        region=region_of.get(i, ""),
                        is_eos=False,
                        bits=bits,
                    )
                )
            rows.append(
                SurprisalRow(
                    scorer=client.name,
                    experiment=experiment.name,
                    item_id=item.id,
                    condition=cond,
                    token_index=len(sent.tokens),
                    token="</s>",
                    region="end" if "end" in sent.regions else "",
                    is_eos=True,
                    bits=eos,
                )
            )
    return SurprisalTable(rows), failures
