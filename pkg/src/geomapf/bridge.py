"""Client side of the phi-evaluator wire protocol (v1).

Newline-delimited UTF-8 JSON over a stream socket. Session starts with a
hello exchange `{"hello": "geo-mapf-phi", "version": 1}` in both
directions; then one request object per line with a matching response per
line, correlated by the `id` field.

There is deliberately no fallback heuristic: any bridge failure raises,
so a broken evaluator cannot silently corrupt benchmark results.
"""

from __future__ import annotations

import json
import socket
from typing import List, Optional, Sequence, Tuple

from .envgen import Roadmap

HELLO = {"hello": "geo-mapf-phi", "version": 1}


class BridgeError(RuntimeError):
    pass


class BridgeTransportError(BridgeError):
    """Connection failed, closed early, or timed out."""


class BridgeProtocolError(BridgeError):
    """Malformed message or broken request/response correlation."""


class BridgeEvaluatorError(BridgeError):
    """The evaluator answered with an error response."""


def graph_payload(roadmap: Roadmap) -> dict:
    return {
        "v": [[x, y] for x, y in roadmap.positions],
        "e": [[s, d] for s, d in sorted(roadmap.edges)],
    }


class PhiClient:
    """One connection, one in-flight request at a time."""

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
            self._sock.settimeout(timeout)
            self._rfile = self._sock.makefile("r", encoding="utf-8")
            self._wfile = self._sock.makefile("w", encoding="utf-8")
        except OSError as e:
            raise BridgeTransportError(f"connect to {host}:{port} failed: {e}") from e
        self._next_id = 0
        self._handshake()

    def _send(self, obj: dict) -> None:
        try:
            self._wfile.write(json.dumps(obj) + "\n")
            self._wfile.flush()
        except OSError as e:
            raise BridgeTransportError(f"send failed: {e}") from e

    def _recv(self) -> dict:
        try:
            line = self._rfile.readline()
        except socket.timeout as e:
            raise BridgeTransportError("receive timed out") from e
        except OSError as e:
            raise BridgeTransportError(f"receive failed: {e}") from e
        if not line:
            raise BridgeTransportError("connection closed by evaluator")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise BridgeProtocolError(f"malformed response line: {e}") from e
        if not isinstance(obj, dict):
            raise BridgeProtocolError("response is not an object")
        return obj

    def _handshake(self) -> None:
        self._send(HELLO)
        reply = self._recv()
        if reply.get("hello") != HELLO["hello"] or reply.get("version") != HELLO["version"]:
            raise BridgeProtocolError(f"bad hello from evaluator: {reply!r}")

    def eval_phi(self, graph: dict, paths: Sequence[Sequence[int]]) -> float:
        req_id = self._next_id
        self._next_id += 1
        self._send({"id": req_id, "graph": graph, "paths": [list(p) for p in paths]})
        resp = self._recv()
        if resp.get("id") != req_id:
            raise BridgeProtocolError(
                f"response id {resp.get('id')!r} does not match request id {req_id}"
            )
        if "error" in resp:
            raise BridgeEvaluatorError(str(resp["error"]))
        value = resp.get("value")
        if not isinstance(value, (int, float)) or value != value:
            raise BridgeProtocolError(f"non-finite or missing value: {value!r}")
        return float(value)

    def eval_phi_batch(self, graph: dict, path_sets: Sequence[Sequence[Sequence[int]]]) -> List[float]:
        return [self.eval_phi(graph, paths) for paths in path_sets]

    def close(self) -> None:
        # the makefile objects hold dup'd descriptors; close them too so the
        # server sees EOF promptly
        for resource in (self._rfile, self._wfile, self._sock):
            try:
                resource.close()
            except OSError:
                pass

    def __enter__(self) -> "PhiClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def phi_evaluator(client: PhiClient, roadmap: Roadmap):
    """Bind a client and roadmap into a solution -> phi callable for
    psi_depth_phi."""
    graph = graph_payload(roadmap)

    def phi(solution: Sequence[Sequence[int]]) -> float:
        return client.eval_phi(graph, solution)

    return phi
