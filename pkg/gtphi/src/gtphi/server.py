"""Line-protocol inference server.

Protocol v1 over a TCP connection, one UTF-8 JSON object per line: both
sides open with {"hello": "geo-mapf-phi", "version": 1}; each request
{"id", "graph": {"v", "e"}, "paths"} gets {"id", "value"} back, or
{"id", "error"} with the session kept alive.
"""

from __future__ import annotations

import json
import socket
import threading
from typing import Optional

from .data import DataError, graph_from_payload
from .model import SolutionScorer, load_checkpoint

HELLO = {"hello": "geo-mapf-phi", "version": 1}


class PhiServer:
    """Serves one connection at a time; requests within a connection are
    handled serially."""

    def __init__(self, model: SolutionScorer, host: str = "127.0.0.1", port: int = 0):
        self.model = model
        self.sock = socket.socket()
        self.sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self.sock.bind((host, port))
        self.sock.listen(1)
        self.port = self.sock.getsockname()[1]
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> "PhiServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        self.sock.close()

    def __enter__(self) -> "PhiServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    # -- serving -----------------------------------------------------------

    def serve_forever(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self.sock.accept()
            except OSError:
                return
            try:
                self._serve_connection(conn)
            finally:
                conn.close()

    def _serve_connection(self, conn: socket.socket) -> None:
        rfile = conn.makefile("r", encoding="utf-8")
        wfile = conn.makefile("w", encoding="utf-8")

        def send(obj) -> None:
            wfile.write(json.dumps(obj) + "\n")
            wfile.flush()

        send(HELLO)
        line = rfile.readline()
        try:
            peer = json.loads(line)
        except json.JSONDecodeError:
            return
        if not (isinstance(peer, dict) and peer.get("hello") == HELLO["hello"]
                and peer.get("version") == HELLO["version"]):
            return
        for line in rfile:
            if self._stop.is_set():
                return
            try:
                req = json.loads(line)
            except json.JSONDecodeError:
                send({"id": None, "error": "request is not valid JSON"})
                continue
            req_id = req.get("id") if isinstance(req, dict) else None
            try:
                if not isinstance(req, dict):
                    raise DataError("request must be a JSON object")
                graph = graph_from_payload(req["graph"])
                paths = req["paths"]
                value = self.model.score(graph, paths)
            except (DataError, KeyError, TypeError, ValueError, IndexError) as exc:
                send({"id": req_id, "error": str(exc) or type(exc).__name__})
                continue
            send({"id": req_id, "value": value})


def serve(checkpoint_path: str, host: str, port: int) -> None:
    """Blocking entry point used by the CLI."""
    model = load_checkpoint(checkpoint_path)
    server = PhiServer(model, host, port)
    print(f"serving on {host}:{server.port}", flush=True)
    server.serve_forever()
