"""JSON session server: one engine call per protocol message.

Messages are newline-delimited JSON objects with an `op` field, POSTed
to /api (any number of lines per body); each line gets exactly one JSON
reply line, in order.  Sessions are server-side and named by small
integer ids; commands within a session are serialized.  The transport
layer holds no semantics: every reply is assembled from one engine call.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .cds import CdslabError, EngineError, token_key
from .cli import build_argument
from .interaction import ErrOutcome, Session, Trace, ValueOutcome
from .parser import Workspace, parse_definitions


def trace_payload(trace: Trace, session: Session) -> dict:
    out: dict = {"ok": True, "trace": trace.lines()}
    o = trace.outcome
    if isinstance(o, ValueOutcome):
        out["outcome"] = "value"
        out["value"] = token_key(o.value)
    elif isinstance(o, ErrOutcome):
        out["outcome"] = "err"
    else:
        out["outcome"] = "stuck"
    if trace.pending is not None:
        space = session.alg.from_cds
        values = [token_key(v) for v in space.values_of(trace.pending)]
        if "err" not in values:
            values.append("err")
        out["pending"] = {"valof": token_key(trace.pending), "values": values}
    out["table"] = [f"{token_key(c)}={token_key(v)}" for c, v in session.table_state().sorted_events()]
    return out


class Engine:
    """Protocol dispatcher over one workspace and its sessions."""

    def __init__(self, ws: Workspace):
        self.ws = ws
        self.sessions: dict[int, Session] = {}
        self.locks: dict[int, threading.Lock] = {}
        self.next_id = 1
        self.lock = threading.Lock()

    def handle_line(self, line: str) -> dict:
        line = line.strip()
        if not line:
            return {"ok": False, "error": "parse", "detail": "empty message"}
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            return {"ok": False, "error": "parse", "detail": str(e)}
        if not isinstance(msg, dict) or "op" not in msg:
            return {"ok": False, "error": "parse", "detail": "message must be an object with an op field"}
        try:
            return self.dispatch(msg)
        except EngineError as e:
            return {"ok": False, "error": e.code, "detail": e.detail}
        except CdslabError as e:
            return {"ok": False, "error": "validation", "detail": str(e)}
        except Exception as e:  # never drop a reply
            return {"ok": False, "error": "internal", "detail": f"{type(e).__name__}: {e}"}

    def dispatch(self, msg: dict) -> dict:
        op = msg.get("op")
        if op == "load":
            before = set(self.ws.names())
            result = parse_definitions(str(msg.get("text", "")), self.ws)
            if result.errors:
                return {
                    "ok": False,
                    "error": "validation",
                    "detail": "; ".join(str(e) for e in result.errors),
                    "errors": [{"line": e.line, "col": e.col, "message": e.message} for e in result.errors],
                }
            added = [n for n in self.ws.names() if n not in before]
            return {"ok": True, "names": [{"kind": k, "name": n} for k, n in added]}
        if op == "list":
            return {"ok": True, "names": [{"kind": k, "name": n} for k, n in self.ws.names()]}
        if op == "alg":
            name = msg.get("name", "")
            alg = self.ws.algs.get(name)
            if alg is None:
                raise EngineError("unknown-name", f"no algorithm named {name!r}")
            argument = build_argument(str(msg.get("arg", "manual")), alg, self.ws)
            with self.lock:
                sid = self.next_id
                self.next_id += 1
                self.sessions[sid] = Session(alg, argument)
                self.locks[sid] = threading.Lock()
            return {
                "ok": True,
                "session": sid,
                "alg": name,
                "from": alg.from_cds.name,
                "to": alg.to_cds.name,
                "cells": [token_key(c) for c in alg.to_cds.sorted_cells()],
            }
        if op in ("request", "answer", "reset", "trace", "close"):
            sid = msg.get("session")
            session = self.sessions.get(sid)
            if session is None:
                raise EngineError("unknown-name", f"no session {sid!r}")
            with self.locks[sid]:
                if op == "request":
                    return trace_payload(session.request(msg.get("cell", "")), session)
                if op == "answer":
                    return trace_payload(session.answer(msg.get("value", "")), session)
                if op == "reset":
                    session.reset()
                    return {"ok": True}
                if op == "trace":
                    t = session.last_trace
                    return {"ok": True, "trace": t.lines() if t else []}
                with self.lock:
                    self.sessions.pop(sid, None)
                    self.locks.pop(sid, None)
                return {"ok": True}
        return {"ok": False, "error": "unknown-op", "detail": f"unsupported op {op!r}"}


_MIME = {".html": "text/html", ".js": "text/javascript", ".css": "text/css", ".map": "application/json"}


class _Handler(BaseHTTPRequestHandler):
    engine: Engine
    ui_dir: Path | None

    def log_message(self, fmt, *args):  # quiet: the banner is the only stdout line
        pass

    def _send(self, code: int, body: bytes, ctype: str) -> None:
        self.send_response(code)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "POST, GET, OPTIONS")
        self.end_headers()

    def do_POST(self) -> None:
        if self.path != "/api":
            self._send(404, b'{"ok":false,"error":"not-found"}\n', "application/x-ndjson")
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8", errors="replace")
        replies = [json.dumps(self.engine.handle_line(line)) for line in body.splitlines() if line.strip()]
        self._send(200, ("\n".join(replies) + "\n").encode(), "application/x-ndjson")

    def do_GET(self) -> None:
        if self.ui_dir is None:
            self._send(404, b"no ui configured\n", "text/plain")
            return
        rel = self.path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send(404, b"not found\n", "text/plain")
            return
        ctype = _MIME.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)


def serve(host: str, port: int, ws: Workspace, ui_dir: str | None = None) -> None:
    handler = type("BoundHandler", (_Handler,), {
        "engine": Engine(ws),
        "ui_dir": Path(ui_dir) if ui_dir else None,
    })
    httpd = ThreadingHTTPServer((host, port), handler)
    actual = httpd.server_address
    print(json.dumps({"listening": f"{actual[0]}:{actual[1]}"}), flush=True)
    httpd.serve_forever()
