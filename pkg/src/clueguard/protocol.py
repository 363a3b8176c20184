"""Wire protocol v1 client for out-of-process model backends.

Framing is newline-delimited UTF-8 JSON records over the standard streams
of a spawned subprocess, or over a TCP connection to ``host:port``.  The
connection is synchronous with exactly one request in flight; request ids
increase strictly and every response echoes the id of the outstanding
request.  Long-running ``train`` calls keep the connection alive with
progress records between the request and its final response.

The full record schemas live in docs/protocol_v1.md.
"""

from __future__ import annotations

import json
import queue
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .corpus import Label

__all__ = [
    "PROTOCOL_VERSION",
    "DEFAULT_CALL_TIMEOUT",
    "TRAIN_IDLE_TIMEOUT",
    "BackendError",
    "TransportError",
    "ProtocolError",
    "VersionMismatchError",
    "CapabilityError",
    "RemoteError",
    "BackendRequest",
    "BackendResponse",
    "BackendHandle",
    "BackendClassifier",
    "connect",
    "call",
]

PROTOCOL_VERSION = 1

# Per-call timeout for predict/fill_mask.  Train is unlimited overall but the
# backend must emit a progress record at least every 60 s, so the client
# treats twice that window of silence as a dead backend.
DEFAULT_CALL_TIMEOUT = 120.0
TRAIN_IDLE_TIMEOUT = 120.0

_EOF = object()


class BackendError(Exception):
    """Base class for everything that can go wrong talking to a backend."""


class TransportError(BackendError):
    """The backend died, hung past its timeout, or the stream broke."""


class ProtocolError(BackendError):
    """The backend spoke, but not protocol v1."""


class VersionMismatchError(ProtocolError):
    pass


class CapabilityError(ProtocolError):
    pass


class RemoteError(BackendError):
    """The backend executed the request and reported a failure."""


@dataclass(frozen=True)
class BackendRequest:
    op: str
    payload: dict[str, Any]
    request_id: int

    def to_line(self) -> str:
        return json.dumps(
            {"op": self.op, "payload": self.payload, "request_id": self.request_id},
            ensure_ascii=False,
            sort_keys=True,
        )


@dataclass(frozen=True)
class BackendResponse:
    request_id: int
    ok: bool
    result: Optional[dict[str, Any]] = None
    error: Optional[str] = None


class _Transport:
    """Line transport with a reader thread so reads can time out cleanly."""

    def __init__(self, writer, reader, on_close=None) -> None:
        self._writer = writer
        self._on_close = on_close
        self._lines: queue.Queue = queue.Queue()
        self._thread = threading.Thread(
            target=self._pump, args=(reader,), daemon=True
        )
        self._thread.start()

    def _pump(self, reader) -> None:
        try:
            for raw in reader:
                self._lines.put(raw)
        except (OSError, ValueError):
            pass
        self._lines.put(_EOF)

    def send_line(self, line: str) -> None:
        try:
            self._writer.write(line + "\n")
            self._writer.flush()
        except (OSError, ValueError, BrokenPipeError) as exc:
            raise TransportError(f"backend connection is closed: {exc}") from None

    def recv_line(self, timeout: Optional[float]) -> str:
        try:
            item = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise TransportError(
                f"backend produced no output within {timeout} s"
            ) from None
        if item is _EOF:
            raise TransportError("backend closed the connection")
        return item.rstrip("\r\n")

    def close(self) -> None:
        try:
            self._writer.close()
        except (OSError, ValueError):
            pass
        if self._on_close is not None:
            self._on_close()


@dataclass
class BackendHandle:
    """An open protocol v1 connection.

    A handle is confined to one logical owner: it may move between threads
    but never be used concurrently.  After a transport error the handle is
    broken and refuses further calls.
    """

    transport: _Transport
    capabilities: frozenset[str]
    _next_id: int = 1
    _in_flight: bool = field(default=False, repr=False)
    broken: bool = False
    closed: bool = False

    def _take_id(self) -> int:
        rid = self._next_id
        self._next_id += 1
        return rid

    def call(
        self, op: str, payload: dict[str, Any], timeout: Optional[float] = None
    ) -> dict[str, Any]:
        request = BackendRequest(op=op, payload=payload, request_id=self._take_id())
        response = call(self, request, timeout)
        if not response.ok:
            raise RemoteError(response.error or "backend reported an unspecified error")
        return response.result or {}

    # Convenience wrappers over the raw ops.

    def predict(
        self,
        texts: Sequence[str],
        model_id: Optional[str] = None,
        timeout: float = DEFAULT_CALL_TIMEOUT,
    ) -> list[Label]:
        payload: dict[str, Any] = {"texts": list(texts)}
        if model_id is not None:
            payload["model_id"] = model_id
        result = self.call("predict", payload, timeout)
        labels = result.get("labels")
        if not isinstance(labels, list) or len(labels) != len(texts):
            raise ProtocolError(
                f"predict returned {labels!r} for {len(texts)} input texts"
            )
        try:
            return [Label(lab) for lab in labels]
        except ValueError as exc:
            raise ProtocolError(f"predict returned an unknown label: {exc}") from None

    def fill_mask(
        self, text: str, top_k: int = 10, timeout: float = DEFAULT_CALL_TIMEOUT
    ) -> list[tuple[str, float]]:
        result = self.call("fill_mask", {"text": text, "top_k": top_k}, timeout)
        candidates = result.get("candidates")
        if not isinstance(candidates, list):
            raise ProtocolError(f"fill_mask returned no candidate list: {result!r}")
        out = []
        for item in candidates:
            if (
                not isinstance(item, (list, tuple))
                or len(item) != 2
                or not isinstance(item[0], str)
            ):
                raise ProtocolError(f"malformed fill_mask candidate: {item!r}")
            out.append((item[0], float(item[1])))
        if len(out) > top_k:
            raise ProtocolError(
                f"fill_mask returned {len(out)} candidates, more than top_k={top_k}"
            )
        return out

    def train(
        self, payload: dict[str, Any], timeout: Optional[float] = TRAIN_IDLE_TIMEOUT
    ) -> dict[str, Any]:
        """Run a training job; the timeout bounds silence, not total time."""
        return self.call("train", payload, timeout)

    def shutdown(self) -> None:
        """Graceful exit: send shutdown, then drop the connection."""
        if self.broken or self.closed:
            return
        try:
            request = BackendRequest(op="shutdown", payload={}, request_id=self._take_id())
            self.transport.send_line(request.to_line())
        except TransportError:
            pass
        self.close()

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            self.transport.close()

    def __enter__(self) -> "BackendHandle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()


def call(
    handle: BackendHandle, request: BackendRequest, timeout: Optional[float] = None
) -> BackendResponse:
    """Send one request and await its response (or progress heartbeats).

    ``timeout`` bounds each wait for a line; any progress record for the
    outstanding request resets it.  On timeout or backend death the handle
    is marked broken and a :class:`TransportError` is raised.
    """
    if handle.closed:
        raise TransportError("handle is closed")
    if handle.broken:
        raise TransportError("handle is broken by an earlier transport error")
    if handle._in_flight:
        raise RuntimeError("one request already in flight on this handle")
    if timeout is None:
        timeout = DEFAULT_CALL_TIMEOUT

    handle._in_flight = True
    try:
        handle.transport.send_line(request.to_line())
        while True:
            try:
                line = handle.transport.recv_line(timeout)
            except TransportError:
                handle.broken = True
                raise
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise ProtocolError(f"backend sent a malformed line: {line!r}") from None
            if not isinstance(record, dict):
                raise ProtocolError(f"backend sent a non-record line: {line!r}")
            if "ok" not in record and "progress" in record:
                # Heartbeat for the outstanding request; keep waiting.
                if record.get("request_id") != request.request_id:
                    raise ProtocolError(
                        f"progress for request {record.get('request_id')!r} while "
                        f"request {request.request_id} is outstanding"
                    )
                continue
            if "ok" not in record:
                raise ProtocolError(f"backend sent a response without ok: {line!r}")
            if record.get("request_id") != request.request_id:
                raise ProtocolError(
                    f"response for request {record.get('request_id')!r} does not "
                    f"match outstanding request {request.request_id}"
                )
            return BackendResponse(
                request_id=request.request_id,
                ok=bool(record["ok"]),
                result=record.get("result"),
                error=record.get("error"),
            )
    finally:
        handle._in_flight = False


@dataclass
class BackendClassifier:
    """Adapter exposing a backend's predict op as a local classifier."""

    handle: BackendHandle
    model_id: Optional[str] = None
    timeout: float = DEFAULT_CALL_TIMEOUT

    def predict_labels(self, texts: Sequence[str]) -> list[Label]:
        return self.handle.predict(texts, model_id=self.model_id, timeout=self.timeout)


def _parse_tcp_target(target: str) -> Optional[tuple[str, int]]:
    if ":" not in target:
        return None
    host, _, port = target.rpartition(":")
    if not host or not port.isdigit():
        return None
    return host, int(port)


def _open_transport(target: str | Sequence[str], timeout: float) -> _Transport:
    if isinstance(target, str):
        tcp = _parse_tcp_target(target)
        if tcp is not None:
            try:
                sock = socket.create_connection(tcp, timeout=timeout)
            except OSError as exc:
                raise TransportError(f"cannot connect to {target}: {exc}") from None
            sock.settimeout(None)
            reader = sock.makefile("r", encoding="utf-8", newline="\n")
            writer = sock.makefile("w", encoding="utf-8", newline="\n")
            return _Transport(writer, reader, on_close=sock.close)
        argv = shlex.split(target)
    else:
        argv = list(target)
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
    except OSError as exc:
        raise TransportError(f"cannot spawn backend {argv!r}: {exc}") from None
    return _Transport(proc.stdin, proc.stdout, on_close=proc.terminate)


def connect(
    target: str | Sequence[str],
    required_ops: Iterable[str] = ("predict",),
    timeout: float = 10.0,
) -> BackendHandle:
    """Spawn or dial a backend and complete the protocol handshake.

    ``target`` is either an argv (list or shell-style string) for a
    subprocess speaking the protocol on its standard streams, or a
    ``host:port`` string for a TCP backend.  The backend must echo protocol
    version 1 and advertise every op in ``required_ops``.
    """
    transport = _open_transport(target, timeout)
    try:
        transport.send_line(
            json.dumps({"op": "hello", "protocol_version": PROTOCOL_VERSION})
        )
        line = transport.recv_line(timeout)
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(f"malformed handshake response: {line!r}") from None
        version = record.get("protocol_version")
        if version != PROTOCOL_VERSION:
            raise VersionMismatchError(
                f"backend speaks protocol {version!r}, client speaks {PROTOCOL_VERSION}"
            )
        capabilities = frozenset(record.get("capabilities", ()))
        missing = set(required_ops) - capabilities
        if missing:
            raise CapabilityError(
                f"backend lacks required ops: {', '.join(sorted(missing))} "
                f"(advertises: {', '.join(sorted(capabilities)) or 'none'})"
            )
    except BackendError:
        transport.close()
        raise
    return BackendHandle(transport=transport, capabilities=capabilities)
