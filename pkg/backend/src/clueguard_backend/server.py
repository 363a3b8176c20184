"""Protocol v1 server loop: stdio by default, TCP with --port.

See docs/protocol_v1.md in the main repository for the record schemas.
Model downloads honor the standard HF_HOME cache directory environment
variable.  Operational failures become ok:false responses; the process
never exits silently mid-request.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
import time
from typing import IO, Optional

from .config import ALTERNATIVE_MODEL, BackendConfig, DEFAULT_MODEL
from .modeling import ModelError, ModelRunner

PROTOCOL_VERSION = 1
CAPABILITIES = ("train", "predict", "fill_mask")

# Intra-epoch progress records are rate limited; epoch summaries always go
# out, which keeps the client's heartbeat window satisfied on any hardware
# that is making progress at all.
PROGRESS_INTERVAL_S = 20.0


class _Session:
    def __init__(self, runner: ModelRunner, reader: IO[str], writer: IO[str]) -> None:
        self.runner = runner
        self.reader = reader
        self.writer = writer
        self._last_progress = 0.0

    def emit(self, record: dict) -> None:
        self.writer.write(json.dumps(record, ensure_ascii=False) + "\n")
        self.writer.flush()

    def _progress(self, request_id: int, info: dict) -> None:
        now = time.monotonic()
        # Epoch summaries (no batch key) always flush; batch ticks are
        # rate limited.
        if "batch" in info and now - self._last_progress < PROGRESS_INTERVAL_S:
            return
        self._last_progress = now
        self.emit({"request_id": request_id, "progress": info})

    def handle(self, line: str) -> bool:
        """Process one request line; returns False when the session ends."""
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            self.emit({"request_id": None, "ok": False, "error": "malformed request line"})
            return True
        if not isinstance(request, dict):
            self.emit({"request_id": None, "ok": False, "error": "request is not an object"})
            return True

        op = request.get("op")
        if op == "hello":
            version = request.get("protocol_version")
            self.emit(
                {
                    "protocol_version": PROTOCOL_VERSION,
                    "capabilities": list(CAPABILITIES),
                    "client_version": version,
                }
            )
            return True

        request_id = request.get("request_id")
        payload = request.get("payload") or {}

        if op == "shutdown":
            self.emit({"request_id": request_id, "ok": True, "result": {}})
            return False

        try:
            if op == "predict":
                labels = self.runner.predict(
                    payload.get("texts", []), payload.get("model_id")
                )
                result = {"labels": labels}
            elif op == "fill_mask":
                candidates = self.runner.fill_mask(
                    payload.get("text", ""), int(payload.get("top_k", 10))
                )
                result = {"candidates": [[tok, score] for tok, score in candidates]}
            elif op == "train":
                result = self.runner.train(
                    payload.get("examples", []),
                    dev=payload.get("dev"),
                    params=payload.get("params"),
                    on_progress=lambda info: self._progress(request_id, info),
                )
            else:
                self.emit(
                    {"request_id": request_id, "ok": False, "error": f"unknown op {op!r}"}
                )
                return True
        except (ModelError, ValueError, KeyError, OSError, RuntimeError) as exc:
            self.emit({"request_id": request_id, "ok": False, "error": str(exc)})
            return True

        self.emit({"request_id": request_id, "ok": True, "result": result})
        return True

    def run(self) -> None:
        for line in self.reader:
            line = line.strip()
            if not line:
                continue
            if not self.handle(line):
                break


def _quiet_libraries() -> None:
    # stdout belongs to the protocol; push library chatter to stderr and
    # disable progress bars outright.
    os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
    os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")
    try:
        from transformers.utils import logging as hf_logging

        hf_logging.set_verbosity_error()
        hf_logging.disable_progress_bar()
    except Exception:
        pass


def serve_stdio(config: BackendConfig) -> None:
    runner = ModelRunner(config)
    _Session(runner, sys.stdin, sys.stdout).run()


def serve_tcp(config: BackendConfig, host: str, port: int) -> None:
    runner = ModelRunner(config)
    with socket.create_server((host, port)) as server:
        print(f"listening on {host}:{port}", file=sys.stderr)
        conn, peer = server.accept()
        print(f"connection from {peer[0]}:{peer[1]}", file=sys.stderr)
        with conn:
            reader = conn.makefile("r", encoding="utf-8", newline="\n")
            writer = conn.makefile("w", encoding="utf-8", newline="\n")
            _Session(runner, reader, writer).run()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clueguard-backend",
        description="Transformer backend speaking the clueguard wire protocol v1.",
    )
    parser.add_argument(
        "--model", default=DEFAULT_MODEL,
        help=f"pretrained model name or path (default {DEFAULT_MODEL}; "
             f"general-domain alternative: {ALTERNATIVE_MODEL})",
    )
    parser.add_argument(
        "--classifier", default=None,
        help="fine-tuned sequence-classification checkpoint served by predict "
             "when no train request has run",
    )
    parser.add_argument("--device", default="auto", help="cpu, cuda, or auto")
    parser.add_argument("--lr", type=float, default=4e-5, help="AdamW learning rate")
    parser.add_argument("--batch", type=int, default=32, help="batch size")
    parser.add_argument("--max-len", dest="max_len", type=int, default=70,
                        help="max sequence length")
    parser.add_argument("--epochs", type=int, default=7, help="training epochs")
    parser.add_argument("--dropout", type=float, default=0.1,
                        help="classifier dropout probability")
    parser.add_argument("--host", default="127.0.0.1", help="TCP bind address")
    parser.add_argument("--port", type=int, default=None,
                        help="serve one TCP connection instead of stdio")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _quiet_libraries()
    config = BackendConfig(
        model=args.model,
        classifier=args.classifier,
        learning_rate=args.lr,
        batch_size=args.batch,
        max_seq_length=args.max_len,
        epochs=args.epochs,
        classifier_dropout=args.dropout,
        device=args.device,
    )
    if args.port is not None:
        serve_tcp(config, args.host, args.port)
    else:
        serve_stdio(config)
    return 0


if __name__ == "__main__":
    sys.exit(main())
