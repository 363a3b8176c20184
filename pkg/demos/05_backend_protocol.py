#!/usr/bin/env python3
"""Drive the wire protocol against a minimal in-script backend.

Spawns a ten-line backend as a subprocess (via ``python -c``), completes
the handshake, and exercises predict and fill_mask — the same conversation
a real transformer backend would have.  See docs/protocol_v1.md for the
record schemas.
"""

import sys

from clueguard import connect

MINI_BACKEND = r"""
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    if req.get("op") == "hello":
        print(json.dumps({"protocol_version": 1,
                          "capabilities": ["predict", "fill_mask"]}), flush=True)
        continue
    rid = req.get("request_id")
    if req["op"] == "predict":
        labels = ["INFORMATIVE" if "deaths" in t.lower() else "UNINFORMATIVE"
                  for t in req["payload"]["texts"]]
        print(json.dumps({"request_id": rid, "ok": True,
                          "result": {"labels": labels}}), flush=True)
    elif req["op"] == "fill_mask":
        cands = [["cases", 0.41], ["deaths", 0.32], ["storms", 0.08]]
        print(json.dumps({"request_id": rid, "ok": True,
                          "result": {"candidates": cands[: req["payload"]["top_k"]]}}),
              flush=True)
    elif req["op"] == "shutdown":
        print(json.dumps({"request_id": rid, "ok": True, "result": {}}), flush=True)
        break
"""


def main() -> None:
    with connect([sys.executable, "-c", MINI_BACKEND],
                 required_ops=("predict", "fill_mask")) as backend:
        print(f"handshake ok; backend capabilities: {sorted(backend.capabilities)}\n")

        texts = ["10 deaths confirmed by the county", "brunch was elite today"]
        labels = backend.predict(texts)
        for text, label in zip(texts, labels):
            print(f"predict  {text!r:45s} -> {label.value}")

        candidates = backend.fill_mask("10 [MASK] reported", top_k=3)
        print(f"\nfill_mask '10 [MASK] reported' ->")
        for token, score in candidates:
            print(f"  {token:10s} {score:.2f}")
    print("\nconnection shut down cleanly.")


if __name__ == "__main__":
    main()
