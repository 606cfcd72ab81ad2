"""Debug CLI: parse a transcript file and print role events as JSON lines.

Replaying with --chunk-size N demonstrates that chunk boundaries cannot
change the event sequence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .events import coalesce, event_to_dict
from .parser import GRAMMAR_CHAT, GRAMMAR_WEBOT, StreamParser


def parse_with_chunking(text: str, grammar: str, chunk_size: int | None):
    parser = StreamParser(grammar)
    events = []
    if chunk_size is None:
        events += parser.feed(text)
    else:
        for i in range(0, len(text), chunk_size):
            events += parser.feed(text[i : i + chunk_size])
    events += parser.finish()
    return coalesce(events)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="print role events for a model transcript")
    ap.add_argument("transcript", help="path to a transcript file, or - for stdin")
    ap.add_argument("--grammar", choices=[GRAMMAR_CHAT, GRAMMAR_WEBOT], default=GRAMMAR_CHAT)
    ap.add_argument("--chunk-size", type=int, default=None, help="replay with fixed-size chunks")
    args = ap.parse_args(argv)

    text = sys.stdin.read() if args.transcript == "-" else open(args.transcript, encoding="utf-8").read()
    for ev in parse_with_chunking(text, args.grammar, args.chunk_size):
        print(json.dumps(event_to_dict(ev), ensure_ascii=False))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
