#!/usr/bin/env python3
"""Builds tests/fixtures/natural_en.txt: English prose sentences drawn from the
Python documentation that ships with the interpreter (pydoc topics and
standard-library docstrings, PSF license).

Usage: python3 scripts/make_natural_fixture.py [OUT] [MIN_TOKENS]
"""

import importlib
import inspect
import re
import sys

import pydoc_data.topics

SKIP = {"antigravity", "this", "idlelib", "tkinter", "turtle", "turtledemo"}
MODULES = sorted(m for m in sys.stdlib_module_names if not m.startswith("_") and m not in SKIP)

TOKEN = re.compile(r"[a-z]+(?:'[a-z]+)?|[0-9]+|[.,;:!?()]")


def prose_blocks(text):
    block = []
    for line in text.splitlines():
        code = line.startswith((" ", "\t")) or ">>>" in line or line.strip().startswith(("*", "-", "=", "|"))
        if not line.strip() or code:
            if block:
                yield " ".join(block)
            block = []
        else:
            block.append(line.strip())
    if block:
        yield " ".join(block)


def sentences(text):
    for block in prose_blocks(text):
        for s in re.split(r"(?<=[.!?])\s+(?=[A-Z])", block):
            toks = TOKEN.findall(s.lower())
            words = [t for t in toks if t[0].isalpha()]
            if 4 <= len(toks) <= 60 and len(words) >= 0.7 * len(toks):
                yield " ".join(toks)


def docstrings():
    for _, text in sorted(pydoc_data.topics.topics.items()):
        yield text
    for name in MODULES:
        try:
            mod = importlib.import_module(name)
        except Exception:
            continue
        yield inspect.getdoc(mod) or ""
        for attr in sorted(dir(mod)):
            obj = getattr(mod, attr, None)
            if inspect.isfunction(obj) or inspect.isbuiltin(obj):
                yield inspect.getdoc(obj) or ""
            elif inspect.isclass(obj):
                yield inspect.getdoc(obj) or ""
                for member in sorted(vars(obj)):
                    if not member.startswith("_"):
                        yield inspect.getdoc(getattr(obj, member, None)) or ""


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "crates/cli/tests/fixtures/natural_en.txt"
    target = int(sys.argv[2]) if len(sys.argv) > 2 else 150_000
    seen = set()
    lines = []
    tokens = 0
    for doc in docstrings():
        for s in sentences(doc):
            if s in seen:
                continue
            seen.add(s)
            lines.append(s)
            tokens += len(s.split())
        if tokens >= target:
            break
    with open(out, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    print(f"{len(lines)} sentences, {tokens} tokens -> {out}", file=sys.stderr)


if __name__ == "__main__":
    main()
