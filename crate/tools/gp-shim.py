#!/usr/bin/env python3
"""Runs a GP script read from standard input through cypari.

Stands in for `gp -q` where only the cypari bindings are installed. As in gp,
every line is one input unless braces join several lines into one; GP line
comments are removed.
"""
import os
import re
import sys

from cypari import pari


def units(text):
    """Splits a script into gp inputs; braces outside strings join lines."""
    out, cur, depth = [], [], 0
    for line in text.splitlines():
        line = re.sub(r"\\\\.*$", "", line)
        piece, in_str = [], False
        for ch in line:
            if ch == '"':
                in_str = not in_str
            if not in_str and ch in "{}":
                depth += 1 if ch == "{" else -1
                continue
            piece.append(ch)
        cur.append("".join(piece))
        if depth == 0:
            unit = " ".join(cur).strip()
            if unit:
                out.append(unit)
            cur = []
    if depth != 0:
        raise SystemExit("ERROR: unbalanced braces")
    return out


def main():
    # the stack message goes to stdout; keep stdout for the script only
    saved = os.dup(1)
    os.dup2(2, 1)
    pari.allocatemem(10**8, 2 * 10**9)
    sys.stdout.flush()
    os.dup2(saved, 1)
    os.close(saved)
    try:
        for unit in units(sys.stdin.read()):
            pari(unit)
    except Exception as e:
        print(f"ERROR: {e}", flush=True)
        sys.exit(1)
    sys.stdout.flush()


if __name__ == "__main__":
    main()
