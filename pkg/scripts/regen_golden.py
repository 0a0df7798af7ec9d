"""Regenerate the CLI golden files from tests/golden/corpus.txt."""
from __future__ import annotations

import argparse
import shlex
from dataclasses import dataclass
from pathlib import Path

from qfi.cli import capture

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class GoldenConfig:
    corpus: Path = ROOT / "tests" / "golden" / "corpus.txt"
    out_dir: Path = ROOT / "tests" / "golden"


def load_corpus(path: Path) -> list[tuple[str, list[str]]]:
    out = []
    for line in path.read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            name, rest = line.split(None, 1)
            out.append((name, shlex.split(rest)))
    return out


def render_case(argv: list[str]) -> str:
    code, out, err = capture(argv)
    return f"$ qfi {shlex.join(argv)}\n--- exit {code}\n--- stdout\n{out}--- stderr\n{err}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args()
    cfg = GoldenConfig()
    stale = []
    for name, argv in load_corpus(cfg.corpus):
        path = cfg.out_dir / f"{name}.txt"
        text = render_case(argv)
        if args.check:
            if not path.exists() or path.read_text() != text:
                stale.append(name)
        else:
            path.write_text(text)
    if args.check:
        print("stale: " + ", ".join(stale) if stale else "all golden files current")
        raise SystemExit(1 if stale else 0)


if __name__ == "__main__":
    main()
