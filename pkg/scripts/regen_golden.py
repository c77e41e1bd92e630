#!/usr/bin/env python3
"""Regenerate the frozen SVG golden files under tests/golden/.

Run from the repository root after a deliberate change to the figure
layout, then review the diff.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))

from figures import FIGURES  # noqa: E402

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, render in FIGURES.items():
        path = GOLDEN / f"{name}.svg"
        path.write_text(render(), encoding="utf-8")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
