"""Regenerate the committed golden reports under corpus/golden/.

Usage: python scripts/regen_golden.py
"""

from pathlib import Path

from levigauge.cli import main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ["ball", "bis_2_3", "bis_2_2_2", "bis_2_3_4", "c4"]


def golden_path(name: str) -> Path:
    return ROOT / "corpus" / "golden" / f"{name}.report.json"


if __name__ == "__main__":
    for name in CORPUS:
        out = golden_path(name)
        out.parent.mkdir(parents=True, exist_ok=True)
        code = main(["report", "--spec", str(ROOT / "corpus" / f"{name}.json"), "--out", str(out)])
        print(f"{name}: exit {code} -> {out.relative_to(ROOT)}")
