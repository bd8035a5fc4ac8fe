"""Regenerate the golden files under tests/golden/.

Run only when a deliberate model change moves the reference numbers; the
test-suite compares against these files byte for byte.
"""
import shutil
import tempfile
from pathlib import Path

from stockfire import cli

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        assert cli.main(["table3", "--out", tmp]) == 0
        for name in ("table3.csv", "table3.json", "pathways.csv"):
            shutil.copy(Path(tmp) / name, GOLDEN / name)
        assert cli.main(["corridor", "--trials", "1000", "--seed", "42", "--out", tmp]) == 0
        shutil.copy(Path(tmp) / "resilience.json", GOLDEN / "resilience_seed42_1000.json")
    print(f"goldens written to {GOLDEN}")


if __name__ == "__main__":
    main()
