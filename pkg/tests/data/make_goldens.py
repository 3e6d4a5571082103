"""Regenerate the committed bench photographs and scripted-run goldens.

Run from the repository root:

    python3 tests/data/make_goldens.py

Outputs:
  tests/data/bench/    the synthetic dilution-ladder photographs
  tests/data/golden/   every artifact of the scripted CLI workflow
  docs/example.specsession   a ready-to-open session produced by that run

The determinism acceptance test replays the workflow on the committed
photographs and compares byte for byte against these files, so regenerate
them only when an intentional output change makes it necessary.
"""

import shutil
import sys
import tempfile
from pathlib import Path

TESTS_DIR = Path(__file__).resolve().parents[1]
REPO_ROOT = TESTS_DIR.parent
sys.path.insert(0, str(TESTS_DIR))

import kit  # noqa: E402  (needs tests/ on the path first)


def main() -> None:
    bench_dir = TESTS_DIR / "data" / "bench"
    golden_dir = TESTS_DIR / "data" / "golden"
    kit.render_bench_images(bench_dir)
    print(f"wrote {len(list(bench_dir.iterdir()))} photographs to {bench_dir}")

    with tempfile.TemporaryDirectory() as tmp:
        artifacts = kit.run_cli_pipeline(bench_dir, tmp)
        if golden_dir.is_dir():
            shutil.rmtree(golden_dir)
        golden_dir.mkdir(parents=True)
        for name, text in sorted(artifacts.items()):
            (golden_dir / name).write_text(text, encoding="utf-8", newline="")
        print(f"wrote {len(artifacts)} goldens to {golden_dir}")

        example = REPO_ROOT / "docs" / "example.specsession"
        example.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(Path(tmp) / "bench.specsession", example)
        print(f"wrote {example}")


if __name__ == "__main__":
    main()
