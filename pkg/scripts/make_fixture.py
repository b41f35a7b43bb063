"""Regenerate tests/data/fixture_pair.pts and its golden coincidence counts.

The golden values come from the quadratic brute-force matcher in
tests/oracles.py, not from the package counter.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import clustered_brute_force  # noqa: E402

from spdckit.simulator import SourceModel, simulate  # noqa: E402
from spdckit.tcspc import write_pts  # noqa: E402

MODEL = SourceModel(
    pair_rate=1e7, eta1=0.3, eta2=0.25, dark1=2e5, dark2=3e5,
    jitter_sigma=350.0, dead_time=22_000, duration=1_000_000_000, seed=20240607,
)


def main():
    out = ROOT / "tests" / "data"
    out.mkdir(parents=True, exist_ok=True)
    s0, s1, truth = simulate(MODEL)
    write_pts(out / "fixture_pair.pts", [s0, s1], MODEL.duration)
    golden = {
        "window_ps": 1500,
        "coincidences": clustered_brute_force(s0.times, s1.times, 1500, 0),
        "accidentals_offset_100000ps": clustered_brute_force(s0.times, s1.times, 1500, 100_000),
        "singles": [len(s0), len(s1)],
        "source_model": MODEL.to_dict(),
        "ground_truth": truth.to_dict(),
    }
    (out / "fixture_pair.golden.json").write_text(json.dumps(golden, indent=2) + "\n")
    print(json.dumps(golden, indent=2))


if __name__ == "__main__":
    main()
