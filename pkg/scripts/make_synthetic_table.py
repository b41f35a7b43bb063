"""Regenerate src/spdckit/data/synthetic_nboi2.csv.

The table is SYNTHETIC and illustrative.  It is built from Cauchy-type index
curves and a smooth absorption edge, then pinned at two nodes:

* n_y(405) - n_y(810) = 405 / (2 * 424), so the degenerate 405 -> 810 + 810
  y-polarised process has a transparent-crystal coherence length of 424 nm.
* k_y(405) = 0.5674, found by root-finding the pump extinction for which the
  absorbing-crystal rate peaks at 299 nm (signal/idler extinction zero).
  Re-run ``python scripts/make_synthetic_table.py --calibrate`` to repeat that search.
"""

import argparse
from pathlib import Path

import numpy as np

from spdckit.dispersion import DispersionTable, save_table

OUT = Path(__file__).resolve().parents[1] / "src" / "spdckit" / "data" / "synthetic_nboi2.csv"

DELTA_N = 405.0 / (2 * 424.0)
KAPPA_PUMP = 0.5674
TARGET_L_OPT = 299.0


def build(kappa_pump=KAPPA_PUMP):
    wl = np.arange(300.0, 1100.0 + 1, 5.0)
    # y axis: n = A + B / lambda^2, B chosen so that the 405/810 difference is DELTA_N
    b_y = DELTA_N * 4 * 405.0**2 / 3
    n_y = 2.25 - b_y / 810.0**2 + b_y / wl**2
    n_y[wl == 405.0] = n_y[wl == 810.0][0] + DELTA_N
    k_y = np.where(wl < 800.0, kappa_pump * np.clip((800.0 - wl) / 395.0, 0, None) ** 1.5, 0.0)
    k_y[wl == 405.0] = kappa_pump

    n_x = 2.02 + 0.6 * 405.0**2 / wl**2 * 0.5
    k_x = np.where(wl < 760.0, 0.18 * np.clip((760.0 - wl) / 355.0, 0, None) ** 1.5, 0.0)
    n_z = 1.80 + 0.02e6 / wl**2 * 0.5
    k_z = np.where(wl < 600.0, 0.02 * np.clip((600.0 - wl) / 195.0, 0, None), 0.0)
    return DispersionTable(wl, n_x, k_x, n_y, k_y, n_z, k_z)


def calibrate():
    from scipy.optimize import brentq

    from spdckit.phasematch import SpdcConfig, phase_mismatch, thickness_sweep

    cfg = SpdcConfig.degenerate(405.0, "y")

    def peak(kappa):
        table = build(kappa)
        return thickness_sweep(cfg, table, 0.0, 2000.0, 2001, absorbing=True).peak_thickness - TARGET_L_OPT

    kappa = brentq(peak, 0.05, 1.0, xtol=1e-10)
    dk = phase_mismatch(cfg, build(kappa)).value
    print(f"kappa_pump = {kappa:.10f}  (dk = {dk})")
    return kappa


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--calibrate", action="store_true")
    args = parser.parse_args()
    if args.calibrate:
        calibrate()
        return
    comments = [
        "SYNTHETIC illustrative NbOI2-like dispersion table; NOT measured ellipsometry data.",
        "Units: wavelength in nm; n and k (extinction coefficient) dimensionless.",
        "Convention: fields propagate as exp(+i k z), k = 2 pi (n + i k) / lambda, so k >= 0 means decay.",
        f"Pinned: n_y(405) - n_y(810) = 405/(2*424) = {DELTA_N!r} (transparent coherence length 424 nm).",
        f"Pinned: k_y(405) = {KAPPA_PUMP} from a root search placing the absorbing-rate optimum at 299 nm",
        "        (degenerate 405 -> 810 + 810 nm, all fields y-polarised, k_y = 0 at 810 nm).",
        "Generated by scripts/make_synthetic_table.py.",
    ]
    save_table(build(), OUT, comments=comments)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
