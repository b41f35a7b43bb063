"""``spdckit`` command line.

Every subcommand prints one JSON object on stdout and writes bulk data to
files.  Physical flags need explicit unit suffixes (``--window 1.5ns``).

Exit codes: 0 ok, 2 usage, 3 data format, 4 numeric/domain.
"""

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._errors import DataFormatError, SpdcError, UsageError
from .dispersion import load_table, synthetic_table
from .metrics import fit_linear, fit_polarization, pair_efficiency, pair_metrics
from .modecoupling import emission_waist, gaussian_overlap, load_catalog, optimal_pump_waist
from .phasematch import SpdcConfig, coherence_length, phase_mismatch, thickness_sweep
from .simulator import (
    DEFAULT_DEAD_TIME_PS,
    DEFAULT_JITTER_SIGMA_PS,
    SourceModel,
    analytic_expectations,
    rng_metadata,
    simulate,
    write_ground_truth,
)
from .tcspc import (
    DEFAULT_ACCIDENTAL_OFFSET_PS,
    DEFAULT_BIN_PS,
    DEFAULT_WINDOW_PS,
    g2_histogram,
    measure_coincidences,
    read_streams,
    write_csv,
    write_pts,
)
from .units import parse_length_um, parse_quantity, parse_time_ps


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _emit(payload, inputs=()):
    payload = dict(payload)
    payload["tool_version"] = __version__
    payload["input_sha256"] = {str(p): _sha256(p) for p in inputs}
    print(json.dumps(_clean(payload), indent=2, sort_keys=False))


def _length_nm(text, name):
    return parse_quantity(text, "length", name)


def _rate(text, name):
    return parse_quantity(text, "rate", name)


def _pick_streams(path, channels):
    streams = read_streams(path)
    by_id = {s.channel: s for s in streams}
    for c in channels:
        if c not in by_id:
            raise DataFormatError(f"channel {c} not present in {path}", "channels")
    return by_id[channels[0]], by_id[channels[1]]


# ---------------------------------------------------------------- subcommands


def cmd_sweep(args):
    table = load_table(args.table) if args.table else synthetic_table()
    lp = _length_nm(args.lambda_p, "lambda_p")
    ls = _length_nm(args.lambda_s, "lambda_s")
    L_min = _length_nm(args.thickness_min, "thickness_min")
    L_max = _length_nm(args.thickness_max, "thickness_max")
    if not 0 <= L_min < L_max:
        raise UsageError("need 0 <= --thickness-min < --thickness-max", "thickness_max")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2", "steps")
    config = SpdcConfig.from_pump_signal(lp, ls, args.pol_p, args.pol_s, args.pol_i)
    absorbing = args.mode == "absorbing"
    sweep = thickness_sweep(config, table, L_min, L_max, args.steps, absorbing=absorbing)
    dk = phase_mismatch(config, table).value
    sidecar = sweep.write(args.out, args.sidecar)
    payload = sweep.sidecar()
    try:
        payload["coherence_length_nm"] = coherence_length(dk.real)
    except SpdcError:
        payload["coherence_length_nm"] = None
    payload.update(
        {
            "phase_mismatch_rad_per_nm": [dk.real, dk.imag],
            "lambda_nm": {"pump": lp, "signal": ls, "idler": config.lambda_i},
            "csv": str(args.out),
            "sidecar": str(sidecar),
        }
    )
    _emit(payload, [args.table] if args.table else [])


def cmd_simulate(args):
    model = SourceModel(
        pair_rate=_rate(args.pair_rate, "pair_rate"),
        eta1=args.eta1,
        eta2=args.eta2,
        dark1=_rate(args.dark1, "dark1"),
        dark2=_rate(args.dark2, "dark2"),
        jitter_sigma=parse_quantity(args.jitter, "time", "jitter"),
        dead_time=parse_time_ps(args.dead_time, "dead_time"),
        duration=parse_time_ps(args.duration, "duration"),
        seed=args.seed,
    )
    s1, s2, truth = simulate(model)
    out = Path(args.out)
    if out.suffix.lower() == ".csv":
        write_csv(out, [s1, s2], model.duration)
    else:
        write_pts(out, [s1, s2], model.duration)
    truth_path = Path(args.truth) if args.truth else out.parent / "ground_truth.json"
    write_ground_truth(truth_path, model, truth)
    expected = analytic_expectations(model, DEFAULT_WINDOW_PS)
    _emit(
        {
            "timestamps": str(out),
            "ground_truth_file": str(truth_path),
            "source_model": model.to_dict(),
            "ground_truth": truth.to_dict(),
            "analytic_expectations_1500ps": {
                "r1_hz": expected.r1, "r2_hz": expected.r2, "r_cc_hz": expected.r_cc,
                "accidental_rate_hz": expected.accidental_rate, "car": expected.car, "eta": expected.eta,
            },
            **rng_metadata(),
        }
    )


def _coincidences(args, s1, s2):
    return measure_coincidences(
        s1,
        s2,
        window=parse_time_ps(args.window, "window"),
        delay=parse_time_ps(args.delay, "delay"),
        accidental_offset=parse_time_ps(args.accidental_offset, "accidental_offset"),
        method=args.accidentals,
        chunk_span=parse_time_ps(args.chunk, "chunk") if args.chunk else None,
        threads=args.threads,
    )


def cmd_correlate(args):
    s1, s2 = _pick_streams(args.input, args.channels)
    result = _coincidences(args, s1, s2)
    payload = result.to_dict()
    payload.update({"channels": list(args.channels), "singles_1": len(s1), "singles_2": len(s2)})
    _emit(payload, [args.input])


def cmd_g2(args):
    s1, s2 = _pick_streams(args.input, args.channels)
    hist = g2_histogram(s1, s2, parse_time_ps(args.bin, "bin"), parse_time_ps(args.tau_max, "tau_max"))
    hist.to_csv(args.out)
    zero = hist.zero_bin()
    _emit(
        {
            "csv": str(args.out),
            "bin_width_ps": hist.bin_width,
            "tau_min_ps": hist.tau_min,
            "tau_max_ps": hist.tau_max,
            "total_counts": int(hist.counts.sum()),
            "normalization": hist.normalization,
            "g2_zero_bin": float(hist.g2[zero]) if hist.normalization > 0 else None,
            "zero_bin_counts": int(hist.counts[zero]),
        },
        [args.input],
    )


def cmd_metrics(args):
    if args.rates:
        r_cc, r1, r2 = (_rate(v, name) for v, name in zip(args.rates, ("r_cc", "r1", "r2")))
        eta = pair_efficiency(r_cc, r1, r2)
        report = {
            "singles_1_hz": r1,
            "singles_2_hz": r2,
            "singles_geomean_hz": math.sqrt(r1 * r2),
            "coincidence_rate_hz": r_cc,
            "pair_efficiency": eta,
            "pair_efficiency_pct": 100 * eta,
        }
        inputs = []
    else:
        if not args.input:
            raise UsageError("give --input TIMESTAMPS or --rates R_CC R1 R2", "input")
        s1, s2 = _pick_streams(args.input, args.channels)
        result = _coincidences(args, s1, s2)
        acc_err = None
        if result.method == "analytic":
            acc_err = result.accidentals * math.sqrt(1 / max(len(s1), 1) + 1 / max(len(s2), 1))
        m = pair_metrics(
            result.coincidences,
            result.accidentals,
            len(s1),
            len(s2),
            result.duration,
            result.window,
            dark1=_rate(args.dark1, "dark1"),
            dark2=_rate(args.dark2, "dark2"),
            accidentals_error=acc_err,
        )
        report = m.to_report()
        report.update({"coincidences": result.coincidences, "accidentals": result.accidentals,
                       "accidental_method": result.method})
        inputs = [args.input]
    if args.out:
        Path(args.out).write_text(json.dumps(_clean(report), indent=2) + "\n", encoding="utf-8")
    _emit(report, inputs)


def _read_points(path, name):
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(ln for ln in fh if ln.strip() and not ln.startswith("#"))]
    if not rows:
        raise DataFormatError(f"{path} is empty", name)
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError:
        raise DataFormatError(f"{path}: non-numeric row", name) from None
    if data.ndim != 2 or data.shape[1] not in (2, 3) or len(header) != data.shape[1]:
        raise DataFormatError(f"{path}: expected 2 or 3 columns with a header row", name)
    return header, data


def cmd_fit_power(args):
    header, pts = _read_points(args.input, "input")
    fit = fit_linear(pts)
    _emit({"columns": header, "n_points": len(pts), **fit.to_dict()}, [args.input])


def cmd_fit_polarization(args):
    header, pts = _read_points(args.input, "input")
    fit = fit_polarization(pts)
    _emit({"columns": header, "n_points": len(pts), **fit.to_dict()}, [args.input])


def cmd_optimal_waist(args):
    inputs = []
    if args.fiber:
        catalog = load_catalog(args.catalog)
        if args.catalog:
            inputs.append(args.catalog)
        if args.fiber not in catalog:
            raise UsageError(f"unknown fiber {args.fiber!r}; known: {sorted(catalog)}", "fiber")
        w_c = catalog[args.fiber].mode_waist
    elif args.collection_waist:
        w_c = parse_length_um(args.collection_waist, "collection_waist")
    else:
        raise UsageError("give --collection-waist or --fiber", "collection_waist")
    w_p = optimal_pump_waist(w_c)
    payload = {
        "collection_waist_um": w_c,
        "optimal_pump_waist_um": w_p,
        "emission_waist_um": emission_waist(w_p),
        "overlap_at_optimum": gaussian_overlap(emission_waist(w_p), w_c),
    }
    if args.pump_waist:
        given = parse_length_um(args.pump_waist, "pump_waist")
        payload["pump_waist_um"] = given
        payload["overlap_for_pump_waist"] = gaussian_overlap(emission_waist(given), w_c)
    _emit(payload, inputs)


# ---------------------------------------------------------------- parser


def _add_coincidence_flags(p):
    p.add_argument("--channels", type=int, nargs=2, default=[0, 1], metavar=("CH1", "CH2"))
    p.add_argument("--window", default=f"{DEFAULT_WINDOW_PS}ps", help="coincidence window (default 1.5ns)")
    p.add_argument("--delay", default="0ps", help="expected ch2 - ch1 delay")
    p.add_argument("--accidentals", choices=("shifted", "analytic"), default="shifted")
    p.add_argument("--accidental-offset", default=f"{DEFAULT_ACCIDENTAL_OFFSET_PS}ps",
                   help="shift for the accidental window (default 100ns)")
    p.add_argument("--chunk", default=None, help="process in time chunks of this span (e.g. 1s)")
    p.add_argument("--threads", type=int, default=None)


def build_parser():
    parser = _Parser(prog="spdckit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="pair rate versus crystal thickness")
    p.add_argument("--table", help="dispersion CSV (default: bundled synthetic table)")
    p.add_argument("--lambda-p", default="405nm")
    p.add_argument("--lambda-s", default="810nm")
    for name in ("p", "s", "i"):
        p.add_argument(f"--pol-{name}", default="y", choices=("x", "y", "z"))
    p.add_argument("--thickness-min", default="0nm")
    p.add_argument("--thickness-max", default="2000nm")
    p.add_argument("--steps", type=int, default=2001)
    p.add_argument("--mode", choices=("absorbing", "transparent"), default="absorbing")
    p.add_argument("--out", required=True, help="sweep CSV path")
    p.add_argument("--sidecar", help="JSON sidecar path (default: CSV path with .json)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo timestamp streams")
    p.add_argument("--pair-rate", required=True)
    p.add_argument("--eta1", type=float, required=True)
    p.add_argument("--eta2", type=float, required=True)
    p.add_argument("--dark1", default="0Hz")
    p.add_argument("--dark2", default="0Hz")
    p.add_argument("--jitter", default=f"{DEFAULT_JITTER_SIGMA_PS:g}ps")
    p.add_argument("--dead-time", default=f"{DEFAULT_DEAD_TIME_PS}ps")
    p.add_argument("--duration", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help=".pts (or .csv) output")
    p.add_argument("--truth", help="ground-truth JSON (default: ground_truth.json next to --out)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("correlate", help="coincidences and accidentals")
    p.add_argument("--input", required=True)
    _add_coincidence_flags(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("g2", help="arrival-time difference histogram")
    p.add_argument("--input", required=True)
    p.add_argument("--channels", type=int, nargs=2, default=[0, 1], metavar=("CH1", "CH2"))
    p.add_argument("--bin", default=f"{DEFAULT_BIN_PS}ps")
    p.add_argument("--tau-max", default="30ns")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_g2)

    p = sub.add_parser("metrics", help="CAR, pair collection efficiency and rates")
    p.add_argument("--input")
    p.add_argument("--rates", nargs=3, metavar=("R_CC", "R1", "R2"), help="rates with units, e.g. 0.17Hz 82.5Hz 82.5Hz")
    p.add_argument("--dark1", default="0Hz")
    p.add_argument("--dark2", default="0Hz")
    p.add_argument("--out", help="write the metrics report JSON here")
    _add_coincidence_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("fit-power", help="weighted linear fit of rate versus pump power")
    p.add_argument("--input", required=True, help="CSV: x,y[,y_err] with a header row")
    p.set_defaults(func=cmd_fit_power)

    p = sub.add_parser("fit-polarization", help="cos^2 fit of a pump-polarization scan")
    p.add_argument("--input", required=True, help="CSV: theta_deg,rate[,rate_err] with a header row")
    p.set_defaults(func=cmd_fit_polarization)

    p = sub.add_parser("optimal-waist", help="pump waist matched to a collection mode")
    p.add_argument("--collection-waist")
    p.add_argument("--fiber", help="fiber name from the catalog")
    p.add_argument("--catalog", help="fiber catalog JSON (default: bundled)")
    p.add_argument("--pump-waist", help="also report the overlap for this pump waist")
    p.set_defaults(func=cmd_optimal_waist)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except SpdcError as exc:
        print(json.dumps({"status": "error", **exc.to_dict(), "tool_version": __version__}))
        return exc.exit_code
    except OSError as exc:
        print(json.dumps({"status": "error", "code": "io_error", "message": str(exc),
                          "offending_parameter": getattr(exc, "filename", None), "tool_version": __version__}))
        return 3
    except ValueError as exc:
        print(json.dumps({"status": "error", "code": "invalid_value", "message": str(exc),
                          "offending_parameter": None, "tool_version": __version__}))
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
