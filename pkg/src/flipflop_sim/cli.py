"""Command-line front end for the sweep harness.

Subcommands map one-to-one onto the harness entry points; every run writes
the results table and a manifest sufficient to reproduce it.  Configuration
comes from an optional JSON file whose keys mirror SweepConfig, overridden
by the command-line flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from .calibration import calibrate_hold, calibrate_rx_drive, calibrate_sqrt_iswap
from .device import DeviceParams
from .noise import NoiseSpec, generate_trace
from .sweep import (
    SweepConfig,
    emit,
    run_noninteracting_baseline,
    run_parallel_single_qubit,
    run_parallel_two_qubit,
)


def _load_config(path: str | None, args) -> SweepConfig:
    data = {}
    if path:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    device = DeviceParams(**data.pop("device", {}))
    cfg = SweepConfig(device=device, **{
        k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.realizations is not None:
        overrides["n_realizations"] = args.realizations
    if args.dt is not None:
        overrides["dt"] = args.dt
    if getattr(args, "alphas", None):
        overrides["alphas"] = tuple(args.alphas)
    if getattr(args, "r_multiples", None):
        overrides["r_multiples"] = tuple(args.r_multiples)
    return dataclasses.replace(cfg, **overrides)


def _common_flags(sub):
    sub.add_argument("--config", help="JSON config file (SweepConfig fields)")
    sub.add_argument("--out", default="results", help="output directory")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--realizations", type=int,
                     help="noise realizations per cell")
    sub.add_argument("--dt", type=float, help="step-size cap in ns")
    sub.add_argument("--alphas", type=float, nargs="+",
                     help="noise amplitudes in V/m")
    sub.add_argument("--r-multiples", type=int, nargs="+", dest="r_multiples",
                     help="separations in units of r0")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flipflop-sim",
        description="Parallel-gate infidelity sweeps for flip-flop qubit arrays")
    subs = parser.add_subparsers(dest="command", required=True)

    p1 = subs.add_parser("run-parallel-1q",
                         help="two qubits running identical one-qubit gates")
    p1.add_argument("--gate", choices=("rz", "rx"), required=True)
    _common_flags(p1)

    p2 = subs.add_parser("run-parallel-2q",
                         help="two couples running entangling gates")
    _common_flags(p2)

    pb = subs.add_parser("baseline",
                         help="same experiment with the coupling removed")
    pb.add_argument("--gate", choices=("rz", "rx", "sqrt_iswap"),
                    required=True)
    _common_flags(pb)

    pc = subs.add_parser("calibrate",
                         help="print calibrated holds and drive settings")
    pc.add_argument("--gate", choices=("rz", "rx", "sqrt_iswap", "all"),
                    default="all")
    _common_flags(pc)

    pn = subs.add_parser("noise-verify",
                         help="check the synthesized 1/f spectral density")
    pn.add_argument("--alpha", type=float, default=10.0)
    pn.add_argument("--realizations", type=int, default=400)
    pn.add_argument("--seed", type=int, default=0)
    pn.add_argument("--config", help="JSON config file")
    pn.add_argument("--out", default=None)
    pn.add_argument("--dt", type=float, default=None)

    args = parser.parse_args(argv)

    if args.command == "noise-verify":
        return _noise_verify(args)

    cfg = _load_config(args.config, args)

    if args.command == "calibrate":
        return _calibrate(args, cfg)

    t0 = time.perf_counter()
    if args.command == "run-parallel-1q":
        rows, cal = run_parallel_single_qubit(args.gate, cfg)
        label = f"parallel-1q-{args.gate}"
    elif args.command == "run-parallel-2q":
        rows, cal = run_parallel_two_qubit(cfg)
        label = "parallel-2q-sqrt-iswap"
    else:
        rows, cal = run_noninteracting_baseline(args.gate, cfg)
        label = f"baseline-{args.gate}"

    table, manifest = emit(rows, args.out, cfg, {
        "experiment": label,
        "calibration": cal,
        "wall_time_s": time.perf_counter() - t0,
    })
    print(f"wrote {table} and {manifest}")
    for r in rows:
        print(f"  {r.gate} k={r.k} alpha={r.alpha}: "
              f"F={r.mean_fidelity:.5f} +- {r.std_error:.5f}")
    return 0


def _calibrate(args, cfg: SweepConfig) -> int:
    settings = cfg.settings()
    gates = [args.gate] if args.gate != "all" else ["rz", "rx", "sqrt_iswap"]
    out = {}
    if "rz" in gates:
        hold = calibrate_hold("rz", -np.pi / 2, cfg.device, settings)
        out["rz"] = {"hold_ns": hold}
    if "rx" in gates:
        cal = calibrate_rx_drive(cfg.device, settings)
        out["rx"] = {"hold_ns": cal.hold, "peak_scale": cal.peak_scale,
                     "drive_frequency_ghz": cal.drive_frequency,
                     "noiseless_fidelity": cal.fidelity}
    if "sqrt_iswap" in gates:
        cal = calibrate_sqrt_iswap(cfg.device, settings)
        out["sqrt_iswap"] = {"corrective_hold_ns": cal.corrective_hold,
                             "corrective_angle_rad": cal.corrective_angle,
                             "noiseless_fidelity": cal.fidelity}
    print(json.dumps(out, indent=2))
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / "calibration.json").write_text(json.dumps(out, indent=2),
                                               encoding="utf-8")
    return 0


def _noise_verify(args) -> int:
    """Ensemble periodogram of the synthesized traces; reports the
    log-log slope over the interior of the band (target -1)."""
    spec = NoiseSpec(alpha=args.alpha, f_min=1e-3, f_max=0.4,
                     n_components=64, master_seed=args.seed)
    n, dt = 8192, 1.0
    freqs = np.fft.rfftfreq(n, dt)
    psd = np.zeros(len(freqs))
    for r in range(args.realizations):
        tr = generate_trace(spec, (n - 1) * dt, dt, r)
        psd += np.abs(np.fft.rfft(tr.samples[:n])) ** 2
    psd *= 2.0 * dt / (n * args.realizations)
    lo, hi = 3e-3, 0.15
    edges = np.geomspace(lo, hi, 14)
    centers, means = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (freqs >= a) & (freqs < b)
        if np.any(sel):
            centers.append(np.sqrt(a * b))
            means.append(psd[sel].mean())
    slope = float(np.polyfit(np.log(centers), np.log(means), 1)[0])
    ok = abs(slope + 1.0) < 0.1
    print(f"ensemble PSD log-log slope: {slope:+.4f} (target -1.0 +- 0.1): "
          f"{'OK' if ok else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
