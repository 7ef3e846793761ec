"""Inspect the published control schedules and the 1/f noise synthesis."""

import numpy as np

from flipflop_sim import (
    DeviceParams,
    NoiseSpec,
    apply_noise,
    estimate_adiabaticity,
    generate_trace,
    rx_schedule,
    rz_schedule,
    sqrt_iswap_schedule,
)

dev = DeviceParams()

# ---------------------------------------------------------------------
# Gate schedules straight from the control tables
# ---------------------------------------------------------------------
rz = rz_schedule()
rx = rx_schedule(dev)
seq = sqrt_iswap_schedule()
print("schedule durations:")
print(f"  Rz(-pi/2):        {rz.total_duration:7.2f} ns  (Vt = {rz.vt} GHz)")
print(f"  Rx(-pi/2):        {rx.total_duration:7.2f} ns  (Vt = {rx.vt} GHz, "
      f"drive {rx.drive.peak} V/m for {rx.drive.t_on} ns)")
print(f"  sqrt-iSWAP:       {seq.total_duration:7.2f} ns  "
      f"(joint {seq.joint.total_duration} + 2 corrective "
      f"{seq.corrective.total_duration})")

print("\nsweep adiabaticity estimates (gap over basis-rotation rate):")
print(f"  Rz sweep: K = {estimate_adiabaticity(rz, dev):6.1f}")
print(f"  Rx sweep: K = {estimate_adiabaticity(rx, dev):6.1f}")
print(f"  joint sweep: K = {estimate_adiabaticity(seq.joint, dev):6.1f}")

print("\nsampling the Rz waveform:")
for t in (0.0, 1.0, 18.04, 35.0, 40.0):
    dez, eac = rz.sample(t)
    print(f"  t = {t:6.2f} ns: dEz = {float(dez):8.1f} V/m")

print("\nserialized form (first lines):")
print("\n".join(rz.to_text().splitlines()[:8]) + "\n  ...")

# ---------------------------------------------------------------------
# 1/f noise realizations
# ---------------------------------------------------------------------
spec = NoiseSpec(alpha=100.0, master_seed=42)
tr = generate_trace(spec, duration=500.0, dt=1.0, realization=0)
print(f"\nnoise trace (alpha = {spec.alpha} V/m, band "
      f"[{spec.f_min * 1e3:.2f} MHz, {spec.f_max:.2f} GHz]):")
print(f"  rms = {np.std(tr.samples):.1f} V/m over 500 ns")
print(f"  first samples: {np.round(tr.samples[:5], 1)}")

noisy = apply_noise(rz, tr)
t = np.array([18.04])
print(f"  hold field with noise at mid-gate: "
      f"{noisy.sample(t)[0][0]:.1f} V/m (clean: 290.0)")
