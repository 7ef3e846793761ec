"""Run a reduced parallel-gate sweep and read back the results table.

The production grids (k in 1..4, alpha in {1, 10, 50, 100} V/m, 200
realizations) live in the acceptance suite and the CLI; this demo keeps a
small grid so it finishes in about a minute.
"""

from pathlib import Path

from flipflop_sim import SweepConfig, emit, run_noninteracting_baseline, run_parallel_single_qubit

cfg = SweepConfig(gate="rz", r_multiples=(1, 2), alphas=(10.0, 100.0),
                  n_realizations=24, master_seed=99)

rows, calibration = run_parallel_single_qubit("rz", cfg)
print("parallel Rz x Rz, two active qubits:")
for r in rows:
    print(f"  k={r.k} alpha={r.alpha:>5}: F = {r.mean_fidelity:.5f} "
          f"+- {r.std_error:.5f}   leak = {r.mean_leakage:.1e}   "
          f"({r.wall_time_s:.1f} s)")

base, _ = run_noninteracting_baseline("rz", cfg)
print("non-interacting baseline (squares in the distance plots):")
for r in base:
    print(f"  alpha={r.alpha:>5}: F = {r.mean_fidelity:.5f} "
          f"+- {r.std_error:.5f}")

out = Path("demo_results")
table, manifest = emit(rows + base, out, cfg, {"calibration": calibration})
print(f"\nresults table -> {table}")
print(f"run manifest  -> {manifest}")
print("\ntable head:")
print("\n".join(table.read_text().splitlines()[:4]))
