"""Experiment orchestration: parallel-gate sweeps over distance and noise.

Each sweep cell fixes (gate, separation multiple k, noise amplitude alpha),
runs `n_realizations` independently seeded noise realizations of the
calibrated schedules executed simultaneously on all active qubits, and
reports the noise-averaged entanglement fidelity against the ideal parallel
gate.  Cell RNG streams derive from (master_seed, gate, k, alpha,
realization, site) only, so results do not depend on execution order or
worker count.
"""

from __future__ import annotations

import json
import time
import zlib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__ as _VERSION
from .calibration import (
    calibrate_hold,
    calibrate_rx_drive,
    calibrate_sqrt_iswap,
)
from .coupling import ArrayGeometry, QubitArray
from .device import DeviceParams
from .fidelity import FidelityResult, averaged_infidelity, ideal_gate, kron
from .noise import DEFAULT_F_MAX, DEFAULT_F_MIN, DEFAULT_N_COMPONENTS, NoiseSpec, generate_trace
from .propagation import PropagationSettings, evolve
from .pulses import program_for, rx_schedule, rz_schedule

__all__ = [
    "SweepConfig",
    "SweepResultRow",
    "run_parallel_single_qubit",
    "run_parallel_two_qubit",
    "run_noninteracting_baseline",
    "emit",
]

RESULT_HEADER = ("gate,k,alpha,mean_fidelity,std_error,mean_leakage,"
                 "n_realizations,wall_time_s")


@dataclass(frozen=True)
class SweepConfig:
    gate: str = "rz"                                  # rz | rx | sqrt_iswap
    r_multiples: tuple[int, ...] = (1, 2, 3, 4)
    alphas: tuple[float, ...] = (1.0, 10.0, 50.0, 100.0)
    n_realizations: int = 200
    master_seed: int = 20240
    f_min: float = DEFAULT_F_MIN
    f_max: float = DEFAULT_F_MAX
    n_components: int = DEFAULT_N_COMPONENTS
    dt: float = 1.0
    convergence_tol: float = 1e-5
    common_mode_noise: bool = False   # default: independent gate electrodes
    device: DeviceParams = field(default_factory=DeviceParams)
    processes: int | None = None

    def __post_init__(self):
        if any(k < 1 or k != int(k) for k in self.r_multiples):
            raise ValueError("r_multiples must be positive integers")
        if any(a < 0 for a in self.alphas):
            raise ValueError("alphas must be >= 0")

    def settings(self) -> PropagationSettings:
        return PropagationSettings(dt=self.dt,
                                   convergence_tol=self.convergence_tol)

    def noise_spec(self, gate: str, k: int, alpha: float, site: int) -> NoiseSpec:
        if self.common_mode_noise:
            site = 0
        seed = derive_seed(self.master_seed, gate, k, alpha, site)
        return NoiseSpec(alpha=alpha, f_min=self.f_min, f_max=self.f_max,
                         n_components=self.n_components, master_seed=seed)


@dataclass
class SweepResultRow:
    gate: str
    k: int                       # separation in units of r0; 0 marks baseline
    alpha: float
    mean_fidelity: float
    std_error: float
    mean_leakage: float
    n_realizations: int
    wall_time_s: float

    @classmethod
    def failed(cls, gate, k, alpha, wall_time):
        return cls(gate, k, alpha, float("nan"), float("nan"), float("nan"),
                   0, wall_time)


def derive_seed(master: int, gate: str, k: int, alpha: float, site: int) -> int:
    alpha_bits = int(np.float64(alpha).view(np.uint64))
    entropy = (int(master), zlib.crc32(gate.encode()), int(k), alpha_bits,
               int(site))
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


# ----------------------------------------------------------------------
# Experiments (picklable cells consumed by averaged_infidelity)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ParallelGateExperiment:
    """All active sites of one coupled system run on a shared clock."""

    system: QubitArray
    programs: tuple
    target: np.ndarray
    noise_specs: tuple
    settings: PropagationSettings
    alpha: float
    trace_dt: float = 1.0

    def _traces(self, index: int):
        if self.alpha == 0.0:
            return None
        duration = self.programs[0].total_duration + self.trace_dt
        return [generate_trace(spec, duration, self.trace_dt, index)
                for spec in self.noise_specs]

    def simulate_realization(self, index: int, verify: bool = False):
        return evolve(self.system, list(self.programs), self.settings,
                      traces=self._traces(index), target=self.target,
                      verify=verify)

    def validated(self) -> "ParallelGateExperiment":
        """Run the step-halving check once and pin the accepted scale."""
        sp = self.simulate_realization(0, verify=True)
        settings = replace(self.settings, base_scale=sp.dt_scale)
        return replace(self, settings=settings)


@dataclass(frozen=True)
class FactorizedExperiment:
    """Independent (non-interacting) units; the propagators tensor."""

    units: tuple                       # QubitArray per unit
    unit_programs: tuple               # tuple of programs per unit
    target: np.ndarray
    noise_specs: tuple                 # flattened, one per site over all units
    settings: PropagationSettings
    alpha: float
    trace_dt: float = 1.0

    def simulate_realization(self, index: int, verify: bool = False):
        mats, leaks = [], []
        site = 0
        for unit, programs in zip(self.units, self.unit_programs):
            traces = None
            if self.alpha > 0.0:
                duration = programs[0].total_duration + self.trace_dt
                traces = [generate_trace(self.noise_specs[site + s], duration,
                                         self.trace_dt, index)
                          for s in range(len(programs))]
            sp = evolve(unit, list(programs), self.settings, traces=traces,
                        verify=verify)
            mats.append(sp.matrix)
            site += len(programs)
        m = kron(*mats)
        leak = 1.0 - np.sum(np.abs(m) ** 2, axis=0)
        return _Projected(m, leak)

    def validated(self) -> "FactorizedExperiment":
        self.simulate_realization(0, verify=True)
        return self


@dataclass(frozen=True)
class _Projected:
    matrix: np.ndarray
    leakage: np.ndarray


# ----------------------------------------------------------------------
# Calibrated schedules (one calibration per gate and device)
# ----------------------------------------------------------------------

def calibrated_single_qubit_schedule(gate: str, device: DeviceParams,
                                     settings: PropagationSettings):
    if gate == "rz":
        hold = calibrate_hold("rz", -np.pi / 2, device, settings)
        sched = rz_schedule(hold=hold)
        info = {"hold_ns": hold}
    elif gate == "rx":
        cal = calibrate_rx_drive(device, settings)
        sched = rx_schedule(device, hold=cal.hold, peak=180.0 * cal.peak_scale,
                            drive_frequency=cal.drive_frequency)
        info = {"hold_ns": cal.hold, "peak_scale": cal.peak_scale,
                "drive_frequency_ghz": cal.drive_frequency,
                "noiseless_fidelity": cal.fidelity}
    else:
        raise ValueError(f"unknown single-qubit gate {gate!r}")
    return sched, info


def _run_cell(experiment, cfg: SweepConfig, gate: str, k: int,
              alpha: float) -> SweepResultRow:
    t0 = time.perf_counter()
    try:
        experiment = experiment.validated()
        res: FidelityResult = averaged_infidelity(
            experiment, cfg.n_realizations, processes=cfg.processes)
    except Exception:
        return SweepResultRow.failed(gate, k, alpha,
                                     time.perf_counter() - t0)
    return SweepResultRow(gate, k, alpha, res.mean_fidelity, res.std_error,
                          res.mean_leakage, res.n_realizations,
                          time.perf_counter() - t0)


def run_parallel_single_qubit(gate: str, cfg: SweepConfig):
    """Two qubits at r = k r0 executing identical calibrated gates."""
    if gate not in ("rz", "rx"):
        raise ValueError("gate must be 'rz' or 'rx'")
    settings = cfg.settings()
    device = cfg.device
    sched, cal_info = calibrated_single_qubit_schedule(gate, device, settings)
    device = device.with_vt(sched.vt)
    target = ideal_gate(f"{gate}_m_half_pi", 2)

    rows = []
    for k in cfg.r_multiples:
        system = QubitArray.pair(device, k * device.r0)
        for alpha in cfg.alphas:
            specs = tuple(cfg.noise_spec(gate, k, alpha, s) for s in range(2))
            exp = ParallelGateExperiment(
                system=system,
                programs=(program_for(sched), program_for(sched)),
                target=target, noise_specs=specs, settings=settings,
                alpha=alpha)
            rows.append(_run_cell(exp, cfg, gate, k, alpha))
    return rows, cal_info


def run_noninteracting_baseline(gate: str, cfg: SweepConfig):
    """Same experiment with the inter-unit dipole coupling removed.

    Baseline rows carry k = 0; they do not depend on the separation.
    """
    settings = cfg.settings()
    device = cfg.device
    if gate in ("rz", "rx"):
        sched, cal_info = calibrated_single_qubit_schedule(gate, device,
                                                           settings)
        device = device.with_vt(sched.vt)
        units = (QubitArray.single(device), QubitArray.single(device))
        unit_programs = ((program_for(sched),), (program_for(sched),))
        target = ideal_gate(f"{gate}_m_half_pi", 2)
    elif gate == "sqrt_iswap":
        cal = calibrate_sqrt_iswap(device, settings)
        cal_info = {"corrective_hold_ns": cal.corrective_hold,
                    "corrective_angle_rad": cal.corrective_angle,
                    "noiseless_fidelity": cal.fidelity}
        device = device.with_vt(cal.sequence.joint.vt)
        couple = QubitArray.pair(device, device.r0)
        progs = cal.sequence.site_programs()
        units = (couple, couple)
        unit_programs = (progs, progs)
        target = ideal_gate("sqrt_iswap", 2)
    else:
        raise ValueError(f"unknown gate {gate!r}")

    rows = []
    for alpha in cfg.alphas:
        n_sites = sum(len(pr) for pr in unit_programs)
        specs = tuple(cfg.noise_spec(gate + "_baseline", 0, alpha, s)
                      for s in range(n_sites))
        exp = FactorizedExperiment(units=units, unit_programs=unit_programs,
                                   target=target, noise_specs=specs,
                                   settings=settings, alpha=alpha)
        rows.append(_run_cell(exp, cfg, gate, 0, alpha))
    return rows, cal_info


def run_parallel_two_qubit(cfg: SweepConfig):
    """Two couples at internal pitch r0, separated by r = k r0.

    Both couples run the entangling sequence simultaneously; the corrective
    steps of corresponding couple members are also simultaneous.
    """
    settings = cfg.settings()
    device = cfg.device
    cal = calibrate_sqrt_iswap(device, settings)
    cal_info = {"corrective_hold_ns": cal.corrective_hold,
                "corrective_angle_rad": cal.corrective_angle,
                "noiseless_fidelity": cal.fidelity}
    device = device.with_vt(cal.sequence.joint.vt)
    first, second = cal.sequence.site_programs()
    target = ideal_gate("sqrt_iswap", 2)

    rows = []
    for k in cfg.r_multiples:
        geometry = ArrayGeometry.couples(device, k)
        system = QubitArray.two_couples(device, geometry)
        for alpha in cfg.alphas:
            specs = tuple(cfg.noise_spec("sqrt_iswap", k, alpha, s)
                          for s in range(4))
            exp = ParallelGateExperiment(
                system=system, programs=(first, second, first, second),
                target=target, noise_specs=specs, settings=settings,
                alpha=alpha)
            rows.append(_run_cell(exp, cfg, "sqrt_iswap", k, alpha))
    return rows, cal_info


# ----------------------------------------------------------------------
# Persistence
# ----------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit(results, path, config: SweepConfig | None = None,
         extra_manifest: dict | None = None) -> tuple[Path, Path]:
    """Write the results table and a run manifest.

    The table is deterministic for a fixed config and seed except for the
    wall_time_s column; failed cells carry nan fields.
    """
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "results.csv"
    lines = [RESULT_HEADER]
    for r in results:
        lines.append(",".join(_fmt(v) for v in (
            r.gate, r.k, r.alpha, r.mean_fidelity, r.std_error,
            r.mean_leakage, r.n_realizations, r.wall_time_s)))
    table.write_text("\n".join(lines) + "\n", encoding="utf-8")

    manifest = {
        "version": _VERSION,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "rows": len(results),
    }
    if config is not None:
        cfg_dict = asdict(config)
        cfg_dict["device"] = asdict(config.device)
        manifest["config"] = cfg_dict
        manifest["master_seed"] = config.master_seed
    if extra_manifest:
        manifest.update(extra_manifest)
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True,
                                        default=str) + "\n", encoding="utf-8")
    return table, manifest_path
