"""Control waveforms: DC sweeps, the AC drive and the published gate tables.

A :class:`GateSchedule` is an ordered list of DC segments (the vertical
control field in V/m) plus an optional resonant AC drive.  Every schedule
starts and ends at the idling field where the electron is held at the
interface.  Gate-specific tunnel couplings ride along on the schedule.

The numbers in :func:`rz_schedule`, :func:`rx_schedule` and
:func:`sqrt_iswap_schedule` are the published single-gate control tables;
hold durations and the drive amplitude are exposed as parameters so the
calibration routines can retune them for this simulator's integration of
the same model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .device import DeviceParams, orbital_splitting, transition_frequency

IDLE_FIELD = 10000.0      # V/m, electron confined at the interface
INTERMEDIATE_FIELD = 1300.0

RZ_VT = 11.29             # GHz, per-gate tunnel couplings
RX_VT = 11.5
SQRT_ISWAP_VT = 11.58

RZ_CLOCK_FIELD = 290.0    # V/m
RX_CLOCK_FIELD = 0.0
SQRT_ISWAP_CLOCK_FIELD = 0.0


@dataclass(frozen=True)
class DCSegment:
    kind: str                 # 'ramp' or 'hold'
    start_value: float        # V/m
    end_value: float          # V/m
    duration: float           # ns
    shape: str = "linear"     # 'linear' or 'cosine'

    def __post_init__(self):
        if self.kind not in ("ramp", "hold"):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.shape not in ("linear", "cosine"):
            raise ValueError(f"unknown ramp shape {self.shape!r}")
        if self.duration < 0:
            raise ValueError("segment duration must be >= 0")
        if self.kind == "hold" and self.start_value != self.end_value:
            raise ValueError("hold segments must keep a constant value")

    def value(self, s):
        """Field at fractional position s in [0, 1] (vectorized)."""
        s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        if self.kind == "hold":
            return np.broadcast_to(np.float64(self.start_value), s.shape).copy()
        if self.shape == "linear":
            w = s
        else:
            w = 0.5 * (1.0 - np.cos(np.pi * s))
        return self.start_value + (self.end_value - self.start_value) * w


@dataclass(frozen=True)
class ACDrive:
    peak: float               # V/m, max of the envelope
    t_start: float            # ns from schedule start
    t_on: float               # ns the envelope is non-zero
    frequency: float          # GHz, resonant with the qubit at the clock point
    phase: float = 0.0        # rad
    envelope: str = "triangular"

    def __post_init__(self):
        if self.envelope != "triangular":
            raise ValueError("only the triangular envelope is implemented")
        if self.t_on <= 0:
            raise ValueError("t_on must be positive")

    def envelope_value(self, t):
        """Envelope amplitude at schedule time t (vectorized)."""
        t = np.asarray(t, dtype=float)
        s = (t - self.t_start) / self.t_on
        tri = self.peak * (1.0 - np.abs(2.0 * s - 1.0))
        return np.where((s >= 0.0) & (s <= 1.0), np.maximum(tri, 0.0), 0.0)

    def instantaneous(self, t):
        """Envelope times carrier at schedule time t (vectorized)."""
        t = np.asarray(t, dtype=float)
        return self.envelope_value(t) * np.cos(
            2.0 * np.pi * self.frequency * t + self.phase)


@dataclass(frozen=True)
class GateSchedule:
    segments: tuple[DCSegment, ...]
    vt: float
    label: str
    drive: ACDrive | None = None

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a schedule needs at least one segment")

    @property
    def total_duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    @property
    def idle_value(self) -> float:
        return self.segments[0].start_value

    def segment_edges(self) -> np.ndarray:
        """Cumulative segment boundary times, starting at 0."""
        return np.concatenate(
            [[0.0], np.cumsum([seg.duration for seg in self.segments])])

    def dc_value(self, t):
        """DC control field at time t; idle value outside the schedule."""
        t = np.asarray(t, dtype=float)
        edges = self.segment_edges()
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0,
                      len(self.segments) - 1)
        out = np.empty(t.shape, dtype=float)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if not np.any(m):
                continue
            width = seg.duration if seg.duration > 0 else 1.0
            out[m] = seg.value((t[m] - edges[i]) / width)
        outside = (t < 0.0) | (t > edges[-1])
        out[outside] = self.idle_value
        return out

    def eac_value(self, t):
        """Instantaneous AC field at time t (0 when no drive / outside)."""
        t = np.asarray(t, dtype=float)
        if self.drive is None:
            return np.zeros(t.shape)
        inside = (t >= 0.0) & (t <= self.total_duration)
        return np.where(inside, self.drive.instantaneous(t), 0.0)

    def sample(self, t):
        """(dEz, eac_instantaneous) at time t, vectorized over t."""
        return self.dc_value(t), self.eac_value(t)

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "vt_ghz": self.vt,
            "segments": [
                {"kind": s.kind, "start": s.start_value, "end": s.end_value,
                 "duration_ns": s.duration, "shape": s.shape}
                for s in self.segments
            ],
        }
        if self.drive is not None:
            d["drive"] = {
                "peak": self.drive.peak, "t_start": self.drive.t_start,
                "t_on": self.drive.t_on, "frequency_ghz": self.drive.frequency,
                "phase": self.drive.phase, "envelope": self.drive.envelope,
            }
        return d

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _mirrored(vt: str | float, label: str, levels: list[float],
              ramp_times: list[float], hold: float, drive: ACDrive | None = None,
              shape: str = "linear") -> GateSchedule:
    """Symmetric down-up sweep: levels[0] -> ... -> levels[-1], hold, mirror."""
    down = [
        DCSegment("ramp", levels[i], levels[i + 1], ramp_times[i], shape)
        for i in range(len(ramp_times))
    ]
    mid = [DCSegment("hold", levels[-1], levels[-1], hold)]
    up = [
        DCSegment("ramp", levels[i + 1], levels[i], ramp_times[i], shape)
        for i in reversed(range(len(ramp_times)))
    ]
    return GateSchedule(tuple(down + mid + up), float(vt), label, drive)


def rz_schedule(angle: float = -np.pi / 2, *, hold: float = 0.08,
                shape: str = "linear") -> GateSchedule:
    """Phase gate sweep; table values give a -pi/2 rotation.

    Other angles are obtained by recalibrating `hold` (see
    :func:`flipflop_sim.calibration.calibrate_hold`).
    """
    if not math.isclose(angle, -np.pi / 2):
        raise ValueError("table parameters encode a -pi/2 rotation; "
                         "use calibrate_hold for other angles")
    return _mirrored(RZ_VT, "rz_m_half_pi",
                     [IDLE_FIELD, INTERMEDIATE_FIELD, RZ_CLOCK_FIELD],
                     [2.0, 16.0], hold, shape=shape)


def rx_schedule(p: DeviceParams, angle: float = -np.pi / 2, *,
                hold: float = 90.5, peak: float = 180.0,
                drive_frequency: float | None = None,
                shape: str = "linear") -> GateSchedule:
    """Driven rotation; resonant AC drive rides on the DC sweep.

    The carrier frequency is the qubit splitting at the clock field,
    evaluated once from the device model unless given explicitly.
    """
    if not math.isclose(angle, -np.pi / 2):
        raise ValueError("table parameters encode a -pi/2 rotation")
    if drive_frequency is None:
        drive_frequency = transition_frequency(p.with_vt(RX_VT), RX_CLOCK_FIELD)
    drive = ACDrive(peak=peak, t_start=25.0, t_on=40.0,
                    frequency=drive_frequency, phase=0.0)
    return _mirrored(RX_VT, "rx_m_half_pi",
                     [IDLE_FIELD, INTERMEDIATE_FIELD, RX_CLOCK_FIELD],
                     [2.0, 4.0], hold, drive=drive, shape=shape)


@dataclass(frozen=True)
class SqrtIswapSequence:
    """Joint two-qubit pulse followed by one corrective phase gate per qubit.

    During each corrective step the partner qubit is parked at the idling
    field (its dipole stays energized, the detuning switches the exchange
    off); the corrective steps of parallel couples run simultaneously.
    """

    joint: GateSchedule
    corrective: GateSchedule

    @property
    def total_duration(self) -> float:
        return self.joint.total_duration + 2.0 * self.corrective.total_duration

    def site_programs(self) -> tuple["SiteProgram", "SiteProgram"]:
        idle = idle_schedule(self.corrective.total_duration, vt=self.joint.vt)
        first = SiteProgram((self.joint, self.corrective, idle))
        second = SiteProgram((self.joint, idle, self.corrective))
        return first, second


def sqrt_iswap_schedule(*, joint_hold: float = 2.0,
                        corrective_hold: float = 4.5,
                        shape: str = "linear") -> SqrtIswapSequence:
    """Entangling sequence for a qubit couple at the reference pitch."""
    joint = _mirrored(SQRT_ISWAP_VT, "sqrt_iswap_joint",
                      [IDLE_FIELD, INTERMEDIATE_FIELD, SQRT_ISWAP_CLOCK_FIELD],
                      [1.3, 195.0], joint_hold, shape=shape)
    corrective = _mirrored(SQRT_ISWAP_VT, "sqrt_iswap_corrective",
                           [IDLE_FIELD, INTERMEDIATE_FIELD,
                            SQRT_ISWAP_CLOCK_FIELD],
                           [2.0, 4.0], corrective_hold, shape=shape)
    return SqrtIswapSequence(joint, corrective)


def idle_schedule(duration: float, *, vt: float,
                  level: float = IDLE_FIELD) -> GateSchedule:
    """Park a qubit at the idling field for a fixed time."""
    return GateSchedule(
        (DCSegment("hold", level, level, duration),), vt, "idle")


@dataclass(frozen=True)
class SiteProgram:
    """Back-to-back schedules executed by one site on a shared clock."""

    schedules: tuple[GateSchedule, ...]

    @property
    def total_duration(self) -> float:
        return float(sum(s.total_duration for s in self.schedules))

    @property
    def vt(self) -> float:
        return self.schedules[0].vt

    def _offsets(self) -> np.ndarray:
        return np.concatenate(
            [[0.0], np.cumsum([s.total_duration for s in self.schedules])])

    def segment_edges(self) -> np.ndarray:
        offs = self._offsets()
        edges = [offs[i] + s.segment_edges() for i, s in enumerate(self.schedules)]
        for i, s in enumerate(self.schedules):
            if s.drive is not None:
                edges.append(offs[i] + np.array([s.drive.t_start,
                                                 s.drive.t_start + s.drive.t_on]))
        return np.unique(np.round(np.concatenate(edges), 12))

    def drive_windows(self) -> list[tuple[float, float, float]]:
        """(t_on, t_off, carrier frequency) in global time for each drive."""
        out = []
        offs = self._offsets()
        for i, s in enumerate(self.schedules):
            if s.drive is not None:
                out.append((offs[i] + s.drive.t_start,
                            offs[i] + s.drive.t_start + s.drive.t_on,
                            s.drive.frequency))
        return out

    def sample(self, t):
        """(dEz, eac) at global time t, vectorized."""
        t = np.asarray(t, dtype=float)
        offs = self._offsets()
        idx = np.clip(np.searchsorted(offs, t, side="right") - 1, 0,
                      len(self.schedules) - 1)
        dez = np.empty(t.shape)
        eac = np.empty(t.shape)
        for i, s in enumerate(self.schedules):
            m = idx == i
            if not np.any(m):
                continue
            d, e = s.sample(t[m] - offs[i])
            dez[m], eac[m] = d, e
        return dez, eac


def program_for(schedule: GateSchedule) -> SiteProgram:
    return SiteProgram((schedule,))


def estimate_adiabaticity(s: GateSchedule, p: DeviceParams,
                          samples_per_ramp: int = 400) -> float:
    """Sweep-rate figure of merit on the orbital two-level system.

    K(t) = gap(t) / |d(mixing angle)/dt| evaluated along every ramp, with
    the gap in GHz and the angle in rad; the minimum over the sweep is
    returned, +inf for hold-only schedules.  This tracks the published
    per-gate values at the order-of-magnitude level.
    """
    dev = p.with_vt(s.vt)
    k_min = np.inf
    for seg in s.segments:
        if seg.kind != "ramp" or seg.duration == 0 or \
                seg.start_value == seg.end_value:
            continue
        grid = np.linspace(0.0, 1.0, samples_per_ramp)
        dez = seg.value(grid)
        x = dev.field_lever_ghz(dez)
        eps0 = orbital_splitting(dev, dez)
        theta = np.arctan2(x, dev.Vt)
        tdot = np.abs(np.gradient(theta, grid * seg.duration))
        with np.errstate(divide="ignore"):
            k_here = np.where(tdot > 0, eps0 / tdot, np.inf)
        k_min = min(k_min, float(np.min(k_here)))
    return k_min
