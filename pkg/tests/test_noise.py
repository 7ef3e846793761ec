import numpy as np
import pytest

from flipflop_sim.noise import NoiseSpec, NoiseTrace, apply_noise, generate_trace
from flipflop_sim.pulses import rz_schedule


def test_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(alpha=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec(alpha=1.0, f_min=0.1, f_max=0.01)
    with pytest.raises(ValueError):
        NoiseSpec(alpha=1.0, n_components=0)


def test_zero_alpha_trace():
    tr = generate_trace(NoiseSpec(alpha=0.0), 100.0, 1.0, 3)
    assert np.all(tr.samples == 0.0)
    assert np.all(tr.value(np.linspace(0, 100, 17)) == 0.0)


def test_determinism():
    spec = NoiseSpec(alpha=30.0, master_seed=99)
    a = generate_trace(spec, 50.0, 0.5, 7)
    b = generate_trace(spec, 50.0, 0.5, 7)
    assert np.array_equal(a.samples, b.samples)
    c = generate_trace(spec, 50.0, 0.5, 8)
    assert not np.allclose(a.samples, c.samples)


def test_exact_evaluation_matches_samples():
    spec = NoiseSpec(alpha=10.0, master_seed=5)
    tr = generate_trace(spec, 40.0, 0.25, 0)
    times = np.arange(0.0, 40.0 + 0.25, 0.25)
    assert np.allclose(tr.value(times), tr.samples)


def test_variance_scales_with_alpha_squared():
    # identical phases (same seed/realization), amplitudes scale with alpha
    traces = {a: generate_trace(NoiseSpec(alpha=a, master_seed=1), 2000.0,
                                1.0, 4)
              for a in (1.0, 10.0, 100.0)}
    v1 = np.var(traces[1.0].samples)
    v10 = np.var(traces[10.0].samples)
    v100 = np.var(traces[100.0].samples)
    assert v10 / v1 == pytest.approx(100.0, rel=1e-2)
    assert v100 / v1 == pytest.approx(10000.0, rel=1e-2)


def test_realizations_uncorrelated():
    spec = NoiseSpec(alpha=20.0, master_seed=11)
    a = generate_trace(spec, 999.0, 1.0, 0).samples
    b = generate_trace(spec, 999.0, 1.0, 1).samples
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 0.05


def test_ensemble_psd_slope():
    """Periodogram oracle: ensemble-average over >= 1000 realizations,
    bin logarithmically inside the band and fit the log-log slope."""
    spec = NoiseSpec(alpha=5.0, f_min=1e-3, f_max=0.4, n_components=64,
                     master_seed=123)
    n, dt = 8192, 1.0
    freqs = np.fft.rfftfreq(n, dt)
    psd = np.zeros(len(freqs))
    for r in range(1000):
        tr = generate_trace(spec, (n - 1) * dt, dt, r)
        x = tr.samples[:n]
        psd += np.abs(np.fft.rfft(x)) ** 2
    psd *= 2.0 * dt / (n * 1000)

    lo, hi = 3e-3, 0.15  # interior of the synthesis band
    mask = (freqs >= lo) & (freqs <= hi)
    edges = np.geomspace(lo, hi, 14)
    centers, means = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = mask & (freqs >= a) & (freqs < b)
        if np.any(sel):
            centers.append(np.sqrt(a * b))
            means.append(psd[sel].mean())
    slope = np.polyfit(np.log(centers), np.log(means), 1)[0]
    assert abs(slope + 1.0) < 0.1


def test_apply_noise_zero_trace_identity():
    sched = rz_schedule()
    tr = generate_trace(NoiseSpec(alpha=0.0), sched.total_duration + 1, 1.0, 0)
    noisy = apply_noise(sched, tr)
    t = np.linspace(0, sched.total_duration, 57)
    assert np.array_equal(noisy.sample(t)[0], sched.dc_value(t))
    assert np.array_equal(noisy.sample(t)[1], sched.eac_value(t))


def test_apply_noise_constant_offset():
    sched = rz_schedule()
    tr = NoiseTrace(dt=1.0, samples=np.full(100, 100.0), realization_index=0,
                    frequencies=np.array([0.0]), amplitudes=np.array([100.0]),
                    phases=np.array([0.0]))
    noisy = apply_noise(sched, tr)
    t = np.linspace(0, sched.total_duration, 31)
    assert np.allclose(noisy.sample(t)[0], sched.dc_value(t) + 100.0)


def test_apply_noise_linearity():
    spec = NoiseSpec(alpha=25.0, master_seed=3)
    sched = rz_schedule()
    t = np.linspace(0, sched.total_duration, 41)
    tr1 = generate_trace(spec, sched.total_duration + 1, 1.0, 2)
    tr2 = generate_trace(NoiseSpec(alpha=50.0, master_seed=3),
                         sched.total_duration + 1, 1.0, 2)
    off1 = apply_noise(sched, tr1).sample(t)[0] - sched.dc_value(t)
    off2 = apply_noise(sched, tr2).sample(t)[0] - sched.dc_value(t)
    assert np.allclose(2.0 * off1, off2)


def test_apply_noise_rejects_short_trace():
    sched = rz_schedule()
    tr = generate_trace(NoiseSpec(alpha=1.0), 10.0, 1.0, 0)
    with pytest.raises(ValueError):
        apply_noise(sched, tr)
