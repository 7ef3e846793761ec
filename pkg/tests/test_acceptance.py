"""Acceptance suite: quantitative reproduction bands and the property suite.

The four sweep fixtures run the production experiments once per session
(about two to three hours on two cores, dominated by the four-qubit cells);
every criterion prints one PASS/FAIL line.  Quantitative bands follow the
published plateau values; ordering and shape claims are strict.
"""

import math

import numpy as np
import pytest

from flipflop_sim.calibration import calibrate_sqrt_iswap
from flipflop_sim.coupling import (
    ArrayGeometry,
    QubitArray,
    build_four_qubit,
    dipole_coupling_ghz,
    dipole_dipole,
)
from flipflop_sim.device import DeviceParams, hyperfine, orbital_splitting
from flipflop_sim.fidelity import entanglement_fidelity, ideal_gate
from flipflop_sim.noise import NoiseSpec, generate_trace
from flipflop_sim.operators import expm_unitary, hermiticity_defect
from flipflop_sim.propagation import (
    PropagationSettings,
    computational_projector,
    evolve,
)
from flipflop_sim.pulses import idle_schedule, rz_schedule
from flipflop_sim.sweep import (
    SweepConfig,
    run_noninteracting_baseline,
    run_parallel_single_qubit,
    run_parallel_two_qubit,
)

SEED = 20777
ALPHAS = (1.0, 10.0, 50.0, 100.0)
N_1Q = 200
N_2Q = 200
N_2Q_K1 = 60          # ordering margin at r0 is ~0.5 in fidelity
TOL_4Q = 5e-3         # step-halving tolerance for the 427.6 ns four-qubit cells
TOL_4Q_K1 = 5e-2      # the r0 cells are fully scrambled (F ~ 0.02)


def _report(name: str, ok: bool, detail: str = "") -> bool:
    print(f"{'PASS' if ok else 'FAIL'} - {name}" + (f" ({detail})" if detail else ""))
    return ok


def _cells(rows):
    return {(r.k, r.alpha): r for r in rows}


@pytest.fixture(scope="session")
def rz_sweep():
    cfg = SweepConfig(gate="rz", alphas=ALPHAS, n_realizations=N_1Q,
                      master_seed=SEED, processes=2)
    rows, cal = run_parallel_single_qubit("rz", cfg)
    return _cells(rows), cal


@pytest.fixture(scope="session")
def rx_sweep():
    cfg = SweepConfig(gate="rx", alphas=ALPHAS, n_realizations=N_1Q,
                      master_seed=SEED, processes=2)
    rows, cal = run_parallel_single_qubit("rx", cfg)
    return _cells(rows), cal


@pytest.fixture(scope="session")
def iswap_sweep():
    cfg = SweepConfig(gate="sqrt_iswap", r_multiples=(2, 3, 4), alphas=ALPHAS,
                      n_realizations=N_2Q, master_seed=SEED,
                      convergence_tol=TOL_4Q, processes=2)
    rows, cal = run_parallel_two_qubit(cfg)
    cfg_k1 = SweepConfig(gate="sqrt_iswap", r_multiples=(1,), alphas=ALPHAS,
                         n_realizations=N_2Q_K1, master_seed=SEED,
                         convergence_tol=TOL_4Q_K1, processes=2)
    rows_k1, _ = run_parallel_two_qubit(cfg_k1)
    return _cells(rows + rows_k1), cal


@pytest.fixture(scope="session")
def baselines():
    out = {}
    for gate in ("rz", "rx", "sqrt_iswap"):
        cfg = SweepConfig(gate=gate, alphas=ALPHAS, n_realizations=N_1Q,
                          master_seed=SEED, processes=2)
        rows, _ = run_noninteracting_baseline(gate, cfg)
        out[gate] = _cells(rows)
    return out


# ----------------------------------------------------------------------
# Quantitative plateau bands
# ----------------------------------------------------------------------

def test_rz_plateau_bands(rz_sweep):
    cells, _ = rz_sweep
    ok = True
    for k in (2, 3, 4):
        f10 = cells[(k, 10.0)].mean_fidelity
        f50 = cells[(k, 50.0)].mean_fidelity
        f100 = cells[(k, 100.0)].mean_fidelity
        ok &= _report(f"Rz plateau alpha=10 k={k} in [0.994, 1]",
                      0.994 <= f10 <= 1.0, f"F={f10:.5f}")
        ok &= _report(f"Rz plateau alpha=50 k={k} in [0.991, 1]",
                      0.991 <= f50 <= 1.0, f"F={f50:.5f}")
        ok &= _report(f"Rz plateau alpha=100 k={k} in [0.985, 0.995]",
                      0.985 <= f100 <= 0.995, f"F={f100:.5f}")
    assert ok


def test_rx_plateau_bands(rx_sweep):
    cells, _ = rx_sweep
    ok = True
    for k in (2, 3, 4):
        for alpha in (1.0, 10.0):
            f = cells[(k, alpha)].mean_fidelity
            ok &= _report(f"Rx plateau alpha={alpha:g} k={k} in [0.98, 1]",
                          0.98 <= f <= 1.0, f"F={f:.5f}")
        f100 = cells[(k, 100.0)].mean_fidelity
        ok &= _report(f"Rx plateau alpha=100 k={k} in [0.88, 0.92]",
                      0.88 <= f100 <= 0.92, f"F={f100:.5f}")
    assert ok


def test_ordering_rx_exceeds_rz(rz_sweep, rx_sweep):
    cells_rz, _ = rz_sweep
    cells_rx, _ = rx_sweep
    ok = True
    for alpha in ALPHAS:
        inf_rz = np.mean([1 - cells_rz[(k, alpha)].mean_fidelity
                          for k in (2, 3, 4)])
        inf_rx = np.mean([1 - cells_rx[(k, alpha)].mean_fidelity
                          for k in (2, 3, 4)])
        ok &= _report(f"ordering 1-F(Rx) > 1-F(Rz) at alpha={alpha:g}",
                      inf_rx > inf_rz,
                      f"rx={inf_rx:.2e} rz={inf_rz:.2e}")
    assert ok


def test_peak_at_r0(rz_sweep, rx_sweep, iswap_sweep):
    ok = True
    for name, (cells, _) in (("rz", rz_sweep), ("rx", rx_sweep),
                             ("sqrt_iswap", iswap_sweep)):
        for alpha in ALPHAS:
            inf1 = 1 - cells[(1, alpha)].mean_fidelity
            inf2 = 1 - cells[(2, alpha)].mean_fidelity
            ok &= _report(f"peak at r0: {name} alpha={alpha:g}",
                          inf1 > inf2, f"1-F: {inf1:.2e} > {inf2:.2e}")
    assert ok


def test_plateau_flatness(rz_sweep, rx_sweep):
    # for k >= 2 the one-qubit-gate curves vary by < 3 standard errors
    ok = True
    for name, (cells, _) in (("rz", rz_sweep), ("rx", rx_sweep)):
        for alpha in ALPHAS:
            for ka in (2, 3):
                for kb in range(ka + 1, 5):
                    a, b = cells[(ka, alpha)], cells[(kb, alpha)]
                    gap = abs(a.mean_fidelity - b.mean_fidelity)
                    lim = 3.0 * math.hypot(a.std_error, b.std_error)
                    ok &= _report(
                        f"flatness {name} alpha={alpha:g} k={ka}vs{kb}",
                        gap < lim, f"|dF|={gap:.2e} 3SE={lim:.2e}")
    assert ok


def test_iswap_minimum_structure(iswap_sweep):
    # interior minimum of 1-F at k=3 present for alpha in {1, 10} and
    # absent for {50, 100}
    cells, _ = iswap_sweep
    ok = True
    for alpha in (1.0, 10.0):
        f2, f3, f4 = (cells[(k, alpha)].mean_fidelity for k in (2, 3, 4))
        s2, s3, s4 = (cells[(k, alpha)].std_error for k in (2, 3, 4))
        present = (f3 > f2 + 2 * math.hypot(s2, s3)
                   and f3 > f4 + 2 * math.hypot(s3, s4))
        ok &= _report(f"iswap interior minimum at k=3, alpha={alpha:g}",
                      present, f"F2={f2:.5f} F3={f3:.5f} F4={f4:.5f}")
    for alpha in (50.0, 100.0):
        f2, f3, f4 = (cells[(k, alpha)].mean_fidelity for k in (2, 3, 4))
        s2, s3, s4 = (cells[(k, alpha)].std_error for k in (2, 3, 4))
        present = (f3 > f2 + 2 * math.hypot(s2, s3)
                   and f3 > f4 + 2 * math.hypot(s3, s4))
        ok &= _report(f"iswap minimum absent at k=3, alpha={alpha:g}",
                      not present, f"F2={f2:.5f} F3={f3:.5f} F4={f4:.5f}")
    assert ok


def test_iswap_endpoint_band(iswap_sweep):
    # plateau fidelity runs from ~99.9% at alpha=1 down to ~90% at
    # alpha=100 (within 2 pp); read at the weakest-coupling cell
    cells, _ = iswap_sweep
    f_lo = cells[(4, 1.0)].mean_fidelity
    f_hi = cells[(4, 100.0)].mean_fidelity
    ok = _report("iswap endpoint alpha=1 within 2pp of 0.999",
                 f_lo >= 0.979, f"F={f_lo:.5f}")
    ok &= _report("iswap endpoint alpha=100 in [0.88, 0.92]",
                  0.88 <= f_hi <= 0.92, f"F={f_hi:.5f}")
    assert ok


def test_safe_distance(rz_sweep, rx_sweep, iswap_sweep):
    ok = True
    for name, (cells, _) in (("rz", rz_sweep), ("rx", rx_sweep),
                             ("sqrt_iswap", iswap_sweep)):
        for k in (2, 3, 4):
            for alpha in (1.0, 10.0, 50.0):
                inf = 1 - cells[(k, alpha)].mean_fidelity
                ok &= _report(
                    f"safe distance {name} k={k} alpha={alpha:g}: 1-F<0.1",
                    inf < 0.1, f"1-F={inf:.2e}")
    assert ok


def test_baseline_consistency_rz(rz_sweep, baselines):
    # for k >= 3 the interacting result is within 3 SE of the baseline
    cells, _ = rz_sweep
    base = baselines["rz"]
    ok = True
    for alpha in ALPHAS:
        b = base[(0, alpha)]
        for k in (3, 4):
            r = cells[(k, alpha)]
            lim = 3.0 * math.hypot(r.std_error, b.std_error) + 1e-5
            ok &= _report(
                f"rz interacting ~ baseline k={k} alpha={alpha:g}",
                abs(r.mean_fidelity - b.mean_fidelity) < lim,
                f"dF={abs(r.mean_fidelity - b.mean_fidelity):.2e} lim={lim:.2e}")
    assert ok


# ----------------------------------------------------------------------
# Property suite (no paper-band dependence)
# ----------------------------------------------------------------------

def test_property_hermiticity_and_unitarity():
    dev = DeviceParams()
    rng = np.random.default_rng(3)
    ok = True
    worst_h = 0.0
    for _ in range(20):
        dEz = rng.uniform(-1e4, 1e4)
        from flipflop_sim.device import build_hamiltonian

        h = build_hamiltonian(dev, dEz, rng.uniform(-180, 180))
        worst_h = max(worst_h, hermiticity_defect(h))
    ok &= _report("Hamiltonian hermiticity < 1e-12", worst_h < 1e-12,
                  f"worst={worst_h:.1e}")
    h = build_hamiltonian(dev, 290.0, 0.0)
    u = expm_unitary(h, 100.0)
    defect = np.linalg.norm(u.conj().T @ u - np.eye(8))
    ok &= _report("propagator unitarity < 1e-9", defect < 1e-9,
                  f"defect={defect:.1e}")
    assert ok


def test_property_interaction_scaling():
    dev = DeviceParams()
    g = ArrayGeometry.pair(dev, 1)
    h1 = dipole_dipole(dev, g, 0.0, 0.0, dev.r0)
    h2 = dipole_dipole(dev, g, 0.0, 0.0, 2 * dev.r0)
    ratio = np.linalg.norm(h2) / np.linalg.norm(h1)
    assert _report("1/r^3 scaling exact 1/8 at 2r",
                   abs(ratio - 0.125) < 1e-14, f"ratio={ratio}")


def test_property_scalar_anchors():
    dev = DeviceParams()
    ok = _report("eps0(Vt, 0) = Vt",
                 orbital_splitting(dev, 0.0) == dev.Vt)
    ok &= _report("A(0) = A0/2",
                  abs(hyperfine(dev, 0.0) - dev.A0 / 2) < 1e-12)
    assert ok


def test_property_psd_slope():
    spec = NoiseSpec(alpha=3.0, f_min=1e-3, f_max=0.4, n_components=64,
                     master_seed=11)
    n, dt = 8192, 1.0
    freqs = np.fft.rfftfreq(n, dt)
    psd = np.zeros(len(freqs))
    n_real = 1000
    for r in range(n_real):
        tr = generate_trace(spec, (n - 1) * dt, dt, r)
        psd += np.abs(np.fft.rfft(tr.samples[:n])) ** 2
    psd *= 2.0 * dt / (n * n_real)
    edges = np.geomspace(3e-3, 0.15, 14)
    centers, means = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (freqs >= a) & (freqs < b)
        centers.append(np.sqrt(a * b))
        means.append(psd[sel].mean())
    slope = np.polyfit(np.log(centers), np.log(means), 1)[0]
    assert _report("noise PSD log-log slope -1 +- 0.1",
                   abs(slope + 1.0) < 0.1, f"slope={slope:+.3f}")


def test_property_fidelity_self_and_phase():
    u = ideal_gate("sqrt_iswap")
    ok = _report("F(U, U) = 1", abs(entanglement_fidelity(u, u) - 1) < 1e-12)
    ok &= _report("global phase invariance",
                  abs(entanglement_fidelity(np.exp(0.7j) * u, u) - 1) < 1e-12)
    assert ok


def test_property_step_halving_convergence():
    # the verification machinery certifies accepted results at 1e-5 for
    # the one- and two-qubit systems and short four-qubit segments
    dev = DeviceParams().with_vt(11.29)
    ok = True
    sp = evolve(QubitArray.single(dev), [rz_schedule()],
                target=ideal_gate("rz_m_half_pi"))
    ok &= _report("step-halving 1q < 1e-5", sp.converged
                  and sp.convergence_delta < 1e-5,
                  f"delta={sp.convergence_delta:.1e}")
    pair = QubitArray.pair(dev, 2 * dev.r0)
    sp = evolve(pair, [rz_schedule()] * 2,
                target=ideal_gate("rz_m_half_pi", 2))
    ok &= _report("step-halving 2q < 1e-5", sp.converged
                  and sp.convergence_delta < 1e-5,
                  f"delta={sp.convergence_delta:.1e}")
    d4 = DeviceParams().with_vt(11.58)
    sys4 = QubitArray.two_couples(d4, ArrayGeometry.couples(d4, 2))
    sched = idle_schedule(5.0, vt=11.58, level=0.0)
    sp = evolve(sys4, [sched] * 4)
    ok &= _report("step-halving 4q short segment < 1e-5", sp.converged
                  and sp.convergence_delta < 1e-5,
                  f"delta={sp.convergence_delta:.1e}")
    assert ok


def test_property_four_qubit_dense_agreement():
    # structured two-couple propagation against the dense 4096-dim
    # exponential on a 5 ns constant-field schedule
    dev = DeviceParams().with_vt(11.58)
    g = ArrayGeometry.couples(dev, 2)
    sys4 = QubitArray.two_couples(dev, g)
    level, span = 1300.0, 5.0
    sched = idle_schedule(span, vt=11.58, level=level)
    sp = evolve(sys4, [sched] * 4, verify=False)

    h = build_four_qubit(dev, g, [level] * 4, [0.0] * 4, dense=True)
    u = expm_unitary(h, span)
    comp = computational_projector(4)
    ref = u[np.ix_(comp, comp)]
    err = np.abs(sp.matrix - ref).max()
    assert _report("4q structured vs dense 4096 < 1e-8", err < 1e-8,
                   f"err={err:.1e}")


def test_property_tensor_factorization():
    # noiseless parallel gates at huge separation factorize exactly
    dev = DeviceParams().with_vt(11.29)
    sched = rz_schedule()
    single = evolve(QubitArray.single(dev), [sched], verify=False)
    f_single = entanglement_fidelity(single, ideal_gate("rz_m_half_pi"))
    pair = QubitArray.pair(dev, 10 ** 6 * dev.r0)
    par = evolve(pair, [sched] * 2, verify=False)
    f_par = entanglement_fidelity(par, ideal_gate("rz_m_half_pi", 2))
    gap = abs(f_par - f_single ** 2)
    assert _report("F(parallel) = F(single)^2 at infinite separation < 1e-6",
                   gap < 1e-6, f"gap={gap:.1e}")


def test_noiseless_parallel_monotone(rz_sweep, rx_sweep):
    # geometry sanity: noiseless 1-F non-increasing from k=1 to k=2
    dev = DeviceParams()
    ok = True
    for gate, (cells, cal) in (("rz", rz_sweep), ("rx", rx_sweep)):
        from flipflop_sim.sweep import calibrated_single_qubit_schedule

        sched, _ = calibrated_single_qubit_schedule(
            gate, dev, PropagationSettings())
        tgt = ideal_gate(f"{gate}_m_half_pi", 2)
        infs = []
        for k in (1, 2):
            d = dev.with_vt(sched.vt)
            sp = evolve(QubitArray.pair(d, k * d.r0), [sched] * 2,
                        verify=False)
            infs.append(1 - entanglement_fidelity(sp, tgt))
        ok &= _report(f"noiseless 1-F(k=1) >= 1-F(k=2) for {gate}",
                      infs[0] >= infs[1],
                      f"{infs[0]:.2e} >= {infs[1]:.2e}")
    assert ok


def test_noiseless_rz_limit(rz_sweep):
    # noiseless limit at k=4: 1-F below 1e-3
    dev = DeviceParams()
    cfg = SweepConfig(gate="rz", r_multiples=(4,), alphas=(0.0,),
                      n_realizations=1, master_seed=SEED, processes=1)
    rows, _ = run_parallel_single_qubit("rz", cfg)
    inf = 1 - rows[0].mean_fidelity
    assert _report("rz noiseless k=4: 1-F < 1e-3", inf < 1e-3,
                   f"1-F={inf:.2e}")
