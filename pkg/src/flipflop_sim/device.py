"""Single flip-flop qubit: device constants and the 8-dim site Hamiltonian.

The site Hamiltonian is the sum of a Zeeman term, the field-dependent
hyperfine contact interaction and the two-level orbital term.  All energies
are returned in GHz, control fields are vertical electric field offsets from
the ionization point in V/m.

Two builders are provided: :func:`build_hamiltonian` returns the full 8x8
site operator, while :func:`site_hamiltonian_block` returns the 4x4
restriction to the zero-spin sector (batched over time samples), which is
what the propagator uses.  Both are generated from the same coefficient
functions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import e as E_CHARGE
from scipy.constants import h as H_PLANCK

from .operators import (
    SPIN_SECTOR_INDICES,
    identity,
    kron,
    pauli,
    spin_dot_product,
    spin_half_ops_down_first,
)

__all__ = [
    "DeviceParams",
    "orbital_splitting",
    "hyperfine",
    "build_hamiltonian",
    "site_hamiltonian_block",
    "transition_frequency",
]


@dataclass(frozen=True)
class DeviceParams:
    """Device constants of one flip-flop qubit (all qubits are identical).

    Magnetic field in T, gyromagnetic ratios in GHz/T, tunnel coupling in
    GHz, hyperfine bulk value in MHz, lengths in m.
    """

    B0: float = 0.4
    delta_gamma: float = -0.002
    gamma_e: float = 27.97
    gamma_n: float = 0.01723
    d: float = 15e-9
    Vt: float = 11.29
    A0: float = 117.0
    c: float = 5.174e-4
    eps_r: float = 11.7
    r0: float = 180e-9

    def __post_init__(self):
        if self.d <= 0 or self.Vt <= 0 or self.r0 <= 0:
            raise ValueError("d, Vt and r0 must be positive")
        if self.eps_r < 1:
            raise ValueError("eps_r must be >= 1")

    def with_vt(self, vt: float) -> "DeviceParams":
        return replace(self, Vt=vt)

    def field_lever_ghz(self, dEz):
        """d*e*dEz/h converted to GHz; the electric-dipole energy lever arm."""
        return self.d * E_CHARGE * np.asarray(dEz, dtype=float) / H_PLANCK * 1e-9


def orbital_splitting(p: DeviceParams, dEz) -> np.ndarray | float:
    """Orbital gap sqrt(Vt^2 + (d e dEz / h)^2) in GHz."""
    x = p.field_lever_ghz(dEz)
    return np.hypot(p.Vt, x)


def hyperfine(p: DeviceParams, dEz) -> np.ndarray | float:
    """Field-dependent hyperfine coupling A0 / (1 + exp(c dEz)) in MHz."""
    arg = p.c * np.asarray(dEz, dtype=float)
    # exp overflows for very negative fields; clip to the saturated branch.
    return p.A0 / (1.0 + np.exp(np.clip(arg, -700.0, 700.0)))


def _coefficients(p: DeviceParams, dEz, eac):
    """Shared scalar coefficients of all Hamiltonian terms (GHz)."""
    x = p.field_lever_ghz(dEz)
    eps0 = np.hypot(p.Vt, x)
    az = x / (2.0 * eps0)          # d e dEz / (2 h eps0)
    ax = p.Vt / (2.0 * eps0)       # Vt / (2 eps0)
    a_ghz = hyperfine(p, dEz) * 1e-3
    drive_half = p.field_lever_ghz(eac) / 2.0   # d e E_ac(t) / (2 h)
    return eps0, az, ax, a_ghz, drive_half


def build_hamiltonian(p: DeviceParams, dEz: float, eac: float,
                      drive_phase_arg: float = 0.0) -> np.ndarray:
    """Full 8x8 site Hamiltonian at instantaneous fields (GHz).

    `eac` is the already-evaluated instantaneous drive value
    E_ac(t)*cos(w t + phi); composing envelope, carrier and noise is the
    schedule's job.  `drive_phase_arg` is carried for diagnostics only.
    """
    del drive_phase_arg
    eps0, az, ax, a_ghz, drive_half = _coefficients(p, float(dEz), float(eac))
    sz, sx = pauli("z"), pauli("x")
    one2, one4 = identity(2), identity(4)
    _, _, s_z = spin_half_ops_down_first()
    _, _, i_z = spin_half_ops_down_first()

    zeeman_orb = (1.0 + p.delta_gamma / 2.0) * one2 + p.delta_gamma * (az * sz + ax * sx)
    h_b0 = p.gamma_e * p.B0 * kron(zeeman_orb, s_z, one2) \
        - p.gamma_n * p.B0 * kron(one2, one2, i_z)

    hf_orb = 0.5 * one2 - az * sz - ax * sx
    h_a = a_ghz * kron(hf_orb, spin_dot_product())

    h_orb = kron(-0.5 * eps0 * sz - drive_half * (2.0 * az * sz + 2.0 * ax * sx), one4)
    return h_b0 + h_a + h_orb


# Constant 2x2 blocks of the zero-spin sector {|down,Up>, |up,Down>}.
_SZ_RED = np.diag([-0.5, 0.5]).astype(complex)
_IZ_RED = np.diag([0.5, -0.5]).astype(complex)
_SDOTI_RED = np.array([[-0.25, 0.5], [0.5, -0.25]], dtype=complex)


def site_hamiltonian_block(p: DeviceParams, dEz, eac) -> np.ndarray:
    """Site Hamiltonian restricted to the zero-spin sector, batched.

    Parameters are arrays of matching shape (time samples); the result has
    shape ``dEz.shape + (4, 4)`` on the basis |g,0>, |g,1>, |e,0>, |e,1>.
    """
    dEz = np.asarray(dEz, dtype=float)
    eac = np.asarray(eac, dtype=float)
    eps0, az, ax, a_ghz, drive_half = _coefficients(p, dEz, eac)

    sz, sx = pauli("z"), pauli("x")
    one2 = identity(2)
    ones = np.ones_like(eps0)

    zeeman_orb = ((1.0 + p.delta_gamma / 2.0) * _bc(ones, one2)
                  + p.delta_gamma * (_bc(az, sz) + _bc(ax, sx)))
    hf_orb = 0.5 * _bc(ones, one2) - _bc(az, sz) - _bc(ax, sx)
    orb = -_bc(0.5 * eps0, sz) - _bc(drive_half, sz) * 2.0 * az[..., None, None] \
        - _bc(drive_half, sx) * 2.0 * ax[..., None, None]

    return (p.gamma_e * p.B0 * _bkron(zeeman_orb, _SZ_RED)
            - p.gamma_n * p.B0 * _bkron(_bc(ones, one2), _IZ_RED)
            + a_ghz[..., None, None] * _bkron(hf_orb, _SDOTI_RED)
            + _bkron(orb, one2))


def _bc(coeff, mat):
    """coeff[...,None,None] * mat with broadcasting."""
    return np.asarray(coeff)[..., None, None] * mat


def _bkron(a, b):
    """Batched Kronecker product over the trailing two axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    out = np.einsum("...ij,kl->...ikjl", a, b)
    return out.reshape(a.shape[:-2] + (a.shape[-2] * b.shape[-2], a.shape[-1] * b.shape[-1]))


def reduce_to_spin_sector(h8: np.ndarray) -> np.ndarray:
    """Restriction of an 8x8 site operator to the zero-spin sector."""
    ix = np.asarray(SPIN_SECTOR_INDICES)
    return h8[np.ix_(ix, ix)]


def transition_frequency(p: DeviceParams, dEz: float) -> float:
    """Flip-flop qubit splitting at a DC operating point (GHz).

    Diagonalizes the drive-free site Hamiltonian and identifies the dressed
    eigenstates of maximal overlap with |g,down,Up> and |g,up,Down>.
    """
    h = build_hamiltonian(p, dEz, 0.0)
    w, v = np.linalg.eigh(h)
    i0 = int(np.argmax(np.abs(v[1, :]) ** 2))
    i1 = int(np.argmax(np.abs(v[2, :]) ** 2))
    ov0 = np.abs(v[1, i0]) ** 2
    ov1 = np.abs(v[2, i1]) ** 2
    if i0 == i1 or min(ov0, ov1) < 0.5:
        raise ValueError(
            f"qubit states ill-defined at dEz={dEz} V/m "
            f"(overlaps {ov0:.3f}, {ov1:.3f})"
        )
    return float(w[i1] - w[i0])
