"""Dipole operators, dipole-dipole coupling and multi-qubit composition.

Geometry: the induced dipoles point along the vertical device axis while the
array extends laterally, so the dipoles are perpendicular to every
separation vector and the dipole-dipole bracket reduces to the plain
p_i * p_j product.  Idle spacer qubits keep their electron at the donor
(dipole off) and are excluded from the Hilbert space, so an
active-idle-active arrangement at pitch r0 is exactly two active qubits at
2 r0.

The dipole of one site is e*d*P with P = (1 + sigma_id)/2 an orthogonal
projector onto the interface branch of the orbital position operator; the
interaction between two sites is then kappa(r) * P_i x P_j with all of the
physical constants in kappa.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import e as E_CHARGE
from scipy.constants import epsilon_0 as EPS_VACUUM
from scipy.constants import h as H_PLANCK

from .device import DeviceParams, build_hamiltonian, orbital_splitting, site_hamiltonian_block
from .operators import identity, kron, pauli

__all__ = [
    "ArrayGeometry",
    "position_operator",
    "dipole_operator",
    "dipole_coupling_ghz",
    "dipole_dipole",
    "build_two_qubit",
    "build_four_qubit",
    "QubitArray",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Active-qubit layout of a linear array.

    `separation` is the distance between the two active qubits (two-qubit
    case) or between the inner members of the two active couples
    (four-qubit case); it must be an integer multiple of the pitch r0.
    """

    n_active: int
    r0: float                  # m
    separation: float          # m
    intra_couple: float = 0.0  # m, four-qubit case only (defaults to r0)

    def __post_init__(self):
        if self.n_active not in (2, 4):
            raise ValueError("n_active must be 2 or 4")
        k = self.separation / self.r0
        if self.separation <= 0 or abs(k - round(k)) > 1e-9 or round(k) < 1:
            raise ValueError("separation must be a positive integer multiple of r0")
        if self.n_active == 4 and self.intra_couple == 0.0:
            object.__setattr__(self, "intra_couple", self.r0)

    @classmethod
    def pair(cls, p: DeviceParams, k: int) -> "ArrayGeometry":
        return cls(n_active=2, r0=p.r0, separation=k * p.r0)

    @classmethod
    def couples(cls, p: DeviceParams, k: int) -> "ArrayGeometry":
        return cls(n_active=4, r0=p.r0, separation=k * p.r0, intra_couple=p.r0)


def position_operator(p: DeviceParams, dEz) -> np.ndarray:
    """Orbital position operator (d e dEz / h eps0) sz + (Vt / eps0) sx.

    Eigenvalues are exactly +-1 for any field; +1 marks the electron at
    the interface.  Vectorized: returns shape dEz.shape + (2, 2).
    """
    x = np.asarray(p.field_lever_ghz(dEz))
    eps0 = np.asarray(orbital_splitting(p, dEz))
    return (x / eps0)[..., None, None] * pauli("z") \
        + (p.Vt / eps0)[..., None, None] * pauli("x")


def interface_projector(p: DeviceParams, dEz) -> np.ndarray:
    """P = (1 + sigma_id)/2; orthogonal projector, P^2 = P."""
    out = 0.5 * position_operator(p, dEz)
    out[..., 0, 0] += 0.5
    out[..., 1, 1] += 0.5
    return out


def dipole_operator(p: DeviceParams, dEz) -> np.ndarray:
    """Electric dipole (e d / 2)(1 + sigma_id) on the orbital factor, in C m."""
    return E_CHARGE * p.d * interface_projector(p, dEz)


def dipole_coupling_ghz(p: DeviceParams, r: float) -> float:
    """kappa(r) = e^2 d^2 / (4 pi eps_vac eps_r r^3 h) in GHz.

    This is the full interaction strength between two interface-branch
    electrons; the operator it multiplies is P_i x P_j.
    """
    if r <= 0:
        raise ValueError("separation must be positive")
    energy = (E_CHARGE * p.d) ** 2 / (4.0 * np.pi * EPS_VACUUM * p.eps_r * r ** 3)
    return energy / H_PLANCK * 1e-9


def dipole_dipole(p: DeviceParams, g: ArrayGeometry, dEz_i: float,
                  dEz_j: float, r: float) -> np.ndarray:
    """Dipole-dipole term on two full 8-dim sites (64x64, GHz)."""
    del g  # orientation is fixed by the vertical-dipole geometry
    kappa = dipole_coupling_ghz(p, r)
    pi8 = kron(interface_projector(p, float(dEz_i)), identity(4))
    pj8 = kron(interface_projector(p, float(dEz_j)), identity(4))
    return kappa * kron(pi8, pj8)


def build_two_qubit(p: DeviceParams, g: ArrayGeometry, dEz_i: float,
                    dEz_j: float, eac_i: float, eac_j: float) -> np.ndarray:
    """Two-site Hamiltonian H_i x 1 + 1 x H_j + H_int (64x64, GHz)."""
    hi = build_hamiltonian(p, dEz_i, eac_i)
    hj = build_hamiltonian(p, dEz_j, eac_j)
    return kron(hi, identity(8)) + kron(identity(8), hj) \
        + dipole_dipole(p, g, dEz_i, dEz_j, g.separation)


def build_four_qubit(p: DeviceParams, g: ArrayGeometry, dEz, eac,
                     dense: bool = True):
    """Four-site Hamiltonian with nearest-neighbour couplings only.

    Couples (i,j) and (k,l) interact internally at the couple pitch; the
    inner pair (j,k) interacts across the couple separation; the remaining
    pairs are neglected.  With dense=True the 4096x4096 matrix is returned,
    otherwise a :class:`QubitArray` handle exposing the structured action.
    """
    if g.n_active != 4:
        raise ValueError("four-qubit composition needs n_active = 4")
    dEz = [float(v) for v in dEz]
    eac = [float(v) for v in eac]
    if len(dEz) != 4 or len(eac) != 4:
        raise ValueError("need one (dEz, eac) pair per site")
    if not dense:
        return QubitArray.two_couples(p, g)
    one8 = identity(8)
    h = np.zeros((4096, 4096), dtype=complex)
    sites = [build_hamiltonian(p, dEz[s], eac[s]) for s in range(4)]
    for s in range(4):
        ops = [one8] * 4
        ops[s] = sites[s]
        h += kron(*ops)
    proj = [kron(interface_projector(p, dEz[s]), identity(4)) for s in range(4)]
    kappa0 = dipole_coupling_ghz(p, g.intra_couple)
    kappa = dipole_coupling_ghz(p, g.separation)
    h += kappa0 * kron(proj[0], proj[1], one8, one8)
    h += kappa0 * kron(one8, one8, proj[2], proj[3])
    h += kappa * kron(one8, proj[1], proj[2], one8)
    return h


class QubitArray:
    """Reduced-sector system handle consumed by the propagator.

    Sites are grouped into blocks that are propagated exactly: one block of
    up to two sites for the one- and two-qubit systems, two two-site blocks
    for the four-qubit system, where the weak inter-block dipole term is
    applied by symmetric operator splitting.  Each site contributes its
    4-dim zero-spin sector; computational columns stay inside it exactly.
    """

    def __init__(self, device: DeviceParams, blocks, intra_ghz, inter_ghz=0.0):
        self.device = device
        self.blocks = tuple(tuple(b) for b in blocks)
        self.intra_ghz = tuple(float(v) for v in intra_ghz)
        self.inter_ghz = float(inter_ghz)
        self.n_sites = sum(len(b) for b in self.blocks)
        if len(self.blocks) not in (1, 2):
            raise ValueError("one or two blocks supported")
        if len(self.blocks) == 1 and self.inter_ghz != 0.0:
            raise ValueError("inter coupling needs two blocks")

    # -- constructors ----------------------------------------------------
    @classmethod
    def single(cls, device: DeviceParams) -> "QubitArray":
        return cls(device, [(0,)], [0.0])

    @classmethod
    def pair(cls, device: DeviceParams, separation: float | None) -> "QubitArray":
        """Two active qubits; separation None switches the coupling off."""
        kappa = 0.0 if separation is None else dipole_coupling_ghz(device, separation)
        return cls(device, [(0, 1)], [kappa])

    @classmethod
    def two_couples(cls, device: DeviceParams, g: ArrayGeometry) -> "QubitArray":
        kappa0 = dipole_coupling_ghz(device, g.intra_couple)
        kappa = dipole_coupling_ghz(device, g.separation)
        return cls(device, [(0, 1), (2, 3)], [kappa0, kappa0], kappa)

    # -- reduced builders ------------------------------------------------
    def block_dim(self, b: int) -> int:
        return 4 ** len(self.blocks[b])

    @property
    def reduced_dim(self) -> int:
        return 4 ** self.n_sites

    def block_hamiltonians(self, b: int, dEz_sites, eac_sites) -> np.ndarray:
        """Stacked block Hamiltonians (m, d_b, d_b) from per-site field arrays.

        `dEz_sites`/`eac_sites` are (m, n_sites) arrays; only this block's
        columns are consumed.  With an inter-block coupling present, its
        single-site mean-field part is folded in here: in terms of the
        donor-branch projectors Q of the two inner sites,

            kappa P_j P_k = kappa (1/2 - Q_j) + kappa (1/2 - Q_k)
                            + kappa Q_j Q_k,

        and only the correlated last term is left for the propagator's
        operator splitting.  Q annihilates the adiabatic orbital ground
        state, so that remainder barely acts on the propagated columns and
        the splitting error stays negligible even at the closest spacing.
        """
        sites = self.blocks[b]
        p = self.device
        hs = [site_hamiltonian_block(p, dEz_sites[:, s], eac_sites[:, s])
              for s in sites]
        if len(sites) == 1:
            return hs[0]
        m = hs[0].shape[0]
        one = identity(4)
        ones = np.broadcast_to(one, (m, 4, 4))
        h = _bkron(hs[0], ones) + _bkron(ones, hs[1])
        if self.intra_ghz[b] != 0.0:
            pa = _proj4(p, dEz_sites[:, sites[0]])
            pb = _proj4(p, dEz_sites[:, sites[1]])
            h = h + self.intra_ghz[b] * _bkron(pa, pb)
        if self.inter_ghz != 0.0:
            inner = sites[-1] if b == 0 else sites[0]
            q4 = -_proj4(p, dEz_sites[:, inner])
            q4[..., range(4), range(4)] += 1.0
            mean = 0.5 * np.broadcast_to(identity(16), (m, 16, 16)) \
                - (_bkron(ones, q4) if b == 0 else _bkron(q4, ones))
            h = h + self.inter_ghz * mean
        return h

    def inter_projectors(self, dEz_sites) -> tuple[np.ndarray, np.ndarray]:
        """Donor-branch projectors of the inner sites, embedded per block.

        Returns stacked (m, 16, 16) operators 1 x Q_j (acting on block 0)
        and Q_k x 1 (acting on block 1).
        """
        j = self.blocks[0][-1]
        k = self.blocks[1][0]
        qj = -_proj4(self.device, dEz_sites[:, j])
        qk = -_proj4(self.device, dEz_sites[:, k])
        qj[..., range(4), range(4)] += 1.0
        qk[..., range(4), range(4)] += 1.0
        m = qj.shape[0]
        ones = np.broadcast_to(identity(4), (m, 4, 4))
        return _bkron(ones, qj), _bkron(qk, ones)

    def reduced_hamiltonian(self, dEz, eac) -> np.ndarray:
        """Dense Hamiltonian on the 4^n reduced space (validation path)."""
        dEz = np.asarray(dEz, dtype=float)[None, :]
        eac = np.asarray(eac, dtype=float)[None, :]
        hb = [self.block_hamiltonians(b, dEz, eac)[0]
              for b in range(len(self.blocks))]
        if len(self.blocks) == 1:
            return hb[0]
        d0, d1 = hb[0].shape[0], hb[1].shape[0]
        h = np.kron(hb[0], identity(d1)) + np.kron(identity(d0), hb[1])
        g0, g1 = self.inter_projectors(dEz)
        return h + self.inter_ghz * np.kron(g0[0], g1[0])

    def full_hamiltonian(self, dEz, eac) -> np.ndarray:
        """Dense Hamiltonian on the full 8^n space (validation path)."""
        p = self.device
        n = self.n_sites
        one8 = identity(8)
        h = np.zeros((8 ** n, 8 ** n), dtype=complex)
        for s in range(n):
            ops = [one8] * n
            ops[s] = build_hamiltonian(p, float(dEz[s]), float(eac[s]))
            h += kron(*ops)
        pairs = []
        for b, sites in enumerate(self.blocks):
            if len(sites) == 2 and self.intra_ghz[b] != 0.0:
                pairs.append((sites[0], sites[1], self.intra_ghz[b]))
        if len(self.blocks) == 2 and self.inter_ghz != 0.0:
            pairs.append((self.blocks[0][-1], self.blocks[1][0], self.inter_ghz))
        for a, bsite, kappa in pairs:
            ops = [one8] * n
            ops[a] = kron(interface_projector(p, float(dEz[a])), identity(4))
            ops[bsite] = kron(interface_projector(p, float(dEz[bsite])), identity(4))
            h += kappa * kron(*ops)
        return h


def _proj4(p: DeviceParams, dEz) -> np.ndarray:
    """Interface projector on the reduced 4-dim site basis, batched."""
    pr = interface_projector(p, np.asarray(dEz, dtype=float))
    return _bkron(pr, np.broadcast_to(identity(2), pr.shape[:-2] + (2, 2)))


def _bkron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched Kronecker product over the trailing two axes."""
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    da, db = a.shape[-1], b.shape[-1]
    return out.reshape(a.shape[:-2] + (a.shape[-2] * b.shape[-2], da * db))
