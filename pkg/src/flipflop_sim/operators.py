"""Dense complex operator algebra and the fixed single-site basis ordering.

Every operator in this package is a plain complex ``numpy.ndarray``.  Energies
are carried in GHz and times in ns; the 2*pi conversion between the two lives
inside :func:`expm_unitary`.

Single-site basis (dimension 8)
-------------------------------
A site is ordered as orbital (x) electron-spin (x) nuclear-spin, slowest to
fastest index, with index 0 of each factor being |g>, |down>, |Down>::

    index = 4*orbital + 2*electron + nuclear
    orbital:  0 = |g>,    1 = |e>
    electron: 0 = |down>, 1 = |up>
    nuclear:  0 = |Down>, 1 = |Up>

The computational states are |0> = |g,down,Up> (site index 1) and
|1> = |g,up,Down> (site index 2).  Multi-site operators put the leftmost
qubit on the slowest index, i.e. ``kron(site_0, site_1, ...)``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

SITE_DIM = 8

# Indices of the computational states |g,down,Up> and |g,up,Down> inside one site.
COMP_SITE_INDICES = (1, 2)

# Indices of the zero-total-spin (electron+nuclear) sector of one site:
# |g,down,Up>, |g,up,Down>, |e,down,Up>, |e,up,Down>.  All Hamiltonians in this
# package conserve per-site electron+nuclear spin projection, so computational
# columns never leave this 4-dimensional block.
SPIN_SECTOR_INDICES = (1, 2, 5, 6)

# Computational states inside the reduced (4-dim) site block.
COMP_SECTOR_INDICES = (0, 1)


def pauli(axis: str) -> np.ndarray:
    """2x2 Pauli matrix on the {|g>, |e>} orbital basis."""
    if axis == "z":
        return np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    if axis == "x":
        return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    raise ValueError(f"axis must be 'x' or 'z', got {axis!r}")


def spin_half_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standard spin-1/2 operators (Sx, Sy, Sz) with Sz = diag(1/2, -1/2)."""
    sx = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = 0.5 * np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    sz = 0.5 * np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return sx, sy, sz


def spin_half_ops_down_first() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-1/2 operators in the site ordering where index 0 is |down>.

    Relabeling the basis flips the sign of Sy and Sz; the su(2) algebra and
    S.I are unchanged.
    """
    sx, sy, sz = spin_half_ops()
    return sx, -sy, -sz


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product with the leftmost factor on the slowest index."""
    if not ops:
        raise ValueError("kron needs at least one operator")
    return reduce(np.kron, ops)


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def hermiticity_defect(h: np.ndarray) -> float:
    """Relative Frobenius distance of h from its own adjoint."""
    norm = np.linalg.norm(h)
    if norm == 0.0:
        return 0.0
    return np.linalg.norm(h - h.conj().T) / norm


def is_hermitian(h: np.ndarray, tol: float = 1e-12) -> bool:
    return hermiticity_defect(h) < tol


def expm_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """Propagator exp(-i 2*pi h t) of a Hermitian h (GHz) over t (ns).

    Uses an eigendecomposition, so the result is unitary to machine
    precision even for long holds.
    """
    if hermiticity_defect(h) > 1e-10:
        raise ValueError("expm_unitary requires a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-2j * np.pi * w * t)) @ v.conj().T


def spin_dot_product() -> np.ndarray:
    """S.I on the electron (x) nuclear factor in site ordering (4x4)."""
    sx, sy, sz = spin_half_ops_down_first()
    return kron(sx, sx) + kron(sy, sy) + kron(sz, sz)


def site_state_index(orbital: int, electron: int, nuclear: int) -> int:
    """Flat index of |orbital, electron, nuclear> in the 8-dim site basis."""
    if not all(b in (0, 1) for b in (orbital, electron, nuclear)):
        raise ValueError("basis labels must be 0 or 1")
    return 4 * orbital + 2 * electron + nuclear
