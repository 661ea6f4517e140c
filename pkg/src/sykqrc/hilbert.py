"""Fock space of N spinless fermionic modes: operator construction,
particle-number sectors, density-matrix algebra, and time evolution.

Basis convention: bit i of the basis index (bit 0 = site 1) stores the
occupation of site i+1.  The Jordan-Wigner string for site i applies a
parity sign over all sites with smaller index, i.e. over the low bits.
With this ordering the site-1 factor is the fastest index, so injection
and partial trace at site 1 are contiguous reshape operations.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class SiteOutOfRange(ValueError):
    pass


class NonBlockDiagonal(ValueError):
    pass


@dataclass(frozen=True)
class FockSpace:
    """N fermionic modes; dim = 2**N."""

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need at least 2 modes, got N={self.N}")

    @property
    def dim(self) -> int:
        return 2 ** self.N


@dataclass(frozen=True)
class SectorBasis:
    """Fock indices with fixed particle number N_p, strictly ascending."""

    N: int
    N_p: int
    indices: np.ndarray = field(repr=False)

    @property
    def dim_sector(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and unitary eigenvector columns of a
    Hermitian operator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def popcount(x):
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


def sector_basis(space: FockSpace, N_p: int) -> SectorBasis:
    if not 0 <= N_p <= space.N:
        raise ValueError(f"N_p={N_p} outside [0, {space.N}]")
    b = np.arange(space.dim, dtype=np.int64)
    idx = b[popcount(b) == N_p]
    assert len(idx) == math.comb(space.N, N_p)
    return SectorBasis(N=space.N, N_p=N_p, indices=idx)


@functools.lru_cache(maxsize=8)
def annihilation_operators(N: int) -> tuple[np.ndarray, ...]:
    """Dense matrices of c_i (i = 1..N) under the fixed JW ordering."""
    dim = 2 ** N
    b = np.arange(dim, dtype=np.int64)
    ops = []
    for i in range(1, N + 1):
        bit = 1 << (i - 1)
        occupied = (b & bit) != 0
        src = b[occupied]
        dst = src & ~bit
        # JW string: parity of occupations on sites with index < i
        sign = 1.0 - 2.0 * (popcount(src & (bit - 1)) % 2)
        c = np.zeros((dim, dim), dtype=complex)
        c[dst, src] = sign
        ops.append(c)
    return tuple(ops)


def _check_site(i: int, N: int):
    if not 1 <= i <= N:
        raise SiteOutOfRange(f"site {i} outside 1..{N}")


def build_one_body(i: int, j: int, space: FockSpace) -> np.ndarray:
    """Matrix of c†_i c_j."""
    _check_site(i, space.N)
    _check_site(j, space.N)
    c = annihilation_operators(space.N)
    return c[i - 1].conj().T @ c[j - 1]


def build_two_body(i: int, j: int, k: int, l: int, space: FockSpace) -> np.ndarray:
    """Matrix of c†_i c†_j c_k c_l (zero when i=j or k=l)."""
    for s in (i, j, k, l):
        _check_site(s, space.N)
    if i == j or k == l:
        return np.zeros((space.dim, space.dim), dtype=complex)
    c = annihilation_operators(space.N)
    return c[i - 1].conj().T @ c[j - 1].conj().T @ c[k - 1] @ c[l - 1]


def number_operator(space: FockSpace, i: int) -> np.ndarray:
    """Diagonal matrix of n_i = c†_i c_i."""
    _check_site(i, space.N)
    b = np.arange(space.dim, dtype=np.int64)
    return np.diag(((b >> (i - 1)) & 1).astype(complex))


def total_number_operator(space: FockSpace) -> np.ndarray:
    b = np.arange(space.dim, dtype=np.int64)
    return np.diag(popcount(b).astype(complex))


def occupation_bits(space: FockSpace) -> np.ndarray:
    """(N, dim) array: row i holds the site-(i+1) occupation of each basis
    state; contracting with diag(rho) gives all <n_i> at once."""
    b = np.arange(space.dim, dtype=np.int64)
    return np.stack([((b >> i) & 1).astype(float) for i in range(space.N)])


def sector_project(A: np.ndarray, sector: SectorBasis, atol: float = 1e-10) -> np.ndarray:
    """Restrict a number-conserving operator to one particle-number sector."""
    idx = sector.indices
    complement = np.setdiff1d(np.arange(A.shape[0]), idx, assume_unique=True)
    if len(complement) and np.abs(A[np.ix_(idx, complement)]).max() > atol:
        raise NonBlockDiagonal(
            f"operator couples the N_p={sector.N_p} sector to other sectors"
        )
    return A[np.ix_(idx, idx)]


def eigh(A: np.ndarray) -> EigenSystem:
    """Hermitian eigendecomposition with ascending eigenvalues.

    LAPACK convergence failures are surfaced, not masked.
    """
    w, Q = scipy.linalg.eigh(A)
    return EigenSystem(eigenvalues=w, eigenvectors=Q)


def evolve(rho: np.ndarray, eig: EigenSystem, t: float) -> np.ndarray:
    """rho(t) = U rho U† with U = Q exp(-i Lambda t) Q†."""
    Q = eig.eigenvectors
    phases = np.exp(-1j * eig.eigenvalues * t)
    U = (Q * phases) @ Q.conj().T
    return U @ rho @ U.conj().T


def evolve_in_eigenbasis(rho_eig: np.ndarray, eigenvalues: np.ndarray, t: float) -> np.ndarray:
    """Elementwise phase evolution of a state already expressed in the
    eigenbasis: rho_mn <- exp(-i (E_m - E_n) t) rho_mn."""
    phases = np.exp(-1j * eigenvalues * t)
    return rho_eig * np.outer(phases, phases.conj())


def partial_trace_site1(rho: np.ndarray) -> np.ndarray:
    """Trace out site 1 (the fastest basis index)."""
    dim = rho.shape[0]
    half = dim // 2
    r = rho.reshape(half, 2, half, 2)
    return np.trace(r, axis1=1, axis2=3)


def inject_site1(rho_in: np.ndarray, rho_rest: np.ndarray) -> np.ndarray:
    """Tensor product with site 1 as the first factor.

    Site 1 occupies the lowest bit, so the matrix realization is
    kron(rho_rest, rho_in).
    """
    if rho_in.shape != (2, 2):
        raise ValueError("site-1 state must be 2x2")
    return np.kron(rho_rest, rho_in)


def expectation(rho: np.ndarray, A: np.ndarray, imag_atol: float = 1e-9) -> float:
    """Re Tr(rho A); asserts the imaginary part is negligible."""
    if rho.shape != A.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {A.shape}")
    val = np.sum(rho * A.T)
    assert abs(val.imag) <= imag_atol, f"Tr(rho A) has imaginary part {val.imag}"
    return val.real


def check_hermitian(A: np.ndarray, rtol: float = 1e-12) -> None:
    scale = max(np.abs(A).max(), 1e-300)
    defect = np.abs(A - A.conj().T).max()
    if defect > rtol * scale:
        raise ValueError(f"Hermiticity defect {defect:.3e} exceeds {rtol}*scale")


def check_density(rho: np.ndarray, atol: float = 1e-9, psd: bool = False) -> None:
    if abs(np.trace(rho).real - 1.0) > atol or abs(np.trace(rho).imag) > atol:
        raise ValueError(f"trace {np.trace(rho)} is not 1 within {atol}")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise ValueError("density matrix is not Hermitian")
    if psd:
        w = scipy.linalg.eigvalsh(rho)
        if w[0] < -atol:
            raise ValueError(f"min eigenvalue {w[0]:.3e} below -{atol}")


def rehermitize(rho: np.ndarray) -> np.ndarray:
    """Numerical hygiene after an injection step: symmetrize and fix the
    trace; bounds drift over long runs without per-step eigendecompositions."""
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real
