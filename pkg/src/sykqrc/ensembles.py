"""Random-coupling sampling and Hamiltonian assembly for the SYK4/SYK2
interpolated model, plus Haar unitaries and random density matrices.

Couplings follow the symmetry relations kappa_ij = kappa_ji*,
J_ijkl = J_klij*, J_ijkl = -J_jikl = -J_ijlk, with variances
|J_ijkl|^2 = J4^2/N^3 and |kappa_ij|^2 = kappa2^2/(2N).  A zero-mean
complex Gaussian of variance v draws real and imaginary parts
independently from Normal(0, v/2); entries constrained real draw
Normal(0, v).
"""

from __future__ import annotations

import csv
import functools
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import hilbert
from .hilbert import FockSpace, SectorBasis


@dataclass(frozen=True)
class ModelSpec:
    N: int
    J4: float = 1.0
    kappa2: float = 0.0
    phs_correction: bool = False
    normalize: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.J4 < 0 or self.kappa2 < 0:
            raise ValueError("coupling scales must be nonnegative")
        if self.J4 == 0 and self.kappa2 == 0:
            raise ValueError("at least one of J4, kappa2 must be positive")


@dataclass(frozen=True)
class CouplingSet:
    """Sampled coupling tensors.

    J is stored as the fully extended antisymmetric/Hermitian (N,N,N,N)
    tensor; kappa as the Hermitian (N,N) matrix.  Canonical independent
    entries (i<j, k<l, pair-lex ordered) are recoverable for dump/load.
    """

    N: int
    J4: float
    kappa2: float
    J: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    seed: int = 0


def site_pairs(N: int) -> list[tuple[int, int]]:
    """Ordered pairs (i, j) with i < j, 0-based, lexicographic."""
    return list(itertools.combinations(range(N), 2))


def canonical_j_slots(N: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Independent J slots: pairs p=(i,j), q=(k,l) with p <= q lexicographically."""
    pairs = site_pairs(N)
    return [(p, q) for a, p in enumerate(pairs) for q in pairs[a:]]


def sample_couplings(spec: ModelSpec, rng: np.random.Generator) -> CouplingSet:
    N = spec.N
    J = np.zeros((N, N, N, N), dtype=complex)
    var_j = spec.J4 ** 2 / N ** 3
    for (i, j), (k, l) in canonical_j_slots(N):
        if (i, j) == (k, l):
            # self-conjugate slot: J_ijij = J_ijij* forces a real draw
            z = rng.normal(0.0, np.sqrt(var_j)) if var_j > 0 else 0.0
        else:
            z = (rng.normal(0.0, np.sqrt(var_j / 2)) +
                 1j * rng.normal(0.0, np.sqrt(var_j / 2))) if var_j > 0 else 0.0
        for (a, b), (c, d), v in (((i, j), (k, l), z), ((k, l), (i, j), np.conj(z))):
            J[a, b, c, d] = v
            J[b, a, c, d] = -v
            J[a, b, d, c] = -v
            J[b, a, d, c] = v

    kappa = np.zeros((N, N), dtype=complex)
    var_k = spec.kappa2 ** 2 / (2 * N)
    if var_k > 0:
        for i in range(N):
            kappa[i, i] = rng.normal(0.0, np.sqrt(var_k))
        for i, j in site_pairs(N):
            z = rng.normal(0.0, np.sqrt(var_k / 2)) + 1j * rng.normal(0.0, np.sqrt(var_k / 2))
            kappa[i, j] = z
            kappa[j, i] = np.conj(z)

    return CouplingSet(N=N, J4=spec.J4, kappa2=spec.kappa2, J=J, kappa=kappa,
                       seed=spec.seed)


def phs_correction_matrix(J: np.ndarray) -> np.ndarray:
    """One-body coefficient matrix of the particle-hole-symmetry restoring
    term: (1/2) sum_ijkl J_ijkl (d_ik c+_j c_l - d_il c+_j c_k
    - d_jk c+_i c_l + d_jl c+_i c_k)."""
    t1 = np.einsum('ijil->jl', J)
    t2 = np.einsum('ijki->jk', J)
    t3 = np.einsum('ijjl->il', J)
    t4 = np.einsum('ijkj->ik', J)
    return 0.5 * (t1 - t2 - t3 + t4)


@functools.lru_cache(maxsize=8)
def _pair_product_operators(N: int):
    """Stacks over ordered pairs p=(i,j), i<j:
    A_p = c+_i c+_j (raises N_p by 2) and B_p = c_i c_j (lowers by 2)."""
    c = hilbert.annihilation_operators(N)
    pairs = site_pairs(N)
    B = np.stack([c[i] @ c[j] for i, j in pairs])
    A = np.stack([c[i].conj().T @ c[j].conj().T for i, j in pairs])
    return A, B


def _j_pair_matrix(couplings: CouplingSet) -> np.ndarray:
    """J restricted to ordered-pair slots: Jpq = J[i,j,k,l] for p=(i,j), q=(k,l)."""
    ii, jj = np.array(site_pairs(couplings.N)).T
    return couplings.J[ii[:, None], jj[:, None], ii[None, :], jj[None, :]]


def _effective_kappa(couplings: CouplingSet, spec: ModelSpec) -> np.ndarray:
    kappa = couplings.kappa
    if spec.phs_correction:
        kappa = kappa + phs_correction_matrix(couplings.J)
    return kappa


def assemble_hamiltonian(couplings: CouplingSet, spec: ModelSpec,
                         space: FockSpace) -> tuple[np.ndarray, float]:
    """Full-space Hamiltonian and its pre-normalization spectral norm.

    The unrestricted quadruple sum over the antisymmetric tensor reduces
    to 4x the sum over ordered pairs i<j, k<l.
    """
    if couplings.N != spec.N or spec.N != space.N:
        raise ValueError("inconsistent mode counts")
    c = hilbert.annihilation_operators(space.N)
    cdag = np.stack([m.conj().T for m in c])
    cstack = np.stack(c)

    kappa = _effective_kappa(couplings, spec)
    W = np.tensordot(kappa, cstack, axes=(1, 0))
    H = np.einsum('iab,ibc->ac', cdag, W)

    A, B = _pair_product_operators(space.N)
    Jpq = _j_pair_matrix(couplings)
    M = np.tensordot(Jpq, B, axes=(1, 0))
    H = H + 4.0 * np.einsum('pab,pbc->ac', A, M)

    spectral_norm = float(np.abs(scipy.linalg.eigvalsh(H)).max())
    if spec.normalize:
        if spectral_norm == 0.0:
            raise ValueError("cannot normalize a zero Hamiltonian")
        H = H / spectral_norm
    return H, spectral_norm


@functools.lru_cache(maxsize=16)
def _sector_blocks(N: int, N_p: int):
    """Sector-restricted operator stacks for fast ensemble sweeps:
    one-body blocks of c+_i c_j and two-body blocks of A_p B_q."""
    space = FockSpace(N)
    sec = hilbert.sector_basis(space, N_p)
    idx = sec.indices
    ds = len(idx)
    c = hilbert.annihilation_operators(N)

    blocks2 = np.empty((N, N, ds, ds), dtype=complex)
    for i in range(N):
        for j in range(N):
            blocks2[i, j] = (c[i].conj().T @ c[j])[np.ix_(idx, idx)]

    pairs = site_pairs(N)
    npair = len(pairs)
    blocks4 = np.zeros((npair, npair, ds, ds), dtype=complex)
    if N_p >= 2:
        lower = hilbert.sector_basis(space, N_p - 2).indices
        A, B = _pair_product_operators(N)
        Asub = A[:, idx][:, :, lower]
        Bsub = B[:, lower][:, :, idx]
        blocks4 = np.einsum('pab,qbc->pqac', Asub, Bsub)
    return blocks2, blocks4


def assemble_sector_hamiltonian(couplings: CouplingSet, spec: ModelSpec,
                                sector: SectorBasis) -> np.ndarray:
    """Hamiltonian block in one particle-number sector, built without
    touching the full 2^N space.  Agrees with assemble_hamiltonian +
    sector_project (up to the optional spectral-norm rescaling, which
    leaves spacing ratios invariant)."""
    blocks2, blocks4 = _sector_blocks(spec.N, sector.N_p)
    kappa = _effective_kappa(couplings, spec)
    H = np.tensordot(kappa, blocks2, axes=([0, 1], [0, 1]))
    Jpq = _j_pair_matrix(couplings)
    H = H + 4.0 * np.tensordot(Jpq, blocks4, axes=([0, 1], [0, 1]))
    return H


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Ginibre matrix with phase-fixed R diagonal."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def sample_random_density(target: FockSpace | SectorBasis,
                          rng: np.random.Generator) -> np.ndarray:
    """Normalized Wishart state GG†/Tr(GG†) on the full space or embedded
    in a particle-number sector (zeros outside)."""
    if isinstance(target, FockSpace):
        ds = target.dim
        g = (rng.standard_normal((ds, ds)) + 1j * rng.standard_normal((ds, ds)))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real
    ds = target.dim_sector
    g = (rng.standard_normal((ds, ds)) + 1j * rng.standard_normal((ds, ds)))
    block = g @ g.conj().T
    block = block / np.trace(block).real
    dim = 2 ** target.N
    rho = np.zeros((dim, dim), dtype=complex)
    rho[np.ix_(target.indices, target.indices)] = block
    return rho


def dump_couplings(couplings: CouplingSet, path) -> None:
    """CSV of canonical independent entries for cross-run reproducibility."""
    with open(path, 'w', newline='') as f:
        w = csv.writer(f)
        w.writerow(['kind', 'i', 'j', 'k', 'l', 're', 'im'])
        w.writerow(['meta', couplings.N, '', '', '', couplings.J4, couplings.kappa2])
        for (i, j), (k, l) in canonical_j_slots(couplings.N):
            v = couplings.J[i, j, k, l]
            w.writerow(['J', i, j, k, l, repr(float(v.real)), repr(float(v.imag))])
        for i in range(couplings.N):
            for j in range(i, couplings.N):
                v = couplings.kappa[i, j]
                w.writerow(['kappa', i, j, '', '',
                            repr(float(v.real)), repr(float(v.imag))])


def load_couplings(path) -> CouplingSet:
    with open(path, newline='') as f:
        rows = list(csv.reader(f))
    header, meta = rows[0], rows[1]
    assert header[0] == 'kind' and meta[0] == 'meta'
    N = int(meta[1])
    J4, kappa2 = float(meta[5]), float(meta[6])
    J = np.zeros((N, N, N, N), dtype=complex)
    kappa = np.zeros((N, N), dtype=complex)
    for row in rows[2:]:
        kind = row[0]
        if kind == 'J':
            i, j, k, l = (int(x) for x in row[1:5])
            z = float(row[5]) + 1j * float(row[6])
            for (a, b), (c, d), v in (((i, j), (k, l), z), ((k, l), (i, j), np.conj(z))):
                J[a, b, c, d] = v
                J[b, a, c, d] = -v
                J[a, b, d, c] = -v
                J[b, a, d, c] = v
        elif kind == 'kappa':
            i, j = int(row[1]), int(row[2])
            z = float(row[5]) + 1j * float(row[6])
            kappa[i, j] = z
            kappa[j, i] = np.conj(z)
    return CouplingSet(N=N, J4=J4, kappa2=kappa2, J=J, kappa=kappa)
