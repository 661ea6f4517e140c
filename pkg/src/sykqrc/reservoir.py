"""Quantum-reservoir state machine: site-1 input injection, unitary
evolution between inputs, virtual-node readout of site occupations, and
echo-state-property convergence measurements.

The update per input u is the CPTP map
    rho <- U [ rho_in(u) (x) Tr_1(rho) ] U†
with U the propagator over one input interval; occupations <n_i> are
read at the V virtual-node times t_v = v*dt_in/V, v = 1..V.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hilbert
from .hilbert import EigenSystem, FockSpace


@dataclass
class ReservoirConfig:
    """Reservoir backend and readout layout.

    backend 'hamiltonian' evolves in the eigenbasis of `eig`; backend
    'haar' applies `unitary` once per virtual substep (so the per-input
    propagator is U^V, again Haar in law).  With haar_redraw_per_step a
    fresh Haar unitary is drawn from the step rng at every input.
    """

    N: int
    dt_in: float = 1.0
    V: int = 10
    noise_sigma: float = 0.0
    backend: str = 'hamiltonian'
    eig: EigenSystem | None = None
    unitary: np.ndarray | None = None
    haar_redraw_per_step: bool = False
    _engine: "ReservoirEngine | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.V < 1:
            raise ValueError("V must be >= 1")
        if self.backend == 'hamiltonian':
            if self.dt_in <= 0:
                raise ValueError("dt_in must be positive")
            if self.eig is None:
                raise ValueError("hamiltonian backend needs an EigenSystem")
        elif self.backend == 'haar':
            if self.unitary is None and not self.haar_redraw_per_step:
                raise ValueError("haar backend needs a unitary")
        else:
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def n_features(self) -> int:
        return self.N * self.V + 1

    def engine(self) -> "ReservoirEngine":
        if self._engine is None:
            self._engine = ReservoirEngine(self)
        return self._engine


@dataclass
class Trajectory:
    features: np.ndarray            # (steps, N*V + 1)
    final_state: np.ndarray
    n_inputs: int
    trace: np.ndarray | None = None  # (steps, V+1, N) occupations incl. v=0


def encode_input(u: float) -> np.ndarray:
    """Pure site-1 state sqrt(1-u)|0> + sqrt(u)|1> as a 2x2 density matrix."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"input {u} outside [0, 1]")
    psi = np.array([np.sqrt(1.0 - u), np.sqrt(u)], dtype=complex)
    return np.outer(psi, psi.conj())


class ReservoirEngine:
    """Precomputed kernels for one reservoir realization.

    For the hamiltonian backend the state is carried through each input
    interval in the eigenbasis: evolution is elementwise phase
    multiplication, with number operators transformed once up front.
    Results match direct unitary conjugation (see tests).
    """

    def __init__(self, cfg: ReservoirConfig):
        self.cfg = cfg
        self.space = FockSpace(cfg.N)
        dim = self.space.dim
        self._occ_bits = hilbert.occupation_bits(self.space)  # (N, dim)
        if cfg.backend == 'hamiltonian':
            if cfg.eig.dim != dim:
                raise ValueError("eigensystem dimension does not match N")
            Q = cfg.eig.eigenvectors
            self._Q = Q
            self._Qd = Q.conj().T
            E = cfg.eig.eigenvalues
            t_v = cfg.dt_in * np.arange(1, cfg.V + 1) / cfg.V
            dE = np.subtract.outer(E, E)
            self._phase_stack = np.exp(-1j * t_v[:, None, None] * dE)  # (V, dim, dim)
            # number operators in the eigenbasis
            self._n_eig = np.stack([(self._Qd * self._occ_bits[i]) @ Q
                                    for i in range(cfg.N)])
        else:
            self._unitary = cfg.unitary

    def step(self, state: np.ndarray, u: float, rng: np.random.Generator,
             record_v0: bool = False):
        """One injection + evolution; returns (state', features[, v0 occ])."""
        cfg = self.cfg
        rho = hilbert.inject_site1(encode_input(u), hilbert.partial_trace_site1(state))
        occ0 = None
        if record_v0:
            occ0 = self._occ_bits @ np.diag(rho).real

        if cfg.backend == 'hamiltonian':
            rho_eig = self._Qd @ rho @ self._Q
            stack = rho_eig[None, :, :] * self._phase_stack
            occ = np.einsum('vmn,inm->vi', stack, self._n_eig).real
            state_out = self._Q @ stack[-1] @ self._Qd
        else:
            U = self._unitary
            if cfg.haar_redraw_per_step:
                from .ensembles import sample_haar_unitary
                U = sample_haar_unitary(self.space.dim, rng)
            occ = np.empty((cfg.V, cfg.N))
            for v in range(cfg.V):
                rho = U @ rho @ U.conj().T
                occ[v] = self._occ_bits @ np.diag(rho).real
            state_out = rho

        state_out = hilbert.rehermitize(state_out)
        occ = np.clip(occ, 0.0, 1.0)
        feat = np.empty(cfg.n_features)
        noisy = occ
        if cfg.noise_sigma > 0:
            # measurement noise on the features only, never on the state
            sigma_i = cfg.noise_sigma * np.sqrt(occ * (1.0 - occ))
            noisy = occ + rng.normal(size=occ.shape) * sigma_i
        feat[:-1] = noisy.ravel()
        feat[-1] = 1.0
        if record_v0:
            return state_out, feat, occ0
        return state_out, feat


def step(state: np.ndarray, u: float, cfg: ReservoirConfig,
         rng: np.random.Generator):
    return cfg.engine().step(state, u, rng)


def run_sequence(inputs, cfg: ReservoirConfig, initial: np.ndarray,
                 rng: np.random.Generator, record_trace: bool = False,
                 hygiene_interval: int = 0) -> Trajectory:
    """Fold step over an input sequence.

    hygiene_interval > 0 turns on periodic positivity/trace spot checks
    (expensive, off by default).
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.size == 0:
        raise ValueError("inputs must be nonempty")
    engine = cfg.engine()
    feats = np.empty((len(inputs), cfg.n_features))
    trace = np.empty((len(inputs), cfg.V + 1, cfg.N)) if record_trace else None
    state = initial
    for k, u in enumerate(inputs):
        if record_trace:
            state, feat, occ0 = engine.step(state, u, rng, record_v0=True)
            trace[k, 0] = occ0
            trace[k, 1:] = np.clip(feat[:-1].reshape(cfg.V, cfg.N), 0, 1)
        else:
            state, feat = engine.step(state, u, rng)
        feats[k] = feat
        if hygiene_interval and (k + 1) % hygiene_interval == 0:
            hilbert.check_density(state, atol=1e-8, psd=True)
    return Trajectory(features=feats, final_state=state, n_inputs=len(inputs),
                      trace=trace)


def esp_distance_series(cfg: ReservoirConfig, inputs, rhoA0: np.ndarray,
                        rhoB0: np.ndarray,
                        rng: np.random.Generator | None = None) -> np.ndarray:
    """Frobenius distance ||rho_A - rho_B|| after each injection+evolution
    step, both trajectories driven by the same input sequence."""
    inputs = np.asarray(inputs, dtype=float)
    engine = cfg.engine()
    if rng is None:
        rng = np.random.default_rng(0)
    a, b = rhoA0, rhoB0
    out = np.empty(len(inputs))
    for k, u in enumerate(inputs):
        a, _ = engine.step(a, u, rng)
        b, _ = engine.step(b, u, rng)
        out[k] = np.linalg.norm(a - b)
    return out
