"""Experiment orchestration: config handling, deterministic seed
derivation, realization sweeps over dt_in / kappa2-J4 ratio / task
parameters, aggregation, and CSV/JSON emission.

Realizations are the unit of parallelism: every job is fully determined
by (master_seed, realization index, role tag), so permuting execution
order never changes a per-point result.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import chaoskit, ensembles, hilbert, reservoir, tasks
from .ensembles import ModelSpec
from .reservoir import ReservoirConfig
from .tasks import SplitSpec, TaskSpec

SCHEMA_VERSION = 1
CODE_VERSION = "0.1.0"

SWEEP_AXES = ('dt_in', 'kappa_ratio', 'delay', 'order', 'sigma', 'system_size')
# axes whose grid points share one trajectory per realization
_POST_HOC_AXES = ('delay', 'order', 'sigma')

SFF_T_RANGE = (1e-2, 1e4)


@dataclass
class ExperimentConfig:
    model: ModelSpec = field(default_factory=lambda: ModelSpec(N=6, J4=1.0))
    dt_in: float = 1.0
    V: int = 10
    noise_sigma: float = 0.0
    backend: str = 'hamiltonian'
    haar_redraw_per_step: bool = False
    task: TaskSpec = field(default_factory=lambda: tasks.narma_task(2))
    split: SplitSpec = field(default_factory=lambda: SplitSpec(500, 1000, 1000))
    sweep_name: str = 'dt_in'
    sweep_values: tuple = (1.0,)
    include_haar_baseline: bool = False
    realizations: int = 20
    master_seed: int = 0
    output_dir: str | None = None
    threads: int = 1
    central_fraction: float = 0.5
    hist_bins: int = 40
    sff_t_points: int = 240
    esp_pairs: int = 100
    esp_steps: int = 500
    trace_steps: int = 20
    ridge_lambda: float | None = None

    def __post_init__(self):
        if self.sweep_name not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.sweep_name!r}")
        if not self.sweep_values:
            raise ValueError("sweep grid must be nonempty")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.sweep_name == 'kappa_ratio' and not self.model.normalize:
            # fair comparison across coupling strengths requires the
            # spectral-norm rescaling
            self.model = dataclasses.replace(self.model, normalize=True)

    def model_at(self, value) -> ModelSpec:
        if self.sweep_name == 'kappa_ratio':
            return dataclasses.replace(self.model, kappa2=float(value) * self.model.J4)
        if self.sweep_name == 'system_size':
            return dataclasses.replace(self.model, N=int(value))
        return self.model

    def task_at(self, value) -> TaskSpec:
        if self.sweep_name == 'delay':
            return dataclasses.replace(self.task, d=int(value))
        if self.sweep_name == 'order':
            return dataclasses.replace(self.task, n=int(value))
        return self.task

    def dt_at(self, value) -> float:
        return float(value) if self.sweep_name == 'dt_in' else self.dt_in

    def sigma_at(self, value) -> float:
        return float(value) if self.sweep_name == 'sigma' else self.noise_sigma


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d['schema_version'] = SCHEMA_VERSION
    d['sweep_values'] = list(cfg.sweep_values)
    return d


def config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    d.pop('schema_version', None)
    if isinstance(d.get('model'), dict):
        d['model'] = ModelSpec(**d['model'])
    if isinstance(d.get('task'), dict):
        t = dict(d['task'])
        for key in ('input_range', 'narma_constants'):
            if key in t and t[key] is not None:
                t[key] = tuple(t[key])
        d['task'] = TaskSpec(**t)
    if isinstance(d.get('split'), dict):
        d['split'] = SplitSpec(**d['split'])
    d['sweep_values'] = tuple(d['sweep_values'])
    return ExperimentConfig(**d)


def load_config(path) -> ExperimentConfig:
    with open(path) as f:
        return config_from_dict(json.load(f))


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, 'w') as f:
        json.dump(config_to_dict(cfg), f, indent=2)


def derive_seed(master_seed: int, realization_index: int, role_tag: str) -> int:
    """Deterministic, collision-resistant 64-bit seed for one job."""
    payload = f"{master_seed}|{realization_index}|{role_tag}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], 'big')


def _rng(cfg: ExperimentConfig, index: int, role: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(cfg.master_seed, index, role))


# ---------------------------------------------------------------------------
# CSV / manifest plumbing

def _write_csv(path, header, rows):
    import csv
    with open(path, 'w', newline='') as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


class ManifestWriter:
    def __init__(self, cfg: ExperimentConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.files: list[str] = []
        self.per_point: list[dict] = []
        self.t0 = time.time()

    def emit(self, name, header, rows) -> str | None:
        if self.cfg.output_dir is None:
            return None
        os.makedirs(self.cfg.output_dir, exist_ok=True)
        path = os.path.join(self.cfg.output_dir, name)
        _write_csv(path, header, rows)
        self.files.append(name)
        return path

    def close(self):
        if self.cfg.output_dir is None:
            return
        manifest = {
            'command': self.command,
            'code_version': CODE_VERSION,
            'thread_count': self.cfg.threads,
            'wall_time_s': time.time() - self.t0,
            'config': config_to_dict(self.cfg),
            'files': self.files,
            'per_point': self.per_point,
        }
        path = os.path.join(self.cfg.output_dir, f"manifest_{self.command}.json")
        with open(path, 'w') as f:
            json.dump(manifest, f, indent=2, default=float)


def _aggregate(values: np.ndarray) -> dict:
    values = np.asarray(values, dtype=float)
    ok = values[np.isfinite(values)]
    n = len(ok)
    return {
        'mean': float(ok.mean()) if n else float('nan'),
        'std': float(ok.std(ddof=1)) if n > 1 else float('nan'),
        'stderr': float(ok.std(ddof=1) / np.sqrt(n)) if n > 1 else float('nan'),
        'median': float(np.median(ok)) if n else float('nan'),
        'n': n,
        'failures': int(len(values) - n),
    }


def _point_tag(value) -> str:
    return repr(float(value)) if isinstance(value, (int, float, np.floating)) else str(value)


# ---------------------------------------------------------------------------
# Spectral sweeps

def _sector_spectra(cfg: ExperimentConfig, value, n_realizations: int):
    spec = cfg.model_at(value)
    space = hilbert.FockSpace(spec.N)
    sector = hilbert.sector_basis(space, spec.N // 2)
    spectra = []
    for r in range(n_realizations):
        # keyed by realization only: grid points share paired coupling draws
        couplings = ensembles.sample_couplings(spec, _rng(cfg, r, "model"))
        H = ensembles.assemble_sector_hamiltonian(couplings, spec, sector)
        spectra.append(np.sort(np.linalg.eigvalsh(H)))
    return spectra, sector


def run_levels(cfg: ExperimentConfig):
    """Level-spacing-ratio sweep: per grid point, <r> over the central
    window plus a P(r) histogram of the pooled ratios."""
    writer = ManifestWriter(cfg, 'levels')
    results = {'values': list(cfg.sweep_values), 'mean_r': [], 'std': [],
               'stderr': [], 'histograms': {}}
    for value in cfg.sweep_values:
        spectra, _ = _sector_spectra(cfg, value, cfg.realizations)
        per_real = []
        pooled = []
        for w in spectra:
            st = chaoskit.spacing_ratios(w, cfg.central_fraction, bins=cfg.hist_bins)
            per_real.append(st.mean_r)
            pooled.append(st.ratios)
        agg = _aggregate(np.array(per_real))
        results['mean_r'].append(agg['mean'])
        results['std'].append(agg['std'])
        results['stderr'].append(agg['stderr'])
        edges = np.linspace(0, 1, cfg.hist_bins + 1)
        dens, _ = np.histogram(np.concatenate(pooled), bins=edges, density=True)
        results['histograms'][value] = (edges, dens)
        writer.per_point.append({'value': value, **agg})
        writer.emit(f"levels_hist_{_point_tag(value)}.csv",
                    ['r_lo', 'r_hi', 'density'],
                    [(edges[i], edges[i + 1], dens[i]) for i in range(len(dens))])
    writer.emit("levels.csv",
                [cfg.sweep_name, 'mean_r', 'std', 'stderr', 'n_realizations'],
                [(v, m, s, se, cfg.realizations)
                 for v, m, s, se in zip(results['values'], results['mean_r'],
                                        results['std'], results['stderr'])])
    if cfg.sweep_name == 'kappa_ratio':
        results['boundaries'] = chaoskit.chaos_boundaries(
            np.array(cfg.sweep_values, dtype=float), np.array(results['mean_r']))
    writer.close()
    return results


def run_sff(cfg: ExperimentConfig):
    """Spectral form factor per grid point on a log time grid, with the
    plateau-time estimate."""
    writer = ManifestWriter(cfg, 'sff')
    t_grid = np.geomspace(SFF_T_RANGE[0], SFF_T_RANGE[1], cfg.sff_t_points)
    results = {'values': list(cfg.sweep_values), 't_grid': t_grid,
               'curves': [], 'plateau_times': [], 'sector_dims': []}
    for value in cfg.sweep_values:
        spectra, sector = _sector_spectra(cfg, value, cfg.realizations)
        curve = chaoskit.sff(spectra, t_grid)
        try:
            t_p = chaoskit.plateau_time(curve)
        except chaoskit.NotSaturated:
            t_p = float('nan')
        results['curves'].append(curve)
        results['plateau_times'].append(t_p)
        results['sector_dims'].append(sector.dim_sector)
        writer.per_point.append({'value': value, 'plateau_time': t_p,
                                 'sector_dim': sector.dim_sector,
                                 'n': cfg.realizations})
        writer.emit(f"sff_{_point_tag(value)}.csv", ['t', 'K'],
                    list(zip(t_grid, curve.K)))
    writer.emit("sff_plateau.csv",
                [cfg.sweep_name, 't_plateau', 'sector_dim', 'n_realizations'],
                [(v, tp, d, cfg.realizations)
                 for v, tp, d in zip(results['values'], results['plateau_times'],
                                     results['sector_dims'])])
    writer.close()
    return results


# ---------------------------------------------------------------------------
# QRC sweeps

def _build_reservoir(cfg: ExperimentConfig, value, r: int) -> ReservoirConfig:
    spec = cfg.model_at(value)
    if cfg.backend == 'haar':
        space = hilbert.FockSpace(spec.N)
        U = ensembles.sample_haar_unitary(space.dim, _rng(cfg, r, "haar"))
        return ReservoirConfig(N=spec.N, dt_in=cfg.dt_at(value), V=cfg.V,
                               noise_sigma=0.0, backend='haar', unitary=U,
                               haar_redraw_per_step=cfg.haar_redraw_per_step)
    couplings = ensembles.sample_couplings(spec, _rng(cfg, r, "model"))
    H, _ = ensembles.assemble_hamiltonian(couplings, spec, hilbert.FockSpace(spec.N))
    return ReservoirConfig(N=spec.N, dt_in=cfg.dt_at(value), V=cfg.V,
                           noise_sigma=0.0, backend='hamiltonian',
                           eig=hilbert.eigh(H))


def _noiseless_trajectory(cfg: ExperimentConfig, value, r: int):
    """One realization's input sequence and noise-free feature matrix."""
    task = cfg.task_at(value)
    rcfg = _build_reservoir(cfg, value, r)
    u_raw, u_enc = tasks.gen_inputs(task, cfg.split.total, _rng(cfg, r, "inputs"))
    initial = ensembles.sample_random_density(hilbert.FockSpace(rcfg.N),
                                              _rng(cfg, r, "init"))
    traj = reservoir.run_sequence(u_enc, rcfg, initial, _rng(cfg, r, "evolve"))
    return u_raw, traj.features


def _apply_feature_noise(features: np.ndarray, sigma: float,
                         rng: np.random.Generator) -> np.ndarray:
    if sigma <= 0:
        return features
    occ = features[:, :-1]
    noisy = features.copy()
    noisy[:, :-1] = occ + rng.normal(size=occ.shape) * (
        sigma * np.sqrt(np.clip(occ * (1.0 - occ), 0.0, None)))
    return noisy


def _qrc_job(args):
    cfg_dict, value, r = args
    cfg = config_from_dict(cfg_dict)
    try:
        if cfg.sweep_name in _POST_HOC_AXES:
            u_raw, features = _noiseless_trajectory(cfg, cfg.sweep_values[0], r)
            out = []
            for v in cfg.sweep_values:
                feats = _apply_feature_noise(
                    features, cfg.sigma_at(v),
                    _rng(cfg, r, f"noise|{_point_tag(v)}"))
                rec = tasks.evaluate(feats, u_raw, cfg.task_at(v), cfg.split,
                                     cfg.ridge_lambda)
                out.append(rec.value)
            return r, out
        u_raw, features = _noiseless_trajectory(cfg, value, r)
        feats = _apply_feature_noise(features, cfg.sigma_at(value),
                                     _rng(cfg, r, f"noise|{_point_tag(value)}"))
        rec = tasks.evaluate(feats, u_raw, cfg.task_at(value), cfg.split,
                             cfg.ridge_lambda)
        return r, rec.value
    except Exception as exc:  # per-realization failures are excluded, counted
        import traceback
        return r, RuntimeError(f"realization {r} failed: {exc}\n"
                               + traceback.format_exc())


def _run_jobs(job_args, threads: int):
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_qrc_job, job_args, chunksize=1))
    return [_qrc_job(a) for a in job_args]


def run_qrc_sweep(cfg: ExperimentConfig):
    """QRC performance sweep: per grid point, the task metric aggregated
    over realizations; optionally an extra Haar-baseline point.

    Model, input, and initial-state seeds are keyed by realization index
    (shared across grid points), so sweep comparisons are paired.
    """
    writer = ManifestWriter(cfg, 'qrc')
    cfg_dict = config_to_dict(cfg)
    n_points = len(cfg.sweep_values)
    table = np.full((n_points, cfg.realizations), np.nan)
    errors = []

    if cfg.sweep_name in _POST_HOC_AXES:
        job_args = [(cfg_dict, None, r) for r in range(cfg.realizations)]
        for r, out in _run_jobs(job_args, cfg.threads):
            if isinstance(out, Exception):
                errors.append(str(out))
                continue
            table[:, r] = out
    else:
        job_args = [(cfg_dict, v, r)
                    for v in cfg.sweep_values for r in range(cfg.realizations)]
        flat = _run_jobs(job_args, cfg.threads)
        for (args, (r, out)) in zip(job_args, flat):
            i = cfg.sweep_values.index(args[1])
            if isinstance(out, Exception):
                errors.append(str(out))
                continue
            table[i, r] = out

    results = {'values': list(cfg.sweep_values), 'metric': cfg.task.metric_name,
               'per_realization': table, 'aggregates': [], 'errors': errors}
    rows = []
    for i, v in enumerate(cfg.sweep_values):
        agg = _aggregate(table[i])
        results['aggregates'].append(agg)
        writer.per_point.append({'value': v, **agg})
        rows.append((v, cfg.task.kind, cfg.task.d, cfg.task.n,
                     cfg.task.metric_name, agg['mean'], agg['std'],
                     agg['stderr'], agg['median'], agg['n']))

    if cfg.include_haar_baseline:
        haar_values = (cfg.sweep_values if cfg.sweep_name in _POST_HOC_AXES
                       else cfg.sweep_values[:1])
        hcfg = dataclasses.replace(cfg, backend='haar',
                                   include_haar_baseline=False,
                                   sweep_values=haar_values,
                                   output_dir=None)
        hres = run_qrc_sweep(hcfg)
        if cfg.sweep_name in _POST_HOC_AXES:
            results['haar'] = hres['aggregates']
        else:
            # a Haar propagator has no intrinsic time scale: one baseline point
            hvals = hres['per_realization'][0]
            results['haar'] = [_aggregate(hvals)] * n_points
            results['haar_per_realization'] = hvals
        for i, v in enumerate(cfg.sweep_values):
            agg = results['haar'][i]
            rows.append((v, cfg.task.kind, cfg.task.d, cfg.task.n,
                         cfg.task.metric_name + '_haar', agg['mean'],
                         agg['std'], agg['stderr'], agg['median'], agg['n']))

    writer.emit("qrc_sweep.csv",
                [cfg.sweep_name, 'task', 'd', 'n', 'metric', 'mean', 'std',
                 'stderr', 'median', 'n_realizations'], rows)
    writer.close()
    return results


def _esp_job(args):
    cfg_dict, value, pair = args
    cfg = config_from_dict(cfg_dict)
    spec = cfg.model_at(value)
    space = hilbert.FockSpace(spec.N)
    sector = hilbert.sector_basis(space, spec.N // 2)
    tag = _point_tag(value)
    rcfg = _build_reservoir(cfg, value, pair)
    u_raw, u_enc = tasks.gen_inputs(cfg.task, cfg.esp_steps,
                                    _rng(cfg, pair, "inputs"))
    rho_a = ensembles.sample_random_density(sector, _rng(cfg, pair, "espA"))
    rho_b = ensembles.sample_random_density(sector, _rng(cfg, pair, "espB"))
    return reservoir.esp_distance_series(rcfg, u_enc, rho_a, rho_b,
                                         _rng(cfg, pair, f"noise|{tag}"))


def run_esp(cfg: ExperimentConfig):
    """Echo-state-property distance curves: pairs of half-filling-sector
    initial states driven by a common input sequence; mean and median
    across pairs are reported separately (they can differ by orders of
    magnitude for the integrable model)."""
    writer = ManifestWriter(cfg, 'esp')
    cfg_dict = config_to_dict(cfg)
    results = {'values': list(cfg.sweep_values), 'mean': [], 'median': []}
    for value in cfg.sweep_values:
        job_args = [(cfg_dict, value, p) for p in range(cfg.esp_pairs)]
        if cfg.threads > 1:
            with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
                series = list(pool.map(_esp_job, job_args, chunksize=1))
        else:
            series = [_esp_job(a) for a in job_args]
        dist = np.stack(series)                    # (pairs, steps)
        mean_k = dist.mean(axis=0)
        median_k = np.median(dist, axis=0)
        results['mean'].append(mean_k)
        results['median'].append(median_k)
        writer.per_point.append({'value': value,
                                 'final_mean': float(mean_k[-1]),
                                 'final_median': float(median_k[-1]),
                                 'n_pairs': cfg.esp_pairs})
        writer.emit(f"esp_{_point_tag(value)}.csv",
                    ['k', 'mean_distance', 'median_distance'],
                    [(k + 1, mean_k[k], median_k[k]) for k in range(len(mean_k))])
    writer.close()
    return results


def run_trace(cfg: ExperimentConfig):
    """Readout-trace dump for one realization: occupations at the virtual
    nodes v = 0..V over a short input window."""
    writer = ManifestWriter(cfg, 'trace')
    value = cfg.sweep_values[0]
    rcfg = _build_reservoir(cfg, value, 0)
    u_raw, u_enc = tasks.gen_inputs(cfg.task, cfg.trace_steps, _rng(cfg, 0, "inputs"))
    initial = ensembles.sample_random_density(hilbert.FockSpace(rcfg.N),
                                              _rng(cfg, 0, "init"))
    traj = reservoir.run_sequence(u_enc, rcfg, initial, _rng(cfg, 0, "evolve"),
                                  record_trace=True)
    rows = []
    for k in range(cfg.trace_steps):
        for v in range(cfg.V + 1):
            t = k * rcfg.dt_in + v * rcfg.dt_in / cfg.V
            for site in range(rcfg.N):
                rows.append((k, v, t, site + 1, traj.trace[k, v, site]))
    writer.emit("trace.csv", ['k', 'v', 't', 'site', 'occupation'], rows)
    writer.per_point.append({'value': value, 'steps': cfg.trace_steps})
    writer.close()
    return {'trace': traj.trace, 'inputs': u_enc, 'dt_in': rcfg.dt_in}
