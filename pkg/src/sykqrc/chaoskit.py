"""Random-matrix diagnostics: level-spacing-ratio statistics with
reference densities, the spectral form factor, plateau-time estimation,
and chaos-boundary detection on <r> curves.

No spectral unfolding anywhere: the form factor is evaluated on raw
spectra, including the disconnected part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MEAN_R = {
    'poisson': 0.3862,
    'goe': 0.5307,
    'gue': 0.5996,
    'gse': 0.6744,
}

# Dyson index and normalization of the Wigner-like ratio density
# (r + r^2)^beta / (1 + r + r^2)^(1 + 3 beta / 2).
_BETA = {'goe': 1, 'gue': 2, 'gse': 4}
_Z_BETA = {
    'goe': 8 / 27,
    'gue': 4 * math.pi / (81 * math.sqrt(3)),
    'gse': 4 * math.pi / (729 * math.sqrt(3)),
}

# Closed-form means of the folded ratio densities (min-ratio convention);
# these differ from the large-matrix ensemble constants above by a few 1e-3.
SURMISE_MEAN_R = {
    'poisson': 2 * math.log(2) - 1,
    'goe': 4 - 2 * math.sqrt(3),
    'gue': 2 * math.sqrt(3) / math.pi - 0.5,
    'gse': 32 * math.sqrt(3) / (15 * math.pi) - 0.5,
}


class TooFewLevels(ValueError):
    pass


class NotSaturated(RuntimeError):
    pass


@dataclass
class SpacingStats:
    ratios: np.ndarray
    mean_r: float
    central_fraction: float
    n_degenerate_discarded: int
    bin_edges: np.ndarray = field(default=None)
    densities: np.ndarray = field(default=None)


@dataclass
class SffCurve:
    t_grid: np.ndarray
    K: np.ndarray
    ensemble_size: int
    sector_dim: int


def spacing_ratios(evals: np.ndarray, central_fraction: float = 0.5,
                   bins: int = 40) -> SpacingStats:
    """r_n = min(s_n/s_{n+1}, s_{n+1}/s_n) on consecutive spacings inside
    the central window of the spectrum.

    The window keeps indices [floor(m*q/2), m - floor(m*q/2)) with
    q = 1 - central_fraction.  Ratio pairs where both spacings collapse
    below 1e-12 of the spectral span are discarded and counted.
    """
    if not 0 < central_fraction <= 1:
        raise ValueError("central_fraction must be in (0, 1]")
    evals = np.asarray(evals, dtype=float)
    m = len(evals)
    q = 1.0 - central_fraction
    lo = int(np.floor(m * q / 2))
    window = evals[lo:m - lo]
    if len(window) < 4:
        raise TooFewLevels(f"{len(window)} levels after truncation, need >= 4")
    s = np.diff(window)
    span = evals[-1] - evals[0]
    tiny = (s[:-1] < 1e-12 * span) & (s[1:] < 1e-12 * span)
    n_discarded = int(tiny.sum())
    s0, s1 = s[:-1][~tiny], s[1:][~tiny]
    with np.errstate(divide='ignore', invalid='ignore'):
        ratios = np.minimum(s0 / s1, s1 / s0)
    ratios = ratios[np.isfinite(ratios)]
    edges = np.linspace(0.0, 1.0, bins + 1)
    dens, _ = np.histogram(ratios, bins=edges, density=True)
    return SpacingStats(ratios=ratios, mean_r=float(ratios.mean()),
                        central_fraction=central_fraction,
                        n_degenerate_discarded=n_discarded,
                        bin_edges=edges, densities=dens)


def reference_pdf(rmt_class: str, r) -> np.ndarray:
    """Folded ratio density P(r) on [0, 1] for the min-ratio convention.

    Poisson: 2/(1+r)^2.  Wigner classes: (2/Z_beta) (r+r^2)^beta /
    (1+r+r^2)^(1+3 beta/2); the factor 2 folds the unfolded density by
    its r -> 1/r symmetry.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 1):
        raise ValueError("r must lie in [0, 1]")
    key = rmt_class.lower()
    if key == 'poisson':
        return 2.0 / (1.0 + r) ** 2
    if key not in _BETA:
        raise ValueError(f"unknown class {rmt_class!r}")
    beta = _BETA[key]
    return (2.0 / _Z_BETA[key]) * (r + r * r) ** beta / (1 + r + r * r) ** (1 + 1.5 * beta)


def sff(eval_sets, t_grid: np.ndarray) -> SffCurve:
    """Ensemble-averaged spectral form factor
    K(t) = mean over realizations of |sum_m exp(i E_m t)|^2 / dim^2."""
    eval_sets = [np.asarray(e, dtype=float) for e in eval_sets]
    if not eval_sets:
        raise ValueError("empty ensemble")
    dim = len(eval_sets[0])
    if any(len(e) != dim for e in eval_sets):
        raise ValueError("all spectra must share one sector dimension")
    t_grid = np.asarray(t_grid, dtype=float)
    acc = np.zeros(len(t_grid))
    for e in eval_sets:
        z = np.exp(1j * np.outer(t_grid, e)).sum(axis=1)
        acc += (z.real ** 2 + z.imag ** 2)
    K = acc / (len(eval_sets) * dim ** 2)
    return SffCurve(t_grid=t_grid, K=K, ensemble_size=len(eval_sets), sector_dim=dim)


def plateau_time(curve: SffCurve, band_factor: float = 1.3) -> float:
    """Earliest grid time after the global minimum of K beyond which K
    stays within [p/band, band*p] of the plateau level p = 1/dim.

    The band factor and the post-dip gating are tunables; they reject
    pre-dip grid points where K passes through the plateau level.
    """
    p = 1.0 / curve.sector_dim
    K = curve.K
    i_min = int(np.argmin(K))
    inside = (K >= p / band_factor) & (K <= p * band_factor)
    for i in range(i_min, len(K)):
        if inside[i:].all():
            return float(curve.t_grid[i])
    raise NotSaturated("SFF never settles into the plateau band on this grid")


def chaos_boundaries(kappa_grid: np.ndarray, mean_r_values: np.ndarray,
                     tol: float = 1e-2) -> tuple[float | None, float | None]:
    """Boundary couplings where <r> leaves the Wigner-Dyson value
    (scanning up from small kappa) and reaches the Poisson value
    (scanning down from large kappa).  Absent boundaries return None."""
    kappa_grid = np.asarray(kappa_grid, dtype=float)
    mean_r_values = np.asarray(mean_r_values, dtype=float)
    if np.any(np.diff(kappa_grid) <= 0):
        raise ValueError("kappa grid must be strictly ascending")
    kappa_wd = None
    for k, r in zip(kappa_grid, mean_r_values):
        if abs(r - MEAN_R['gue']) < tol:
            kappa_wd = float(k)
        else:
            break
    kappa_poi = None
    for k, r in zip(kappa_grid[::-1], mean_r_values[::-1]):
        if abs(r - MEAN_R['poisson']) < tol:
            kappa_poi = float(k)
        else:
            break
    return kappa_wd, kappa_poi
