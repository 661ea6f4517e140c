"""Benchmark tasks (STM, nonlinear STM, NARMA-n, parity check with
temporal bias), linear readout training, and metrics (R^2, NMSE)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

NARMA_CONSTANTS = (0.3, 0.05, 1.5, 0.1)   # (alpha, beta, gamma, delta)


class Diverged(RuntimeError):
    pass


class ZeroVariance(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    """kind in {'stm', 'nlstm', 'narma', 'pc'}.

    d: delay (stm/nlstm); n: order (nlstm/narma/pc); b: temporal bias (pc);
    narma_constants: (alpha, beta, gamma, delta).
    Inputs are drawn uniformly on input_range (Bernoulli(1/2) for pc);
    encode_rescale maps them affinely onto [0, 1] for reservoir encoding
    while targets stay on the raw scale.
    """

    kind: str
    d: int = 0
    n: int = 1
    b: int = 0
    input_range: tuple[float, float] = (0.0, 1.0)
    encode_rescale: bool = False
    narma_constants: tuple[float, float, float, float] = NARMA_CONSTANTS

    def __post_init__(self):
        if self.kind not in ('stm', 'nlstm', 'narma', 'pc'):
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.d < 0 or self.n < 1 or self.b < 0:
            raise ValueError("need d >= 0, n >= 1, b >= 0")
        lo, hi = self.input_range
        if not lo < hi:
            raise ValueError("input_range must satisfy lo < hi")

    @property
    def metric_name(self) -> str:
        return 'nmse' if self.kind == 'narma' else 'r_squared'

    @property
    def history(self) -> int:
        """Steps whose target would reference pre-sequence inputs."""
        if self.kind in ('stm', 'nlstm'):
            return self.d
        if self.kind == 'pc':
            return self.n + self.b
        return 0


def narma_task(n: int) -> TaskSpec:
    return TaskSpec(kind='narma', n=n, input_range=(0.0, 0.2), encode_rescale=True)


def stm_task(d: int) -> TaskSpec:
    return TaskSpec(kind='stm', d=d)


@dataclass(frozen=True)
class SplitSpec:
    n_washout: int
    n_train: int
    n_test: int

    def __post_init__(self):
        if self.n_washout < 0 or self.n_train < 1 or self.n_test < 1:
            raise ValueError("need n_washout >= 0 and n_train, n_test >= 1")

    @property
    def total(self) -> int:
        return self.n_washout + self.n_train + self.n_test


@dataclass
class ReadoutWeights:
    w: np.ndarray
    ridge_lambda: float


@dataclass
class MetricsRecord:
    metric: str
    value: float
    train_value: float
    task: TaskSpec
    split: SplitSpec
    ridge_lambda: float


def gen_inputs(spec: TaskSpec, length: int, rng: np.random.Generator):
    """Raw input sequence plus its [0,1]-encoded version."""
    if length < 1:
        raise ValueError("length must be >= 1")
    lo, hi = spec.input_range
    if spec.kind == 'pc':
        u_raw = rng.integers(0, 2, size=length).astype(float)
        return u_raw, u_raw
    u_raw = rng.uniform(lo, hi, size=length)
    u_enc = (u_raw - lo) / (hi - lo) if spec.encode_rescale else u_raw
    return u_raw, u_enc


def target_stm(u_raw: np.ndarray, d: int):
    """y[k] = u[k-d]; the first d steps are invalid."""
    u_raw = np.asarray(u_raw, dtype=float)
    if d >= len(u_raw):
        raise ValueError(f"delay {d} >= sequence length {len(u_raw)}")
    y = np.empty_like(u_raw)
    y[d:] = u_raw[:len(u_raw) - d] if d else u_raw
    y[:d] = np.nan
    valid = np.ones(len(u_raw), dtype=bool)
    valid[:d] = False
    return y, valid


def target_nlstm(u_raw: np.ndarray, d: int, n: int):
    y, valid = target_stm(u_raw, d)
    return y ** n, valid


def target_narma(u_raw: np.ndarray, n: int,
                 consts: tuple[float, float, float, float] = NARMA_CONSTANTS,
                 guard: float = 1e3):
    """NARMA-n recursion with zero pre-history:
    y[k+1] = a*y[k] + b*y[k]*sum_{j=0}^{n-1} y[k-j] + c*u[k-n+1]*u[k] + d.
    """
    alpha, beta, gamma, delta = consts
    u = np.asarray(u_raw, dtype=float)
    m = len(u)
    y = np.zeros(m)
    for k in range(m - 1):
        window = y[max(0, k - n + 1):k + 1].sum()
        u_old = u[k - n + 1] if k - n + 1 >= 0 else 0.0
        y[k + 1] = alpha * y[k] + beta * y[k] * window + gamma * u_old * u[k] + delta
        if not np.isfinite(y[k + 1]) or abs(y[k + 1]) >= guard:
            raise Diverged(
                f"NARMA-{n} target exceeded {guard} at step {k + 1}; "
                "check the input range")
    return y, np.ones(m, dtype=bool)


def target_pc(u_binary: np.ndarray, n: int, b: int = 0):
    """Parity of n+1 inputs shifted back by the bias b:
    y[k] = (sum_{d=0}^{n} u[k-d-b]) mod 2."""
    u = np.asarray(u_binary)
    if not np.isin(u, (0, 1)).all():
        raise ValueError("parity-check inputs must be binary")
    m = len(u)
    first = n + b
    if first >= m:
        raise ValueError("parity window exceeds sequence length")
    y = np.full(m, np.nan)
    acc = np.zeros(m - first)
    for d in range(n + 1):
        sl = slice(first - d - b, m - d - b)
        acc += u[sl]
    y[first:] = acc % 2
    valid = np.ones(m, dtype=bool)
    valid[:first] = False
    return y, valid


def targets(spec: TaskSpec, u_raw: np.ndarray):
    if spec.kind == 'stm':
        return target_stm(u_raw, spec.d)
    if spec.kind == 'nlstm':
        return target_nlstm(u_raw, spec.d, spec.n)
    if spec.kind == 'narma':
        return target_narma(u_raw, spec.n, spec.narma_constants)
    return target_pc(u_raw, spec.n, spec.b)


def default_ridge_lambda(X: np.ndarray) -> float:
    # scale-free default: tiny relative to the Gram diagonal
    return 1e-8 * float(np.mean(np.sum(X * X, axis=0)))


def train_readout(X: np.ndarray, y: np.ndarray,
                  ridge_lambda: float = 0.0) -> ReadoutWeights:
    """w = argmin ||Xw - y||^2 + lambda ||w||^2.

    lambda = 0 uses an orthogonal-decomposition (minimum-norm) solve;
    lambda > 0 solves the regularized normal equations.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < X.shape[1]:
        import warnings
        warnings.warn(f"underdetermined readout: {X.shape[0]} rows for "
                      f"{X.shape[1]} features")
    if ridge_lambda == 0.0:
        w, *_ = scipy.linalg.lstsq(X, y)
    else:
        G = X.T @ X + ridge_lambda * np.eye(X.shape[1])
        w = scipy.linalg.solve(G, X.T @ y, assume_a='pos')
    return ReadoutWeights(w=w, ridge_lambda=ridge_lambda)


def r_squared(y: np.ndarray, y_target: np.ndarray) -> float:
    """Determination coefficient cov^2(y, y_target) / [var(y) var(y_target)]."""
    y = np.asarray(y, dtype=float)
    yt = np.asarray(y_target, dtype=float)
    vy, vt = y.var(), yt.var()
    if vy == 0.0 or vt == 0.0:
        raise ZeroVariance("R^2 undefined for a constant sequence")
    cov = np.mean((y - y.mean()) * (yt - yt.mean()))
    return float(cov * cov / (vy * vt))


def nmse(y: np.ndarray, y_target: np.ndarray) -> float:
    """||y - y_target||^2 / ||y_target||^2."""
    y = np.asarray(y, dtype=float)
    yt = np.asarray(y_target, dtype=float)
    denom = float(yt @ yt)
    if denom == 0.0:
        raise ZeroVariance("NMSE undefined for a zero-norm target")
    d = y - yt
    return float(d @ d) / denom


def evaluate(features: np.ndarray, u_raw: np.ndarray, task: TaskSpec,
             split: SplitSpec, ridge_lambda: float | None = None) -> MetricsRecord:
    """Train a linear readout on the train window, score on the test window.

    Steps whose target references pre-sequence inputs are excluded, not
    zero-filled; with n_washout >= task.history nothing is lost.
    """
    features = np.asarray(features, dtype=float)
    if features.shape[0] != split.total:
        raise ValueError(f"{features.shape[0]} feature rows for a "
                         f"{split.total}-step split")
    y_bar, valid = targets(task, u_raw)
    idx = np.arange(split.total)
    train = idx[(idx >= max(split.n_washout, task.history)) &
                (idx < split.n_washout + split.n_train)]
    test = idx[idx >= split.n_washout + split.n_train]
    train = train[valid[train]]
    test = test[valid[test]]
    if len(train) == 0 or len(test) == 0:
        raise ValueError("empty train or test window after exclusions")

    X_train, X_test = features[train], features[test]
    if ridge_lambda is None:
        ridge_lambda = default_ridge_lambda(X_train)
    weights = train_readout(X_train, y_bar[train], ridge_lambda)
    y_train = X_train @ weights.w
    y_test = X_test @ weights.w

    if task.metric_name == 'nmse':
        value = nmse(y_test, y_bar[test])
        train_value = nmse(y_train, y_bar[train])
    else:
        value = r_squared(y_test, y_bar[test])
        train_value = r_squared(y_train, y_bar[train])
    return MetricsRecord(metric=task.metric_name, value=value,
                         train_value=train_value, task=task, split=split,
                         ridge_lambda=ridge_lambda)
