"""Driver paths: fractional Brownian motion and closed-form test drivers.

fBm with Hurst index H is the centred Gaussian process with covariance
R(s,t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.  Sampling factors the
covariance of the increments (a stationary Toeplitz matrix) with a dense
Cholesky decomposition and accumulates; composed with the cumulative-sum
matrix this is an exact square root of R, so the sampled vector carries
the prescribed covariance to factorisation accuracy.  H > 1/2 keeps the
sample paths of finite p-variation for every p > 1/H < 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DataError, ParameterError
from .paths import SampledPath


@dataclass(frozen=True)
class FbmSpec:
    hurst: float
    horizon: float
    samples: int
    seed: int

    def __post_init__(self):
        if not (0.5 <= self.hurst < 1.0):
            raise ParameterError("hurst must lie in [1/2, 1) for the Young regime")
        if self.horizon <= 0:
            raise ParameterError("horizon must be positive")
        if self.samples < 2:
            raise ParameterError("need at least two samples")

    @property
    def dt(self) -> float:
        return self.horizon / (self.samples - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.samples)


def _fgn_covariance(hurst: float, dt: float, n_inc: int) -> np.ndarray:
    k = np.arange(n_inc, dtype=float)
    two_h = 2.0 * hurst
    gamma = 0.5 * dt ** two_h * (
        np.abs(k + 1) ** two_h + np.abs(k - 1) ** two_h - 2.0 * np.abs(k) ** two_h
    )
    idx = np.abs(np.subtract.outer(np.arange(n_inc), np.arange(n_inc)))
    return gamma[idx]


@lru_cache(maxsize=4)
def _fgn_cholesky(hurst: float, horizon: float, samples: int) -> np.ndarray:
    dt = horizon / (samples - 1)
    cov = _fgn_covariance(hurst, dt, samples - 1)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        try:
            return np.linalg.cholesky(cov + 1e-12 * np.eye(samples - 1))
        except np.linalg.LinAlgError as exc:
            raise DataError(
                "fBm covariance not positive definite even after jitter"
            ) from exc


def fbm_sample(spec: FbmSpec) -> SampledPath:
    """One fBm path on the uniform grid, deterministic in the seed; w_0 = 0."""
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal(spec.samples - 1)
    if spec.hurst == 0.5:
        increments = np.sqrt(spec.dt) * z  # fGn covariance is exactly dt*I
    else:
        increments = _fgn_cholesky(spec.hurst, spec.horizon, spec.samples) @ z
    values = np.concatenate([[0.0], np.cumsum(increments)])
    return SampledPath(spec.times, values)


def fbm_covariance_matrix(spec: FbmSpec) -> np.ndarray:
    """Target covariance R(s,t) on the positive grid times t_1..t_{n-1}."""
    t = spec.times[1:]
    two_h = 2.0 * spec.hurst
    s_col = t[:, None]
    t_row = t[None, :]
    return 0.5 * (s_col ** two_h + t_row ** two_h - np.abs(t_row - s_col) ** two_h)


def fbm_covariance_defect(spec: FbmSpec) -> float:
    """Max-abs gap between the factorised covariance and R; 0 up to roundoff."""
    if spec.hurst == 0.5:
        L = np.sqrt(spec.dt) * np.eye(spec.samples - 1)
    else:
        L = _fgn_cholesky(spec.hurst, spec.horizon, spec.samples)
    path_factor = np.cumsum(L, axis=0)
    achieved = path_factor @ path_factor.T
    return float(np.max(np.abs(achieved - fbm_covariance_matrix(spec))))


def analytic_driver(kind: str, params: dict, grid) -> SampledPath:
    """Deterministic closed-form drivers used by the oracle tests.

    kinds: linear (slope, offset), sine (amp, freq, phase), power
    (exponent, scale), brownian_like (seed, scale).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or not np.all(np.diff(grid) > 0):
        raise ParameterError("grid must be strictly increasing with >= 2 points")
    params = dict(params or {})
    if kind == "linear":
        slope = float(params.get("slope", 1.0))
        offset = float(params.get("offset", 0.0))
        values = offset + slope * grid
    elif kind == "sine":
        amp = float(params.get("amp", 1.0))
        freq = float(params.get("freq", 1.0))
        phase = float(params.get("phase", 0.0))
        values = amp * np.sin(freq * grid + phase)
    elif kind == "power":
        k = float(params.get("exponent", 2.0))
        scale = float(params.get("scale", 1.0))
        if np.any(grid < 0):
            raise ParameterError("power driver needs nonnegative times")
        values = scale * grid ** k
    elif kind == "brownian_like":
        rng = np.random.default_rng(int(params.get("seed", 0)))
        scale = float(params.get("scale", 1.0))
        steps = rng.standard_normal(len(grid) - 1) * np.sqrt(np.diff(grid))
        values = scale * np.concatenate([[0.0], np.cumsum(steps)])
    else:
        raise ParameterError(f"unknown analytic driver kind {kind!r}")
    return SampledPath(grid, values)
