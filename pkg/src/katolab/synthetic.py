"""Synthetic fields of prescribed Hoelder regularity for property tests.

Lacunary sums sum_k 2^(-alpha k) cos(2^k q x + phi_k) have sharp Hoelder
exponent alpha, which makes the mollification and commutator scaling
exponents directly measurable as log-log slopes.
"""

from __future__ import annotations

import numpy as np


def lacunary(coords: np.ndarray, alpha: float, octaves: int, seed: int = 0,
             q0: float = 1.0, k_min: int = 0) -> np.ndarray:
    """Lacunary cosine sum with sharp Hoelder-alpha regularity."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=k_min + octaves)
    out = np.zeros_like(np.asarray(coords, dtype=float))
    for k in range(k_min, k_min + octaves):
        out += 2.0 ** (-alpha * k) * np.cos(2.0 ** k * q0 * coords + phases[k])
    return out


def lacunary_xy(xs: np.ndarray, ys: np.ndarray, alpha: float, octaves: int,
                seed: int = 0, qx: float = 1.0, qy: float = 1.0) -> np.ndarray:
    """2D field: lacunary in x plus lacunary in y, Hoelder-alpha in both."""
    fx = lacunary(xs, alpha, octaves, seed=seed, q0=qx)
    fy = lacunary(ys, alpha, octaves, seed=seed + 1, q0=qy)
    return fx[:, None] + fy[None, :]


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    lx = lx - lx.mean()
    return float(np.sum(lx * (ly - ly.mean())) / np.sum(lx * lx))
