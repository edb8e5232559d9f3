"""Monte Carlo crossing probabilities with Brownian-bridge correction.

Euler steps ``X_{k+1} = X_k + mu(X_k) dt + sqrt(dt) Z``; a path counts as
crossed when a grid value reaches the barrier or, with the correction on,
when a uniform draw falls below the probability that the Brownian bridge
between two grid values touched the barrier.

Random numbers come from Philox, a counter-based generator.  Paths are
processed in fixed-size chunks and chunk ``j`` reads its own counter
range, so the estimate does not depend on how chunks are spread over
workers.  Gaussians are inverse-CDF transforms of uniforms.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidConfig
from .specfun import normal_ppf

CHUNK_PATHS = 8192


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 100_000
    dt: float = 1e-3
    seed: int = 12345
    bridge_correction: bool = True
    horizon: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 100:
            raise InvalidConfig("n_paths must be at least 100")
        if not (self.horizon > 0 and 0 < self.dt < self.horizon):
            raise InvalidConfig("need 0 < dt < horizon")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfig("seed must fit in 64 bits")
        if self.workers < 1:
            raise InvalidConfig("workers must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    std_err: float
    n_paths: int

    @classmethod
    def binomial(cls, hits: int, n: int) -> "McEstimate":
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n)


def bridge_crossing_prob(x_k, x_k1, c, dt):
    """``exp(-2 (c - x_k)(c - x_k1)/dt)``: a Brownian bridge between the two values exceeds ``c``."""
    return np.exp(-2.0 * (c - np.asarray(x_k)) * (c - np.asarray(x_k1)) / dt)


def _stream(seed: int, chunk: int):
    # chunk index in the top counter word: disjoint counter ranges per chunk
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, chunk]))


def _simulate_chunk(drift: Callable, x0: float, c: float, cfg: McConfig, chunk: int, size: int,
                    antithetic: bool) -> np.ndarray:
    """Crossing indicators for one chunk (pairs averaged when antithetic)."""
    rng = _stream(cfg.seed, chunk)
    dt = cfg.dt
    sq = math.sqrt(dt)
    n_base = size
    copies = 2 if antithetic else 1
    x = np.full(copies * n_base, float(x0))
    crossed = np.zeros(copies * n_base, dtype=bool)
    for _ in range(cfg.n_steps):
        z = normal_ppf(rng.random(n_base))
        u = rng.random(n_base) if cfg.bridge_correction else None
        if antithetic:
            z = np.concatenate([z, -z])
            if u is not None:
                u = np.concatenate([u, u])
        alive = ~crossed
        if not alive.any():
            break
        xa = x[alive]
        xn = xa + np.asarray(drift(xa), dtype=float) * dt + sq * z[alive]
        hit = xn >= c
        if cfg.bridge_correction:
            below = ~hit
            p = np.zeros_like(xn)
            p[below] = bridge_crossing_prob(xa[below], xn[below], c, dt)
            hit |= u[alive] < p
        x[alive] = xn
        crossed[alive] = hit
    flags = crossed.astype(float)
    if antithetic:
        return 0.5 * (flags[:n_base] + flags[n_base:])
    return flags


def _run(drift, x0, c, cfg, antithetic):
    if not x0 < c:
        raise InvalidConfig(f"start {x0} must lie below the barrier {c}")
    n_units = cfg.n_paths // 2 if antithetic else cfg.n_paths
    if antithetic and cfg.n_paths % 2:
        raise InvalidConfig("antithetic sampling needs an even number of paths")
    sizes = [min(CHUNK_PATHS, n_units - s) for s in range(0, n_units, CHUNK_PATHS)]
    jobs = list(enumerate(sizes))

    def work(job):
        chunk, size = job
        return _simulate_chunk(drift, x0, c, cfg, chunk, size, antithetic)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]
    # fixed reduction order: by chunk index
    return np.concatenate(parts)


def estimate_crossing(drift: Callable, x0: float, c: float, cfg: McConfig) -> McEstimate:
    """Estimate ``P(sup_{s<=T} X_s >= c)`` with ``X_0 = x0`` by Euler simulation."""
    flags = _run(drift, x0, c, cfg, antithetic=False)
    return McEstimate.binomial(int(flags.sum()), cfg.n_paths)


def estimate_crossing_antithetic(drift: Callable, x0: float, c: float, cfg: McConfig) -> McEstimate:
    """As :func:`estimate_crossing` with paired ``+Z/-Z`` paths; the error uses pair means."""
    pairs = _run(drift, x0, c, cfg, antithetic=True)
    p = float(pairs.mean())
    se = float(pairs.std(ddof=1) / math.sqrt(pairs.size))
    return McEstimate(p, se, cfg.n_paths)
