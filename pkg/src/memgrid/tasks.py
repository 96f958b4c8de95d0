"""Synthetic multi-context tasks: ground-truth centroids, per-cycle input
sampling, and the five context schedulers plus the interference phase."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ScheduleConfig, TaskConfig
from .errors import ConfigError, InfeasibleSeparationError

MAX_REJECTION_ATTEMPTS = 10_000


def generate_centroids(k: int, dim: int, min_separation: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Unit-norm context centroids with all pairwise cosines <= min_separation.

    Rejection-samples random unit vectors; min_separation <= 0 with k <= dim
    switches to an orthonormal construction (pairwise cosines exactly 0).
    """
    if k < 1:
        raise ConfigError("need k >= 1")
    if min_separation <= 0.0:
        if k > dim:
            raise InfeasibleSeparationError(
                f"cannot build {k} orthogonal vectors in dimension {dim}")
        gauss = rng.standard_normal((dim, k))
        q, _ = np.linalg.qr(gauss)
        return q[:, :k].T.copy()
    out = np.empty((k, dim))
    count = 0
    for _ in range(MAX_REJECTION_ATTEMPTS):
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        if count == 0 or np.all(out[:count] @ v <= min_separation):
            out[count] = v
            count += 1
            if count == k:
                return out
    raise InfeasibleSeparationError(
        f"no {k} centroids at separation {min_separation} within "
        f"{MAX_REJECTION_ATTEMPTS} attempts")


@dataclass
class ContextTask:
    k_contexts: int
    true_centroids: np.ndarray
    input_noise: float
    min_separation: float


def make_task(k: int, dim: int, cfg: TaskConfig,
              rng: np.random.Generator) -> ContextTask:
    cfg.validate()
    centroids = generate_centroids(k, dim, cfg.min_separation, rng)
    return ContextTask(k_contexts=k, true_centroids=centroids,
                       input_noise=cfg.input_noise,
                       min_separation=cfg.min_separation)


def sample_input(task: ContextTask, context: int,
                 rng: np.random.Generator) -> np.ndarray:
    """One input: the context centroid plus isotropic noise, renormalized."""
    if not (0 <= context < task.k_contexts):
        raise ConfigError(f"context {context} out of range")
    x = task.true_centroids[context] + \
        task.input_noise * rng.standard_normal(task.true_centroids.shape[1])
    n = np.linalg.norm(x)
    return x / n if n > 0 else x


@dataclass
class Schedule:
    """Stateful context scheduler; `next_context` advances one cycle."""

    k: int
    cfg: ScheduleConfig
    step: int = 0
    current: int = 0
    zipf_weights: np.ndarray = None
    zipf_order: np.ndarray = None
    inner: "Schedule" = None

    def describe(self) -> str:
        return self.cfg.variant


def make_schedule(k: int, cfg: ScheduleConfig,
                  rng: np.random.Generator) -> Schedule:
    cfg.validate()
    sched = Schedule(k=k, cfg=cfg)
    if cfg.variant == "zipf":
        ranks = np.arange(1, k + 1, dtype=float)
        w = ranks ** (-cfg.zipf_exponent)
        sched.zipf_weights = w / w.sum()
        # per-seed permutation of which context takes which frequency rank
        sched.zipf_order = rng.permutation(k)
    elif cfg.variant == "session_restart":
        inner_cfg = ScheduleConfig(
            variant=cfg.inner_variant, block_size=cfg.block_size,
            p_stay=cfg.p_stay, zipf_exponent=cfg.zipf_exponent)
        sched.inner = make_schedule(k, inner_cfg, rng)
    return sched


def next_context(sched: Schedule, rng: np.random.Generator) -> tuple[int, bool]:
    """Emit (context label, reset marker) and advance the scheduler."""
    cfg = sched.cfg
    reset = False
    if cfg.variant == "uniform_block":
        label = (sched.step // cfg.block_size) % sched.k
    elif cfg.variant == "markov_sticky":
        if sched.step == 0:
            sched.current = int(rng.integers(sched.k))
        elif sched.k > 1 and rng.random() >= cfg.p_stay:
            jump = int(rng.integers(sched.k - 1))
            sched.current = (sched.current + 1 + jump) % sched.k
        label = sched.current
    elif cfg.variant == "iid":
        label = int(rng.integers(sched.k))
    elif cfg.variant == "zipf":
        rank = int(rng.choice(sched.k, p=sched.zipf_weights))
        label = int(sched.zipf_order[rank])
    else:  # session_restart
        if sched.step > 0 and sched.step % cfg.restart_period == 0:
            reset = True
        label, _ = next_context(sched.inner, rng)
    sched.step += 1
    return label, reset


def run_interference_phase(grid, router, dm, task, rng, duration: int):
    """Degrade representations: uniform random contexts with per-cycle
    binding disruption while every consolidation loop is suspended.

    Returns the post-interference MetricsReport. Normal operation (the
    configured routing mode and seed behavior) resumes afterwards.
    """
    from .simulation import run_phase

    return run_phase(grid, router, dm, task, None, rng, duration,
                     interference=True)
