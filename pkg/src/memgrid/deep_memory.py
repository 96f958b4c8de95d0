"""Consolidation memory: per-expert centroid recording, probabilistic
seeding of replaced units, and a weak anchoring pull.

Recording keeps a running EMA of each group's fired-content mean.
Seeding hands that centroid to freshly replaced units with probability
`inject_prob`, which is the sole path by which stored content re-enters
the grid. Anchoring nudges living units toward their stored centroid
every cycle. The pathological write/seed modes (mismatched slot, noisy
write, noise seed, wrong-expert seed, one-shot) exist for the ablation
experiments.

A centroid slot is never injected before its first write; `suspended`
gates all three loops at once during interference phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DMConfig
from .errors import ConfigError


def cyclic_permutation(k: int) -> np.ndarray:
    """Default expert mismatch: slot i receives/serves expert i-1's data."""
    return (np.arange(k, dtype=np.int64) + 1) % k


@dataclass
class DeepMemoryState:
    k: int
    cfg: DMConfig
    centroids: np.ndarray = None           # (K, D) stored centroids
    initialized_mask: np.ndarray = None    # (K,) written at least once
    write_perm: np.ndarray = None          # mismatched-write slot map
    seed_perm: np.ndarray = None           # wrong-expert seed slot map
    cycle: int = 0                         # set by the grid each cycle
    oneshot_cycle: int = -1                # firing cycle for one-shot seeding
    suspended: bool = False

    def recording_active(self) -> bool:
        return self.cfg.record_on and not self.suspended

    def seeding_active(self) -> bool:
        return (self.cfg.seed_on and not self.suspended
                and self.cfg.seed_mode != "off" and self.cfg.inject_prob > 0.0)

    def anchoring_active(self) -> bool:
        return (self.cfg.anchor_on and not self.suspended
                and self.cfg.anchor_rate > 0.0)


def make_deep_memory(k: int, dim: int, cfg: DMConfig) -> DeepMemoryState:
    cfg.validate()
    return DeepMemoryState(
        k=k,
        cfg=cfg,
        centroids=np.zeros((k, dim)),
        initialized_mask=np.zeros(k, dtype=bool),
        write_perm=cyclic_permutation(k),
        seed_perm=cyclic_permutation(k),
    )


def record(dm: DeepMemoryState, expert: int, fired_mean: np.ndarray,
           rng: np.random.Generator | None = None):
    """EMA the fired-content mean of `expert` into a centroid slot.

    The write mode decides what actually lands in storage: the identity,
    a permuted slot (mismatched), or a noise-corrupted copy.
    """
    if not dm.recording_active():
        return
    value = np.asarray(fired_mean, dtype=float)
    slot = expert
    if dm.cfg.write_mode == "mismatched":
        slot = int(dm.write_perm[expert])
    elif dm.cfg.write_mode == "noise":
        if rng is None:
            raise ConfigError("noise writes require a random generator")
        dim = value.shape[0]
        value = value + (dm.cfg.write_noise / np.sqrt(dim)) * \
            rng.standard_normal(dim)
    r = dm.cfg.record_rate
    dm.centroids[slot] += r * (value - dm.centroids[slot])
    dm.initialized_mask[slot] = True


def seed_unit(dm: DeepMemoryState, expert: int,
              rng: np.random.Generator) -> np.ndarray | None:
    """Seeding hook, called once per replaced unit after random rebirth.

    Returns a content vector to overwrite the rebirth draw, or None to
    keep it. Uninitialized slots never inject.
    """
    if not dm.seeding_active():
        return None
    mode = dm.cfg.seed_mode
    if mode == "oneshot" and dm.cycle != dm.oneshot_cycle:
        return None
    if rng.random() >= dm.cfg.inject_prob:
        return None
    if mode == "noise":
        v = rng.standard_normal(dm.centroids.shape[1])
        n = np.linalg.norm(v)
        return v / n if n > 0 else v
    slot = int(dm.seed_perm[expert]) if mode == "wrong" else expert
    if not dm.initialized_mask[slot]:
        return None
    return dm.centroids[slot].copy()


def anchor(dm: DeepMemoryState, grid):
    """Pull every living unit toward its group's stored centroid.

    The grid cycle calls the kernel directly; this standalone entry point
    applies one anchoring step outside of a cycle.
    """
    from . import backend

    if not dm.anchoring_active():
        return
    assignment = (np.zeros(grid.cfg.n_units, dtype=np.int64)
                  if dm.cfg.global_slot else grid.expert_ids)
    backend.anchor_pull(grid.contents, dm.centroids, assignment,
                        dm.initialized_mask, dm.cfg.anchor_rate)
