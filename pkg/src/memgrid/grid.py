"""Dissipative grid core: unit state, per-cycle dynamics, turnover.

One computation cycle runs, in order: expert selection (routing module),
activation of the selected group, content EMA update for fired units,
metabolic cost deduction, centroid recording, replacement of depleted
units with optional seeding, optional anchoring, and homeostatic
threshold adaptation. All randomness flows through the caller-provided
generator, so a run is fully determined by (config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend, deep_memory, routing
from .config import GridConfig, RunConfig
from .errors import ConfigError, NumericFaultError


@dataclass
class UnitState:
    """Single-unit view used by the unit-level operations and tests."""

    content: np.ndarray
    energy: float
    threshold: float
    expert_id: int
    age: int = 0
    fired: bool = False


@dataclass
class CycleOutcome:
    fired_ids: np.ndarray
    replaced_ids: np.ndarray
    mean_fired_content: np.ndarray      # (K, D); rows for groups with no fires are 0
    fired_counts: np.ndarray            # (K,)
    death_rate_estimate: float
    selected_expert: int                # -1 when routing is disabled


def moore_neighbor_table(rows: int, cols: int, radius: int = 1) -> np.ndarray:
    """Torus Moore-neighborhood index table, shape (rows*cols, M)."""
    offsets = [(dr, dc)
               for dr in range(-radius, radius + 1)
               for dc in range(-radius, radius + 1)
               if not (dr == 0 and dc == 0)]
    table = np.empty((rows * cols, len(offsets)), dtype=np.int64)
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            for q, (dr, dc) in enumerate(offsets):
                table[i, q] = ((r + dr) % rows) * cols + (c + dc) % cols
    return table


def random_unit_vectors(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Rebirth distribution: i.i.d. standard normal, normalized to unit length."""
    v = rng.standard_normal((n, dim))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return v / norms


class GridState:
    """Structure-of-arrays state for N units plus turnover bookkeeping."""

    def __init__(self, cfg: GridConfig, k: int, rng: np.random.Generator):
        cfg.validate()
        if cfg.n_units % k != 0:
            raise ConfigError(f"n_units={cfg.n_units} not divisible by k={k}")
        self.cfg = cfg
        self.k = k
        n, d = cfg.n_units, cfg.dim
        self.contents = random_unit_vectors(n, d, rng)
        self.energy = np.full(n, cfg.e_init)
        self.thresholds = np.zeros(n)           # per-unit offset over the group threshold
        self.group_size = n // k
        self.expert_ids = np.repeat(np.arange(k, dtype=np.int64), self.group_size)
        self.ages = np.zeros(n, dtype=np.int64)
        self.fired = np.zeros(n, dtype=bool)
        rows, cols = cfg.lattice_shape
        self.neighbors = moore_neighbor_table(rows, cols, cfg.neighborhood_radius)
        self.cycle = 0
        self.replaced_total = 0

    @property
    def n_units(self):
        return self.cfg.n_units

    def death_rate_estimate(self) -> float:
        """Running mean fraction of units replaced per cycle."""
        if self.cycle == 0:
            return 0.0
        return self.replaced_total / (self.cycle * self.cfg.n_units)

    def reset_population(self, rng: np.random.Generator):
        """Session restart: fresh contents, energy, thresholds; lattice,
        partition, and cycle counters are preserved."""
        n, d = self.cfg.n_units, self.cfg.dim
        self.contents = random_unit_vectors(n, d, rng)
        self.energy = np.full(n, self.cfg.e_init)
        self.thresholds = np.zeros(n)
        self.ages = np.zeros(n, dtype=np.int64)
        self.fired[:] = False

    def unit(self, i: int) -> UnitState:
        return UnitState(content=self.contents[i].copy(),
                         energy=float(self.energy[i]),
                         threshold=float(self.thresholds[i]),
                         expert_id=int(self.expert_ids[i]),
                         age=int(self.ages[i]),
                         fired=bool(self.fired[i]))


def update_content(unit: UnitState, local_input: np.ndarray, rate: float):
    """EMA step toward the local input: content <- (1-r)*content + r*x."""
    if not (0.0 < rate <= 1.0):
        raise ConfigError("content rate must be in (0, 1]")
    unit.content = (1.0 - rate) * unit.content + rate * local_input
    return unit.content


def adapt_threshold(unit: UnitState, fired: bool, cfg: GridConfig):
    """Homeostatic step: threshold += eta * (fired - target_rate)."""
    unit.threshold += cfg.threshold_rate * (float(fired) - cfg.target_rate)
    return unit.threshold


def replace_depleted(grid: GridState, dm, rng: np.random.Generator) -> np.ndarray:
    """Replace every unit with energy below e_min.

    New content is drawn from the rebirth distribution, then the seeding
    hook may overwrite it. Energy, age, and the per-unit threshold offset
    reset; expert membership is positional and preserved.
    """
    dead = np.nonzero(grid.energy < grid.cfg.e_min)[0]
    if dead.size == 0:
        return dead
    fresh = random_unit_vectors(dead.size, grid.cfg.dim, rng)
    for t, i in enumerate(dead):
        grid.contents[i] = fresh[t]
        if dm is not None:
            slot = 0 if dm.cfg.global_slot else int(grid.expert_ids[i])
            seeded = deep_memory.seed_unit(dm, slot, rng)
            if seeded is not None:
                grid.contents[i] = seeded
    grid.energy[dead] = grid.cfg.e_init
    grid.ages[dead] = 0
    grid.thresholds[dead] = 0.0
    grid.replaced_total += dead.size
    return dead


def step_cycle(grid: GridState, external: np.ndarray, router, dm,
               rng: np.random.Generator, context: int | None = None) -> CycleOutcome:
    """Run one full computation cycle. Mutates grid, router, and dm."""
    cfg = grid.cfg
    external = np.asarray(external, dtype=float)
    if external.shape != (cfg.dim,):
        raise ConfigError(
            f"input has shape {external.shape}, expected ({cfg.dim},)")
    if not np.all(np.isfinite(external)):
        raise ConfigError("input vector contains non-finite values")

    route = routing.route_cycle(router, grid, external, rng, context=context)
    k_star = route.selected

    local = backend.local_inputs(grid.contents, grid.neighbors, external,
                                 cfg.blend_external)
    scores = backend.activation_scores(grid.contents, local)
    fired = backend.fire_mask(scores, grid.energy, grid.thresholds,
                              router.group_thresholds, route.assignment,
                              route.candidates, cfg.e_min)
    fired_idx = np.nonzero(fired)[0]

    if route.weights is None:
        rates = np.full(cfg.n_units, cfg.content_rate)
    else:
        rates = cfg.content_rate * route.weights[route.assignment]
    backend.content_update(grid.contents, local, fired_idx, rates)
    backend.energy_update(grid.energy, scores, fired_idx, cfg.energy_income,
                          cfg.activation_cost)
    if cfg.leak_income:
        not_fired = np.nonzero(~fired)[0]
        grid.energy[not_fired] += cfg.leak_income

    bad = np.nonzero(~np.isfinite(grid.contents).all(axis=1))[0]
    if bad.size:
        raise NumericFaultError(
            f"non-finite content in units {bad[:8].tolist()}", unit_ids=bad)

    sums, counts = backend.group_fired_stats(grid.contents, fired_idx,
                                             route.assignment, grid.k)
    means = sums / np.maximum(counts, 1)[:, None]

    if dm is not None:
        dm.cycle = grid.cycle
        if dm.recording_active():
            if dm.cfg.global_slot:
                if fired_idx.size:
                    deep_memory.record(dm, 0,
                                       grid.contents[fired_idx].sum(axis=0)
                                       / fired_idx.size, rng)
            elif k_star >= 0 and counts[k_star] > 0:
                deep_memory.record(dm, k_star, means[k_star], rng)

    replaced = replace_depleted(grid, dm, rng)

    if dm is not None and dm.anchoring_active():
        assignment = (np.zeros(cfg.n_units, dtype=np.int64)
                      if dm.cfg.global_slot else grid.expert_ids)
        backend.anchor_pull(grid.contents, dm.centroids, assignment,
                            dm.initialized_mask, dm.cfg.anchor_rate)

    cand_idx = np.nonzero(route.candidates)[0]
    grid.thresholds[cand_idx] += cfg.threshold_rate * (
        fired[cand_idx].astype(float) - cfg.target_rate)
    group_cand, _ = np.histogram(route.assignment[cand_idx],
                                 bins=np.arange(grid.k + 1))
    active_groups = np.nonzero(group_cand)[0]
    router.group_thresholds[active_groups] += cfg.threshold_rate * (
        counts[active_groups] / group_cand[active_groups] - cfg.target_rate)

    grid.ages += 1
    grid.ages[replaced] = 0
    grid.fired = fired
    grid.cycle += 1

    return CycleOutcome(fired_ids=fired_idx,
                        replaced_ids=replaced,
                        mean_fired_content=means,
                        fired_counts=counts,
                        death_rate_estimate=grid.death_rate_estimate(),
                        selected_expert=k_star)
