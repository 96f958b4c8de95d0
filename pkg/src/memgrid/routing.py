"""Discrete expert selection over K positional groups.

Hard mode picks the expert whose running input centroid is most cosine-
similar to the current input; soft mode samples from a softmax over the
same similarities. Binding disruption re-permutes the group labels every
cycle, and fixed mode bypasses similarity entirely by mapping the ground-
truth context label onto an expert.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import RoutingConfig
from .errors import ConfigError, RoutingDegenerateError


@dataclass
class ExpertRouter:
    k: int
    cfg: RoutingConfig
    input_centroids: np.ndarray = None        # (K, D) running input means
    group_thresholds: np.ndarray = None       # (K,) homeostatic offsets
    initialized: np.ndarray = None            # (K,) bool, centroid ever claimed
    fixed_map: np.ndarray = None              # context -> expert (fixed mode)
    active_assignment: np.ndarray = None      # per-cycle labels under disruption
    last_weights: np.ndarray = None           # softmax weights (soft mode)
    mode_override: str = None                 # interference forces "disruption"

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("router needs k >= 1")


def make_router(k: int, dim: int, cfg: RoutingConfig) -> ExpertRouter:
    cfg.validate()
    return ExpertRouter(
        k=k,
        cfg=cfg,
        input_centroids=np.zeros((k, dim)),
        group_thresholds=np.zeros(k),
        initialized=np.zeros(k, dtype=bool),
        fixed_map=np.arange(k, dtype=np.int64),
    )


def _similarities(router: ExpertRouter, x: np.ndarray) -> np.ndarray:
    xn = np.linalg.norm(x)
    if xn <= 1e-12:
        raise RoutingDegenerateError("all-zero input vector cannot be routed")
    mu = router.input_centroids
    norms = np.linalg.norm(mu, axis=1)
    sims = np.full(router.k, -np.inf)
    ok = router.initialized & (norms > 1e-12)
    if ok.any():
        sims[ok] = (mu[ok] @ x) / (norms[ok] * xn)
    return sims


def _maybe_claim(router: ExpertRouter, x: np.ndarray, sims: np.ndarray):
    """Uninitialized experts claim sufficiently novel inputs, in index
    order, until all K centroids are initialized."""
    if router.initialized.all():
        return None
    best = sims.max() if router.initialized.any() else -np.inf
    if best >= router.cfg.claim_novelty:
        return None
    k_star = int(np.nonzero(~router.initialized)[0][0])
    router.input_centroids[k_star] = x
    router.initialized[k_star] = True
    return k_star


def select_expert(x: np.ndarray, router: ExpertRouter,
                  rng: np.random.Generator | None = None) -> int:
    """Pick an expert for the input and EMA-update its centroid.

    Hard mode: argmax cosine similarity, ties to the lowest index.
    Soft mode: sample from softmax(sims / temperature); needs `rng`.
    """
    x = np.asarray(x, dtype=float)
    sims = _similarities(router, x)
    claimed = _maybe_claim(router, x, sims)
    if claimed is not None:
        return claimed

    if router.cfg.mode == "soft":
        if rng is None:
            raise ConfigError("soft routing requires a random generator")
        live = np.isfinite(sims)
        logits = sims[live] / router.cfg.temperature
        logits -= logits.max()
        w = np.exp(logits)
        w /= w.sum()
        weights = np.zeros(router.k)
        weights[live] = w
        router.last_weights = weights
        k_star = int(rng.choice(router.k, p=weights))
    else:
        k_star = int(np.argmax(sims))

    rate = router.cfg.centroid_rate
    router.input_centroids[k_star] += rate * (x - router.input_centroids[k_star])
    return k_star


def apply_binding_disruption(router: ExpertRouter, grid,
                             rng: np.random.Generator) -> np.ndarray:
    """Replace the unit->expert assignment with a uniformly random
    permutation of the group labels; group sizes are preserved exactly."""
    perm = rng.permutation(router.k)
    router.active_assignment = perm[grid.expert_ids]
    return perm


@dataclass
class RouteResult:
    selected: int                 # -1 when routing is disabled
    candidates: np.ndarray        # (N,) bool: units eligible to fire
    assignment: np.ndarray        # (N,) labels in effect this cycle
    weights: np.ndarray = None    # (K,) soft-routing weights, else None


def route_cycle(router: ExpertRouter, grid, external: np.ndarray,
                rng: np.random.Generator, context: int | None = None) -> RouteResult:
    """Mode dispatch used by the grid cycle."""
    mode = router.mode_override or router.cfg.mode
    n = grid.cfg.n_units

    if mode == "disabled":
        return RouteResult(selected=-1,
                           candidates=np.ones(n, dtype=bool),
                           assignment=grid.expert_ids)

    if mode == "fixed":
        if context is None:
            raise ConfigError("fixed routing needs the context label")
        k_star = int(router.fixed_map[context])
        assignment = grid.expert_ids
        return RouteResult(selected=k_star,
                           candidates=assignment == k_star,
                           assignment=assignment)

    if mode == "disruption":
        apply_binding_disruption(router, grid, rng)
        k_star = select_expert(external, router)
        assignment = router.active_assignment
        return RouteResult(selected=k_star,
                           candidates=assignment == k_star,
                           assignment=assignment)

    if mode == "soft":
        router.last_weights = None
        k_star = select_expert(external, router, rng)
        weights = router.last_weights
        if weights is None:          # bootstrap claim cycle
            weights = np.zeros(router.k)
            weights[k_star] = 1.0
        return RouteResult(selected=k_star,
                           candidates=np.ones(n, dtype=bool),
                           assignment=grid.expert_ids,
                           weights=weights)

    k_star = select_expert(external, router)
    assignment = grid.expert_ids
    return RouteResult(selected=k_star,
                       candidates=assignment == k_star,
                       assignment=assignment)
