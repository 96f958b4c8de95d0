"""Vectorized numpy implementations of the per-cycle hot kernels.

This is the fallback backend; `kernels_numba` provides jitted loop
versions of the same functions. Both mutate arrays in place where noted
and perform arithmetic in the same element order, so simulations are
reproducible within either backend.
"""

import numpy as np

NORM_EPS = 1e-12


def local_inputs(contents, neighbors, external, blend):
    """Blend the external input with the mean content of lattice neighbors.

    contents: (N, D), neighbors: (N, M) index table, external: (D,).
    Returns (N, D).
    """
    nbr_mean = contents[neighbors].sum(axis=1) / neighbors.shape[1]
    return blend * external[None, :] + (1.0 - blend) * nbr_mean


def activation_scores(contents, local):
    """Alignment score per unit: max(0, cos(local, content)).

    Units with ~zero content norm (never written) fall back to the local
    input norm so that fresh units are not permanently silent.
    """
    norms = np.sqrt((contents * contents).sum(axis=1))
    dots = (contents * local).sum(axis=1)
    local_norms = np.sqrt((local * local).sum(axis=1))
    safe = np.where(norms > NORM_EPS, norms, 1.0)
    raw = np.where(norms > NORM_EPS, dots / safe, local_norms)
    return np.maximum(raw, 0.0)


def fire_mask(scores, energy, unit_thresholds, group_thresholds, assignment,
              candidates, e_min):
    """Units fire when candidate, energetically viable, and suprathreshold."""
    effective = unit_thresholds + group_thresholds[assignment]
    return candidates & (energy > e_min) & (scores - effective > 0.0)


def content_update(contents, local, fired_idx, rates):
    """EMA pull of fired units toward their local input. In place.

    rates is per-unit (soft routing scales it by the group weight).
    """
    r = rates[fired_idx][:, None]
    contents[fired_idx] += r * (local[fired_idx] - contents[fired_idx])


def energy_update(energy, scores, fired_idx, income, cost_rate):
    """Income minus linear activation cost for fired units; floor at 0."""
    energy[fired_idx] += income - cost_rate * scores[fired_idx]
    np.maximum(energy, 0.0, out=energy)


def anchor_pull(contents, centroids, assignment, initialized, rate):
    """Pull every unit toward its group's stored centroid. In place."""
    ok = np.nonzero(initialized[assignment])[0]
    if ok.size:
        contents[ok] += rate * (centroids[assignment[ok]] - contents[ok])


def group_fired_stats(contents, fired_idx, assignment, k):
    """Per-group sums and counts of fired-unit contents.

    Accumulation follows ascending unit order (np.add.at is sequential),
    matching the numba loop exactly.
    """
    sums = np.zeros((k, contents.shape[1]))
    counts = np.zeros(k, dtype=np.int64)
    groups = assignment[fired_idx]
    np.add.at(sums, groups, contents[fired_idx])
    np.add.at(counts, groups, 1)
    return sums, counts


def group_content_means(contents, assignment, k):
    """Mean content over all members of each group. Returns (K, D)."""
    sums = np.zeros((k, contents.shape[1]))
    counts = np.zeros(k, dtype=np.int64)
    np.add.at(sums, assignment, contents)
    np.add.at(counts, assignment, 1)
    return sums / np.maximum(counts, 1)[:, None]
