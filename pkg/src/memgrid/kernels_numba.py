"""Numba-jitted loop implementations of the per-cycle hot kernels.

Mirrors `kernels_numpy` function for function. fastmath stays off so the
float semantics match the numpy backend (no reassociation); cache=True
amortizes JIT cost across processes.
"""

import numpy as np
from numba import njit

NORM_EPS = 1e-12


@njit(cache=True)
def local_inputs(contents, neighbors, external, blend):
    n, d = contents.shape
    m = neighbors.shape[1]
    out = np.empty((n, d))
    w = 1.0 - blend
    for i in range(n):
        for j in range(d):
            acc = 0.0
            for q in range(m):
                acc += contents[neighbors[i, q], j]
            out[i, j] = blend * external[j] + w * (acc / m)
    return out


@njit(cache=True)
def activation_scores(contents, local):
    n, d = contents.shape
    out = np.empty(n)
    for i in range(n):
        nrm = 0.0
        dot = 0.0
        lnrm = 0.0
        for j in range(d):
            nrm += contents[i, j] * contents[i, j]
            dot += contents[i, j] * local[i, j]
            lnrm += local[i, j] * local[i, j]
        nrm = np.sqrt(nrm)
        if nrm > NORM_EPS:
            raw = dot / nrm
        else:
            raw = np.sqrt(lnrm)
        out[i] = raw if raw > 0.0 else 0.0
    return out


@njit(cache=True)
def fire_mask(scores, energy, unit_thresholds, group_thresholds, assignment,
              candidates, e_min):
    n = scores.shape[0]
    out = np.empty(n, dtype=np.bool_)
    for i in range(n):
        eff = unit_thresholds[i] + group_thresholds[assignment[i]]
        out[i] = candidates[i] and energy[i] > e_min and scores[i] - eff > 0.0
    return out


@njit(cache=True)
def content_update(contents, local, fired_idx, rates):
    d = contents.shape[1]
    for t in range(fired_idx.shape[0]):
        i = fired_idx[t]
        r = rates[i]
        for j in range(d):
            contents[i, j] += r * (local[i, j] - contents[i, j])


@njit(cache=True)
def energy_update(energy, scores, fired_idx, income, cost_rate):
    for t in range(fired_idx.shape[0]):
        i = fired_idx[t]
        energy[i] += income - cost_rate * scores[i]
    for i in range(energy.shape[0]):
        if energy[i] < 0.0:
            energy[i] = 0.0


@njit(cache=True)
def anchor_pull(contents, centroids, assignment, initialized, rate):
    n, d = contents.shape
    for i in range(n):
        g = assignment[i]
        if initialized[g]:
            for j in range(d):
                contents[i, j] += rate * (centroids[g, j] - contents[i, j])


@njit(cache=True)
def group_fired_stats(contents, fired_idx, assignment, k):
    d = contents.shape[1]
    sums = np.zeros((k, d))
    counts = np.zeros(k, dtype=np.int64)
    for t in range(fired_idx.shape[0]):
        i = fired_idx[t]
        g = assignment[i]
        counts[g] += 1
        for j in range(d):
            sums[g, j] += contents[i, j]
    return sums, counts


@njit(cache=True)
def group_content_means(contents, assignment, k):
    n, d = contents.shape
    sums = np.zeros((k, d))
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        g = assignment[i]
        counts[g] += 1
        for j in range(d):
            sums[g, j] += contents[i, j]
    for g in range(k):
        c = counts[g] if counts[g] > 0 else 1
        for j in range(d):
            sums[g, j] /= c
    return sums
