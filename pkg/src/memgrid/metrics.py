"""Evaluation metrics: representation quality, firing selectivity,
mutual information, cosine silhouettes, and the operating-point verdict."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# Verdict thresholds (artifact-defined operating-point criteria):
# Pass needs R above PASS_R plus the delta, information, and selectivity
# gates below; Fail means the lift over the matched baseline is too small
# to distinguish.
PASS_R = 0.70
PASS_DELTA_R = 0.15
PASS_MI_FRACTION = 0.5
PASS_F_SEL = 0.5
FAIL_DELTA_R = 0.10


@dataclass
class MetricsReport:
    r_per_context: list[float]
    r_mean: float
    firing_selectivity: float
    mutual_information: float
    silhouette: float
    context_silhouette: float
    drift_estimate: float
    death_rate: float
    delta_r_vs_baseline: float | None = None
    degenerate: list[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "r_per_context": [float(v) for v in self.r_per_context],
            "r_mean": float(self.r_mean),
            "firing_selectivity": float(self.firing_selectivity),
            "mutual_information": float(self.mutual_information),
            "silhouette": float(self.silhouette),
            "context_silhouette": float(self.context_silhouette),
            "drift_estimate": float(self.drift_estimate),
            "death_rate": float(self.death_rate),
            "delta_r_vs_baseline": (None if self.delta_r_vs_baseline is None
                                    else float(self.delta_r_vs_baseline)),
            "degenerate": list(self.degenerate),
        }


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= 1e-12 or nv <= 1e-12:
        return 0.0
    return float(u @ v / (nu * nv))


def optimal_assignment(group_means: np.ndarray,
                       true_centroids: np.ndarray) -> tuple[int, ...]:
    """Expert->context bijection maximizing total cosine alignment.

    Brute force over permutations; intended for K <= 8.
    """
    k = group_means.shape[0]
    if true_centroids.shape[0] != k:
        raise ConfigError("need as many centroids as group means")
    sim = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            sim[i, j] = cosine(group_means[i], true_centroids[j])
    best, best_total = None, -np.inf
    for perm in itertools.permutations(range(k)):
        total = sum(sim[i, perm[i]] for i in range(k))
        if total > best_total:
            best, best_total = perm, total
    return best


def representation_quality(group_means: np.ndarray, true_centroids: np.ndarray,
                           assignment=None):
    """Cosine alignment of each group mean with its assigned centroid.

    Returns (r_per_context, r_mean, degenerate_flags). Zero-norm group
    means score 0 and are flagged.
    """
    if assignment is None:
        assignment = optimal_assignment(group_means, true_centroids)
    k = group_means.shape[0]
    if sorted(assignment) != list(range(k)):
        raise ConfigError("assignment must be a bijection over experts")
    flags = []
    r = np.zeros(k)
    for i in range(k):
        if np.linalg.norm(group_means[i]) <= 1e-12:
            flags.append(f"zero-norm group mean {i}")
            r[assignment[i]] = 0.0
        else:
            r[assignment[i]] = cosine(group_means[i],
                                      true_centroids[assignment[i]])
    return r.tolist(), float(r.mean()), flags


def firing_selectivity(fire_counts: np.ndarray) -> float:
    """Fraction of firing units whose firing occurred in exactly one context.

    fire_counts: (n_units, k_contexts) counts over the evaluation window.
    """
    fire_counts = np.asarray(fire_counts)
    active = (fire_counts > 0).sum(axis=1)
    fired_any = active > 0
    if not fired_any.any():
        warnings.warn("no unit fired in the evaluation window; "
                      "selectivity undefined, reporting 0")
        return 0.0
    return float((active[fired_any] == 1).mean())


def mutual_information(joint_counts: np.ndarray) -> float:
    """Plug-in MI (nats) from a contexts x experts co-occurrence table."""
    joint = np.asarray(joint_counts, dtype=float)
    if (joint < 0).any():
        raise ConfigError("joint counts must be non-negative")
    total = joint.sum()
    if total <= 0:
        raise ConfigError("joint counts must not be all zero")
    p = joint / total
    pc = p.sum(axis=1, keepdims=True)
    pk = p.sum(axis=0, keepdims=True)
    nz = p > 0
    mi = float((p[nz] * np.log(p[nz] / (pc @ pk)[nz])).sum())
    return max(mi, 0.0)


def silhouette_cosine(points: np.ndarray, labels) -> float:
    """Mean silhouette under cosine distance d(u, v) = 1 - cos(u, v).

    Singleton-cluster points score 0. Raises when fewer than two labels
    are present.
    """
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    uniq, inv = np.unique(labels, return_inverse=True)
    if uniq.size < 2:
        raise ConfigError("silhouette needs at least two labels")
    norms = np.linalg.norm(points, axis=1, keepdims=True)
    safe = np.where(norms > 1e-12, norms, 1.0)
    unit = np.where(norms > 1e-12, points / safe, 0.0)
    dist = 1.0 - unit @ unit.T
    onehot = np.zeros((points.shape[0], uniq.size))
    onehot[np.arange(points.shape[0]), inv] = 1.0
    counts = onehot.sum(axis=0)
    totals = dist @ onehot                       # (n, clusters)
    scores = np.zeros(points.shape[0])
    for i in range(points.shape[0]):
        c = inv[i]
        if counts[c] <= 1:
            continue                             # singleton scores 0
        a = totals[i, c] / (counts[c] - 1)       # self-distance is 0
        other = [totals[i, q] / counts[q]
                 for q in range(uniq.size) if q != c]
        b = min(other)
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def classify_operating_point(report: MetricsReport,
                             baseline: MetricsReport) -> str:
    """Pass / Degraded / Fail verdict against a matched no-memory baseline."""
    k = len(report.r_per_context)
    delta = report.r_mean - baseline.r_mean
    criteria = (
        report.r_mean > PASS_R,
        delta >= PASS_DELTA_R,
        report.mutual_information >= PASS_MI_FRACTION * math.log(k),
        report.firing_selectivity >= PASS_F_SEL,
    )
    if all(criteria):
        return "Pass"
    if delta < FAIL_DELTA_R:
        return "Fail"
    return "Degraded"
