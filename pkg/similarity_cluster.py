"""Weighted attribute similarity and k-medoids clustering of agents

similarity(I, R) = sum_i w_i * sim(f_i^I, f_i^R) / sum_i w_i
with the per-attribute kernel sim(a, b) = 1 - |a - b|. Clustering runs PAM
(build + swap, restarted from several starting sets) on the dissimilarity
d = 1 - similarity.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist, squareform
from sklearn.metrics import silhouette_samples

from errors import DimensionMismatch, DomainError, InvalidK, ZeroWeightSum

logger = logging.getLogger(__name__)

# up to this many medoid sets, every set is a swap-phase start
EXHAUSTIVE_STARTS = 100


@dataclass(frozen=True)
class Clustering:
    k: int
    assignments: np.ndarray
    medoids: Tuple[int, ...]
    objective: float
    history: Tuple[float, ...] = field(default_factory=tuple)

    def members(self, cluster):
        return np.flatnonzero(self.assignments == cluster)

    @property
    def sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


def attr_similarity(a, b):
    """Per-attribute similarity 1 - |a - b| for values in [0, 1]

    Works element-wise on arrays.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    for values in (a, b):
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise DomainError('Attribute values must lie in [0, 1]')
    sim = 1.0 - np.abs(a - b)
    return float(sim) if sim.ndim == 0 else sim


def check_weights(weights, length=None):
    weights = np.asarray(weights, dtype=np.float64)
    if length is not None and weights.shape != (length, ):
        raise DimensionMismatch('weights', length, weights.size)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise DomainError('Weights must be finite and non-negative')
    if not np.sum(weights) > 0:
        raise ZeroWeightSum()
    return weights


def weighted_similarity(feat_i, feat_r, weights):
    """Weighted mean of per-attribute similarities

    Args:
        feat_i (array): input feature vector
        feat_r (array): retrieved feature vector
        weights (array): importance weights, non-negative, positive sum

    Returns:
        float: similarity in [0, 1]
    """
    feat_i = np.asarray(feat_i, dtype=np.float64)
    feat_r = np.asarray(feat_r, dtype=np.float64)
    if feat_i.shape != feat_r.shape:
        raise DimensionMismatch('feature vectors', feat_i.size, feat_r.size)
    weights = check_weights(weights, feat_i.size)
    sims = attr_similarity(feat_i, feat_r)
    return float(np.sum(weights * sims) / np.sum(weights))


def similarity_matrix(features, weights):
    """Pairwise weighted similarity

    Args:
        features (np.ndarray or Population): (n, d) feature rows
        weights (array): importance weights

    Returns:
        np.ndarray: symmetric (n, n) matrix with unit diagonal
    """
    features = np.asarray(getattr(features, 'attributes', features),
                          dtype=np.float64)
    if features.ndim != 2 or features.shape[0] == 0:
        raise DimensionMismatch('population', 'n >= 1', features.shape[0])
    weights = check_weights(weights, features.shape[1])
    attr_similarity(features, features)

    n = features.shape[0]
    if n == 1:
        return np.ones((1, 1))
    # pdist visits every unordered pair once
    condensed = pdist(features,
                      lambda u, v: weighted_similarity(u, v, weights))
    matrix = squareform(condensed, checks=False)
    np.fill_diagonal(matrix, 1.0)
    logger.debug('Similarity matrix over %d agents', n)
    return matrix


def dissimilarity(matrix):
    dist = 1.0 - np.asarray(matrix, dtype=np.float64)
    np.fill_diagonal(dist, 0.0)
    return dist


def total_cost(dist, medoids):
    """Sum over agents of the dissimilarity to the closest medoid"""
    return float(np.sum(np.min(dist[:, list(medoids)], axis=1)))


def assign(dist, medoids):
    """Cluster index of each agent (ties to the lower medoid id)"""
    medoids = list(medoids)
    labels = np.argmin(dist[:, medoids], axis=1)
    labels[medoids] = np.arange(len(medoids))
    return labels


def _build(dist, k):
    n = dist.shape[0]
    medoids = [int(np.argmin(dist.sum(axis=1)))]
    nearest = dist[:, medoids[0]].copy()
    while len(medoids) < k:
        best, best_cost = None, np.inf
        for cand in range(n):
            if cand in medoids:
                continue
            cost = np.sum(np.minimum(nearest, dist[:, cand]))
            if cost < best_cost:
                best, best_cost = cand, cost
        medoids.append(best)
        nearest = np.minimum(nearest, dist[:, best])
    return sorted(medoids)


def _swap_phase(dist, medoids, max_iter):
    """Best-improvement swaps from one starting set

    Returns:
        tuple: (sorted medoids, objective history)
    """
    n = dist.shape[0]
    medoids = sorted(medoids)
    cost = total_cost(dist, medoids)
    history = [cost]
    for _ in range(max_iter):
        best_swap, best_cost = None, cost
        # scan in (medoid, candidate) order; strict < keeps the lowest pair
        for pos in range(len(medoids)):
            rest = medoids[:pos] + medoids[pos + 1:]
            base = np.min(dist[:, rest], axis=1) if rest else np.full(
                n, np.inf)
            costs = np.minimum(base[:, None], dist).sum(axis=0)
            costs[medoids] = np.inf
            cand = int(np.argmin(costs))
            if costs[cand] < best_cost:
                best_swap, best_cost = (pos, cand), costs[cand]
        if best_swap is None:
            break
        pos, cand = best_swap
        trial = sorted(medoids[:pos] + medoids[pos + 1:] + [cand])
        new_cost = total_cost(dist, trial)
        if not new_cost < cost:
            break
        medoids, cost = trial, new_cost
        assert cost <= history[-1], "k-medoids objective increased"
        history.append(cost)
    else:
        logger.warning('k-medoids stopped after %d swap rounds', max_iter)
    return medoids, history


def _starts(dist, k, seed, init, n_init):
    """Starting medoid sets, BUILD first when init='build'

    Small problems start from every medoid set, larger ones from n_init
    random sets drawn from the seed.
    """
    n = dist.shape[0]
    starts = [_build(dist, k)] if init == 'build' else []
    if comb(n, k) <= EXHAUSTIVE_STARTS:
        starts.extend(list(c) for c in combinations(range(n), k))
    else:
        rng = np.random.default_rng(seed)
        draws = n_init + (0 if starts else 1)
        starts.extend(
            sorted(rng.choice(n, size=k, replace=False).tolist())
            for _ in range(draws))
    unique = []
    for start in starts:
        if start not in unique:
            unique.append(start)
    return unique


def cluster_kmedoids(matrix,
                     k,
                     seed=0,
                     init='build',
                     n_init=10,
                     max_iter=1000):
    """PAM k-medoids on d = 1 - similarity

    The swap phase runs from several starting sets and the lowest objective
    wins, ties going to the lowest medoid tuple.

    Args:
        matrix (np.ndarray): similarity matrix
        k (int): number of clusters
        seed (int, optional): seed for the random starts. Defaults to 0.
        init (str, optional): 'build' (greedy PAM build plus random starts)
                              or 'random' (random starts only).
        n_init (int, optional): random starts. Defaults to 10.
        max_iter (int, optional): cap on swap rounds per start.

    Returns:
        Clustering: medoids sorted by agent id, cluster c owned by medoids[c]
    """
    dist = dissimilarity(matrix)
    n = dist.shape[0]
    if not 1 <= k <= n:
        raise InvalidK(k, n)
    if init not in ('build', 'random'):
        raise ValueError(f'Unknown k-medoids init {init!r}')

    best = None
    starts = _starts(dist, k, seed, init, max(int(n_init), 0))
    for start in starts:
        medoids, history = _swap_phase(dist, start, max_iter)
        key = (history[-1], tuple(medoids))
        if best is None or key < best[0]:
            best = key, medoids, history
    _, medoids, history = best

    logger.debug('k-medoids k=%d objective=%.6f swaps=%d starts=%d', k,
                 history[-1], len(history) - 1, len(starts))
    return Clustering(k, assign(dist, medoids), tuple(int(m)
                                                     for m in medoids),
                      history[-1], tuple(history))


def silhouette(matrix, clustering):
    """Mean silhouette coefficient on d = 1 - similarity

    Agents whose own and nearest-other mean distances are both zero count 0,
    and so do members of singleton clusters.
    """
    n = np.asarray(matrix).shape[0]
    if clustering.k < 2 or clustering.k > n:
        raise InvalidK(clustering.k, n)
    if clustering.k == n:
        return 0.0
    dist = dissimilarity(matrix)
    values = silhouette_samples(dist,
                                clustering.assignments,
                                metric='precomputed')
    return float(np.mean(np.nan_to_num(values)))


def auto_k(matrix, k_min=2, k_max=10, seed=0, n_init=10):
    """Scan k by silhouette

    Returns:
        tuple: (best Clustering, {k: silhouette}); ties go to the smaller k
    """
    n = np.asarray(matrix).shape[0]
    k_max = min(k_max, n - 1)
    if k_min < 2 or k_max < k_min:
        raise InvalidK(k_min, n)
    scores, best = {}, None
    for k in range(k_min, k_max + 1):
        clustering = cluster_kmedoids(matrix, k, seed=seed, n_init=n_init)
        scores[k] = silhouette(matrix, clustering)
        logger.info('k=%d silhouette=%.4f', k, scores[k])
        if best is None or scores[k] > scores[best.k]:
            best = clustering
    return best, scores


def purity(clustering, labels):
    """Fraction of agents whose cluster's majority label is their own"""
    labels = pd.Series(list(labels))
    matched = 0
    for cluster in range(clustering.k):
        members = labels.iloc[clustering.members(cluster)]
        if len(members):
            matched += int(members.value_counts().iloc[0])
    return matched / len(labels)


def matrix_frame(matrix, ids=None):
    ids = list(range(len(matrix))) if ids is None else list(ids)
    return pd.DataFrame(matrix, index=ids, columns=ids).rename_axis('agent_id')


def assignments_frame(clustering, population=None):
    """agent_id, [society, gender,] cluster, medoid id, is_medoid"""
    n = len(clustering.assignments)
    df = pd.DataFrame({
        'agent_id': np.arange(n),
        'cluster': clustering.assignments,
    })
    if population is not None:
        df.insert(1, 'society', list(population.societies))
        df.insert(2, 'gender', list(population.genders))
    df['medoid'] = [clustering.medoids[c] for c in clustering.assignments]
    df['is_medoid'] = df['agent_id'].isin(clustering.medoids)
    return df
