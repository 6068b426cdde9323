import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
import pandas as pd
import yaml

from errors import ConfigError, MissingHdi, ZeroWeightSum
from similarity_cluster import similarity_matrix
from survey_corpus import (GENDERS, cohort_matrix, cohort_vector,
                           society_labels)
from utils import project_path

logger = logging.getLogger(__name__)

DEFAULT_HDI = project_path('data', 'hdi.yaml')
DEFAULT_RAMP_COLORS = ('#7b3294', '#f28e2b', '#2ca02c', '#1f77b4')


@dataclass(frozen=True)
class HdiConfig:
    hdi: Dict[str, float]
    ramp: Tuple[Tuple[float, str], ...]
    labels: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for society, value in self.hdi.items():
            if not 0.0 <= value <= 1.0:
                raise ConfigError(
                    f'HDI of {society!r} must lie in [0, 1], got {value}')
        thresholds = [threshold for threshold, _ in self.ramp]
        if not thresholds or any(
                b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ConfigError('HDI ramp thresholds must be strictly '
                              'increasing')

    def bin(self, society):
        """Index of the ramp bin holding the society's HDI"""
        if society not in self.hdi:
            raise MissingHdi(society)
        value = self.hdi[society]
        index = 0
        for i, (threshold, _) in enumerate(self.ramp):
            if value >= threshold:
                index = i
        return index

    def color(self, society):
        return self.ramp[self.bin(society)][1]

    def label(self, society):
        return self.labels.get(society, society)


def quantile_ramp(values, colors=DEFAULT_RAMP_COLORS):
    """Quantile bins over the configured HDI values

    Args:
        values (list): HDI values
        colors (list): one colour per bin, lowest first

    Returns:
        tuple: ((threshold, color), ...) with strictly increasing thresholds
    """
    quantiles = np.linspace(0, 1, len(colors), endpoint=False)
    thresholds = np.quantile(np.asarray(values, dtype=np.float64), quantiles)
    ramp = []
    for threshold, color in zip(thresholds, colors):
        if ramp and threshold <= ramp[-1][0]:
            continue
        ramp.append((float(threshold), color))
    return tuple(ramp)


def load_hdi(path=None):
    """Read the HDI colour configuration

    Args:
        path (str, optional): user file. Defaults to the shipped data/hdi.yaml.

    Returns:
        HdiConfig: HDI values, labels and colour ramp
    """
    path = path or DEFAULT_HDI
    try:
        with open(path, 'r', encoding='utf-8') as file_h:
            content = yaml.safe_load(file_h) or {}
    except (OSError, UnicodeDecodeError, yaml.YAMLError) as err:
        raise ConfigError(f'Cannot read HDI config {path}: {err}')

    societies = content.get('societies') or {}
    if not societies:
        raise ConfigError(f'{path} lists no societies')
    hdi, labels = {}, {}
    for society, entry in societies.items():
        entry = entry if isinstance(entry, dict) else {'hdi': entry}
        try:
            hdi[str(society)] = float(entry['hdi'])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f'Bad HDI entry for {society!r} in {path}')
        labels[str(society)] = str(entry.get('label', society))

    if content.get('ramp'):
        ramp = tuple((float(item['threshold']), str(item['color']))
                     for item in content['ramp'])
    else:
        colors = content.get('ramp_colors') or DEFAULT_RAMP_COLORS
        ramp = quantile_ramp(list(hdi.values()), colors)
    return HdiConfig(hdi, ramp, labels)


def score_transculturality(attributes, schema):
    """Weighted mean attribute level

    Args:
        attributes (array): schema-aligned values in [0, 1]
        schema (AttributeSchema): carries the importance weights

    Returns:
        float: score in [0, 1]
    """
    weights = schema.weights
    if not np.sum(weights) > 0:
        raise ZeroWeightSum()
    return float(
        np.sum(weights * np.asarray(attributes, dtype=np.float64)) /
        np.sum(weights))


def agent_scores(population):
    return np.array([
        score_transculturality(row, population.schema)
        for row in population.attributes
    ])


def rank_cohorts(table):
    """Cohorts ordered by score, highest first

    Ties are broken by society id, then gender.

    Returns:
        list: (society, gender, score) tuples
    """
    scored = [(cohort.society, cohort.gender,
               score_transculturality(cohort_vector(table, *cohort.key),
                                      table.schema))
              for cohort in table.cohorts]
    return sorted(scored, key=lambda item: (-item[2], item[0], item[1]))


def ranking_frame(table, hdi=None):
    labels = society_labels(hdi or table)
    rows = []
    for rank, (society, gender, score) in enumerate(rank_cohorts(table), 1):
        rows.append({
            'rank': rank,
            'society': society,
            'label': labels.get(society, society),
            'gender': gender,
            'n': table.cohort(society, gender).n,
            'score': score,
            'aggregate_as_published':
            table.stored_aggregate.get((society, gender), np.nan),
        })
    return pd.DataFrame(rows)


def gender_gap(table, schema=None):
    """F - M difference per society and attribute, in percentage points

    The last row holds the difference of the transculturality scores
    (also in points).
    """
    schema = schema or table.schema
    columns = {}
    for society in table.societies:
        keys = [(society, gender) for gender in GENDERS]
        if not all(key in table.keys for key in keys):
            continue
        female, male = (cohort_vector(table, *key) for key in keys)
        gap = list((female - male) * 100.0)
        gap.append((score_transculturality(female, schema) -
                    score_transculturality(male, schema)) * 100.0)
        columns[society] = gap
    index = schema.names + ['score']
    return pd.DataFrame(columns, index=index).rename_axis('attribute')


def cohort_similarity(table, weights=None):
    """Weighted similarity between every pair of cohorts"""
    weights = table.schema.weights if weights is None else weights
    matrix = similarity_matrix(cohort_matrix(table), weights)
    labels = [f'{society}-{gender}' for society, gender in table.keys]
    return pd.DataFrame(matrix, index=labels,
                        columns=labels).rename_axis('cohort')


def cluster_summary(clustering, population, factor_scores, hdi=None):
    """One row per cluster: size, medoid, majority society, mean scores"""
    societies = pd.Series(list(population.societies))
    attribute_scores = agent_scores(population)
    rows = []
    for cluster in range(clustering.k):
        members = clustering.members(cluster)
        medoid = clustering.medoids[cluster]
        counts = societies.iloc[members].value_counts()
        # majority ties go to the lowest society id
        top = counts[counts == counts.max()].index
        majority = sorted(top)[0]
        rows.append({
            'cluster': cluster,
            'size': len(members),
            'medoid': medoid,
            'medoid_society': population.societies[medoid],
            'majority_society': majority,
            'majority_share': counts.max() / len(members),
            'mean_factor': float(np.mean(factor_scores[members])),
            'mean_attribute_score': float(np.mean(
                attribute_scores[members])),
            'hdi_color': hdi.color(majority) if hdi else '',
        })
    return pd.DataFrame(rows)
