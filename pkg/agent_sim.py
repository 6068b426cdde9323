"""Agent population synthesis and the multi-agent factor simulation

Agents are independent: each carries attribute realizations drawn from its
cohort's prevalences and evolves its own transcultural factor. There is no
interaction rule between agents.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from errors import ConfigError, DimensionMismatch, EmptyTable
from similarity_cluster import check_weights
from survey_corpus import Category, cohort_vector
from transcultural_model import (FactorCoefficients, FactorInputs, NoiseSpec,
                                 check_dimensions, draw_disturbances,
                                 iterate_factor)
from utils import derive_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Agent:
    id: int
    society: str
    gender: str
    attributes: np.ndarray
    inputs: FactorInputs
    trajectory: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Population:
    schema: object
    attributes: np.ndarray
    societies: Tuple[str, ...]
    genders: Tuple[str, ...]

    def __post_init__(self):
        n, width = self.attributes.shape
        if width != len(self.schema):
            raise DimensionMismatch('agent attributes', len(self.schema),
                                    width)
        if not len(self.societies) == len(self.genders) == n:
            raise DimensionMismatch('agent labels', n, len(self.societies))

    def __len__(self):
        return self.attributes.shape[0]

    def __iter__(self):
        return (self.agent(i) for i in range(len(self)))

    def agent(self, i):
        return Agent(i, self.societies[i], self.genders[i],
                     self.attributes[i],
                     factor_inputs(self.attributes[i], self.schema))

    @property
    def ids(self):
        return np.arange(len(self))


@dataclass(frozen=True)
class Shift:
    step: int
    coefficients: FactorCoefficients


@dataclass(frozen=True)
class SimConfig:
    coefficients: FactorCoefficients
    steps: int = 50
    population_size: int = 150
    seed: int = 1234
    shifts: Tuple[Shift, ...] = ()
    noise: NoiseSpec = NoiseSpec()
    n_jobs: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ConfigError(f'steps must be >= 0, got {self.steps}')
        if self.population_size < 1:
            raise ConfigError('population_size must be >= 1, '
                              f'got {self.population_size}')
        if self.seed < 0:
            raise ConfigError(f'seed must be >= 0, got {self.seed}')
        previous = 0
        for shift in self.shifts:
            if shift.step <= previous or shift.step > self.steps:
                raise ConfigError(
                    f'Paradigm shift steps must be strictly increasing and '
                    f'within (0, {self.steps}], got {shift.step}')
            previous = shift.step

    def digest(self):
        """SHA-256 of a canonical JSON rendering of the configuration"""
        payload = dict(coefficients=_coeff_dict(self.coefficients),
                       steps=self.steps,
                       population_size=self.population_size,
                       seed=self.seed,
                       shifts=[
                           dict(step=s.step,
                                coefficients=_coeff_dict(s.coefficients))
                           for s in self.shifts
                       ],
                       noise=dict(kind=self.noise.kind,
                                  scale=self.noise.scale))
        text = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class SimResult:
    population: Population
    trajectories: np.ndarray
    seed: int
    config_digest: str
    shift_steps: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def final_values(self):
        return self.trajectories[:, -1]

    @property
    def agents(self) -> List[Agent]:
        return [
            Agent(a.id, a.society, a.gender, a.attributes, a.inputs,
                  self.trajectories[a.id]) for a in self.population
        ]


def _coeff_dict(coeffs):
    return dict(alpha=coeffs.alpha,
                beta1=coeffs.beta1,
                beta=list(coeffs.beta),
                gamma=list(coeffs.gamma))


def factor_inputs(attributes, schema):
    """Map an attribute realization onto the factor model inputs

    Args:
        attributes (np.ndarray): schema-ordered values in [0, 1]
        schema (AttributeSchema): attribute schema

    Returns:
        FactorInputs: q = mean of resultant attributes, z = status
                      indicators, x = remaining modernization and
                      intervening attributes
    """
    resultant = schema.indices(Category.RESULTANT)
    status = [schema.index(name) for name in schema.status_attributes]
    x_idx = [
        i for i in schema.indices(Category.MODERNIZATION) +
        schema.indices(Category.INTERVENING) if i not in status
    ]
    x_idx.sort()
    q = float(np.mean(attributes[resultant])) if resultant else 0.0
    inputs = FactorInputs(q, tuple(float(attributes[i]) for i in x_idx),
                          tuple(float(attributes[i]) for i in status))
    inputs.check_domain()
    return inputs


def input_sizes(schema):
    """(|x|, |z|) of the inputs produced by factor_inputs"""
    inputs = factor_inputs(np.zeros(len(schema)), schema)
    return len(inputs.x), len(inputs.z)


def initial_factor(attributes, schema):
    """Weighted mean attribute level, the starting factor value"""
    weights = check_weights(schema.weights, len(schema))
    return float(np.sum(weights * attributes) / np.sum(weights))


def apportion(counts, size):
    """Largest-remainder apportionment of size over counts

    Args:
        counts (list): cohort sizes (respondents)
        size (int): total number of agents

    Returns:
        list: agents per cohort, summing to size
    """
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise EmptyTable()
    quotas = size * counts / total
    seats = np.floor(quotas).astype(int)
    remainder = size - seats.sum()
    # stable sort keeps earlier cohorts first on equal remainders
    order = np.argsort(-(quotas - seats), kind='stable')
    seats[order[:remainder]] += 1
    return seats.tolist()


def synthesize_population(table, size, seed):
    """Draw agents from the cohort prevalences

    Args:
        table (SurveyTable): survey table
        size (int): number of agents
        seed (int): population seed

    Returns:
        Population: agents in cohort order, ids 0..size-1
    """
    if size < 1:
        raise ConfigError(f'Population size must be >= 1, got {size}')
    if not table.cohorts:
        raise EmptyTable()

    allocation = apportion([cohort.n for cohort in table.cohorts], size)
    rng = np.random.default_rng(seed)

    blocks, societies, genders = [], [], []
    for cohort, count in zip(table.cohorts, allocation):
        p = cohort_vector(table, *cohort.key)
        draws = rng.random((count, len(p))) < p
        blocks.append(draws.astype(np.float64))
        societies.extend([cohort.society] * count)
        genders.extend([cohort.gender] * count)
        logger.debug('Cohort %s: %d agents', cohort.key, count)

    logger.info('Number of agents: %d', size)
    return Population(table.schema, np.vstack(blocks), tuple(societies),
                      tuple(genders))


def apply_paradigm_shift(config, step):
    """Coefficients producing v_step

    A shift scheduled at step s governs the transition v_{s-1} -> v_s and
    every later one until the next shift.

    Args:
        config (SimConfig): simulation configuration
        step (int): step index

    Returns:
        FactorCoefficients: active coefficients
    """
    active = config.coefficients
    for shift in config.shifts:
        if shift.step <= step:
            active = shift.coefficients
        else:
            break
    return active


def _segments(config):
    """(first step, last step, coefficients) blocks of constant coefficients"""
    bounds = [1] + [shift.step for shift in config.shifts] + \
        [config.steps + 1]
    return [(start, end - 1, apply_paradigm_shift(config, start))
            for start, end in zip(bounds[:-1], bounds[1:]) if end > start]


def simulate_agent(args):
    """Trajectory of a single agent (picklable for Pool.map)"""
    agent_id, attributes, schema, config = args
    inputs = factor_inputs(attributes, schema)
    u = draw_disturbances(config.noise, config.steps,
                          seed=_agent_seed(config, agent_id))

    values = np.empty(config.steps + 1)
    values[0] = initial_factor(attributes, schema)
    for start, stop, coeffs in _segments(config):
        segment = iterate_factor(values[start - 1], coeffs, inputs,
                                 u[start - 1:stop])
        values[start:stop + 1] = segment[1:]
    return values


def _agent_seed(config, agent_id):
    return int(
        derive_rng(config.seed, agent_id).integers(0, 2**63 - 1,
                                                   dtype=np.int64))


def run(population, config):
    """Run every agent for config.steps steps

    Args:
        population (Population): agents
        config (SimConfig): simulation configuration

    Returns:
        SimResult: one trajectory of length steps + 1 per agent
    """
    n_x, n_z = input_sizes(population.schema)
    for coeffs in [config.coefficients] + \
            [shift.coefficients for shift in config.shifts]:
        check_dimensions(coeffs, FactorInputs(0.0, (0.0, ) * n_x,
                                              (0.0, ) * n_z))

    logger.info('Simulating %d agents for %d steps (%d paradigm shifts)',
                len(population), config.steps, len(config.shifts))
    jobs = [(i, population.attributes[i], population.schema, config)
            for i in range(len(population))]
    if config.n_jobs > 1 and len(jobs) > 1:
        with Pool(config.n_jobs) as pool:
            values = pool.map(simulate_agent, jobs)
    else:
        values = [simulate_agent(job) for job in jobs]

    trajectories = np.vstack(values) if values else np.zeros(
        (0, config.steps + 1))
    return SimResult(population, trajectories, config.seed, config.digest(),
                     tuple(shift.step for shift in config.shifts))


def trajectories_frame(result):
    """agent_id, society, gender, v_0..v_T"""
    pop = result.population
    df = pd.DataFrame(
        result.trajectories,
        columns=[f'v_{t}' for t in range(result.trajectories.shape[1])])
    df.insert(0, 'gender', list(pop.genders))
    df.insert(0, 'society', list(pop.societies))
    df.insert(0, 'agent_id', pop.ids)
    return df


def scenario_frame(result):
    """Per-society mean / min / max of the factor at every step"""
    df = trajectories_frame(result).drop(columns=['agent_id', 'gender'])
    long = df.melt(id_vars='society', var_name='step', value_name='factor')
    long['step'] = long['step'].str[2:].astype(int)
    summary = long.groupby(['society', 'step'], sort=True)['factor'].agg(
        ['mean', 'min', 'max']).reset_index()
    return summary
