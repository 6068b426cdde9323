from collections import Counter

import numpy as np
import pytest

from agent_sim import (Shift, SimConfig, apply_paradigm_shift, apportion,
                       factor_inputs, initial_factor, input_sizes, run,
                       scenario_frame, synthesize_population,
                       trajectories_frame)
from errors import (ConfigError, DimensionMismatch, DomainError, EmptyTable,
                    ZeroWeightSum)
from transcultural_model import (NoiseSpec, default_coefficients, drive,
                                 fixed_point)

TABLE_COUNTS = [5, 7, 8, 7, 9, 6, 4, 3]


@pytest.fixture(scope='module')
def base(schema):
    return default_coefficients(*input_sizes(schema))


@pytest.fixture(scope='module')
def population(table):
    return synthesize_population(table, 40, seed=5)


def test_apportion_bundled_counts():
    seats = apportion(TABLE_COUNTS, 150)
    assert sum(seats) == 150
    quotas = 150 * np.array(TABLE_COUNTS) / sum(TABLE_COUNTS)
    assert np.all(np.abs(np.array(seats) - quotas) < 1)


def test_apportion_ties_favour_earlier_cohorts():
    assert apportion([1, 1, 1], 4) == [2, 1, 1]
    assert apportion([1, 1, 1], 3) == [1, 1, 1]
    with pytest.raises(EmptyTable):
        apportion([0, 0], 10)


def test_population_shape(table, schema):
    pop = synthesize_population(table, 150, seed=1)
    assert len(pop) == 150
    assert pop.attributes.shape == (150, 28)
    assert set(np.unique(pop.attributes)) <= {0.0, 1.0}
    counts = Counter(zip(pop.societies, pop.genders))
    assert [counts[key] for key in table.keys] == apportion(TABLE_COUNTS, 150)
    agent = pop.agent(3)
    assert agent.id == 3
    assert len(agent.attributes) == len(schema)


def test_bad_population_size(table):
    with pytest.raises(ConfigError):
        synthesize_population(table, 0, seed=1)


def test_certain_and_impossible_behaviours(table, schema, replace_value):
    zeroed = replace_value(table, ('Sample 1', 'F'), 'Migration', 0.0)
    pop = synthesize_population(zeroed, 500, seed=3)
    urban, migration = schema.index('Urbanization'), schema.index('Migration')
    for i, key in enumerate(zip(pop.societies, pop.genders)):
        if key == ('Sample 3', 'F'):
            assert pop.attributes[i, urban] == 1.0
        if key == ('Sample 1', 'F'):
            assert pop.attributes[i, migration] == 0.0


def test_migration_prevalence(table, schema):
    pop = synthesize_population(table, 10000, seed=99)
    mask = [key == ('Sample 1', 'M')
            for key in zip(pop.societies, pop.genders)]
    mean = pop.attributes[mask, schema.index('Migration')].mean()
    assert abs(mean - 0.93) <= 0.02


def test_statistical_fidelity(table):
    # smallest cohort (3 of 49 respondents) still gets more than 10^4 agents
    pop = synthesize_population(table, 170000, seed=2024)
    societies, genders = np.array(pop.societies), np.array(pop.genders)

    z_scores = []
    for key in table.keys:
        rows = pop.attributes[(societies == key[0]) & (genders == key[1])]
        assert len(rows) >= 10000
        p = np.array([table.cohort(*key).values[n]
                      for n in table.schema.names]) / 100.0
        observed = rows.mean(axis=0)
        degenerate = (p == 0) | (p == 1)
        assert np.array_equal(observed[degenerate], p[degenerate])
        se = np.sqrt(p * (1 - p) / len(rows))[~degenerate]
        z_scores.extend(np.abs(observed[~degenerate] - p[~degenerate]) / se)

    z_scores = np.array(z_scores)
    assert np.all(z_scores < 5)
    assert np.mean(z_scores > 3) <= 0.03


def test_factor_inputs_mapping(schema):
    attributes = np.zeros(len(schema))
    attributes[schema.indices('resultant')[:3]] = 1.0
    attributes[schema.index('Literacy')] = 1.0
    attributes[schema.index('Urbanization')] = 1.0
    inputs = factor_inputs(attributes, schema)
    assert inputs.q == 0.5
    assert len(inputs.x) == 17 and len(inputs.z) == 5
    assert sum(inputs.z) == 1.0 and sum(inputs.x) == 1.0
    assert input_sizes(schema) == (17, 5)
    assert initial_factor(attributes, schema) == pytest.approx(5 / 28)


def test_zero_weights_stop_the_simulation(schema, table, base):
    attributes = np.full(len(schema), 0.5)
    with pytest.raises(ZeroWeightSum):
        initial_factor(attributes, schema.with_weights(np.zeros(len(schema))))

    zero = table.__class__(schema.with_weights(np.zeros(len(schema))),
                           table.cohorts, table.stored_aggregate)
    population = synthesize_population(zero, 4, seed=0)
    with pytest.raises(ZeroWeightSum):
        run(population, SimConfig(base, steps=3))


def test_factor_inputs_outside_unit_interval(schema):
    attributes = np.zeros(len(schema))
    attributes[schema.index('Literacy')] = 1.5
    with pytest.raises(DomainError):
        factor_inputs(attributes, schema)


def test_run_is_deterministic_and_parallel_safe(population, base):
    noise = NoiseSpec('gaussian', 0.05, seed=8)
    serial = run(population,
                 SimConfig(base, steps=20, seed=8, noise=noise, n_jobs=1))
    again = run(population,
                SimConfig(base, steps=20, seed=8, noise=noise, n_jobs=1))
    pooled = run(population,
                 SimConfig(base, steps=20, seed=8, noise=noise, n_jobs=2))
    assert np.array_equal(serial.trajectories, again.trajectories)
    assert np.array_equal(serial.trajectories, pooled.trajectories)
    assert serial.config_digest == pooled.config_digest != SimConfig(
        base, steps=20, seed=9, noise=noise).digest()

    other = run(population, SimConfig(base, steps=20, seed=9, noise=noise))
    assert not np.array_equal(serial.trajectories, other.trajectories)


def test_final_values_reach_fixed_points(population, base):
    result = run(population, SimConfig(base, steps=50))
    assert result.trajectories.shape == (len(population), 51)
    for agent in result.agents:
        star = fixed_point(base, agent.inputs)
        gap = abs(agent.trajectory[0] - star)
        assert abs(agent.trajectory[-1] - star) <= 0.4**50 * gap + 1e-12


def test_zero_steps(population, base):
    result = run(population, SimConfig(base, steps=0))
    assert result.trajectories.shape == (len(population), 1)
    expected = [
        initial_factor(row, population.schema)
        for row in population.attributes
    ]
    assert result.final_values.tolist() == expected


def test_memoryless_after_shift(population, base):
    config = SimConfig(base,
                       steps=50,
                       shifts=(Shift(25, base.replace(alpha=0.0)), ))
    result = run(population, config)
    assert result.shift_steps == (25, )
    for agent in result.agents:
        level = drive(base, agent.inputs)
        np.testing.assert_allclose(agent.trajectory[25:], level, atol=1e-15)
        v0 = agent.trajectory[0]
        before = 0.4**24 * v0 + (1 - 0.4**24) * fixed_point(base, agent.inputs)
        assert agent.trajectory[24] == pytest.approx(before, abs=1e-12)


def test_apply_paradigm_shift(base):
    early, late = base.replace(alpha=0.1), base.replace(alpha=0.9)
    plain = SimConfig(base, steps=50)
    assert all(apply_paradigm_shift(plain, t) == base for t in range(51))

    config = SimConfig(base, steps=50, shifts=(Shift(10, early),
                                               Shift(30, late)))
    assert apply_paradigm_shift(config, 9) == base
    assert apply_paradigm_shift(config, 10) == early
    assert apply_paradigm_shift(config, 20) == early
    assert apply_paradigm_shift(config, 30) == late
    assert apply_paradigm_shift(config, 50) == late


@pytest.mark.parametrize('steps', [(10, 10), (20, 10), (0, ), (60, )])
def test_bad_shift_schedules(base, steps):
    shifts = tuple(Shift(s, base) for s in steps)
    with pytest.raises(ConfigError):
        SimConfig(base, steps=50, shifts=shifts)


def test_wrong_coefficient_length(population, base):
    with pytest.raises(DimensionMismatch):
        run(population, SimConfig(base.replace(beta=(0.1, )), steps=5))


def test_frames(population, base):
    result = run(population, SimConfig(base, steps=4))
    df = trajectories_frame(result)
    assert list(df.columns) == ['agent_id', 'society', 'gender', 'v_0', 'v_1',
                                'v_2', 'v_3', 'v_4']
    assert len(df) == len(population)

    summary = scenario_frame(result)
    assert len(summary) == len(set(population.societies)) * 5
    assert np.all(summary['min'] <= summary['mean'])
    assert np.all(summary['mean'] <= summary['max'])
