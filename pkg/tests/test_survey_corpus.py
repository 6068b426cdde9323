from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import (DuplicateCohort, InputError, MalformedRow,
                    MissingAttribute, OutOfRange, SchemaError, UnknownCohort)
from survey_corpus import (AGGREGATE_LABEL, DEFAULT_SURVEY, TABLE1_ROWS,
                           Category, cohort_matrix, cohort_vector,
                           load_schema, load_survey, parse_survey,
                           save_survey, society_labels, table_frame,
                           validate)

INVERSION = 'Inversion of Status'


def test_bundled_table_is_valid(table):
    assert validate(table) == []
    assert len(table.cohorts) == 8
    assert len(table.schema) == 28
    assert table.societies == ['Sample 1', 'Sample 2', 'Sample 3', 'Sample 4']
    assert [c.n for c in table.cohorts] == [5, 7, 8, 7, 9, 6, 4, 3]


def test_schema_categories(schema):
    assert len(schema.indices(Category.MODERNIZATION)) == 11
    assert len(schema.indices(Category.INTERVENING)) == 11
    assert len(schema.indices(Category.RESULTANT)) == 6
    cats = schema.category_map()
    assert cats['Inversion of Status (intervening)'] is Category.INTERVENING
    assert cats['Inversion of Status (resultant)'] is Category.INTERVENING
    assert np.all(schema.weights == 1.0)


def test_schema_override(tmp_path):
    override = tmp_path / 'schema.yaml'
    override.write_text('attributes:\n'
                        '  Literacy: {weight: 3.5}\n'
                        '  Work Ethic: {category: intervening}\n')
    schema = load_schema(str(override))
    assert schema.attributes[schema.index('Literacy')].weight == 3.5
    assert schema.category_map()['Work Ethic'] is Category.INTERVENING


@pytest.mark.parametrize('body', [
    'attributes:\n  Nonexistent: {weight: 1}\n',
    'attributes:\n  Literacy: {weight: -1}\n',
    'attributes:\n  Literacy: {category: cultural}\n',
    'status_attributes: [Nonexistent]\n',
])
def test_bad_schema_override(tmp_path, body):
    override = tmp_path / 'schema.yaml'
    override.write_text(body)
    with pytest.raises(SchemaError):
        load_schema(str(override))


def test_published_values(table):
    assert table.cohort('Sample 3', 'F').values['Urbanization'] == 100
    assert table.cohort('Sample 3', 'M').values['Dependency'] == 16.5
    assert table.stored_aggregate[('Sample 1', 'F')] == 5.6
    assert list(table.stored_aggregate.values()) == [
        5.6, 7.2, 12, 14, 11.1, 14.9, 12.7, 10.3
    ]


def test_cohort_vector(table, schema):
    vec = cohort_vector(table, 'Sample 4', 'F')
    assert vec.shape == (28, )
    assert vec[schema.index('Literacy')] == 0.82
    vec = cohort_vector(table, 'Sample 2', 'F')
    assert vec[schema.index('Inversion of Status (intervening)')] == 1.0
    assert vec[schema.index('Inversion of Status (resultant)')] == 0.39

    matrix = cohort_matrix(table)
    assert matrix.shape == (8, 28)
    assert np.all((matrix >= 0) & (matrix <= 1))


def test_unknown_cohort(table):
    with pytest.raises(UnknownCohort):
        cohort_vector(table, 'Sample 9', 'F')


def test_round_trip(table, tmp_path):
    path = str(tmp_path / 'survey.csv')
    save_survey(table, path)
    again = load_survey(path, table.schema)
    assert again == table
    assert again.stored_aggregate == table.stored_aggregate

    path2 = str(tmp_path / 'survey2.csv')
    save_survey(again, path2)
    with open(path) as first, open(path2) as second:
        assert first.read() == second.read()


def test_out_of_range_rejected(bundled_rows, write_rows, schema):
    rows = [list(row) for row in bundled_rows]
    urban = [row[0] for row in rows].index('Urbanization')
    rows[urban][1] = '105'
    with pytest.raises(OutOfRange) as err:
        load_survey(write_rows(rows), schema)
    assert err.value.name == 'Urbanization'
    assert err.value.cohort == ('Sample 1', 'F')
    assert err.value.value == 105


def test_removed_row_gives_one_diagnostic_per_cohort(bundled_rows, schema):
    rows = [row for row in bundled_rows if row[0] != 'Longevity']
    diagnostics = validate(parse_survey(rows, schema))
    assert len(diagnostics) == 8
    assert {d.rule for d in diagnostics} == {'missing_attribute'}
    assert {d.attribute for d in diagnostics} == {'Longevity'}
    assert isinstance(diagnostics[0].to_error(), MissingAttribute)


def test_zero_respondents(bundled_rows, schema):
    rows = [list(row) for row in bundled_rows]
    rows[2][3] = '0'
    diagnostics = validate(parse_survey(rows, schema))
    assert [d.rule for d in diagnostics] == ['respondent_count']
    assert diagnostics[0].cohort == ('Sample 2', 'F')


def test_duplicate_cohort(bundled_rows, schema):
    rows = [list(row) for row in bundled_rows]
    rows[1][2] = 'F'
    with pytest.raises(DuplicateCohort):
        parse_survey(rows, schema)


@pytest.mark.parametrize('line, mutate', [
    (5, lambda row: row[:-1]),
    (6, lambda row: [row[0], 'abc'] + row[2:]),
    (4, lambda row: ['Nonsense'] + row[1:]),
    (2, lambda row: ['gender', 'X'] + row[2:]),
])
def test_malformed_rows_are_located(bundled_rows, schema, line, mutate):
    rows = [list(row) for row in bundled_rows]
    rows[line - 1] = mutate(rows[line - 1])
    with pytest.raises(MalformedRow) as err:
        parse_survey(rows, schema)
    assert err.value.line == line


def test_percent_signs_accepted(bundled_rows, schema, table):
    rows = [list(row) for row in bundled_rows]
    rows = rows[:3] + [[row[0]] + [cell + '%' for cell in row[1:]]
                       for row in rows[3:]]
    assert parse_survey(rows, schema) == table


@pytest.mark.parametrize('seed', range(5))
def test_row_order_does_not_change_vectors(bundled_rows, schema, table, seed):
    header, body = bundled_rows[:3], bundled_rows[3:]
    rng = np.random.default_rng(seed)
    shuffled = [body[i] for i in rng.permutation(len(body))]
    # the repeated label is resolved by position, so keep those rows in order
    inversion = [row for row in body if row[0] == INVERSION]
    slots = [i for i, row in enumerate(shuffled) if row[0] == INVERSION]
    for slot, row in zip(slots, inversion):
        shuffled[slot] = row

    permuted = parse_survey(header + shuffled, schema)
    assert validate(permuted) == []
    for cohort in table.cohorts:
        assert np.array_equal(cohort_vector(permuted, *cohort.key),
                              cohort_vector(table, *cohort.key))


def test_table_frame(table):
    df = table_frame(table)
    assert df.shape == (30, 8)
    assert df.loc['N', ('Sample 1', 'M')] == 7
    assert df.loc[AGGREGATE_LABEL, ('Sample 3', 'M')] == 14.9


MUTATIONS = ['abc', '', 'nan', '-5', '105', '1e3', '50%', ' 42 ', 'M', 'F']


@settings(max_examples=200, deadline=None)
@given(row=st.integers(0, 31), col=st.integers(0, 8),
       text=st.sampled_from(MUTATIONS))
def test_mutated_files_parse_or_fail_located(bundled_rows, schema, row, col,
                                             text):
    rows = [list(r) for r in bundled_rows]
    rows[row][col] = text
    try:
        validate(parse_survey(rows, schema))
    except MalformedRow as err:
        assert 1 <= err.line <= len(rows)
        if row >= 2 and col >= 1 and text in ('abc', '', 'nan', 'M', 'F'):
            assert err.line == row + 1
    except InputError:
        pass


def test_society_labels(table):
    assert society_labels(table) == {s: s for s in table.societies}

    class Named:
        labels = {'Sample 2': 'Macau'}

    assert society_labels(Named()) == {'Sample 2': 'Macau'}


def test_invalid_utf8_is_located(tmp_path, schema):
    raw = Path(DEFAULT_SURVEY).read_bytes()
    path = tmp_path / 'latin.csv'
    path.write_bytes(raw.replace(b'Longevity', b'Longevit\xe9'))
    with pytest.raises(MalformedRow) as err:
        load_survey(str(path), schema)
    assert err.value.line == 8
    assert 'UTF-8' in str(err.value)


def test_all_zero_weights_rejected(tmp_path):
    override = tmp_path / 'schema.yaml'
    override.write_text('attributes:\n' + ''.join(
        f'  {name}: {{weight: 0}}\n' for name, _ in TABLE1_ROWS))
    with pytest.raises(SchemaError):
        load_schema(str(override))

    one = tmp_path / 'one.yaml'
    one.write_text('attributes:\n' + ''.join(
        f'  {name}: {{weight: {int(name == "Literacy")}}}\n'
        for name, _ in TABLE1_ROWS))
    assert load_schema(str(one)).weights.sum() == 1.0


def test_undecodable_schema(tmp_path):
    override = tmp_path / 'schema.yaml'
    override.write_bytes(b'attributes:\n  Literacy: {weight: 2}  # \xff\n')
    with pytest.raises(SchemaError):
        load_schema(str(override))
