import csv

import pytest

from survey_corpus import (DEFAULT_SURVEY, CohortObservation, SurveyTable,
                           load_schema, load_survey)


@pytest.fixture(scope='session')
def schema():
    return load_schema()


@pytest.fixture(scope='session')
def table(schema):
    return load_survey(DEFAULT_SURVEY, schema)


@pytest.fixture(scope='session')
def bundled_rows():
    with open(DEFAULT_SURVEY, 'r', encoding='utf-8', newline='') as file_h:
        return [row for row in csv.reader(file_h)]


@pytest.fixture(scope='session')
def replace_value():
    """Copy of a table with one cohort value changed"""

    def _replace(table, key, name, value):
        cohorts = tuple(
            CohortObservation(c.society, c.gender, c.n, {
                **c.values, name: value
            }) if c.key == key else c for c in table.cohorts)
        return SurveyTable(table.schema, cohorts, table.stored_aggregate)

    return _replace


@pytest.fixture
def write_rows(tmp_path):

    def _write(rows, name='survey.csv'):
        path = tmp_path / name
        with open(path, 'w', encoding='utf-8', newline='') as file_h:
            csv.writer(file_h, lineterminator='\n').writerows(rows)
        return str(path)

    return _write
