"""Attribute taxonomy and survey table ingestion

The survey file has the shape of the published by-gender comparison table:

    attribute,Sample 1,Sample 1,Sample 2,...   <- society of each column
    gender,F,M,F,...                           <- gender of each column
    N,5,7,8,...                                <- respondents per cohort
    Health Technology,22,22,21,...             <- one row per attribute (%)
    ...
    Sum of Transculturality (mean),5.6,...     <- published aggregate row
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

from errors import (DuplicateCohort, EmptyTable, InputError, MalformedRow,
                    MissingAttribute, OutOfRange, SchemaError, UnknownCohort)
from utils import project_path

logger = logging.getLogger(__name__)

GENDERS = ('F', 'M')
SCALE = (0.0, 100.0)
AGGREGATE_LABEL = 'Sum of Transculturality (mean)'
DEFAULT_SCHEMA = project_path('data', 'schema.yaml')
DEFAULT_SURVEY = project_path('data', 'table1.csv')

# (name, published row label) in table order
TABLE1_ROWS = (
    ('Health Technology', 'Health Technology'),
    ('Economic Technology', 'Economic Technology'),
    ('Urbanization', 'Urbanization'),
    ('Education', 'Education'),
    ('Longevity', 'Longevity'),
    ('New Urban Occupation', 'New Urban Occupation'),
    ('Migration', 'Migration'),
    ('Social Mobility', 'Social Mobility'),
    ('Literacy', 'Literacy'),
    ('Mass Educated', 'Mass Educated'),
    ('Technology Trends', 'Technology Trends'),
    ('Aging of Population', 'Aging of Population'),
    ('Youthful Aspects', 'Youthful Aspects'),
    ('Neolocal Marriage', 'Neolocal Marriage'),
    ('Inversion of Status (intervening)', 'Inversion of Status'),
    ('Children more educated than parents',
     'Children more educated than parents'),
    ('Generational competition', 'Generational competition'),
    ('Jobs of Aged obsoleted', 'Jobs of Aged obsoleted'),
    ('Residential segregation', 'Residential segregation'),
    ('Social Distance', 'Social Distance'),
    ('Inversion of Status (resultant)', 'Inversion of Status'),
    ('Retirement', 'Retirement'),
    ('Work Ethic', 'Work Ethic'),
    ('Dependency', 'Dependency'),
    ('Social Segregation', 'Social Segregation'),
    ('Cultural of Youth', 'Cultural of Youth'),
    ('Lower Status of Aged', 'Lower Status of Aged'),
    ('Intellectual and Moral Segregation',
     'Intellectual and Moral Segregation'),
)


class Category(Enum):
    MODERNIZATION = 'modernization'
    INTERVENING = 'intervening'
    RESULTANT = 'resultant'


@dataclass(frozen=True)
class AttributeDef:
    name: str
    label: str
    category: Category
    weight: float = 1.0
    scale: Tuple[float, float] = SCALE


@dataclass(frozen=True)
class AttributeSchema:
    attributes: Tuple[AttributeDef, ...]
    status_attributes: Tuple[str, ...] = ()

    def __len__(self):
        return len(self.attributes)

    @property
    def names(self):
        return [attr.name for attr in self.attributes]

    @property
    def weights(self):
        return np.array([attr.weight for attr in self.attributes],
                        dtype=np.float64)

    def index(self, name):
        return self.names.index(name)

    def indices(self, category):
        """Schema positions of the attributes in a category"""
        category = Category(category)
        return [
            i for i, attr in enumerate(self.attributes)
            if attr.category is category
        ]

    def category_map(self):
        return {attr.name: attr.category for attr in self.attributes}

    def with_weights(self, weights):
        """Copy of the schema with new importance weights (schema order)"""
        attributes = tuple(
            AttributeDef(a.name, a.label, a.category, float(w), a.scale)
            for a, w in zip(self.attributes, weights))
        return AttributeSchema(attributes, self.status_attributes)


@dataclass(frozen=True)
class CohortObservation:
    society: str
    gender: str
    n: int
    values: Dict[str, float] = field(default_factory=dict)

    @property
    def key(self):
        return (self.society, self.gender)


@dataclass(frozen=True)
class SurveyTable:
    schema: AttributeSchema
    cohorts: Tuple[CohortObservation, ...]
    stored_aggregate: Dict[Tuple[str, str], float] = field(
        default_factory=dict)

    @property
    def keys(self):
        return [cohort.key for cohort in self.cohorts]

    @property
    def societies(self):
        return list(dict.fromkeys(cohort.society for cohort in self.cohorts))

    def cohort(self, society, gender):
        for cohort in self.cohorts:
            if cohort.key == (society, gender):
                return cohort
        raise UnknownCohort(society, gender)


@dataclass(frozen=True)
class Diagnostic:
    cohort: Optional[Tuple[str, str]]
    attribute: Optional[str]
    rule: str
    message: str
    value: Optional[float] = None

    def to_error(self):
        if self.rule == 'missing_attribute':
            return MissingAttribute(self.attribute, self.cohort)
        if self.rule == 'out_of_range':
            return OutOfRange(self.attribute, self.cohort, self.value)
        if self.rule == 'duplicate_cohort':
            return DuplicateCohort(*self.cohort)
        if self.rule == 'schema':
            return SchemaError(self.message)
        if self.rule in ('empty_table', 'respondent_count'):
            return EmptyTable(self.message)
        return InputError(self.message)


def load_schema(path=None, default_path=DEFAULT_SCHEMA):
    """Build the attribute schema

    Args:
        path (str, optional): user schema overriding default entries by name.
                              Defaults to None.
        default_path (str, optional): shipped schema config.

    Returns:
        AttributeSchema: 28 attributes in table order
    """
    config = _read_yaml(default_path)
    entries = dict(config.get('attributes') or {})
    status = list(config.get('status_attributes') or [])

    if path:
        logger.info('Applying schema overrides from %s', path)
        override = _read_yaml(path)
        for name, entry in (override.get('attributes') or {}).items():
            if name not in entries:
                raise SchemaError(f'Unknown attribute in {path}: {name!r}')
            entries[name] = {**entries[name], **(entry or {})}
        if 'status_attributes' in override:
            status = list(override['status_attributes'] or [])

    attributes = []
    for name, label in TABLE1_ROWS:
        if name not in entries:
            raise SchemaError(f'Schema lacks attribute {name!r}')
        entry = entries[name] or {}
        try:
            category = Category(str(entry.get('category', '')).lower())
        except ValueError:
            raise SchemaError(
                f'Bad category {entry.get("category")!r} for {name!r}')
        try:
            weight = float(entry.get('weight', 1.0))
        except (TypeError, ValueError):
            raise SchemaError(f'Bad weight {entry.get("weight")!r} '
                              f'for {name!r}')
        if not weight >= 0 or math.isinf(weight):
            raise SchemaError(f'Weight of {name!r} must be finite and >= 0')
        attributes.append(AttributeDef(name, label, category, weight))

    if not sum(attr.weight for attr in attributes) > 0:
        raise SchemaError('Attribute weights must not all be 0')

    extra = set(entries) - {name for name, _ in TABLE1_ROWS}
    if extra:
        raise SchemaError(f'Unknown attributes in schema: {sorted(extra)}')

    names = [name for name, _ in TABLE1_ROWS]
    for name in status:
        if name not in names:
            raise SchemaError(f'Unknown status attribute {name!r}')
    # status indicators keep schema order
    status = tuple(name for name in names if name in set(status))

    return AttributeSchema(tuple(attributes), status)


def _read_yaml(path):
    try:
        with open(path, 'r', encoding='utf-8') as file_h:
            content = yaml.safe_load(file_h)
    except (OSError, UnicodeDecodeError, yaml.YAMLError) as err:
        raise SchemaError(f'Cannot read schema {path}: {err}')
    if not isinstance(content, dict):
        raise SchemaError(f'{path} does not hold a mapping')
    return content


def _parse_value(cell, line):
    text = cell.strip().rstrip('%').strip()
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(line, f'not a number: {cell!r}')
    if math.isnan(value):
        raise MalformedRow(line, f'not a number: {cell!r}')
    return value


def _parse_count(cell, line):
    text = cell.strip()
    try:
        return int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError:
            raise MalformedRow(line, f'bad respondent count: {cell!r}')
        if not value.is_integer():
            raise MalformedRow(line, f'bad respondent count: {cell!r}')
        return int(value)


def _decode_lines(raw):
    """UTF-8 text lines of a survey file, line endings kept"""
    lines = []
    for number, chunk in enumerate(raw.splitlines(keepends=True), 1):
        try:
            lines.append(chunk.decode('utf-8'))
        except UnicodeDecodeError as err:
            raise MalformedRow(number, f'invalid UTF-8 at byte {err.start}')
    return lines


def load_survey(path=DEFAULT_SURVEY, schema=None):
    """Read and validate a survey table

    Args:
        path (str): survey CSV file
        schema (AttributeSchema, optional): defaults to the shipped schema

    Returns:
        SurveyTable: validated table

    Raises:
        MalformedRow, DuplicateCohort, MissingAttribute, OutOfRange
    """
    schema = schema or load_schema()
    logger.info('Loading survey table from %s', path)
    try:
        with open(path, 'rb') as file_h:
            raw = file_h.read()
    except OSError as err:
        raise InputError(f'Cannot read survey {path}: {err}')
    table = parse_survey(csv.reader(_decode_lines(raw)), schema)

    diagnostics = validate(table)
    if diagnostics:
        for diag in diagnostics:
            logger.debug('%s', diag.message)
        raise diagnostics[0].to_error()

    logger.info('Number of cohorts: %d', len(table.cohorts))
    return table


def parse_survey(rows, schema):
    """Build a SurveyTable from CSV rows without validating values

    Args:
        rows (iterable): lists of cells (csv.reader output)
        schema (AttributeSchema): attribute schema

    Returns:
        SurveyTable: possibly invalid table (see validate)
    """
    rows = [(line, row) for line, row in enumerate(rows, 1)
            if any(cell.strip() for cell in row)]
    if len(rows) < 3:
        raise MalformedRow(len(rows) + 1, 'missing header rows')

    (society_line, society_row), (gender_line, gender_row), \
        (n_line, n_row) = rows[:3]
    n_cols = len(society_row) - 1
    if n_cols < 1:
        raise MalformedRow(society_line, 'no cohort columns')

    for line, row in rows:
        if len(row) != n_cols + 1:
            raise MalformedRow(
                line, f'expected {n_cols + 1} cells, got {len(row)}')

    if gender_row[0].strip().lower() != 'gender':
        raise MalformedRow(gender_line, 'second row must be the gender row')
    if n_row[0].strip().lower() != 'n':
        raise MalformedRow(n_line, 'third row must be the N row')

    keys = []
    for society, gender in zip(society_row[1:], gender_row[1:]):
        society, gender = society.strip(), gender.strip().upper()
        if not society:
            raise MalformedRow(society_line, 'empty society id')
        if gender not in GENDERS:
            raise MalformedRow(gender_line, f'bad gender {gender!r}')
        if (society, gender) in keys:
            raise DuplicateCohort(society, gender)
        keys.append((society, gender))
    counts = [_parse_count(cell, n_line) for cell in n_row[1:]]

    by_label = {}
    for attr in schema.attributes:
        by_label.setdefault(attr.label, []).append(attr.name)
    names = set(schema.names)

    values = [dict() for _ in keys]
    aggregate = {}
    seen = set()
    for line, row in rows[3:]:
        label = row[0].strip()
        cells = [_parse_value(cell, line) for cell in row[1:]]
        if label == AGGREGATE_LABEL:
            if aggregate:
                raise MalformedRow(line, 'repeated aggregate row')
            aggregate = dict(zip(keys, cells))
            continue

        if label in names:
            name = label
        elif label in by_label:
            # repeated labels are told apart by position
            pending = [n for n in by_label[label] if n not in seen]
            if not pending:
                raise MalformedRow(line, f'repeated attribute {label!r}')
            name = pending[0]
        else:
            raise MalformedRow(line, f'unknown attribute {label!r}')
        if name in seen:
            raise MalformedRow(line, f'repeated attribute {name!r}')
        seen.add(name)
        for cohort_values, value in zip(values, cells):
            cohort_values[name] = value

    cohorts = tuple(
        CohortObservation(society, gender, n, cohort_values)
        for (society, gender), n, cohort_values in zip(keys, counts, values))
    return SurveyTable(schema, cohorts, aggregate)


def validate(table):
    """Check every invariant of a survey table

    Args:
        table (SurveyTable): table to check

    Returns:
        list: Diagnostic objects, empty iff the table is valid
    """
    diagnostics = []
    schema = table.schema

    names = schema.names
    if len(set(names)) != len(names):
        diagnostics.append(
            Diagnostic(None, None, 'schema', 'Duplicate attribute names'))
    for attr in schema.attributes:
        if not attr.weight >= 0:
            diagnostics.append(
                Diagnostic(None, attr.name, 'schema',
                           f'Negative weight for {attr.name!r}', attr.weight))

    if not table.cohorts:
        diagnostics.append(
            Diagnostic(None, None, 'empty_table', 'Table has no cohorts'))

    seen = set()
    for cohort in table.cohorts:
        key = cohort.key
        if key in seen:
            diagnostics.append(
                Diagnostic(key, None, 'duplicate_cohort',
                           f'Duplicate cohort {key}'))
        seen.add(key)

        if cohort.n < 1:
            diagnostics.append(
                Diagnostic(key, None, 'respondent_count',
                           f'Cohort {key} has respondent count {cohort.n}',
                           cohort.n))
        for name in names:
            if name not in cohort.values:
                diagnostics.append(
                    Diagnostic(key, name, 'missing_attribute',
                               f'Cohort {key} lacks attribute {name!r}'))
                continue
            value = cohort.values[name]
            if not SCALE[0] <= value <= SCALE[1]:
                diagnostics.append(
                    Diagnostic(key, name, 'out_of_range',
                               f'{name!r} = {value} for cohort {key} '
                               f'outside [0, 100]', value))
        for name in cohort.values:
            if name not in names:
                diagnostics.append(
                    Diagnostic(key, name, 'unknown_attribute',
                               f'Cohort {key} has unknown attribute '
                               f'{name!r}'))

    for society in table.societies:
        genders = [g for s, g in seen if s == society]
        if sorted(genders) != sorted(GENDERS):
            diagnostics.append(
                Diagnostic((society, None), None, 'cohort_grid',
                           f'Society {society!r} lacks a gender column'))

    return diagnostics


def cohort_vector(table, society, gender):
    """Schema-ordered feature vector of a cohort, scaled to [0, 1]

    Args:
        table (SurveyTable): survey table
        society (str): society id
        gender (str): 'F' or 'M'

    Returns:
        np.ndarray: percentages / 100
    """
    cohort = table.cohort(society, gender)
    return np.array([cohort.values[name] for name in table.schema.names],
                    dtype=np.float64) / 100.0


def cohort_matrix(table):
    """Stack of all cohort vectors in table order"""
    return np.vstack(
        [cohort_vector(table, *cohort.key) for cohort in table.cohorts])


def table_frame(table):
    """Attribute x cohort DataFrame of the raw percentages"""
    columns = pd.MultiIndex.from_tuples(table.keys,
                                        names=['society', 'gender'])
    data = [[cohort.values.get(name, np.nan) for cohort in table.cohorts]
            for name in table.schema.names]
    df = pd.DataFrame(data, index=table.schema.names, columns=columns)
    df.loc['N'] = [cohort.n for cohort in table.cohorts]
    if table.stored_aggregate:
        df.loc[AGGREGATE_LABEL] = [
            table.stored_aggregate.get(key, np.nan) for key in table.keys
        ]
    return df


def society_labels(source):
    """Display label of every society

    Args:
        source (HdiConfig or SurveyTable): an HDI config carries the labels;
                                           a table labels societies by id

    Returns:
        dict: society id -> label
    """
    labels = getattr(source, 'labels', None)
    if labels is not None:
        return dict(labels)
    return {society: society for society in source.societies}


def format_value(value):
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def save_survey(table, path):
    """Write a table in the survey CSV shape (labels as published)

    Args:
        table (SurveyTable): table to write
        path (str): output CSV
    """
    rows: List[List[str]] = [
        ['attribute'] + [cohort.society for cohort in table.cohorts],
        ['gender'] + [cohort.gender for cohort in table.cohorts],
        ['N'] + [str(cohort.n) for cohort in table.cohorts],
    ]
    for attr in table.schema.attributes:
        rows.append([attr.label] + [
            format_value(cohort.values[attr.name]) for cohort in table.cohorts
        ])
    if table.stored_aggregate:
        rows.append([AGGREGATE_LABEL] + [
            format_value(table.stored_aggregate[key]) for key in table.keys
        ])

    with open(path, 'w', encoding='utf-8', newline='') as file_h:
        csv.writer(file_h, lineterminator='\n').writerows(rows)
