"""Error types shared across the toolkit.

Every error belongs to one of two families. The family decides the exit code
of the command line driver (see main.py).
"""


class CulturalityError(Exception):
    exit_code = 1


class InputError(CulturalityError):
    """Bad survey file, schema, configuration or HDI table"""
    exit_code = 2


class NumericalError(CulturalityError):
    """Failure inside the factor model, similarity or clustering code"""
    exit_code = 3


class MissingAttribute(InputError):
    def __init__(self, name, cohort):
        self.name, self.cohort = name, cohort
        super().__init__(f'Missing attribute {name!r} for cohort {cohort}')


class OutOfRange(InputError):
    def __init__(self, name, cohort, value):
        self.name, self.cohort, self.value = name, cohort, value
        super().__init__(
            f'Value {value!r} of {name!r} for cohort {cohort} outside [0, 100]')


class DuplicateCohort(InputError):
    def __init__(self, society, gender):
        self.society, self.gender = society, gender
        super().__init__(f'Duplicate cohort ({society}, {gender})')


class MalformedRow(InputError):
    def __init__(self, line, reason=''):
        self.line, self.reason = line, reason
        msg = f'Malformed row at line {line}'
        super().__init__(f'{msg}: {reason}' if reason else msg)


class UnknownCohort(InputError):
    def __init__(self, society, gender):
        self.society, self.gender = society, gender
        super().__init__(f'Unknown cohort ({society}, {gender})')


class EmptyTable(InputError):
    def __init__(self, msg='Survey table has no respondents'):
        super().__init__(msg)


class SchemaError(InputError):
    pass


class ConfigError(InputError):
    pass


class MissingHdi(InputError):
    def __init__(self, society):
        self.society = society
        super().__init__(f'No HDI value configured for society {society!r}')


class DimensionMismatch(NumericalError):
    def __init__(self, what, expected, got):
        self.what, self.expected, self.got = what, expected, got
        super().__init__(f'{what}: expected length {expected}, got {got}')


class SingularAlpha(NumericalError):
    def __init__(self):
        super().__init__('alpha == 1: the factor recurrence has no fixed point')


class ZeroWeightSum(NumericalError):
    def __init__(self):
        super().__init__('Attribute weights sum to zero')


class DomainError(NumericalError):
    pass


class InvalidK(NumericalError):
    def __init__(self, k, n):
        self.k, self.n = k, n
        super().__init__(f'Invalid cluster count k={k} for {n} agents')
