"""Transcultural factor recurrence

    v_t = alpha * v_{t-1} + beta1 * q + sum_k beta_k x_k + sum_l gamma_l z_l + u_t

q is the attribute of the expected culture as received through the host
culture, x holds the quality-of-life (modernization / intervening)
attributes, z the status and education indicators and u_t the disturbance.
The lag is taken on the individual's own previous factor value.
"""
import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from errors import ConfigError, DimensionMismatch, DomainError, SingularAlpha
from utils import derive_rng

logger = logging.getLogger(__name__)

NOISE_KINDS = ('none', 'uniform', 'gaussian')


@dataclass(frozen=True)
class FactorCoefficients:
    alpha: float
    beta1: float
    beta: Tuple[float, ...] = ()
    gamma: Tuple[float, ...] = ()

    def replace(self, **changes):
        values = dict(alpha=self.alpha,
                      beta1=self.beta1,
                      beta=self.beta,
                      gamma=self.gamma)
        values.update(changes)
        values['beta'] = tuple(float(b) for b in values['beta'])
        values['gamma'] = tuple(float(g) for g in values['gamma'])
        return FactorCoefficients(float(values['alpha']),
                                  float(values['beta1']), values['beta'],
                                  values['gamma'])


@dataclass(frozen=True)
class FactorInputs:
    q: float
    x: Tuple[float, ...] = ()
    z: Tuple[float, ...] = ()

    def check_domain(self):
        for label, values in (('q', (self.q, )), ('x', self.x), ('z',
                                                                 self.z)):
            if not all(0.0 <= v <= 1.0 for v in values):
                raise DomainError(f'Factor input {label} outside [0, 1]')

    def scaled(self, c):
        return FactorInputs(self.q * c, tuple(v * c for v in self.x),
                            tuple(v * c for v in self.z))


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = 'none'
    scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f'Unknown noise kind {self.kind!r}, '
                              f'expected one of {NOISE_KINDS}')
        if not self.scale >= 0:
            raise ConfigError(f'Noise scale must be >= 0, got {self.scale}')
        if self.seed < 0:
            raise ConfigError(f'Noise seed must be >= 0, got {self.seed}')


@dataclass(frozen=True)
class Trajectory:
    values: np.ndarray
    coefficients: FactorCoefficients
    inputs: FactorInputs
    disturbances: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.values)


def default_coefficients(n_x,
                         n_z,
                         alpha=0.4,
                         beta1=0.2,
                         beta_total=0.2,
                         gamma_total=0.2):
    """Coefficients spreading beta_total / gamma_total evenly over inputs

    With the defaults the zero-noise fixed point is the mean of q, mean(x)
    and mean(z), so it stays in [0, 1] for inputs in [0, 1].
    """
    beta = tuple([beta_total / n_x] * n_x) if n_x else ()
    gamma = tuple([gamma_total / n_z] * n_z) if n_z else ()
    return FactorCoefficients(float(alpha), float(beta1), beta, gamma)


def check_dimensions(coeffs, inputs):
    if len(coeffs.beta) != len(inputs.x):
        raise DimensionMismatch('beta / x', len(coeffs.beta), len(inputs.x))
    if len(coeffs.gamma) != len(inputs.z):
        raise DimensionMismatch('gamma / z', len(coeffs.gamma),
                                len(inputs.z))


def drive(coeffs, inputs):
    """Input-driven part beta1*q + sum beta*x + sum gamma*z"""
    check_dimensions(coeffs, inputs)
    total = coeffs.beta1 * inputs.q
    for b, x in zip(coeffs.beta, inputs.x):
        total += b * x
    for g, z in zip(coeffs.gamma, inputs.z):
        total += g * z
    return float(total)


def step_factor(v_prev, coeffs, inputs, u=0.0):
    """One step of the factor recurrence

    Args:
        v_prev (float): previous factor value
        coeffs (FactorCoefficients): coefficients
        inputs (FactorInputs): q, x, z
        u (float, optional): disturbance. Defaults to 0.0.

    Returns:
        float: new factor value
    """
    return float(coeffs.alpha * v_prev + drive(coeffs, inputs) + u)


def draw_disturbances(noise, steps, seed=None):
    """Disturbances u_1..u_T, i.i.d. per step

    Args:
        noise (NoiseSpec): disturbance law
        steps (int): number of steps
        seed (int, optional): overrides noise.seed

    Returns:
        np.ndarray: float64 array of length steps
    """
    seed = noise.seed if seed is None else seed
    if noise.kind == 'none' or noise.scale == 0:
        return np.zeros(steps)
    rng = derive_rng(seed)
    if noise.kind == 'uniform':
        return rng.uniform(-noise.scale, noise.scale, size=steps)
    return rng.normal(0.0, noise.scale, size=steps)


def iterate_factor(v0, coeffs, inputs, disturbances):
    """Run the recurrence over a given disturbance sequence"""
    values = np.empty(len(disturbances) + 1)
    values[0] = v0
    base = drive(coeffs, inputs)
    for t, u in enumerate(disturbances, 1):
        values[t] = coeffs.alpha * values[t - 1] + base + u
    return values


def trajectory(v0, coeffs, inputs, steps, noise=NoiseSpec()):
    """Factor trajectory v_0..v_T

    Args:
        v0 (float): initial factor value
        coeffs (FactorCoefficients): coefficients
        inputs (FactorInputs): q, x, z
        steps (int): T
        noise (NoiseSpec, optional): disturbance law. Defaults to none.

    Returns:
        Trajectory: values of length T + 1
    """
    if steps < 0:
        raise ConfigError(f'Step count must be >= 0, got {steps}')
    check_dimensions(coeffs, inputs)
    disturbances = draw_disturbances(noise, steps)
    values = iterate_factor(v0, coeffs, inputs, disturbances)
    return Trajectory(values, coeffs, inputs, disturbances)


def fixed_point(coeffs, inputs):
    """Zero-noise stationary value drive / (1 - alpha)"""
    if coeffs.alpha == 1:
        raise SingularAlpha()
    return drive(coeffs, inputs) / (1.0 - coeffs.alpha)


def closed_form(v0, coeffs, inputs, t):
    """Zero-noise value after t steps"""
    decay = coeffs.alpha**np.asarray(t, dtype=np.float64)
    return decay * v0 + (1.0 - decay) * fixed_point(coeffs, inputs)
