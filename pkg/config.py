import json
import logging
import os

import yaml

from agent_sim import Shift, SimConfig, input_sizes
from errors import ConfigError
from survey_corpus import DEFAULT_SURVEY
from transcultural_model import (FactorCoefficients, NoiseSpec,
                                 default_coefficients)
from utils import project_path

logger = logging.getLogger(__name__)

DEFAULT_RUN_CONFIG = project_path('data', 'run_config.yaml')

# run_config.yaml (section, key) -> CONFIG key
YAML_KEYS = {
    ('simulation', 'steps'): 'steps',
    ('simulation', 'population_size'): 'population',
    ('simulation', 'seed'): 'seed',
    ('simulation', 'n_jobs'): 'n_jobs',
    ('clustering', 'k'): 'k',
    ('clustering', 'auto_k'): 'auto_k',
    ('clustering', 'k_min'): 'k_min',
    ('clustering', 'k_max'): 'k_max',
    ('clustering', 'n_init'): 'n_init',
    ('map', 'width'): 'map_width',
    ('map', 'height'): 'map_height',
    ('map', 'padding'): 'map_padding',
    ('map', 'jitter'): 'map_jitter',
}
# never written to config.json, so output folders stay comparable
UNSAVED_KEYS = ('SAVE_DIR', 'LOG_FILE', 'out')


def return_config_dict():
    """Return default configuration

    Returns:
        dict: configuration information

    Misc:
        coefficients: factor recurrence coefficients (alpha, beta1,
                      beta_total | beta, gamma_total | gamma)
        shifts: paradigm shifts, each {step, <coefficient overrides>}
        k / auto_k: cluster count, or silhouette scan over [k_min, k_max]
        n_init: random k-medoids starts besides BUILD
    """
    CONFIG = {
        "survey": DEFAULT_SURVEY,
        "schema": None,
        "hdi": None,
        "config": DEFAULT_RUN_CONFIG,
        "seed": 1234,
        "steps": 50,
        "population": 150,
        "n_jobs": 1,
        "coefficients": {
            "alpha": 0.4,
            "beta1": 0.2,
            "beta_total": 0.2,
            "gamma_total": 0.2
        },
        "noise": {
            "kind": "none",
            "scale": 0.0
        },
        "shifts": [],
        "k": 4,
        "auto_k": False,
        "k_min": 2,
        "k_max": 10,
        "n_init": 10,
        "map_width": 800,
        "map_height": 800,
        "map_padding": 40,
        "map_jitter": 0.2,
    }
    return CONFIG


def read_run_config(path):
    """Flatten run_config.yaml into CONFIG keys

    Args:
        path (str): YAML run configuration

    Returns:
        dict: CONFIG entries found in the file
    """
    try:
        with open(path, 'r', encoding='utf-8') as file_h:
            content = yaml.safe_load(file_h) or {}
    except (OSError, UnicodeDecodeError) as err:
        raise ConfigError(f'Cannot read run config {path}: {err}')
    except yaml.YAMLError as err:
        raise ConfigError(f'Bad YAML in {path}: {err}')
    if not isinstance(content, dict):
        raise ConfigError(f'{path} does not hold a mapping')

    values = {}
    for (section, key), name in YAML_KEYS.items():
        block = content.get(section) or {}
        if key in block:
            values[name] = block[key]
    for section in ('coefficients', 'noise'):
        if content.get(section):
            values[section] = dict(content[section])
    if 'shifts' in content:
        values['shifts'] = list(content['shifts'] or [])
    return values


def create_directory_paths(CONFIG):
    if not CONFIG.get("out"):
        SAVE_DIR = './Results/culturality-%s/' % str(CONFIG["seed"])
    else:
        SAVE_DIR = CONFIG["out"]
    SAVE_DIR = os.path.join(SAVE_DIR, '')
    os.makedirs(SAVE_DIR, exist_ok=True)

    CONFIG.update(SAVE_DIR=SAVE_DIR,
                  LOG_FILE=os.path.join(SAVE_DIR, 'output.log'))
    return CONFIG


def build_config(args):
    """Combine defaults, the run config file and command line arguments

    Args:
        args (Namespace): parsed input arguments (None means "not given")

    Returns:
        dict: combined configuration information
    """
    CONFIG = return_config_dict()
    arg_dict = {key: value for key, value in vars(args).items()}

    config_path = arg_dict.get('config') or CONFIG['config']
    CONFIG.update(read_run_config(config_path))
    CONFIG['config'] = config_path
    CONFIG.update(
        {key: value
         for key, value in arg_dict.items() if value is not None})
    if arg_dict.get('k') is not None:
        CONFIG['auto_k'] = False

    for key in ('seed', 'steps', 'population', 'n_jobs', 'k', 'k_min',
                'k_max', 'n_init'):
        try:
            CONFIG[key] = int(CONFIG[key])
        except (TypeError, ValueError):
            raise ConfigError(f'{key} must be an integer, got {CONFIG[key]!r}')

    CONFIG = create_directory_paths(CONFIG)
    write_config(CONFIG)
    return CONFIG


def _coefficients(entry, n_x, n_z, base=None):
    """FactorCoefficients from a config mapping

    Keys missing from entry come from base (or the defaults).
    """
    entry = dict(entry or {})
    try:
        if base is None:
            coeffs = default_coefficients(
                n_x, n_z, entry.get('alpha', 0.4), entry.get('beta1', 0.2),
                entry.get('beta_total', 0.2), entry.get('gamma_total', 0.2))
        else:
            coeffs = base
            spread = default_coefficients(
                n_x, n_z, 0.0, 0.0, entry.get('beta_total', 0.0),
                entry.get('gamma_total', 0.0))
            changes = {
                key: entry[key]
                for key in ('alpha', 'beta1') if key in entry
            }
            if 'beta_total' in entry:
                changes['beta'] = spread.beta
            if 'gamma_total' in entry:
                changes['gamma'] = spread.gamma
            coeffs = coeffs.replace(**changes)
        if 'beta' in entry:
            coeffs = coeffs.replace(beta=entry['beta'])
        if 'gamma' in entry:
            coeffs = coeffs.replace(gamma=entry['gamma'])
    except (TypeError, ValueError) as err:
        raise ConfigError(f'Bad coefficient entry {entry!r}: {err}')
    return coeffs


def build_sim_config(CONFIG, schema):
    """SimConfig for the schema's input sizes

    Args:
        CONFIG (dict): configuration information
        schema (AttributeSchema): decides the lengths of beta and gamma

    Returns:
        SimConfig: simulation configuration
    """
    n_x, n_z = input_sizes(schema)
    base = _coefficients(CONFIG['coefficients'], n_x, n_z)

    shifts = []
    for entry in CONFIG.get('shifts') or []:
        if not isinstance(entry, dict) or 'step' not in entry:
            raise ConfigError(f'Paradigm shift needs a step: {entry!r}')
        overrides = {k: v for k, v in entry.items() if k != 'step'}
        # each shift builds on the coefficients active before it
        previous = shifts[-1].coefficients if shifts else base
        try:
            step = int(entry['step'])
        except (TypeError, ValueError):
            raise ConfigError(f'Paradigm shift step must be an integer: '
                              f'{entry!r}')
        shifts.append(
            Shift(step, _coefficients(overrides, n_x, n_z, previous)))

    noise = CONFIG.get('noise') or {}
    try:
        noise_spec = NoiseSpec(str(noise.get('kind', 'none')).lower(),
                               float(noise.get('scale', 0.0)),
                               int(CONFIG['seed']))
    except (TypeError, ValueError) as err:
        raise ConfigError(f'Bad noise entry {noise!r}: {err}')

    return SimConfig(coefficients=base,
                     steps=CONFIG['steps'],
                     population_size=CONFIG['population'],
                     seed=CONFIG['seed'],
                     shifts=tuple(shifts),
                     noise=noise_spec,
                     n_jobs=CONFIG['n_jobs'])


def write_config(dictionary):
    """Write configuration to a file

    Args:
        dictionary (dict): configuration
    """
    saved = {
        key: value
        for key, value in dictionary.items() if key not in UNSAVED_KEYS
    }
    json_object = json.dumps(saved, sort_keys=True, indent=4)

    config_file = os.path.join(dictionary['SAVE_DIR'], 'config.json')
    with open(config_file, "w") as outfile:
        outfile.write(json_object + '\n')
