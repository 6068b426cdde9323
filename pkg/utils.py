import logging
import os

import numpy as np

LOG_LEVELS = {
    'error': logging.ERROR,
    'info': logging.INFO,
    'debug': logging.DEBUG
}
LOG_FORMAT = '%(asctime)s %(levelname)-5s %(name)s: %(message)s'

logger = logging.getLogger(__name__)


def setup_logging(log_file=None):
    """Configure the root logger from CULTURALITY_LOG

    Args:
        log_file (str, optional): additional file to mirror messages into.
                                  Defaults to None.

    Returns:
        int: the logging level in effect
    """
    level_str = os.environ.get('CULTURALITY_LOG', 'info').strip().lower()
    level = LOG_LEVELS.get(level_str, logging.INFO)

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, mode='w'))
    for handler in handlers:
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(level)

    if level_str not in LOG_LEVELS:
        logger.warning('Unknown CULTURALITY_LOG value %r, using info',
                       level_str)
    return level


def derive_rng(seed, *keys):
    """Independent random stream for (seed, *keys)

    Streams for different keys never overlap, so per-agent draws do not
    depend on the order in which agents are processed.

    Args:
        seed (int): run seed
        keys (int): stream identifiers (e.g. agent id)

    Returns:
        np.random.Generator: seeded generator
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *keys]))


def project_path(*parts):
    """Path relative to the repository root"""
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), *parts)
