# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import logging
import os
import sys
from multiprocessing import cpu_count

import dotenv

ENV_PREFIX = 'GRASSMEET_'

DEFAULTS = {
    'jobs': 1,
    'budget_degree': 60,
    'budget_basis': 200_000,
    'budget_pairs': 5_000_000,
    'log_level': 'INFO',
}


class InvalidInput(ValueError):
    pass


class NotASquare(ArithmeticError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


class DegreeOverflowError(OverflowError):
    pass


class ChartInvariantError(Exception):
    pass


class InternalCheckError(Exception):
    pass


class EnumerationBudgetExceeded(Exception):
    pass


class BudgetExceeded(Exception):
    """Raised when a Gröbner run hits one of its resource limits.

    The partial statistics of the interrupted run are kept on the
    `stats` attribute so that callers can still report them.
    """
    def __init__(self, msg, stats=None):
        super().__init__(msg)
        self.stats = stats


class SearchExhausted(Exception):
    def __init__(self, msg, attempts=None):
        super().__init__(msg)
        self.attempts = attempts


def _worker_count(n_jobs: int) -> int:
    if n_jobs <= 1:
        return 1
    return int(min(max(n_jobs - 1, 1), max(cpu_count() - 1, 1)))


def load_env_defaults() -> dict:
    """Reads run defaults from the environment (and a local .env file).

    Returns:
        dict: Defaults for jobs, budgets and log level; values set in the
            environment take precedence over the built-in ones.
    """
    dotenv.load_dotenv()
    defaults = dict(DEFAULTS)
    for key, value in DEFAULTS.items():
        env_value = os.getenv(f'{ENV_PREFIX}{key.upper()}')
        if env_value is None:
            continue
        try:
            defaults[key] = type(value)(env_value)
        except ValueError:
            raise InvalidInput(
                f'Environment variable {ENV_PREFIX}{key.upper()} has an '
                f'invalid value: "{env_value}".'
            )
    return defaults


def set_up_logger(log_level, cls_obj=None, logger_name=None) -> logging.Logger:
    """Sets up the module/class logger.

    Args:
        log_level (str): The log level to set.
        cls_obj: Class instance for which the logger should be created.
        logger_name (str): Name of the logger if no class is given.

    Returns:
        logging.Logger: The module logger.
    """
    if cls_obj:
        logger = logging.getLogger(f'{cls_obj.__module__}')
    else:
        logger = logging.getLogger(logger_name)
    logger.setLevel(log_level)
    if not any(getattr(h, '_grassmeet', False) for h in logger.handlers):
        logger.addHandler(set_up_logging_handler())
    return logger


def set_up_logging_handler():
    """Sets up logging handler.

    Records go to stderr; stdout carries the command reports.
    """
    handler = logging.StreamHandler(sys.stderr)
    formatter = logging.Formatter(
        '%(asctime)s [%(threadName)s] [%(levelname)s] '
        '[%(name)s]: %(message)s')
    handler.setFormatter(formatter)
    handler._grassmeet = True
    return handler
