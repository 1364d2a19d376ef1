import logging
import os

logger = logging.getLogger(__name__)

THREADS_VARIABLE = 'ASYMPODE_THREADS'


def worker_count() -> int:
    """Size of the worker pools: ASYMPODE_THREADS, or min(4, cpu count)."""
    default = min(4, os.cpu_count() or 1)
    value = os.environ.get(THREADS_VARIABLE)
    if value is None:
        return default
    try:
        count = int(value)
    except ValueError:
        count = 0
    if count < 1:
        logger.warning(f'Ignoring {THREADS_VARIABLE}={value!r}, expected a positive integer')
        return default
    return count
