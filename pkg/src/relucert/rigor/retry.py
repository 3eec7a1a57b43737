"""Retry a rigorous computation at doubled precision when it is indeterminate."""

import logging
from typing import Callable, TypeVar

from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)

from relucert.rigor.enclosure import MAX_PRECISION, check_precision
from relucert.utils.errors import IndeterminateEnclosureError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def precision_schedule(precision: int, max_precision: int = MAX_PRECISION) -> list:
    """precision, 2*precision, ... up to max_precision."""
    check_precision(precision)
    schedule = [precision]
    while schedule[-1] * 2 <= max_precision:
        schedule.append(schedule[-1] * 2)
    return schedule


def with_precision_retry(
    compute: Callable[[int], T],
    precision: int,
    max_precision: int = MAX_PRECISION,
) -> T:
    """Call compute(bits), doubling bits on IndeterminateEnclosureError.

    The last IndeterminateEnclosureError is re-raised once max_precision
    has been tried.
    """
    schedule = precision_schedule(precision, max_precision)
    for attempt in Retrying(
        retry=retry_if_exception_type(IndeterminateEnclosureError),
        stop=stop_after_attempt(len(schedule)),
        before_sleep=before_sleep_log(logger, logging.INFO),
        reraise=True,
    ):
        with attempt:
            bits = schedule[attempt.retry_state.attempt_number - 1]
            return compute(bits)
    raise AssertionError("unreachable")  # pragma: no cover
