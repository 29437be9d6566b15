import concurrent.futures
import logging
from typing import Callable, Sequence, TypeVar

from entprod.config import Config

# Set up logging
logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T], label: str = "item") -> list[R]:
    """
    Evaluates ``func`` over ``items`` on a thread pool.

    Results come back in input order regardless of completion order. The
    first failure is logged and re-raised once every submitted task has
    finished.

    Args:
        func (Callable): Pure function applied to each item.
        items (Sequence): Inputs.
        label (str, optional): Name used in log messages.

    Returns:
        list: ``[func(item) for item in items]``.
    """
    results: list = [None] * len(items)  # Preallocate list for results in original order
    failure: Exception | None = None

    with concurrent.futures.ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as executor:
        future_to_index = {executor.submit(func, item): i for i, item in enumerate(items)}

        for future in concurrent.futures.as_completed(future_to_index):
            original_index = future_to_index[future]
            try:
                results[original_index] = future.result()
            except Exception as exc:
                logger.error(f"{label} {original_index} raised during batch evaluation: {exc}", exc_info=True)
                if failure is None:
                    failure = exc

    if failure is not None:
        raise failure
    logger.debug(f"evaluated {len(items)} {label}(s)")
    return results
