import functools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import as_completed
from datetime import datetime


def log_execution(func):
    """
    Decorator that logs the start and end of a function execution.

    Args:
        func (function): The function to be decorated.

    Returns:
        function: The decorated function.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logging.info(f"Executing {func.__qualname__} at {datetime.now()}")
        result = func(*args, **kwargs)
        logging.info(f"Finished executing {func.__qualname__}")
        return result

    return wrapper


def timer(func):
    """
    Decorator that times the execution of a function.

    Returns:
        function: The decorated function, returning a tuple of the result and
            the duration of execution in seconds.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        duration = time.perf_counter() - start
        logging.info(f"{func.__qualname__} took {duration:.4f} seconds")
        return result, duration

    return wrapper


def threaded(max_workers=None):
    """
    Decorator that maps a function over its first argument using threads.

    The decorated function receives one item at a time; the wrapper takes the
    whole sequence and returns the results in input order. Any task failure
    is logged and re-raised once all tasks have finished.

    Args:
        max_workers (int | None): Pool size; 1 runs the items sequentially.

    Returns:
        function: The decorated function.
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(items, *args, **kwargs):
            items = list(items)
            workers = kwargs.pop("max_workers", max_workers)
            if workers == 1 or len(items) <= 1:
                return [func(item, *args, **kwargs) for item in items]

            results = {}
            failures = []
            with ThreadPoolExecutor(max_workers=workers) as executor:
                futures = {
                    executor.submit(func, item, *args, **kwargs): idx
                    for idx, item in enumerate(items)
                }
                tasks = len(futures)
                tenth = round(tasks / 10)
                logging.info(f"Formed pool of {tasks} {func.__qualname__} tasks")

                for done, future in enumerate(as_completed(futures)):
                    idx = futures[future]
                    try:
                        results[idx] = future.result()
                    except Exception as exc:
                        logging.exception(f"{items[idx]} generated an exception: {exc}")
                        failures.append(exc)

                    if tenth != 0 and done % tenth == 0:
                        logging.info(f"Processed {done // tenth * 10}% of {tasks} tasks")

            if failures:
                raise failures[0]
            return [results[idx] for idx in range(len(items))]

        return wrapper

    return decorator
