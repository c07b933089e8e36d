# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

from multiprocessing import cpu_count
from multiprocessing.pool import Pool
from typing import Callable, Iterable, List

from topocell.utils.logger import get_logger

log = get_logger(__name__)


class ParallelRunner:
    """
    Fan independent tasks out to worker processes.

    Results always come back in submission order, so anything reduced from
    them is independent of the number of workers. With one worker every task
    runs in the calling process.
    """

    def __init__(self, threads: int = 1) -> None:
        self._threads = max(1, min(int(threads), max(cpu_count() - 1, 1)))
        self._pool = Pool(self._threads) if self._threads > 1 else None
        self._pending = []

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def threads(self) -> int:
        return self._threads

    def submit(self, func: Callable, *args) -> None:
        if self._pool is None:
            self._pending.append(func(*args))
        else:
            self._pending.append(self._pool.apply_async(func, args))

    def collect(self) -> List:
        """
        Wait for every submitted task.

        :return: results in submission order
        """
        pending, self._pending = self._pending, []
        if self._pool is None:
            return pending
        return [result.get() for result in pending]

    def map(self, func: Callable, items: Iterable) -> List:
        for item in items:
            self.submit(func, item)
        return self.collect()

    def close(self) -> None:
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None


def ordered_map(func: Callable, items: Iterable, threads: int = 1) -> List:
    """
    ``[func(item) for item in items]``, spread over ``threads`` processes.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    log.debug(f"Spreading {len(items)} tasks over {threads} processes")
    with ParallelRunner(threads) as runner:
        return runner.map(func, items)
