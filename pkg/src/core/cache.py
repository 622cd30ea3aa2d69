"""Thread-safe memo tables for pure computations"""

import threading
from typing import Callable, Generic, Hashable, TypeVar


V = TypeVar("V")


class PureCache(Generic[V]):
    """
    Memo table for referentially transparent functions.

    Values are computed outside the lock and published with setdefault, so
    a reader always sees either nothing or a value equal to recomputation.
    Two threads racing on the same key may both compute; the first to
    publish wins.
    """

    def __init__(self, name: str = "cache"):
        self.name = name
        self._data: dict = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key: Hashable, compute: Callable[[], V]) -> V:
        try:
            return self._data[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._data

    def __len__(self) -> int:
        return len(self._data)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
