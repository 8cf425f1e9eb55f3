from __future__ import annotations

import logging
import threading
from typing import Any, Callable, Dict, Hashable, Tuple, TypeVar

LOGGER = logging.getLogger(__name__)

T = TypeVar("T")


class TableStore:
    """Process-wide cache of immutable combinatorial tables.

    Builders run outside the lock; when two threads race on the same key the
    first published table wins and the other result is dropped.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.reset()

    def reset(self) -> None:
        with self._lock:
            self.tables: Dict[Tuple[str, Hashable], Any] = {}

    def get(self, kind: str, key: Hashable) -> Any | None:
        with self._lock:
            return self.tables.get((kind, key))

    def get_or_build(self, kind: str, key: Hashable, builder: Callable[[], T]) -> T:
        with self._lock:
            existing = self.tables.get((kind, key))
            if existing is not None:
                return existing
        LOGGER.debug("Building %s table for %s", kind, key)
        built = builder()
        with self._lock:
            return self.tables.setdefault((kind, key), built)

    def put(self, kind: str, key: Hashable, value: T) -> T:
        with self._lock:
            self.tables[(kind, key)] = value
            return value


_store = TableStore()


def get_store() -> TableStore:
    return _store
