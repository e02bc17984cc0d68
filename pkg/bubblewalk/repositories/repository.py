import threading
from typing import Callable, Dict, Generic, Hashable, Optional, TypeVar

K = TypeVar("K", bound=Hashable)
T = TypeVar("T")


class BaseRepository(Generic[K, T]):
    """Base repository: a thread-safe store of derived objects keyed by their parameters."""

    def __init__(self):
        self._items: Dict[K, T] = {}
        self._lock = threading.Lock()

    def get(self, key: K) -> Optional[T]:
        """Get a stored object by key."""
        with self._lock:
            return self._items.get(key)

    def create(self, key: K, obj: T) -> T:
        """Store an object; an existing entry for the key wins."""
        with self._lock:
            return self._items.setdefault(key, obj)

    def get_or_create(self, key: K, factory: Callable[[], T]) -> T:
        """Return the stored object, building it outside the lock on a miss."""
        found = self.get(key)
        if found is not None:
            return found
        return self.create(key, factory())
