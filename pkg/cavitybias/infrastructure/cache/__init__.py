# cavitybias/infrastructure/cache/__init__.py
"""
Caching of solved field maps, keyed by the geometry, grid and drive that produced them.
"""

from abc import ABC, abstractmethod
from collections import OrderedDict
from typing import Any, Dict, Optional
import hashlib
import json
import logging

logger = logging.getLogger(__name__)


class CacheProvider(ABC):
    """Abstract base class for cache providers."""

    @abstractmethod
    def get(self, key: str) -> Optional[Any]:
        """Get value from cache."""
        pass

    @abstractmethod
    def set(self, key: str, value: Any) -> bool:
        """Store a value."""
        pass

    def get_stats(self) -> Dict[str, Any]:
        return {}


class InMemoryCacheProvider(CacheProvider):
    """Least-recently-used in-memory cache bounded by entry count."""

    def __init__(self, max_entries: int = 8):
        self._cache: "OrderedDict[str, Any]" = OrderedDict()
        self.max_entries = max_entries
        self._hits = 0
        self._misses = 0
        logger.info(f"InMemoryCacheProvider initialized with max_entries={max_entries}")

    def get(self, key: str) -> Optional[Any]:
        if key not in self._cache:
            self._misses += 1
            logger.debug(f"Cache miss for key: {key}")
            return None
        self._cache.move_to_end(key)
        self._hits += 1
        logger.debug(f"Cache hit for key: {key}")
        return self._cache[key]

    def set(self, key: str, value: Any) -> bool:
        self._cache[key] = value
        self._cache.move_to_end(key)
        while len(self._cache) > self.max_entries:
            evicted, _ = self._cache.popitem(last=False)
            logger.debug(f"Cache evicted key: {evicted}")
        return True

    def get_stats(self) -> Dict[str, Any]:
        return {
            'entries': len(self._cache),
            'max_entries': self.max_entries,
            'hits': self._hits,
            'misses': self._misses,
        }


class NullCacheProvider(CacheProvider):
    """Cache that stores nothing."""

    def get(self, key: str) -> Optional[Any]:
        return None

    def set(self, key: str, value: Any) -> bool:
        return False


class CacheService:
    """High-level cache service with deterministic key generation."""

    def __init__(self, provider: CacheProvider):
        self.provider = provider
        logger.info(f"CacheService initialized with provider: {type(provider).__name__}")

    def _generate_key(self, prefix: str, data: Any) -> str:
        """Generate a cache key from prefix and data."""
        data_str = json.dumps(data, sort_keys=True, default=str)
        data_hash = hashlib.sha256(data_str.encode()).hexdigest()
        return f"{prefix}:{data_hash}"

    def get(self, prefix: str, data: Any) -> Optional[Any]:
        return self.provider.get(self._generate_key(prefix, data))

    def set(self, prefix: str, data: Any, value: Any) -> bool:
        return self.provider.set(self._generate_key(prefix, data), value)

    def get_stats(self) -> Dict[str, Any]:
        stats = self.provider.get_stats()
        stats['provider_type'] = type(self.provider).__name__
        return stats
