# cavitybias/infrastructure/cache/factory.py
import os
import logging
from typing import Optional
from . import CacheProvider, CacheService, InMemoryCacheProvider, NullCacheProvider

logger = logging.getLogger(__name__)


class CacheFactory:
    """Factory for creating cache providers and services."""

    @staticmethod
    def create_provider(provider_type: Optional[str] = None) -> CacheProvider:
        """
        Create a cache provider based on configuration.

        Args:
            provider_type: 'memory', 'none', or None to read CAVITY_CACHE_PROVIDER

        Returns:
            CacheProvider instance
        """
        provider_type = (provider_type or os.getenv('CAVITY_CACHE_PROVIDER', 'memory')).lower()

        if provider_type == 'memory':
            return InMemoryCacheProvider(max_entries=int(os.getenv('CAVITY_CACHE_MAX_ENTRIES', '8')))

        elif provider_type == 'none':
            return NullCacheProvider()

        else:
            logger.warning(f"Unknown cache provider type: {provider_type}, falling back to memory")
            return InMemoryCacheProvider()

    @staticmethod
    def create_service(provider_type: Optional[str] = None) -> CacheService:
        """
        Create a cache service with the configured provider.

        Args:
            provider_type: Type of cache provider

        Returns:
            CacheService instance
        """
        return CacheService(provider=CacheFactory.create_provider(provider_type))
