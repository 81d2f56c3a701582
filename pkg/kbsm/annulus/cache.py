import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

log = logging.getLogger(__name__)


class CacheManager:
    """Manages on-disk caching of normal forms and tables with hash-based filenames."""

    def __init__(self, cache_dir: str = "cache") -> None:
        """Initialize cache manager.

        Parameters
        ----------
        cache_dir : str, optional
            Directory for cached files. Defaults to "cache".
        """
        self.cache_dir = cache_dir
        self._setup()

    def _setup(self) -> None:
        """Create cache directory if it doesn't exist."""
        Path(self.cache_dir).mkdir(parents=True, exist_ok=True)

    def _cache_path(self, cache_key: str, ext: str) -> Path:
        return Path(self.cache_dir) / f"{cache_key}.{ext}"

    def generate_key(self, *args, debug: bool = False) -> str:
        """Generate hash-based cache key from arguments.

        Parameters
        ----------
        *args
            Arguments to include in cache key.
        debug : bool, optional
            Generate a short key with a debug prefix. Defaults to False.

        Returns
        -------
        str
            Cache key string.
        """
        hash_input = "|".join(str(arg) for arg in args)
        digest = hashlib.md5(hash_input.encode()).hexdigest()
        if debug:
            return f"debug_{digest[:8]}"
        return digest

    def read(self, cache_key: str, fmt: str) -> Optional[Union[pd.DataFrame, Any]]:
        """Read data from cache.

        Parameters
        ----------
        cache_key : str
            Cache key identifier.
        fmt : str
            ``"json"`` returns the decoded payload; ``"csv"`` and
            ``"parquet"`` return a DataFrame.

        Returns
        -------
        Optional[Union[pd.DataFrame, Any]]
            Cached data if it exists and is readable, None otherwise.
        """
        path = self._cache_path(cache_key, fmt)
        if not path.exists():
            return None
        try:
            if fmt == "json":
                return json.loads(path.read_text())
            if fmt == "csv":
                return pd.read_csv(path)
            if fmt == "parquet":
                return pd.read_parquet(path)
        except Exception as e:
            log.debug(f"Failed to read cache {path}: {e}")
        return None

    def write(self, cache_key: str, fmt: str, payload: Union[pd.DataFrame, Any]) -> None:
        """Write data to cache; failures are logged and ignored.

        Parameters
        ----------
        cache_key : str
            Cache key identifier.
        fmt : str
            One of ``"json"``, ``"csv"``, ``"parquet"``. The last two take a
            DataFrame.
        payload : Union[pd.DataFrame, Any]
            Data to store.
        """
        path = self._cache_path(cache_key, fmt)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            if fmt == "parquet":
                payload.to_parquet(path, index=False)
            elif fmt == "csv":
                payload.to_csv(path, index=False)
            else:
                path.write_text(json.dumps(payload))
        except Exception as e:
            log.debug(f"Failed to write cache: {e}")

    def clear(self) -> int:
        """Clear all cached files under cache directory.

        Returns
        -------
        int
            Number of files deleted.
        """
        cache_root = Path(self.cache_dir)
        if not cache_root.exists():
            return 0

        deleted = 0
        for p in cache_root.glob("**/*"):
            if p.is_file():
                try:
                    p.unlink()
                    deleted += 1
                except Exception as e:
                    log.debug(f"Failed to delete cache file {p}: {e}")

        for p in sorted(cache_root.glob("**/*"), reverse=True):
            if p.is_dir():
                try:
                    p.rmdir()
                except OSError:
                    pass

        return deleted
