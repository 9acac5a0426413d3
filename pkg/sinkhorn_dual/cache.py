"""
Cache of optimized raw lambdas, keyed by replay-buffer slot.
"""

import logging
import math
from typing import Any, Dict, Optional, Tuple

from models.ambiguity import AmbiguityConfig
from models.errors import InputError

logger = logging.getLogger(__name__)


class LambdaCache:
    """Last optimized raw lambda per slot; emptied when the ambiguity set changes"""

    def __init__(self, cfg: Optional[AmbiguityConfig] = None):
        self._entries: Dict[int, float] = {}
        self._key: Optional[Tuple[Any, ...]] = cfg.cache_key() if cfg is not None else None
        self.hits = 0
        self.misses = 0

    def bind(self, cfg: AmbiguityConfig) -> None:
        key = cfg.cache_key()
        if key != self._key:
            if self._entries:
                logger.info("Ambiguity set changed, dropping %d cached lambdas", len(self._entries))
            self._entries.clear()
            self._key = key

    def get(self, slot: int) -> Optional[float]:
        value = self._entries.get(int(slot))
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, slot: int, lambda_raw: float) -> None:
        if not math.isfinite(lambda_raw):
            raise InputError(f"refusing to cache non-finite lambda for slot {slot}")
        self._entries[int(slot)] = float(lambda_raw)

    def invalidate(self, slot: int) -> None:
        self._entries.pop(int(slot), None)

    def clear(self) -> None:
        self._entries.clear()

    def __contains__(self, slot: int) -> bool:
        return int(slot) in self._entries

    def __len__(self) -> int:
        return len(self._entries)
