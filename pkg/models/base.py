""""
------------------------------------------------------------
 Base class for all data models with common functionality
------------------------------------------------------------
"""

from dataclasses import dataclass, fields
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict
import json

import numpy as np

from .errors import ConfigError


def _plain(value: Any) -> Any:
    """Convert a field value into something json.dumps accepts"""
    if isinstance(value, BaseModel):
        return value.to_dict()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    return value


@dataclass
class BaseModel:
    """Base class for all data models with common functionality"""

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to dictionary"""
        return {field_obj.name: _plain(getattr(self, field_obj.name)) for field_obj in fields(self)}

    def to_json(self) -> str:
        """Serialize to JSON string"""
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]):
        """Create instance from dictionary, ignoring unknown keys"""
        known = {field_obj.name for field_obj in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in known})

    def validate(self) -> bool:
        """Override in subclasses for custom validation"""
        return True


def require(condition: bool, field_name: str, message: str) -> None:
    """Raise a ConfigError for field_name unless condition holds"""
    if not condition:
        raise ConfigError(field_name, message)


def join_path(*parts: str) -> str:
    return ".".join(part for part in parts if part)


def build_nested(path: str, factory: Callable[[Any], Any], data: Any) -> Any:
    """Run factory(data), prefixing any ConfigError with the parent path"""
    try:
        return factory(data)
    except ConfigError as exc:
        raise ConfigError(join_path(path, exc.path), exc.reason) from None
    except TypeError as exc:
        # unknown or missing keyword in a config section
        raise ConfigError(path, str(exc)) from None
