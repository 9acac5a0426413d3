"""
JSON fixtures of oracle instances: {"instances": [{...}, ...]}
"""

import json
from pathlib import Path
from typing import List, Union

from models.errors import InputError
from models.instance import DiscreteRobustInstance


class InstanceLoader:
    """Loads and saves DiscreteRobustInstance fixtures"""

    @staticmethod
    def load_from_json(json_file_path: Union[str, Path]) -> List[DiscreteRobustInstance]:
        """Load every instance from a JSON file"""
        try:
            with open(json_file_path, 'r') as f:
                data = json.load(f)
            instances = []
            for i, item in enumerate(data.get('instances', [])):
                try:
                    instances.append(DiscreteRobustInstance.from_dict(item))
                except (TypeError, ValueError) as e:
                    raise InputError(f"Instance {i + 1} validation failed: {e}") from e
            return instances
        except (FileNotFoundError, json.JSONDecodeError, KeyError, AttributeError) as e:
            raise InputError(f"Error loading instances from JSON: {e}") from e

    @staticmethod
    def load_instance_from_json(json_file_path: Union[str, Path], instance_id: int) -> DiscreteRobustInstance:
        """Load a single instance by id"""
        for instance in InstanceLoader.load_from_json(json_file_path):
            if instance.instance_id == instance_id:
                return instance
        raise InputError(f"Instance {instance_id} not found in {json_file_path}")

    @staticmethod
    def save_to_json(instances: List[DiscreteRobustInstance], json_file_path: Union[str, Path]) -> Path:
        """Save instances to a JSON file"""
        path = Path(json_file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        data = {
            'instances': [instance.to_dict() for instance in instances]
        }
        with open(path, 'w') as f:
            json.dump(data, f, indent=2)
        return path
