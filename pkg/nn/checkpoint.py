"""
Checkpoint files.

Format (numpy .npz archive, version 1):
    format_version  int scalar
    layer_sizes     int vector, input width first, |A| last
    activation      str scalar
    metadata        JSON str scalar (optional fields such as game index, M, epsilon)
    weight_<l>      float64 (out, in) matrix, row-major
    bias_<l>        float64 (out,) vector
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from models.errors import InputError

from .network import QNetwork

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def save_checkpoint(net: QNetwork, path: Union[str, Path], metadata: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_suffix(".npz")
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {
        "format_version": np.array(FORMAT_VERSION),
        "layer_sizes": np.asarray(net.layer_sizes, dtype=np.int64),
        "activation": np.array(net.activation),
        "metadata": np.array(json.dumps(metadata or {})),
    }
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        arrays[f"weight_{i}"] = np.ascontiguousarray(w, dtype=np.float64)
        arrays[f"bias_{i}"] = np.ascontiguousarray(b, dtype=np.float64)
    with open(path, "wb") as f:
        np.savez(f, **arrays)
    logger.debug("Saved checkpoint %s", path)
    return path


def load_checkpoint_with_metadata(path: Union[str, Path]) -> Tuple[QNetwork, Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as archive:
            version = int(archive["format_version"])
            if version != FORMAT_VERSION:
                raise InputError(f"{path}: unsupported checkpoint format_version {version}")
            layer_sizes = [int(n) for n in archive["layer_sizes"]]
            n_layers = len(layer_sizes) - 1
            weights = [archive[f"weight_{i}"].copy() for i in range(n_layers)]
            biases = [archive[f"bias_{i}"].copy() for i in range(n_layers)]
            activation = str(archive["activation"])
            metadata = json.loads(str(archive["metadata"])) if "metadata" in archive.files else {}
    except (KeyError, ValueError, OSError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"{path}: unreadable checkpoint ({e})") from e
    return QNetwork(layer_sizes, weights, biases, activation), metadata


def load_checkpoint(path: Union[str, Path]) -> QNetwork:
    net, _ = load_checkpoint_with_metadata(path)
    return net
