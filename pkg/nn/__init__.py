"""
Minimal dense Q-network package

- network: QNetwork, forward/backward passes, target copies
- optim: Adam optimizer state and update
- checkpoint: versioned .npz parameter files
"""

from .network import QNetwork, forward, forward_batch, backward, sync_target
from .optim import AdamState, adam_step
from .checkpoint import FORMAT_VERSION, save_checkpoint, load_checkpoint, load_checkpoint_with_metadata

__all__ = [
    'QNetwork', 'forward', 'forward_batch', 'backward', 'sync_target',
    'AdamState', 'adam_step',
    'FORMAT_VERSION', 'save_checkpoint', 'load_checkpoint', 'load_checkpoint_with_metadata',
]
