"""
Configuration package for the Sinkhorn robust DQN toolkit
"""

from .settings import TestingConfig, get_config

__all__ = ['TestingConfig', 'get_config']
