"""
Application configuration settings for the Sinkhorn robust DQN toolkit

Experiment-level hyperparameters live in YAML files (config/experiments/);
these classes carry the run-scale defaults and the logging setup.
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

# Base directory of the project
BASE_DIR = Path(__file__).parent.parent

LOG_FORMAT = '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'


class Config:
    """Base configuration class with common settings"""

    # Application settings
    APP_NAME = 'Sinkhorn Robust DQN'
    VERSION = '1.0.0'

    # Output
    OUTPUT_DIR = Path(os.environ.get('RDQN_OUTPUT_DIR') or BASE_DIR / 'runs')
    EXPERIMENTS_DIR = BASE_DIR / 'config' / 'experiments'

    # Run scale
    REPETITIONS = int(os.environ.get('RDQN_REPETITIONS') or 100)
    EVAL_EPISODES = int(os.environ.get('RDQN_EVAL_EPISODES') or 100)
    EVAL_STEPS_PER_EPISODE = int(os.environ.get('RDQN_EVAL_STEPS') or 10_000)
    WORKERS = int(os.environ.get('RDQN_WORKERS') or 1)

    # Logging configuration
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FILE = BASE_DIR / 'logs' / 'rdqn.log'

    @classmethod
    def init_app(cls, app=None):
        """Create output directories and install the console handler"""
        os.makedirs(cls.OUTPUT_DIR, exist_ok=True)
        root = logging.getLogger()
        root.setLevel(cls.LOG_LEVEL)
        if not any(getattr(h, '_rdqn_console', False) for h in root.handlers):
            console = logging.StreamHandler()
            console.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
            console._rdqn_console = True
            root.addHandler(console)


class DevelopmentConfig(Config):
    """Desk-scale defaults"""

    DEBUG = True
    TESTING = False

    REPETITIONS = int(os.environ.get('RDQN_REPETITIONS') or 20)
    EVAL_EPISODES = int(os.environ.get('RDQN_EVAL_EPISODES') or 10)
    EVAL_STEPS_PER_EPISODE = int(os.environ.get('RDQN_EVAL_STEPS') or 10_000)


class ProductionConfig(Config):
    """Full-scale runs: 100 games, 100 evaluation environments of 10,000 steps"""

    DEBUG = False
    TESTING = False

    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')

    @classmethod
    def init_app(cls, app=None):
        super().init_app(app)
        os.makedirs(cls.LOG_FILE.parent, exist_ok=True)

        # Set up file logging
        root = logging.getLogger()
        if not any(isinstance(h, RotatingFileHandler) for h in root.handlers):
            file_handler = RotatingFileHandler(
                cls.LOG_FILE, maxBytes=10240000, backupCount=10
            )
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            file_handler.setLevel(logging.INFO)
            root.addHandler(file_handler)
        logging.getLogger(__name__).info('%s startup', cls.APP_NAME)


class TestingConfig(Config):
    """Tiny sizes for the test suite"""

    DEBUG = True
    TESTING = True

    OUTPUT_DIR = BASE_DIR / 'tests' / 'runs'
    REPETITIONS = 2
    EVAL_EPISODES = 2
    EVAL_STEPS_PER_EPISODE = 50
    WORKERS = 1
    LOG_LEVEL = 'WARNING'


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(config_name=None):
    """Get configuration class by name"""
    if config_name is None:
        config_name = os.environ.get('RDQN_ENV', 'default')
    return config.get(config_name, DevelopmentConfig)
