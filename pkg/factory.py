"""
Sinkhorn Robust DQN - application factory
"""

import os

import click


def create_app(config_name=None) -> click.Group:
    """Application factory function: a click group with every subcommand registered"""
    if config_name is None:
        config_name = os.environ.get('RDQN_ENV', 'development')

    # Load configuration object
    from config import get_config
    config_class = get_config(config_name)

    @click.group(help=f"{config_class.APP_NAME} {config_class.VERSION}")
    @click.version_option(config_class.VERSION)
    @click.pass_context
    def app(ctx):
        config_class.init_app(app)
        ctx.obj = config_class

    # Register commands
    from cli import COMMAND_NAMES

    for name, command in COMMAND_NAMES.items():
        app.add_command(command, name=name)

    app.config_class = config_class
    return app


__version__ = '1.0.0'
__all__ = ['create_app']
