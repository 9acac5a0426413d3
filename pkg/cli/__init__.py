"""
Command-line package for the Sinkhorn robust DQN toolkit

This package contains one module of click commands per subcommand:
- train_commands: repeated games of fit, train, checkpoint, evaluate
- eval_commands: evaluation of saved checkpoints
- probe_commands: worst-case CDF curves
- oracle_commands: oracle self-checks
"""

from .train_commands import train_command, run_train
from .eval_commands import eval_command, run_eval
from .probe_commands import cdf_probe_command, run_cdf_probe
from .oracle_commands import oracle_check_command, run_oracle_check


__all__ = [
    'train_command',
    'eval_command',
    'cdf_probe_command',
    'oracle_check_command',
    'run_train',
    'run_eval',
    'run_cdf_probe',
    'run_oracle_check',
]

# Command configuration
COMMAND_NAMES = {
    'train': train_command,
    'eval': eval_command,
    'cdf-probe': cdf_probe_command,
    'oracle-check': oracle_check_command,
}
