"""
Exception hierarchy shared by every package.

Validation problems stay ValueError subclasses so callers that only catch
ValueError (as the dataclass __post_init__ checks always did) keep working.
"""

from typing import Optional


class RDQNError(Exception):
    """Base class for all domain errors"""


class InputError(RDQNError, ValueError):
    """Bad shapes, dimensions or arguments"""


class ConfigError(RDQNError, ValueError):
    """Invalid configuration; carries the dotted path of the offending field"""

    def __init__(self, path: str, message: str):
        self.path = path
        self.reason = message
        super().__init__(f"{path}: {message}" if path else message)


class NumericalError(RDQNError, ArithmeticError):
    """A non-finite intermediate value showed up"""

    def __init__(self, message: str, sample_index: Optional[int] = None):
        self.sample_index = sample_index
        super().__init__(message)


class EpsilonBarError(NumericalError):
    """Effective radius ε̄ < 0 for a transition while the policy is Error"""

    def __init__(self, transition_index: int, epsilon_bar: float):
        self.transition_index = transition_index
        self.epsilon_bar = epsilon_bar
        super().__init__(
            f"epsilon_bar={epsilon_bar:.6g} < 0 for transition {transition_index}; "
            "enlarge epsilon, change delta/nu or switch epsilon_bar_policy to warn_and_drop",
            sample_index=transition_index,
        )


class TrainingError(RDQNError, RuntimeError):
    """Non-finite gradient or parameter during training"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{message} at {location}" if location else message)


class InfeasibleError(RDQNError, ValueError):
    """Empty ambiguity ball, infeasible marginals or invalid duality"""


class IngestionError(RDQNError, ValueError):
    """Problem reading a price file; carries the 1-based line number"""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")
