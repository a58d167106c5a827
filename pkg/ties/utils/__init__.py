"""
TIES Utility Modules
Logging and the error hierarchy shared by the library and the CLI.
"""

from ties.utils.errors import TiesError, ConfigError, ContractViolation, DocumentError
from ties.utils.logging_config import setup_logging, get_logger

__all__ = [
    "TiesError",
    "ConfigError",
    "ContractViolation",
    "DocumentError",
    "setup_logging",
    "get_logger"
]
