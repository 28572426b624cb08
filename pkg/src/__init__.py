"""IDInit laboratory: identity-preserving initializers, a micro training engine and probes."""

__version__ = "0.1.0"
__author__ = "Initialization Research Team"

from .utils import Config, get_logger, setup_logger

__all__ = ["Config", "get_logger", "setup_logger"]
