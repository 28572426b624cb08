"""Configuration management for experiments."""

import copy
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from .errors import ConfigError

_ENV_PATTERN = re.compile(r"^\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-(.*))?\}$")

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / "config" / "config.yaml"


class Config:
    """Configuration manager with environment variable support.

    YAML is a superset of JSON, so JSON run files load through the same path.
    """

    def __init__(self, config_path: Optional[str] = None, data: Optional[Dict[str, Any]] = None):
        """Initialize configuration.

        Args:
            config_path: Path to YAML/JSON config file. Defaults to config/config.yaml
            data: Pre-parsed configuration; skips file loading when given
        """
        load_dotenv()

        if data is not None:
            self._config = copy.deepcopy(data)
        else:
            path = DEFAULT_CONFIG_PATH if config_path is None else Path(config_path)
            self._config = self._load(path)

        self._substitute_env_vars(self._config)

    @staticmethod
    def _load(path: Path) -> Dict[str, Any]:
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        with open(path, "r") as f:
            try:
                loaded = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"Cannot parse config file {path}: {e}") from e
        if loaded is None:
            return {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"Config file {path} must contain a mapping at top level")
        return loaded

    def _substitute_env_vars(self, obj: Any) -> None:
        """Recursively substitute ``${VAR}`` and ``${VAR:-default}`` values.

        Args:
            obj: Configuration object to process
        """
        if isinstance(obj, dict):
            for key, value in obj.items():
                if isinstance(value, str):
                    obj[key] = self._resolve(value)
                else:
                    self._substitute_env_vars(value)
        elif isinstance(obj, list):
            for i, item in enumerate(obj):
                if isinstance(item, str):
                    obj[i] = self._resolve(item)
                else:
                    self._substitute_env_vars(item)

    @staticmethod
    def _resolve(value: str) -> str:
        match = _ENV_PATTERN.match(value)
        if match is None:
            return value
        env_var, default = match.groups()
        return os.getenv(env_var, default if default is not None else value)

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation.

        Args:
            key: Configuration key (e.g., "experiments.toy.lr")
            default: Default value if key not found

        Returns:
            Configuration value
        """
        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default
        return value

    def get_section(self, section: str) -> Dict[str, Any]:
        """Get entire configuration section (dot notation allowed).

        Args:
            section: Section name

        Returns:
            Configuration section as dictionary (a copy)
        """
        value = self.get(section, {})
        return copy.deepcopy(value) if isinstance(value, dict) else {}

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._config)

    def __getitem__(self, key: str) -> Any:
        """Allow dictionary-style access."""
        return self.get(key)

    def __repr__(self) -> str:
        """String representation."""
        return f"Config({self._config})"

