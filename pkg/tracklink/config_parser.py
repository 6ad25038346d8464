"""Parser for YAML/JSON run configuration files."""

import json
from pathlib import Path
from typing import Any, Callable, Dict, Union

import yaml
from pydantic import ValidationError

from .schemas import RunConfigSchema, format_validation_error

# File suffix -> text decoder
_DECODERS: Dict[str, Callable[[str], Any]] = {
    ".yaml": yaml.safe_load,
    ".yml": yaml.safe_load,
    ".json": json.loads,
}


class ConfigParser:
    """Reads a run configuration holding optional ``dgm`` and ``synth`` sections."""

    def parse(self, config_path: Union[str, Path]) -> RunConfigSchema:
        """Parse and validate a configuration file.

        An empty file yields the default configuration.

        Raises:
            ValueError: If the file is missing, has an unknown suffix or is invalid
        """
        path = Path(config_path)
        if not path.exists():
            raise ValueError(f"Config file not found: {path}")
        decode = _DECODERS.get(path.suffix.lower())
        if decode is None:
            raise ValueError(
                f"Unsupported file format: {path.suffix} (expected one of {', '.join(_DECODERS)})"
            )
        data = decode(path.read_text()) or {}
        if not isinstance(data, dict):
            raise ValueError(f"Invalid config: expected a mapping at the top level of {path}")
        return self.validate(data)

    def validate(self, config_dict: Dict[str, Any]) -> RunConfigSchema:
        """Validate an already decoded configuration mapping."""
        try:
            return RunConfigSchema(**config_dict)
        except ValidationError as e:
            raise ValueError(f"Invalid config:\n{format_validation_error(e)}")
