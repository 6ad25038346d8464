"""Built-in synthetic benchmark presets (YAML files in ``presets/``)."""

from pathlib import Path
from typing import Dict, List

import yaml
from pydantic import ValidationError

from .schemas import PresetSchema, format_validation_error

PRESETS_DIR = Path(__file__).parent / "presets"


class PresetLoader:
    """Loads and caches the benchmark presets shipped with the package."""

    def __init__(self, presets_dir: Path = PRESETS_DIR):
        self.presets_dir = presets_dir
        self._cache: Dict[str, PresetSchema] = {}

    def load(self, name: str) -> PresetSchema:
        """Load a preset by name.

        Raises:
            ValueError: If no preset has that name or its file fails validation
        """
        if name in self._cache:
            return self._cache[name]

        path = self.presets_dir / f"{name}.yaml"
        if not path.is_file():
            raise ValueError(
                f"Preset '{name}' not found. Available presets: {', '.join(self.list_presets())}"
            )
        try:
            preset = PresetSchema(**(yaml.safe_load(path.read_text()) or {}))
        except ValidationError as e:
            raise ValueError(f"Invalid preset '{name}':\n{format_validation_error(e)}")

        self._cache[name] = preset
        return preset

    def list_presets(self) -> List[str]:
        """Sorted names of the available presets."""
        return sorted(path.stem for path in self.presets_dir.glob("*.yaml"))
