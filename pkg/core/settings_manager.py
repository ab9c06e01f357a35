"""
Settings Manager - Persistent toolkit settings and JSON descriptors
"""
import json

from loguru import logger
from PyQt6.QtCore import QSettings

from .errors import FormatError

DEFAULTS = {
    'semi_empty_bound': 3,
    'witness_depth': 6,
    'output_format': 'human',
    'log_level': 'WARNING',
    'recent_files': [],
    'max_recent_files': 10,
}

OUTPUT_FORMATS = ('human', 'tabular')


class SettingsManager:
    def __init__(self, path=None):
        if path is None:
            self.settings = QSettings('AutomataToolkit', 'Settings')
        else:
            self.settings = QSettings(str(path), QSettings.Format.IniFormat)
        self._init_defaults()

    def _init_defaults(self):
        """Initialize default settings if not present"""
        for key, value in DEFAULTS.items():
            if not self.settings.contains(key):
                self.settings.setValue(key, value)

    # Recent Files
    def add_recent_file(self, file_path):
        """Add file to recent files list"""
        recent = self.get_recent_files()
        if file_path in recent:
            recent.remove(file_path)
        recent.insert(0, str(file_path))
        self.settings.setValue('recent_files', recent[:self.get_int('max_recent_files')])

    def get_recent_files(self):
        """Get list of recent files"""
        recent = self.settings.value('recent_files', [])
        if recent is None:
            return []
        if isinstance(recent, str):
            return [recent] if recent else []
        return list(recent)

    # Typed getters
    def get_int(self, key):
        return int(self.settings.value(key, DEFAULTS.get(key, 0)))

    def semi_empty_bound(self):
        return self.get_int('semi_empty_bound')

    def witness_depth(self):
        return self.get_int('witness_depth')

    def output_format(self):
        fmt = str(self.settings.value('output_format', 'human'))
        return fmt if fmt in OUTPUT_FORMATS else 'human'

    def log_level(self):
        return str(self.settings.value('log_level', 'WARNING')).upper()

    # Generic getter/setter
    def get(self, key, default=None):
        """Get any setting value"""
        return self.settings.value(key, default)

    def set(self, key, value):
        """Set any setting value; known integer keys are validated"""
        if key in DEFAULTS and isinstance(DEFAULTS[key], int):
            value = int(value)
        if key == 'output_format' and value not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {', '.join(OUTPUT_FORMATS)}")
        self.settings.setValue(key, value)
        self.settings.sync()

    def as_dict(self):
        """All known settings with their current values"""
        return {key: self.get(key, default) for key, default in DEFAULTS.items()}

    # Descriptors
    def load_descriptor(self, file_path):
        """Load a JSON descriptor (chain levels, cost contexts)"""
        try:
            with open(file_path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(e.msg, str(file_path), e.lineno) from e
        if not isinstance(data, dict):
            raise FormatError("descriptor must be a JSON object", str(file_path))
        self.add_recent_file(str(file_path))
        logger.debug("loaded descriptor {}", file_path)
        return data

    def save_descriptor(self, data, file_path):
        """Save a JSON descriptor"""
        with open(file_path, 'w') as f:
            json.dump(data, f, indent=2)

    # Reset
    def reset_to_defaults(self):
        """Reset all settings to defaults"""
        self.settings.clear()
        self._init_defaults()
        self.settings.sync()
