import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import ValidationError

from .experiment_config import ExperimentFile


class Settings:
    def __init__(self, config_file: Optional[str] = None):
        self.config_file = config_file or "config.yaml"
        self.logger = logging.getLogger(__name__)
        self._config: Dict[str, Any] = {}
        self._validated: Optional[ExperimentFile] = None
        self._load_config()

    def _load_config(self):
        """
        Carga la configuración desde archivo y variables de entorno
        """
        config_path = Path(self.config_file)
        if config_path.exists():
            with open(config_path, 'r', encoding='utf-8') as f:
                if config_path.suffix.lower() in ('.yaml', '.yml'):
                    self._config = yaml.safe_load(f) or {}
                elif config_path.suffix.lower() == '.json':
                    self._config = json.load(f)
                else:
                    raise ValueError(f"Unsupported config file format: {config_path.suffix}")
        else:
            self.logger.warning(f"Config file {config_path} not found, using defaults")

        # Sobrescribir con variables de entorno
        self._load_env_variables()

    def _section(self, name: str) -> Dict[str, Any]:
        if not isinstance(self._config.get(name), dict):
            self._config[name] = {}
        return self._config[name]

    def _load_env_variables(self):
        """
        Carga configuración desde variables de entorno
        """
        if os.getenv('LOG_LEVEL'):
            self._section('logging')['level'] = os.getenv('LOG_LEVEL')
        if os.getenv('LOG_FILE'):
            self._section('logging')['file'] = os.getenv('LOG_FILE')

        if os.getenv('DATABASE_PATH'):
            self._section('database')['path'] = os.getenv('DATABASE_PATH')

        if os.getenv('EXPERIMENT_SEED'):
            self._section('rng')['seed'] = int(os.getenv('EXPERIMENT_SEED'))

        if os.getenv('MAX_CONCURRENT_TRIALS'):
            self._section('workers')['max_concurrent_trials'] = int(os.getenv('MAX_CONCURRENT_TRIALS'))

    def apply_overrides(self, seed: Optional[int] = None, log_level: Optional[str] = None) -> None:
        """
        Aplica los flags de línea de comandos sobre archivo y entorno
        """
        if seed is not None:
            self._section('rng')['seed'] = seed
        if log_level:
            self._section('logging')['level'] = log_level
        self._validated = None

    def get(self, key: str, default: Any = None) -> Any:
        """
        Obtiene un valor de configuración usando notación de punto
        """
        keys = key.split('.')
        value = self._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def get_logging_config(self) -> Dict[str, Any]:
        return self._config.get('logging', {})

    def get_all_config(self) -> Dict[str, Any]:
        return self._config.copy()

    def validate_required_config(self) -> bool:
        """
        Valida el archivo completo contra el esquema; registra cada error
        """
        try:
            self._validated = ExperimentFile.model_validate(self._config)
            return True
        except ValidationError as e:
            for error in e.errors():
                location = '.'.join(str(part) for part in error['loc'])
                self.logger.error(f"Configuration Error: {location}: {error['msg']}")
            return False

    @property
    def experiment_file(self) -> ExperimentFile:
        if self._validated is None and not self.validate_required_config():
            raise ValueError("configuration is invalid, see logged errors")
        return self._validated
