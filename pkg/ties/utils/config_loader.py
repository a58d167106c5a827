"""
Configuration loader for TIES.
Handles loading run configuration from defaults, YAML files, environment
variables and command-line overrides, in that order of precedence.
"""
import copy
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dataclasses_json import dataclass_json

from ties.pipelines.smoothing import WindowKind, WindowMode, WindowSpec
from ties.pipelines.textprep import CorpusFormat, TokenizerOptions, load_stopwords
from ties.topology.diagram_metric import DiagramMetric, MetricName
from ties.utils.errors import ConfigError, ContractViolation


@dataclass_json
@dataclass
class RunConfig:
    """Typed, validated settings of one ``extract`` run."""

    corpus_path: str
    lexicon_path: str
    corpus_format: str = CorpusFormat.JSONL.value
    lowercase: bool = False
    stopwords_path: Optional[str] = None
    window_size: int = 3
    window_kind: str = WindowKind.ARITHMETIC.value
    window_mode: str = WindowMode.VALID.value
    metric: str = MetricName.W1.value
    features_path: str = "features.csv"
    features_format: Optional[str] = None
    report_path: Optional[str] = None
    phi_dir: Optional[str] = None
    workers: int = 1
    seed: int = 0
    log_level: str = "INFO"
    progress: bool = True

    def window(self) -> WindowSpec:
        return WindowSpec(size=self.window_size, kind=WindowKind(self.window_kind),
                          mode=WindowMode(self.window_mode))

    def diagram_metric(self) -> DiagramMetric:
        return DiagramMetric(MetricName(self.metric))

    def tokenizer_options(self) -> TokenizerOptions:
        stopwords = load_stopwords(self.stopwords_path) if self.stopwords_path else frozenset()
        return TokenizerOptions(lowercase=self.lowercase, stopwords=stopwords)

    def validate(self) -> "RunConfig":
        """Resolve paths and enumerations; raise :class:`ConfigError` on any problem."""
        problems = []
        if not Path(self.corpus_path).exists():
            problems.append(f"corpus not found: {self.corpus_path}")
        if not Path(self.lexicon_path).is_file():
            problems.append(f"lexicon not found: {self.lexicon_path}")
        if self.stopwords_path and not Path(self.stopwords_path).is_file():
            problems.append(f"stopword file not found: {self.stopwords_path}")
        if isinstance(self.workers, bool) or not isinstance(self.workers, int) or self.workers < 1:
            problems.append(f"workers must be an integer >= 1, got {self.workers!r}")
        try:
            CorpusFormat(self.corpus_format)
        except ValueError:
            problems.append(f"unknown corpus format: {self.corpus_format}")
        try:
            self.window()
        except (ValueError, ContractViolation) as exc:
            problems.append(f"invalid window: {exc}")
        try:
            self.diagram_metric()
        except ValueError:
            problems.append(f"unknown metric: {self.metric}")
        for name, parent in (("features", self.features_path), ("report", self.report_path)):
            if parent and not Path(parent).resolve().parent.exists():
                problems.append(f"{name} output directory does not exist: {Path(parent).parent}")
        if problems:
            raise ConfigError("; ".join(problems))
        return self


class ConfigLoader:
    """
    Load and manage configuration for TIES.

    Supports loading from:
    - Default values
    - YAML configuration files (nested sections or dotted keys)
    - Environment variables (``TIES_*``)
    - Explicit overrides, typically command-line flags
    """

    ENV_MAPPINGS = {
        "TIES_WORKERS": "workers",
        "TIES_LOG_LEVEL": "log_level",
        "TIES_SEED": "seed",
    }

    # dotted configuration key -> RunConfig field
    FIELD_MAP = {
        "corpus.path": "corpus_path",
        "corpus.format": "corpus_format",
        "lexicon": "lexicon_path",
        "tokenizer.lowercase": "lowercase",
        "tokenizer.stopwords": "stopwords_path",
        "window.size": "window_size",
        "window.kind": "window_kind",
        "window.mode": "window_mode",
        "metric.name": "metric",
        "output.features": "features_path",
        "output.format": "features_format",
        "output.report": "report_path",
        "output.phi_dir": "phi_dir",
        "workers": "workers",
        "seed": "seed",
        "log_level": "log_level",
        "progress": "progress",
    }

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        """
        Initialize the configuration loader.

        Args:
            config_file: Optional path to YAML configuration file
        """
        self.config: Dict[str, Any] = {}
        self.config_file = Path(config_file) if config_file else None

        self._load_defaults()
        if self.config_file:
            if not self.config_file.is_file():
                raise ConfigError(f"configuration file not found: {self.config_file}")
            self._load_from_file(self.config_file)
        self._load_from_env()

    def _load_defaults(self) -> None:
        """Load default configuration values."""
        self.config = {
            "corpus.format": CorpusFormat.JSONL.value,
            "tokenizer.lowercase": False,
            "window.size": 3,
            "window.kind": WindowKind.ARITHMETIC.value,
            "window.mode": WindowMode.VALID.value,
            "metric.name": MetricName.W1.value,
            "output.features": "features.csv",
            "workers": 1,
            "seed": 0,
            "log_level": "INFO",
            "progress": True,
        }

    @staticmethod
    def _flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
        flat: Dict[str, Any] = {}
        for key, value in data.items():
            dotted = f"{prefix}{key}"
            if isinstance(value, dict):
                flat.update(ConfigLoader._flatten(value, f"{dotted}."))
            else:
                flat[dotted] = value
        return flat

    def _load_from_file(self, config_file: Path) -> None:
        """
        Load configuration from YAML file.

        Args:
            config_file: Path to YAML configuration file
        """
        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                file_config = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {config_file}: {exc}") from exc
        if file_config is None:
            return
        if not isinstance(file_config, dict):
            raise ConfigError(f"{config_file}: top level must be a mapping")
        flat = self._flatten(file_config)
        unknown = sorted(set(flat) - set(self.FIELD_MAP))
        if unknown:
            raise ConfigError(f"{config_file}: unknown keys {', '.join(unknown)}")

        # relative paths in the file are relative to the file itself
        base = config_file.resolve().parent
        for key in ("corpus.path", "lexicon", "tokenizer.stopwords", "output.features",
                    "output.report", "output.phi_dir"):
            if flat.get(key) and not Path(flat[key]).is_absolute():
                flat[key] = str(base / flat[key])
        self.config.update(flat)

    def _load_from_env(self) -> None:
        """Load configuration from environment variables."""
        for env_var, config_key in self.ENV_MAPPINGS.items():
            value = os.getenv(env_var)
            if value is None or value == "":
                continue
            if value.lower() in ('true', 'false'):
                self.config[config_key] = value.lower() == 'true'
            elif value.lstrip("-").isdigit():
                self.config[config_key] = int(value)
            else:
                self.config[config_key] = value

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value.

        Args:
            key: Dotted configuration key
            default: Default value if key not found

        Returns:
            Configuration value
        """
        return self.config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """
        Set a configuration value. ``None`` leaves the current value untouched,
        so unset command-line flags do not clobber file values.

        Args:
            key: Dotted configuration key
            value: Configuration value
        """
        if key not in self.FIELD_MAP:
            raise ConfigError(f"unknown configuration key: {key}")
        if value is not None:
            self.config[key] = value

    def apply_overrides(self, overrides: Dict[str, Any]) -> None:
        for key, value in overrides.items():
            self.set(key, value)

    def split_seed(self) -> int:
        """Seed of the train/test split (``seed`` key, ``TIES_SEED``)."""
        value = self.config.get("seed")
        if isinstance(value, bool):
            raise ConfigError(f"seed must be an integer, got {value!r}")
        try:
            return int(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"seed must be an integer, got {value!r}") from exc

    def run_config(self) -> RunConfig:
        """
        Materialise and validate a :class:`RunConfig`.

        Raises:
            ConfigError: missing required keys or invalid values
        """
        missing = [key for key in ("corpus.path", "lexicon") if not self.config.get(key)]
        if missing:
            raise ConfigError(f"missing required configuration: {', '.join(missing)}")
        values = {self.FIELD_MAP[key]: copy.deepcopy(value) for key, value in self.config.items()}
        values["seed"] = self.split_seed()
        try:
            values["window_size"] = int(values["window_size"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid integer setting: {exc}") from exc
        return RunConfig(**values).validate()

    def __repr__(self) -> str:
        """String representation of the configuration."""
        return f"ConfigLoader(config_file={self.config_file})"
