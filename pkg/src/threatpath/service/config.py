"""Service configuration: JSON file plus THREATPATH_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..classifier import TrainingConfig


class ConfigError(ValueError):
    pass


@dataclass
class ServiceConfig:
    snapshot_path: str
    registry_path: str
    feedback_log_path: str
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    curated_map_path: str | None = None
    glossary_path: str | None = None
    api_token: str | None = None
    sample_size: int | None = None  # None: train on every labeled CVE
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    training: TrainingConfig = field(default_factory=TrainingConfig)

    def __post_init__(self):
        for name in ("snapshot_path", "registry_path", "feedback_log_path"):
            if not getattr(self, name):
                raise ConfigError(f"config requires {name}")


_ENV_KEYS = {
    "THREATPATH_SNAPSHOT": "snapshot_path",
    "THREATPATH_REGISTRY": "registry_path",
    "THREATPATH_FEEDBACK_LOG": "feedback_log_path",
    "THREATPATH_LISTEN_HOST": "listen_host",
    "THREATPATH_LISTEN_PORT": "listen_port",
    "THREATPATH_CURATED_MAP": "curated_map_path",
    "THREATPATH_GLOSSARY": "glossary_path",
    "THREATPATH_API_TOKEN": "api_token",
}


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    for env_key, field_name in _ENV_KEYS.items():
        if env.get(env_key):
            raw[field_name] = env[env_key]
    if "listen_port" in raw:
        raw["listen_port"] = int(raw["listen_port"])
    training = raw.pop("training", {})
    try:
        config = ServiceConfig(training=TrainingConfig.from_dict(training), **raw)
    except TypeError as exc:
        raise ConfigError(f"bad config keys: {exc}") from exc
    return config
