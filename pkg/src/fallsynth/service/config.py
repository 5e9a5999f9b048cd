"""Service configuration: TOML file, then environment overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ENV_OVERRIDES = {
    "PORT": ("port", int),
    "CHECKPOINT_PATH": ("checkpoint_path", str),
    "CORS_ORIGIN": ("cors_origin", str),
    "LOG_LEVEL": ("log_level", str),
}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    checkpoint_path: str | None = None
    cors_origin: str = "*"
    log_level: str = "info"


def load_service_config(path=None, env=None) -> ServiceConfig:
    """Read the [service] table of a TOML file (when given), then apply
    PORT/CHECKPOINT_PATH/CORS_ORIGIN/LOG_LEVEL from the environment."""
    values: dict = {}
    if path is not None:
        with open(path, "rb") as f:
            document = tomllib.load(f)
        table = document.get("service", {})
        for key in ServiceConfig.__dataclass_fields__:
            if key in table:
                values[key] = table[key]
    env = os.environ if env is None else env
    for name, (key, convert) in ENV_OVERRIDES.items():
        if name in env and env[name] != "":
            values[key] = convert(env[name])
    return ServiceConfig(**values)
