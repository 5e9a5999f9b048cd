"""HTTP generation service (FastAPI app plus configuration loading)."""
from .app import ApiError, create_app
from .config import ServiceConfig, load_service_config

__all__ = ["ApiError", "ServiceConfig", "create_app", "load_service_config"]
