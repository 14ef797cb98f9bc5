"""HTTP API: analysis, review queue, SME feedback and model lifecycle."""

from .config import ServiceConfig, load_config
from .feedback import FeedbackRecord, FeedbackStore, DuplicateFeedbackError
from .registry import ModelRegistry, RegistryEntry
from .app import create_app

__all__ = [
    "ServiceConfig",
    "load_config",
    "FeedbackRecord",
    "FeedbackStore",
    "DuplicateFeedbackError",
    "ModelRegistry",
    "RegistryEntry",
    "create_app",
]
