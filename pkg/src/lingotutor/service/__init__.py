"""HTTP service for the tutoring engine."""

from .app import create_app
from .core import TutorService

__all__ = ["TutorService", "create_app"]
