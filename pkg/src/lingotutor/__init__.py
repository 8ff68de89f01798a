"""Construct-based language tutoring engine."""

from pathlib import Path

from .features import FeatureBundle, FeatureSchema
from .morphology import MorphAnalysis, Morphology
from .pack import LanguagePack, load_pack, load_packs

__version__ = "0.1.0"


def default_packs_dir() -> Path:
    """Directory holding the language packs shipped with the package."""
    return Path(__file__).parent / "packs"


__all__ = [
    "FeatureBundle",
    "FeatureSchema",
    "LanguagePack",
    "MorphAnalysis",
    "Morphology",
    "default_packs_dir",
    "load_pack",
    "load_packs",
    "__version__",
]
