"""qiraa: sentence-level difficulty assessment for Arabic (CEFR levels)."""

__version__ = "0.1.0"
