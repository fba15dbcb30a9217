"""
__init__.py for the utils module.
"""

from src.utils.settings import Settings, known_countries, load_settings

__all__ = ["Settings", "known_countries", "load_settings"]
