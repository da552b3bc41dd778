"""
Core module for ATMask application setup.
"""
from .app import create_app, run
from .dependencies import get_container, reset_container

__all__ = [
    "create_app",
    "run",
    "get_container",
    "reset_container",
]
