"""Core module for application configuration and shared utilities."""

from app.core.config import settings

__all__ = ['settings']
