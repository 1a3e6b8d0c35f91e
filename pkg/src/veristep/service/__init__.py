"""Reward service: HTTP (FastAPI) and line-delimited stdio transports."""

from .app import create_app
from .stdio import serve_stdio

__all__ = ["create_app", "serve_stdio"]
