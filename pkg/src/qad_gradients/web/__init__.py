"""JSON web API for gradient, cost and QAD requests."""

from .app import create_app, main

__all__ = ["create_app", "main"]
