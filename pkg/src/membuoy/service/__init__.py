from .app import create_app
from .sessions import SessionStore

__all__ = ["create_app", "SessionStore"]
