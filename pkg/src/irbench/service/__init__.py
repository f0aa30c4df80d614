"""FastAPI service wrapping the benchmarking library.

``schemas`` defines the pydantic request/response models, ``handlers`` the
transport-free implementations, and ``app`` the HTTP wiring.  The command
line client calls the handlers in process by default and speaks to a
remote instance over HTTP when asked.
"""

from .app import app, create_app

__all__ = ["app", "create_app"]
