"""Logging setup.

Records go to stderr through rich so that JSON reports on stdout stay clean.
"""

import logging

from rich.console import Console
from rich.logging import RichHandler

_configured = False


def setup_logging(level: str = "WARNING") -> None:
    """Install a single rich handler on the root ``src`` logger."""
    global _configured
    root = logging.getLogger("src")
    root.setLevel(level.upper())
    if _configured:
        return
    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.propagate = False
    _configured = True
