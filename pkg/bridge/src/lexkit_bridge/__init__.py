"""lexkit-bridge: standalone model jobs emitting lexkit's canonical files."""

__version__ = "0.1.0"
