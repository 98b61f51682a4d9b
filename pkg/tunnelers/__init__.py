"""Top-level package for Tunnelers."""

__version__ = '0.1.0'
