from .cli import run as cli

__all__ = ["cli"]
