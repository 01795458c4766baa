from .fastmcp import build_fastmcp, serve

__all__ = ["build_fastmcp", "serve"]
