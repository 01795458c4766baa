from .base import ToolMeta, ToolServer, tool
from .solver import SolverToolServer

__all__ = ["SolverToolServer", "ToolMeta", "ToolServer", "tool"]
