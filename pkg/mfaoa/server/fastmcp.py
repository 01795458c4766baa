"""FastMCP (stdio) transport for the solver tool server."""

import inspect
import logging
from typing import Any

from mfaoa.errors import MFAOAError
from mfaoa.tools import SolverToolServer, ToolServer

try:
    from mcp.server.fastmcp import FastMCP
except ImportError:
    FastMCP = None

logger = logging.getLogger(__name__)


def _create_tool_wrapper(server: ToolServer, tool_name: str):
    """Wrapper exposing the tool's own signature, routed through call_tool."""
    func = server.tool_function(tool_name)
    signature = inspect.signature(func)
    parameters = [p for name, p in signature.parameters.items() if name != "self"]

    def tool_wrapper(**kwargs) -> dict[str, Any]:
        return server.call_tool(tool_name, kwargs)

    tool_wrapper.__name__ = tool_name
    tool_wrapper.__doc__ = inspect.getdoc(func)
    tool_wrapper.__signature__ = signature.replace(parameters=parameters)
    return tool_wrapper


def build_fastmcp(server: ToolServer | None = None, name: str = "mfaoa"):
    """Create a FastMCP app with every tool of ``server`` registered.

    Raises:
        MFAOAError: The ``mcp`` package is not installed
    """
    if FastMCP is None:
        raise MFAOAError("The mcp package is required for the serve command")

    server = server or SolverToolServer()
    mcp = FastMCP(name)
    for schema in server.get_available_tools():
        tool_name = schema["name"]
        try:
            mcp.tool(name=tool_name, description=schema.get("description", ""))(
                _create_tool_wrapper(server, tool_name)
            )
        except (AttributeError, TypeError, ValueError) as e:
            logger.warning("Failed to register tool %s: %s", tool_name, e)
    return mcp


def serve(name: str = "mfaoa") -> int:
    """Run the solver tools over stdio until the client disconnects."""
    mcp = build_fastmcp(name=name)
    logger.info("Starting FastMCP server %s on stdio", name)
    mcp.run()
    return 0
