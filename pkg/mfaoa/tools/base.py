"""Decorator-based tool registration shared by the solver tool server."""

import inspect
import logging
from datetime import UTC, datetime
from typing import Any, get_origin

from mfaoa.config import log_error_with_traceback
from mfaoa.errors import MFAOAError

logger = logging.getLogger(__name__)


def tool(name: str, description: str | None = None):
    """Decorator for registering tools with automatic schema generation.

    The metaclass collects decorated methods when the class is created.

    Args:
        name: Tool name
        description: Tool description (uses docstring if not provided)

    Returns:
        Decorator function that marks the method for tool registration
    """

    def decorator(func):
        func.tool_name = name
        func.tool_description = description
        return func

    return decorator


class ToolMeta(type):
    """Metaclass that collects @tool decorated methods and their JSON schemas."""

    def __new__(mcs, name, bases, namespace, **kwargs):
        cls = super().__new__(mcs, name, bases, namespace, **kwargs)

        cls._tools = {}
        cls._tool_schemas = []

        for attr_name in dir(cls):
            attr = getattr(cls, attr_name)
            if hasattr(attr, "tool_name"):
                mcs._register_tool(cls, attr, attr.tool_name, attr.tool_description)

        return cls

    def _register_tool(cls, func, tool_name: str, description: str | None = None):
        """Register a single tool method."""
        sig = inspect.signature(func)

        properties = {}
        required = []
        for param_name, param in sig.parameters.items():
            if param_name == "self":
                continue
            schema = {
                "type": ToolMeta._get_json_type(param.annotation),
                "description": f"{param_name} parameter",
            }
            if param.default is not param.empty:
                schema["default"] = param.default
            else:
                required.append(param_name)
            properties[param_name] = schema

        cls._tools[tool_name] = func
        cls._tool_schemas.append(
            {
                "name": tool_name,
                "description": description
                or inspect.getdoc(func)
                or f"Execute {tool_name}",
                "inputSchema": {
                    "type": "object",
                    "properties": properties,
                    "required": required,
                },
            }
        )

    @staticmethod
    def _get_json_type(python_type) -> str:
        """Convert Python type annotations to JSON Schema types."""
        origin = get_origin(python_type) or python_type
        if origin is bool:
            return "boolean"
        if origin is int:
            return "integer"
        if origin is float:
            return "number"
        if origin is list:
            return "array"
        if origin is dict:
            return "object"
        return "string"


class ToolServer(metaclass=ToolMeta):
    """Base class for tool servers; subclasses declare tools with @tool."""

    def get_available_tools(self) -> list[dict[str, Any]]:
        """Return list of available tools with their schemas."""
        return self._tool_schemas

    def tool_function(self, tool_name: str):
        return self._tools[tool_name]

    def call_tool(self, tool_name: str, arguments: dict[str, Any]) -> dict[str, Any]:
        """Route a tool call and wrap the result in a status envelope.

        Domain errors become ``{"status": "error"}`` results; unexpected
        exceptions are logged with their traceback first.
        """
        if tool_name not in self._tools:
            return {"status": "error", "message": f"Unknown tool: {tool_name}"}

        func = self._tools[tool_name]
        try:
            result = func(self, **arguments)
        except (MFAOAError, TypeError, ValueError) as e:
            logger.info("Tool %s rejected its input: %s", tool_name, e)
            return {"status": "error", "message": f"Tool execution failed: {e!s}"}
        except Exception as e:
            log_error_with_traceback(e, f"tool {tool_name}")
            return {"status": "error", "message": f"Tool execution failed: {e!s}"}

        if isinstance(result, dict) and "status" in result:
            return result
        return {
            "status": "success",
            "result": result,
            "timestamp": datetime.now(UTC).isoformat(),
        }
