"""Tests for the MCP tool handlers"""

import asyncio
import json

import pytest
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.mcp_server.server import call_tool, handle_command, handle_verify


def payload(contents) -> dict:
    return json.loads(contents[0].text)


class TestHandlers:
    """Tests for the tool handlers"""

    def test_homdim(self):
        """Test a computation tool"""
        result = payload(asyncio.run(handle_command("homdim", {"x": 2, "y": 3})))
        assert result["success"] is True
        assert result["dim"] == 13

    def test_refusal(self):
        """Test that engine refusals come back unsuccessful"""
        result = payload(asyncio.run(handle_command("homdim", {"backend": "finset", "basis": "gluing", "x": 1, "y": 1})))
        assert result["success"] is False
        assert result["error"]["code"] == "capability"

    def test_verify(self):
        """Test the verify tool summary"""
        result = payload(asyncio.run(handle_verify({"suites": ["structure-constants"], "workers": 1})))
        assert result["success"] is True
        assert result["message"].endswith("0 項失敗")

    def test_unknown_tool(self):
        """Test that unknown tools are reported"""
        result = payload(asyncio.run(call_tool("nonsense", {})))
        assert "Unknown tool" in result["error"]

    def test_invalid_arguments(self):
        """Test that invalid arguments are caught"""
        result = payload(asyncio.run(call_tool("homdim", {"x": -1, "y": 1})))
        assert result["success"] is False


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
