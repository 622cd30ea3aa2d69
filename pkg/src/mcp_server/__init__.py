"""MCP server exposing the tensor-envelope commands"""
