"""Tests for tensor-envelope"""
