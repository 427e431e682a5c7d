"""Toolkit for iterated Bing doubles, branched covers and covering link calculus."""

__version__ = "0.1.0"
