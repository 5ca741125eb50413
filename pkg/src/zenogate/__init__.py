"""Zeno-effect photonic logic gates on two coupled fiber modes."""

__version__ = "0.1.0"
