"""Balanced sequences, spacer transforms and ribbon tilings for shifts of finite type."""

__version__ = "0.1.0"
