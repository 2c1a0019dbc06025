"""Event derivation, sequence mining, and multi-focal alignment over sensor streams."""

__version__ = "0.1.0"
