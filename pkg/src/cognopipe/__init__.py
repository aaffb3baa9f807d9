"""cognopipe: acoustic + linguistic screening pipeline for conversational speech."""

__version__ = "0.1.0"
