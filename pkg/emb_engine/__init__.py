"""Decision procedures for embeddability of scattered spaces and of functions between them."""

__version__ = "0.1.0"
