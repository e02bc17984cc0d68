"""Random walks on bubble graphs, bubble groups and their lamplighter extensions."""

__version__ = "0.1.0"
