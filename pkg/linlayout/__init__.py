"""Linear layouts over F2: construction, algebra, conversion planning and simulation."""

__version__ = "0.1.0"
