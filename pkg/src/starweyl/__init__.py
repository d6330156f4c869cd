"""K-ordered star products, transcendental elements, tau-evolution and Berezin operators."""

__version__ = "0.1.0"
