"""Increasing tritronquee solutions of Painleve-II for complex parameter alpha."""

__version__ = "0.1.0"
