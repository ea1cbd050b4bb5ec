"""OTM-realizability for the language of set theory, at desk scale."""

__version__ = "0.1.0"
