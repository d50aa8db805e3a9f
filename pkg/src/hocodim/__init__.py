"""Cohomological and homological dimensions of group homomorphisms, computed exactly through finite quotients."""

__version__ = "0.1.0"
