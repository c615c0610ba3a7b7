"""Truncated idempotent module models over elementary abelian group algebras.

Everything is computed with exact linear algebra over F_p; see the module
map in the README.
"""

__version__ = "0.1.0"
