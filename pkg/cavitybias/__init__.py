# cavitybias/__init__.py
"""
Desk-scale simulator for a dc-biased superconducting rectangular microwave cavity.
"""

__version__ = "1.0.0"
