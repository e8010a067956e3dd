# cavitybias/infrastructure/__init__.py
"""
Infrastructure layer package.
"""
