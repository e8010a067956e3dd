# cavitybias/domain/__init__.py
"""
Domain layer package.
"""
