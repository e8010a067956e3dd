# cavitybias/services/__init__.py
"""
Services layer package.
"""
