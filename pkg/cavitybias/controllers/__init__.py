# cavitybias/controllers/__init__.py
"""
Controllers package: map service outcomes to response envelopes and process exit codes.
"""
