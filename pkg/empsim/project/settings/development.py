"""
Appropriate settings to run during development.

When running in development mode, local.py should import this file.
"""

DEBUG = True
