"""Version number for memoplan-py."""
__version__ = '0.1.0'
