"""Make tests/testlib a module."""
from .demo_unittest import *
