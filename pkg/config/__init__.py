"""
Config package initialization.
"""
from .settings import *
