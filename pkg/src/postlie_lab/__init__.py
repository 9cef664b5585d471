"""Exact computations with post-Lie and pre-Lie algebras on tensor algebras."""

from .postlie_family import FamilyConfig
from .tensor_core import Lin, word

__all__ = ["FamilyConfig", "Lin", "word"]
__version__ = "0.1.0"
