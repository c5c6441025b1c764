"""Quotients of the Bruhat-Tits tree by unit groups of quaternion orders over real cyclotomic fields."""
__version__ = "0.1.0"
