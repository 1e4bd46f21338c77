"""Modular symbols for Gamma0(N) and the Hecke data extracted from them."""
from .space import ModularSymbolSpace, build_space

__all__ = ["ModularSymbolSpace", "build_space"]
