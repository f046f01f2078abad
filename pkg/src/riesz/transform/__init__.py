"""Derivation-to-derivation rewriters."""
from .canelim import cut_marked, eliminate_can
from .invert import invert
from .melim import copy_scaled, eliminate_m
from .telim import eliminate_t_rational, leaf_multipliers
from .weaken import subst_derivation, weaken_with_pair

__all__ = ["weaken_with_pair", "subst_derivation", "invert", "copy_scaled", "eliminate_m",
           "eliminate_can", "cut_marked", "eliminate_t_rational", "leaf_multipliers"]
