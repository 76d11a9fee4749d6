"""Nilpotency bounds for dots in cyclotomic KLR algebras of type A_infinity.

Modules:

* :mod:`klrbound.quiver` -- Cartan data, weights, roots, sequences, weight graphs
* :mod:`klrbound.abacus` -- bead configurations, antigravity, stable supports, bounds
* :mod:`klrbound.algebra` -- normal-form arithmetic in the KLR algebra R(nu)
* :mod:`klrbound.polyrep` -- independent polynomial representation (test oracle)
* :mod:`klrbound.expr` -- text syntax for algebra elements
* :mod:`klrbound.cyclotomic` -- ideal membership and nilpotency in R(nu)/J_Lambda
* :mod:`klrbound.cli` -- the ``klrbound`` command
"""

from .abacus import antigravity_bound, conf, simulate_antigravity, stable_support
from .algebra import Element, crossing, dot, idempotent
from .cyclotomic import QuotientContext
from .expr import parse_expression
from .quiver import A_INFINITY, RootSpec, WeightSpec

__version__ = "0.1.0"

__all__ = ["A_INFINITY", "Element", "QuotientContext", "RootSpec", "WeightSpec",
           "antigravity_bound", "conf", "crossing", "dot", "idempotent", "parse_expression",
           "simulate_antigravity", "stable_support"]
