"""Exact-rational toolkit for subsum sets and Erdos-Graham series.

Modules
-------
exact
    Rationals, series terms, closed-form and enclosed tails, rendering.
achievement
    Sum sets of finite choice sets: classification, greedy representation, covers.
construct
    Certified representation of targets by series with f(n) -> oo.
cover
    Covers for nondecreasing f, measure bounds, sorted partial-sum landscapes.
"""
from ._kernels import BACKEND
from .exact import RationalInterval, TermSpec, decimal_render, rising_product, tail_closed_form, term

__all__ = [
    "BACKEND",
    "RationalInterval",
    "TermSpec",
    "decimal_render",
    "rising_product",
    "tail_closed_form",
    "term",
]
__version__ = "0.1.0"
