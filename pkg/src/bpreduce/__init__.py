"""Desk-scale checks of dimensional reduction between branched polymers and the hard-core gas.

Modules: ``combinatorics`` (trees, forests, spanning trees), ``lattice_enum``
(exact lattice counts), ``continuum_mc`` (Monte-Carlo configuration integrals),
``hardcore_exact`` (tree function, hard rods, exponent tables),
``scaling_functions``, ``forest_root``, ``crossover`` (Airy scaling),
``series_analysis`` (ratio method) and ``cli``.
"""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402  ("cython" or "python")

__all__ = ["BACKEND", "__version__"]
