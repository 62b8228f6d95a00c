"""Exact symbolic verification of the constant-mean-curvature argument for
Lorentz hypersurfaces with a complex principal curvature pair.

Modules: ``poly`` (rational polynomials, resultants), ``frame`` (frame calculus),
``kb`` (fact saturation), ``derive`` (first-order system), ``cases`` (case
analysis and resultant) and ``cli``.
"""

__version__ = "0.1.0"
