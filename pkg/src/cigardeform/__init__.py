"""Numerical verification toolkit for deformations of the 3D cigar soliton.

Modules: ``jets`` (order-3 Taylor jets), ``geometry`` (curvature from metric
components), ``models`` (fixture metrics), ``variation`` (linearized soliton
operators), ``liouville`` (the transformed W equation and its kernel),
``eigensolve`` (finite-difference solver on the half-strip), ``checks`` (the
verification registry) and ``cli``.
"""

__version__ = "0.1.0"

from . import eigensolve, geometry, jets, liouville, models, variation  # noqa: E402

__all__ = ["__version__", "eigensolve", "geometry", "jets", "liouville", "models", "variation"]
