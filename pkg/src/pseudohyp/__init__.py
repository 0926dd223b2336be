"""Numerical toolkit for the pseudo-hyperbolic space H^{2,n} and its boundary.

The package computes with four explicit geometries:

* the quadric model of H^{2,n} inside a signature-(2, n+1) quadratic space
  (:mod:`pseudohyp.linalg`, :mod:`pseudohyp.space`),
* its conformal boundary: photons, lightlike polygons, crowns and their
  Cartan renormalization (:mod:`pseudohyp.einstein`),
* the explicit flat maximal surface over a hyperbolic basis and the
  numerical geometry of general spacelike immersions
  (:mod:`pseudohyp.barbot`, :mod:`pseudohyp.surface`),
* flat cone metrics of polynomial quartic differentials and their ideal
  boundaries (:mod:`pseudohyp.cone`, :mod:`pseudohyp.boundary`).

``pseudohyp.verify`` ties everything together into the acceptance suite run
by ``pseudohyp verify``.
"""

from .barbot import BarbotSurface, standard_barbot_surface
from .boundary import MonomialCone
from .cone import MetricGrid, PolynomialQuartic
from .einstein import BarbotCrown, HyperbolicBasis, SampledLoop, standard_crown
from .linalg import BasisKind, QuadraticSpace
from .surface import HorofunctionHandle, Immersion

__all__ = [
    "BarbotCrown",
    "BarbotSurface",
    "BasisKind",
    "HorofunctionHandle",
    "HyperbolicBasis",
    "Immersion",
    "MetricGrid",
    "MonomialCone",
    "PolynomialQuartic",
    "QuadraticSpace",
    "SampledLoop",
    "standard_barbot_surface",
    "standard_crown",
]

__version__ = "0.1.0"
