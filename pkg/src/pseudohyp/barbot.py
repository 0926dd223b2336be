"""The explicit flat maximal surface spanned by a hyperbolic basis.

Over a hyperbolic basis (z1, z2, z3, z4) the surface is parametrized by

    f(u, v) = exp(u) z1 + exp(v) z2 + exp(-u) z3 + exp(-v) z4,

the orbit of z1+z2+z3+z4 under the Cartan subgroup.  The induced metric is
(du^2 + dv^2)/2, so the chart is flat and conformal, and every asymptotic
quantity (direction classes, horofunctions, second fundamental form) has a
closed form.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .einstein import HyperbolicBasis, standard_crown
from .surface import Immersion

#: half-width of the angular band classified as singular
SINGULAR_TOL = 1e-9


class DirectionKind(Enum):
    VERTEX = "vertex"
    EDGE_MIDPOINT = "edge-midpoint"


@dataclass(frozen=True, eq=False)
class DirectionClass:
    kind: DirectionKind
    index: int                 # 1..4: target vertex, or edge (z_i, z_{i+1})
    limit_vector: np.ndarray   # raw limit of exp(-exponent t) sigma(t)
    growth_exponent: float


@dataclass(frozen=True, eq=False)
class BarbotSurface:
    basis: HyperbolicBasis

    @property
    def space(self):
        return self.basis.space

    def point(self, u, v):
        z = self.basis.z
        return np.exp(u) * z[0] + np.exp(v) * z[1] + np.exp(-u) * z[2] + np.exp(-v) * z[3]

    def tangent_u(self, u, v):
        z = self.basis.z
        return np.exp(u) * z[0] - np.exp(-u) * z[2]

    def tangent_v(self, u, v):
        z = self.basis.z
        return np.exp(v) * z[1] - np.exp(-v) * z[3]

    def normal(self, u, v):
        z = self.basis.z
        return np.exp(u) * z[0] - np.exp(v) * z[1] + np.exp(-u) * z[2] - np.exp(-v) * z[3]

    def frame(self, u, v):
        """(tangent_u, tangent_v, normal) at f(u, v)."""
        return self.tangent_u(u, v), self.tangent_v(u, v), self.normal(u, v)

    def second_fundamental_form(self, u, v, X, Y):
        """II(X, Y) for chart vectors X, Y; equals (X1 Y1 - X2 Y2) n / 2."""
        coeff = 0.5 * (X[0] * Y[0] - X[1] * Y[1])
        return coeff * self.normal(u, v)

    def geodesic_point(self, u0, v0, X, t):
        """Point of the intrinsic geodesic from (u0, v0) with chart velocity X."""
        return self.point(u0 + X[0] * t, v0 + X[1] * t)

    def unit_direction(self, X):
        """Rescale a chart direction to q-norm 1 (|X|^2 = 2 in the chart)."""
        X = np.asarray(X, dtype=float)
        nrm = np.linalg.norm(X)
        if nrm == 0.0:
            raise ValueError("zero direction")
        return X * np.sqrt(2.0) / nrm

    def classify_direction(self, u0, v0, X, angular_tol=SINGULAR_TOL):
        """Asymptotic class of the ray from (u0, v0) with direction X.

        Directions within the angular band |a -+ b| <= tol |X| of a diagonal
        are singular and converge to an edge midpoint class; all others
        converge to a vertex, with growth exponent max(|a|, |b|).
        """
        a, b = self.unit_direction(X)
        z = self.basis.z
        band = angular_tol * np.hypot(a, b)
        weights = np.array([np.exp(u0), np.exp(v0), np.exp(-u0), np.exp(-v0)])
        if abs(a - b) <= band or abs(a + b) <= band:
            diag = a  # +- b
            if abs(a - b) <= band:
                index = 1 if diag > 0 else 3
            else:
                index = 4 if diag > 0 else 2
            i = index - 1
            limit = weights[i] * z[i] + weights[(i + 1) % 4] * z[(i + 1) % 4]
            return DirectionClass(DirectionKind.EDGE_MIDPOINT, index, limit, abs(a))
        if a > abs(b):
            index = 1
        elif b > abs(a):
            index = 2
        elif -a > abs(b):
            index = 3
        else:
            index = 4
        limit = weights[index - 1] * z[index - 1]
        return DirectionClass(DirectionKind.VERTEX, index, limit, max(abs(a), abs(b)))

    def regular_directions(self):
        """The four q-unit axis directions, pi/4 away from the diagonals."""
        s = np.sqrt(2.0)
        return [np.array([s, 0.0]), np.array([0.0, s]),
                np.array([-s, 0.0]), np.array([0.0, -s])]

    def horofunction(self, target, u, v):
        """Closed-form space-horofunction representatives in the chart.

        ``target`` is ("vertex", i) or ("edge", i) with i in 1..4; vertex i
        has representative (-u, -v, u, v)[i-1] and edge i has representative
        log(exp(g_i) + exp(g_{i+1})) for the same exponent list.
        """
        kind, index = target
        exps = (-u, -v, u, v)
        if kind == "vertex":
            return float(exps[index - 1])
        if kind == "edge":
            return float(np.log(np.exp(exps[index - 1]) + np.exp(exps[index % 4])))
        raise ValueError(f"unknown horofunction target {target!r}")

    def boundary_vector(self, target):
        """Isotropic representative z of the boundary point named by ``target``."""
        kind, index = target
        z = self.basis.z
        if kind == "vertex":
            return z[index - 1]
        if kind == "edge":
            return z[index - 1] + z[index % 4]
        raise ValueError(f"unknown horofunction target {target!r}")

    def intrinsic_distance(self, p1, p2):
        """Flat induced distance between chart points, |dp| / sqrt(2)."""
        d = np.asarray(p1, dtype=float) - np.asarray(p2, dtype=float)
        return float(np.linalg.norm(d) / np.sqrt(2.0))

    def edge_point(self, index, t):
        """Representative of the edge point (1-t) z_i + t z_{i+1}."""
        z = self.basis.z
        return (1.0 - t) * z[index - 1] + t * z[index % 4]

    def immersion(self, analytic=True):
        """Immersion view of the chart, with analytic jets by default."""
        if not analytic:
            return Immersion(self.space, self.point)

        def jet1(u, v):
            return self.tangent_u(u, v), self.tangent_v(u, v)

        def jet2(u, v):
            z = self.basis.z
            fuu = np.exp(u) * z[0] + np.exp(-u) * z[2]
            fvv = np.exp(v) * z[1] + np.exp(-v) * z[3]
            return fuu, np.zeros(self.space.dim), fvv

        return Immersion(self.space, self.point, jet1, jet2)


def standard_barbot_surface(space):
    return BarbotSurface(standard_crown(space).basis)


def spacelike_distance_closed_form(u, v):
    """delta^s(f(u, v), f(0, 0)) = arccosh((cosh u + cosh v) / 2)."""
    return float(np.arccosh((np.cosh(u) + np.cosh(v)) / 2.0))
