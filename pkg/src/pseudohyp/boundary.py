"""Ideal-boundary metrics on the two explicit geometries.

The angle distance, the l-distance (limit of d(c1(t), c2(t))/t) and the
Tits distance (inner distance of the angle distance) are computed on the
flat Barbot chart and on monomial cone metrics, where geodesics and
distances are available in closed form.  The Ohtsuka and Gauss-Bonnet
identities of nonpositively curved surface theory are checked on explicit
angular domains of the cone.
"""

from dataclasses import dataclass

import numpy as np

from .barbot import BarbotSurface
from .cone import cone_angle, monomial_distance, total_angle, total_curvature
from .errors import AmbiguousDomain, GeometryError

#: tolerance of the monotonicity assertion on d(c1(t), c2(t)) / t
MONOTONE_TOL = 1e-9

DEFAULT_SCHEDULE = tuple(float(2 ** k) for k in range(15))

DEFAULT_SUBDIVISIONS = 256


@dataclass(frozen=True)
class MonomialCone:
    """The plane with the flat cone metric of z^N dz^4."""

    degree: int

    @property
    def total_angle(self):
        return total_angle(self.degree)


@dataclass(frozen=True, eq=False)
class IdealDirection:
    """A unit-speed geodesic ray marking an ideal boundary point.

    On a Barbot surface: ``base`` is a chart point and ``direction`` a
    q-unit chart vector.  On a monomial cone: rays emanate from the apex
    and ``direction`` is the plane angle of the ray.
    """

    surface: object
    base: tuple
    direction: object
    classification: object = None

    def ray_point(self, t):
        if isinstance(self.surface, BarbotSurface):
            b = np.asarray(self.base, dtype=float)
            d = np.asarray(self.direction, dtype=float)
            return tuple(b + t * d)
        return (t, float(self.direction))

    def boundary_parameter(self):
        """Position on the ideal circle (chart angle / cone angle)."""
        if isinstance(self.surface, BarbotSurface):
            a, b = self.direction
            return float(np.arctan2(b, a) % (2.0 * np.pi))
        return cone_angle(self.surface.degree, float(self.direction)) % self.surface.total_angle


def barbot_ideal_direction(surface, base, direction):
    return IdealDirection(surface, tuple(base), tuple(surface.unit_direction(direction)))


def cone_ideal_direction(cone, plane_angle):
    return IdealDirection(cone, (0.0, 0.0), float(plane_angle))


def ideal_circle_length(surface):
    if isinstance(surface, BarbotSurface):
        return 2.0 * np.pi
    if isinstance(surface, MonomialCone):
        return surface.total_angle
    raise GeometryError(f"unsupported surface {surface!r}")


def surface_distance(surface, p1, p2):
    """Intrinsic distance between chart points of a supported surface."""
    if isinstance(surface, BarbotSurface):
        return surface.intrinsic_distance(p1, p2)
    if isinstance(surface, MonomialCone):
        return monomial_distance(surface.degree, p1, p2)
    raise GeometryError(f"unsupported surface {surface!r}")


def l_distance(xi, eta, t_schedule=None):
    """l(xi, eta) = lim d(c1(t), c2(t)) / t along a geometric schedule.

    The quotients are nondecreasing in t (a triangle-inequality fact); the
    evaluation asserts this within tolerance and returns the Richardson
    extrapolation of the last two values.
    """
    if xi.surface is not eta.surface and not (
            isinstance(xi.surface, MonomialCone) and xi.surface == eta.surface):
        raise GeometryError("rays live on different surface objects")
    if tuple(np.atleast_1d(xi.base)) != tuple(np.atleast_1d(eta.base)):
        raise GeometryError("l-distance needs rays from a common base point")
    ts = DEFAULT_SCHEDULE if t_schedule is None else tuple(t_schedule)
    vals = np.array([
        surface_distance(xi.surface, xi.ray_point(t), eta.ray_point(t)) / t
        for t in ts
    ])
    if np.any(np.diff(vals) < -MONOTONE_TOL):
        raise GeometryError("d(c1(t), c2(t))/t is not monotone: discretization failure")
    if len(vals) >= 2 and ts[-1] == 2 * ts[-2]:
        return float(2.0 * vals[-1] - vals[-2])
    return float(vals[-1])


def _riemannian_angle_at(surface, at_param, xi, eta):
    """Angle at a point of the ray toward xi between the rays toward xi and eta."""
    if isinstance(surface, BarbotSurface):
        # the chart is conformal and flat: ideal points are directions and
        # the representative ray from any point keeps the same direction
        d1 = np.asarray(xi.direction, dtype=float)
        d2 = np.asarray(eta.direction, dtype=float)
        c = float(d1 @ d2) / (np.linalg.norm(d1) * np.linalg.norm(d2))
        return float(np.arccos(np.clip(c, -1.0, 1.0)))
    # monomial cone, basepoint on the radial ray of xi: develop the sector
    # around the basepoint.  If the cone-angle separation is at most pi the
    # representative of eta is the parallel ray at that development angle;
    # otherwise it passes through the apex, i.e. leaves backwards.
    theta = surface.total_angle
    delta = abs(xi.boundary_parameter() - eta.boundary_parameter()) % theta
    delta = min(delta, theta - delta)
    return float(min(delta, np.pi))


def angle_distance_along_ray(xi, eta, t_schedule=None):
    """Angle distance as the limit of the Riemannian angle along xi's ray."""
    ts = DEFAULT_SCHEDULE if t_schedule is None else tuple(t_schedule)
    vals = np.array([_riemannian_angle_at(xi.surface, t, xi, eta) for t in ts])
    if len(vals) >= 2 and ts[-1] == 2 * ts[-2]:
        return float(2.0 * vals[-1] - vals[-2])
    return float(vals[-1])


def tits_distance(xi, eta, subdivisions=DEFAULT_SUBDIVISIONS):
    """Inner distance on the ideal circle, by summing fine angle distances.

    The minimizing arc between the two boundary parameters is subdivided and
    the angle distances of consecutive subdivision points are accumulated;
    every subdivision step is below pi, so each step equals its arc length.
    """
    surface = xi.surface
    L = ideal_circle_length(surface)
    b1 = xi.boundary_parameter()
    b2 = eta.boundary_parameter()
    arc = abs(b1 - b2) % L
    direction = 1.0
    if arc > L - arc:
        arc = L - arc
        direction = -1.0
    if b2 < b1:
        direction = -direction
    total = 0.0
    params = b1 + direction * arc * np.linspace(0.0, 1.0, subdivisions + 1)
    for a, b in zip(params[:-1], params[1:]):
        p1 = _direction_from_parameter(surface, a)
        p2 = _direction_from_parameter(surface, b)
        total += _riemannian_angle_at(surface, None, p1, p2)
    return float(total)


def _direction_from_parameter(surface, param):
    if isinstance(surface, BarbotSurface):
        d = np.sqrt(2.0) * np.array([np.cos(param), np.sin(param)])
        return IdealDirection(surface, (0.0, 0.0), tuple(d))
    alpha = param / ((surface.degree + 4) / 4.0)
    return IdealDirection(surface, (0.0, 0.0), float(alpha))


def tits_perimeter(surface, subdivisions=DEFAULT_SUBDIVISIONS):
    """Total length of the ideal circle in the Tits metric."""
    L = ideal_circle_length(surface)
    params = np.linspace(0.0, L, subdivisions + 1)
    total = 0.0
    for a, b in zip(params[:-1], params[1:]):
        p1 = _direction_from_parameter(surface, a)
        p2 = _direction_from_parameter(surface, b)
        total += _riemannian_angle_at(surface, None, p1, p2)
    return float(total)


@dataclass(frozen=True)
class OhtsukaResult:
    lhs: float              # curvature of the angular domain
    rhs: float              # side angle at x minus ideal arc of the domain
    residual: float
    angle_at_x: float       # Riemannian angle between the two rays at x
    tits: float             # Tits distance between the ideal points
    apex_inside: bool


def ohtsuka_check(cone, xi, eta, x, tol=1e-9):
    """Ohtsuka identity int_A K = angle_x - Td on a monomial cone.

    ``x`` is a (geodesic radius, plane angle) pair.  The angular domain A is
    taken on the side of the Tits geodesic between xi and eta; its curvature
    is the apex deficit when the apex lies inside.  Configurations where a
    bounding ray passes through the apex (or the two sides tie) are
    rejected as ambiguous.
    """
    if not isinstance(cone, MonomialCone):
        raise GeometryError("Ohtsuka check runs on monomial cones")
    theta = cone.total_angle
    beta_x = cone_angle(cone.degree, float(x[1])) % theta
    deltas = []
    for point in (xi, eta):
        d = (point.boundary_parameter() - beta_x) % theta
        if d > theta / 2.0:
            d -= theta
        if abs(d) >= np.pi - tol:
            raise AmbiguousDomain("a bounding ray passes through the apex")
        deltas.append(d)
    a_in = abs(deltas[0] - deltas[1])
    if abs(a_in - np.pi) < tol:
        raise AmbiguousDomain("the two rays are opposite at x")
    arc_in = a_in
    arc_out = theta - a_in
    if abs(arc_in - arc_out) < tol:
        raise AmbiguousDomain("both boundary arcs realize the Tits distance")
    apex_inside = arc_out < arc_in
    side_angle = (2.0 * np.pi - a_in) if apex_inside else a_in
    td = min(arc_in, arc_out)
    deficit = 2.0 * np.pi - theta
    lhs = deficit if apex_inside else 0.0
    rhs = side_angle - td
    angle_at_x = min(a_in, 2.0 * np.pi - a_in)
    return OhtsukaResult(float(lhs), float(rhs), float(abs(lhs - rhs)),
                         float(angle_at_x), float(td), bool(apex_inside))


def gauss_bonnet_triangle(cone, pts, tol=1e-9):
    """Angle excess sum(theta_i) - pi of a geodesic triangle avoiding the apex.

    The three points (geodesic radius, plane angle) must lie in a developable
    sector (cone-angle spread below pi), which keeps the apex outside; the
    excess of the flat triangle is then zero.
    """
    if len(pts) != 3:
        raise GeometryError("need exactly three points")
    betas = [cone_angle(cone.degree, p[1]) for p in pts]
    spread = max(betas) - min(betas)
    if spread >= np.pi - tol:
        raise AmbiguousDomain("points do not lie in a developable sector")
    d = [monomial_distance(cone.degree, pts[i], pts[(i + 1) % 3]) for i in range(3)]
    angles = []
    for i in range(3):
        a, b, c = d[(i + 2) % 3], d[i], d[(i + 1) % 3]
        cosv = (a * a + b * b - c * c) / (2.0 * a * b)
        angles.append(np.arccos(np.clip(cosv, -1.0, 1.0)))
    return float(sum(angles) - np.pi)


def perimeter_vs_curvature(surface, poly=None, grid=None, center=0.0j, radius=None):
    """Triple (Tits perimeter, total curvature, residual of K = 2 pi - P).

    Barbot surfaces are flat with perimeter 2 pi; monomial cones use the
    analytic perimeter and the cone deficits; a polynomial with a metric
    grid measures the perimeter from the renormalized circle length.
    """
    from .cone import perimeter_growth

    if isinstance(surface, BarbotSurface):
        P = tits_perimeter(surface)
        K = 0.0
    elif isinstance(surface, MonomialCone):
        P = tits_perimeter(surface)
        from .cone import PolynomialQuartic
        mono = PolynomialQuartic((0.0,) * surface.degree + (1.0,))
        K = total_curvature(mono)
    elif poly is not None and grid is not None:
        if radius is None:
            raise GeometryError("polynomial perimeter needs a radius")
        P = perimeter_growth(poly, center, [radius], grid)[0]
        K = total_curvature(poly)
    else:
        raise GeometryError("unsupported surface for perimeter_vs_curvature")
    return float(P), float(K), float(abs(K - (2.0 * np.pi - P)))


def tits_sample_pairs(surface, k, rng):
    """k random boundary pairs with their angle, l and Tits distances."""
    L = ideal_circle_length(surface)
    out = []
    for _ in range(k):
        b1, b2 = rng.uniform(0.0, L, size=2)
        xi = _direction_from_parameter(surface, b1)
        eta = _direction_from_parameter(surface, b2)
        ang = angle_distance_along_ray(xi, eta)
        l = l_distance(xi, eta)
        td = tits_distance(xi, eta)
        out.append({
            "params": [float(b1), float(b2)],
            "angle": float(ang),
            "l": float(l),
            "td": float(td),
            "identity_residual": float(abs(l - 2.0 * np.sin(ang / 2.0))),
        })
    return out
