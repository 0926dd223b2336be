"""Flat cone metrics |phi|^{1/2} |dz|^2 of polynomial quartic differentials.

A polynomial phi(z) dz^4 of degree N induces a complete flat metric on the
plane with a conical singularity of angle (k+4) pi/2 at each zero of order
k.  The monomial z^N has fully explicit geometry (geodesic rays, circles,
distances); general polynomials are handled by a weighted 16-neighbor grid
graph whose shortest paths upper-bound the true distance.
"""

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.csgraph import dijkstra

from .errors import (
    BallTouchesBoundary,
    ConvergenceError,
    GeometryError,
    OutsideWindow,
)

#: relative radius of the root-clustering balls
CLUSTER_RADIUS = 1e-6

#: relative tolerance of the reconstructed-polynomial invariant
RECONSTRUCT_TOL = 1e-8

#: offsets of the 16-neighbor stencil (one representative per +-pair)
STENCIL = ((1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1))

#: reference length unit; a segment of length u gets one Simpson panel,
#: doubling with each doubling of the length (keeps weights exactly additive
#: under edge subdivision between nested grids)
PANEL_UNIT_DIVISOR = 800


@dataclass(frozen=True)
class ConePoint:
    location: complex
    order: int
    angle: float


@dataclass(frozen=True)
class PolynomialQuartic:
    """Quartic differential with polynomial coefficient function.

    ``coeffs`` are ascending, a0 + a1 z + ... + aN z^N with aN != 0.
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(complex(a) for a in self.coeffs)
        if len(c) == 0 or c[-1] == 0:
            raise GeometryError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.coeffs))

    def density(self, z):
        """Length density |phi|^{1/4} of the cone metric."""
        w = self(z)
        w = np.asarray(w)
        mag2 = w.real * w.real + w.imag * w.imag
        return np.sqrt(np.sqrt(np.sqrt(mag2)))

    @cached_property
    def zeros(self):
        """Clustered roots with multiplicities, (location, order) pairs.

        Companion-matrix roots of a k-fold zero scatter over a radius of
        order eps^(1/k), so clustering tries an escalating radius ladder
        starting at the base radius; the most-merged clustering whose
        cluster means still reconstruct the polynomial within tolerance
        wins.  Genuinely close distinct zeros fail the reconstruction check
        when merged and therefore stay separate.
        """
        if self.degree == 0:
            return ()
        monic = np.array(self.coeffs, dtype=complex) / self.coeffs[-1]
        # cluster the raw companion roots: they are backward stable and the
        # scatter of a multiple root is symmetric, so cluster means are
        # machine accurate, while Newton would destroy that cancellation
        roots = np.roots(monic[::-1])
        best = None
        err = np.inf
        scale = float(np.max(np.abs(monic)))
        for rel_radius in (CLUSTER_RADIUS, 1e-5, 1e-4, 1e-3):
            clusters = _polish_simple(monic, _cluster_roots(roots, rel_radius))
            trial = _reconstruction_error(monic, clusters)
            err = min(err, trial)
            if trial <= RECONSTRUCT_TOL * scale:
                best = clusters
        if best is None:
            raise ConvergenceError(
                "root clustering does not reproduce the polynomial", residual=err
            )
        return tuple(best)


def _polish_simple(monic, clusters, steps=4):
    """Newton-polish the simple roots of a clustering; keep multiple means.

    Each step is accepted only when it reduces |p| at the root, so a
    misclassified near-multiple root cannot be pushed away.
    """
    poly = np.asarray(monic)
    dpoly = np.polynomial.polynomial.polyder(poly)
    out = []
    for loc, k in clusters:
        if k == 1:
            z = loc
            pz = np.polynomial.polynomial.polyval(z, poly)
            for _ in range(steps):
                dp = np.polynomial.polynomial.polyval(z, dpoly)
                if abs(dp) <= 1e-12 * (1.0 + abs(pz)):
                    break
                z_new = z - pz / dp
                p_new = np.polynomial.polynomial.polyval(z_new, poly)
                if abs(p_new) >= abs(pz):
                    break
                z, pz = z_new, p_new
            out.append((complex(z), 1))
        else:
            out.append((loc, k))
    return out


def _cluster_roots(roots, rel_radius):
    order = np.argsort(roots.real + 1e-9 * roots.imag)
    remaining = list(roots[order])
    clusters = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        radius = rel_radius * (1.0 + abs(seed))
        rest = []
        for r in remaining:
            if abs(r - seed) <= radius:
                members.append(r)
            else:
                rest.append(r)
        remaining = rest
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def _reconstruction_error(monic, clusters):
    rebuilt = np.array([1.0 + 0.0j])
    for loc, k in clusters:
        factor = np.array([-loc, 1.0])
        for _ in range(k):
            rebuilt = np.polynomial.polynomial.polymul(rebuilt, factor)
    return float(np.max(np.abs(rebuilt - monic)))


def cone_data(p):
    """Cone points of the metric: zeros of order k carry angle (k+4) pi/2."""
    return [ConePoint(loc, k, (k + 4) * np.pi / 2.0) for loc, k in p.zeros]


def total_curvature(p):
    """Sum of angle deficits 2 pi - angle over the cone points, = -(pi/2) N."""
    return float(sum(2.0 * np.pi - cp.angle for cp in cone_data(p)))


def total_angle(n_degree):
    return (n_degree + 4) * np.pi / 2.0


# ----------------------------------------------------------------------
# Exact monomial geometry
# ----------------------------------------------------------------------

def monomial_geodesic_ray(n_degree, theta, t):
    """Arclength point of the unit-speed geodesic ray of z^N from the apex."""
    if t < 0:
        raise GeometryError("ray parameter must be nonnegative")
    radius = ((n_degree + 4) * t / 4.0) ** (4.0 / (n_degree + 4))
    return np.exp(1j * theta) * radius


def monomial_ray_arclength(n_degree, t):
    """Quadrature cross-check of the arclength of the monomial ray.

    Integrates the density s^{N/4} along the Euclidean radial path up to the
    claimed ray point; the result should reproduce t.
    """
    radius = abs(monomial_geodesic_ray(n_degree, 0.0, t))
    val, _ = integrate.quad(lambda s: s ** (n_degree / 4.0), 0.0, radius,
                            epsabs=1e-13, epsrel=1e-13)
    return float(val)


def monomial_circle_perimeter(n_degree, r, method="exact"):
    """Perimeter of the geodesic circle of radius r: (pi/2)(N+4) r."""
    if r <= 0:
        raise GeometryError("radius must be positive")
    if method == "exact":
        return float(np.pi / 2.0 * (n_degree + 4) * r)
    if method == "quadrature":
        rho = ((n_degree + 4) * r / 4.0) ** (4.0 / (n_degree + 4))

        def speed(theta):
            z = rho * np.exp(1j * theta)
            return float(np.abs(z) ** (n_degree / 4.0) * rho)

        val, _ = integrate.quad(speed, 0.0, 2.0 * np.pi, epsabs=1e-12,
                                epsrel=1e-12, limit=200)
        return float(val)
    raise GeometryError(f"unknown perimeter method {method!r}")


def geodesic_radius(n_degree, euclid_radius):
    """Cone (arclength) radius of a plane point, (4/(N+4)) s^{(N+4)/4}."""
    return 4.0 / (n_degree + 4) * euclid_radius ** ((n_degree + 4) / 4.0)


def cone_angle(n_degree, plane_angle):
    """Cone development angle ((N+4)/4) alpha of a plane angle alpha."""
    return (n_degree + 4) / 4.0 * plane_angle


def monomial_distance(n_degree, a, b):
    """Exact cone distance between (geodesic radius, plane angle) pairs.

    In the developed cone of total angle (N+4) pi/2 the law of cosines
    applies when the angular separation is at most pi; otherwise the
    geodesic passes through the apex and the distance is the radius sum.
    """
    r1, a1 = a
    r2, a2 = b
    if r1 < 0 or r2 < 0:
        raise GeometryError("radii must be nonnegative")
    theta = total_angle(n_degree)
    dbeta = abs(cone_angle(n_degree, a1) - cone_angle(n_degree, a2)) % theta
    dbeta = min(dbeta, theta - dbeta)
    if dbeta <= np.pi:
        return float(np.sqrt(max(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * np.cos(dbeta), 0.0)))
    return float(r1 + r2)


def plane_point(n_degree, r, alpha):
    """Plane coordinate of the point at geodesic radius r on the ray alpha."""
    s = ((n_degree + 4) * r / 4.0) ** (4.0 / (n_degree + 4))
    return s * np.exp(1j * alpha)


# ----------------------------------------------------------------------
# Grid metric
# ----------------------------------------------------------------------

def _panel_count(offset, h_over_unit):
    """Simpson panels for a stencil edge: smallest power of two >= length/unit.

    Computed from the squared ratio so nested grids (unit ratios 2, 4, 8)
    make the panel count exactly halve when an edge is split in two; the
    graph metric is then monotone under refinement up to roundoff.
    """
    ratio_sq = (offset[0] ** 2 + offset[1] ** 2) * h_over_unit * h_over_unit
    panels = 1
    while panels * panels < ratio_sq:
        panels *= 2
    return panels


@dataclass
class MetricGrid:
    """Weighted 16-neighbor graph over a square window.

    Edge weights are composite-Simpson quadratures of |phi|^{1/4} along the
    straight segments; cells containing a zero simply pick up small weights
    (the density vanishes there, no singular handling is needed).
    """

    poly: PolynomialQuartic
    center: complex = 0.0j
    half_width: float = 6.0
    resolution: int = 801

    def __post_init__(self):
        if self.resolution < 9:
            raise GeometryError("resolution too small")
        self._fields = {}

    @cached_property
    def axis(self):
        return np.linspace(-self.half_width, self.half_width, self.resolution)

    @property
    def step(self):
        return 2.0 * self.half_width / (self.resolution - 1)

    @cached_property
    def nodes(self):
        x = self.axis
        return (self.center + x[None, :] + 1j * x[:, None])

    def node_index(self, z):
        """Nearest grid node (snap); raises OutsideWindow beyond the window."""
        zr = complex(z) - self.center
        if max(abs(zr.real), abs(zr.imag)) > self.half_width + 1e-12:
            raise OutsideWindow(f"{z} is outside the grid window")
        col = int(round((zr.real + self.half_width) / self.step))
        row = int(round((zr.imag + self.half_width) / self.step))
        col = min(max(col, 0), self.resolution - 1)
        row = min(max(row, 0), self.resolution - 1)
        return row * self.resolution + col

    @cached_property
    def graph(self):
        res = self.resolution
        nodes = self.nodes.ravel()
        h_over_unit = PANEL_UNIT_DIVISOR / (res - 1)
        rows_all, cols_all, weights_all = [], [], []
        index = np.arange(res * res).reshape(res, res)
        for dx, dy in STENCIL:
            panels = _panel_count((dx, dy), h_over_unit)
            r0 = max(0, -dy)
            r1 = res - max(0, dy)
            c0 = max(0, -dx)
            c1 = res - max(0, dx)
            src = index[r0:r1, c0:c1].ravel()
            dst = index[r0 + dy:r1 + dy, c0 + dx:c1 + dx].ravel()
            a = nodes[src]
            b = nodes[dst]
            w = _simpson_edge_weights(self.poly, a, b, panels)
            rows_all.append(src)
            cols_all.append(dst)
            weights_all.append(w)
        rows = np.concatenate(rows_all)
        cols = np.concatenate(cols_all)
        w = np.concatenate(weights_all)
        mat = sparse.csr_matrix(
            (np.concatenate([w, w]),
             (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
            shape=(res * res, res * res),
        )
        return mat

    def distance_field(self, source):
        """Grid distances from a source point, as a (res, res) array."""
        src = self.node_index(source)
        if src not in self._fields:
            d = dijkstra(self.graph, directed=False, indices=[src])[0]
            self._fields[src] = d.reshape(self.resolution, self.resolution)
        return self._fields[src]

    def distance(self, z1, z2):
        field = self.distance_field(z1)
        idx = self.node_index(z2)
        return float(field.ravel()[idx])


def _simpson_edge_weights(poly, a, b, panels, chunk=400000):
    """Composite Simpson of the density along straight segments a -> b."""
    ts = np.linspace(0.0, 1.0, 2 * panels + 1)
    coeff = np.ones(2 * panels + 1)
    coeff[1:-1:2] = 4.0
    coeff[2:-1:2] = 2.0
    total = np.empty(len(a))
    seg_h = np.abs(b - a) / panels
    for lo in range(0, len(a), chunk):
        hi = min(lo + chunk, len(a))
        pts = a[lo:hi, None] * (1.0 - ts[None, :]) + b[lo:hi, None] * ts[None, :]
        dens = poly.density(pts)
        total[lo:hi] = dens @ coeff
    return total * seg_h / 6.0


def grid_distance(p, z1, z2, grid=None, **grid_kwargs):
    """Shortest-path distance over the weighted grid; upper bound on g4."""
    if grid is None:
        grid = MetricGrid(p, **grid_kwargs)
    if grid.poly is not p and grid.poly.coeffs != p.coeffs:
        raise GeometryError("grid was built for a different polynomial")
    return grid.distance(z1, z2)


def perimeter_growth(p, center, radii, grid):
    """Renormalized perimeters P(r)/r of metric circles around a center.

    The circle of radius r is the marching-squares level set of the grid
    distance field; its length is the |phi|^{1/4}-weighted polyline length.
    """
    from skimage import measure

    field = grid.distance_field(center)
    border = np.concatenate([field[0], field[-1], field[:, 0], field[:, -1]])
    out = []
    for r in radii:
        if float(border.min()) <= r:
            raise BallTouchesBoundary(f"metric ball of radius {r} leaves the window")
        contours = measure.find_contours(field, r)
        if not contours:
            raise GeometryError(f"no level set found at radius {r}")
        contour = max(contours, key=len)
        # index coordinates (row, col) -> complex plane
        zs = (grid.center
              + (-grid.half_width + contour[:, 1] * grid.step)
              + 1j * (-grid.half_width + contour[:, 0] * grid.step))
        if abs(zs[0] - zs[-1]) > 2 * grid.step:
            raise GeometryError("level set is not closed")
        segs = np.diff(zs)
        mids = 0.5 * (zs[1:] + zs[:-1])
        length = float(np.sum(np.abs(segs) * p.density(mids)))
        out.append(length / r)
    return out


def quasi_isometry_bound(p, epsilon):
    """Smallest power-of-two R with sum |a_j| / R^{N-j} <= epsilon.

    Beyond that radius the density of the monic normalization is within
    a factor (1 +- epsilon) of the monomial density |z|^{N/4}.
    """
    if epsilon <= 0:
        raise GeometryError("epsilon must be positive")
    monic = np.abs(np.array(p.coeffs, dtype=complex) / p.coeffs[-1])
    n_deg = p.degree
    R = 1.0
    for _ in range(60):
        total = sum(monic[j] / R ** (n_deg - j) for j in range(n_deg))
        if total <= epsilon:
            lines = " + ".join(
                f"{monic[j]:.6g}/R^{n_deg - j}" for j in range(n_deg)
            ) or "0"
            return R, f"{lines} = {total:.6g} <= {epsilon} at R = {R:g}"
        R *= 2.0
    raise ConvergenceError("no power-of-two radius satisfies the bound")


def report(p, center, radii, grid):
    """JSON-ready summary of the cone geometry of a polynomial."""
    points = cone_data(p)
    table = perimeter_growth(p, center, radii, grid) if radii else []
    return {
        "degree": p.degree,
        "cone_points": [
            {"location": [cp.location.real, cp.location.imag],
             "order": cp.order, "angle": cp.angle}
            for cp in points
        ],
        "deficits": [2.0 * np.pi - cp.angle for cp in points],
        "total_curvature": total_curvature(p),
        "perimeter_table": [
            {"radius": float(r), "perimeter_over_r": float(v)}
            for r, v in zip(radii, table)
        ],
        "tits_estimate": float(table[-1]) if table else total_angle(p.degree),
    }


def save_report(data, path):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
