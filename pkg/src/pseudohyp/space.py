"""Points, geodesics and spacelike distance in the quadric model of H^{2,n}.

Points of the double cover are vectors x with q(x) = -1.  All two-point
operations normalize lifts so that pair(x, y) <= 0 before taking distances,
which fixes the global sign ambiguity of the double cover.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ConvergenceError,
    GeometryError,
    NonSpacelikePair,
)
from .linalg import pair, q_form, signature_of_span

POINT_TOL = 1e-10
EQUAL_TOL = 1e-12

#: finite-difference step used by the warped pullback checks
FD_STEP = 1e-4


class GeodesicKind(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    EQUAL = "equal"


def check_point(space, x, tol=POINT_TOL):
    x = space.check_vector(x)
    r = abs(q_form(space, x) + 1.0)
    if r > tol:
        raise GeometryError(f"point is off the quadric q = -1 (residual {r:.3e})")
    return x


def normalize_point(space, v):
    """Rescale a q-negative vector onto the quadric q = -1."""
    v = space.check_vector(v)
    s = q_form(space, v)
    if s >= 0:
        raise GeometryError("vector is not q-negative")
    return v / np.sqrt(-s)


def classify_geodesic(space, x, y, tol=None):
    """Classify the geodesic through two points by the signature of their span."""
    x = check_point(space, x)
    y = check_point(space, y)
    chordal = min(np.linalg.norm(x - y), np.linalg.norm(x + y))
    if chordal <= 1e-9 * (1.0 + np.linalg.norm(x)):
        return GeodesicKind.EQUAL
    sig = signature_of_span(space, [x, y], tol=tol)
    if sig == (1, 1, 0):
        return GeodesicKind.SPACELIKE
    if sig == (0, 2, 0):
        return GeodesicKind.TIMELIKE
    if sig == (0, 1, 1):
        return GeodesicKind.LIGHTLIKE
    raise GeometryError(f"unexpected signature {sig} for a pair of points")


def spacelike_distance(space, x, y):
    """delta^s(x, y) = arccosh(-pair(x, y)) on lifts with pair(x, y) < 0."""
    x = check_point(space, x)
    y = check_point(space, y)
    c = pair(space, x, y)
    if c > 0:
        c = -c
    if -c < 1.0 - 1e-12:
        kind = classify_geodesic(space, x, y)
        if kind is GeodesicKind.EQUAL:
            return 0.0
        raise NonSpacelikePair(f"pair is {c}, points are {kind.value}-related")
    return float(np.arccosh(max(-c, 1.0)))


def timelike_separation(space, x, y):
    """Angle parameter of the timelike geodesic through x and y.

    Points on cos(t) x + sin(t) n have pair with x equal to -cos(t); the
    value is meaningful for timelike-related pairs (|pair| < 1).
    """
    x = check_point(space, x)
    y = check_point(space, y)
    c = -pair(space, x, y)
    if abs(c) > 1.0 + 1e-9:
        raise GeometryError("pair outside [-1, 1]: points are not timelike-related")
    return float(np.arccos(np.clip(abs(c), -1.0, 1.0)))


def geodesic_point(space, x, u, t):
    """Point cosh(t) x + sinh(t) U on the spacelike geodesic from x with direction U."""
    x = check_point(space, x)
    u = space.check_vector(u)
    qu = q_form(space, u)
    if qu <= 0:
        raise GeometryError(f"direction must be spacelike, q(U) = {qu}")
    if abs(pair(space, x, u)) > 1e-8:
        raise GeometryError("direction is not tangent at the base point")
    u = u / np.sqrt(qu)
    return np.cosh(t) * x + np.sinh(t) * u


# ----------------------------------------------------------------------
# Warped product structure
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WarpedSplitting:
    """Orthogonal decomposition E = P + Q with P positive 2-plane, Q negative.

    ``p_basis`` has two q-orthonormal rows with q = +1, ``q_basis`` has n+1
    rows with q = -1; the embedded disc factor carries the hyperbolic metric
    and the sphere factor the round metric of the unit sphere of (Q, -q).
    """

    space: object
    p_basis: np.ndarray  # (2, dim)
    q_basis: np.ndarray  # (n+1, dim)

    def __post_init__(self):
        G = np.vstack([self.p_basis, self.q_basis])
        M = G @ self.space.form_matrix @ G.T
        expect = np.diag([1.0, 1.0] + [-1.0] * (self.space.n + 1))
        if np.max(np.abs(M - expect)) > 1e-10:
            raise GeometryError("splitting basis is not q-orthonormal with signature (2, n+1)")

    def disc_point(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (2,):
            raise GeometryError("disc points are 2-vectors")
        return u

    def sphere_point(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.space.n + 1,):
            raise GeometryError(f"sphere points are {self.space.n + 1}-vectors")
        return v


def standard_splitting(space):
    """Splitting aligned with the coordinate chart."""
    d = space.dim
    if space.basis_kind.value == "orthonormal":
        P = np.eye(d)[:2]
        Q = np.eye(d)[2:]
    else:
        e = [space.basis_vector(i) for i in range(1, d + 1)]
        P = np.vstack([e[0] - e[2], e[1] - e[3]])
        Q = np.vstack([e[0] + e[2], e[1] + e[3]] + e[4:])
    return WarpedSplitting(space, P, Q)


def warped_embed(split, u, v):
    """psi(u, v) = 2/(1-|u|^2) u + (1+|u|^2)/(1-|u|^2) v into the quadric."""
    u = split.disc_point(u)
    v = split.sphere_point(v)
    s = float(u @ u)
    if s >= 1.0:
        raise GeometryError("disc factor must satisfy |u|^2 < 1")
    if abs(v @ v - 1.0) > 1e-10:
        raise GeometryError("sphere factor must be a unit vector")
    amb_u = u @ split.p_basis
    amb_v = v @ split.q_basis
    return (2.0 / (1.0 - s)) * amb_u + ((1.0 + s) / (1.0 - s)) * amb_v


def warped_coordinates(split, p, tol=1e-10):
    """Inverse of warped_embed: the (u, v) pair of a point of the quadric."""
    p = check_point(split.space, p)
    B = split.space.form_matrix
    w = split.p_basis @ B @ p            # = 2u/(1-s), coordinates in P
    wq = -(split.q_basis @ B @ p)        # = (1+s)/(1-s) v, in -q coordinates
    w2 = float(w @ w)
    if w2 == 0.0:
        s = 0.0
        u = np.zeros(2)
    else:
        a = 2.0 * w2 + 4.0
        s = (a - np.sqrt(a * a - 4.0 * w2 * w2)) / (2.0 * w2)
        u = w * (1.0 - s) / 2.0
    scale = (1.0 + s) / (1.0 - s)
    if abs(scale) < tol:
        raise GeometryError("warped decomposition is ill-conditioned at this point")
    v = wq / scale
    return u, v


def warped_project(split, p):
    """Disc coordinate of the warped projection of p."""
    u, _ = warped_coordinates(split, p)
    return u


def hyperbolic_disc_distance(u1, u2):
    """Distance in the curvature -1 Poincare metric 4|du|^2/(1-|u|^2)^2."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    d2 = float((u1 - u2) @ (u1 - u2))
    a = (1.0 - u1 @ u1) * (1.0 - u2 @ u2)
    return float(np.arccosh(1.0 + 2.0 * d2 / a))


def sphere_distance(v1, v2):
    """Round distance on the unit sphere of (Q, -q)."""
    c = float(np.clip(np.asarray(v1) @ np.asarray(v2), -1.0, 1.0))
    return float(np.arccos(c))


def warp_factor(u):
    """f(u) = ((1+|u|^2)/(1-|u|^2))^2 in the pullback metric g_hyp - f g_n."""
    s = float(np.asarray(u) @ np.asarray(u))
    return ((1.0 + s) / (1.0 - s)) ** 2


def warped_pullback_residual(split, u, v, x_dir, y_dir, h=FD_STEP):
    """Residual of psi* q = g_hyp - f g_n on one pair of tangent vectors.

    ``x_dir`` and ``y_dir`` are pairs (disc direction, sphere tangent); the
    sphere parts must be tangent to the sphere at v.  Directional derivatives
    of psi are taken by centered differences with one Richardson step.
    """
    u = split.disc_point(u)
    v = split.sphere_point(v)

    def push(du, dv, step):
        vp = v + step * dv
        vp = vp / np.linalg.norm(vp)
        vm = v - step * dv
        vm = vm / np.linalg.norm(vm)
        return (warped_embed(split, u + step * du, vp)
                - warped_embed(split, u - step * du, vm)) / (2.0 * step)

    def deriv(du, dv):
        d1 = push(du, dv, h)
        d2 = push(du, dv, h / 2.0)
        return (4.0 * d2 - d1) / 3.0

    X = deriv(*x_dir)
    Y = deriv(*y_dir)
    lhs = pair(split.space, X, Y)
    s = float(u @ u)
    g_hyp = 4.0 * float(np.asarray(x_dir[0]) @ np.asarray(y_dir[0])) / (1.0 - s) ** 2
    g_n = float(np.asarray(x_dir[1]) @ np.asarray(y_dir[1]))
    rhs = g_hyp - warp_factor(u) * g_n
    return lhs - rhs


def hyperbolic_plane_immersion(split, v0):
    """Totally geodesic disc slice psi(., v0) as an immersion over the chart.

    First derivatives are analytic, so curvature stencils on the induced
    metric stay accurate; second derivatives fall back to differentiating
    the analytic jet.
    """
    from .surface import Immersion

    v0 = split.sphere_point(v0)
    amb_v = v0 @ split.q_basis
    P = split.p_basis

    def point(a, b):
        return warped_embed(split, np.array([a, b]), v0)

    def jet1(a, b):
        u = np.array([a, b])
        s = float(u @ u)
        amb_u = u @ P
        outs = []
        for i in range(2):
            outs.append(2.0 * P[i] / (1.0 - s)
                        + 4.0 * u[i] * amb_u / (1.0 - s) ** 2
                        + 4.0 * u[i] * amb_v / (1.0 - s) ** 2)
        return outs[0], outs[1]

    return Immersion(split.space, point, jet1)


# ----------------------------------------------------------------------
# Radial projection (timelike-sphere intersection)
# ----------------------------------------------------------------------

def timelike_sphere_intersect(space, x, tangent_frame, target, seed_chart,
                              tol=1e-8, max_iter=100):
    """Point of ``target`` on the timelike sphere orthogonal to a tangent plane.

    ``tangent_frame`` is a pair of vectors spanning a q-positive plane at x;
    the sphere exp_x(N_x) is the quadric slice of the q-orthocomplement of
    that plane, so the intersection point y solves pair(y, X_i) = 0.  The
    2x2 system is solved over the target chart by damped Newton with
    backtracking line search, seeded at ``seed_chart``.

    ``target`` is any immersion-like object with ``point(u, v)`` and
    ``first_derivatives(u, v)``.
    """
    x = check_point(space, x)
    X1, X2 = (space.check_vector(t) for t in tangent_frame)
    if signature_of_span(space, [X1, X2])[0] != 2:
        raise GeometryError("tangent frame must span a q-positive 2-plane")
    B = space.form_matrix

    def residual(c):
        y = target.point(c[0], c[1])
        return np.array([y @ B @ X1, y @ B @ X2])

    def jacobian(c):
        fu, fv = target.first_derivatives(c[0], c[1])
        return np.array([[fu @ B @ X1, fv @ B @ X1],
                         [fu @ B @ X2, fv @ B @ X2]])

    c = np.asarray(seed_chart, dtype=float).copy()
    F = residual(c)
    for _ in range(max_iter):
        nrm = np.linalg.norm(F)
        if nrm <= tol:
            y = target.point(c[0], c[1])
            return normalize_point(space, y), c, float(nrm)
        step = np.linalg.solve(jacobian(c), -F)
        t = 1.0
        while t > 1e-12:
            c_new = c + t * step
            F_new = residual(c_new)
            if np.linalg.norm(F_new) < (1.0 - 0.25 * t) * nrm:
                break
            t *= 0.5
        else:
            raise ConvergenceError("line search stalled", residual=float(nrm))
        c, F = c_new, F_new
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations",
        residual=float(np.linalg.norm(F)),
    )
