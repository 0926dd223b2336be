"""Numerical extrinsic geometry of sampled spacelike immersions.

An :class:`Immersion` is a chart map (u, v) -> E landing on the quadric
q = -1, with optional analytic derivatives; finite differences (centered,
one Richardson step) fill in whatever the caller does not supply.  The
flat-connection split

    D_X Y = <X, Y> x + tangential + II(X, Y)

recovers the induced metric and the normal-valued second fundamental form,
from which mean curvature, Gauss curvature, the quartic differential and the
space-horofunction calculus are computed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, NonConformalChart, NonSpacelikeChart
from .linalg import pair

FD_STEP = 1e-4

#: metric-sampling step for the Brioschi curvature stencil
CURVATURE_STEP = 1e-3

CONFORMAL_TOL = 1e-8
LIGHTCONE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Immersion:
    """Chart map into the quadric with optional analytic jets."""

    space: object
    point_fn: object
    jet1_fn: object = None
    jet2_fn: object = None
    fd_step: float = FD_STEP

    def point(self, u, v):
        return np.asarray(self.point_fn(u, v), dtype=float)

    def first_derivatives(self, u, v):
        if self.jet1_fn is not None:
            fu, fv = self.jet1_fn(u, v)
            return np.asarray(fu, dtype=float), np.asarray(fv, dtype=float)
        f = self.point
        return (_richardson_d1(lambda h: f(u + h, v), self.fd_step),
                _richardson_d1(lambda h: f(u, v + h), self.fd_step))

    def second_derivatives(self, u, v):
        if self.jet2_fn is not None:
            fuu, fuv, fvv = self.jet2_fn(u, v)
            return (np.asarray(fuu, dtype=float), np.asarray(fuv, dtype=float),
                    np.asarray(fvv, dtype=float))
        if self.jet1_fn is not None:
            # differentiate the analytic first derivatives
            fuu = _richardson_d1(lambda h: self.jet1_fn(u + h, v)[0], self.fd_step)
            fuv = _richardson_d1(lambda h: self.jet1_fn(u, v + h)[0], self.fd_step)
            fvv = _richardson_d1(lambda h: self.jet1_fn(u, v + h)[1], self.fd_step)
            return fuu, fuv, fvv
        f = self.point
        # second differences lose two orders to cancellation; widen the step
        h2 = 10.0 * self.fd_step
        fuu = _richardson_d2(lambda h: f(u + h, v), h2)
        fvv = _richardson_d2(lambda h: f(u, v + h), h2)
        fuv = _richardson_mixed(f, u, v, h2)
        return fuu, fuv, fvv


def _richardson_d1(g, h):
    d1 = (g(h) - g(-h)) / (2.0 * h)
    d2 = (g(h / 2.0) - g(-h / 2.0)) / h
    return (4.0 * d2 - d1) / 3.0


def _richardson_d2(g, h):
    g0 = g(0.0)

    def s(step):
        return (g(step) - 2.0 * g0 + g(-step)) / step ** 2

    return (4.0 * s(h / 2.0) - s(h)) / 3.0


def _richardson_mixed(f, u, v, h):
    def m(step):
        return (f(u + step, v + step) - f(u + step, v - step)
                - f(u - step, v + step) + f(u - step, v - step)) / (4.0 * step ** 2)

    return (4.0 * m(h / 2.0) - m(h)) / 3.0


@dataclass(frozen=True, eq=False)
class FundamentalForms:
    point: np.ndarray
    tangent: np.ndarray      # rows: F_u, F_v
    metric: np.ndarray       # 2x2, positive definite
    second: np.ndarray       # (2, 2, dim), normal-valued and symmetric

    @property
    def metric_inverse(self):
        return np.linalg.inv(self.metric)


def fundamental_forms(imm, u, v):
    """Induced metric and second fundamental form at a chart point."""
    space = imm.space
    F = imm.point(u, v)
    Fu, Fv = imm.first_derivatives(u, v)
    T = np.vstack([Fu, Fv])
    B = space.form_matrix
    g = T @ B @ T.T
    if np.min(np.linalg.eigvalsh(g)) <= 0:
        raise NonSpacelikeChart("tangent plane is not q-positive definite")
    ginv = np.linalg.inv(g)
    seconds = imm.second_derivatives(u, v)
    order = {(0, 0): seconds[0], (0, 1): seconds[1], (1, 0): seconds[1], (1, 1): seconds[2]}
    II = np.zeros((2, 2, space.dim))
    for (i, j), S in order.items():
        coeffs = ginv @ (T @ B @ S)
        II[i, j] = S - g[i, j] * F - coeffs[0] * Fu - coeffs[1] * Fv
    return FundamentalForms(F, T, g, II)


def mean_curvature(imm, u, v):
    """Trace of II against the inverse metric; zero on maximal surfaces."""
    ff = fundamental_forms(imm, u, v)
    ginv = ff.metric_inverse
    return (ginv[0, 0] * ff.second[0, 0] + 2.0 * ginv[0, 1] * ff.second[0, 1]
            + ginv[1, 1] * ff.second[1, 1])


def induced_metric(imm, u, v):
    """(E, F, G) coefficients of the induced metric."""
    Fu, Fv = imm.first_derivatives(u, v)
    B = imm.space.form_matrix
    return float(Fu @ B @ Fu), float(Fu @ B @ Fv), float(Fv @ B @ Fv)


def gauss_curvature(imm, u, v, h=CURVATURE_STEP):
    """Intrinsic curvature by the Brioschi formula on metric samples.

    The stencil differentiates the induced metric twice; with analytic
    first derivatives the default step is fine, while purely
    finite-difference immersions carry ~1e-10 metric noise and need a wider
    step (h around 0.05) to keep the quotient noise down.
    """
    EFG = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            EFG[i, j] = induced_metric(imm, u + i * h, v + j * h)
    E, F, G = EFG[0, 0]

    def d_u(k):
        return (EFG[1, 0][k] - EFG[-1, 0][k]) / (2.0 * h)

    def d_v(k):
        return (EFG[0, 1][k] - EFG[0, -1][k]) / (2.0 * h)

    def d_uu(k):
        return (EFG[1, 0][k] - 2.0 * EFG[0, 0][k] + EFG[-1, 0][k]) / h ** 2

    def d_vv(k):
        return (EFG[0, 1][k] - 2.0 * EFG[0, 0][k] + EFG[0, -1][k]) / h ** 2

    def d_uv(k):
        return (EFG[1, 1][k] - EFG[1, -1][k] - EFG[-1, 1][k] + EFG[-1, -1][k]) / (4.0 * h ** 2)

    M1 = np.array([
        [-0.5 * d_vv(0) + d_uv(1) - 0.5 * d_uu(2), 0.5 * d_u(0), d_u(1) - 0.5 * d_v(0)],
        [d_v(1) - 0.5 * d_u(2), E, F],
        [0.5 * d_v(2), F, G],
    ])
    M2 = np.array([
        [0.0, 0.5 * d_v(0), 0.5 * d_u(2)],
        [0.5 * d_v(0), E, F],
        [0.5 * d_u(2), F, G],
    ])
    den = (E * G - F * F) ** 2
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / den)


def quartic_differential(imm, u, v, conformal_tol=CONFORMAL_TOL):
    """Value of the quartic differential in a conformal chart.

    phi = gN(II_11, II_11) - gN(II_12, II_12) - 2i gN(II_11, II_12), with gN
    the ambient pairing restricted to the normal bundle.  Charts that are not
    conformal for the induced metric are rejected, not reparametrized.
    """
    ff = fundamental_forms(imm, u, v)
    g = ff.metric
    scale = abs(g[0, 0])
    if abs(g[0, 0] - g[1, 1]) > conformal_tol * scale or abs(g[0, 1]) > conformal_tol * scale:
        raise NonConformalChart(f"chart is not conformal at ({u}, {v}): g = {g.tolist()}")
    B = imm.space.form_matrix
    a = ff.second[0, 0]
    b = ff.second[0, 1]
    return complex(a @ B @ a - b @ B @ b, -2.0 * (a @ B @ b))


def quartic_cr_residual(imm, u, v, h=1e-3):
    """Finite-difference Cauchy-Riemann residual of the quartic differential."""
    dphidu = (quartic_differential(imm, u + h, v) - quartic_differential(imm, u - h, v)) / (2.0 * h)
    dphidv = (quartic_differential(imm, u, v + h) - quartic_differential(imm, u, v - h)) / (2.0 * h)
    return abs(dphidu + 1j * dphidv)


# ----------------------------------------------------------------------
# Space-horofunction calculus
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HorofunctionHandle:
    """Space-horofunction h(x) = log |<z, x>| restricted to an immersion."""

    z: np.ndarray
    surface: Immersion

    def _pairing(self, u, v):
        F = self.surface.point(u, v)
        s = pair(self.surface.space, F, self.z)
        if abs(s) <= LIGHTCONE_TOL:
            raise GeometryError("evaluation point is on the lightcone of z")
        return s

    def value(self, u, v):
        return float(np.log(abs(self._pairing(u, v))))

    def differential(self, u, v):
        """Chart components of dh, (d_u h, d_v h)."""
        s = self._pairing(u, v)
        Fu, Fv = self.surface.first_derivatives(u, v)
        B = self.surface.space.form_matrix
        return np.array([Fu @ B @ self.z, Fv @ B @ self.z]) / s

    def gradient(self, u, v):
        """(chart coords, ambient vector, q-norm) of grad h = z^T / <x, z>."""
        ff = fundamental_forms(self.surface, u, v)
        dh = self.differential(u, v)
        coords = ff.metric_inverse @ dh
        ambient = coords[0] * ff.tangent[0] + coords[1] * ff.tangent[1]
        return coords, ambient, float(dh @ coords)

    def hessian(self, u, v):
        """2x2 table of the metric Hessian on the chart basis.

        Hess_ij = g_ij + <II_ij, z> / <x, z> - (d_i h)(d_j h).
        """
        ff = fundamental_forms(self.surface, u, v)
        s = self._pairing(u, v)
        dh = self.differential(u, v)
        B = self.surface.space.form_matrix
        H = np.zeros((2, 2))
        for i in range(2):
            for j in range(2):
                H[i, j] = ff.metric[i, j] + (ff.second[i, j] @ B @ self.z) / s - dh[i] * dh[j]
        return H

    # -- finite-difference oracles -------------------------------------

    def differential_fd(self, u, v, h=FD_STEP):
        return np.array([
            _richardson_d1(lambda s: self.value(u + s, v), h),
            _richardson_d1(lambda s: self.value(u, v + s), h),
        ])

    def hessian_fd(self, u, v, h=10.0 * FD_STEP):
        """Coordinate second differences corrected by Christoffel symbols."""
        d2 = np.zeros((2, 2))
        d2[0, 0] = _richardson_d2(lambda s: self.value(u + s, v), h)
        d2[1, 1] = _richardson_d2(lambda s: self.value(u, v + s), h)
        d2[0, 1] = d2[1, 0] = _richardson_mixed(self.value, u, v, h)
        dh = self.differential_fd(u, v, h)
        Gam = christoffel(self.surface, u, v)
        H = np.zeros((2, 2))
        for i in range(2):
            for j in range(2):
                H[i, j] = d2[i, j] - Gam[0, i, j] * dh[0] - Gam[1, i, j] * dh[1]
        return H

    def critical_direction(self, u, v):
        """q-unit chart direction annihilating dh."""
        dh = self.differential(u, v)
        X = np.array([-dh[1], dh[0]])
        nrm = np.linalg.norm(X)
        if nrm == 0.0:
            raise GeometryError("dh vanishes; critical direction undefined")
        X = X / nrm
        g = fundamental_forms(self.surface, u, v).metric
        return X / np.sqrt(X @ g @ X)


def christoffel(imm, u, v, h=CURVATURE_STEP):
    """Christoffel symbols Gamma[k, i, j] of the induced metric, by FD."""

    def metric(a, b):
        E, F, G = induced_metric(imm, a, b)
        return np.array([[E, F], [F, G]])

    g = metric(u, v)
    dg = np.zeros((2, 2, 2))  # dg[l] = d_l g
    dg[0] = (metric(u + h, v) - metric(u - h, v)) / (2.0 * h)
    dg[1] = (metric(u, v + h) - metric(u, v - h)) / (2.0 * h)
    ginv = np.linalg.inv(g)
    Gam = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                s = 0.0
                for l in range(2):
                    s += ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                Gam[k, i, j] = 0.5 * s
    return Gam


@dataclass(frozen=True)
class QuasiconvexityReport:
    min_critical_hessian: float
    min_beta: float
    max_beta: float
    max_gradient_qnorm: float
    min_gradient_qnorm: float
    beta_bound_excess: float
    points: int


def quasiconvexity_scan(handle, us, vs, n_directions=16, curvature_fn=None):
    """Scan a grid for the quasiconvexity inequalities of a space-horofunction.

    At every grid point the Hessian is evaluated on the critical direction,
    and beta(x, X) = <II(X, X), z> / <x, z> is sampled over q-unit directions.
    When ``curvature_fn`` is given, the comparison bound
    beta^2 <= (q(grad h) - 1)(1 + K) is monitored where q(grad h) >= 1 and
    its worst excess is reported (the scan never raises on inequalities;
    it is a report).
    """
    imm = handle.surface
    B = imm.space.form_matrix
    min_hess = np.inf
    min_beta, max_beta = np.inf, -np.inf
    qmax, qmin = -np.inf, np.inf
    excess = 0.0
    count = 0
    thetas = np.linspace(0.0, np.pi, n_directions, endpoint=False)
    for u in us:
        for v in vs:
            ff = fundamental_forms(imm, u, v)
            s = handle._pairing(u, v)
            H = handle.hessian(u, v)
            Xc = handle.critical_direction(u, v)
            min_hess = min(min_hess, float(Xc @ H @ Xc))
            _, _, qn = handle.gradient(u, v)
            qmax, qmin = max(qmax, qn), min(qmin, qn)
            for th in thetas:
                X = np.array([np.cos(th), np.sin(th)])
                X = X / np.sqrt(X @ ff.metric @ X)
                IIxx = (X[0] ** 2 * ff.second[0, 0] + 2 * X[0] * X[1] * ff.second[0, 1]
                        + X[1] ** 2 * ff.second[1, 1])
                beta = float(IIxx @ B @ handle.z) / s
                min_beta, max_beta = min(min_beta, beta), max(max_beta, beta)
                if curvature_fn is not None and qn >= 1.0:
                    bound = (qn - 1.0) * (1.0 + curvature_fn(u, v))
                    excess = max(excess, beta ** 2 - bound)
            count += 1
    return QuasiconvexityReport(float(min_hess), float(min_beta), float(max_beta),
                                float(qmax), float(qmin), float(excess), count)


def graph_immersion(split, graph_map, fd_step=FD_STEP):
    """Immersion of a warped graph u -> psi(u, G(u)) over the disc chart."""
    from .space import warped_embed

    def point(a, b):
        u = np.array([a, b])
        return warped_embed(split, u, graph_map(u))

    return Immersion(split.space, point, fd_step=fd_step)
