"""Acceptance-criteria runner.

Each criterion is a pure function of a :class:`Config` returning a list of
named checks (measured value, target, tolerance).  ``run_verify`` executes
all criteria, prints one PASS/FAIL line per criterion and returns a
JSON-ready summary; the summary contains no timings or timestamps, so two
runs with the same seed produce byte-identical output.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import barbot as bb
from . import boundary as bd
from . import cone as cn
from . import einstein as ein
from . import space as sp
from . import surface as sg
from .linalg import QuadraticSpace, pair, q_form

HEXAGON_FIXTURE = "hexagon_n2.json"


@dataclass
class Config:
    n: int = 2
    seed: int = 1234
    resolution: int = 801
    out_dir: str = "out"
    workers: int = 1
    tolerances: dict = field(default_factory=dict)

    def tol(self, name, default):
        return float(self.tolerances.get(name, default))


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    target: float
    tolerance: float
    passed: bool


def approx(cfg, name, measured, target, default_tol):
    t = cfg.tol(name, default_tol)
    return Check(name, float(measured), float(target), t,
                 bool(abs(measured - target) <= t))


def below(cfg, name, measured, default_tol):
    """Check that a nonnegative residual stays below its tolerance."""
    t = cfg.tol(name, default_tol)
    return Check(name, float(measured), 0.0, t, bool(measured <= t))


def hold(name, condition, measured=None):
    """A boolean check (measured is 1.0 when the condition holds)."""
    val = float(bool(condition)) if measured is None else float(measured)
    return Check(name, val, 1.0 if measured is None else val, 0.0, bool(condition))


def _space(cfg):
    return QuadraticSpace(cfg.n)


def _barbot(cfg):
    return bb.standard_barbot_surface(_space(cfg))


def _rng(cfg, index):
    return np.random.default_rng([cfg.seed, index])


_GRIDS = {}


def _grid(poly, half_width, resolution):
    key = (poly.coeffs, half_width, resolution)
    if key not in _GRIDS:
        _GRIDS[key] = cn.MetricGrid(poly, 0.0j, half_width, resolution)
    return _GRIDS[key]


def hexagon_fixture_path():
    from importlib.resources import files
    return files("pseudohyp.data").joinpath(HEXAGON_FIXTURE)


def load_hexagon():
    return ein.loop_from_json(json.loads(hexagon_fixture_path().read_text()))


# ----------------------------------------------------------------------
# Criteria
# ----------------------------------------------------------------------

def crit_barbot_maximality_flatness(cfg):
    surf = _barbot(cfg)
    imm = surf.immersion(analytic=False)
    grid = np.linspace(-1.0, 1.0, 5)
    max_h = max(np.linalg.norm(sg.mean_curvature(imm, u, v)) for u in grid for v in grid)
    max_k = max(abs(sg.gauss_curvature(imm, u, v, h=0.05)) for u in grid for v in grid)
    return [below(cfg, "mean_curvature_fd", max_h, 1e-6),
            below(cfg, "gauss_curvature_flat", max_k, 1e-6)]


def crit_second_fundamental_form(cfg):
    surf = _barbot(cfg)
    rng = _rng(cfg, 2)
    imm = surf.immersion()
    imm_fd = surf.immersion(analytic=False)
    res_an, res_fd = 0.0, 0.0
    for _ in range(8):
        u, v = rng.uniform(-1.2, 1.2, size=2)
        want = surf.second_fundamental_form(u, v, (1.0, 0.0), (1.0, 0.0))
        half_n = 0.5 * surf.normal(u, v)
        res_an = max(res_an, float(np.max(np.abs(want - half_n))))
        ff = sg.fundamental_forms(imm, u, v)
        res_an = max(res_an, float(np.max(np.abs(ff.second[0, 0] - half_n))))
        ff_fd = sg.fundamental_forms(imm_fd, u, v)
        res_fd = max(res_fd, float(np.max(np.abs(ff_fd.second[0, 0] - half_n))))
        trace = sg.mean_curvature(imm, u, v)
        res_an = max(res_an, float(np.max(np.abs(trace))))
    return [below(cfg, "ii_analytic", res_an, 1e-12),
            below(cfg, "ii_fd_oracle", res_fd, 1e-6)]


def crit_spacelike_distance(cfg):
    space = _space(cfg)
    surf = _barbot(cfg)
    rng = _rng(cfg, 3)
    x0 = surf.point(0.0, 0.0)
    worst = 0.0
    for _ in range(100):
        u, v = rng.uniform(-3.0, 3.0, size=2)
        if abs(u) < 1e-3 and abs(v) < 1e-3:
            continue
        d = sp.spacelike_distance(space, surf.point(u, v), x0)
        worst = max(worst, abs(d - bb.spacelike_distance_closed_form(u, v)))
    return [below(cfg, "distance_closed_form", worst, 1e-10)]


def crit_warped_pullback(cfg):
    space = _space(cfg)
    split = sp.standard_splitting(space)
    rng = _rng(cfg, 4)
    worst = 0.0
    for _ in range(50):
        u = rng.uniform(-0.55, 0.55, size=2)
        v = rng.normal(size=space.n + 1)
        v /= np.linalg.norm(v)
        dirs = []
        for _ in range(2):
            du = rng.normal(size=2)
            dv = rng.normal(size=space.n + 1)
            dv -= (dv @ v) * v
            dirs.append((du, dv))
        res = sp.warped_pullback_residual(split, u, v, dirs[0], dirs[1])
        worst = max(worst, abs(res))
    return [below(cfg, "warped_pullback", worst, 1e-6)]


def crit_horofunction_calculus(cfg):
    space = _space(cfg)
    surf = _barbot(cfg)
    imm = surf.immersion()
    rng = _rng(cfg, 5)
    checks = []

    handle_v1 = sg.HorofunctionHandle(surf.basis.z[0], imm)
    handle_edge = sg.HorofunctionHandle(surf.boundary_vector(("edge", 1)), imm)

    grad_res, hess_res = 0.0, 0.0
    for handle in (handle_v1, handle_edge):
        for _ in range(6):
            u, v = rng.uniform(-1.0, 1.0, size=2)
            coords, _, _ = handle.gradient(u, v)
            dh_fd = handle.differential_fd(u, v)
            g = sg.fundamental_forms(imm, u, v).metric
            coords_fd = np.linalg.solve(g, dh_fd)
            denom = max(1.0, float(np.max(np.abs(coords))))
            grad_res = max(grad_res, float(np.max(np.abs(coords - coords_fd))) / denom)
            hess_res = max(hess_res, float(np.max(np.abs(handle.hessian(u, v)
                                                         - handle.hessian_fd(u, v)))))
    checks.append(below(cfg, "gradient_fd", grad_res, 1e-6))
    checks.append(below(cfg, "hessian_fd", hess_res, 1e-4))

    qres = 0.0
    for _ in range(20):
        u, v = rng.uniform(-2.0, 2.0, size=2)
        _, _, qn = handle_v1.gradient(u, v)
        qres = max(qres, abs(qn - 2.0))
    checks.append(below(cfg, "qgrad_vertex", qres, 1e-8))

    qmax, qmin = -np.inf, np.inf
    for _ in range(1000):
        u, v = rng.uniform(-2.5, 2.5, size=2)
        edge = int(rng.integers(1, 5))
        t = rng.uniform(0.05, 0.95)
        z = surf.edge_point(edge, t)
        h = sg.HorofunctionHandle(z, imm)
        _, _, qn = h.gradient(u, v)
        qmax, qmin = max(qmax, qn), min(qmin, qn)
    checks.append(below(cfg, "qgrad_upper", qmax - 2.0, 1e-9))
    checks.append(hold("qgrad_positive", qmin > 0.0, qmin))

    us = np.linspace(-1.0, 1.0, 5)
    rep_v = sg.quasiconvexity_scan(handle_v1, us, us, curvature_fn=lambda a, b: 0.0)
    rep_e = sg.quasiconvexity_scan(handle_edge, us, us, curvature_fn=lambda a, b: 0.0)
    min_hess = min(rep_v.min_critical_hessian, rep_e.min_critical_hessian)
    min_beta = min(rep_v.min_beta, rep_e.min_beta)
    checks.append(below(cfg, "critical_hessian_lower", -min_hess, 1e-8))
    checks.append(below(cfg, "beta_lower", -1.0 - min_beta, 1e-8))
    checks.append(below(cfg, "beta_bound_excess",
                        max(rep_v.beta_bound_excess, rep_e.beta_bound_excess), 1e-8))
    return checks


def crit_space_boundary_limit(cfg):
    space = _space(cfg)
    surf = _barbot(cfg)
    t = 20.0
    x_t = surf.point(t, 0.0)
    x0 = surf.point(0.0, 0.0)
    base = sp.spacelike_distance(space, x_t, x0)
    sup = 0.0
    for u in np.linspace(-1.0, 1.0, 9):
        for v in np.linspace(-1.0, 1.0, 9):
            y = surf.point(u, v)
            renorm = sp.spacelike_distance(space, x_t, y) - base
            horo = surf.horofunction(("vertex", 1), u, v) - surf.horofunction(("vertex", 1), 0.0, 0.0)
            sup = max(sup, abs(renorm - horo))
    return [below(cfg, "space_boundary_limit", sup, 1e-3)]


def crit_crown_machinery(cfg):
    space = _space(cfg)
    crown = ein.standard_crown(space)
    Z = crown.basis.z
    pairing_res = max(abs(pair(space, Z[0], Z[2]) + 0.25),
                      abs(pair(space, Z[1], Z[3]) + 0.25))
    edge_max = float(crown.edge_pairing_table(grid=10).max())
    report = ein.validate_semi_positive(space, crown.loop(16))
    v4 = ein.complete_crown(space, Z[0], Z[1], Z[2])
    cres = max(abs(q_form(space, v4)),
               abs(pair(space, v4, Z[0])),
               abs(pair(space, v4, Z[2])))
    return [
        below(cfg, "basis_pairings", pairing_res, 1e-15),
        below(cfg, "crown_edge_pairings", edge_max, 0.0),
        hold("crown_semi_positive", report.ok),
        below(cfg, "complete_crown_residual", cres, 1e-12),
        hold("complete_crown_transverse", abs(pair(space, v4, Z[1])) > 1e-3),
    ]


def crit_renormalization(cfg):
    space = QuadraticSpace(2)  # the committed fixture lives in n = 2
    hexa = load_hexagon()
    crown = ein.standard_crown(space)
    schedule = [(1.0, 2.0 ** -k) for k in range(13)]
    ds = ein.renormalization_experiment(space, hexa, crown, schedule)
    decreasing = all(ds[k + 1] < ds[k] for k in range(3, 12))
    return [below(cfg, "renorm_final", ds[-1], 1e-3),
            hold("renorm_decreasing", decreasing, ds[-1])]


def crit_cone_exact(cfg):
    worst_p, worst_r, worst_k = 0.0, 0.0, 0.0
    for n_deg in (0, 1, 2, 3, 4, 6):
        for r in (0.7, 1.0):
            worst_p = max(worst_p, abs(cn.monomial_circle_perimeter(n_deg, r, "quadrature")
                                       - np.pi / 2 * (n_deg + 4) * r))
        for t in (1.0, 2.0):
            worst_r = max(worst_r, abs(cn.monomial_ray_arclength(n_deg, t) - t))
        mono = cn.PolynomialQuartic((0.0,) * n_deg + (1.0,))
        worst_k = max(worst_k, abs(cn.total_curvature(mono) + np.pi / 2 * n_deg))
    return [below(cfg, "cone_perimeter_quadrature", worst_p, 1e-9),
            below(cfg, "cone_ray_arclength", worst_r, 1e-9),
            below(cfg, "cone_total_curvature", worst_k, 1e-12)]


def crit_cone_grid(cfg):
    mono = cn.PolynomialQuartic((0.0, 0.0, 1.0))
    grid = _grid(mono, 6.0, cfg.resolution)
    rel = 0.0
    pairs = [((1.0, 0.0), (-2.0, 1.0)), ((1.3, 0.9), (-0.7, -1.8)),
             ((2.5, 0.4), (0.3, 2.2)), ((-1.1, 2.0), (2.0, -1.0))]
    for (x1, y1), (x2, y2) in pairs:
        z1, z2 = complex(x1, y1), complex(x2, y2)
        exact = cn.monomial_distance(
            2,
            (cn.geodesic_radius(2, abs(z1)), np.angle(z1)),
            (cn.geodesic_radius(2, abs(z2)), np.angle(z2)),
        )
        rel = max(rel, abs(grid.distance(z1, z2) - exact) / exact)

    poly = cn.PolynomialQuartic((0.1, 0.3, 1.0))
    R, _ = cn.quasi_isometry_bound(poly, 0.1)
    pgrid = _grid(poly, 12.0, cfg.resolution)
    radii = [4.0 * R, 6.0 * R]  # both beyond the (1+eps) radius R
    table = cn.perimeter_growth(poly, 0.0j, radii, pgrid)
    prel = max(abs(v - 3 * np.pi) / (3 * np.pi) for v in table)
    return [below(cfg, "grid_vs_monomial_rel", rel, 0.03),
            hold("quasi_isometry_radius", R <= 8.0, R),
            below(cfg, "perimeter_growth_rel", prel, 0.02)]


def crit_tits_identities(cfg):
    surf = _barbot(cfg)
    rng = _rng(cfg, 11)
    checks = []

    ident = 0.0
    for surface in (surf, bd.MonomialCone(2)):
        for entry in bd.tits_sample_pairs(surface, 5, rng):
            ident = max(ident, entry["identity_residual"])
    checks.append(below(cfg, "l_angle_identity", ident, 1e-6))

    xi = bd.barbot_ideal_direction(surf, (0.0, 0.0), (1.0, 0.0))
    eta = bd.barbot_ideal_direction(surf, (0.0, 0.0), (0.0, 1.0))
    checks.append(approx(cfg, "barbot_adjacent_td", bd.tits_distance(xi, eta),
                         np.pi / 2, 1e-6))

    per_res = max(abs(bd.tits_perimeter(bd.MonomialCone(n)) - (n + 4) * np.pi / 2)
                  for n in (0, 1, 2, 3, 4, 6))
    checks.append(below(cfg, "tits_perimeter_analytic", per_res, 1e-9))

    mono = cn.PolynomialQuartic((0.0, 0.0, 1.0))
    grid = _grid(mono, 6.0, cfg.resolution)
    p_over_r = cn.perimeter_growth(mono, 0.0j, [4.0], grid)[0]
    checks.append(approx(cfg, "tits_perimeter_N2", p_over_r, 3 * np.pi,
                         0.02 * 3 * np.pi))

    cone = bd.MonomialCone(2)
    res = bd.ohtsuka_check(cone,
                           bd.cone_ideal_direction(cone, 7 * np.pi / 12),
                           bd.cone_ideal_direction(cone, -7 * np.pi / 12),
                           (1.3, 0.0))
    checks.append(below(cfg, "ohtsuka_residual", res.residual, 1e-6))
    gb = bd.gauss_bonnet_triangle(cone, [(1.0, 0.1), (2.0, 0.5), (1.5, 0.3)])
    checks.append(below(cfg, "gauss_bonnet_flat_triangle", abs(gb), 1e-9))

    ident_mono = max(
        bd.perimeter_vs_curvature(bd.MonomialCone(n))[2] for n in (0, 1, 2, 4)
    )
    checks.append(below(cfg, "curvature_identity_monomial", ident_mono, 1e-9))

    poly = cn.PolynomialQuartic((0.1, 0.3, 1.0))
    pgrid = _grid(poly, 12.0, cfg.resolution)
    _, _, resid = bd.perimeter_vs_curvature(None, poly=poly, grid=pgrid, radius=24.0)
    checks.append(below(cfg, "curvature_identity_grid", resid, 0.02 * 2 * np.pi))
    return checks


def crit_polygon_bookkeeping(cfg):
    space = _space(cfg)
    checks = []
    worst_p, worst_k, counts_ok = 0.0, 0.0, True
    for n_deg in (0, 1, 2, 4):
        P = bd.tits_perimeter(bd.MonomialCone(n_deg))
        mono = cn.PolynomialQuartic((0.0,) * n_deg + (1.0,))
        K = cn.total_curvature(mono)
        worst_p = max(worst_p, abs(P - (n_deg + 4) * np.pi / 2))
        worst_k = max(worst_k, abs(K - (2 * np.pi - P)))
        counts_ok = counts_ok and int(round(P / (np.pi / 2))) == n_deg + 4
    checks.append(below(cfg, "bookkeeping_perimeter", worst_p, 1e-9))
    checks.append(below(cfg, "bookkeeping_curvature", worst_k, 1e-9))
    checks.append(hold("bookkeeping_vertex_count", counts_ok))
    checks.append(hold("crown_vertex_count",
                       len(ein.standard_crown(space).vertices) == 4))
    return checks


def crit_determinism(cfg):
    """Byte-identity of the summary of the seeded criteria under a re-run."""
    names = [n for n, _ in CRITERIA if n not in ("cone_grid", "determinism")]
    one = run_criteria(cfg, names, echo=False)
    two = run_criteria(cfg, names, echo=False)
    b1 = json.dumps(one, sort_keys=True).encode()
    b2 = json.dumps(two, sort_keys=True).encode()
    return [hold("summary_bytes_identical", b1 == b2, float(len(b1)))]


CRITERIA = [
    ("barbot_maximality_flatness", crit_barbot_maximality_flatness),
    ("second_fundamental_form", crit_second_fundamental_form),
    ("spacelike_distance_closed_form", crit_spacelike_distance),
    ("warped_pullback", crit_warped_pullback),
    ("horofunction_calculus", crit_horofunction_calculus),
    ("space_boundary_limit", crit_space_boundary_limit),
    ("crown_machinery", crit_crown_machinery),
    ("renormalization", crit_renormalization),
    ("cone_exact_values", crit_cone_exact),
    ("cone_grid", crit_cone_grid),
    ("tits_identities", crit_tits_identities),
    ("polygon_bookkeeping", crit_polygon_bookkeeping),
    ("determinism", crit_determinism),
]


def run_criteria(cfg, names, echo=True):
    """Run a subset of criteria into a JSON-ready list (work-pool execution)."""
    table = dict(CRITERIA)
    picked = [(n, table[n]) for n in names]
    slots = [None] * len(picked)

    def work(i):
        name, fn = picked[i]
        checks = fn(cfg)
        slots[i] = {
            "name": name,
            "passed": all(c.passed for c in checks),
            "checks": [
                {"name": c.name, "measured": c.measured, "target": c.target,
                 "tolerance": c.tolerance, "passed": c.passed}
                for c in checks
            ],
        }

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(work, range(len(picked))))
    else:
        for i in range(len(picked)):
            work(i)
    if echo:
        for slot in slots:
            state = "PASS" if slot["passed"] else "FAIL"
            print(f"[{state}] {slot['name']}")
            if not slot["passed"]:
                for c in slot["checks"]:
                    if not c["passed"]:
                        print(f"    {c['name']}: measured {c['measured']}"
                              f" target {c['target']} tolerance {c['tolerance']}")
    return slots


def run_verify(cfg, echo=True):
    """All criteria; returns (exit_code, summary dict)."""
    slots = run_criteria(cfg, [n for n, _ in CRITERIA], echo=echo)
    summary = {
        "config": {"n": cfg.n, "seed": cfg.seed, "resolution": cfg.resolution,
                   "tolerances": dict(sorted(cfg.tolerances.items()))},
        "criteria": slots,
        "passed": all(s["passed"] for s in slots),
    }
    return (0 if summary["passed"] else 1), summary
