import json

import numpy as np
import pytest

from pseudohyp import einstein as ein
from pseudohyp.errors import (
    DegeneratePairing,
    GeometryError,
    LoopValidationError,
    NotIsotropicPlane,
    ScheduleError,
)
from pseudohyp.linalg import (
    QuadraticSpace,
    cartan_element,
    pair,
    q_form,
    signature_of_span,
)

SPACE = QuadraticSpace(2)
Z = ein.standard_quadruple(SPACE)
CROWN = ein.standard_crown(SPACE)
RNG = np.random.default_rng(31)


def crown_symmetry():
    """Coordinate rotation e1->e2->e3->e4->e1: a q-isometry fixing the crown."""
    P = np.zeros((5, 5))
    P[1, 0] = P[2, 1] = P[3, 2] = P[0, 3] = 1.0
    P[4, 4] = 1.0
    return P


# ----------------------------------------------------------------------
# Photons
# ----------------------------------------------------------------------

def test_photon_through_adjacent_vertices():
    ph = ein.photon_through(SPACE, Z[0], Z[1])
    mid = ph.segment(0.37)
    assert abs(q_form(SPACE, mid)) < 1e-12


def test_photon_rejects_transverse_and_equal_points():
    with pytest.raises(NotIsotropicPlane):
        ein.photon_through(SPACE, Z[0], Z[2])
    with pytest.raises(GeometryError):
        ein.photon_through(SPACE, Z[0], 3.0 * Z[0])


# ----------------------------------------------------------------------
# Semi-positivity
# ----------------------------------------------------------------------

def test_crown_loop_is_semi_positive():
    report = ein.validate_semi_positive(SPACE, CROWN.loop(16))
    assert report.ok
    assert report.bad_triples == []
    assert report.witness_positive_triple is not None


def test_crown_consecutive_vertices_span_photons():
    V = CROWN.vertices
    for i in range(4):
        ein.photon_through(SPACE, V[i], V[(i + 1) % 4])


def test_subsampled_report_uses_original_indices():
    loop = CROWN.loop(64)  # 257 samples, above the subsampling cap
    report = ein.validate_semi_positive(SPACE, loop, max_points=60)
    assert report.ok
    assert max(report.witness_positive_triple) < len(loop.samples)
    assert max(report.witness_positive_triple) >= 60  # not subsample-local


def test_perturbed_loop_reports_bad_triple():
    loop = CROWN.loop(16)
    samples = loop.samples.copy()
    idx = 8  # interior point of the first edge
    inward = Z.sum(axis=0)  # q-negative interior point
    samples[idx] = samples[idx] - 0.4 * inward / np.linalg.norm(inward)
    bad_loop = ein.SampledLoop(SPACE, samples, None, 0)
    report = ein.validate_semi_positive(SPACE, bad_loop)
    assert not report.ok
    assert any(idx in t for t in report.bad_triples)


def test_double_photon_has_no_positive_witness():
    ts = np.linspace(0.0, 1.0, 12)
    seg = np.outer(1 - ts, Z[0]) + np.outer(ts, Z[1])
    samples = np.vstack([seg, seg[::-1]])
    loop = ein.SampledLoop(SPACE, samples / np.linalg.norm(samples, axis=1)[:, None], None, 0)
    report = ein.validate_semi_positive(SPACE, loop)
    assert not report.ok
    assert report.witness_positive_triple is None
    assert report.bad_triples == []


# ----------------------------------------------------------------------
# Hyperbolic bases and crowns
# ----------------------------------------------------------------------

def test_make_hyperbolic_basis_rescales_third_vector():
    e = [SPACE.basis_vector(i) for i in range(1, 5)]
    # <e1, -2 e3> = 1, so z3 = -(-2 e3)/4 = e3/2
    basis = ein.make_hyperbolic_basis(SPACE, e[0], e[1], -2.0 * e[2], e[3])
    assert np.allclose(basis.z[2], 0.5 * e[2], atol=1e-15)
    assert abs(pair(SPACE, basis.z[0], basis.z[2]) + 0.25) <= 1e-15


def test_make_hyperbolic_basis_idempotent():
    basis = ein.make_hyperbolic_basis(SPACE, *Z)
    assert np.allclose(basis.z, Z, atol=0.0)


def test_make_hyperbolic_basis_rejects_photon_pair():
    # w1, w3 on a common photon pair to zero
    with pytest.raises((DegeneratePairing, LoopValidationError)):
        ein.make_hyperbolic_basis(SPACE, Z[0], Z[1], Z[0] + Z[1], Z[3])


def test_crown_edge_pairings_nonpositive_on_grid():
    table = CROWN.edge_pairing_table(grid=10)
    assert table.max() <= 0.0


def test_crown_is_equivariant():
    from pseudohyp.linalg import random_isometry
    g = random_isometry(SPACE, RNG)
    basis_g = ein.HyperbolicBasis(SPACE, Z @ g.T)
    crown_g = ein.crown_from_basis(basis_g)
    lhs = crown_g.loop(8).samples
    rhs = ein.loop_from_polygon(SPACE, CROWN.vertices @ g.T, 8).samples
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


# ----------------------------------------------------------------------
# Crown completion
# ----------------------------------------------------------------------

def test_complete_crown_standard_configuration():
    e = [SPACE.basis_vector(i) for i in range(1, 5)]
    v4 = ein.complete_crown(SPACE, e[0], e[1], e[2])
    # derived invariants: q(v4) = 0, v4 orthogonal to e1 and e3, paired with e2
    assert abs(q_form(SPACE, v4)) <= 1e-12
    assert abs(pair(SPACE, v4, e[0])) <= 1e-12
    assert abs(pair(SPACE, v4, e[2])) <= 1e-12
    assert pair(SPACE, v4, e[1]) < -1e-3
    assert np.allclose(np.abs(v4), e[3], atol=1e-12)


def test_complete_crown_feeds_crown_pipeline():
    v4 = ein.complete_crown(SPACE, Z[0], Z[1], Z[2])
    basis = ein.make_hyperbolic_basis(SPACE, Z[0], Z[1], Z[2], v4)
    crown = ein.crown_from_basis(basis)
    assert ein.validate_semi_positive(SPACE, crown.loop(16)).ok


def test_complete_crown_family_choices_distinct():
    v4a = ein.complete_crown(SPACE, Z[0], Z[1], Z[2], w=np.array([0.3]))
    v4b = ein.complete_crown(SPACE, Z[0], Z[1], Z[2], w=np.array([-0.3]))
    assert ein.chordal_distance(v4a, v4b) > 1e-3
    for v4 in (v4a, v4b):
        basis = ein.make_hyperbolic_basis(SPACE, Z[0], Z[1], Z[2], v4)
        assert ein.validate_semi_positive(SPACE, ein.crown_from_basis(basis).loop(16)).ok


def test_complete_crown_recovers_dropped_vertex_edges():
    v4 = ein.complete_crown(SPACE, Z[0], Z[1], Z[2])
    basis = ein.make_hyperbolic_basis(SPACE, Z[0], Z[1], Z[2], v4)
    new_loop = ein.crown_from_basis(basis).loop(16)
    old_loop = CROWN.loop(16)
    # the two retained edges are the first 32 samples of each loop
    assert np.max(np.abs(new_loop.samples[:32] - old_loop.samples[:32])) <= 1e-10


# ----------------------------------------------------------------------
# Cartan action on loops
# ----------------------------------------------------------------------

def test_cartan_orbit_identity():
    loop = CROWN.loop(16)
    moved = ein.cartan_orbit(cartan_element(SPACE, Z, 1.0, 1.0), loop)
    assert np.max(np.abs(moved.samples - loop.samples)) <= 1e-14


def test_cartan_fixes_vertices_projectively():
    a = cartan_element(SPACE, Z, 3.0, 0.2)
    moved = ein.cartan_orbit(a, CROWN.loop(8))
    for i in range(4):
        assert ein.chordal_distance(moved.vertices[i], Z[i]) <= 1e-12


def test_cartan_orbit_commutes_with_normalization():
    a = cartan_element(SPACE, Z, 2.0, 0.5)
    loop = CROWN.loop(8)
    scaled = ein.SampledLoop(SPACE, 7.0 * loop.samples, 7.0 * loop.vertices, 8)
    m1 = ein.cartan_orbit(a, loop)
    m2 = ein.cartan_orbit(a, scaled)
    assert np.max(np.abs(m1.samples - m2.samples)) <= 1e-14


def test_cartan_orbit_preserves_semi_positivity():
    a = cartan_element(SPACE, Z, 2.0, 0.4)
    before = ein.validate_semi_positive(SPACE, CROWN.loop(16))
    after = ein.validate_semi_positive(SPACE, ein.cartan_orbit(a, CROWN.loop(16)))
    assert before.ok and after.ok


# ----------------------------------------------------------------------
# Loop distance and renormalization
# ----------------------------------------------------------------------

def test_loop_distance_identity_and_scale_invariance():
    loop = CROWN.loop(16)
    assert ein.loop_distance(loop, loop) == 0.0
    verts = CROWN.vertices.copy()
    verts[2] = 7.0 * verts[2]
    scaled = ein.loop_from_polygon(SPACE, verts, 16)
    assert ein.loop_distance(loop, scaled) <= 1e-14


def test_renormalization_of_crown_itself_is_zero():
    loop = CROWN.loop(32)
    schedule = [(1.0, 2.0 ** -k) for k in range(5)]
    ds = ein.renormalization_experiment(SPACE, loop, CROWN, schedule)
    assert max(ds) <= 1e-12


def test_renormalization_rejects_bad_schedule():
    loop = CROWN.loop(16)
    with pytest.raises(ScheduleError):
        ein.renormalization_experiment(SPACE, loop, CROWN, [(1.0, 2.0 ** k) for k in range(4)])


def test_hexagon_fixture_renormalizes_to_osculating_crown():
    from pseudohyp.verify import load_hexagon
    hexa = load_hexagon()
    ein.validate_polygon(SPACE, hexa.vertices)
    schedule = [(1.0, 2.0 ** -k) for k in range(13)]
    ds = ein.renormalization_experiment(SPACE, hexa, CROWN, schedule)
    assert ds[0] > 1e-3  # genuinely distinct loop
    assert ds[-1] <= 1e-3
    assert all(ds[k + 1] < ds[k] for k in range(3, 12))


def test_renormalization_distances_invariant_under_crown_symmetry():
    from pseudohyp.verify import load_hexagon
    hexa = load_hexagon()
    g = crown_symmetry()
    schedule = [(1.0, 2.0 ** -k) for k in range(8)]
    ds = ein.renormalization_experiment(SPACE, hexa, CROWN, schedule)
    hexa_g = ein.loop_from_polygon(SPACE, hexa.vertices @ g.T, hexa.samples_per_edge)
    crown_g = ein.crown_from_basis(ein.HyperbolicBasis(SPACE, Z @ g.T))
    ds_g = ein.renormalization_experiment(SPACE, hexa_g, crown_g, schedule)
    assert np.max(np.abs(np.array(ds) - np.array(ds_g))) <= 1e-12


# ----------------------------------------------------------------------
# Polygon builder and fixture IO
# ----------------------------------------------------------------------

@pytest.mark.parametrize("k", [5, 6, 7])
def test_build_polygon_validates(k):
    loop = ein.build_polygon(SPACE, k, seed=3)
    assert loop.num_vertices() == k
    ein.validate_polygon(SPACE, loop.vertices)


def test_hexagon_fixture_samples_are_coherent():
    from pseudohyp.verify import load_hexagon
    from pseudohyp.linalg import gram
    hexa = load_hexagon()
    G = gram(SPACE, hexa.samples)
    assert G.max() <= 1e-10  # pair <= 0 on all sampled lift pairs


def test_higher_ambient_dimension_n3():
    space3 = QuadraticSpace(3)
    crown3 = ein.standard_crown(space3)
    assert ein.validate_semi_positive(space3, crown3.loop(16)).ok
    Z3 = crown3.basis.z
    v4a = ein.complete_crown(space3, Z3[0], Z3[1], Z3[2], w=np.array([0.2, 0.0]))
    v4b = ein.complete_crown(space3, Z3[0], Z3[1], Z3[2], w=np.array([0.0, 0.2]))
    assert ein.chordal_distance(v4a, v4b) > 1e-3
    for v4 in (v4a, v4b):
        basis = ein.make_hyperbolic_basis(space3, Z3[0], Z3[1], Z3[2], v4)
        assert ein.validate_semi_positive(space3, ein.crown_from_basis(basis).loop(12)).ok


def test_loop_json_round_trip(tmp_path):
    loop = CROWN.loop(16)
    path = tmp_path / "crown.json"
    ein.save_loop(loop, path)
    data = json.loads(path.read_text())
    assert set(data) == {"n", "vertices", "lift_signs", "samples_per_edge"}
    loaded = ein.load_loop(path)
    assert np.max(np.abs(loaded.samples - loop.samples)) <= 1e-15
