"""The conformal boundary Ein^{1,n}: photons, loops, crowns and renormalization.

Boundary points are isotropic vectors taken up to positive scale; loops are
dense sample sets with an exact vertex list when polygonal.  All validation
is numerical: photon incidence, transversality and semi-positivity are
signature computations with an explicit tolerance.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePairing,
    GeometryError,
    LoopValidationError,
    NotIsotropicPlane,
    ScheduleError,
)
from .linalg import (
    QuadraticSpace,
    cartan_element,
    gram,
    orthogonal_complement,
    pair,
    q_form,
    signature_of_span,
)

ISO_TOL = 1e-10
PAIR_TOL = 1e-9

DEFAULT_SAMPLES_PER_EDGE = 64


def ein_representative(space, v, tol=ISO_TOL):
    """Unit-Euclidean-norm representative of an isotropic line."""
    v = space.check_vector(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise GeometryError("zero vector is not a boundary point")
    if abs(q_form(space, v)) > tol * nrm * nrm:
        raise GeometryError("vector is not isotropic")
    return v / nrm


def chordal_distance(x, y):
    """d([x],[y]) = min(|x-y|, |x+y|) on unit representatives."""
    x = np.asarray(x) / np.linalg.norm(x)
    y = np.asarray(y) / np.linalg.norm(y)
    return min(np.linalg.norm(x - y), np.linalg.norm(x + y))


def projectively_equal(x, y, tol=1e-9):
    return chordal_distance(x, y) <= tol


@dataclass(frozen=True, eq=False)
class Photon:
    """Projectivization of a totally isotropic 2-plane, spanned by two points."""

    space: QuadraticSpace
    p: np.ndarray
    q: np.ndarray

    def segment(self, t):
        """Representative (1-t) p + t q of the photon segment."""
        return (1.0 - t) * self.p + t * self.q


def photon_through(space, p, q, tol=None):
    p = ein_representative(space, p)
    q = ein_representative(space, q)
    if projectively_equal(p, q):
        raise GeometryError("photon needs two projectively distinct points")
    if signature_of_span(space, [p, q], tol=tol) != (0, 0, 2):
        raise NotIsotropicPlane("span of the two points is not totally isotropic")
    return Photon(space, p, q)


# ----------------------------------------------------------------------
# Sampled loops
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampledLoop:
    """Closed loop of boundary points given by unit-norm samples.

    ``vertices`` is the exact ordered vertex list when the loop is a
    lightlike polygon (coherent lifts); the samples then run through the
    photon edges with ``samples_per_edge`` points per edge.
    """

    space: QuadraticSpace
    samples: np.ndarray
    vertices: np.ndarray = None
    samples_per_edge: int = 0

    def is_polygonal(self):
        return self.vertices is not None

    def num_vertices(self):
        return 0 if self.vertices is None else len(self.vertices)


def loop_from_polygon(space, vertices, samples_per_edge=DEFAULT_SAMPLES_PER_EDGE):
    """Sample the edges (1-t) v_i + t v_{i+1} of a polygon, t in [0, 1).

    Vertex representatives are normalized first: the relative scale of the
    endpoint lifts sets the parametrization of a photon segment, so sampling
    must not depend on it.
    """
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    V = V / np.linalg.norm(V, axis=1)[:, None]
    k = len(V)
    ts = np.arange(samples_per_edge) / samples_per_edge
    chunks = []
    for i in range(k):
        seg = np.outer(1.0 - ts, V[i]) + np.outer(ts, V[(i + 1) % k])
        chunks.append(seg)
    samples = np.vstack(chunks + [V[:1]])  # close the loop explicitly
    samples = samples / np.linalg.norm(samples, axis=1)[:, None]
    return SampledLoop(space, samples, V, samples_per_edge)


@dataclass(frozen=True)
class SemiPositivityReport:
    ok: bool
    bad_triples: list
    witness_positive_triple: tuple
    triples_checked: int


def validate_semi_positive(space, loop, tol=None, max_points=120):
    """Check the two semi-positivity conditions on sampled triples.

    ok iff no sampled triple spans signature (1,2) and at least one spans
    (2,1).  Loops with more than ``max_points`` samples are subsampled
    evenly before the cubic triple scan.
    """
    S = loop.samples
    if len(S) < 8:
        raise GeometryError("need at least 8 samples to validate a loop")
    idx_keep = np.arange(len(S))
    if len(S) > max_points:
        idx_keep = np.linspace(0, len(S) - 1, max_points).astype(int)
        S = S[idx_keep]
    if tol is None:
        from .linalg import SIGNATURE_TOL
        tol = SIGNATURE_TOL
    m = len(S)
    G = gram(space, S)
    idx = np.array(list(itertools.combinations(range(m), 3)))
    G3 = G[idx[:, :, None], idx[:, None, :]]
    eigs = np.linalg.eigvalsh(G3)
    pos = (eigs > tol).sum(axis=1)
    neg = (eigs < -tol).sum(axis=1)
    bad_mask = (pos == 1) & (neg == 2)
    wit_mask = (pos == 2) & (neg == 1)
    # report triples in the loop's own sample indices
    bad = [tuple(int(idx_keep[i]) for i in t) for t in idx[bad_mask][:32]]
    witness = (tuple(int(idx_keep[i]) for i in idx[wit_mask][0])
               if wit_mask.any() else None)
    ok = (not bad_mask.any()) and witness is not None
    return SemiPositivityReport(ok, bad, witness, len(idx))


# ----------------------------------------------------------------------
# Hyperbolic bases and Barbot crowns
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HyperbolicBasis:
    """Isotropic quadruple with consecutive photon pairs and cross pairings -1/4."""

    space: QuadraticSpace
    z: np.ndarray  # (4, dim)

    def __post_init__(self):
        Z = self.z
        if Z.shape != (4, self.space.dim):
            raise GeometryError("hyperbolic basis needs 4 ambient vectors")
        for i in range(4):
            if abs(q_form(self.space, Z[i])) > ISO_TOL * np.sum(Z[i] ** 2):
                raise GeometryError(f"basis vector {i + 1} is not isotropic")
            if abs(pair(self.space, Z[i], Z[(i + 1) % 4])) > PAIR_TOL:
                raise GeometryError(f"vectors {i + 1}, {(i + 1) % 4 + 1} do not span a photon")
        for i in (0, 1):
            if abs(pair(self.space, Z[i], Z[i + 2]) + 0.25) > 1e-12:
                raise GeometryError(f"pairing <z{i + 1}, z{i + 3}> is not -1/4")

    def __iter__(self):
        return iter(self.z)


def make_hyperbolic_basis(space, w1, w2, w3, w4, tol=PAIR_TOL):
    """Rescale an isotropic quadruple into a hyperbolic basis.

    z3 = -w3 / (4 <w1, w3>) and z4 = -w4 / (4 <w2, w4>); already-normalized
    quadruples are returned unchanged.
    """
    W = [space.check_vector(w) for w in (w1, w2, w3, w4)]
    for i, w in enumerate(W):
        if abs(q_form(space, w)) > ISO_TOL * np.sum(w ** 2):
            raise GeometryError(f"input vector {i + 1} is not isotropic")
    for i in range(4):
        if signature_of_span(space, [W[i], W[(i + 1) % 4]]) != (0, 0, 2):
            raise LoopValidationError(
                f"vectors {i + 1} and {(i + 1) % 4 + 1} do not span a photon"
            )
    p13 = pair(space, W[0], W[2])
    p24 = pair(space, W[1], W[3])
    if abs(p13) < tol or abs(p24) < tol:
        raise DegeneratePairing("opposite vertices pair to zero")
    z3 = -W[2] / (4.0 * p13)
    z4 = -W[3] / (4.0 * p24)
    return HyperbolicBasis(space, np.vstack([W[0], W[1], z3, z4]))


def standard_quadruple(space):
    """The coordinate quadruple e_i / sqrt(2), a hyperbolic basis of the chart."""
    if space.basis_kind.value != "hyperbolic":
        raise GeometryError("standard quadruple needs the hyperbolic chart")
    s = 1.0 / np.sqrt(2.0)
    return np.vstack([s * space.basis_vector(i) for i in range(1, 5)])


@dataclass(frozen=True, eq=False)
class BarbotCrown:
    """The 4-gon determined by a hyperbolic basis."""

    basis: HyperbolicBasis

    @property
    def space(self):
        return self.basis.space

    @property
    def vertices(self):
        return self.basis.z

    def loop(self, samples_per_edge=DEFAULT_SAMPLES_PER_EDGE):
        return loop_from_polygon(self.space, self.basis.z, samples_per_edge)

    def edge_pairing_table(self, grid=10):
        """Pairings of edge samples, <(1-t) z_i + t z_{i+1}, (1-s) z_j + s z_{j+1}>.

        Returns an array of shape (4, 4, grid, grid); semi-positivity of the
        crown is the statement that every entry is <= 0.
        """
        Z = self.basis.z
        ts = np.linspace(0.0, 1.0, grid)
        table = np.zeros((4, 4, grid, grid))
        B = self.space.form_matrix
        for i in range(4):
            Ei = np.outer(1.0 - ts, Z[i]) + np.outer(ts, Z[(i + 1) % 4])
            for j in range(4):
                Ej = np.outer(1.0 - ts, Z[j]) + np.outer(ts, Z[(j + 1) % 4])
                table[i, j] = Ei @ B @ Ej.T
        return table


def crown_from_basis(basis, samples_per_edge=DEFAULT_SAMPLES_PER_EDGE):
    return BarbotCrown(basis)


def standard_crown(space):
    Z = standard_quadruple(space)
    return BarbotCrown(make_hyperbolic_basis(space, *Z))


# ----------------------------------------------------------------------
# Crown completion (Prop-style: third-vertex data determines the fourth)
# ----------------------------------------------------------------------

def _signature_frame(space, rows, tol=1e-9):
    """Split a Euclidean-orthonormal row basis into q-normalized eigenframes.

    Returns (pos_rows, neg_rows, null_rows) with q = +1 on pos rows and
    q = -1 on neg rows.
    """
    G = gram(space, rows)
    eig, U = np.linalg.eigh(G)
    vecs = U.T @ rows
    pos = [vecs[i] / np.sqrt(eig[i]) for i in range(len(eig)) if eig[i] > tol]
    neg = [vecs[i] / np.sqrt(-eig[i]) for i in range(len(eig)) if eig[i] < -tol]
    null = [vecs[i] for i in range(len(eig)) if abs(eig[i]) <= tol]
    return pos, neg, null


def complete_crown(space, v1, v2, v3, w=None, tol=1e-9):
    """Fourth vertex of a crown through (v1, v2, v3) with photon edges at v2.

    Searches an isotropic direction in the orthocomplement of v1 + v3 that
    is transverse to v2.  The default picks the canonical direction obtained
    by flipping the negative part of v2 in that complement; for n > 1 the
    optional ``w`` (length n-1) moves through the remaining family.  The lift
    sign is fixed so that <v4, v2> <= 0.
    """
    v1 = ein_representative(space, v1)
    v2 = ein_representative(space, v2)
    v3 = ein_representative(space, v3)
    for a, b, name in ((v1, v2, "v1, v2"), (v2, v3, "v2, v3")):
        if signature_of_span(space, [a, b]) != (0, 0, 2):
            raise LoopValidationError(f"{name} do not span a photon")
    if signature_of_span(space, [v1, v3]) != (1, 1, 0):
        raise LoopValidationError("v1, v3 are not transverse")

    K = orthogonal_complement(space, np.vstack([v1, v3]))
    pos, negs, null = _signature_frame(space, K)
    if len(pos) != 1 or null:
        raise GeometryError("orthocomplement of v1 + v3 is not of signature (1, n)")
    p = pos[0]
    alpha = pair(space, v2, p)
    m = sum((-pair(space, v2, mi)) * mi for mi in negs)
    y = alpha * p - m
    if w is not None:
        w = np.asarray(w, dtype=float)
        if w.shape != (space.n - 1,):
            raise GeometryError(f"family parameter must have length {space.n - 1}")
        m_hat = m / np.sqrt(max(-q_form(space, m), tol))
        # negative-definite complement of span{p, m_hat} inside the orthocomplement
        r_rows = []
        for mi in negs:
            r = mi - (-pair(space, mi, m_hat)) * m_hat
            for prev in r_rows:
                r = r - (-pair(space, r, prev)) * prev
            qr = q_form(space, r)
            if qr < -tol:
                r_rows.append(r / np.sqrt(-qr))
        if len(r_rows) != space.n - 1:
            raise GeometryError("could not build the transverse family directions")
        rho = sum(wi * ri for wi, ri in zip(w, r_rows))
        denom = pair(space, y, v2)
        v4 = y + rho - (q_form(space, rho) / (2.0 * denom)) * v2
    else:
        v4 = y
    p42 = pair(space, v4, v2)
    if abs(p42) < tol:
        raise DegeneratePairing("completed vertex is not transverse to v2")
    if p42 > 0:
        v4 = -v4
    return ein_representative(space, v4)


# ----------------------------------------------------------------------
# Cartan action, loop distance, renormalization
# ----------------------------------------------------------------------

def cartan_orbit(a, loop):
    """Pointwise Cartan action on a loop, with unit-norm representatives.

    Polygonal loops are transformed through their vertex list and resampled
    along the image photon edges, so the sample set follows the loop as a
    subset of the boundary rather than a fixed parametrization.
    """
    if loop.is_polygonal():
        verts = loop.vertices @ a.matrix.T
        return loop_from_polygon(a.space, verts, loop.samples_per_edge)
    samples = loop.samples @ a.matrix.T
    samples = samples / np.linalg.norm(samples, axis=1)[:, None]
    return SampledLoop(a.space, samples, None, 0)


def loop_distance(l1, l2):
    """Symmetric Hausdorff distance of the sample sets in the chordal metric.

    Distances are formed by direct differencing min(|x-y|, |x+y|) (not via
    inner products, which lose half the precision near coincident samples).
    """
    S1 = l1.samples / np.linalg.norm(l1.samples, axis=1)[:, None]
    S2 = l2.samples / np.linalg.norm(l2.samples, axis=1)[:, None]
    diff = S1[:, None, :] - S2[None, :, :]
    summ = S1[:, None, :] + S2[None, :, :]
    D = np.minimum(np.linalg.norm(diff, axis=2), np.linalg.norm(summ, axis=2))
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def check_schedule(schedule, bound=10.0):
    """Admissibility of a renormalization schedule (mu down to 0, products bounded)."""
    lams = np.array([s[0] for s in schedule], dtype=float)
    mus = np.array([s[1] for s in schedule], dtype=float)
    if np.any(lams <= 0) or np.any(mus <= 0):
        raise ScheduleError("Cartan parameters must be positive")
    if not np.all(np.diff(mus) < 0):
        raise ScheduleError("mu_k must decrease toward 0")
    if np.max(lams * mus) > bound:
        raise ScheduleError("lambda_k * mu_k exceeds the declared bound")
    if np.max(mus / lams) > bound:
        raise ScheduleError("mu_k / lambda_k exceeds the declared bound")


def shares_vertex_edges(loop, crown, tol=1e-8):
    """True iff the crown's first three vertices sit consecutively in the loop."""
    if not loop.is_polygonal():
        return False
    V = loop.vertices
    Z = crown.vertices
    k = len(V)
    for i in range(k):
        if projectively_equal(V[i], Z[1], tol):
            before, after = V[(i - 1) % k], V[(i + 1) % k]
            pair_a = projectively_equal(before, Z[0], tol) and projectively_equal(after, Z[2], tol)
            pair_b = projectively_equal(before, Z[2], tol) and projectively_equal(after, Z[0], tol)
            if pair_a or pair_b:
                return True
    return False


def renormalization_experiment(space, loop, crown, schedule, bound=10.0):
    """Distances of a_k . loop to the crown along a Cartan schedule.

    The loop must share the two edges at the crown's second vertex; the
    schedule is rejected up front if it violates the admissibility
    conditions (mu decreasing toward zero, both products bounded).
    """
    check_schedule(schedule, bound)
    if not shares_vertex_edges(loop, crown):
        raise LoopValidationError("loop does not share the two crown edges at v2")
    spe = loop.samples_per_edge or DEFAULT_SAMPLES_PER_EDGE
    target = crown.loop(spe)
    out = []
    for lam, mu in schedule:
        a = cartan_element(space, crown.basis.z, lam, mu)
        out.append(loop_distance(cartan_orbit(a, loop), target))
    return out


# ----------------------------------------------------------------------
# Polygon builder (greedy vertex splitting, validated)
# ----------------------------------------------------------------------

def validate_polygon(space, vertices, tol=PAIR_TOL, samples_per_edge=16):
    """Full lightlike-polygon invariants; raises LoopValidationError on failure."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    k = len(V)
    if k < 4:
        raise LoopValidationError("a lightlike polygon has at least four vertices")
    for i in range(k):
        if signature_of_span(space, [V[i], V[(i + 1) % k]]) != (0, 0, 2):
            raise LoopValidationError(f"edge {i} is not a photon segment")
    for i in range(k):
        for j in range(i + 1, k):
            adjacent = (j - i == 1) or (i == 0 and j == k - 1)
            pij = pair(space, V[i], V[j])
            if pij > tol:
                raise LoopValidationError(f"lifts {i}, {j} are not coherent (pair > 0)")
            if not adjacent and signature_of_span(space, [V[i], V[j]]) != (1, 1, 0):
                raise LoopValidationError(f"vertices {i}, {j} are not transverse")
    loop = loop_from_polygon(space, V, samples_per_edge)
    report = validate_semi_positive(space, loop)
    if not report.ok:
        raise LoopValidationError(
            f"loop is not semi-positive ({len(report.bad_triples)} bad triples)"
        )
    return loop


def _isotropic_in_perp(space, constraints, near, jitter=0.0, rng=None):
    """Isotropic vector q-orthogonal to the constraints, close to ``near``.

    Works in the orthocomplement W of the constraints: project ``near`` into
    W, optionally jitter its negative and null parts, then rescale the
    positive part so the result is isotropic.  The null directions of a
    degenerate W (present when a constraint is isotropic) do not affect
    isotropy but control the pairings with the rest of a polygon, so the
    jitter must move them as well.
    """
    K = orthogonal_complement(space, np.atleast_2d(constraints))
    pos, negs, null = _signature_frame(space, K)
    if len(pos) != 1:
        raise GeometryError("constraint complement has no positive direction")
    p = pos[0]
    nv = K.T @ (K @ near)  # Euclidean projection of `near` into W
    alpha = pair(space, nv, p)
    m = sum((-pair(space, nv, mi)) * mi for mi in negs)
    nu = nv - alpha * p - m
    if jitter > 0.0:
        scale = np.sqrt(max(-q_form(space, m), 1e-30))
        coeffs = rng.normal(size=len(negs))
        m = m + jitter * scale * sum(c * mi for c, mi in zip(coeffs, negs))
        if null:
            coeffs = rng.normal(size=len(null))
            nu = nu + jitter * scale * sum(c * ni for c, ni in zip(coeffs, null))
    qm = q_form(space, m)
    if qm >= -1e-14:
        raise GeometryError("degenerate negative part while isotropizing")
    sign = 1.0 if alpha >= 0 else -1.0
    x = sign * np.sqrt(-qm) * p + m + nu
    return x / np.linalg.norm(x)


def _coherent_sign(space, cand, others, tol=1e-12):
    """Flip the lift of ``cand`` so all pairings with ``others`` are <= 0."""
    pr = [pair(space, cand, o) for o in others]
    if max(pr) > tol and min(pr) < -tol:
        raise LoopValidationError("mixed lift signs after split")
    return -cand if max(pr) > tol else cand


def split_vertex(space, vertices, index, scale, rng):
    """Replace vertex ``index`` by two nearby vertices on fresh photons.

    The left replacement lives in the orthocomplement of the left neighbor,
    jittered; the right replacement is then completed in the orthocomplement
    of the right neighbor and of the left replacement, so the two new
    vertices span a photon.
    """
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    k = len(V)
    a = V[(index - 1) % k]
    v = V[index]
    b = V[(index + 1) % k]
    others = [V[j] for j in range(k) if j != index]
    x = _isotropic_in_perp(space, [a], v, jitter=scale, rng=rng)
    x = _coherent_sign(space, x, others)
    y = _isotropic_in_perp(space, np.vstack([b, x]), v)
    y = _coherent_sign(space, y, others + [x])
    return np.vstack([V[:index], x, y, V[index + 1:]])


def build_polygon(space, num_vertices, seed=0, scale=0.25,
                  samples_per_edge=DEFAULT_SAMPLES_PER_EDGE, max_retries=40):
    """Lightlike polygon with ``num_vertices`` vertices, grown from a crown.

    Vertices 0..2 of the standard crown are kept fixed; the vertex at slot 3
    is split repeatedly.  Every candidate polygon is validated in full, and
    each failure retries with a smaller perturbation.
    """
    if num_vertices < 4:
        raise GeometryError("polygons have at least 4 vertices")
    rng = np.random.default_rng(seed)
    base = standard_crown(space).vertices
    V = base.copy()
    while len(V) < num_vertices:
        s = scale
        for _ in range(max_retries):
            try:
                cand = split_vertex(space, V, 3, s, rng)
                validate_polygon(space, cand)
                V = cand
                break
            except (GeometryError, np.linalg.LinAlgError):
                s *= 0.6
        else:
            raise LoopValidationError(
                f"could not grow a valid polygon past {len(V)} vertices"
            )
    return loop_from_polygon(space, V, samples_per_edge)


# ----------------------------------------------------------------------
# Fixture IO
# ----------------------------------------------------------------------

def loop_to_json(loop):
    if not loop.is_polygonal():
        raise GeometryError("only polygonal loops are serialized")
    return {
        "n": loop.space.n,
        "vertices": [[float(c) for c in v] for v in loop.vertices],
        "lift_signs": [1] * len(loop.vertices),
        "samples_per_edge": int(loop.samples_per_edge),
    }


def loop_from_json(data):
    space = QuadraticSpace(int(data["n"]))
    verts = np.asarray(data["vertices"], dtype=float)
    signs = np.asarray(data.get("lift_signs", [1] * len(verts)), dtype=float)
    verts = verts * signs[:, None]
    return loop_from_polygon(space, verts, int(data.get("samples_per_edge", DEFAULT_SAMPLES_PER_EDGE)))


def save_loop(loop, path):
    with open(path, "w") as fh:
        json.dump(loop_to_json(loop), fh, indent=1, sort_keys=True)


def load_loop(path):
    with open(path) as fh:
        return loop_from_json(json.load(fh))
