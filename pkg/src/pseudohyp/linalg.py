"""Linear algebra over a fixed real quadratic space of signature (2, n+1).

Everything in the toolkit lives in coordinates on E = R^(n+3).  Two
coordinate expressions of the form are supported:

* ``HYPERBOLIC``:  q(x) = -x1*x3 - x2*x4 - sum_{i>=5} xi^2.  The first four
  coordinate directions are isotropic and pair in the (1,3)/(2,4) pattern;
  this is the chart in which Cartan elements are diagonal.
* ``ORTHONORMAL``: q = diag(+1, +1, -1, ..., -1), convenient for building
  warped-product splittings.

Vectors are plain float64 ndarrays of length n+3; group elements are
(n+3)x(n+3) ndarrays.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.linalg import expm, null_space

from .errors import DimensionMismatch, GeometryError

#: absolute eigenvalue tolerance for signature counting on unit-normalized Grams
SIGNATURE_TOL = 1e-9

#: default ambient parameter (E has dimension n+3); Prop-level experiments need n >= 2
DEFAULT_N = 2


class BasisKind(Enum):
    HYPERBOLIC = "hyperbolic"
    ORTHONORMAL = "orthonormal"


@dataclass(frozen=True)
class QuadraticSpace:
    """The quadratic space (E, q) with a fixed coordinate expression of q."""

    n: int = DEFAULT_N
    basis_kind: BasisKind = BasisKind.HYPERBOLIC

    def __post_init__(self):
        if not (1 <= self.n <= 8):
            raise GeometryError(f"n must be in 1..8, got {self.n}")

    @property
    def dim(self):
        return self.n + 3

    @cached_property
    def form_matrix(self):
        """Symmetric matrix B of the polar form, pair(x, y) = x @ B @ y."""
        d = self.dim
        B = np.zeros((d, d))
        if self.basis_kind is BasisKind.HYPERBOLIC:
            B[0, 2] = B[2, 0] = -0.5
            B[1, 3] = B[3, 1] = -0.5
            for i in range(4, d):
                B[i, i] = -1.0
        else:
            B[0, 0] = B[1, 1] = 1.0
            for i in range(2, d):
                B[i, i] = -1.0
        B.setflags(write=False)
        return B

    def check_vector(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected vector of dimension {self.dim}, got shape {x.shape}"
            )
        return x

    def basis_vector(self, i):
        """Coordinate vector e_i (1-based, following the chart labels)."""
        e = np.zeros(self.dim)
        e[i - 1] = 1.0
        return e


def q_form(space, x):
    """Evaluate q(x)."""
    x = space.check_vector(x)
    return float(x @ space.form_matrix @ x)


def pair(space, x, y):
    """Polar form of q: pair(x, y) = (q(x+y) - q(x) - q(y)) / 2, computed directly."""
    x = space.check_vector(x)
    y = space.check_vector(y)
    return float(x @ space.form_matrix @ y)


def gram(space, vectors):
    """Gram matrix of pairings of a family of vectors (rows)."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.shape[1] != space.dim:
        raise DimensionMismatch(
            f"expected vectors of dimension {space.dim}, got {V.shape[1]}"
        )
    return V @ space.form_matrix @ V.T


def signature_of_span(space, vectors, tol=None):
    """Signature (pos, neg, null) of the family of vectors.

    Eigenvalues of the Gram of unit-Euclidean-normalized vectors are counted
    against an absolute tolerance; degenerate spans show up in the null count,
    so pos + neg + null equals the number of vectors.
    """
    if tol is None:
        tol = SIGNATURE_TOL
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.shape[0] == 0:
        raise GeometryError("signature_of_span needs a nonempty family")
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0.0):
        raise GeometryError("signature_of_span got a zero vector")
    G = gram(space, V / norms[:, None])
    eig = np.linalg.eigvalsh(G)
    pos = int(np.sum(eig > tol))
    neg = int(np.sum(eig < -tol))
    return pos, neg, len(eig) - pos - neg


def q_preservation_residual(space, M):
    """max |M^T B M - B| over entries; zero iff M is in O(q)."""
    M = np.asarray(M, dtype=float)
    if M.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"expected {space.dim}x{space.dim} matrix")
    B = space.form_matrix
    return float(np.max(np.abs(M.T @ B @ M - B)))


def is_isometry(space, M, tol=1e-10):
    return q_preservation_residual(space, M) <= tol


def orthogonal_complement(space, vectors):
    """Euclidean-orthonormal basis (rows) of the q-orthocomplement of a span."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    C = V @ space.form_matrix
    K = null_space(C)
    return K.T


def random_isometry(space, rng, scale=0.5):
    """Random element of O(q), as exp(B^{-1} A) with A antisymmetric.

    Large generator scales degrade the q-preservation residual through the
    matrix exponential; the default keeps it near machine precision.
    """
    d = space.dim
    A = rng.normal(size=(d, d), scale=scale)
    A = A - A.T
    X = np.linalg.solve(space.form_matrix, A)
    return expm(X)


@dataclass(frozen=True, eq=False)
class CartanElement:
    """Element a(lambda, mu) of the Cartan subgroup attached to a hyperbolic basis.

    In the basis (z1, z2, z3, z4, complement) it acts as
    diag(lambda, mu, 1/lambda, 1/mu, identity).
    """

    space: QuadraticSpace
    lam: float
    mu: float
    frame: np.ndarray  # columns: z1..z4 then a basis of the orthocomplement

    def __post_init__(self):
        if self.lam <= 0 or self.mu <= 0:
            raise GeometryError("Cartan parameters must be positive")

    @cached_property
    def matrix(self):
        d = self.space.dim
        diag = np.ones(d)
        diag[0], diag[1] = self.lam, self.mu
        diag[2], diag[3] = 1.0 / self.lam, 1.0 / self.mu
        F = self.frame
        return F @ np.diag(diag) @ np.linalg.inv(F)

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T

    def compose(self, other):
        if other.frame is not self.frame and not np.array_equal(other.frame, self.frame):
            raise GeometryError("can only compose Cartan elements in the same frame")
        return CartanElement(self.space, self.lam * other.lam, self.mu * other.mu, self.frame)

    def inverse(self):
        return CartanElement(self.space, 1.0 / self.lam, 1.0 / self.mu, self.frame)


def cartan_frame(space, z1, z2, z3, z4):
    """Column frame (z1..z4, orthocomplement basis) in which Cartan elements act."""
    Z = np.vstack([space.check_vector(z) for z in (z1, z2, z3, z4)])
    K = orthogonal_complement(space, Z)
    if K.shape[0] != space.dim - 4:
        raise GeometryError("z1..z4 do not span a 4-dimensional subspace")
    F = np.vstack([Z, K]).T
    F.setflags(write=False)
    return F


def cartan_element(space, basis, lam, mu):
    """a(lambda, mu) for a hyperbolic quadruple ``basis`` (sequence of 4 vectors)."""
    frame = basis if isinstance(basis, np.ndarray) and basis.ndim == 2 and basis.shape[0] == space.dim \
        else cartan_frame(space, *basis)
    return CartanElement(space, float(lam), float(mu), frame)
