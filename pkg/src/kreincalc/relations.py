"""Linear relations on C^n as subspaces of C^n x C^n.

A relation is the column span of a stacked basis (X; Y); operators are the
special case where the graph is {(x; Mx)}.  Möbius matrices act on graphs by
the block map (x; y) -> (d x + c y; b x + a y) and on spectral points by
z -> (a z + b)/(c z + d), so composing matrices composes transforms and the
usual special cases (shift, inversion, resolvent) come out right.

The point at infinity is a first-class spectral point throughout; it is
modelled by the singleton ``INF``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotBoundedError, SingularMoebiusError, ValidationError
from .tolerances import CONTAINMENT_TOL, RANK_TOL, SUBSPACE_EQ_TOL


class _Infinity:
    """The point at infinity of the extended complex plane."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __hash__(self) -> int:
        return hash("extended-complex-infinity")

    def __eq__(self, other) -> bool:
        return isinstance(other, _Infinity)

    def conjugate(self) -> "_Infinity":
        return self


INF = _Infinity()

#: A spectral point: a finite complex number or INF.
Point = "complex | _Infinity"


def is_inf(p) -> bool:
    return isinstance(p, _Infinity)


def as_point(p):
    """Normalize to a Point; non-finite floats map to INF."""
    if is_inf(p):
        return INF
    z = complex(p)
    if math.isinf(z.real) or math.isinf(z.imag):
        return INF
    if math.isnan(z.real) or math.isnan(z.imag):
        raise ValidationError("NaN is not a spectral point")
    return z


def conj_point(p):
    return INF if is_inf(p) else complex(p).conjugate()


def chordal_distance(p, q) -> float:
    """Metric on the extended plane: |p-q| / sqrt((1+|p|^2)(1+|q|^2))."""
    p, q = as_point(p), as_point(q)
    if is_inf(p) and is_inf(q):
        return 0.0
    if is_inf(p):
        return 1.0 / math.sqrt(1.0 + abs(q) ** 2)
    if is_inf(q):
        return 1.0 / math.sqrt(1.0 + abs(p) ** 2)
    return abs(p - q) / math.sqrt((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2))


def point_sort_key(p):
    """Deterministic ordering: finite points by (re, im), infinity last."""
    if is_inf(p):
        return (1, 0.0, 0.0)
    z = complex(p)
    return (0, z.real, z.imag)


# -- numerical subspace primitives ----------------------------------------


def _sv_cutoff(s: np.ndarray, rank_tol: float) -> float:
    top = float(s[0]) if s.size else 0.0
    return rank_tol * max(top, 1.0)


def orthonormal_columns(mat: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column span, rank decided by singular values."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2:
        raise ValidationError("expected a matrix of column vectors")
    n, k = mat.shape
    if k == 0:
        return np.zeros((n, 0), dtype=complex)
    u, s, _ = scipy.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > _sv_cutoff(s, rank_tol)))
    return u[:, :rank]


def null_space(mat: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the kernel, same rank rule as orthonormal_columns."""
    mat = np.asarray(mat, dtype=complex)
    n, k = mat.shape
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 0:
        return np.eye(k, dtype=complex)
    _, s, vh = scipy.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(s > _sv_cutoff(s, rank_tol)))
    return vh[rank:, :].conj().T


class Subspace:
    """Subspace of C^n held as an orthonormal column basis."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, basis: np.ndarray, ambient_dim: int | None = None):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim != 2:
            raise ValidationError("subspace basis must be a matrix")
        self.ambient_dim = basis.shape[0] if ambient_dim is None else int(ambient_dim)
        if basis.shape[0] != self.ambient_dim:
            raise ValidationError("basis rows do not match the ambient dimension")
        self.basis = basis

    @classmethod
    def from_spanning(cls, vectors, ambient_dim: int | None = None, rank_tol: float = RANK_TOL) -> "Subspace":
        mat = np.asarray(vectors, dtype=complex)
        if mat.ndim == 1:
            mat = mat.reshape(-1, 1)
        return cls(orthonormal_columns(mat, rank_tol), ambient_dim if ambient_dim is not None else mat.shape[0])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex), n)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex), n)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def complement(self) -> "Subspace":
        return Subspace(null_space(self.basis.conj().T), self.ambient_dim)

    def contains_vector(self, v, tol: float = CONTAINMENT_TOL) -> bool:
        v = np.asarray(v, dtype=complex).ravel()
        resid = v - self.basis @ (self.basis.conj().T @ v)
        return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(v)))

    def contains(self, other: "Subspace", tol: float = CONTAINMENT_TOL) -> bool:
        if other.dim == 0:
            return True
        resid = other.basis - self.basis @ (self.basis.conj().T @ other.basis)
        return float(np.linalg.norm(resid)) <= tol * max(1.0, math.sqrt(other.dim))

    def same_as(self, other: "Subspace", tol: float = SUBSPACE_EQ_TOL) -> bool:
        if self.ambient_dim != other.ambient_dim:
            return False
        return float(np.linalg.norm(self.projector() - other.projector())) <= tol

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValidationError("subspace sum needs a common ambient space")
        return Subspace.from_spanning(np.hstack([self.basis, other.basis]), self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValidationError("subspace intersection needs a common ambient space")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        coeffs = null_space(np.hstack([self.basis, -other.basis]))
        vecs = self.basis @ coeffs[: self.dim, :]
        return Subspace.from_spanning(vecs, self.ambient_dim)

    def image(self, mat: np.ndarray) -> "Subspace":
        mat = np.asarray(mat, dtype=complex)
        if mat.shape[1] != self.ambient_dim:
            raise ValidationError("matrix does not act on this space")
        return Subspace.from_spanning(mat @ self.basis, mat.shape[0])

    def preimage(self, mat: np.ndarray) -> "Subspace":
        """{v : mat v in self}, the kernel of (I - P) mat."""
        mat = np.asarray(mat, dtype=complex)
        if mat.shape[0] != self.ambient_dim:
            raise ValidationError("matrix does not map into this space")
        resid = mat - self.basis @ (self.basis.conj().T @ mat)
        return Subspace(null_space(resid), mat.shape[1])

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient_dim}, dim={self.dim})"


# -- Möbius matrices -------------------------------------------------------


@dataclass(frozen=True)
class MoebiusMap:
    """2x2 matrix [[a, b], [c, d]] acting as z -> (a z + b)/(c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def is_regular(self, tol: float = 1e-12) -> bool:
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d), 1.0)
        return abs(self.det()) > tol * scale * scale

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def compose(self, inner: "MoebiusMap") -> "MoebiusMap":
        """The map applying ``inner`` first; matrix product self @ inner."""
        m = self.matrix() @ inner.matrix()
        return MoebiusMap(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def inverse(self) -> "MoebiusMap":
        if not self.is_regular():
            raise SingularMoebiusError("cannot invert a singular Möbius matrix")
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        z = as_point(z)
        if is_inf(z):
            if self.c == 0:
                return INF
            return complex(self.a / self.c)
        den = self.c * z + self.d
        num = self.a * z + self.b
        if abs(den) == 0.0:
            return INF
        return complex(num / den)

    def block_map(self, n: int) -> np.ndarray:
        """Action on stacked graph vectors: (x; y) -> (d x + c y; b x + a y)."""
        eye = np.eye(n, dtype=complex)
        return np.block([[self.d * eye, self.c * eye], [self.b * eye, self.a * eye]])

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def inversion(cls) -> "MoebiusMap":
        return cls(0.0, 1.0, 1.0, 0.0)

    @classmethod
    def affine(cls, scale: complex, shift: complex) -> "MoebiusMap":
        """z -> scale * z + shift."""
        return cls(scale, shift, 0.0, 1.0)

    @classmethod
    def resolvent_map(cls, lam: complex) -> "MoebiusMap":
        """z -> 1 / (z - lam)."""
        return cls(0.0, 1.0, 1.0, -lam)

    @classmethod
    def cayley(cls, mu: complex) -> "MoebiusMap":
        """z -> (z - mu)/(z - conj mu); sends mu to 0 and conj mu to infinity."""
        mu = complex(mu)
        return cls(1.0, -mu, 1.0, -mu.conjugate())


# -- linear relations ------------------------------------------------------


class LinearRelation:
    """A linear relation on C^n: a subspace of C^n x C^n."""

    __slots__ = ("space_dim", "graph")

    def __init__(self, space_dim: int, graph: Subspace):
        space_dim = int(space_dim)
        if graph.ambient_dim != 2 * space_dim:
            raise ValidationError("graph must live in the doubled space")
        self.space_dim = space_dim
        self.graph = graph

    @classmethod
    def from_operator(cls, mat: np.ndarray) -> "LinearRelation":
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError("operator matrix must be square")
        n = mat.shape[0]
        stacked = np.vstack([np.eye(n, dtype=complex), mat])
        return cls(n, Subspace.from_spanning(stacked, 2 * n))

    @classmethod
    def from_graph_columns(cls, x: np.ndarray, y: np.ndarray, rank_tol: float = RANK_TOL) -> "LinearRelation":
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        if x.shape != y.shape or x.ndim != 2:
            raise ValidationError("graph columns need matching n x k shapes")
        return cls(x.shape[0], Subspace.from_spanning(np.vstack([x, y]), 2 * x.shape[0], rank_tol))

    @classmethod
    def zero_relation(cls, n: int) -> "LinearRelation":
        return cls(n, Subspace.zero(2 * n))

    def graph_columns(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.space_dim
        return self.graph.basis[:n, :], self.graph.basis[n:, :]

    @property
    def dim(self) -> int:
        return self.graph.dim

    @property
    def is_proper(self) -> bool:
        """Graph dimension equals the space dimension."""
        return self.dim == self.space_dim

    def dom(self) -> Subspace:
        x, _ = self.graph_columns()
        return Subspace.from_spanning(x, self.space_dim)

    def ran(self) -> Subspace:
        _, y = self.graph_columns()
        return Subspace.from_spanning(y, self.space_dim)

    def kernel(self, lam) -> Subspace:
        """ker(A - lam) = {x : (x; lam x) in A}; lam = INF gives mul A."""
        lam = as_point(lam)
        n = self.space_dim
        eye = np.eye(n, dtype=complex)
        if is_inf(lam):
            stack = np.vstack([np.zeros((n, n), dtype=complex), eye])
        else:
            stack = np.vstack([eye, lam * eye])
        pre = self.graph.preimage(stack)
        return Subspace(pre.basis, n)

    def mul(self) -> Subspace:
        return self.kernel(INF)

    def is_operator(self) -> bool:
        return self.mul().dim == 0

    def moebius(self, moebius: MoebiusMap) -> "LinearRelation":
        block = moebius.block_map(self.space_dim)
        return LinearRelation(self.space_dim, self.graph.image(block))

    def inverse(self) -> "LinearRelation":
        return self.moebius(MoebiusMap.inversion())

    def shift(self, lam: complex) -> "LinearRelation":
        """A - lam."""
        return self.moebius(MoebiusMap.affine(1.0, -complex(lam)))

    def scaled(self, mu: complex) -> "LinearRelation":
        """mu * A."""
        return self.moebius(MoebiusMap.affine(complex(mu), 0.0))

    def operator_matrix(self, rank_tol: float = RANK_TOL) -> np.ndarray:
        """Matrix of an everywhere-defined single-valued relation."""
        n = self.space_dim
        if self.dim != n:
            raise NotBoundedError("graph dimension does not match the space")
        if n == 0:
            return np.zeros((0, 0), dtype=complex)
        x, y = self.graph_columns()
        u, s, vh = scipy.linalg.svd(x)
        if s.size == 0 or s[-1] <= _sv_cutoff(s, rank_tol):
            raise NotBoundedError("relation is not an everywhere-defined operator")
        return y @ (vh.conj().T @ np.diag(1.0 / s) @ u.conj().T)

    def boxplus(self, other: "LinearRelation") -> "LinearRelation":
        """Linear span of the two graphs inside the doubled space."""
        if other.space_dim != self.space_dim:
            raise ValidationError("relations live on different spaces")
        return LinearRelation(self.space_dim, self.graph.sum(other.graph))

    def operator_sum(self, other: "LinearRelation") -> "LinearRelation":
        """{(x; y1 + y2) : (x; y1) in self, (x; y2) in other}."""
        if other.space_dim != self.space_dim:
            raise ValidationError("relations live on different spaces")
        x1, y1 = self.graph_columns()
        x2, y2 = other.graph_columns()
        k1 = x1.shape[1]
        coeffs = null_space(np.hstack([x1, -x2]))
        c1, c2 = coeffs[:k1, :], coeffs[k1:, :]
        return LinearRelation.from_graph_columns(x1 @ c1, y1 @ c1 + y2 @ c2)

    def compose(self, other: "LinearRelation") -> "LinearRelation":
        """self after other: {(x; z) : (x; y) in other, (y; z) in self}."""
        if other.space_dim != self.space_dim:
            raise ValidationError("relations live on different spaces")
        x1, y1 = self.graph_columns()
        x2, y2 = other.graph_columns()
        k2 = x2.shape[1]
        coeffs = null_space(np.hstack([y2, -x1]))
        c2, c1 = coeffs[:k2, :], coeffs[k2:, :]
        return LinearRelation.from_graph_columns(x2 @ c2, y1 @ c1)

    def adjoint(self, gram: np.ndarray) -> "LinearRelation":
        """Adjoint with respect to [x, y] = y* G x on the space.

        Computed as the inner-product orthogonal complement of the graph in
        the doubled space followed by the flip (x; y) -> (y; -x).
        """
        n = self.space_dim
        gram = np.asarray(gram, dtype=complex)
        if gram.shape != (n, n):
            raise ValidationError("Gram matrix does not match the space")
        big = np.block(
            [
                [gram, np.zeros((n, n), dtype=complex)],
                [np.zeros((n, n), dtype=complex), gram],
            ]
        )
        comp = null_space((big @ self.graph.basis).conj().T)
        flipped = np.vstack([comp[n:, :], -comp[:n, :]])
        return LinearRelation(n, Subspace.from_spanning(flipped, 2 * n))

    def contains(self, other: "LinearRelation", tol: float = CONTAINMENT_TOL) -> bool:
        return self.graph.contains(other.graph, tol)

    def same_as(self, other: "LinearRelation", tol: float = SUBSPACE_EQ_TOL) -> bool:
        return self.space_dim == other.space_dim and self.graph.same_as(other.graph, tol)

    def __repr__(self) -> str:
        return f"LinearRelation(n={self.space_dim}, graph_dim={self.dim})"


def diagonal_image(mat: np.ndarray, rel: LinearRelation) -> LinearRelation:
    """(T x T)(B) = {(T u; T v) : (u; v) in B}; T may change the dimension."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape[1] != rel.space_dim:
        raise ValidationError("matrix does not act on the relation's space")
    x, y = rel.graph_columns()
    return LinearRelation.from_graph_columns(mat @ x, mat @ y)


def diagonal_preimage(mat: np.ndarray, rel: LinearRelation) -> LinearRelation:
    """(T x T)^{-1}(A) = {(u; v) : (T u; T v) in A}."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape[0] != rel.space_dim:
        raise ValidationError("matrix does not map into the relation's space")
    m = mat.shape[1]
    block = np.block(
        [
            [mat, np.zeros_like(mat)],
            [np.zeros_like(mat), mat],
        ]
    )
    pre = rel.graph.preimage(block)
    return LinearRelation(m, Subspace(pre.basis, 2 * m))
