"""Krein-space structure: definitizability, Gram factorization, transforms.

A Krein space here is C^n with an invertible Hermitian Gram matrix G and
inner product [x, y] = y* G x.  A self-adjoint relation A is definitizable
when some rational q with poles in the resolvent set makes [q(A)x, x] >= 0;
the Hermitian positive semidefinite matrix H = G q(A) then factors through a
Hilbert space C^r, and pulling A back along the factor T gives a genuinely
self-adjoint relation there whose spectral measure drives the calculus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    InconsistencyError,
    InvarianceError,
    NotBoundedError,
    NotInCommutantError,
    NotInResolventSetError,
    NotPositiveError,
    NotRealError,
    NotSelfAdjointError,
    PoleMeetsSpectrumError,
    PreconditionError,
    ValidationError,
)
from .rational import RationalFunction
from .relations import (
    INF,
    LinearRelation,
    MoebiusMap,
    Subspace,
    as_point,
    diagonal_image,
    diagonal_preimage,
    is_inf,
    point_sort_key,
)
from .spectral import SpectrumReport, rational_apply, resolvent_at, spectrum
from .tolerances import (
    COMMUTANT_TOL,
    HERMITIAN_TOL,
    POINT_MATCH_TOL,
    PSD_CUTOFF,
    PSD_TOL,
    RANK_TOL,
    REALNESS_TOL,
    SPECTRUM_CLUSTER_TOL,
)


class GramSpace:
    """C^n with an invertible Hermitian Gram matrix."""

    __slots__ = ("gram", "_abs_cache")

    def __init__(self, gram: np.ndarray):
        gram = np.asarray(gram, dtype=complex)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
            raise ValidationError("Gram matrix must be square")
        scale = max(float(np.linalg.norm(gram)), 1.0)
        if float(np.linalg.norm(gram - gram.conj().T)) > HERMITIAN_TOL * scale:
            raise ValidationError("Gram matrix must be Hermitian")
        gram = (gram + gram.conj().T) / 2.0
        if gram.shape[0] > 0:
            w = np.linalg.eigvalsh(gram)
            if float(np.min(np.abs(w))) <= RANK_TOL * max(1.0, float(np.max(np.abs(w)))):
                raise ValidationError("Gram matrix must be invertible")
        self.gram = gram
        self._abs_cache = None

    @classmethod
    def standard(cls, n: int) -> "GramSpace":
        return cls(np.eye(n, dtype=complex))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def inner(self, x, y) -> complex:
        """[x, y] = y* G x."""
        x = np.asarray(x, dtype=complex).ravel()
        y = np.asarray(y, dtype=complex).ravel()
        return complex(y.conj() @ (self.gram @ x))

    def adjoint_of(self, mat: np.ndarray) -> np.ndarray:
        """Adjoint of an operator matrix: G^{-1} B* G."""
        mat = np.asarray(mat, dtype=complex)
        return np.linalg.solve(self.gram, mat.conj().T @ self.gram)

    def is_self_adjoint(self, mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
        mat = np.asarray(mat, dtype=complex)
        scale = max(1.0, float(np.linalg.norm(mat)))
        return float(np.linalg.norm(mat - self.adjoint_of(mat))) <= tol * scale

    def is_positive(self, mat: np.ndarray, tol: float = PSD_TOL) -> bool:
        """[Bx, x] >= 0 for all x, i.e. G B is Hermitian positive semidefinite."""
        h = self.gram @ np.asarray(mat, dtype=complex)
        scale = float(np.linalg.norm(h))
        if float(np.linalg.norm(h - h.conj().T)) > tol * max(1.0, scale):
            return False
        if h.shape[0] == 0:
            return True
        w = np.linalg.eigvalsh((h + h.conj().T) / 2.0)
        # floor the scale so a numerically vanishing matrix counts as psd
        return bool(np.min(w) >= -tol * max(scale, 1.0))

    def _abs_parts(self):
        if self._abs_cache is None:
            w, u = np.linalg.eigh(self.gram)
            sq = u @ np.diag(np.sqrt(np.abs(w))) @ u.conj().T
            isq = u @ np.diag(1.0 / np.sqrt(np.abs(w))) @ u.conj().T
            self._abs_cache = (sq, isq)
        return self._abs_cache

    def hilbert_norm(self, mat: np.ndarray) -> float:
        """Operator norm w.r.t. the compatible product (x, y) = y* |G| x."""
        sq, isq = self._abs_parts()
        return float(np.linalg.norm(sq @ np.asarray(mat, dtype=complex) @ isq, 2))

    def hilbert_vector_norm(self, x) -> float:
        sq, _ = self._abs_parts()
        return float(np.linalg.norm(sq @ np.asarray(x, dtype=complex).ravel()))


def map_adjoint(mat: np.ndarray, domain: GramSpace, codomain: GramSpace) -> np.ndarray:
    """Adjoint of T: domain -> codomain, i.e. G_dom^{-1} T* G_cod."""
    mat = np.asarray(mat, dtype=complex)
    return np.linalg.solve(domain.gram, mat.conj().T @ codomain.gram)


@dataclass(frozen=True, eq=False)
class DefinitizablePair:
    """A self-adjoint relation together with a verified definitizing function."""

    space: GramSpace
    relation: LinearRelation
    q: RationalFunction
    q_matrix: np.ndarray
    report: SpectrumReport
    points: tuple[object, ...]
    degrees: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def critical_points(self) -> tuple[object, ...]:
        return tuple(w for w in self.points if self.degrees[w] > 0)

    def degree_of(self, w) -> int:
        return self.degrees[self.resolve(w)]

    def jet_length(self, w) -> int:
        return self.degree_of(w) + 1

    def resolve(self, z, tol: float = POINT_MATCH_TOL):
        """Match z against the canonical spectral points."""
        z = as_point(z)
        if is_inf(z):
            for w in self.points:
                if is_inf(w):
                    return w
            raise ValidationError("infinity is not a spectral point of this pair")
        best, dist = None, np.inf
        for w in self.points:
            if not is_inf(w):
                d = abs(complex(w) - z)
                if d < dist:
                    best, dist = w, d
        if best is None or dist > tol:
            raise ValidationError(f"{z} does not match any spectral point")
        return best


def symmetrize_definitizing(q: RationalFunction) -> RationalFunction:
    """q + q^#, a real rational function; doubles q when q is already real."""
    return q + q.sharp()


def verify_definitizing(
    space: GramSpace,
    rel: LinearRelation,
    q: RationalFunction,
    psd_tol: float = PSD_TOL,
) -> DefinitizablePair:
    """Check all definitizability requirements and assemble the pair.

    Raises the specific precondition error on failure; a violation of the
    proved spectral inclusion (with all preconditions passing) is reported as
    an inconsistency.
    """
    if space.dim != rel.space_dim:
        raise ValidationError("relation and Gram space dimensions differ")
    if q.is_zero:
        raise ValidationError("the zero function cannot serve as q")
    if not q.is_real(REALNESS_TOL):
        raise NotRealError("q must be a real rational function")
    report = spectrum(rel)
    if report.is_full_sphere:
        raise PreconditionError("relation has empty resolvent set")
    adj = rel.adjoint(space.gram)
    if not adj.same_as(rel):
        raise NotSelfAdjointError("relation is not self-adjoint in this Krein space")
    q_matrix = rational_apply(q, rel, report)  # raises when a pole meets the spectrum
    if not space.is_positive(q_matrix, psd_tol):
        raise NotPositiveError("[q(A)x, x] takes negative values")
    degrees: dict = {}
    for w, _ in report.points:
        d = q.zero_degree_at(w)
        if not is_inf(w) and abs(complex(w).imag) > 1e-8 * max(1.0, abs(complex(w))) and d == 0:
            raise InconsistencyError(
                f"spectral point {w} is neither real nor a zero of q; the "
                "definitizability conclusion fails, input tolerances are suspect"
            )
        degrees[w] = d
    crit = [w for w, _ in report.points if degrees[w] > 0 and not is_inf(w)]
    for w in crit:
        if all(abs(complex(w).conjugate() - complex(v)) > POINT_MATCH_TOL for v in crit):
            raise InconsistencyError(
                "critical spectrum is not symmetric under conjugation"
            )
    hermitian_part = space.gram @ q_matrix
    diagnostics = {
        "self_adjoint_residual": float(np.linalg.norm(rel.graph.projector() - adj.graph.projector())),
        "hermitian_residual": float(np.linalg.norm(hermitian_part - hermitian_part.conj().T)),
    }
    return DefinitizablePair(
        space=space,
        relation=rel,
        q=q,
        q_matrix=q_matrix,
        report=report,
        points=tuple(w for w, _ in report.points),
        degrees=degrees,
        diagnostics=diagnostics,
    )


def derive_definitizing(pair: DefinitizablePair, r: RationalFunction) -> bool:
    """Does r also definitize the pair's relation?

    True iff every critical point of the pair is a zero of r of at least the
    multiplicity it has for q, and r/q is nonnegative on the real spectrum
    (including infinity when present).
    """
    if r.is_zero:
        return False
    for pole, _ in r.poles():
        if pair.report.contains(pole):
            raise PoleMeetsSpectrumError(f"pole {pole} of r meets the spectrum")
    for w in pair.points:
        d = pair.degrees[w]
        if d > 0 and r.zero_degree_at(w) < d:
            return False
    for w in pair.points:
        if not is_inf(w) and abs(complex(w).imag) > 1e-8 * max(1.0, abs(complex(w))):
            continue  # nonreal critical points carry no positivity constraint
        d = pair.degrees[w]
        r_jet = r.jet_at(w, d)
        q_jet = pair.q.jet_at(w, d)
        value = complex(r_jet[d] / q_jet[d])
        if abs(value.imag) > 1e-8 * max(1.0, abs(value)) or value.real < -1e-8 * max(1.0, abs(value)):
            return False
    return True


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Atoms (point, orthogonal projector) of a self-adjoint relation on C^r."""

    dim: int
    atoms: tuple[tuple[object, np.ndarray], ...]

    def projector_at(self, z, tol: float = POINT_MATCH_TOL) -> np.ndarray:
        z = as_point(z)
        for p, proj in self.atoms:
            if (is_inf(p) and is_inf(z)) or (
                not is_inf(p) and not is_inf(z) and abs(complex(p) - z) <= tol
            ):
                return proj
        return np.zeros((self.dim, self.dim), dtype=complex)

    def integrate(self, values: dict) -> np.ndarray:
        """Sum of values[point] * projector over all atoms (including infinity)."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for p, proj in self.atoms:
            out += complex(values[p]) * proj
        return out

    def total(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for _, proj in self.atoms:
            out += proj
        return out


def spectral_measure(rel: LinearRelation) -> SpectralMeasure:
    """Eigen-decomposition of a self-adjoint relation on standard C^r.

    The multivalued part contributes the atom at infinity; the operator part
    is the Hermitian compression to the (dense) domain.
    """
    r = rel.space_dim
    if r == 0:
        return SpectralMeasure(0, ())
    std = GramSpace.standard(r)
    if not rel.adjoint(std.gram).same_as(rel):
        raise NotSelfAdjointError("relation is not self-adjoint on the Hilbert space")
    mul = rel.mul()
    dom = rel.dom()
    if not dom.same_as(mul.complement()):
        raise InconsistencyError("domain is not the orthogonal complement of the multivalued part")
    atoms: list[tuple[object, np.ndarray]] = []
    k = dom.dim
    if k > 0:
        x, y = rel.graph_columns()
        coeff, *_ = np.linalg.lstsq(x, dom.basis, rcond=None)
        compressed = dom.basis.conj().T @ (y @ coeff)
        herm_resid = float(np.linalg.norm(compressed - compressed.conj().T))
        if herm_resid > 1e-8 * max(1.0, float(np.linalg.norm(compressed))):
            raise InconsistencyError("operator part failed to compress to a Hermitian matrix")
        compressed = (compressed + compressed.conj().T) / 2.0
        eigvals, eigvecs = np.linalg.eigh(compressed)
        groups: dict[int, list[int]] = {}
        centers: list[float] = []
        for i, lam in enumerate(eigvals):
            placed = False
            for gi, c in enumerate(centers):
                if abs(lam - c) <= SPECTRUM_CLUSTER_TOL * max(1.0, abs(c)):
                    groups[gi].append(i)
                    centers[gi] = float(np.mean([eigvals[j] for j in groups[gi]]))
                    placed = True
                    break
            if not placed:
                centers.append(float(lam))
                groups[len(centers) - 1] = [i]
        for gi, idx in groups.items():
            vecs = dom.basis @ eigvecs[:, idx]
            atoms.append((complex(centers[gi]), vecs @ vecs.conj().T))
    if mul.dim > 0:
        atoms.append((INF, mul.basis @ mul.basis.conj().T))
    atoms.sort(key=lambda t: point_sort_key(t[0]))
    measure = SpectralMeasure(r, tuple(atoms))
    if float(np.linalg.norm(measure.total() - np.eye(r))) > 1e-8 * max(1.0, float(np.sqrt(r))):
        raise InconsistencyError("spectral projectors do not sum to the identity")
    probe = 0.2131 + 1.3703j
    recon = np.zeros((r, r), dtype=complex)
    for p, proj in measure.atoms:
        if not is_inf(p):
            recon += proj / (complex(p) - probe)
    if float(np.linalg.norm(recon - resolvent_at(rel, probe))) > 1e-8 * max(1.0, float(np.linalg.norm(recon))):
        raise InconsistencyError("spectral measure does not reproduce the resolvent")
    return measure


@dataclass(frozen=True, eq=False)
class Factorization:
    """Gram factorization q(A) = T T^+ through a Hilbert space C^r."""

    pair: DefinitizablePair
    rank: int
    factor: np.ndarray          # T: C^r -> C^n
    factor_adjoint: np.ndarray  # T^+ = T* G: C^n -> C^r
    theta: LinearRelation       # A pulled back to C^r
    measure: SpectralMeasure
    diagnostics: dict = field(default_factory=dict)

    @property
    def gram_product(self) -> np.ndarray:
        """T T^+, equal to q(A)."""
        return self.factor @ self.factor_adjoint

    @property
    def factor_product(self) -> np.ndarray:
        """T^+ T on the factor space."""
        return self.factor_adjoint @ self.factor


def gram_factorize(pair: DefinitizablePair, psd_cutoff: float = PSD_CUTOFF) -> Factorization:
    """Factor q(A) = T T^+ and pull the relation back to the factor space.

    Eigenvalues of Hermitian(G q(A)) at or below psd_cutoff * ||H|| are
    discarded as zeros; the retained part determines the rank r, the factor
    T and its adjoint, and the pulled-back relation with its spectral
    measure.
    """
    g = pair.space.gram
    n = pair.space.dim
    h = g @ pair.q_matrix
    h = (h + h.conj().T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(h)
    scale = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    # floored scale: rounding noise in a numerically vanishing q(A) is not rank
    keep = eigvals > psd_cutoff * max(scale, 1.0)
    rank = int(np.sum(keep))
    roots = np.sqrt(eigvals[keep])
    u_plus = eigvecs[:, keep]
    factor_adjoint = np.diag(roots) @ u_plus.conj().T
    factor = np.linalg.solve(g, factor_adjoint.conj().T)
    resid_factor = float(np.linalg.norm(factor @ factor_adjoint - pair.q_matrix))
    if resid_factor > 1e-6 * max(1.0, float(np.linalg.norm(pair.q_matrix))):
        raise InconsistencyError("T T^+ failed to reproduce q(A)")
    if rank == 0:
        theta = LinearRelation(0, Subspace(np.zeros((0, 0), dtype=complex), 0))
        measure = SpectralMeasure(0, ())
    else:
        theta = diagonal_preimage(factor, pair.relation)
        if not theta.is_proper:
            raise InconsistencyError("pulled-back relation is not proper")
        measure = spectral_measure(theta)
    diagnostics = {
        "factor_residual": resid_factor,
        "psd_margin": float(np.min(eigvals[keep])) if rank else 0.0,
        "discarded_eigenvalue": float(np.max(np.abs(eigvals[~keep]))) if rank < n else 0.0,
    }
    return Factorization(
        pair=pair,
        rank=rank,
        factor=factor,
        factor_adjoint=factor_adjoint,
        theta=theta,
        measure=measure,
        diagnostics=diagnostics,
    )


def _check_commutes(a: np.ndarray, b: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.linalg.norm(a)) * float(np.linalg.norm(b)))
    if float(np.linalg.norm(a @ b - b @ a)) > COMMUTANT_TOL * scale:
        raise NotInCommutantError(what)


def theta_op(fact: Factorization, mat: np.ndarray) -> np.ndarray:
    """Transport an operator commuting with q(A) to the factor space.

    Realized as the pullback of its graph; the result satisfies
    T^+ C = theta(C) T^+.
    """
    mat = np.asarray(mat, dtype=complex)
    n = fact.pair.space.dim
    if mat.shape != (n, n):
        raise ValidationError("operator matrix has the wrong shape")
    _check_commutes(mat, fact.gram_product, "operator does not commute with q(A)")
    if fact.rank == 0:
        return np.zeros((0, 0), dtype=complex)
    pulled = diagonal_preimage(fact.factor, LinearRelation.from_operator(mat))
    try:
        out = pulled.operator_matrix()
    except NotBoundedError as exc:
        raise InconsistencyError("pullback of a commutant operator was not an operator") from exc
    resid = float(np.linalg.norm(fact.factor_adjoint @ mat - out @ fact.factor_adjoint))
    if resid > 1e-7 * max(1.0, float(np.linalg.norm(mat))):
        raise InconsistencyError("intertwining identity for the transported operator failed")
    return out


def theta_relation(fact: Factorization, rel: LinearRelation) -> LinearRelation:
    """Transport a relation invariant under conjugation by q(A)."""
    if rel.space_dim != fact.pair.space.dim:
        raise ValidationError("relation lives on the wrong space")
    if spectrum(rel).is_full_sphere:
        raise PreconditionError("relation has empty resolvent set")
    image = diagonal_image(fact.gram_product, rel)
    if not rel.contains(image):
        raise InvarianceError("(q(A) x q(A)) image of the relation is not contained in it")
    return diagonal_preimage(fact.factor, rel)


def xi(fact: Factorization, mat: np.ndarray) -> np.ndarray:
    """Map D on the factor space to T D T^+; requires D to commute with T^+ T."""
    mat = np.asarray(mat, dtype=complex)
    r = fact.rank
    if mat.shape != (r, r):
        raise ValidationError("factor-space operator has the wrong shape")
    _check_commutes(mat, fact.factor_product, "operator does not commute with T^+ T")
    return fact.factor @ mat @ fact.factor_adjoint


def cayley(space: GramSpace, rel: LinearRelation, mu: complex) -> LinearRelation:
    """Cayley transform z -> (z - mu)/(z - conj mu) of a self-adjoint relation."""
    mu = complex(mu)
    if abs(mu.imag) <= 1e-12 * max(1.0, abs(mu)):
        raise ValidationError("Cayley parameter must be nonreal")
    report = spectrum(rel)
    for point in (mu, mu.conjugate()):
        if report.is_full_sphere or report.distance_to(point) <= POINT_MATCH_TOL:
            raise NotInResolventSetError(f"{point} must lie in the resolvent set")
    if not rel.adjoint(space.gram).same_as(rel):
        raise NotSelfAdjointError("Cayley transform needs a self-adjoint relation")
    unitary = rel.moebius(MoebiusMap.cayley(mu))
    mat = unitary.operator_matrix()
    resid = float(np.linalg.norm(space.adjoint_of(mat) @ mat - np.eye(space.dim)))
    if resid > 1e-7 * max(1.0, float(np.linalg.norm(mat)) ** 2):
        raise InconsistencyError("Cayley transform failed to be unitary")
    return unitary
