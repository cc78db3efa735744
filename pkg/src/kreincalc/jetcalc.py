"""Jet-valued functions on the spectrum and the functional calculus.

At a spectral point w where the definitizing function q has a zero of degree
d, function values are truncated Taylor jets of length d + 1 (scalars where
d = 0), multiplied by truncated convolution.  Every such jet function phi
splits as phi = s + g * q along the spectrum with s rational and g scalar;
the calculus evaluates phi on the relation as

    phi(A) = s(A) + T (sum of g at the measure's atoms) T^+

using the Gram factorization q(A) = T T^+.  The result does not depend on
the choice of decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InconsistencyError,
    JetNotInvertibleError,
    NotBoundedError,
    PointNotInSpectrumError,
    PoleMeetsSpectrumError,
    ValidationError,
)
from .krein import DefinitizablePair, Factorization
from .rational import Polynomial, RationalFunction
from .relations import INF, as_point, conj_point, is_inf, point_sort_key
from .spectral import rational_apply
from .tolerances import JET_INVERT_TOL, POINT_MATCH_TOL

# -- jet arithmetic ---------------------------------------------------------


def jet_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated convolution; both jets must have the same length."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValidationError("jet lengths differ")
    return np.convolve(a, b)[: a.size]


def jet_invert(a: np.ndarray, tol: float = JET_INVERT_TOL) -> np.ndarray:
    """Convolution inverse; exists iff the leading entry is nonzero."""
    a = np.asarray(a, dtype=complex).ravel()
    scale = max(1.0, float(np.max(np.abs(a))))
    if abs(a[0]) <= tol * scale:
        raise JetNotInvertibleError("jet has (numerically) vanishing leading entry")
    out = np.zeros(a.size, dtype=complex)
    out[0] = 1.0 / a[0]
    for j in range(1, a.size):
        out[j] = -sum(out[k] * a[j - k] for k in range(j)) / a[0]
    return out


def jet_one(length: int) -> np.ndarray:
    out = np.zeros(length, dtype=complex)
    out[0] = 1.0
    return out


class JetFunction:
    """A map from the spectral points of a pair to jets of the right lengths."""

    __slots__ = ("pair", "values")

    def __init__(self, pair: DefinitizablePair, values: dict):
        self.pair = pair
        cleaned: dict = {}
        for w in pair.points:
            if w not in values:
                raise ValidationError(f"missing value at spectral point {w}")
            v = np.asarray(values[w], dtype=complex).ravel()
            if v.size != pair.degrees[w] + 1:
                raise ValidationError(
                    f"jet at {w} must have length {pair.degrees[w] + 1}, got {v.size}"
                )
            cleaned[w] = v
        self.values = cleaned

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, pair: DefinitizablePair) -> "JetFunction":
        return cls(pair, {w: np.zeros(pair.degrees[w] + 1, dtype=complex) for w in pair.points})

    @classmethod
    def one(cls, pair: DefinitizablePair) -> "JetFunction":
        return cls(pair, {w: jet_one(pair.degrees[w] + 1) for w in pair.points})

    @classmethod
    def from_points(cls, pair: DefinitizablePair, mapping: dict) -> "JetFunction":
        """Build from user-labelled points, matched against the spectrum."""
        values: dict = {}
        for label, entries in mapping.items():
            values[pair.resolve(label)] = entries
        return cls(pair, values)

    # -- algebra -------------------------------------------------------------

    def _binary(self, other: "JetFunction", op) -> "JetFunction":
        if other.pair is not self.pair and other.pair.points != self.pair.points:
            raise ValidationError("jet functions live on different pairs")
        return JetFunction(self.pair, {w: op(self.values[w], other.values[w]) for w in self.pair.points})

    def __add__(self, other: "JetFunction") -> "JetFunction":
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other: "JetFunction") -> "JetFunction":
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other) -> "JetFunction":
        if isinstance(other, JetFunction):
            return self._binary(other, jet_multiply)
        c = complex(other)
        return JetFunction(self.pair, {w: c * v for w, v in self.values.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "JetFunction":
        return self * (-1.0)

    def invert(self) -> "JetFunction":
        return JetFunction(self.pair, {w: jet_invert(v) for w, v in self.values.items()})

    def sharp(self) -> "JetFunction":
        """phi^#(w) = conj(phi(conj w)); the spectrum is conjugation symmetric."""
        values: dict = {}
        for w in self.pair.points:
            mate = self.pair.resolve(conj_point(w))
            values[w] = np.conj(self.values[mate])
        return JetFunction(self.pair, values)

    def pi1(self) -> dict:
        """First (scalar) component at every spectral point."""
        return {w: complex(v[0]) for w, v in self.values.items()}

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(v))) for v in self.values.values())

    def __repr__(self) -> str:
        parts = ", ".join(f"{w}: {v.tolist()}" for w, v in sorted(self.values.items(), key=lambda t: point_sort_key(t[0])))
        return f"JetFunction({parts})"


def embed_rational(pair: DefinitizablePair, func: RationalFunction) -> JetFunction:
    """Taylor jets of a rational function along the spectrum.

    The function must be holomorphic on the spectrum: no pole may come within
    matching distance of a spectral point.
    """
    for pole, _ in func.poles():
        if pair.report.contains(pole):
            raise PoleMeetsSpectrumError(f"pole {pole} meets the spectrum")
    return JetFunction(pair, {w: func.jet_at(w, pair.degrees[w]) for w in pair.points})


def q_jets(pair: DefinitizablePair) -> JetFunction:
    """The definitizing function as a jet function; lower entries vanish."""
    return embed_rational(pair, pair.q)


# -- decomposition ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Decomposition:
    """phi = (jets of s) + g * (jets of q) along the spectrum."""

    pair: DefinitizablePair
    s: RationalFunction
    g: dict
    base_point: object = None

    def assemble(self) -> JetFunction:
        out: dict = {}
        for w in self.pair.points:
            d = self.pair.degrees[w]
            jet = self.s.jet_at(w, d) + self.g[w] * self.pair.q.jet_at(w, d)
            out[w] = jet
        return JetFunction(self.pair, out)


def _default_mu(pair: DefinitizablePair) -> complex:
    radius = 0.0
    for w in pair.points:
        if not is_inf(w):
            radius = max(radius, abs(complex(w)))
    for z, _ in pair.q.zeros():
        if not is_inf(z):
            radius = max(radius, abs(complex(z)))
    mu = 1j * (1.0 + radius)
    for _ in range(8):
        clear = abs(mu.imag) > 1e-6 and all(
            is_inf(w) or abs(mu - complex(w)) > 1e-6 for w in pair.points
        )
        if clear:
            return mu
        mu = 2.0 * mu
    return mu


def decompose(pair: DefinitizablePair, phi: JetFunction, mu=None) -> Decomposition:
    """Split phi = s + g q with s rational with a single pole at mu.

    The rational part is the solution of the Hermite interpolation problem
    matching the first d(w) jet entries of phi at every critical point, taken
    from the span of z^i / (z - mu)^(m-1), i < m, where m is the total
    critical degree.  g is then the quotient (phi - s)/q, with the limit
    value at each critical point.
    """
    if phi.pair is not pair and phi.pair.points != pair.points:
        raise ValidationError("jet function does not belong to this pair")
    crit = [w for w in pair.points if pair.degrees[w] > 0]
    m = sum(pair.degrees[w] for w in crit)
    if mu is None:
        mu = _default_mu(pair)
    mu = complex(mu)
    if pair.report.distance_to(mu) <= 1e-9:
        raise ValidationError("base point mu must lie in the resolvent set")
    if m == 0:
        s = RationalFunction(Polynomial.zero())
    else:
        den = Polynomial.from_roots([mu] * (m - 1))
        basis = [RationalFunction(Polynomial.monomial(i), den) for i in range(m)]
        rows = []
        rhs = []
        for w in crit:
            d = pair.degrees[w]
            jets = [e.jet_at(w, d - 1) for e in basis]
            for j in range(d):
                rows.append([jet[j] for jet in jets])
                rhs.append(phi.values[w][j])
        mat = np.array(rows, dtype=complex)
        vec = np.array(rhs, dtype=complex)
        if float(np.max(np.abs(vec))) <= 1e-12 * max(1.0, phi.max_abs()):
            # interpolation data is pure roundoff; the exact solution is zero
            s = RationalFunction(Polynomial.zero())
        else:
            try:
                coeffs = np.linalg.solve(mat, vec)
            except np.linalg.LinAlgError as exc:
                raise InconsistencyError("interpolation system is singular") from exc
            s = RationalFunction(Polynomial(coeffs), den)
    g: dict = {}
    for w in pair.points:
        d = pair.degrees[w]
        if d == 0:
            sval = s(w)
            qval = pair.q(w)
            if is_inf(sval) or is_inf(qval):
                raise InconsistencyError("rational part acquired a pole on the spectrum")
            g[w] = complex((complex(phi.values[w][0]) - complex(sval)) / complex(qval))
        else:
            h_top = complex(phi.values[w][d]) - complex(s.jet_at(w, d)[d])
            q_top = complex(pair.q.jet_at(w, d)[d])
            g[w] = h_top / q_top
    dec = Decomposition(pair=pair, s=s, g=g, base_point=mu)
    resid = (dec.assemble() - phi).max_abs()
    if resid > 1e-7 * max(1.0, phi.max_abs()):
        raise InconsistencyError("decomposition failed to reassemble the jet function")
    return dec


def decompose_polynomial(pair: DefinitizablePair, phi: JetFunction) -> Decomposition:
    """Variant with a polynomial rational part; needs a bounded relation."""
    if pair.report.inf_multiplicity() > 0:
        raise NotBoundedError("polynomial decomposition needs infinity in the resolvent set")
    crit = [w for w in pair.points if pair.degrees[w] > 0]
    m = sum(pair.degrees[w] for w in crit)
    if m == 0:
        s = RationalFunction(Polynomial.zero())
    else:
        basis = [RationalFunction(Polynomial.monomial(i)) for i in range(m)]
        rows = []
        rhs = []
        for w in crit:
            d = pair.degrees[w]
            jets = [e.jet_at(w, d - 1) for e in basis]
            for j in range(d):
                rows.append([jet[j] for jet in jets])
                rhs.append(phi.values[w][j])
        vec = np.array(rhs, dtype=complex)
        if float(np.max(np.abs(vec))) <= 1e-12 * max(1.0, phi.max_abs()):
            s = RationalFunction(Polynomial.zero())
        else:
            coeffs = np.linalg.solve(np.array(rows, dtype=complex), vec)
            s = RationalFunction(Polynomial(coeffs))
    g: dict = {}
    for w in pair.points:
        d = pair.degrees[w]
        if d == 0:
            g[w] = complex((complex(phi.values[w][0]) - complex(s(w))) / complex(pair.q(w)))
        else:
            h_top = complex(phi.values[w][d]) - complex(s.jet_at(w, d)[d])
            g[w] = h_top / complex(pair.q.jet_at(w, d)[d])
    dec = Decomposition(pair=pair, s=s, g=g, base_point=None)
    resid = (dec.assemble() - phi).max_abs()
    if resid > 1e-7 * max(1.0, phi.max_abs()):
        raise InconsistencyError("polynomial decomposition failed to reassemble")
    return dec


def omega_kernel_check(pair: DefinitizablePair, s: RationalFunction, g: dict) -> bool:
    """Does the pair (s, g) assemble to the zero jet function?

    Cross-validated against the closed-form criterion: zero exactly when g
    equals -(s/q) along the spectrum, with the limit value at critical
    points.
    """
    g = {pair.resolve(w): complex(v) for w, v in g.items()}
    for w in pair.points:
        if w not in g:
            raise ValidationError(f"missing g value at spectral point {w}")
    dec = Decomposition(pair=pair, s=s, g=g, base_point=None)
    assembled = dec.assemble()
    scale = max(1.0, assembled.max_abs(), float(np.max(np.abs(s.num.coeffs))))
    direct = assembled.max_abs() <= 1e-9 * scale
    criterion = True
    for w in pair.points:
        d = pair.degrees[w]
        s_jet = s.jet_at(w, d)
        q_jet = pair.q.jet_at(w, d)
        if d > 0 and float(np.max(np.abs(s_jet[:d]))) > 1e-9 * scale:
            criterion = False
            break
        expected = -complex(s_jet[d]) / complex(q_jet[d])
        if abs(g[w] - expected) > 1e-8 * max(1.0, abs(expected)):
            criterion = False
            break
    if direct != criterion:
        raise InconsistencyError("kernel criterion disagrees with the direct evaluation")
    return direct


# -- the calculus -----------------------------------------------------------


def apply_calculus(fact: Factorization, phi: JetFunction, mu=None) -> np.ndarray:
    """Evaluate a jet function on the relation: s(A) + T (integral of g) T^+."""
    pair = fact.pair
    dec = decompose(pair, phi, mu)
    s_matrix = rational_apply(dec.s, pair.relation, pair.report)
    if fact.rank == 0:
        return s_matrix
    values: dict = {}
    for atom_point, _ in fact.measure.atoms:
        values[atom_point] = dec.g[pair.resolve(atom_point, tol=1e-6)]
    integral = fact.measure.integrate(values)
    return s_matrix + fact.factor @ integral @ fact.factor_adjoint


def indicator(pair: DefinitizablePair, delta) -> JetFunction:
    """Indicator jet function of a set of spectral points.

    Points of delta are matched against the spectrum; at critical points the
    jet is (1, 0, ..., 0).
    """
    resolved = set()
    for label in delta:
        try:
            resolved.add(pair.resolve(label))
        except ValidationError as exc:
            raise PointNotInSpectrumError(str(exc)) from exc
    values: dict = {}
    for w in pair.points:
        jet = np.zeros(pair.degrees[w] + 1, dtype=complex)
        if w in resolved:
            jet[0] = 1.0
        values[w] = jet
    return JetFunction(pair, values)


def spectral_projection(fact: Factorization, delta, mu=None) -> np.ndarray:
    """The calculus applied to the indicator of delta; a bounded projection."""
    proj = apply_calculus(fact, indicator(fact.pair, delta), mu)
    resid = float(np.linalg.norm(proj @ proj - proj))
    if resid > 1e-7 * max(1.0, float(np.linalg.norm(proj)) ** 2):
        raise InconsistencyError("spectral projection failed to be idempotent")
    return proj


def norm_f(phi: JetFunction) -> float:
    """Sup of |phi| off the critical points plus the sum of critical jet norms."""
    pair = phi.pair
    flat = 0.0
    jets = 0.0
    for w in pair.points:
        if pair.degrees[w] == 0:
            flat = max(flat, abs(complex(phi.values[w][0])))
        else:
            jets += float(np.max(np.abs(phi.values[w])))
    return flat + jets


def pi1_range(phi: JetFunction) -> tuple:
    """Scalar top-level values along the spectrum, in canonical point order."""
    return tuple(complex(phi.values[w][0]) for w in phi.pair.points)
