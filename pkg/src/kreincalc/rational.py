"""Polynomials and rational functions with the bookkeeping the calculus needs.

Coefficients are stored in ascending order.  Rational functions are kept
normalized: numerator and denominator coprime (common roots cancelled by
clustering) and the denominator monic.  Poles and zeros at the point infinity
are derived from the degree gap, and Taylor jets at infinity are jets of
``z -> r(1/z)`` at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npp

from .errors import (
    InconsistencyError,
    JetAtPoleError,
    SingularMoebiusError,
    ValidationError,
)
from .relations import INF, MoebiusMap, Point, as_point, is_inf
from .tolerances import COEFF_TRIM_TOL, REALNESS_TOL, ROOT_CLUSTER_TOL


def _trim(coeffs) -> np.ndarray:
    """Drop trailing coefficients that are negligible against the largest."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    cut = scale * COEFF_TRIM_TOL
    last = c.size - 1
    while last > 0 and abs(c[last]) <= cut:
        last -= 1
    c = c[: last + 1].copy()
    c[np.abs(c) <= cut] = 0.0
    return c


def _cluster_members(values, tol: float) -> list[tuple[complex, list[complex]]]:
    """Greedy clustering; returns (running mean, member list) per group."""
    vals = sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))
    centers: list[complex] = []
    members: list[list[complex]] = []
    for v in vals:
        placed = False
        for i, c in enumerate(centers):
            if abs(v - c) <= tol * max(1.0, abs(c)):
                members[i].append(v)
                centers[i] = sum(members[i]) / len(members[i])
                placed = True
                break
        if not placed:
            centers.append(v)
            members.append([v])
    out = list(zip(centers, members))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def cluster_values(values, tol: float = ROOT_CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Greedy clustering of complex values into (center, count) groups.

    The radius scales with |center| so large roots cluster sensibly.  Order of
    the result is deterministic (sorted by real part, then imaginary part).
    """
    return [(c, len(m)) for c, m in _cluster_members(values, tol)]


def _series_divide(num, den, length: int) -> np.ndarray:
    """Truncated power-series quotient num/den mod t^length; den[0] != 0."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    out = np.zeros(length, dtype=complex)
    for j in range(length):
        acc = num[j] if j < num.size else 0.0
        lo = max(0, j - den.size + 1)
        for k in range(lo, j):
            acc -= out[k] * den[j - k]
        out[j] = acc / den[0]
    return out


class Polynomial:
    """Polynomial with ascending complex coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = _trim(coeffs)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls([0.0])

    @classmethod
    def one(cls) -> "Polynomial":
        return cls([1.0])

    @classmethod
    def monomial(cls, degree: int, coeff: complex = 1.0) -> "Polynomial":
        c = np.zeros(degree + 1, dtype=complex)
        c[degree] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots, leading: complex = 1.0) -> "Polynomial":
        c = npp.polyfromroots(list(roots)) if len(list(roots)) else np.array([1.0])
        return cls(np.asarray(c, dtype=complex) * leading)

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return -1 if self.is_zero else self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, z: complex) -> complex:
        return complex(npp.polyval(complex(z), self.coeffs))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npp.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npp.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(npp.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeffs)

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ValidationError("polynomial division by zero")
        quo, rem = npp.polydiv(self.coeffs, other.coeffs)
        return Polynomial(quo), Polynomial(rem)

    def derivative(self) -> "Polynomial":
        if self.degree < 1:
            return Polynomial.zero()
        return Polynomial(npp.polyder(self.coeffs))

    def conj_reflect(self) -> "Polynomial":
        """Coefficient-wise conjugate; realizes p -> conj(p(conj z))."""
        return Polynomial(np.conj(self.coeffs))

    def shifted(self, w: complex) -> np.ndarray:
        """Coefficients of t -> p(w + t), i.e. the full Taylor jet at w."""
        c = self.coeffs.astype(complex).copy()
        n = c.size
        w = complex(w)
        for j in range(n):
            for i in range(n - 2, j - 1, -1):
                c[i] = c[i] + w * c[i + 1]
        return c

    def reversed_coeffs(self) -> np.ndarray:
        """Coefficients of z^deg * p(1/z)."""
        return self.coeffs[::-1].copy()

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        # roots are scale invariant; renormalize by an exact power of two so
        # subnormal or huge coefficients cannot poison the companion matrix
        # (complex division by a subnormal scalar yields nan in numpy)
        exp = int(np.floor(np.log2(float(np.max(np.abs(self.coeffs))))))
        c = np.ldexp(self.coeffs.real, -exp) + 1j * np.ldexp(self.coeffs.imag, -exp)
        return np.asarray(npp.polyroots(c), dtype=complex)

    def _jet_validates(self, center: complex, mult: int) -> bool:
        jet = self.shifted(center)
        scale = float(np.max(np.abs(jet))) or 1.0
        return all(abs(jet[j]) <= 1e-9 * scale for j in range(mult))

    def clustered_roots(self, tol: float = ROOT_CLUSTER_TOL) -> list[tuple[complex, int]]:
        """Roots grouped into (center, multiplicity) pairs.

        An m-fold root scatters its numerical approximations over a disc of
        radius about eps^(1/m) relative to its magnitude, so grouping starts
        at a radius wide enough for that signature (an eight-fold root
        scatters about 0.01 relative) and descends.  A group counts as one
        multiple root only when its spread fits the signature and the
        derivative jet at the mean vanishes through order m - 1; otherwise
        it is regrouped at a tighter radius, and groups still failing at the
        base radius decay into singletons.
        """
        eps = float(np.finfo(float).eps)
        out: list[tuple[complex, int]] = []
        work: list[tuple[float, list[complex]]] = [(0.05, list(self.roots()))]
        while work:
            radius, vals = work.pop()
            for center, members in _cluster_members(vals, radius):
                m = len(members)
                if m == 1:
                    out.append((center, 1))
                    continue
                spread = max(abs(r - center) for r in members)
                if spread <= 8.0 * eps ** (1.0 / m) * max(1.0, abs(center)) and self._jet_validates(center, m):
                    out.append((center, m))
                elif radius > tol:
                    work.append((max(radius / 16.0, tol), members))
                else:
                    out.extend((complex(r), 1) for r in members)
        out.sort(key=lambda t: (t[0].real, t[0].imag))
        return out

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()})"


@dataclass(frozen=True)
class PartialFractions:
    """r = poly + sum of coeff / (z - pole)^order terms."""

    poly: Polynomial
    terms: tuple[tuple[complex, int, complex], ...]  # (pole, order, coeff)

    def __call__(self, z: complex) -> complex:
        val = self.poly(z)
        for pole, order, coeff in self.terms:
            val += coeff / (z - pole) ** order
        return complex(val)


class RationalFunction:
    """Quotient of polynomials, normalized coprime with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = Polynomial([1.0]) if den is None else (den if isinstance(den, Polynomial) else Polynomial(den))
        if den.is_zero:
            raise ValidationError("rational function with zero denominator")
        num, den = self._normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
        if num.is_zero:
            return Polynomial.zero(), Polynomial.one()
        if den.degree >= 1 and num.degree >= 1:
            nroots = num.clustered_roots()
            droots = den.clustered_roots()
            cancelled = False
            kept_n = []
            for nc, nm in nroots:
                for i, (dc, dm) in enumerate(droots):
                    if dm > 0 and abs(nc - dc) <= ROOT_CLUSTER_TOL * max(1.0, abs(dc)):
                        k = min(nm, dm)
                        nm -= k
                        droots[i] = (dc, dm - k)
                        cancelled = True
                        break
                if nm > 0:
                    kept_n.append((nc, nm))
            if cancelled:
                num = Polynomial.from_roots(
                    [c for c, m in kept_n for _ in range(m)], leading=num.leading
                )
                den = Polynomial.from_roots(
                    [c for c, m in droots for _ in range(m)], leading=den.leading
                )
        lead = den.leading
        num = Polynomial(num.coeffs / lead)
        den = Polynomial(den.coeffs / lead)
        return num, den

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def __call__(self, z) -> complex | Point:
        """Evaluate; z may be the point infinity, and poles return infinity."""
        z = as_point(z)
        dn, dd = self.num.degree, self.den.degree
        if is_inf(z):
            if self.is_zero or dn < dd:
                return 0.0 + 0.0j
            if dn == dd:
                return complex(self.num.leading / self.den.leading)
            return INF
        vden = self.den(z)
        vnum = self.num(z)
        if abs(vden) == 0.0:
            return INF
        return complex(vnum / vden)

    # -- algebra ---------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise ValidationError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    @staticmethod
    def _coerce(x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Polynomial):
            return RationalFunction(x)
        return RationalFunction(Polynomial([complex(x)]))

    def equals(self, other: "RationalFunction", tol: float = 1e-9) -> bool:
        """Cross-multiplied coefficient comparison."""
        diff = self.num * other.den - other.num * self.den
        scale = max(
            (self.num * other.den).max_abs_coeff(),
            (other.num * self.den).max_abs_coeff(),
            1.0,
        )
        return diff.max_abs_coeff() <= tol * scale

    # -- structure -------------------------------------------------------

    def sharp(self) -> "RationalFunction":
        """The function z -> conj(r(conj z)); fixed points are the real ones."""
        return RationalFunction(self.num.conj_reflect(), self.den.conj_reflect())

    def is_real(self, tol: float = REALNESS_TOL) -> bool:
        scale = max(self.num.max_abs_coeff(), self.den.max_abs_coeff(), 1.0)
        im = max(
            float(np.max(np.abs(self.num.coeffs.imag))),
            float(np.max(np.abs(self.den.coeffs.imag))),
        )
        return im <= tol * scale

    def poles(self) -> list[tuple[Point, int]]:
        """Clustered poles including infinity when numerator degree wins."""
        out: list[tuple[Point, int]] = list(self.den.clustered_roots())
        gap = self.num.degree - self.den.degree
        if not self.is_zero and gap > 0:
            out.append((INF, gap))
        return out

    def zeros(self) -> list[tuple[Point, int]]:
        if self.is_zero:
            raise ValidationError("zeros of the zero rational function")
        out: list[tuple[Point, int]] = list(self.num.clustered_roots())
        gap = self.den.degree - self.num.degree
        if gap > 0:
            out.append((INF, gap))
        return out

    def zero_degree_at(self, w, tol: float = ROOT_CLUSTER_TOL) -> int:
        """Multiplicity of w as a zero (0 when r(w) != 0); w may be infinity."""
        if self.is_zero:
            raise ValidationError("zero degree of the zero rational function")
        w = as_point(w)
        if is_inf(w):
            return max(0, self.den.degree - self.num.degree)
        for center, mult in self.num.clustered_roots(tol):
            if abs(complex(w) - center) <= tol * max(1.0, abs(center)):
                return mult
        return 0

    def jet_at(self, w, order: int) -> np.ndarray:
        """Taylor jet (f(w), f'(w)/1!, ..., f^(order)(w)/order!).

        At infinity this is the jet of z -> r(1/z) at zero.  Raises when w is
        a pole.
        """
        w = as_point(w)
        length = order + 1
        if is_inf(w):
            dn, dd = max(self.num.degree, 0), max(self.den.degree, 0)
            big = max(dn, dd)
            gnum = np.concatenate([np.zeros(big - dn, dtype=complex), self.num.reversed_coeffs()])
            gden = np.concatenate([np.zeros(big - dd, dtype=complex), self.den.reversed_coeffs()])
            if abs(gden[0]) <= COEFF_TRIM_TOL * max(np.max(np.abs(gden)), 1.0):
                raise JetAtPoleError("jet requested at the pole infinity")
            return _series_divide(gnum, gden, length)
        w = complex(w)
        dshift = self.den.shifted(w)
        if abs(dshift[0]) <= COEFF_TRIM_TOL * max(float(np.max(np.abs(dshift))), 1.0):
            raise JetAtPoleError(f"jet requested at pole {w}")
        nshift = self.num.shifted(w)
        return _series_divide(nshift, dshift, length)

    def partial_fractions(self) -> PartialFractions:
        """Polynomial part plus principal parts at the clustered poles."""
        p, w = self.num.divmod(self.den)
        if self.den.degree < 1:
            return PartialFractions(p, ())
        droots = self.den.clustered_roots()
        terms: list[tuple[complex, int, complex]] = []
        for k, (alpha, nu) in enumerate(droots):
            others = [c for i, (c, m) in enumerate(droots) if i != k for _ in range(m)]
            vk = Polynomial.from_roots(others, leading=1.0)
            vk_shift = vk.shifted(alpha)
            if abs(vk_shift[0]) <= 1e-13 * max(float(np.max(np.abs(vk_shift))), 1.0):
                raise InconsistencyError("pole clusters of the denominator overlap")
            t = _series_divide(w.shifted(alpha), vk_shift, nu)
            top = t[0]
            if abs(top) <= 1e-12 * max(float(np.max(np.abs(t))), 1.0):
                raise InconsistencyError(
                    "leading principal-part coefficient vanished; numerator and "
                    "denominator were not coprime after normalization"
                )
            for j in range(1, nu + 1):
                terms.append((alpha, j, complex(t[nu - j])))
        return PartialFractions(p, tuple(terms))

    def compose_moebius(self, moebius: MoebiusMap) -> "RationalFunction":
        """The composition z -> r((a z + b) / (c z + d)).

        Clears denominators exactly at coefficient level; requires the Möbius
        matrix to be regular.
        """
        a, b, c, d = moebius.a, moebius.b, moebius.c, moebius.d
        scale = max(abs(a), abs(b), abs(c), abs(d), 1.0)
        if abs(moebius.det()) <= 1e-12 * scale * scale:
            raise SingularMoebiusError("Möbius matrix is numerically singular")
        top = Polynomial([b, a])
        bot = Polynomial([d, c])
        big = max(max(self.num.degree, 0), max(self.den.degree, 0))

        def expand(poly: Polynomial) -> Polynomial:
            total = Polynomial.zero()
            ppow = Polynomial.one()   # top^i, built incrementally
            for i in range(max(poly.degree, 0) + 1):
                qpow = Polynomial.one()
                for _ in range(big - i):
                    qpow = qpow * bot
                total = total + complex(poly.coeffs[i]) * (ppow * qpow)
                ppow = ppow * top
            return total

        return RationalFunction(expand(self.num), expand(self.den))

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __repr__(self) -> str:
        return f"RationalFunction({self.num.coeffs.tolist()}, {self.den.coeffs.tolist()})"


def rational_from_scalar(c: complex) -> RationalFunction:
    return RationalFunction(Polynomial([complex(c)]))


def moebius_scalar(moebius: MoebiusMap) -> RationalFunction:
    """The Möbius map itself as a rational function of z."""
    return RationalFunction(Polynomial([moebius.b, moebius.a]), Polynomial([moebius.d, moebius.c]))
