"""Classical local time of arrival: exact series by two routes, plus numerics.

The local time of arrival at arrival point x is the series
    t(q, p) = sum_k (-1)^k P_k(q) p^-(2k+1)
where the iterates P_k are polynomials in q. Two independent constructions of
P_k are provided (a closed-form integral and a Liouville-type iteration); they
must agree exactly, and inside the convergence region the partial sums must
agree with direct quadrature of the equations of motion.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from scipy import integrate

from .algebra import MomentumSeries, QPoly, Rational, RationalLike, poly_antideriv, poly_shift
from .errors import NotAccessible, QuadratureFailure, ZeroMomentum

# Interior margin for the accessibility guard: the inverse-square-root
# integrand is only evaluated where H - V > margin * max(1, |H|).
_ACCESS_MARGIN = 1e-12

_SCAN_POINTS = 4096


@dataclass(frozen=True)
class Potential:
    """Polynomial potential V(q) with rational coefficients.

    A constant term is allowed and physically inert: it cancels in every
    V(q) - V(q') difference. Degree <= 2 is classified "linear" (linear
    classical equations of motion), higher degrees "nonlinear".
    """

    poly: QPoly

    @classmethod
    def free(cls) -> "Potential":
        return cls(QPoly.zero())

    @classmethod
    def from_pairs(cls, pairs) -> "Potential":
        return cls(QPoly(dict(pairs)))

    @property
    def degree(self) -> int:
        return self.poly.degree()

    @property
    def is_linear(self) -> bool:
        return self.degree <= 2

    def coeff(self, s: int) -> Rational:
        return self.poly.coeff(s)

    def value(self, q):
        return self.poly(q)


@dataclass(frozen=True)
class PhasePoint:
    """A classical state (q, p) with arrival point x and mass mu."""

    q: float
    p: float
    x: float = 0.0
    mu: float = 1.0

    def energy(self, V: Potential) -> float:
        return self.p * self.p / (2.0 * self.mu) + V.value(float(self.q))


def _double_factorial(n: int) -> int:
    """Product n(n-2)(n-4)...; empty product (n <= 0) is 1, so (-1)!! = 1."""
    return math.prod(range(n, 0, -2))


def toa_iterate_closed(V: Potential, mu: RationalLike, k: int, x: RationalLike = 0) -> QPoly:
    """k-th arrival-time iterate by the closed form.

    Returns the polynomial P_k with T_k = P_k(q) p^-(2k+1), where
        P_k(q) = -((2k-1)!!/k!) mu^(k+1) * integral_x^q (V(q)-V(q'))^k dq'.
    For k = 0 this is -mu (q - x).
    """
    if k < 0:
        raise ValueError("iterate index must be >= 0")
    mu = Fraction(mu)
    x = Fraction(x)

    # (V(q) - V(q'))^k as a polynomial in q' whose coefficients are QPoly in q.
    base: dict[int, QPoly] = {0: V.poly - QPoly.constant(V.coeff(0))}
    for d, c in V.poly.coeffs.items():
        if d >= 1:
            base[d] = QPoly.constant(-c)
    power: dict[int, QPoly] = {0: QPoly.constant(1)}
    for _ in range(k):
        nxt: dict[int, QPoly] = {}
        for d1, p1 in power.items():
            for d2, p2 in base.items():
                prod = p1 * p2
                if prod:
                    d = d1 + d2
                    acc = nxt.get(d)
                    nxt[d] = prod if acc is None else acc + prod
        power = {d: p for d, p in nxt.items() if p}

    # Antiderivative in q', then evaluate at q' = q and q' = x.
    at_q = QPoly.zero()
    at_x = QPoly.zero()
    for d, coeff_poly in power.items():
        anti = coeff_poly * Fraction(1, d + 1)
        at_q = at_q + anti * QPoly.monomial(d + 1)
        at_x = at_x + anti * (x ** (d + 1))
    integral = at_q - at_x

    factor = -Fraction(_double_factorial(2 * k - 1), math.factorial(k)) * mu ** (k + 1)
    return integral * factor


def toa_iterate_liouville(V: Potential, mu: RationalLike, k: int, x: RationalLike = 0) -> QPoly:
    """k-th arrival-time iterate by the Liouville-type iteration.

    The p-bookkeeping of the iteration T_k = -(mu/p) int_x^q V' dT_{k-1}/dp dq'
    collapses, on the single-term representation T_k = P_k p^-(2k+1), to
        P_k(q) = (2k-1) mu * integral_x^q V'(q') P_{k-1}(q') dq'.
    Must equal toa_iterate_closed for every k.
    """
    if k < 0:
        raise ValueError("iterate index must be >= 0")
    mu = Fraction(mu)
    x = Fraction(x)
    vprime = V.poly.derivative()
    current = QPoly({1: -mu}) + QPoly.constant(mu * x)  # seed -mu (q - x)
    for i in range(1, k + 1):
        anti = poly_antideriv(vprime * current)
        integral = anti - QPoly.constant(anti(x))
        current = integral * (Fraction(2 * i - 1) * mu)
    return current


def local_toa(V: Potential, mu: RationalLike, x: RationalLike, K: int) -> MomentumSeries:
    """Partial sum of the local arrival-time series up to order K.

    Returns a MomentumSeries whose (k, 0) term is (-1)^k P_k; all terms sit at
    hbar grade s = 0. Zero iterates (e.g. every k >= 1 for the free particle)
    are dropped.
    """
    if K < 0:
        raise ValueError("series order must be >= 0")
    mu = Fraction(mu)
    x = Fraction(x)
    vprime = V.poly.derivative()
    terms = {}
    current = QPoly({1: -mu}) + QPoly.constant(mu * x)
    sign = 1
    for k in range(K + 1):
        if k > 0:
            anti = poly_antideriv(vprime * current)
            integral = anti - QPoly.constant(anti(x))
            current = integral * (Fraction(2 * k - 1) * mu)
            sign = -sign
        if current:
            terms[(k, 0)] = current * sign
    return MomentumSeries(terms)


def _interval(a: float, b: float) -> tuple[float, float]:
    return (a, b) if a <= b else (b, a)


def toa_quadrature(V: Potential, pt: PhasePoint, tol: float = 1e-10) -> float:
    """Time of arrival by direct quadrature of the equations of motion.

    Evaluates -sgn(p) sqrt(mu/2) * integral_x^q dq' / sqrt(H - V(q')) with
    H the conserved energy of pt. Serves as the independent oracle for the
    series inside its convergence region.
    """
    if pt.p == 0:
        raise ZeroMomentum("time of arrival undefined at p = 0")
    q, x = float(pt.q), float(pt.x)
    if q == x:
        return 0.0
    energy = pt.energy(V)
    lo, hi = _interval(x, q)

    # Strict accessibility: H - V must stay positive on the whole interval.
    margin = _ACCESS_MARGIN * max(1.0, abs(energy))
    n = _SCAN_POINTS
    for i in range(n + 1):
        qi = lo + (hi - lo) * i / n
        if energy - V.value(qi) <= margin:
            raise NotAccessible(f"H - V <= 0 near q' = {qi:.6g}")

    def integrand(qp: float) -> float:
        return 1.0 / math.sqrt(energy - V.value(qp))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value, err = integrate.quad(integrand, x, q, epsabs=tol, epsrel=0.0, limit=200)
    if err > max(tol, 1e-14 * abs(value)):
        raise QuadratureFailure(f"estimated error {err:.3g} exceeds tol {tol:.3g}")
    sgn_p = 1.0 if pt.p > 0 else -1.0
    return -sgn_p * math.sqrt(pt.mu / 2.0) * value


def _extremum_candidates(V: Potential, lo: float, hi: float) -> list[float]:
    """Endpoints plus polished interior roots of V' (4096-point scan + Newton)."""
    candidates = [lo, hi]
    vp = V.poly.derivative()
    vpp = vp.derivative()
    if vp.is_zero() or lo == hi:
        return candidates
    n = _SCAN_POINTS
    prev_q = lo
    prev_f = vp(lo)
    for i in range(1, n + 1):
        qi = lo + (hi - lo) * i / n
        fi = vp(qi)
        if prev_f == 0.0:
            candidates.append(prev_q)
        elif fi == 0.0 or (prev_f < 0.0) != (fi < 0.0):
            root = 0.5 * (prev_q + qi)
            for _ in range(30):
                d = vpp(root)
                if d == 0.0:
                    break
                step = vp(root) / d
                root -= step
                if abs(step) < 1e-15 * max(1.0, abs(root)):
                    break
            if lo <= root <= hi:
                candidates.append(root)
        prev_q, prev_f = qi, fi
    return candidates


def convergence_margin(V: Potential, mu: float, q: float, x: float, p: float) -> tuple[float, bool]:
    """Convergence criterion of the local series: (ratio, ratio < 1/2).

    ratio = mu * M_q / p^2 with M_q = max |V(q) - V(q')| over the interval
    between x and q. The series converges absolutely iff ratio < 1/2.
    """
    if p == 0:
        raise ZeroMomentum("convergence ratio undefined at p = 0")
    lo, hi = _interval(float(x), float(q))
    vq = V.value(float(q))
    m_q = max(abs(vq - V.value(c)) for c in _extremum_candidates(V, lo, hi))
    ratio = float(mu) * m_q / (p * p)
    return ratio, ratio < 0.5


def series_tail_bound(V: Potential, mu: float, q: float, x: float, p: float, K: int) -> float:
    """Geometric bound on the tail of the local series dropped after order K.

    The iterates obey |T_k| <= (mu |q-x| / |p|) (2 ratio)^k because
    (2k-1)!!/k! <= 2^k, so for ratio < 1/2 the tail after K is at most
    lead * (2 ratio)^(K+1) / (1 - 2 ratio). Returns inf outside that region.
    """
    ratio, _ = convergence_margin(V, mu, q, x, p)
    two_r = 2.0 * ratio
    lead = abs(mu * (q - x) / p)
    if two_r >= 1.0:
        return math.inf
    return lead * two_r ** (K + 1) / (1.0 - two_r)


def shift_arrival(V: Potential, x: RationalLike) -> Potential:
    """Potential seen from the arrival point: V~(t) = V(t + x).

    Reduces an arrival-point-x problem to an origin problem in the relabeled
    coordinate q~ = q - x. The constant term that appears is retained; it
    cancels identically in all V(q) - V(q') differences.
    """
    return Potential(poly_shift(V.poly, Fraction(x)))
