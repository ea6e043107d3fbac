"""Floating-point layer: 0F1 evaluation, integral-form kernel, operator
application on bump functions, and the canonical-commutator harness.

Everything here is double precision. The exact modules never import this one;
agreement between the two layers is what several verification paths check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from scipy import integrate

from .algebra import GradedKernel, Rational
from .classical_toa import Potential
from .errors import (
    ArgumentTooNegative,
    NoConvergence,
    QuadratureFailure,
    ZeroOverlap,
)
from .kernel_solver import kernel_eval

# Beyond this the alternating 0F1 series loses all significance in doubles.
_Z_CUTOFF = -900.0

_MAX_TERMS = 800

# 9-point central second-derivative stencil, order 8, offsets -4..4.
_FD2_COEFFS = (
    Fraction(-1, 560),
    Fraction(8, 315),
    Fraction(-1, 5),
    Fraction(8, 5),
    Fraction(-205, 72),
    Fraction(8, 5),
    Fraction(-1, 5),
    Fraction(8, 315),
    Fraction(-1, 560),
)
_FD2_ABS_SUM = float(sum(abs(c) for c in _FD2_COEFFS))


@dataclass(frozen=True)
class BumpProfile:
    """Smooth compactly supported test function with closed-form derivatives.

    phi(q) = amplitude * exp(-1/(1-u^2)) for u = (q-center)/halfwidth inside
    |u| < 1, and 0 outside. The first two derivatives are analytic, not
    finite differences; the commutator test's sensitivity demands that.
    """

    center: float
    halfwidth: float
    amplitude: complex = 1.0

    def __post_init__(self):
        if self.halfwidth <= 0:
            raise ValueError("halfwidth must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.halfwidth, self.center + self.halfwidth)

    def _u(self, q: float) -> float:
        return (q - self.center) / self.halfwidth

    def value(self, q: float) -> complex:
        u = self._u(q)
        if abs(u) >= 1.0:
            return 0j
        return self.amplitude * math.exp(-1.0 / (1.0 - u * u))

    def deriv1(self, q: float) -> complex:
        u = self._u(q)
        if abs(u) >= 1.0:
            return 0j
        g = math.exp(-1.0 / (1.0 - u * u))
        one = 1.0 - u * u
        return self.amplitude * g * (-2.0 * u / one**2) / self.halfwidth

    def deriv2(self, q: float) -> complex:
        u = self._u(q)
        if abs(u) >= 1.0:
            return 0j
        g = math.exp(-1.0 / (1.0 - u * u))
        one = 1.0 - u * u
        inner = 4.0 * u * u / one**4 - 2.0 / one**2 - 8.0 * u * u / one**3
        return self.amplitude * g * inner / self.halfwidth**2


@dataclass(frozen=True)
class QuadSpec:
    """Adaptive-quadrature request: absolute tolerance, refinement budget,
    and the embedded-pair rule identifier."""

    abs_tol: float
    max_depth: int = 50
    rule: str = "gk21"

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


def hyper0f1(z: float, tol: float = 1e-15) -> float:
    """The confluent limit function 0F1(1; z) = sum_n z^n / (n!)^2.

    Summed forward with compensated (Kahan) accumulation, at least 8 terms,
    stopping once |term| < tol * |partial sum|. Arguments below -900 are
    rejected: the alternating sum cancels catastrophically there and doubles
    carry no usable information.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if z < _Z_CUTOFF:
        raise ArgumentTooNegative(f"0F1 argument {z} below cutoff {_Z_CUTOFF}")
    total = 1.0
    comp = 0.0
    term = 1.0
    for n in range(1, _MAX_TERMS + 1):
        term *= z / (n * n)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if n >= 8 and abs(term) < tol * max(abs(total), 1e-300):
            return total
    raise NoConvergence(f"0F1 series did not settle within {_MAX_TERMS} terms at z = {z}")


def _quad_real(f, lo: float, hi: float, epsabs: float, limit: int, points=None) -> tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if points:
            val, err = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=0.0, limit=limit, points=points)
        else:
            val, err = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=0.0, limit=limit)
    return val, err


def _quad_complex(f, lo: float, hi: float, epsabs: float, limit: int, points=None) -> tuple[complex, float]:
    """Complex adaptive quadrature; f is evaluated once per node via a memo
    shared by the real and imaginary passes."""
    memo: dict[float, complex] = {}

    def cached(q: float) -> complex:
        val = memo.get(q)
        if val is None:
            val = f(q)
            memo[q] = val
        return val

    re, re_err = _quad_real(lambda q: cached(q).real, lo, hi, epsabs, limit, points)
    im, im_err = _quad_real(lambda q: cached(q).imag, lo, hi, epsabs, limit, points)
    return complex(re, im), re_err + im_err


def kernel_integral_form(
    V: Potential, mu: float, hbar: float, q: float, qp: float, quad: QuadSpec
) -> float:
    """The kernel T-factor as a 0F1 integral.

    T0(q, q') = (1/2) * integral_0^((q+q')/2) 0F1(1; (mu/2 hbar^2)(q-q')^2
    [V((q+q')/2) - V(q'')]) dq''. Returns the real factor only; callers apply
    the (mu / i hbar) sgn(q - q') prefactor. Agrees with the series
    evaluation of the classical term within combined tolerance.
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    s_hi = 0.5 * (q + qp)
    v2 = (q - qp) ** 2
    w = float(mu) / (2.0 * hbar * hbar)
    v_top = V.value(s_hi)

    def f(q2: float) -> float:
        return hyper0f1(w * v2 * (v_top - V.value(q2)))

    val, err = _quad_real(f, 0.0, s_hi, quad.abs_tol, max(quad.max_depth, 50))
    if err > 1e3 * max(quad.abs_tol, 1e-15):
        raise QuadratureFailure(f"integral-form error estimate {err:.3g}")
    return 0.5 * val


def classical_term_value(
    cterm: dict[tuple[int, int], Rational], mu: float, hbar: float, q: float, qp: float
) -> float:
    """Float evaluation of a classical-slice table at a point (T-factor only)."""
    u = q + qp
    v = q - qp
    w = float(mu) / (2.0 * hbar * hbar)
    return sum(float(c) * w**j * u**m * v ** (2 * j) for (m, j), c in cterm.items())


def _as_kernel_func(K, hbar: float):
    if isinstance(K, GradedKernel):
        return lambda q, qp: kernel_eval(K, q, qp, hbar)
    if callable(K):
        return K
    raise TypeError("kernel must be a GradedKernel or a callable (q, q') -> complex")


def _apply_at(kernel_func, phi: BumpProfile, q: float, epsabs: float, limit: int) -> tuple[complex, float]:
    """(T phi)(q) = integral of <q|T|q'> phi(q') over supp(phi).

    The sgn discontinuity line q' = q is always a panel boundary.
    """
    lo, hi = phi.support
    pts = [q] if lo < q < hi else None
    return _quad_complex(lambda qp: kernel_func(q, qp) * phi.value(qp), lo, hi, epsabs, limit, pts)


def apply_kernel(K, phi: BumpProfile, qgrid, hbar: float, quad: QuadSpec) -> list[complex]:
    """Sample (T phi)(q) = integral <q|T|q'> phi(q') dq' on a grid of points.

    K may be a GradedKernel or any callable kernel (q, q') -> complex. Every
    returned value is checked finite; the integral of a bounded kernel
    against a bump must be.
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    kf = _as_kernel_func(K, hbar)
    limit = max(quad.max_depth, 50)
    out: list[complex] = []
    for q in qgrid:
        val, err = _apply_at(kf, phi, float(q), quad.abs_tol, limit)
        if err > 1e3 * quad.abs_tol:
            raise QuadratureFailure(f"apply_kernel error estimate {err:.3g} at q = {q}")
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise QuadratureFailure(f"non-finite kernel application at q = {q}")
        out.append(val)
    return out


@dataclass(frozen=True)
class CommutatorReport:
    """Relative commutator residual together with its numerical error budget."""

    residual: float
    error_budget: float
    params: dict


def commutator_residual(
    V: Potential,
    K,
    phi: BumpProfile,
    psi: BumpProfile,
    mu: float,
    hbar: float,
    quad: QuadSpec,
) -> CommutatorReport:
    """Residual of the canonical commutation relation on a pair of bumps.

    r = |<phi|(HT - TH)psi> - i hbar <phi|psi>| / (hbar |<phi|psi>|), where
    H chi = -(hbar^2/2 mu) chi'' + V chi. H psi uses the analytic bump
    derivatives; H applied to (T psi) differentiates a dense sampling of the
    smooth function (T psi) with an order-8 central stencil of step
    h = abs_tol^(1/6). The error budget combines the quadrature error
    estimates, the inner-integral noise amplified by the stencil, and a
    step-halving probe of the differentiation truncation.
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    kf = _as_kernel_func(K, hbar)
    limit = max(quad.max_depth, 50)
    inner_tol = max(quad.abs_tol * 1e-3, 5e-15)
    h = quad.abs_tol ** (1.0 / 6.0)

    lo = max(phi.support[0], psi.support[0])
    hi = min(phi.support[1], psi.support[1])
    if lo >= hi:
        raise ZeroOverlap("test function supports do not intersect")

    overlap, overlap_err = _quad_complex(
        lambda q: phi.value(q).conjugate() * psi.value(q), lo, hi, inner_tol, limit
    )
    norm_phi = math.sqrt(
        _quad_real(lambda q: abs(phi.value(q)) ** 2, *phi.support, inner_tol, limit)[0]
    )
    norm_psi = math.sqrt(
        _quad_real(lambda q: abs(psi.value(q)) ** 2, *psi.support, inner_tol, limit)[0]
    )
    if abs(overlap) < 1e-12 * norm_phi * norm_psi:
        raise ZeroOverlap(f"|<phi|psi>| = {abs(overlap):.3g} is below threshold")

    def t_psi(q: float) -> complex:
        return _apply_at(kf, psi, q, inner_tol, limit)[0]

    def t_psi_dd(q: float, step: float) -> complex:
        acc = 0j
        for i, c in enumerate(_FD2_COEFFS):
            acc += float(c) * t_psi(q + (i - 4) * step)
        return acc / (step * step)

    def h_t_psi(q: float) -> complex:
        return -(hbar * hbar) / (2.0 * mu) * t_psi_dd(q, h) + V.value(q) * t_psi(q)

    def h_psi(qp: float) -> complex:
        return -(hbar * hbar) / (2.0 * mu) * psi.deriv2(qp) + V.value(qp) * psi.value(qp)

    def t_h_psi(q: float) -> complex:
        p_lo, p_hi = psi.support
        pts = [q] if p_lo < q < p_hi else None
        return _quad_complex(
            lambda qp: kf(q, qp) * h_psi(qp), p_lo, p_hi, inner_tol, limit, pts
        )[0]

    f_lo, f_hi = phi.support
    term_a, err_a = _quad_complex(
        lambda q: phi.value(q).conjugate() * h_t_psi(q), f_lo, f_hi, quad.abs_tol, limit
    )
    term_b, err_b = _quad_complex(
        lambda q: phi.value(q).conjugate() * t_h_psi(q), f_lo, f_hi, quad.abs_tol, limit
    )

    numerator = term_a - term_b - 1j * hbar * overlap
    denom = hbar * abs(overlap)
    residual = abs(numerator) / denom

    # Error budget: outer quadrature estimates, inner noise amplified through
    # the stencil, and a step-halving probe of the differentiation error.
    phi_l1 = 2.0 * phi.halfwidth * abs(phi.amplitude) * math.exp(-1.0)
    stencil_amp = _FD2_ABS_SUM / (h * h)
    inner_noise = phi_l1 * inner_tol * ((hbar * hbar) / (2.0 * mu) * stencil_amp + 2.0)
    probes = [phi.center, phi.center + 0.37 * phi.halfwidth, phi.center - 0.53 * phi.halfwidth]
    fd_probe = max(abs(t_psi_dd(p, h) - t_psi_dd(p, h / 2.0)) for p in probes)
    fd_err = phi_l1 * (hbar * hbar) / (2.0 * mu) * fd_probe
    budget = (err_a + err_b + hbar * overlap_err + inner_noise + fd_err) / denom

    params = {
        "mu": mu,
        "hbar": hbar,
        "abs_tol": quad.abs_tol,
        "fd_step": h,
        "potential": sorted((d, str(c)) for d, c in V.poly.coeffs.items()),
        "phi": {"center": phi.center, "halfwidth": phi.halfwidth},
        "psi": {"center": psi.center, "halfwidth": psi.halfwidth},
    }
    return CommutatorReport(residual=residual, error_budget=budget, params=params)
