"""Weyl-Wigner transforms between kernel tables and phase-space series.

Both directions are algebraic term maps, never numeric integrals: the
distributional identity
    integral sigma^(m-1) sgn(sigma) e^(-i x sigma) d sigma = 2 (m-1)! / i^m x^-m
is applied as an exact rewrite rule on each monomial. All bookkeeping stays
rational; the powers of i cancel pairwise so every output coefficient is real.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import GradedKernel, MomentumSeries, QPoly, Rational, RationalLike
from .errors import GradeError


class TransformOrigin(enum.Enum):
    """Which direction of the transform pair a phase-space series came from."""

    FROM_KERNEL = "from_kernel"
    FROM_WEYL = "from_weyl"


@dataclass(frozen=True)
class TransformTable:
    """Phase-space series tagged with the direction that produced it.

    The term map sends a kernel entry at v-power 2j to the series term at
    p-index k = j, so for a FROM_KERNEL table every (k, s) key traces back
    to kernel entries with j = k and the same grade. FROM_WEYL marks series
    assembled on the classical side as input for weyl_quantize.
    """

    series: MomentumSeries
    origin: TransformOrigin

    @classmethod
    def from_kernel(cls, K: GradedKernel) -> "TransformTable":
        return cls(wigner_transform(K), TransformOrigin.FROM_KERNEL)


def wigner_transform(K: GradedKernel) -> MomentumSeries:
    """Phase-space series of a kernel table.

    The kernel entry (m, j, s) with coefficient A contributes exactly
        -2 mu (2j)! (-1)^j (mu/2)^(j-s) A 2^m q^m
    to the series term at p-index k = j and hbar grade s. The output is odd
    in p by construction (only p^-(2j+1) powers arise) and hbar enters only
    at even powers 2s.
    """
    mu = K.mu
    polys: dict[tuple[int, int], dict[int, Rational]] = {}
    for (m, j, s), a in K.A.items():
        c = -2 * mu * math.factorial(2 * j) * (-1) ** j * (mu / 2) ** (j - s) * a * 2**m
        row = polys.setdefault((j, s), {})
        row[m] = row.get(m, Fraction(0)) + c
    return MomentumSeries({key: QPoly(row) for key, row in polys.items()})


def classical_limit(T: MomentumSeries) -> MomentumSeries:
    """Restriction to hbar grade s = 0 (the hbar -> 0 limit)."""
    return T.restrict(lambda k, s: s == 0)


def hbar2_residual(T: MomentumSeries) -> MomentumSeries:
    """Restriction to grades s >= 1: the obstruction to a pure classical limit.

    Empty exactly when the generating system is linear (degree <= 2).
    """
    return T.restrict(lambda k, s: s >= 1)


def weyl_quantize(t: MomentumSeries, mu: RationalLike = 1) -> GradedKernel:
    """Kernel table of a classical phase-space series.

    Inverts the wigner_transform term map on s = 0 input: the monomial
    c q^a p^-(2k+1) becomes the kernel entry
        A[(a, k, 0)] = c / (-2 mu (2k)! (-1)^k (mu/2)^k 2^a).
    Quantization acts on classical observables only, so any s >= 1 term is
    rejected rather than guessing a mixed-order convention.
    """
    mu = Fraction(mu)
    graded = sorted(key for key in t.terms if key[1] >= 1)
    if graded:
        raise GradeError(f"input carries hbar grades s >= 1 at {graded}")
    table: dict[tuple[int, int, int], Rational] = {}
    max_a = 0
    max_k = 0
    for (k, _), poly in t.terms.items():
        denom_k = -2 * mu * math.factorial(2 * k) * (-1) ** k * (mu / 2) ** k
        for a, c in poly.coeffs.items():
            if a == 0:
                raise ValueError(
                    "constant-in-q term is not representable as a kernel entry (needs u-power >= 1)"
                )
            table[(a, k, 0)] = c / (denom_k * 2**a)
            max_a = max(max_a, a)
            max_k = max(max_k, k)
    truncation = (max(max_a, 2 * max_k + 1), max_k)
    return GradedKernel(table, mu, truncation)
