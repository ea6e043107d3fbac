"""Exact arithmetic substrate: rationals, q-polynomials, and graded series tables.

Everything in this module is exact. Floating point enters the package only in
the numerics layer; all recurrence and transform work happens on Rational
values so that equality tests between independently computed tables are
meaningful.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

# Arbitrary-precision rational scalar. fractions.Fraction already guarantees
# lowest terms, positive denominator, exact arithmetic, and errors on
# division by zero, which is the full contract needed here.
Rational = Fraction

RationalLike = Rational | int | str


def parse_rational(text: str) -> Rational:
    """Parse "num/den" or a plain integer string ("-3/4", "5")."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(r: RationalLike) -> str:
    """Render a rational as "num/den", or "num" when the denominator is 1."""
    return str(Fraction(r))


class QPoly:
    """Univariate polynomial in q with Rational coefficients.

    Coefficients are stored sparsely as degree -> Rational with no explicit
    zeros; the zero polynomial has an empty table. Instances are treated as
    immutable: no method mutates self, and the coefficient table must not be
    modified after construction.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, RationalLike] | Iterable[tuple[int, RationalLike]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        table: dict[int, Rational] = {}
        for deg, c in items:
            deg = int(deg)
            if deg < 0:
                raise ValueError(f"negative degree {deg}")
            c = Fraction(c)
            if c:
                acc = table.get(deg, Fraction(0)) + c
                if acc:
                    table[deg] = acc
                else:
                    table.pop(deg, None)
        self.coeffs = table

    @classmethod
    def zero(cls) -> "QPoly":
        return cls()

    @classmethod
    def constant(cls, c: RationalLike) -> "QPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, deg: int, c: RationalLike = 1) -> "QPoly":
        return cls({deg: c})

    def degree(self) -> int:
        """Largest stored degree; -1 for the zero polynomial."""
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, deg: int) -> Rational:
        return self.coeffs.get(deg, Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __neg__(self) -> "QPoly":
        return QPoly({d: -c for d, c in self.coeffs.items()})

    def __add__(self, other: "QPoly") -> "QPoly":
        if not isinstance(other, QPoly):
            return NotImplemented
        table = dict(self.coeffs)
        for d, c in other.coeffs.items():
            acc = table.get(d, Fraction(0)) + c
            if acc:
                table[d] = acc
            else:
                table.pop(d, None)
        out = QPoly()
        out.coeffs.update(table)
        return out

    def __sub__(self, other: "QPoly") -> "QPoly":
        return self + (-other)

    def __mul__(self, other: "QPoly | RationalLike") -> "QPoly":
        if isinstance(other, QPoly):
            table: dict[int, Rational] = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in other.coeffs.items():
                    d = d1 + d2
                    acc = table.get(d, Fraction(0)) + c1 * c2
                    if acc:
                        table[d] = acc
                    else:
                        table.pop(d, None)
            out = QPoly()
            out.coeffs.update(table)
            return out
        scale = Fraction(other)
        if not scale:
            return QPoly()
        return QPoly({d: c * scale for d, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QPoly":
        if n < 0:
            raise ValueError("negative power")
        result = QPoly.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def derivative(self) -> "QPoly":
        return QPoly({d - 1: d * c for d, c in self.coeffs.items() if d >= 1})

    def __call__(self, x):
        """Evaluate at x; exact for Fraction/int arguments, float otherwise."""
        total = Fraction(0) if isinstance(x, (Fraction, int)) else 0.0
        for d, c in self.coeffs.items():
            total += c * x**d if isinstance(x, (Fraction, int)) else float(c) * x**d
        return total

    def __repr__(self) -> str:
        if not self.coeffs:
            return "QPoly(0)"
        parts = [f"{c}*q^{d}" for d, c in sorted(self.coeffs.items())]
        return "QPoly(" + " + ".join(parts) + ")"


def poly_shift(p: QPoly, x: RationalLike) -> QPoly:
    """Return the polynomial t -> p(t + x), expanded exactly."""
    x = Fraction(x)
    if not x:
        return p
    table: dict[int, Rational] = {}
    for d, c in p.coeffs.items():
        # binomial expansion of c*(t+x)^d, building the row incrementally
        term = c
        for i in range(d, -1, -1):
            acc = table.get(i, Fraction(0)) + term
            if acc:
                table[i] = acc
            else:
                table.pop(i, None)
            if i > 0:
                term = term * x * i / (d - i + 1)
    return QPoly(table)


def poly_antideriv(p: QPoly) -> QPoly:
    """Exact antiderivative with zero constant term."""
    return QPoly({d + 1: c / (d + 1) for d, c in p.coeffs.items()})


def poly_defint(p: QPoly, lo: RationalLike, hi: RationalLike) -> Rational:
    """Exact definite integral of p over [lo, hi]."""
    anti = poly_antideriv(p)
    return anti(Fraction(hi)) - anti(Fraction(lo))


class MomentumSeries:
    """Phase-space series: sum over (k, s) of P(q) * p^-(2k+1) * hbar^(2s).

    The key (k, s) holds the q-polynomial multiplying p^-(2k+1) at hbar
    grade 2s. The classical part is the restriction to s = 0. Zero
    polynomials are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], QPoly] | Iterable[tuple[tuple[int, int], QPoly]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        table: dict[tuple[int, int], QPoly] = {}
        for (k, s), poly in items:
            k, s = int(k), int(s)
            if k < 0 or s < 0:
                raise ValueError(f"invalid series key (k={k}, s={s})")
            if not isinstance(poly, QPoly):
                raise TypeError("series terms must be QPoly")
            if poly:
                prev = table.get((k, s))
                merged = prev + poly if prev is not None else poly
                if merged:
                    table[(k, s)] = merged
                else:
                    table.pop((k, s), None)
        self.terms = table

    def term(self, k: int, s: int) -> QPoly:
        return self.terms.get((k, s), QPoly.zero())

    def items(self) -> Iterator[tuple[tuple[int, int], QPoly]]:
        return iter(sorted(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def max_k(self) -> int:
        return max((k for k, _ in self.terms), default=-1)

    def max_s(self) -> int:
        return max((s for _, s in self.terms), default=-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MomentumSeries):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset((key, poly) for key, poly in self.terms.items()))

    def __add__(self, other: "MomentumSeries") -> "MomentumSeries":
        merged = list(self.terms.items()) + list(other.terms.items())
        return MomentumSeries(merged)

    def __neg__(self) -> "MomentumSeries":
        return MomentumSeries({key: -poly for key, poly in self.terms.items()})

    def __sub__(self, other: "MomentumSeries") -> "MomentumSeries":
        return self + (-other)

    def restrict(self, keep) -> "MomentumSeries":
        """Sub-series of the terms whose key (k, s) satisfies keep(k, s)."""
        return MomentumSeries({key: poly for key, poly in self.terms.items() if keep(*key)})

    def evaluate(self, q: float, p: float, hbar: float = 1.0) -> float:
        """Numeric value of the truncated series at a phase point."""
        if p == 0:
            raise ZeroDivisionError("series has only negative powers of p")
        total = 0.0
        for (k, s), poly in self.terms.items():
            total += poly(float(q)) * p ** -(2 * k + 1) * hbar ** (2 * s)
        return total

    def __repr__(self) -> str:
        keys = sorted(self.terms)
        return f"MomentumSeries({len(self.terms)} terms, keys={keys})"


class GradedKernel:
    """Coefficient table of the kernel factor T in characteristic coordinates.

    Represents T(u, v) = sum over entries of
        A[(m, j, s)] * (mu / 2 hbar^2)^(j-s) * u^m * v^(2j)
    with u = q + q' and v = q - q'. Only even powers of v are representable;
    that parity is structural, not checked at runtime. Index ranges: m >= 1,
    j >= 0, 0 <= s <= max(j-1, 0). Entries are exact rationals and never
    explicitly zero.

    Solver outputs additionally satisfy A[(m, 0, 0)] = 1/4 when m = 1 and 0
    otherwise; that is a property of solutions (verified by boundary_check),
    not of the container, so deliberately corrupted tables can be built for
    negative controls.

    Instances are immutable by convention; use replace_entry to derive
    modified copies.
    """

    __slots__ = ("A", "mu", "truncation", "potential")

    def __init__(
        self,
        entries: Mapping[tuple[int, int, int], RationalLike] | Iterable[tuple[tuple[int, int, int], RationalLike]],
        mu: RationalLike,
        truncation: tuple[int, int],
        potential: QPoly | None = None,
    ):
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[tuple[int, int, int], Rational] = {}
        for (m, j, s), c in items:
            m, j, s = int(m), int(j), int(s)
            if m < 1 or j < 0 or s < 0 or s > max(j - 1, 0):
                raise ValueError(f"invalid kernel index (m={m}, j={j}, s={s})")
            c = Fraction(c)
            if c:
                table[(m, j, s)] = c
        self.A = table
        self.mu = Fraction(mu)
        mmax, jmax = truncation
        self.truncation = (int(mmax), int(jmax))
        self.potential = potential

    def entry(self, m: int, j: int, s: int) -> Rational:
        return self.A.get((m, j, s), Fraction(0))

    def items(self) -> Iterator[tuple[tuple[int, int, int], Rational]]:
        return iter(sorted(self.A.items()))

    def s_slice(self, s: int) -> dict[tuple[int, int], Rational]:
        """The (m, j) -> coefficient map at a fixed hbar grade."""
        return {(m, j): c for (m, j, s1), c in self.A.items() if s1 == s}

    def max_grade(self) -> int:
        return max((s for (_, _, s) in self.A), default=0)

    def replace_entry(self, m: int, j: int, s: int, coeff: RationalLike) -> "GradedKernel":
        """New table with one entry overridden (used for negative controls)."""
        table = dict(self.A)
        c = Fraction(coeff)
        if c:
            table[(m, j, s)] = c
        else:
            table.pop((m, j, s), None)
        return GradedKernel(table, self.mu, self.truncation, self.potential)

    def tvalue(self, u: float, v: float, hbar: float) -> float:
        """Float value of the truncated T(u, v)."""
        w = float(self.mu) / (2.0 * hbar * hbar)
        total = 0.0
        for (m, j, s), c in self.A.items():
            total += float(c) * w ** (j - s) * u**m * v ** (2 * j)
        return total

    def __eq__(self, other: object) -> bool:
        """Entry-wise equality of the tables (and mass); truncation metadata
        and the potential tag are not part of value identity."""
        if not isinstance(other, GradedKernel):
            return NotImplemented
        return self.A == other.A and self.mu == other.mu

    def __repr__(self) -> str:
        mmax, jmax = self.truncation
        return f"GradedKernel({len(self.A)} entries, mu={self.mu}, Mmax={mmax}, Jmax={jmax})"
