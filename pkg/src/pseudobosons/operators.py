"""Exact algebra of first-order differential operators in two variables.

Operators have the form ``cx*x + cy*y + dx*d/dx + dy*d/dy + e`` with complex
coefficients.  The class is closed under linear combination, adjoints in
weighted L2 spaces, and has scalar commutators, so every identity checked
here is exact up to floating-point roundoff.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

#: Algebraic tolerance: identities in this module are linear or bilinear in
#: the stored coefficients, so double precision leaves ~1e-13 of headroom.
TOL_ALG = 1e-12


def _require_finite(*values: complex) -> None:
    for z in values:
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError("operator coefficients must be finite")


@dataclass(frozen=True)
class WeightedSpace:
    """Weighted L2 space over R^2 with weight exp(-c1*x^2 - c2*y^2).

    ``c1 = c2 = 0`` is the unweighted L2(R^2).  The weight enters the inner
    product and therefore the adjoint of the derivative operators.
    """

    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise ValueError("weights must be finite")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("weights must be nonnegative")

    @property
    def is_flat(self) -> bool:
        return self.c1 == 0.0 and self.c2 == 0.0


#: The unweighted space L2(R^2).
L2 = WeightedSpace(0.0, 0.0)


@dataclass(frozen=True)
class FirstOrderOperator:
    """cx*x + cy*y + dx*d/dx + dy*d/dy + e, all coefficients complex."""

    cx: complex = 0j
    cy: complex = 0j
    dx: complex = 0j
    dy: complex = 0j
    e: complex = 0j

    def __post_init__(self) -> None:
        for name in ("cx", "cy", "dx", "dy", "e"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _require_finite(self.cx, self.cy, self.dx, self.dy, self.e)

    def coefficients(self) -> tuple[complex, complex, complex, complex, complex]:
        return (self.cx, self.cy, self.dx, self.dy, self.e)

    def __add__(self, other: "FirstOrderOperator") -> "FirstOrderOperator":
        return FirstOrderOperator(
            self.cx + other.cx,
            self.cy + other.cy,
            self.dx + other.dx,
            self.dy + other.dy,
            self.e + other.e,
        )

    def __sub__(self, other: "FirstOrderOperator") -> "FirstOrderOperator":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "FirstOrderOperator":
        s = complex(scalar)
        return FirstOrderOperator(
            s * self.cx, s * self.cy, s * self.dx, s * self.dy, s * self.e
        )

    __rmul__ = __mul__

    def __neg__(self) -> "FirstOrderOperator":
        return (-1.0) * self

    def max_coeff_diff(self, other: "FirstOrderOperator") -> float:
        return max(
            abs(a - b) for a, b in zip(self.coefficients(), other.coefficients())
        )

    def is_close(self, other: "FirstOrderOperator", tol: float = TOL_ALG) -> bool:
        return self.max_coeff_diff(other) <= tol


# The five generators.
X = FirstOrderOperator(cx=1.0)
Y = FirstOrderOperator(cy=1.0)
DX = FirstOrderOperator(dx=1.0)
DY = FirstOrderOperator(dy=1.0)
ONE = FirstOrderOperator(e=1.0)
ZERO = FirstOrderOperator()


def commutator(a: FirstOrderOperator, b: FirstOrderOperator) -> complex:
    """Scalar s with [a, b] = s * identity.

    For degree-1 operators the commutator is always a multiple of the
    identity; the only nonvanishing brackets among generators are
    [d/dx, x] = [d/dy, y] = 1.
    """
    return a.dx * b.cx + a.dy * b.cy - b.dx * a.cx - b.dy * a.cy


def adjoint(a: FirstOrderOperator, space: WeightedSpace = L2) -> FirstOrderOperator:
    """Adjoint of ``a`` in the given weighted space.

    Multiplication operators are self-adjoint, while the derivatives pick up
    weight corrections: (d/dx)* = -d/dx + 2*c1*x and (d/dy)* = -d/dy + 2*c2*y.
    The map is an involution on this operator class for every space.
    """
    return FirstOrderOperator(
        cx=a.cx.conjugate() + 2.0 * space.c1 * a.dx.conjugate(),
        cy=a.cy.conjugate() + 2.0 * space.c2 * a.dy.conjugate(),
        dx=-a.dx.conjugate(),
        dy=-a.dy.conjugate(),
        e=a.e.conjugate(),
    )


@dataclass(frozen=True)
class OperatorExpression:
    """Finite sum of scaled products of first-order operators.

    ``terms`` is a tuple of (coefficient, factors) pairs; each factors tuple
    is applied right-to-left.  No normal ordering is performed: application
    to a state is sequential and unambiguous.
    """

    terms: tuple[tuple[complex, tuple[FirstOrderOperator, ...]], ...]

    def __post_init__(self) -> None:
        norm = tuple(
            (complex(c), tuple(fs)) for c, fs in self.terms
        )
        for c, fs in norm:
            _require_finite(c)
            if not fs:
                raise ValueError("each term needs at least one factor")
        object.__setattr__(self, "terms", norm)

    @classmethod
    def from_operator(cls, op: FirstOrderOperator) -> "OperatorExpression":
        return cls(((1.0 + 0j, (op,)),))

    @classmethod
    def identity(cls) -> "OperatorExpression":
        return cls.from_operator(ONE)

    def __add__(self, other: "OperatorExpression") -> "OperatorExpression":
        return OperatorExpression(self.terms + other.terms)

    def __mul__(self, scalar: complex) -> "OperatorExpression":
        s = complex(scalar)
        return OperatorExpression(tuple((s * c, fs) for c, fs in self.terms))

    __rmul__ = __mul__


def compose(a: OperatorExpression, b: OperatorExpression) -> OperatorExpression:
    """Product a*b: concatenates factor lists term by term (a acts last)."""
    terms = []
    for ca, fa in a.terms:
        for cb, fb in b.terms:
            terms.append((ca * cb, fa + fb))
    return OperatorExpression(tuple(terms))


def compose_ops(a: FirstOrderOperator, b: FirstOrderOperator) -> OperatorExpression:
    return compose(OperatorExpression.from_operator(a), OperatorExpression.from_operator(b))


@dataclass(frozen=True)
class CommutatorCheck:
    name: str
    value: complex
    target: complex
    deviation: float
    passed: bool


@dataclass(frozen=True)
class AdjointCompatCheck:
    name: str
    max_coeff_diff: float
    passed: bool


@dataclass(frozen=True)
class CcrReport:
    """Result of checking the six pseudo-boson commutators plus the two
    adjoint compatibility relations b_plus = a_minus^dagger and
    b_minus = a_plus^dagger (in unweighted L2)."""

    commutators: tuple[CommutatorCheck, ...]
    compatibility: tuple[AdjointCompatCheck, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.commutators) and all(
            c.passed for c in self.compatibility
        )

    @property
    def max_deviation(self) -> float:
        devs = [c.deviation for c in self.commutators]
        devs += [c.max_coeff_diff for c in self.compatibility]
        return max(devs)


def check_pseudo_boson_ccr(
    a_plus: FirstOrderOperator,
    a_minus: FirstOrderOperator,
    b_plus: FirstOrderOperator,
    b_minus: FirstOrderOperator,
    tol: float = TOL_ALG,
) -> CcrReport:
    """Check the pseudo-boson commutation pattern of a ladder quadruple.

    Targets: [a+, b+] = [a-, b-] = 1 and the four cross brackets vanish.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    pairs = (
        ("[a+,b+]", a_plus, b_plus, 1.0 + 0j),
        ("[a-,b-]", a_minus, b_minus, 1.0 + 0j),
        ("[a+,a-]", a_plus, a_minus, 0j),
        ("[a+,b-]", a_plus, b_minus, 0j),
        ("[a-,b+]", a_minus, b_plus, 0j),
        ("[b+,b-]", b_plus, b_minus, 0j),
    )
    comms = []
    for name, lhs, rhs, target in pairs:
        value = commutator(lhs, rhs)
        dev = abs(value - target)
        comms.append(CommutatorCheck(name, value, target, dev, dev <= tol))
    compat = []
    for name, op, expected in (
        ("b+ = adj(a-)", b_plus, adjoint(a_minus, L2)),
        ("b- = adj(a+)", b_minus, adjoint(a_plus, L2)),
    ):
        diff = op.max_coeff_diff(expected)
        compat.append(AdjointCompatCheck(name, diff, diff <= tol))
    return CcrReport(tuple(comms), tuple(compat), tol)


def sqrt_complex(z: complex) -> complex:
    """Principal branch square root (branch cut on the negative real axis)."""
    return cmath.sqrt(z)
