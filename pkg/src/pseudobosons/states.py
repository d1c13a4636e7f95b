"""Polynomial-times-Gaussian states and their exact weighted inner products.

A state is P(x, y) * exp(-q(x, y) - l1*x - l2*y) with P a complex polynomial
and q a complex quadratic form.  The class is closed under every first-order
operator, which is what makes vacuum equations, ladder constructions and
eigenrelation checks exact coefficient algebra.  Inner products reduce to
closed-form Gaussian moments; no quadrature is performed here (a quadrature
oracle exists only in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import FirstOrderOperator, OperatorExpression, WeightedSpace, L2

#: Tolerance for integral-valued checks (looser than the algebraic one:
#: determinant and inversion roundoff enter the moment recurrence).
TOL_INT = 1e-8

#: Hard cap on the polynomial degree of any state.
D_MAX = 64

#: Determinants of the real part closer to zero than this are refused.
DEGENERACY_GUARD = 1e-10


class DivergentIntegral(Exception):
    """The requested Gaussian integral does not converge.

    ``borderline`` is set when the real part of the combined quadratic form
    is within the degeneracy guard of singular, where no verdict is safe.
    """

    def __init__(self, message: str, borderline: bool = False):
        super().__init__(message)
        self.borderline = borderline


class DegreeCapExceeded(Exception):
    pass


@dataclass(frozen=True)
class QuadraticForm:
    """q(x, y) = k1*x^2 + k2*y^2 + k3*x*y with complex coefficients."""

    k1: complex = 0j
    k2: complex = 0j
    k3: complex = 0j

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3"):
            z = complex(getattr(self, name))
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise ValueError("quadratic form coefficients must be finite")
            object.__setattr__(self, name, z)

    def matrix(self) -> np.ndarray:
        """Symmetric matrix M with q(r) = r^T M r."""
        return np.array(
            [[self.k1, self.k3 / 2.0], [self.k3 / 2.0, self.k2]], dtype=complex
        )

    def conjugate(self) -> "QuadraticForm":
        return QuadraticForm(
            self.k1.conjugate(), self.k2.conjugate(), self.k3.conjugate()
        )

    def is_close(self, other: "QuadraticForm", tol: float) -> bool:
        return (
            abs(self.k1 - other.k1) <= tol
            and abs(self.k2 - other.k2) <= tol
            and abs(self.k3 - other.k3) <= tol
        )


def _trimmed(table: np.ndarray) -> np.ndarray:
    """Drop all-zero trailing rows/columns, keeping at least a 1x1 table."""
    arr = np.asarray(table, dtype=complex)
    if arr.ndim != 2:
        raise ValueError("coefficient table must be 2-dimensional")
    rows = np.nonzero(np.any(arr != 0, axis=1))[0]
    cols = np.nonzero(np.any(arr != 0, axis=0))[0]
    if rows.size == 0 or cols.size == 0:
        return np.zeros((1, 1), dtype=complex)
    return arr[: rows[-1] + 1, : cols[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class GaussianPolynomial:
    """P(x, y) * exp(-q(x, y) - l1*x - l2*y).

    ``coefficients[i, j]`` multiplies x^i y^j.  The linear exponent pair
    (l1, l2) defaults to zero; it is needed only for shifted-Gaussian duals
    of displaced ladder pairs.
    """

    coefficients: np.ndarray
    q: QuadraticForm
    l1: complex = 0j
    l2: complex = 0j

    def __post_init__(self) -> None:
        table = _trimmed(self.coefficients)
        if not np.all(np.isfinite(table)):
            raise ValueError("polynomial coefficients must be finite")
        if max(table.shape) - 1 > D_MAX:
            raise DegreeCapExceeded(
                f"polynomial degree {max(table.shape) - 1} exceeds cap {D_MAX}"
            )
        table.flags.writeable = False
        object.__setattr__(self, "coefficients", table)
        object.__setattr__(self, "l1", complex(self.l1))
        object.__setattr__(self, "l2", complex(self.l2))

    @classmethod
    def gaussian(
        cls,
        q: QuadraticForm,
        scale: complex = 1.0,
        l1: complex = 0j,
        l2: complex = 0j,
    ) -> "GaussianPolynomial":
        return cls(np.array([[scale]], dtype=complex), q, l1, l2)

    @property
    def degree(self) -> int:
        if self.is_zero(0.0):
            return 0
        return self.coefficients.shape[0] + self.coefficients.shape[1] - 2

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coefficients) <= tol))

    def same_exponent(self, other: "GaussianPolynomial", tol: float) -> bool:
        return (
            self.q.is_close(other.q, tol)
            and abs(self.l1 - other.l1) <= tol
            and abs(self.l2 - other.l2) <= tol
        )

    def __add__(self, other: "GaussianPolynomial") -> "GaussianPolynomial":
        if not self.same_exponent(other, 0.0):
            raise ValueError("cannot add states with different exponents")
        n = max(self.coefficients.shape[0], other.coefficients.shape[0])
        m = max(self.coefficients.shape[1], other.coefficients.shape[1])
        table = np.zeros((n, m), dtype=complex)
        a, b = self.coefficients, other.coefficients
        table[: a.shape[0], : a.shape[1]] += a
        table[: b.shape[0], : b.shape[1]] += b
        return GaussianPolynomial(table, self.q, self.l1, self.l2)

    def __mul__(self, scalar: complex) -> "GaussianPolynomial":
        return GaussianPolynomial(
            self.coefficients * complex(scalar), self.q, self.l1, self.l2
        )

    __rmul__ = __mul__

    def __sub__(self, other: "GaussianPolynomial") -> "GaussianPolynomial":
        return self + (-1.0) * other

    def max_coeff_diff(self, other: "GaussianPolynomial") -> float:
        return float(np.max(np.abs((self - other).coefficients)))


def apply_operator(a: FirstOrderOperator, f: GaussianPolynomial) -> GaussianPolynomial:
    """Exact action of a first-order operator on a state.

    Uses d/dx exp(-q - l.x) = -(2*k1*x + k3*y + l1) exp(-q - l.x), so the
    quadratic form and linear exponent never change and the polynomial degree
    rises by at most one.
    """
    p = f.coefficients
    n, m = p.shape
    out = np.zeros((n + 1, m + 1), dtype=complex)
    q = f.q

    if a.e != 0:
        out[:n, :m] += a.e * p
    if a.cx != 0:
        out[1 : n + 1, :m] += a.cx * p
    if a.cy != 0:
        out[:n, 1 : m + 1] += a.cy * p
    if a.dx != 0:
        # derivative of the polynomial factor
        if n > 1:
            out[: n - 1, :m] += a.dx * (np.arange(1, n)[:, None] * p[1:, :])
        # chain-rule terms from the exponent
        out[1 : n + 1, :m] += a.dx * (-2.0 * q.k1) * p
        out[:n, 1 : m + 1] += a.dx * (-q.k3) * p
        out[:n, :m] += a.dx * (-f.l1) * p
    if a.dy != 0:
        if m > 1:
            out[:n, : m - 1] += a.dy * (np.arange(1, m)[None, :] * p[:, 1:])
        out[:n, 1 : m + 1] += a.dy * (-2.0 * q.k2) * p
        out[1 : n + 1, :m] += a.dy * (-q.k3) * p
        out[:n, :m] += a.dy * (-f.l2) * p

    return GaussianPolynomial(out, q, f.l1, f.l2)


def apply_expression(
    expr: OperatorExpression, f: GaussianPolynomial
) -> GaussianPolynomial:
    """Apply a sum of operator products: factors act right-to-left."""
    total = None
    for coeff, factors in expr.terms:
        state = f
        for op in reversed(factors):
            state = apply_operator(op, state)
        state = coeff * state
        total = state if total is None else total + state
    if total is None:
        raise ValueError("empty operator expression")
    return total


@dataclass(frozen=True)
class IntegrabilityVerdict:
    """Square-integrability classification of a state in a weighted space.

    The verdict depends only on the real part of the quadratic form plus the
    weight; polynomial factors and linear exponent terms never matter.
    """

    integrable: bool
    gram_matrix_real: np.ndarray
    witness: str | None = None


def integrability_check(
    f: GaussianPolynomial, space: WeightedSpace = L2
) -> IntegrabilityVerdict:
    """Sylvester test on M = 2*Re(M(q)) + diag(c1, c2)."""
    m = 2.0 * np.real(f.q.matrix()) + np.diag([space.c1, space.c2])
    minor1 = m[0, 0]
    minor2 = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if minor1 <= 0:
        return IntegrabilityVerdict(
            False, m, f"leading 1x1 minor {minor1:.6g} is not positive"
        )
    if minor2 <= 0:
        return IntegrabilityVerdict(
            False, m, f"determinant {minor2:.6g} is not positive"
        )
    return IntegrabilityVerdict(True, m, None)


def pd_defect(matrix_real: np.ndarray) -> float:
    """Distance from positive definiteness: 0 when PD, else the magnitude of
    the most negative eigenvalue of the symmetrized matrix."""
    sym = 0.5 * (matrix_real + matrix_real.T)
    lo = float(np.min(np.linalg.eigvalsh(sym)))
    return max(0.0, -lo)


def _gaussian_base_integral(mat: np.ndarray, shift: np.ndarray) -> complex:
    """Integral of exp(-r^T mat r - shift . r) over R^2.

    Uses sequential completion of the square with principal square roots;
    this branch choice is valid whenever Re(mat) is positive definite (the
    Schur complement then also has positive real part).
    """
    a = mat[0, 0]
    schur = mat[1, 1] - mat[0, 1] * mat[1, 0] / a
    base = np.pi / (np.sqrt(a) * np.sqrt(schur))
    inv = np.linalg.inv(mat)
    return complex(base * np.exp(shift @ inv @ shift / 4.0))


def _moment_table(mean: np.ndarray, cov: np.ndarray, imax: int, jmax: int) -> np.ndarray:
    """E[x^i y^j] for the (analytically continued) Gaussian with the given
    mean and covariance, via Stein's moment recurrence."""
    table = np.zeros((imax + 1, jmax + 1), dtype=complex)
    table[0, 0] = 1.0
    for i in range(imax):  # first the j = 0 row
        val = mean[0] * table[i, 0]
        if i > 0:
            val += cov[0, 0] * i * table[i - 1, 0]
        table[i + 1, 0] = val
    for j in range(jmax):  # then column by column
        for i in range(imax + 1):
            val = mean[1] * table[i, j]
            if i > 0:
                val += cov[0, 1] * i * table[i - 1, j]
            if j > 0:
                val += cov[1, 1] * j * table[i, j - 1]
            table[i, j + 1] = val
    return table


def _conjugate_state(f: GaussianPolynomial) -> GaussianPolynomial:
    return GaussianPolynomial(
        np.conj(f.coefficients), f.q.conjugate(), f.l1.conjugate(), f.l2.conjugate()
    )


def combined_exponent_matrix(
    f: GaussianPolynomial, g: GaussianPolynomial, space: WeightedSpace
) -> np.ndarray:
    """Quadratic-form matrix of conj(f) * g * weight."""
    return (
        f.q.conjugate().matrix()
        + g.q.matrix()
        + np.diag([complex(space.c1), complex(space.c2)])
    )


def inner_product(
    f: GaussianPolynomial, g: GaussianPolynomial, space: WeightedSpace = L2
) -> complex:
    """<f, g> against the weight exp(-c1*x^2 - c2*y^2), in closed form.

    Raises DivergentIntegral when the real part of the combined quadratic
    form is not positive definite (or is within the degeneracy guard of
    singular, reported as borderline).
    """
    mat = combined_exponent_matrix(f, g, space)
    mr = np.real(mat)
    minor1 = mr[0, 0]
    det = mr[0, 0] * mr[1, 1] - mr[0, 1] * mr[1, 0]
    near = bool(abs(det) < DEGENERACY_GUARD or abs(minor1) < DEGENERACY_GUARD)
    if minor1 <= 0 or det <= 0:
        raise DivergentIntegral(
            f"combined form not positive definite (minor1={minor1:.6g}, det={det:.6g})",
            borderline=near,
        )
    if near:
        raise DivergentIntegral(
            f"combined form degenerate within guard (det={det:.6g})", borderline=True
        )

    shift = np.array(
        [f.l1.conjugate() + g.l1, f.l2.conjugate() + g.l2], dtype=complex
    )
    base = _gaussian_base_integral(mat, shift)

    fc = np.conj(f.coefficients)
    gc = g.coefficients
    # polynomial product conj(P_f) * P_g by 2-D convolution
    prod = np.zeros(
        (fc.shape[0] + gc.shape[0] - 1, fc.shape[1] + gc.shape[1] - 1), dtype=complex
    )
    for i in range(fc.shape[0]):
        for j in range(fc.shape[1]):
            if fc[i, j] != 0:
                prod[i : i + gc.shape[0], j : j + gc.shape[1]] += fc[i, j] * gc

    inv = np.linalg.inv(mat)
    mean = -0.5 * inv @ shift
    cov = 0.5 * inv
    moments = _moment_table(mean, cov, prod.shape[0] - 1, prod.shape[1] - 1)
    return complex(base * np.sum(prod * moments))
