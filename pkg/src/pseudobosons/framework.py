"""Two-dimensional pseudo-boson machinery on truncated ladder families.

Builds ladder families from a vacuum and two raising operators, checks the
number-operator eigenrelations, assembles Gram matrices and the truncated
metric operators, and verifies the intertwining relations.  A displaced
ladder fixture (b_j = a_j^dagger + lambda_j) provides a regular model where
every assumption holds with closed-form states; the damped-oscillator ladder
demonstrates the divergence path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    FirstOrderOperator,
    L2,
    OperatorExpression,
    WeightedSpace,
    adjoint,
)
from .states import (
    D_MAX,
    DegreeCapExceeded,
    GaussianPolynomial,
    QuadraticForm,
    apply_expression,
    apply_operator,
    inner_product,
)
from .vacuum import solve_vacuum

#: Default tolerance for truncation-level identities on the fixture.
TOL_TRUNC = 1e-6

#: Residuals below this are indistinguishable from integration roundoff;
#: monotonicity statements clamp to this floor.
NOISE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class LadderFamily:
    """States s[n][l] = raising_1^n raising_2^l vacuum / sqrt(n! l!)."""

    vacuum: GaussianPolynomial
    raising_1: FirstOrderOperator
    raising_2: FirstOrderOperator
    n_max: int
    l_max: int
    states: tuple[tuple[GaussianPolynomial, ...], ...]

    @property
    def dimension(self) -> int:
        return (self.n_max + 1) * (self.l_max + 1)

    def state(self, n: int, l: int) -> GaussianPolynomial:
        return self.states[n][l]

    def flat_index(self, n: int, l: int) -> int:
        return n * (self.l_max + 1) + l

    def multi_indices(self):
        return [
            (n, l) for n in range(self.n_max + 1) for l in range(self.l_max + 1)
        ]


def build_ladder(
    vacuum: GaussianPolynomial,
    b1: FirstOrderOperator,
    b2: FirstOrderOperator,
    n_max: int,
    l_max: int,
) -> LadderFamily:
    if vacuum.is_zero(0.0):
        raise ValueError("vacuum must be nonzero")
    if n_max < 0 or l_max < 0:
        raise ValueError("truncation orders must be nonnegative")
    if vacuum.degree + n_max + l_max > D_MAX:
        raise DegreeCapExceeded(
            f"ladder would reach degree {vacuum.degree + n_max + l_max} > {D_MAX}"
        )
    column = [vacuum]
    for l in range(1, l_max + 1):
        column.append(apply_operator(b2, column[-1]) * (1.0 / math.sqrt(l)))
    rows = [tuple(column)]
    for n in range(1, n_max + 1):
        prev = rows[-1]
        rows.append(
            tuple(
                apply_operator(b1, state) * (1.0 / math.sqrt(n)) for state in prev
            )
        )
    return LadderFamily(vacuum, b1, b2, n_max, l_max, tuple(rows))


@dataclass(frozen=True)
class EigenrelationReport:
    residuals_1: np.ndarray
    residuals_2: np.ndarray
    tol: float

    @property
    def max_residual(self) -> float:
        return float(max(self.residuals_1.max(), self.residuals_2.max()))

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def check_number_eigenrelations(
    family: LadderFamily,
    n1: OperatorExpression,
    n2: OperatorExpression,
    tol: float,
) -> EigenrelationReport:
    """Residuals of N1 s[n,l] = n s[n,l] and N2 s[n,l] = l s[n,l]."""
    r1 = np.zeros((family.n_max + 1, family.l_max + 1))
    r2 = np.zeros_like(r1)
    for n in range(family.n_max + 1):
        for l in range(family.l_max + 1):
            state = family.state(n, l)
            r1[n, l] = apply_expression(n1, state).max_coeff_diff(float(n) * state)
            r2[n, l] = apply_expression(n2, state).max_coeff_diff(float(l) * state)
    return EigenrelationReport(r1, r2, tol)


def _raw_cross_gram(
    family_phi: LadderFamily, family_psi: LadderFamily, space: WeightedSpace
) -> np.ndarray:
    if (family_phi.n_max, family_phi.l_max) != (family_psi.n_max, family_psi.l_max):
        raise ValueError("families must share the truncation")
    dim = family_phi.dimension
    g = np.zeros((dim, dim), dtype=complex)
    for n, l in family_psi.multi_indices():
        i = family_psi.flat_index(n, l)
        psi = family_psi.state(n, l)
        for m, k in family_phi.multi_indices():
            j = family_phi.flat_index(m, k)
            g[i, j] = inner_product(psi, family_phi.state(m, k), space)
    return g


def gram_matrix(
    family_phi: LadderFamily, family_psi: LadderFamily, space: WeightedSpace = L2
) -> np.ndarray:
    """Cross Gram <psi[n,l], phi[m,k]>, normalized to unit vacuum pairing.

    For a genuine biorthogonal pair this is the identity matrix; a
    DivergentIntegral from the underlying inner products propagates, which
    on the damped-oscillator ladder is itself the negative result.
    """
    g = _raw_cross_gram(family_phi, family_psi, space)
    g0 = g[0, 0]
    if abs(g0) < 1e-300:
        raise ValueError("vacua are orthogonal; cannot normalize the pairing")
    return g / g0


def _self_gram(family: LadderFamily, space: WeightedSpace) -> np.ndarray:
    dim = family.dimension
    g = np.zeros((dim, dim), dtype=complex)
    idx = family.multi_indices()
    for n, l in idx:
        i = family.flat_index(n, l)
        for m, k in idx:
            j = family.flat_index(m, k)
            if j < i:
                g[i, j] = g[j, i].conjugate()
                continue
            g[i, j] = inner_product(family.state(n, l), family.state(m, k), space)
    return g


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Complex matrix acting on the truncated ladder index (n, l)."""

    n_max: int
    l_max: int
    entries: np.ndarray

    @property
    def dimension(self) -> int:
        return (self.n_max + 1) * (self.l_max + 1)

    def __post_init__(self) -> None:
        dim = self.dimension
        if self.entries.shape != (dim, dim):
            raise ValueError("entry matrix does not match the truncation")


@dataclass(frozen=True, eq=False)
class SOperatorPair:
    """Truncated metric operators in ladder coordinates.

    ``s_phi`` has entries <phi_a, phi_b> and ``s_psi`` entries
    <psi'_a, psi'_b> with the dual family rescaled so the vacuum pairing is
    one.  ``product_residual`` is the deviation from identity of the product
    restricted to the truncated families (the finite-rank content of the
    inverse relation; it consists purely of integration error).
    ``inverse_window_residual`` compares s_psi against the inverse of s_phi
    on the low-index window, the quantity whose decay with truncation size
    witnesses convergence of the metric series.
    """

    s_phi: TruncatedOperator
    s_psi: TruncatedOperator
    cross_gram: np.ndarray
    product_residual: float
    inverse_window_residual: float
    hermiticity_defect: float
    min_eigenvalue_phi: float
    min_eigenvalue_psi: float

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue_phi > 0 and self.min_eigenvalue_psi > 0


def _window_indices(n_max: int, l_max: int, width: int = 2) -> np.ndarray:
    keep = []
    for n in range(min(width, n_max + 1)):
        for l in range(min(width, l_max + 1)):
            keep.append(n * (l_max + 1) + l)
    return np.array(keep, dtype=int)


def build_S_operators(
    family_phi: LadderFamily,
    family_psi: LadderFamily,
    space: WeightedSpace = L2,
) -> SOperatorPair:
    raw = _raw_cross_gram(family_phi, family_psi, space)
    g0 = raw[0, 0]
    if abs(g0) < 1e-300:
        raise ValueError("vacua are orthogonal; cannot normalize the pairing")
    cross = raw / g0

    g_phi = _self_gram(family_phi, space)
    g_psi = _self_gram(family_psi, space) / abs(g0) ** 2

    dim = family_phi.dimension
    eye = np.eye(dim)
    # Restricted to the truncated families the composed metrics act through
    # the cross pairing alone, so the product identity reduces to these two
    # measured matrices.
    r1 = np.max(np.abs(cross @ cross.conj().T - eye))
    r2 = np.max(np.abs(cross.conj().T @ cross - eye))
    product_residual = float(max(r1, r2))

    win = _window_indices(family_phi.n_max, family_phi.l_max)
    inv_phi = np.linalg.inv(g_phi)
    inverse_window_residual = float(
        np.max(np.abs((inv_phi - g_psi)[np.ix_(win, win)]))
    )

    herm = max(
        float(np.max(np.abs(g_phi - g_phi.conj().T))),
        float(np.max(np.abs(g_psi - g_psi.conj().T))),
    )
    eig_phi = float(np.min(np.linalg.eigvalsh(0.5 * (g_phi + g_phi.conj().T))))
    eig_psi = float(np.min(np.linalg.eigvalsh(0.5 * (g_psi + g_psi.conj().T))))

    return SOperatorPair(
        s_phi=TruncatedOperator(family_phi.n_max, family_phi.l_max, g_phi),
        s_psi=TruncatedOperator(family_psi.n_max, family_psi.l_max, g_psi),
        cross_gram=cross,
        product_residual=product_residual,
        inverse_window_residual=inverse_window_residual,
        hermiticity_defect=herm,
        min_eigenvalue_phi=eig_phi,
        min_eigenvalue_psi=eig_psi,
    )


def truncated_matrix(
    expr: OperatorExpression,
    family_phi: LadderFamily,
    family_psi: LadderFamily,
    space: WeightedSpace = L2,
) -> TruncatedOperator:
    """Matrix of an operator in ladder coordinates: <psi'_a, expr phi_b>."""
    raw = np.zeros((family_phi.dimension,) * 2, dtype=complex)
    images = {
        (m, k): apply_expression(expr, family_phi.state(m, k))
        for m, k in family_phi.multi_indices()
    }
    for n, l in family_psi.multi_indices():
        i = family_psi.flat_index(n, l)
        psi = family_psi.state(n, l)
        for m, k in family_phi.multi_indices():
            raw[i, family_phi.flat_index(m, k)] = inner_product(
                psi, images[(m, k)], space
            )
    g0 = inner_product(family_psi.state(0, 0), family_phi.state(0, 0), space)
    return TruncatedOperator(family_phi.n_max, family_phi.l_max, raw / g0)


def number_matrix(family: LadderFamily, which: int) -> TruncatedOperator:
    """Exact diagonal matrix of a number operator on its own ladder."""
    diag = np.zeros(family.dimension, dtype=complex)
    for n, l in family.multi_indices():
        diag[family.flat_index(n, l)] = n if which == 1 else l
    return TruncatedOperator(family.n_max, family.l_max, np.diag(diag))


@dataclass(frozen=True, eq=False)
class IntertwiningReport:
    """Residuals of the metric intertwining relations on the truncation.

    The ladder leaks one index step across the truncation edge, so matrix
    products are exact only away from the boundary.  ``interior_residual``
    is taken over index pairs whose neighborhood stays inside the
    truncation; ``full_residual`` includes the edge and is reported for
    transparency.
    """

    interior_residual: float
    full_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.interior_residual <= self.tol


def check_intertwining(
    s_ops: SOperatorPair,
    n_matrices: tuple[TruncatedOperator, TruncatedOperator],
    frak_matrices: tuple[TruncatedOperator, TruncatedOperator],
    tol: float = TOL_TRUNC,
) -> IntertwiningReport:
    """Check s_psi N_j = frakN_j s_psi and N_j s_phi = s_phi frakN_j."""
    mats = [s_ops.s_phi, s_ops.s_psi, *n_matrices, *frak_matrices]
    shapes = {(m.n_max, m.l_max) for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"mismatched truncations: {sorted(shapes)}")
    n_max, l_max = shapes.pop()

    interior = np.array(
        [
            n * (l_max + 1) + l
            for n in range(n_max)
            for l in range(l_max)
        ],
        dtype=int,
    )
    if interior.size == 0:
        raise ValueError("truncation too small to have an interior")

    full = 0.0
    inner = 0.0
    s_phi, s_psi = s_ops.s_phi.entries, s_ops.s_psi.entries
    for nm, fm in zip(n_matrices, frak_matrices):
        r_a = s_psi @ nm.entries - fm.entries @ s_psi
        r_b = nm.entries @ s_phi - s_phi @ fm.entries
        for r in (r_a, r_b):
            full = max(full, float(np.max(np.abs(r))))
            inner = max(
                inner, float(np.max(np.abs(r[np.ix_(interior, interior)])))
            )
    return IntertwiningReport(inner, full, tol)


@dataclass(frozen=True)
class FixtureModel:
    """Displaced ladder pair: b_j = a_j^dagger + lambda_j on L2(R^2).

    The commutation pattern of a regular two-dimensional pseudo-boson system
    holds exactly, both vacua are (shifted) Gaussians in L2, and all Gram
    data has closed form, which makes this the reference model for the
    truncated framework checks.
    """

    lambda1: complex
    lambda2: complex
    a1: FirstOrderOperator
    a2: FirstOrderOperator
    b1: FirstOrderOperator
    b2: FirstOrderOperator


def make_fixture(lambda1: complex, lambda2: complex) -> FixtureModel:
    rt = 1.0 / math.sqrt(2.0)
    a1 = FirstOrderOperator(cx=rt, dx=rt)
    a2 = FirstOrderOperator(cy=rt, dy=rt)
    b1 = adjoint(a1, L2) + complex(lambda1) * FirstOrderOperator(e=1.0)
    b2 = adjoint(a2, L2) + complex(lambda2) * FirstOrderOperator(e=1.0)
    return FixtureModel(complex(lambda1), complex(lambda2), a1, a2, b1, b2)


def fixture_families(
    fixture: FixtureModel, n_max: int, l_max: int
) -> tuple[LadderFamily, LadderFamily]:
    """The two ladder families of the fixture.

    The primary vacuum is the unit Gaussian; the dual vacuum solves the
    shifted equations adjoint(b_j) psi = 0 and is a displaced Gaussian.
    """
    scale = 1.0 / math.sqrt(math.pi)
    phi_vac = GaussianPolynomial.gaussian(QuadraticForm(0.5, 0.5, 0.0), scale)

    dual = solve_vacuum(
        adjoint(fixture.b1, L2), adjoint(fixture.b2, L2), allow_shift=True
    )
    if not dual.solved:
        raise RuntimeError("fixture dual vacuum failed to solve")
    psi_vac = GaussianPolynomial.gaussian(
        dual.q, scale, l1=dual.shift[0], l2=dual.shift[1]
    )

    family_phi = build_ladder(phi_vac, fixture.b1, fixture.b2, n_max, l_max)
    family_psi = build_ladder(
        psi_vac, adjoint(fixture.a1, L2), adjoint(fixture.a2, L2), n_max, l_max
    )
    return family_phi, family_psi


def fixture_number_expressions(fixture: FixtureModel):
    from .operators import compose_ops

    n1 = compose_ops(fixture.b1, fixture.a1)
    n2 = compose_ops(fixture.b2, fixture.a2)
    frak1 = compose_ops(adjoint(fixture.a1, L2), adjoint(fixture.b1, L2))
    frak2 = compose_ops(adjoint(fixture.a2, L2), adjoint(fixture.b2, L2))
    return (n1, n2), (frak1, frak2)


def qdho_family(quad, n_max: int, l_max: int) -> LadderFamily:
    """Formal ladder family of the damped-oscillator quadruple.

    Requires parameters satisfying the shared-vacuum ratio condition; the
    family is algebraically well formed regardless of integrability.
    """
    vac = solve_vacuum(quad.a_plus, quad.a_minus)
    if vac.q is None:
        raise ValueError(
            "no joint Gaussian vacuum: ratio condition violated "
            f"(residual {vac.residual:.3e})"
        )
    vacuum = GaussianPolynomial.gaussian(vac.q)
    return build_ladder(vacuum, quad.b_plus, quad.b_minus, n_max, l_max)
