"""Joint Gaussian vacuum solver for pairs of first-order lowering operators.

Solving A1 f = A2 f = 0 over f = exp(-k1*x^2 - k2*y^2 - k3*x*y) reduces to a
stacked 4x3 complex linear system in (k1, k2, k3); a least-squares solve with
singular-value analysis turns "no solution exists" into a continuous,
reportable consistency defect instead of a bare failure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .operators import TOL_ALG, FirstOrderOperator
from .states import QuadraticForm

#: Residuals between the solved threshold and this are neither accepted nor
#: rejected; they are flagged for inspection.
BORDERLINE_RESIDUAL = 1e-8


class DegenerateParamsError(ValueError):
    pass


class VacuumStatus(enum.Enum):
    SOLVED = "solved"
    BORDERLINE = "borderline"
    NO_SOLUTION = "no_solution"


@dataclass(frozen=True)
class VacuumResult:
    """Outcome of a joint-vacuum solve.

    ``residual`` is the max modulus of the leftover linear coefficients after
    applying both operators to the candidate Gaussian; ``consistency_defect``
    is the projection of the right-hand side onto the least-reachable
    direction of the stacked system (zero iff the 4x3 system is consistent).
    """

    status: VacuumStatus
    q: QuadraticForm | None
    shift: tuple[complex, complex]
    residual: float
    consistency_defect: complex
    diagnostic: str = ""

    @property
    def solved(self) -> bool:
        return self.status is VacuumStatus.SOLVED


def _operator_rows(a: FirstOrderOperator, with_shift: bool):
    """Rows of the linear system expressing ``a exp(-q - l.r) = 0``.

    Vanishing of the x and y coefficients gives, per operator,
    cx - 2*k1*dx - k3*dy = 0 and cy - k3*dx - 2*k2*dy = 0; in shift mode the
    constant coefficient adds e - dx*l1 - dy*l2 = 0.
    """
    width = 5 if with_shift else 3
    rows = np.zeros((3 if with_shift else 2, width), dtype=complex)
    rhs = np.zeros(3 if with_shift else 2, dtype=complex)
    rows[0, 0] = 2.0 * a.dx
    rows[0, 2] = a.dy
    rhs[0] = a.cx
    rows[1, 1] = 2.0 * a.dy
    rows[1, 2] = a.dx
    rhs[1] = a.cy
    if with_shift:
        rows[2, 3] = a.dx
        rows[2, 4] = a.dy
        rhs[2] = a.e
    return rows, rhs


def solve_vacuum(
    a1: FirstOrderOperator,
    a2: FirstOrderOperator,
    *,
    allow_shift: bool = False,
    tol: float = TOL_ALG,
) -> VacuumResult:
    """Solve a1 f = a2 f = 0 over the Gaussian ansatz.

    With ``allow_shift`` the ansatz is exp(-q - l1*x - l2*y), which absorbs
    constant terms in the operators; otherwise both operators must have no
    constant part.
    """
    if not allow_shift:
        for name, op in (("a1", a1), ("a2", a2)):
            if abs(op.e) > tol:
                raise ValueError(
                    f"{name} has a constant term; use allow_shift=True"
                )
    for name, op in (("a1", a1), ("a2", a2)):
        if max(abs(op.dx), abs(op.dy)) <= tol:
            if max(abs(op.cx), abs(op.cy)) > tol:
                return VacuumResult(
                    VacuumStatus.NO_SOLUTION,
                    None,
                    (0j, 0j),
                    float("inf"),
                    complex(max(abs(op.cx), abs(op.cy))),
                    f"{name} is a pure multiplication operator; no Gaussian vacuum",
                )
            return VacuumResult(
                VacuumStatus.NO_SOLUTION,
                None,
                (0j, 0j),
                float("inf"),
                complex(abs(op.e)),
                f"{name} is a scalar; vacuum equation degenerate",
            )

    rows1, rhs1 = _operator_rows(a1, allow_shift)
    rows2, rhs2 = _operator_rows(a2, allow_shift)
    system = np.vstack([rows1, rows2])
    rhs = np.concatenate([rhs1, rhs2])

    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    leftover = system @ solution - rhs
    residual = float(np.max(np.abs(leftover)))

    u, _s, _vh = np.linalg.svd(system)
    defect = complex(np.conj(u[:, -1]) @ rhs)

    q = QuadraticForm(solution[0], solution[1], solution[2])
    shift = (solution[3], solution[4]) if allow_shift else (0j, 0j)

    if residual <= tol:
        status = VacuumStatus.SOLVED
    elif residual <= BORDERLINE_RESIDUAL:
        status = VacuumStatus.BORDERLINE
    else:
        status = VacuumStatus.NO_SOLUTION
    return VacuumResult(
        status,
        q if status is not VacuumStatus.NO_SOLUTION else None,
        shift,
        residual,
        defect,
        "" if status is VacuumStatus.SOLVED else "stacked system inconsistent"
        if status is VacuumStatus.NO_SOLUTION
        else "residual in borderline band",
    )


def ratio_condition_defect(params) -> complex:
    """omega_+/omega_- + (delta/conj(delta)) * (Gamma/conj(Gamma)).

    Zero exactly when the two lowering operators of the damped-oscillator
    quadruple share a Gaussian vacuum.  Raises DegenerateParamsError when the
    representation constants are degenerate (handled at parameter build time,
    repeated here for direct callers).
    """
    gamma_ = params.Gamma
    delta = params.delta
    denom = gamma_ * delta.conjugate() - delta * gamma_.conjugate()
    if abs(denom) <= 1e-14 * (abs(gamma_ * delta.conjugate()) + abs(delta * gamma_.conjugate()) + 1e-300):
        raise DegenerateParamsError("Gamma*conj(delta) == delta*conj(Gamma)")
    return params.omega_plus / params.omega_minus + (
        delta / delta.conjugate()
    ) * (gamma_ / gamma_.conjugate())
