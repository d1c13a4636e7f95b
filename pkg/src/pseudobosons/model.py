"""Damped-oscillator ladder construction.

From (m, gamma, k) and a representation pair (Gamma, delta) this module
builds the complex mode frequencies, the non-self-adjoint phase-space
quadruple, the pseudo-boson ladder operators (by two independent routes that
must agree), the Hamiltonian, and the weighted-space adjoints of the ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .operators import (
    TOL_ALG,
    DX,
    FirstOrderOperator,
    L2,
    OperatorExpression,
    WeightedSpace,
    adjoint,
    compose_ops,
    sqrt_complex,
)
from .vacuum import DegenerateParamsError


class OverdampedError(ValueError):
    """Raised when k < gamma^2 / (4m), where the mode frequency turns
    imaginary; that regime is outside this model's assumptions."""


@dataclass(frozen=True)
class ModelParams:
    """Oscillator data (m, gamma, k) plus representation constants.

    Derived quantities: Omega is the damped frequency, omega_plus/minus the
    conjugate complex mode frequencies, and (alpha, beta) the normalized
    representation coefficients satisfying beta*Gamma - alpha*delta = 1 and
    alpha*conj(delta) = beta*conj(Gamma).
    """

    m: float
    gamma: float
    k: float
    Gamma: complex
    delta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "Gamma", complex(self.Gamma))
        object.__setattr__(self, "delta", complex(self.delta))
        if not all(
            math.isfinite(v) for v in (self.m, self.gamma, self.k)
        ) or not all(
            math.isfinite(v)
            for z in (self.Gamma, self.delta)
            for v in (z.real, z.imag)
        ):
            raise ValueError("parameters must be finite")
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.k <= 0:
            raise ValueError("stiffness must be positive")
        if self.gamma < 0:
            raise ValueError("damping must be nonnegative")
        if self.k < self.gamma**2 / (4.0 * self.m):
            raise OverdampedError(
                f"k={self.k} < gamma^2/4m={self.gamma ** 2 / (4 * self.m)}"
            )
        d = self.Gamma * self.delta.conjugate() - self.delta * self.Gamma.conjugate()
        scale = abs(self.Gamma) * abs(self.delta)
        if abs(d) <= 1e-14 * (scale + 1e-300):
            raise DegenerateParamsError(
                "Gamma*conj(delta) - delta*conj(Gamma) vanishes"
            )

    @cached_property
    def Omega(self) -> float:
        return math.sqrt((self.k - self.gamma**2 / (4.0 * self.m)) / self.m)

    @cached_property
    def omega_plus(self) -> complex:
        return complex(self.Omega, self.gamma / (2.0 * self.m))

    @cached_property
    def omega_minus(self) -> complex:
        return self.omega_plus.conjugate()

    @cached_property
    def _denominator(self) -> complex:
        return self.Gamma * self.delta.conjugate() - self.delta * self.Gamma.conjugate()

    @cached_property
    def alpha(self) -> complex:
        return self.Gamma.conjugate() / self._denominator

    @cached_property
    def beta(self) -> complex:
        return self.delta.conjugate() / self._denominator


def build_params(
    m: float, gamma: float, k: float, Gamma: complex, delta: complex
) -> ModelParams:
    return ModelParams(m=m, gamma=gamma, k=k, Gamma=Gamma, delta=delta)


@dataclass(frozen=True)
class PhaseSpaceQuad:
    x_plus: FirstOrderOperator
    x_minus: FirstOrderOperator
    p_plus: FirstOrderOperator
    p_minus: FirstOrderOperator


def build_phase_space(params: ModelParams) -> PhaseSpaceQuad:
    """Non-self-adjoint position/momentum pairs.

    With p_x = -i d/dx and p_y = -i d/dy:
      x_+ = beta*x + alpha*p_y,  x_- = conj on coefficients,
      p_+ = Gamma*p_x + delta*y, p_- = conj on coefficients.
    They satisfy [x_+, p_+] = [x_-, p_-] = i, all cross brackets vanish, and
    the unweighted adjoints swap + and -.
    """
    alpha, beta = params.alpha, params.beta
    x_plus = FirstOrderOperator(cx=beta, dy=-1j * alpha)
    x_minus = FirstOrderOperator(cx=beta.conjugate(), dy=-1j * alpha.conjugate())
    p_plus = FirstOrderOperator(cy=params.delta, dx=-1j * params.Gamma)
    p_minus = FirstOrderOperator(
        cy=params.delta.conjugate(), dx=-1j * params.Gamma.conjugate()
    )
    return PhaseSpaceQuad(x_plus, x_minus, p_plus, p_minus)


class ConstructionMismatchError(RuntimeError):
    """The phase-space route and the direct coefficient route disagree."""


@dataclass(frozen=True)
class PseudoBosonQuad:
    a_plus: FirstOrderOperator
    a_minus: FirstOrderOperator
    b_plus: FirstOrderOperator
    b_minus: FirstOrderOperator
    params: ModelParams


def _direct_ladder(params: ModelParams):
    """Ladder operators from the closed-form coefficient block."""
    alpha, beta = params.alpha, params.beta
    gm, dl = params.Gamma, params.delta
    wp, wm = params.omega_plus, params.omega_minus
    sp = sqrt_complex(wp / 2.0)
    sm = sqrt_complex(wm / 2.0)
    a_plus = sp * FirstOrderOperator(
        cx=beta, cy=1j * dl / wp, dx=gm / wp, dy=-1j * alpha
    )
    a_minus = sm * FirstOrderOperator(
        cx=beta.conjugate(),
        cy=1j * dl.conjugate() / wm,
        dx=gm.conjugate() / wm,
        dy=-1j * alpha.conjugate(),
    )
    b_plus = sp * FirstOrderOperator(
        cx=beta, cy=-1j * dl / wp, dx=-gm / wp, dy=-1j * alpha
    )
    b_minus = sm * FirstOrderOperator(
        cx=beta.conjugate(),
        cy=-1j * dl.conjugate() / wm,
        dx=-gm.conjugate() / wm,
        dy=-1j * alpha.conjugate(),
    )
    return a_plus, a_minus, b_plus, b_minus


def build_pseudo_bosons(
    params: ModelParams, tol: float = TOL_ALG
) -> PseudoBosonQuad:
    """Build the ladder quadruple by both routes and cross-check.

    Route one combines the phase-space operators,
    a_pm = sqrt(omega_pm/2) (x_pm + i p_pm / omega_pm), b_pm with the minus
    sign; route two writes the coefficients directly.  Any disagreement
    beyond ``tol`` raises ConstructionMismatchError.
    """
    ps = build_phase_space(params)
    wp, wm = params.omega_plus, params.omega_minus
    sp = sqrt_complex(wp / 2.0)
    sm = sqrt_complex(wm / 2.0)
    route1 = (
        sp * (ps.x_plus + (1j / wp) * ps.p_plus),
        sm * (ps.x_minus + (1j / wm) * ps.p_minus),
        sp * (ps.x_plus - (1j / wp) * ps.p_plus),
        sm * (ps.x_minus - (1j / wm) * ps.p_minus),
    )
    route2 = _direct_ladder(params)
    names = ("a_plus", "a_minus", "b_plus", "b_minus")
    for name, op1, op2 in zip(names, route1, route2):
        diff = op1.max_coeff_diff(op2)
        if diff > tol:
            raise ConstructionMismatchError(
                f"{name}: construction routes differ by {diff:.3e}"
            )
    return PseudoBosonQuad(*route1, params)


def build_hamiltonian(quad: PseudoBosonQuad) -> OperatorExpression:
    """H = omega_+ b_+ a_+ + omega_- b_- a_- + (omega_+ + omega_-)/2."""
    wp = quad.params.omega_plus
    wm = quad.params.omega_minus
    n_plus = compose_ops(quad.b_plus, quad.a_plus)
    n_minus = compose_ops(quad.b_minus, quad.a_minus)
    const = OperatorExpression.identity() * ((wp + wm) / 2.0)
    return n_plus * wp + n_minus * wm + const


def number_operators(quad: PseudoBosonQuad) -> tuple[OperatorExpression, OperatorExpression]:
    return (
        compose_ops(quad.b_plus, quad.a_plus),
        compose_ops(quad.b_minus, quad.a_minus),
    )


@dataclass(frozen=True)
class WeightedAdjointQuad:
    """Weighted-space adjoints of the ladder quadruple.

    ``corrections`` holds the deviation of each starred operator from its
    unweighted partner (a_+* - b_-, a_-* - b_+, b_+* - a_-, b_-* - a_+); all
    four vanish when c1 = c2 = 0. ``reference_deviation`` compares each
    derived correction against the closed-form table below, flagging any
    entry where the table's coefficients do not reproduce the derivation.
    """

    a_plus_star: FirstOrderOperator
    a_minus_star: FirstOrderOperator
    b_plus_star: FirstOrderOperator
    b_minus_star: FirstOrderOperator
    corrections: dict[str, FirstOrderOperator]
    reference_deviation: dict[str, float]


def reference_weight_corrections(
    params: ModelParams, space: WeightedSpace
) -> dict[str, FirstOrderOperator]:
    """Closed-form weight corrections as usually quoted for this model.

    First three entries follow the derivation; the fourth deliberately keeps
    the commonly quoted x-coefficient conj(Gamma)/omega_-, which the
    derivation replaces by Gamma/omega_+ (see derived_weight_corrections).
    """
    alpha = params.alpha
    gm = params.Gamma
    wp, wm = params.omega_plus, params.omega_minus
    c1, c2 = space.c1, space.c2
    rtm = sqrt_complex(2.0 * wm)
    rtp = sqrt_complex(2.0 * wp)
    return {
        "a_plus_star": rtm
        * FirstOrderOperator(
            cx=c1 * gm.conjugate() / wm, cy=1j * c2 * alpha.conjugate()
        ),
        "a_minus_star": rtp
        * FirstOrderOperator(cx=c1 * gm / wp, cy=1j * c2 * alpha),
        "b_plus_star": rtm
        * FirstOrderOperator(
            cx=-c1 * gm.conjugate() / wm, cy=1j * c2 * alpha.conjugate()
        ),
        "b_minus_star": rtp
        * FirstOrderOperator(cx=-c1 * gm.conjugate() / wm, cy=1j * c2 * alpha),
    }


def weighted_adjoint_quad(
    quad: PseudoBosonQuad, space: WeightedSpace
) -> WeightedAdjointQuad:
    """Adjoints of the quadruple in a weighted space, with the deviation of
    each one from its unweighted partner and from the reference table."""
    stars = {
        "a_plus_star": adjoint(quad.a_plus, space),
        "a_minus_star": adjoint(quad.a_minus, space),
        "b_plus_star": adjoint(quad.b_plus, space),
        "b_minus_star": adjoint(quad.b_minus, space),
    }
    partners = {
        "a_plus_star": quad.b_minus,
        "a_minus_star": quad.b_plus,
        "b_plus_star": quad.a_minus,
        "b_minus_star": quad.a_plus,
    }
    corrections = {
        name: stars[name] - partners[name] for name in stars
    }
    reference = reference_weight_corrections(quad.params, space)
    deviation = {
        name: corrections[name].max_coeff_diff(reference[name]) for name in stars
    }
    return WeightedAdjointQuad(
        stars["a_plus_star"],
        stars["a_minus_star"],
        stars["b_plus_star"],
        stars["b_minus_star"],
        corrections,
        deviation,
    )


def sample_params(rng: np.random.Generator, *, ratio_condition: bool | None = None) -> ModelParams:
    """Draw random valid parameters.

    Moduli of Gamma and delta are in [0.5, 2] with uniform phase; draws with
    nearly degenerate representation constants are rejected.  With
    ``ratio_condition=True`` the phase of Gamma is solved so the two lowering
    operators share a Gaussian vacuum; with ``False``, draws too close to
    that surface are rejected.
    """
    while True:
        m = rng.uniform(0.5, 2.0)
        gamma = rng.uniform(0.0, 2.0)
        omega0 = rng.uniform(0.5, 2.0)
        k = m * omega0**2 + gamma**2 / (4.0 * m)
        delta = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
        if ratio_condition:
            omega_plus = complex(omega0, gamma / (2.0 * m))
            theta = np.angle(omega_plus) - np.angle(delta) - np.pi / 2.0
            if rng.uniform() < 0.5:
                theta += np.pi
            gm = rng.uniform(0.5, 2.0) * np.exp(1j * theta)
        else:
            gm = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
        if abs(gm * delta.conjugate() - delta * gm.conjugate()) < 1e-3:
            continue
        try:
            params = ModelParams(m=m, gamma=gamma, k=k, Gamma=complex(gm), delta=complex(delta))
        except (ValueError, DegenerateParamsError):
            continue
        if ratio_condition is False:
            from .vacuum import ratio_condition_defect

            if abs(ratio_condition_defect(params)) < 1e-3:
                continue
        return params
