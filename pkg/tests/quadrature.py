"""Brute-force 2-D quadrature oracle for the closed-form inner products.

Kept out of the package on purpose: the production path must stay
moment-recurrence only, and this grid integrator is the independent route
the tests compare against.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.polynomial import polyval2d

from pseudobosons.operators import WeightedSpace
from pseudobosons.states import GaussianPolynomial


def evaluate_state(f: GaussianPolynomial, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    poly = polyval2d(x, y, f.coefficients)
    q = f.q
    expo = -(q.k1 * x**2 + q.k2 * y**2 + q.k3 * x * y + f.l1 * x + f.l2 * y)
    return poly * np.exp(expo)


def quadrature_inner_product(
    f: GaussianPolynomial,
    g: GaussianPolynomial,
    space: WeightedSpace,
    n: int = 1201,
    width: float = 10.0,
) -> complex:
    """Trapezoid integration of conj(f) * g * weight on an adaptive box."""
    mat = (
        f.q.conjugate().matrix()
        + g.q.matrix()
        + np.diag([complex(space.c1), complex(space.c2)])
    )
    mr = np.real(mat)
    eigs = np.linalg.eigvalsh(mr)
    if eigs[0] <= 0:
        raise ValueError("oracle called on a divergent combination")
    shift_re = np.real(
        np.array([f.l1.conjugate() + g.l1, f.l2.conjugate() + g.l2])
    )
    center = -0.5 * np.linalg.solve(mr, shift_re)
    half = abs(center).max() + width / np.sqrt(eigs[0])
    axis = np.linspace(-half, half, n)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    integrand = (
        np.conj(evaluate_state(f, x, y))
        * evaluate_state(g, x, y)
        * np.exp(-space.c1 * x**2 - space.c2 * y**2)
    )
    inner = np.trapz(integrand, axis, axis=1)
    return complex(np.trapz(inner, axis))
