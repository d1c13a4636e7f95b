"""Machine checks of the three negative results for the damped oscillator.

1. The unweighted sign obstruction: the two real exponent slopes of the
   joint Gaussian vacuum have a strictly positive product, so the vacuum
   cannot be square-integrable.
2. Weighted spaces: the inequality pairs governing the two dual vacua are
   jointly infeasible for every admissible weight, shown both by lattice
   scan and by an exact interval contradiction.
3. General first-order ansatz: seeded searches over the commutation
   constraint variety never produce a square-integrable joint vacuum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .operators import TOL_ALG, FirstOrderOperator, L2, adjoint, check_pseudo_boson_ccr
from .model import ModelParams, sample_params
from .states import QuadraticForm, integrability_check, pd_defect
from .vacuum import VacuumStatus, ratio_condition_defect, solve_vacuum


class PreconditionError(ValueError):
    pass


#: Candidates must survive independent re-verification at this tolerance
#: before a search report is allowed to claim a falsification.
CANDIDATE_TOL = 1e-10


@dataclass(frozen=True)
class SignObstructionCertificate:
    """Certificate that the joint vacuum cannot be square-integrable.

    u = Re(beta*omega_+/Gamma) and v = Re(delta/(alpha*omega_+)) are the two
    slopes; square integrability would need u > 0 and v < 0 simultaneously,
    but u*v equals |delta/Gamma|^2 > 0.  ``alternate_identity_defect``
    records how far u*v is from |delta/gamma|^2 with the damping constant,
    to settle which denominator the product identity actually carries.
    """

    u: float
    v: float
    imag_residuals: tuple[float, float]
    product_identity_defect: float
    alternate_identity_defect: float
    verdict: bool


def sign_obstruction(
    params: ModelParams, tol: float = TOL_ALG
) -> SignObstructionCertificate:
    defect = ratio_condition_defect(params)
    if abs(defect) > tol:
        raise PreconditionError(
            f"ratio condition violated (defect {abs(defect):.3e}); "
            "the exponent slopes are not real"
        )
    u_c = params.beta * params.omega_plus / params.Gamma
    v_c = params.delta / (params.alpha * params.omega_plus)
    u, v = u_c.real, v_c.real
    target = abs(params.delta / params.Gamma) ** 2
    alt = (
        abs(params.delta / params.gamma) ** 2 if params.gamma > 0 else float("inf")
    )
    return SignObstructionCertificate(
        u=u,
        v=v,
        imag_residuals=(abs(u_c.imag), abs(v_c.imag)),
        product_identity_defect=abs(u * v - target),
        alternate_identity_defect=abs(u * v - alt) if np.isfinite(alt) else float("inf"),
        verdict=u * v > 0,
    )


@dataclass(frozen=True)
class WeightedFeasibilityReport:
    """Lattice scan plus interval certificate for the weighted no-go.

    ``phi_mask``/``psi_mask`` hold, per lattice point, whether the
    integrability inequalities for the primary vacuum (c1 + u > 0 and
    c2 - v > 0) and for the dual vacuum (u - c1 > 0 and c2 + v < 0) hold.
    """

    u: float
    v: float
    c_values: np.ndarray
    phi_mask: np.ndarray
    psi_mask: np.ndarray
    phi_count: int
    psi_count: int
    joint_feasible_found: bool
    phi_region_nonempty: bool
    psi_region_nonempty: bool
    analytic_certificate: str


def weighted_infeasibility(
    params: ModelParams,
    c_max: float,
    n_grid: int,
    tol: float = TOL_ALG,
) -> WeightedFeasibilityReport:
    """Scan [0, c_max]^2 for weights admitting both dual vacua at once."""
    if not c_max > 0:
        raise PreconditionError("c_max must be positive")
    if n_grid < 2:
        raise PreconditionError("n_grid must be at least 2")
    cert = sign_obstruction(params, tol)
    u, v = cert.u, cert.v

    c = np.linspace(0.0, c_max, n_grid)
    c1 = c[:, None]
    c2 = c[None, :]
    phi_mask = (c1 + u > 0) & (c2 - v > 0)
    psi_mask = (u - c1 > 0) & (c2 + v < 0)
    joint = phi_mask & psi_mask

    lines = [
        f"u = {u!r}, v = {v!r}, u*v = {u * v!r} > 0",
        "both vacua admissible would require  v < c2 < -v  hence v < 0,",
        "and  -u < c1 < u  with c1 >= 0  hence u > 0,",
        "so u*v < 0, contradicting u*v > 0: joint feasibility is impossible.",
    ]
    return WeightedFeasibilityReport(
        u=u,
        v=v,
        c_values=c,
        phi_mask=phi_mask,
        psi_mask=psi_mask,
        phi_count=int(phi_mask.sum()),
        psi_count=int(psi_mask.sum()),
        joint_feasible_found=bool(joint.any()),
        phi_region_nonempty=bool(phi_mask.any()),
        psi_region_nonempty=bool(psi_mask.any()),
        analytic_certificate="\n".join(lines),
    )


class AnsatzMode(enum.Enum):
    REAL = "real"
    K3_BOUNDARY = "k3"
    GENERAL = "general"


class SearchConclusion(enum.Enum):
    NO_SOLUTION_CONFIRMED = "NoSolutionConfirmed"
    SOLUTION_CANDIDATE = "SolutionCandidate"


@dataclass(frozen=True)
class AnsatzSearchReport:
    mode: AnsatzMode
    seed: int
    n_requested: int
    n_accepted: int
    n_rejected_projection: int
    n_no_vacuum: int
    n_nonintegrable: int
    best_residual: float
    conclusion: SearchConclusion
    candidates: tuple[dict, ...] = field(default_factory=tuple)


# Column order of the complex coefficient vector:
# (alpha_x, alpha_y, beta_x, beta_y, gamma_x, gamma_y, eta_x, eta_y)
_AX, _AY, _BX, _BY, _GX, _GY, _HX, _HY = range(8)


def _constraint_residuals(w: np.ndarray) -> np.ndarray:
    """Residuals of the four ladder commutation constraints, batched.

    ``w`` has shape (B, 8).  Returns shape (B, 6): the pairing bracket minus
    one (re, im), the cross bracket (re, im), and the two real self-adjoint
    brackets.
    """
    ax, ay, bx, by = w[:, _AX], w[:, _AY], w[:, _BX], w[:, _BY]
    gx, gy, hx, hy = w[:, _GX], w[:, _GY], w[:, _HX], w[:, _HY]
    c1 = bx * gx.conj() + by * gy.conj() + hx.conj() * ax + hy.conj() * ay - 1.0
    c2 = bx * gx + by * gy - hx * ax - hy * ay
    c3 = 2.0 * (bx * ax.conj() + by * ay.conj()).real
    c4 = 2.0 * (hx * gx.conj() + hy * gy.conj()).real
    return np.stack([c1.real, c1.imag, c2.real, c2.imag, c3, c4], axis=1)


def _gauss_newton(
    pack: "callable",
    unpack: "callable",
    v0: np.ndarray,
    max_iter: int = 60,
    target: float = 1e-14,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched Gauss-Newton for the underdetermined constraint system.

    ``pack`` maps real variables (B, nv) to residuals (B, 6).  The step uses
    J^T (J J^T + damping)^-1 r; the constraints are quadratic so central
    finite differences give the Jacobian exactly up to roundoff.
    """
    v = v0.copy()
    b, nv = v.shape
    h = 1e-4
    for _ in range(max_iter):
        r = pack(v)
        worst = np.max(np.abs(r), axis=1)
        if np.all(worst <= target):
            break
        jac = np.empty((b, r.shape[1], nv))
        for k in range(nv):
            vp = v.copy()
            vp[:, k] += h
            vm = v.copy()
            vm[:, k] -= h
            jac[:, :, k] = (pack(vp) - pack(vm)) / (2.0 * h)
        jjt = jac @ jac.transpose(0, 2, 1)
        damping = 1e-12 * np.trace(jjt, axis1=1, axis2=2)[:, None, None] + 1e-300
        jjt += damping * np.eye(r.shape[1])[None, :, :]
        try:
            sol = np.linalg.solve(jjt, r[:, :, None])
        except np.linalg.LinAlgError:
            sol = np.linalg.pinv(jjt) @ r[:, :, None]
        v = v - (jac.transpose(0, 2, 1) @ sol)[:, :, 0]
    r = pack(v)
    return v, np.max(np.abs(r), axis=1)


def _real_to_complex_general(v: np.ndarray) -> np.ndarray:
    return v[:, :8] + 1j * v[:, 8:]


def _real_to_complex_realmode(v: np.ndarray) -> np.ndarray:
    """12 real variables: complex multiplications, real derivative terms."""
    w = np.zeros((v.shape[0], 8), dtype=complex)
    w[:, _AX] = v[:, 0] + 1j * v[:, 1]
    w[:, _AY] = v[:, 2] + 1j * v[:, 3]
    w[:, _GX] = v[:, 4] + 1j * v[:, 5]
    w[:, _GY] = v[:, 6] + 1j * v[:, 7]
    w[:, _BX] = v[:, 8]
    w[:, _BY] = v[:, 9]
    w[:, _HX] = v[:, 10]
    w[:, _HY] = v[:, 11]
    return w


def _draw_initial(rng_list, n_cols: int) -> np.ndarray:
    rows = [
        rng.normal(size=n_cols) for rng in rng_list
    ]
    return np.array(rows)


def _batched_vacuum(w: np.ndarray, tol: float):
    """Vectorized joint-vacuum solve for ladder coefficient batches.

    Returns (k-array (B, 3), residual (B,), degenerate-mask) where the
    degenerate mask marks samples whose derivative coefficients all vanish.
    """
    b = w.shape[0]
    system = np.zeros((b, 4, 3), dtype=complex)
    rhs = np.zeros((b, 4), dtype=complex)
    system[:, 0, 0] = 2.0 * w[:, _BX]
    system[:, 0, 2] = w[:, _BY]
    rhs[:, 0] = w[:, _AX]
    system[:, 1, 1] = 2.0 * w[:, _BY]
    system[:, 1, 2] = w[:, _BX]
    rhs[:, 1] = w[:, _AY]
    system[:, 2, 0] = 2.0 * w[:, _HX]
    system[:, 2, 2] = w[:, _HY]
    rhs[:, 2] = w[:, _GX]
    system[:, 3, 1] = 2.0 * w[:, _HY]
    system[:, 3, 2] = w[:, _HX]
    rhs[:, 3] = w[:, _GY]

    deriv_scale = np.max(
        np.abs(w[:, [_BX, _BY, _HX, _HY]]), axis=1
    )
    degenerate = deriv_scale <= tol

    sol = np.zeros((b, 3), dtype=complex)
    ok = ~degenerate
    if np.any(ok):
        pinv = np.linalg.pinv(system[ok])
        sol[ok] = (pinv @ rhs[ok, :, None])[:, :, 0]
    leftover = (system @ sol[:, :, None])[:, :, 0] - rhs
    residual = np.max(np.abs(leftover), axis=1)
    residual[degenerate] = np.inf
    return sol, residual, degenerate


def _integrability_defects(k: np.ndarray) -> np.ndarray:
    """Distance of 2*Re(M(q)) from positive definiteness, batched; zero
    means the Gaussian is square-integrable."""
    m = np.zeros((k.shape[0], 2, 2))
    m[:, 0, 0] = 2.0 * k[:, 0].real
    m[:, 1, 1] = 2.0 * k[:, 1].real
    m[:, 0, 1] = m[:, 1, 0] = k[:, 2].real
    eigs = np.linalg.eigvalsh(m)
    return np.maximum(0.0, -eigs[:, 0])


def _reverify_candidate(w_row: np.ndarray) -> dict | None:
    """Full scalar-path re-verification of a would-be falsification."""
    a_plus = FirstOrderOperator(cx=w_row[_AX], cy=w_row[_AY], dx=w_row[_BX], dy=w_row[_BY])
    a_minus = FirstOrderOperator(cx=w_row[_GX], cy=w_row[_GY], dx=w_row[_HX], dy=w_row[_HY])
    b_plus = adjoint(a_minus, L2)
    b_minus = adjoint(a_plus, L2)
    report = check_pseudo_boson_ccr(a_plus, a_minus, b_plus, b_minus, tol=CANDIDATE_TOL)
    if not report.passed:
        return None
    vac_phi = solve_vacuum(a_plus, a_minus, tol=CANDIDATE_TOL)
    vac_psi = solve_vacuum(adjoint(b_plus, L2), adjoint(b_minus, L2), tol=CANDIDATE_TOL)
    if not (vac_phi.solved and vac_psi.solved):
        return None
    if not (
        integrability_check(_gauss(vac_phi.q)).integrable
        and integrability_check(_gauss(vac_psi.q)).integrable
    ):
        return None
    return {
        "coefficients": [complex(z) for z in w_row],
        "q_phi": (vac_phi.q.k1, vac_phi.q.k2, vac_phi.q.k3),
        "q_psi": (vac_psi.q.k1, vac_psi.q.k2, vac_psi.q.k3),
    }


def _gauss(q: QuadraticForm):
    from .states import GaussianPolynomial

    return GaussianPolynomial.gaussian(q)


def general_ansatz_search(
    mode: AnsatzMode | str,
    n_samples: int,
    seed: int,
    *,
    seed_family: str = "raw",
    tol: float = TOL_ALG,
) -> AnsatzSearchReport:
    """Seeded search for square-integrable joint vacua over the constraint
    variety of the general first-order ansatz.

    Samples are drawn from per-index substreams of ``seed`` (so results are
    independent of batching), projected onto the commutation constraints by
    Gauss-Newton, and rejected when the projection residual exceeds ``tol``.
    For each accepted sample the joint vacuum is solved for the lowering
    pair and for the adjoints of the raising pair, and both resulting
    quadratic forms are classified.  ``seed_family="model"`` (general mode
    only) draws the coefficients from the damped-oscillator ladder family
    instead of raw noise.
    """
    mode = AnsatzMode(mode) if not isinstance(mode, AnsatzMode) else mode
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if seed_family not in ("raw", "model"):
        raise ValueError("seed_family must be 'raw' or 'model'")
    streams = [
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_samples)
    ]

    if mode is AnsatzMode.K3_BOUNDARY:
        return _k3_boundary_search(streams, seed, n_samples, tol)

    if seed_family == "model":
        if mode is not AnsatzMode.GENERAL:
            raise ValueError("model seeding applies to the general mode only")
        w0 = np.zeros((n_samples, 8), dtype=complex)
        for i, rng in enumerate(streams):
            params = sample_params(rng)
            from .model import build_pseudo_bosons

            quad = build_pseudo_bosons(params)
            w0[i] = [
                quad.a_plus.cx,
                quad.a_plus.cy,
                quad.a_plus.dx,
                quad.a_plus.dy,
                quad.a_minus.cx,
                quad.a_minus.cy,
                quad.a_minus.dx,
                quad.a_minus.dy,
            ]
        v0 = np.concatenate([w0.real, w0.imag], axis=1)
        to_complex = _real_to_complex_general
    elif mode is AnsatzMode.GENERAL:
        v0 = _draw_initial(streams, 16)
        to_complex = _real_to_complex_general
    else:  # real-coefficient derivative terms
        v0 = _draw_initial(streams, 12)
        to_complex = _real_to_complex_realmode

    def residuals(v: np.ndarray) -> np.ndarray:
        return _constraint_residuals(to_complex(v))

    v_proj, constraint_res = _gauss_newton(residuals, to_complex, v0)
    accepted = constraint_res <= tol
    w = to_complex(v_proj)

    return _classify_samples(
        mode, seed, n_samples, w, constraint_res, accepted, tol
    )


def _k3_boundary_search(streams, seed, n_samples, tol):
    """Vacua constrained to the degenerate boundary k3^2 = 4 k1 k2.

    The quadratic form is sampled directly on the boundary; the derivative
    coefficients are then projected onto the commutation constraints while
    the multiplication coefficients follow from the vacuum equations, so
    every accepted sample has its solved form on the boundary by
    construction.
    """
    k1 = np.empty(n_samples, dtype=complex)
    k2 = np.empty(n_samples, dtype=complex)
    bh0 = np.empty((n_samples, 8))
    for i, rng in enumerate(streams):
        k1[i] = rng.uniform(0.3, 2.0) + 1j * rng.uniform(-1.0, 1.0)
        k2[i] = rng.uniform(0.3, 2.0) + 1j * rng.uniform(-1.0, 1.0)
        bh0[i] = rng.normal(size=8)
    k3 = 2.0 * np.sqrt(k1 * k2)
    kmat = np.zeros((n_samples, 2, 2), dtype=complex)
    kmat[:, 0, 0] = 2.0 * k1
    kmat[:, 1, 1] = 2.0 * k2
    kmat[:, 0, 1] = kmat[:, 1, 0] = k3

    def to_complex(v: np.ndarray) -> np.ndarray:
        w = np.zeros((v.shape[0], 8), dtype=complex)
        bvec = np.stack([v[:, 0] + 1j * v[:, 1], v[:, 2] + 1j * v[:, 3]], axis=1)
        hvec = np.stack([v[:, 4] + 1j * v[:, 5], v[:, 6] + 1j * v[:, 7]], axis=1)
        avec = (kmat @ bvec[:, :, None])[:, :, 0]
        gvec = (kmat @ hvec[:, :, None])[:, :, 0]
        w[:, _BX], w[:, _BY] = bvec[:, 0], bvec[:, 1]
        w[:, _HX], w[:, _HY] = hvec[:, 0], hvec[:, 1]
        w[:, _AX], w[:, _AY] = avec[:, 0], avec[:, 1]
        w[:, _GX], w[:, _GY] = gvec[:, 0], gvec[:, 1]
        return w

    def residuals(v: np.ndarray) -> np.ndarray:
        return _constraint_residuals(to_complex(v))

    v_proj, constraint_res = _gauss_newton(residuals, to_complex, bh0)
    accepted = constraint_res <= tol
    w = to_complex(v_proj)
    return _classify_samples(
        AnsatzMode.K3_BOUNDARY, seed, n_samples, w, constraint_res, accepted, tol
    )


def _classify_samples(mode, seed, n_samples, w, constraint_res, accepted, tol):
    k_phi, res_phi, degen_phi = _batched_vacuum(w, tol)
    # the dual pair: adjoints of b_pm = adjoint(a_mp) swap the roles back,
    # so the second solve runs on the conjugate-swapped coefficient block
    w_dual = np.zeros_like(w)
    w_dual[:, [_AX, _AY, _BX, _BY]] = w[:, [_GX, _GY, _HX, _HY]]
    w_dual[:, [_GX, _GY, _HX, _HY]] = w[:, [_AX, _AY, _BX, _BY]]
    k_psi, res_psi, degen_psi = _batched_vacuum(w_dual, tol)

    defect_phi = _integrability_defects(k_phi)
    defect_psi = _integrability_defects(k_psi)

    vac_res = np.maximum(res_phi, res_psi)
    no_vacuum = ~np.isfinite(vac_res) | (vac_res > 1e-8)
    score = np.maximum.reduce(
        [
            constraint_res,
            np.minimum(np.nan_to_num(vac_res, posinf=1.0), 1.0),
            np.where(no_vacuum, 0.0, np.maximum(defect_phi, defect_psi)),
        ]
    )
    score = np.where(accepted, score, np.inf)

    candidates = []
    for idx in np.nonzero(accepted & (score <= CANDIDATE_TOL))[0]:
        verified = _reverify_candidate(w[idx])
        if verified is not None:
            verified["sample_index"] = int(idx)
            candidates.append(verified)

    n_accepted = int(accepted.sum())
    nonintegrable = accepted & ~no_vacuum & (
        (defect_phi > 0) | (defect_psi > 0)
    )
    best = float(np.min(score[accepted])) if n_accepted else float("inf")
    conclusion = (
        SearchConclusion.SOLUTION_CANDIDATE
        if candidates
        else SearchConclusion.NO_SOLUTION_CONFIRMED
    )
    return AnsatzSearchReport(
        mode=mode,
        seed=seed,
        n_requested=n_samples,
        n_accepted=n_accepted,
        n_rejected_projection=int(n_samples - accepted.sum()),
        n_no_vacuum=int((accepted & no_vacuum).sum()),
        n_nonintegrable=int(nonintegrable.sum()),
        best_residual=best,
        conclusion=conclusion,
        candidates=tuple(candidates),
    )


@dataclass(frozen=True)
class ForcingCertificate:
    """Exact-rank evidence that the pure-Gaussian ansatz forces all
    derivative coefficients to zero.

    For an integrable exp(-k1 x^2 - k2 y^2) the self-bracket constraints are
    positive-definite quadratic forms in the derivative coefficients, so
    their kernels are trivial; the pairing constraint then reads 0 = 1.
    """

    k1: float
    k2: float
    beta_form_eigenvalues: tuple[float, ...]
    eta_form_eigenvalues: tuple[float, ...]
    beta_form_rank: int
    eta_form_rank: int
    pairing_rank: int
    pairing_augmented_rank: int
    forced: bool


def pure_gaussian_forcing(k1: float, k2: float) -> ForcingCertificate:
    """Rank check for the no-cross-term ansatz with positive k1, k2."""
    if not (k1 > 0 and k2 > 0):
        raise ValueError("pure-Gaussian exponents must be positive")
    # the quadratic constraint in (Re bx, Im bx, Re by, Im by)
    form = 4.0 * np.diag([k1, k1, k2, k2])
    eigs = np.linalg.eigvalsh(form)
    rank = int(np.linalg.matrix_rank(form))
    forced_beta = rank == 4 and eigs[0] > 0
    # with beta = eta = 0, the pairing bracket is the zero functional;
    # demanding it equal one is an inconsistent augmented linear system
    pairing = np.zeros((1, 8))
    augmented = np.concatenate([pairing, np.ones((1, 1))], axis=1)
    pairing_rank = int(np.linalg.matrix_rank(pairing))
    augmented_rank = int(np.linalg.matrix_rank(augmented))
    return ForcingCertificate(
        k1=k1,
        k2=k2,
        beta_form_eigenvalues=tuple(float(t) for t in eigs),
        eta_form_eigenvalues=tuple(float(t) for t in eigs),
        beta_form_rank=rank,
        eta_form_rank=rank,
        pairing_rank=pairing_rank,
        pairing_augmented_rank=augmented_rank,
        forced=forced_beta and augmented_rank > pairing_rank,
    )
