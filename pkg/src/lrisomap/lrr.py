"""Nonnegative sparse low-rank self-expression solver.

Decomposes a matrix S into S = S Z + E where Z is simultaneously low-rank
(nuclear norm), sparse (l1, weight beta), and nonnegative, and E collects
sparse errors (l1, weight lambda). The solver is a linearized ADMM: an
auxiliary variable J carries the nonnegativity and l1 terms, the Z update
is a singular-value-thresholded proximal step on the linearized augmented
Lagrangian, and the penalty mu grows geometrically whenever the iterates
stop moving. Iterations stop when the relative reconstruction residual and
the scaled step sizes are both below their tolerances.

Update cycle per iteration: Z, then J, then E, then the two dual variables
and the penalty.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ArgumentError
from .linalg import soft_threshold, spectral_norm, svt


@dataclass(frozen=True)
class LRRConfig:
    """Solver hyperparameters.

    beta weights the l1 penalty on Z (applied through J), lambda_err the l1
    penalty on E. mu starts tiny and is multiplied by rho0 whenever the
    scaled iterate steps fall below eps2, capped at mu_max. eta1 is the
    proximal step stiffness, eta1_slack * mu * (1 + ||S||_2^2), kept
    strictly above the convergence bound by the slack factor.
    """

    beta: float = 1.0
    lambda_err: float = 0.02
    mu0: float = 1e-6
    mu_max: float = 1e6
    rho0: float = 2.5
    eps1: float = 1e-6
    eps2: float = 1e-2
    max_iter: int = 1000
    eta1_slack: float = 1.02

    def __post_init__(self):
        if min(self.beta, self.lambda_err) < 0:
            raise ArgumentError("penalty weights must be >= 0")
        if not 0 < self.mu0 <= self.mu_max:
            raise ArgumentError("need 0 < mu0 <= mu_max")
        if self.rho0 < 1:
            raise ArgumentError("rho0 must be >= 1")
        if min(self.eps1, self.eps2) <= 0:
            raise ArgumentError("tolerances must be > 0")
        if self.max_iter < 1:
            raise ArgumentError("max_iter must be >= 1")
        if self.eta1_slack <= 1:
            raise ArgumentError("eta1_slack must be > 1 to keep the step bound strict")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    residual: float
    step_max: float
    mu: float
    nuclear_norm: float


@dataclass
class LRRState:
    """Mutable-by-replacement solver state.

    Holds the primal variables (z, j, e), duals (m1, m2), the penalty and
    step stiffness, the previous iterates (for step-size criteria), and the
    per-iteration trace.
    """

    z: np.ndarray
    j: np.ndarray
    e: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    mu: float
    eta1: float
    k: int = 0
    s_norm2_sq: float = 0.0
    s_norm_fro: float = 1.0
    z_prev: np.ndarray | None = None
    j_prev: np.ndarray | None = None
    e_prev: np.ndarray | None = None
    residual: float = np.inf
    step_max: float = np.inf
    nuclear_norm: float = 0.0
    trace: list = field(default_factory=list)


@dataclass(frozen=True)
class LRRSolution:
    z: np.ndarray
    e: np.ndarray
    converged: bool
    iterations: int
    final_residual: float
    effective_rank: int
    trace: tuple


def _eta1(cfg: LRRConfig, mu: float, s_norm2_sq: float) -> float:
    return cfg.eta1_slack * mu * (1.0 + s_norm2_sq)


def init_state(s: np.ndarray, cfg: LRRConfig) -> LRRState:
    """Z = J = I, E and duals zero, mu at its floor."""
    n = s.shape[1]
    sigma_sq = spectral_norm(s) ** 2
    return LRRState(
        z=np.eye(n),
        j=np.eye(n),
        e=np.zeros_like(s),
        m1=np.zeros_like(s),
        m2=np.zeros((n, n)),
        mu=cfg.mu0,
        eta1=_eta1(cfg, cfg.mu0, sigma_sq),
        s_norm2_sq=sigma_sq,
        s_norm_fro=float(np.linalg.norm(s)),
    )


def z_step(state: LRRState, s: np.ndarray, cfg: LRRConfig) -> LRRState:
    """Proximal descent on the linearized augmented Lagrangian.

    Gradient of the smooth part at Z:
        mu * [ -S^T (S - S Z - E + M1/mu) + (Z - J + M2/mu) ]
    followed by singular value thresholding at 1/eta1.
    """
    mu = state.mu
    grad = mu * (
        -(s.T @ (s - s @ state.z - state.e + state.m1 / mu))
        + (state.z - state.j + state.m2 / mu)
    )
    z_new, values = svt(state.z - grad / state.eta1, 1.0 / state.eta1, return_values=True)
    return replace(state, z=z_new, z_prev=state.z, nuclear_norm=float(values.sum()))


def j_step(state: LRRState, cfg: LRRConfig) -> LRRState:
    """Shrink Z + M2/mu by beta/mu, then clamp to the nonnegative orthant."""
    arg = state.z + state.m2 / state.mu
    j_new = np.maximum(soft_threshold(arg, cfg.beta / state.mu), 0.0)
    return replace(state, j=j_new, j_prev=state.j)


def e_step(state: LRRState, s: np.ndarray, cfg: LRRConfig) -> LRRState:
    """Shrink the reconstruction slack S - S Z + M1/mu by lambda/mu."""
    arg = s - s @ state.z + state.m1 / state.mu
    e_new = soft_threshold(arg, cfg.lambda_err / state.mu)
    return replace(state, e=e_new, e_prev=state.e)


def dual_step(state: LRRState, s: np.ndarray, cfg: LRRConfig) -> LRRState:
    """Dual ascent, penalty growth, and the per-iteration trace record.

    The step criterion max(eta1*|dZ|, mu*|dJ|, mu*|dE|) (Frobenius norms,
    evaluated with the pre-update penalty) drives both the penalty growth
    decision and the convergence check; it is computed here once.
    """
    mu = state.mu
    slack = s - s @ state.z - state.e
    m1 = state.m1 + mu * slack
    m2 = state.m2 + mu * (state.z - state.j)
    step_max = max(
        state.eta1 * float(np.linalg.norm(state.z - state.z_prev)),
        mu * float(np.linalg.norm(state.j - state.j_prev)),
        mu * float(np.linalg.norm(state.e - state.e_prev)),
    )
    rho = cfg.rho0 if step_max <= cfg.eps2 else 1.0
    mu_new = min(cfg.mu_max, rho * mu)
    residual = float(np.linalg.norm(slack)) / state.s_norm_fro
    k = state.k + 1
    record = IterationRecord(
        k=k, residual=residual, step_max=step_max, mu=mu, nuclear_norm=state.nuclear_norm
    )
    state = replace(
        state,
        m1=m1,
        m2=m2,
        mu=mu_new,
        eta1=_eta1(cfg, mu_new, state.s_norm2_sq),
        k=k,
        residual=residual,
        step_max=step_max,
    )
    state.trace.append(record)
    return state


def check_convergence(state: LRRState, s: np.ndarray, cfg: LRRConfig) -> bool:
    """Relative reconstruction residual below eps1 AND step criterion below eps2."""
    return state.residual < cfg.eps1 and state.step_max <= cfg.eps2


def lrr_solve(s: np.ndarray, cfg: LRRConfig | None = None) -> LRRSolution:
    """Run the ADMM to convergence or cfg.max_iter, whichever comes first.

    Parameters
    ----------
    s : (M, N) array, finite, nonzero
        The matrix to self-express (columns are the items).
    cfg : LRRConfig, optional

    Returns the coefficient matrix z (N x N), sparse error e, whether both
    convergence criteria were met, and the iteration trace.
    """
    cfg = cfg or LRRConfig()
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2:
        raise ArgumentError("input must be a 2-D matrix")
    if not np.isfinite(s).all():
        raise ArgumentError("input must be finite")
    if np.linalg.norm(s) == 0:
        raise ArgumentError("input must be nonzero")
    state = init_state(s, cfg)
    converged = False
    for _ in range(cfg.max_iter):
        state = z_step(state, s, cfg)
        state = j_step(state, cfg)
        state = e_step(state, s, cfg)
        state = dual_step(state, s, cfg)
        if check_convergence(state, s, cfg):
            converged = True
            break
    sv = np.linalg.svd(state.z, compute_uv=False)
    eff_rank = int((sv > 1e-3 * sv[0]).sum()) if sv.size and sv[0] > 0 else 0
    return LRRSolution(
        z=state.z,
        e=state.e,
        converged=converged,
        iterations=state.k,
        final_residual=state.residual,
        effective_rank=eff_rank,
        trace=tuple(state.trace),
    )


def write_trace_csv(trace, path) -> None:
    """Dump an iteration trace as `k,residual,step_max,mu` csv rows."""
    with open(path, "w") as fh:
        fh.write("k,residual,step_max,mu\n")
        for rec in trace:
            fh.write(f"{rec.k},{rec.residual:.17g},{rec.step_max:.17g},{rec.mu:.17g}\n")
