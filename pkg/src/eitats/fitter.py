"""Damped least-squares fitting of the lineshape models.

A plain Levenberg-Marquardt loop (multiplicative damping on the normal
equations, x10 on a rejected step, /10 on an accepted one) run from
several starting points.  The first start is a deterministic, data-driven
guess; the rest are seeded log-uniform perturbations of it.  All starts
advance in lockstep through one vectorized loop, which is what keeps
parameter sweeps cheap; a scalar reference implementation of the same
schedule is kept alongside for verification.

Widths and amplitudes are fitted unconstrained - the models depend only
on their squares - and folded to the canonical nonnegative representative
at readout.

The best run wins by SSR whether or not it met a convergence criterion
before the iteration cap: the interference-type model has flat valleys
(nearly cancelling lobes) where the minimum is approached but never
attained, and discarding a capped run there would hand victory to a far
worse local minimum.  The returned ``converged`` flag reports the best
run's status honestly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lineshape import Spectrum
from .models import AtsParams, EitParams, ModelKind, _eval_array, _jacobian_array, canonicalize

__all__ = [
    "FitConfig",
    "FitResult",
    "FitConvergenceError",
    "DegenerateDataError",
    "fit",
    "initial_guesses",
    "variance_floor",
]

_DAMPING_MAX = 1e15
_DAMPING_MIN = 1e-15
# Starts whose final SSR is within this relative distance of the best one
# are counted as agreeing with it.
_AGREEMENT_RTOL = 1e-6


class FitConvergenceError(RuntimeError):
    """Every start failed to produce a usable minimum."""


class DegenerateDataError(ValueError):
    """The data carry no shape information (all values equal)."""


@dataclass(frozen=True)
class FitConfig:
    """Solver knobs; defaults are deliberate and reproducible."""

    max_iterations: int = 1000
    relative_tolerance: float = 1e-12
    initial_damping: float = 1e-3
    n_starts: int = 16
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if not self.relative_tolerance > 0:
            raise ValueError("relative_tolerance must be positive")
        if not self.initial_damping > 0:
            raise ValueError("initial_damping must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class FitResult:
    """Best fit over all starts, with residual statistics."""

    params: EitParams | AtsParams
    ssr: float
    sigma_hat_sq: float
    n_points: int
    converged: bool
    n_starts_agreeing: int


def variance_floor(values) -> float:
    """Floor for the residual variance before it enters a logarithm.

    Exact-model fits drive the estimated variance to zero; flooring it at
    1e-30 times the squared data scale keeps downstream information
    values finite without affecting any non-exact fit.
    """
    return 1e-30 * float(np.max(np.square(np.asarray(values, dtype=float))))


def _half_width_outward(deltas: np.ndarray, values: np.ndarray, peak_idx: int) -> float:
    """Distance from the peak to where the profile falls to half, scanning
    away from the origin; falls back to a quarter of the grid span."""
    half = values[peak_idx] / 2.0
    n = values.size
    step = 1 if deltas[peak_idx] >= 0 else -1
    j = peak_idx + step
    while 0 <= j < n:
        if values[j] <= half:
            return abs(deltas[j] - deltas[peak_idx])
        j += step
    return (deltas[-1] - deltas[0]) / 4.0


def _first_guess_ats(deltas: np.ndarray, values: np.ndarray) -> np.ndarray:
    peak_idx = int(np.argmax(values))
    peak = max(float(values[peak_idx]), np.finfo(float).tiny)
    d0 = abs(float(deltas[peak_idx]))
    g = max(_half_width_outward(deltas, values, peak_idx), float(deltas[1] - deltas[0]))
    # Peak height is c^2/g^2 for a separated doublet and 2c^2/g^2 for a
    # coincident one; interpolate between the two limits.
    doubling = 1.0 + g * g / (g * g + 4.0 * d0 * d0)
    c = g * np.sqrt(peak / doubling)
    return np.array([c, g, d0])


def _first_guess_eit(deltas: np.ndarray, values: np.ndarray) -> np.ndarray:
    peak = max(float(np.max(values)), np.finfo(float).tiny)
    centre_idx = int(np.argmin(np.abs(deltas)))
    centre = float(values[centre_idx])
    span = deltas[-1] - deltas[0]
    # Broad width: outermost half-maximum crossing.
    above = np.abs(deltas[values >= peak / 2.0])
    g_broad = float(np.max(above)) if above.size else span / 4.0
    g_broad = max(g_broad, float(deltas[1] - deltas[0]))
    # Narrow width: where the central dip recovers halfway to the peak.
    dip = peak - centre
    if dip > 0:
        risen = np.abs(deltas[values >= (centre + peak) / 2.0])
        g_narrow = float(np.min(risen)) if risen.size else g_broad / 2.0
        g_narrow = max(g_narrow, float(deltas[1] - deltas[0]) / 2.0)
    else:
        g_narrow = g_broad / 2.0
    c_plus = g_broad * np.sqrt(peak)
    c_minus = g_narrow * np.sqrt(max(dip, 1e-6 * peak))
    return np.array([c_plus, c_minus, g_broad, g_narrow])


def initial_guesses(model: ModelKind, data: Spectrum, n: int, seed: int) -> list[np.ndarray]:
    """Data-driven first guess plus n-1 seeded log-uniform perturbations.

    The perturbations scale each component by a factor drawn uniformly in
    log space between 1/4 and 4, so the starts cover both the compact and
    the nearly-degenerate corners of parameter space.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if model is ModelKind.ATS:
        base = _first_guess_ats(data.deltas, data.values)
    else:
        base = _first_guess_eit(data.deltas, data.values)
    seed_base = base.copy()
    if model is ModelKind.ATS and seed_base[2] == 0.0:
        # Single-peaked data puts the offset guess exactly at zero, which is
        # a stationary plane of the objective (the model is even in the
        # offset) that multiplicative perturbations can never leave; explore
        # unresolved splittings up to the width scale instead.
        seed_base[2] = seed_base[1]
    guesses = [base]
    rng = np.random.default_rng(seed)
    log4 = np.log(4.0)
    for _ in range(n - 1):
        factors = np.exp(rng.uniform(-log4, log4, size=base.size))
        guesses.append(seed_base * factors)
    return guesses


def _batch_eval(model: ModelKind, x: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Model values for a stack of parameter vectors; shape (s, n)."""
    d = deltas[None, :]
    if model is ModelKind.EIT:
        cp, cm, gp, gm = (x[:, i : i + 1] for i in range(4))
        d2 = d * d
        return cp * cp / (gp * gp + d2) - cm * cm / (gm * gm + d2)
    c, g, d0 = (x[:, i : i + 1] for i in range(3))
    return c * c * (1.0 / (g * g + (d - d0) ** 2) + 1.0 / (g * g + (d + d0) ** 2))


def _batch_jacobian(model: ModelKind, x: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Model Jacobians for a stack of parameter vectors; shape (s, n, k)."""
    s = x.shape[0]
    d = deltas[None, :]
    if model is ModelKind.EIT:
        cp, cm, gp, gm = (x[:, i : i + 1] for i in range(4))
        d2 = d * d
        lp = 1.0 / (gp * gp + d2)
        lm = 1.0 / (gm * gm + d2)
        jac = np.empty((s, deltas.size, 4))
        jac[:, :, 0] = 2.0 * cp * lp
        jac[:, :, 1] = -2.0 * cm * lm
        jac[:, :, 2] = -2.0 * gp * cp * cp * lp * lp
        jac[:, :, 3] = 2.0 * gm * cm * cm * lm * lm
        return jac
    c, g, d0 = (x[:, i : i + 1] for i in range(3))
    lm_ = 1.0 / (g * g + (d - d0) ** 2)
    lp_ = 1.0 / (g * g + (d + d0) ** 2)
    jac = np.empty((s, deltas.size, 3))
    jac[:, :, 0] = 2.0 * c * (lm_ + lp_)
    jac[:, :, 1] = -2.0 * g * c * c * (lm_ * lm_ + lp_ * lp_)
    jac[:, :, 2] = c * c * (2.0 * (d - d0) * lm_ * lm_ - 2.0 * (d + d0) * lp_ * lp_)
    return jac


def _damped_step(jtj: np.ndarray, diag: np.ndarray, grad: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Solve the damped normal equations for a stack of systems."""
    k = jtj.shape[-1]
    systems = jtj + lam[:, None, None] * diag[:, :, None] * np.eye(k)
    try:
        return np.linalg.solve(systems, grad[..., None])[..., 0]
    except np.linalg.LinAlgError:
        steps = np.empty_like(grad)
        for i in range(systems.shape[0]):
            try:
                steps[i] = np.linalg.solve(systems[i], grad[i])
            except np.linalg.LinAlgError:
                steps[i], *_ = np.linalg.lstsq(systems[i], grad[i], rcond=None)
        return steps


def _lm_run_batch(
    model: ModelKind,
    x0: np.ndarray,
    deltas: np.ndarray,
    values: np.ndarray,
    cfg: FitConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Advance every start through the damped descent in lockstep.

    Returns (params, ssr, converged) per start.  Each start follows
    exactly the schedule of :func:`_lm_run_reference`; starts that
    converge or blow up simply drop out of the active set.
    """
    n_starts = x0.shape[0]
    x = np.array(x0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        resid = values[None, :] - _batch_eval(model, x, deltas)
        ssr = np.einsum("sn,sn->s", resid, resid)
    converged = np.zeros(n_starts, dtype=bool)
    active = np.isfinite(ssr)
    ssr = np.where(np.isfinite(ssr), ssr, np.inf)
    lam = np.full(n_starts, cfg.initial_damping)
    grad_tol = 1e-12 * max(1.0, float(np.max(np.square(values))))
    tiny = np.finfo(float).tiny

    for _ in range(cfg.max_iterations):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        xa = x[idx]
        jac = _batch_jacobian(model, xa, deltas)
        grad = np.einsum("snk,sn->sk", jac, resid[idx])
        bad = ~np.all(np.isfinite(grad), axis=1)
        if bad.any():
            active[idx[bad]] = False
            keep = ~bad
            idx, xa, jac, grad = idx[keep], xa[keep], jac[keep], grad[keep]
            if idx.size == 0:
                continue
        flat = np.max(np.abs(grad), axis=1) < grad_tol
        if flat.any():
            converged[idx[flat]] = True
            active[idx[flat]] = False
            keep = ~flat
            idx, xa, jac, grad = idx[keep], xa[keep], jac[keep], grad[keep]
            if idx.size == 0:
                continue
        jtj = np.einsum("snk,snl->skl", jac, jac)
        diag = np.diagonal(jtj, axis1=1, axis2=2).copy()
        # Flat directions (e.g. the doublet offset at zero) get a floor so
        # the damped system stays solvable.
        floor = 1e-12 * np.maximum(diag.max(axis=1), tiny)
        diag = np.maximum(diag, floor[:, None])

        pending = np.ones(idx.size, dtype=bool)
        accepted = np.zeros(idx.size, dtype=bool)
        x_next = xa.copy()
        ssr_next = ssr[idx].copy()
        lam_local = lam[idx].copy()
        while pending.any():
            p = np.flatnonzero(pending)
            step = _damped_step(jtj[p], diag[p], grad[p], lam_local[p])
            x_trial = xa[p] + step
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                resid_trial = values[None, :] - _batch_eval(model, x_trial, deltas)
                ssr_trial = np.einsum("sn,sn->s", resid_trial, resid_trial)
            ok = np.isfinite(ssr_trial) & (ssr_trial <= ssr[idx][p])
            acc = p[ok]
            x_next[acc] = x_trial[ok]
            ssr_next[acc] = ssr_trial[ok]
            accepted[acc] = True
            pending[acc] = False
            rej = p[~ok]
            lam_local[rej] *= 10.0
            dead = rej[lam_local[rej] > _DAMPING_MAX]
            if dead.size:
                # No descent direction at any damping: numerically stationary.
                converged[idx[dead]] = True
                active[idx[dead]] = False
                pending[dead] = False

        if accepted.any():
            a = np.flatnonzero(accepted)
            ga = idx[a]
            drop = ssr[ga] - ssr_next[a]
            x[ga] = x_next[a]
            resid[ga] = values[None, :] - _batch_eval(model, x[ga], deltas)
            ssr[ga] = ssr_next[a]
            lam[ga] = np.maximum(lam_local[a] / 10.0, _DAMPING_MIN)
            done = drop <= cfg.relative_tolerance * np.maximum(ssr[ga], tiny)
            converged[ga[done]] = True
            active[ga[done]] = False

    return x, ssr, converged


def _lm_run_reference(
    model: ModelKind,
    x0: np.ndarray,
    deltas: np.ndarray,
    values: np.ndarray,
    cfg: FitConfig,
) -> tuple[np.ndarray, float, bool, list[float]]:
    """Scalar single-start descent; returns (x, ssr, converged, ssr history).

    Same schedule as the batch engine, kept as an independent check and
    for per-iteration diagnostics.
    """
    x = np.array(x0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        resid = values - _eval_array(model, x, deltas)
        ssr = float(resid @ resid)
    if not np.isfinite(ssr):
        return x, np.inf, False, [ssr]
    lam = cfg.initial_damping
    grad_tol = 1e-12 * max(1.0, float(np.max(np.square(values))))
    tiny = np.finfo(float).tiny
    history = [ssr]
    converged = False

    for _ in range(cfg.max_iterations):
        jac = _jacobian_array(model, x, deltas)
        grad = jac.T @ resid
        if not np.all(np.isfinite(grad)):
            break
        if float(np.max(np.abs(grad))) < grad_tol:
            converged = True
            break
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        floor = 1e-12 * max(float(diag.max()), tiny)
        diag[diag < floor] = floor

        accepted = False
        while lam <= _DAMPING_MAX:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(jtj + lam * np.diag(diag), grad, rcond=None)
            x_trial = x + step
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                resid_trial = values - _eval_array(model, x_trial, deltas)
                ssr_trial = float(resid_trial @ resid_trial) if np.all(np.isfinite(resid_trial)) else np.inf
            if np.isfinite(ssr_trial) and ssr_trial <= ssr:
                accepted = True
                break
            lam *= 10.0

        if not accepted:
            converged = True
            break

        drop = ssr - ssr_trial
        x, resid, ssr = x_trial, resid_trial, ssr_trial
        history.append(ssr)
        lam = max(lam / 10.0, _DAMPING_MIN)
        if drop <= cfg.relative_tolerance * max(ssr, tiny):
            converged = True
            break

    return x, ssr, converged, history


def fit(model: ModelKind, data: Spectrum, cfg: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood (unweighted least squares) fit of one model.

    Runs ``cfg.n_starts`` damped descents and keeps the lowest SSR, with
    the lowest start index breaking exact ties, so the outcome does not
    depend on evaluation order.  Residuals are data minus model on the
    spectrum's own grid.

    Raises
    ------
    DegenerateDataError
        If all data values are equal (no shape to fit).
    FitConvergenceError
        If every start fails (non-finite outcome).
    ValueError
        If the spectrum has too few points for the model.
    """
    cfg = cfg or FitConfig()
    n = data.n_points
    if n <= model.k:
        raise ValueError(f"need more than {model.k} points to fit {model.value}, got {n}")
    values = data.values
    if np.all(values == values[0]):
        raise DegenerateDataError("all data values are equal; nothing to fit")

    x0 = np.stack(initial_guesses(model, data, cfg.n_starts, cfg.seed))
    x, ssr, converged = _lm_run_batch(model, x0, data.deltas, values, cfg)

    usable = np.isfinite(ssr)
    if not usable.any():
        raise FitConvergenceError(f"no usable minimum fitting {model.value} ({cfg.n_starts} starts)")
    best = int(np.argmin(np.where(usable, ssr, np.inf)))  # argmin keeps the lowest index on ties
    best_ssr = float(ssr[best])
    agreeing = int(np.sum(usable & (ssr <= best_ssr * (1.0 + _AGREEMENT_RTOL) + np.finfo(float).tiny)))

    return FitResult(
        params=canonicalize(model, x[best]),
        ssr=best_ssr,
        sigma_hat_sq=best_ssr / n,
        n_points=n,
        converged=bool(converged[best]),
        n_starts_agreeing=agreeing,
    )
