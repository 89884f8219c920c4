"""Complex adaptive filters: CRMC, RLS, CLMS, LMP and CMPN.

Every filter follows the same step contract. Given a snapshot ``x`` and a
reference ``d`` it forms the output ``y = w^H x`` with the current weights,
the a priori error ``e = d - y``, and then updates ``w``.

All state arrays may carry leading batch axes: ``w`` has shape
``batch + (M,)`` and a step consumes ``x`` of shape ``batch + (M,)`` and ``d``
of shape ``batch``. This runs many independent filters in lockstep.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class FilterDivergedError(ArithmeticError):
    """Raised when an update would produce non-finite weights."""


class DegenerateGainError(ArithmeticError):
    """Raised when ``lambda + psi x^H F x <= 0`` (F lost positive definiteness)."""


class StepResult(NamedTuple):
    output: np.ndarray
    prior_error: np.ndarray
    weights_after: np.ndarray
    psi: np.ndarray
    spectral: np.ndarray


def gaussian_kernel(e, sigma: float):
    """Correntropy weight ``exp(-|e|^2 / (2 sigma^2))``."""
    if not sigma > 0:
        raise ValueError(f"kernel size must be positive, got {sigma}")
    return np.exp(-np.abs(e) ** 2 / (2.0 * sigma ** 2))


def crmc_cost(errors, lam: float, sigma: float) -> float:
    """Exponentially weighted correntropy ``sum_i lam^(n-i) k(e_i)``."""
    if not 0 < lam <= 1:
        raise ValueError(f"forgetting factor must lie in (0, 1], got {lam}")
    errors = np.asarray(errors)
    n = errors.shape[0]
    decay = lam ** np.arange(n - 1, -1, -1, dtype=float)
    return float(np.sum(decay * gaussian_kernel(errors, sigma)))


def crmc_cost_at(w, x, d, lam: float, sigma: float) -> float:
    """Cost of weights ``w`` on data ``x`` (n, M), ``d`` (n,)."""
    return crmc_cost(d - x @ np.conj(w), lam, sigma)


def crmc_cost_gradient(w, x, d, lam: float, sigma: float) -> np.ndarray:
    """Gradient of :func:`crmc_cost_at` packed as ``dJ/dRe(w) + 1j dJ/dIm(w)``.

    Equals ``sigma^-2 sum_i lam^(n-i) psi_i conj(e_i) x_i``.
    """
    e = d - x @ np.conj(w)
    n = len(d)
    weight = lam ** np.arange(n - 1, -1, -1, dtype=float) * gaussian_kernel(e, sigma)
    return (weight * np.conj(e)) @ x / sigma ** 2


_PSI_FLOOR = np.finfo(float).tiny


def _quiet():
    # overflow on a diverging run is reported by _commit, not by numpy warnings
    return np.errstate(over="ignore", invalid="ignore")


def _inner(w, x):
    return np.sum(np.conj(w) * x, axis=-1)


class AdaptiveFilter:
    """Shared weight storage, divergence check and batch run loop."""

    name = "base"

    def __init__(self, num_taps: int, batch_shape=()):
        if num_taps < 1:
            raise ValueError("num_taps must be >= 1")
        self.num_taps = num_taps
        self.batch_shape = tuple(batch_shape)
        self.w = np.zeros(self.batch_shape + (num_taps,), dtype=complex)

    def _commit(self, w_new):
        if not np.all(np.isfinite(w_new)):
            raise FilterDivergedError(f"{self.name}: non-finite weights")
        self.w = w_new

    def step(self, x, d) -> StepResult:
        raise NotImplementedError

    def run(self, x, d) -> np.ndarray:
        """Step through ``x`` (n, ..., M) and ``d`` (n, ...); returns a priori errors."""
        errors = np.empty(np.shape(d), dtype=complex)
        for n in range(len(d)):
            errors[n] = self.step(x[n], d[n]).prior_error
        return errors


class RLS(AdaptiveFilter):
    """Exponentially weighted complex RLS with inverse correlation ``F``.

    Parameters
    ----------
    num_taps : int
        Number of weights ``M``.
    lam : float
        Forgetting factor in (0, 1].
    delta : float
        Initialization scale, ``F(0) = delta * I``.
    """

    name = "rls"

    def __init__(self, num_taps, lam=0.99, delta=100.0, batch_shape=()):
        super().__init__(num_taps, batch_shape)
        if not 0 < lam <= 1:
            raise ValueError(f"forgetting factor must lie in (0, 1], got {lam}")
        if not delta > 0:
            raise ValueError(f"delta must be positive, got {delta}")
        self.lam = lam
        self.delta = delta
        self.F = np.broadcast_to(delta * np.eye(num_taps, dtype=complex),
                                 self.batch_shape + (num_taps, num_taps)).copy()

    def weighting(self, e):
        return np.ones(np.shape(e))

    def _apply_F(self, x):
        return (self.F @ x[..., None])[..., 0]

    def gain(self, x, psi):
        """Gain ``psi F x / (lam + psi x^H F x)``."""
        return self._gain(x, psi)[0]

    def _gain(self, x, psi):
        fx = self._apply_F(x)
        quad = np.real(_inner(x, fx))
        denom = self.lam + psi * quad
        if np.any(denom <= 0) or not np.all(np.isfinite(denom)):
            raise DegenerateGainError(f"{self.name}: gain denominator {np.min(denom)}")
        phi = (psi / denom)[..., None] * fx
        return phi, fx, quad, denom

    def spectral_condition(self, x, psi):
        """Largest eigenvalue of ``psi F x x^H / (lam + psi x^H F x)``.

        The matrix has rank one, so this is ``psi q / (lam + psi q)`` with
        ``q = x^H F x``.
        """
        quad = np.real(_inner(x, self._apply_F(x)))
        return psi * quad / (self.lam + psi * quad)

    def step(self, x, d) -> StepResult:
        x = np.asarray(x, dtype=complex)
        with _quiet():
            y = _inner(self.w, x)
            e = d - y
            return self._update(x, e, y, self.weighting(e))

    def update_weighted(self, x, d, psi) -> StepResult:
        """Step with an externally supplied sample weight ``psi``."""
        x = np.asarray(x, dtype=complex)
        with _quiet():
            y = _inner(self.w, x)
            return self._update(x, d - y, y, np.asarray(psi, dtype=float))

    def _update(self, x, e, y, psi):
        phi, fx, quad, denom = self._gain(x, psi)
        w_new = self.w + phi * np.conj(e)[..., None]
        F = (self.F - phi[..., :, None] * np.conj(fx)[..., None, :]) / self.lam
        self._commit(w_new)
        self.F = 0.5 * (F + np.conj(np.swapaxes(F, -1, -2)))
        return StepResult(y, e, self.w, psi, psi * quad / denom)


class CRMC(RLS):
    """Complex recursive maximum correntropy filter.

    Identical to :class:`RLS` except that each snapshot enters the recursion
    with weight ``psi = exp(-|e|^2 / (2 sigma^2))``, where ``e`` is the a
    priori error computed from the previous weights. Snapshots producing
    errors far beyond ``sigma`` barely move ``w`` or ``F``.
    """

    name = "crmc"

    def __init__(self, num_taps, lam=0.99, sigma=8.0, delta=100.0, batch_shape=()):
        super().__init__(num_taps, lam=lam, delta=delta, batch_shape=batch_shape)
        if not sigma > 0:
            raise ValueError(f"kernel size must be positive, got {sigma}")
        self.sigma = sigma

    def weighting(self, e):
        # exp underflows to 0 for |e| beyond ~38 sigma; psi must stay in (0, 1]
        return np.maximum(gaussian_kernel(e, self.sigma), _PSI_FLOOR)


class CLMS(AdaptiveFilter):
    """Complex LMS: ``w <- w + mu x conj(e)``."""

    name = "clms"

    def __init__(self, num_taps, mu=3e-4, batch_shape=()):
        super().__init__(num_taps, batch_shape)
        if not mu > 0:
            raise ValueError(f"step size must be positive, got {mu}")
        self.mu = mu

    def error_scale(self, e):
        return np.ones(np.shape(e))

    def step(self, x, d) -> StepResult:
        x = np.asarray(x, dtype=complex)
        with _quiet():
            y = _inner(self.w, x)
            e = d - y
            g = self.mu * self.error_scale(e) * np.conj(e)
            self._commit(self.w + g[..., None] * x)
        nan = np.full(np.shape(e), np.nan)
        return StepResult(y, e, self.w, nan, nan)


def _abs_power(mag, exponent):
    # |e|^exponent with the convention 0 where |e| == 0
    safe = np.where(mag > 0, mag, 1.0)
    return np.where(mag > 0, safe ** exponent, 0.0)


class LMP(CLMS):
    """Least-mean-p-norm: ``w <- w + mu |e|^(p-2) conj(e) x``.

    The update is zero when ``e == 0``. No beam-pointing constraint is applied.
    """

    name = "lmp"

    def __init__(self, num_taps, mu=1e-3, p=1.0, batch_shape=()):
        super().__init__(num_taps, mu=mu, batch_shape=batch_shape)
        if not 1 <= p <= 2:
            raise ValueError(f"p must lie in [1, 2], got {p}")
        self.p = p

    def error_scale(self, e):
        return _abs_power(np.abs(e), self.p - 2.0)


class CMPN(CLMS):
    """Continuous mixed p-norm, discretized as a uniform average over ``p_grid``.

    ``w <- w + mu conj(e) x * mean_p(p |e|^(p-2))``.
    """

    name = "cmpn"

    def __init__(self, num_taps, mu=1e-3, p_grid=(1.0, 1.25, 1.5, 1.75, 2.0),
                 batch_shape=()):
        super().__init__(num_taps, mu=mu, batch_shape=batch_shape)
        p_grid = np.asarray(p_grid, dtype=float)
        if p_grid.size == 0 or np.any(p_grid < 1) or np.any(p_grid > 2):
            raise ValueError("p_grid must be a non-empty subset of [1, 2]")
        self.p_grid = p_grid

    def error_scale(self, e):
        mag = np.abs(e)[..., None]
        return np.mean(self.p_grid * _abs_power(mag, self.p_grid - 2.0), axis=-1)


ALGORITHMS = {cls.name: cls for cls in (CLMS, LMP, CMPN, RLS, CRMC)}


def crmc_fixed_point(x, d, sigma, delta=1e4, sweeps=100, tol=1e-13):
    """Weights satisfying the correntropy-weighted normal equations.

    Each sweep runs the recursive update with ``lam = 1`` over the whole
    batch, with every sample weight ``psi_i`` frozen at the kernel of the
    error left by the previous sweep's weights. A fixed point ``w`` satisfies
    ``(sum psi x x^H + I/delta) w = sum psi x conj(d)``.

    Returns
    -------
    w : ndarray
    psi : ndarray
        Sample weights evaluated at ``w``.
    """
    x = np.asarray(x, dtype=complex)
    d = np.asarray(d, dtype=complex)
    w = np.zeros(x.shape[1], dtype=complex)
    for _ in range(sweeps):
        psi = gaussian_kernel(d - x @ np.conj(w), sigma)
        filt = RLS(x.shape[1], lam=1.0, delta=delta)
        for xn, dn, pn in zip(x, d, psi):
            filt.update_weighted(xn, dn, pn)
        change = np.linalg.norm(filt.w - w)
        w = filt.w
        if change <= tol * np.linalg.norm(w):
            break
    return w, gaussian_kernel(d - x @ np.conj(w), sigma)
