"""Luxemburg and Orlicz norms, modulars, and the Hoelder pairing bound."""

from __future__ import annotations

import math

import numpy as np

from .errors import CrossCheckFailure, NumericFailure
from .finite_model import RandomVariable, pairing
from .orlicz_functions import (
    EntropyConjugateFunction,
    EntropyFunction,
    ExpConjugateFunction,
    ExpFunction,
    OrliczFunction,
    PiecewiseLinearFunction,
    PowerFunction,
    conjugate,
)

__all__ = [
    "modular",
    "luxemburg_norm",
    "orlicz_norm",
    "holder_check",
    "phi_inverse",
]

_MAX_DOUBLINGS = 200


def _modular_raw(x_abs: np.ndarray, p: np.ndarray, phi: OrliczFunction,
                 lam: float) -> float:
    """E[phi(|X|/lam)] with overflow / beyond-domain reported as +inf."""
    try:
        vals = np.asarray(phi(x_abs / lam), dtype=float)
    except NumericFailure:
        return math.inf
    if np.any(~np.isfinite(vals)):
        return math.inf
    total = 0.0
    for pi, vi in zip(p, vals):  # fixed order for reproducibility
        total += pi * vi
    return total


def modular(X: RandomVariable, phi: OrliczFunction, lam: float) -> float:
    """E[phi(|X| / lam)] for lam > 0."""
    if lam <= 0:
        raise NumericFailure("modular requires lam > 0")
    x_abs = np.abs(X.x)
    try:
        vals = np.asarray(phi(x_abs / lam), dtype=float)
    except NumericFailure as exc:
        raise NumericFailure(f"modular evaluation failed: {exc}") from exc
    bad = np.where(~np.isfinite(vals))[0]
    if len(bad):
        raise NumericFailure(
            f"modular overflow at atom {int(bad[0])} (value {X.values[int(bad[0])]!r})"
        )
    total = 0.0
    for pi, vi in zip(X.space.probabilities, vals):
        total += pi * vi
    return total


def luxemburg_norm(X: RandomVariable, phi: OrliczFunction) -> float:
    """``inf{lam > 0 : E[phi(|X|/lam)] <= 1}`` by monotone bisection.

    Bracket is grown/shrunk by doubling from ``max|x_i|``; the returned
    value is the lower bracket (the infimum is approached from the
    right), with relative width 1e-10.
    """
    x_abs = np.abs(X.x)
    if not np.any(x_abs > 0):
        return 0.0
    p = X.space.p
    lam = float(np.max(x_abs))
    if _modular_raw(x_abs, p, phi, lam) <= 1.0:
        hi = lam
        lo = lam
        for _ in range(_MAX_DOUBLINGS):
            lo /= 2.0
            if _modular_raw(x_abs, p, phi, lo) > 1.0:
                break
            hi = lo
        else:
            raise NumericFailure("luxemburg_norm: lower bracket not found")
    else:
        lo = lam
        hi = lam
        for _ in range(_MAX_DOUBLINGS):
            hi *= 2.0
            if _modular_raw(x_abs, p, phi, hi) <= 1.0:
                break
            lo = hi
        else:
            raise NumericFailure("luxemburg_norm: upper bracket not found")
    while hi - lo > 1e-10 * lo:
        mid = 0.5 * (lo + hi)
        if _modular_raw(x_abs, p, phi, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return lo


def phi_inverse(phi: OrliczFunction, v: float) -> float:
    """Solve ``phi(t) = v`` for ``v >= 0`` (exact for piecewise-linear)."""
    if v < 0:
        raise NumericFailure("phi_inverse requires v >= 0")
    if v == 0.0:
        return 0.0
    if isinstance(phi, PiecewiseLinearFunction):
        knots = phi._knots
        edges = np.concatenate(([0.0], phi.breakpoints))
        k = int(np.searchsorted(knots, v, side="right")) - 1
        k = min(k, len(edges) - 1)
        if phi.slopes[k] == 0.0:
            # flat zero head: inverse is the right edge of the flat part
            return float(edges[k + 1]) if k + 1 < len(edges) else math.inf
        t = float(edges[k] + (v - knots[k]) / phi.slopes[k])
        if phi.domain_cap is not None and t > phi.domain_cap * (1 + 1e-12):
            raise NumericFailure("phi_inverse: value beyond domain cap")
        return t
    lo, hi = 0.0, 1.0
    for _ in range(1100):
        try:
            if float(phi(hi)) >= v:
                break
        except NumericFailure:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NumericFailure("phi_inverse: bracket not found")
    while hi - lo > 1e-12 + 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        try:
            fm = float(phi(mid))
        except NumericFailure:
            fm = math.inf
        if fm >= v:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _g_vec(phi: OrliczFunction, s: np.ndarray) -> np.ndarray:
    """Vectorized left inverse of the right-derivative.

    Raises NumericFailure when some slope exceeds the representable
    range (for piecewise-linear functions without a cap the caller
    interprets this as a budget-limited top segment).
    """
    s = np.asarray(s, dtype=float)
    if isinstance(phi, PowerFunction):
        if phi.p == 1.0:
            if np.any(s > phi.coef):
                raise NumericFailure("linear function: slope range exhausted")
            return np.zeros_like(s)
        return (np.maximum(s, 0.0) / (phi.coef * phi.p)) ** (1.0 / (phi.p - 1.0))
    if isinstance(phi, ExpFunction):
        return np.log(np.maximum(s, 1.0))
    if isinstance(phi, ExpConjugateFunction):
        with np.errstate(over="ignore"):
            out = np.where(s > 0, np.exp(s), 0.0)
        if np.any(~np.isfinite(out)):
            raise NumericFailure("slope beyond representable range")
        return out
    if isinstance(phi, EntropyFunction):
        with np.errstate(over="ignore"):
            out = np.where(s > 0, np.expm1(np.maximum(s, 0.0)), 0.0)
        if np.any(~np.isfinite(out)):
            raise NumericFailure("slope beyond representable range")
        return out
    if isinstance(phi, EntropyConjugateFunction):
        return np.log1p(np.maximum(s, 0.0))
    if isinstance(phi, PiecewiseLinearFunction):
        if phi.domain_cap is None and np.any(s > phi.slopes[-1]):
            raise NumericFailure("slope beyond maximal slope")
        k = np.searchsorted(phi.slopes, s, side="left")
        edges = np.concatenate(([0.0], phi.breakpoints,
                                [phi.domain_cap if phi.domain_cap is not None
                                 else phi.breakpoints[-1] if len(phi.breakpoints)
                                 else 0.0]))
        k = np.clip(k, 0, len(edges) - 1)
        return edges[k]
    return np.array([phi.rderiv_inverse_left(float(x)) for x in s])


def orlicz_norm(Y: RandomVariable, phi: OrliczFunction,
                psi: OrliczFunction | None = None) -> float:
    """Definitional Orlicz norm ``sup{|E[XY]| : ||X||_phi <= 1}``.

    The supremum is computed by the stationarity method (the optimal X
    inverts the right-derivative of phi at a common multiplier fixed by
    the unit-modular constraint, with residual budget distributed along
    flat segments).  An independent Amemiya value
    ``inf_k (1 + E[psi(k|Y|)]) / k`` is computed by unimodal search and
    the two must agree within 1e-6 relative; the definitional value is
    returned.
    """
    y_abs = np.abs(Y.x)
    if not np.any(y_abs > 0):
        return 0.0
    if psi is None:
        psi = conjugate(phi)
    p = Y.space.p
    definitional = _orlicz_definitional(y_abs, p, phi)
    amemiya = _orlicz_amemiya(y_abs, p, psi)
    scale = max(abs(definitional), abs(amemiya), 1e-300)
    if abs(definitional - amemiya) > 1e-6 * scale:
        raise CrossCheckFailure(
            f"orlicz_norm: definitional {definitional!r} vs Amemiya {amemiya!r} "
            f"disagree beyond 1e-6 relative (conjugate-pair inconsistency?)"
        )
    return definitional


def _orlicz_definitional(y_abs: np.ndarray, p: np.ndarray,
                         phi: OrliczFunction) -> float:
    active = y_abs > 0

    def h(mu: float) -> float:
        try:
            x = _g_vec(phi, mu * y_abs)
        except NumericFailure:
            return math.inf
        vals = np.asarray(phi(x), dtype=float)
        if np.any(~np.isfinite(vals)):
            return math.inf
        return float(np.sum(p * vals))

    # bracket the multiplier: h nondecreasing, h(0) = 0
    lo, hi = 0.0, 1.0
    for _ in range(_MAX_DOUBLINGS * 6):
        if h(hi) > 1.0:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NumericFailure("orlicz_norm: multiplier bracket not found")
    for _ in range(120):
        if hi - lo <= 1e-14 * hi:
            break
        mid = 0.5 * (lo + hi)
        if h(mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    mu = lo if lo > 0 else hi * 0.5
    x = _g_vec(phi, mu * y_abs)
    budget = 1.0 - float(np.sum(p * np.asarray(phi(x), dtype=float)))
    # distribute residual budget along flat segments (atoms whose
    # stationarity inverse jumps across the bracket)
    if budget > 1e-15:
        try:
            x_hi = _g_vec(phi, hi * y_abs)
        except NumericFailure:
            x_hi = np.where(active, math.inf, 0.0)
        jump = active & (x_hi > x * (1 + 1e-9) + 1e-300)
        for i in np.where(jump)[0]:
            slope = float(phi.rderiv(x[i]))
            if slope <= 0:
                continue
            room = x_hi[i] - x[i]
            d = min(room, budget / (p[i] * slope))
            x[i] += d
            budget -= p[i] * slope * d
            if budget <= 1e-15:
                break
    total = 0.0
    for pi, xi, yi in zip(p, x, y_abs):
        total += pi * xi * yi
    return total


def _orlicz_amemiya(y_abs: np.ndarray, p: np.ndarray,
                    psi: OrliczFunction) -> float:
    def objective(k: float) -> float:
        m = _modular_raw(k * y_abs, p, psi, 1.0)
        return (1.0 + m) / k if math.isfinite(m) else math.inf

    # coarse scan over log k, then golden-section refinement
    logs = np.linspace(-18.0, 18.0, 181)
    vals = [objective(10.0 ** u) for u in logs]
    j = int(np.argmin(vals))
    lo = logs[max(j - 1, 0)]
    hi = logs[min(j + 1, len(logs) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = objective(10.0 ** c), objective(10.0 ** d)
    for _ in range(120):
        if abs(b - a) < 1e-12:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(10.0 ** c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(10.0 ** d)
    return min(fc, fd)


def holder_check(X: RandomVariable, Y: RandomVariable, phi: OrliczFunction,
                 psi: OrliczFunction | None = None):
    """``E[|XY|] <= ||X||_phi * ||Y||_psi(Orlicz)``; returns (lhs, rhs, holds)."""
    lhs = pairing(X.abs(), Y.abs())
    rhs = luxemburg_norm(X, phi) * orlicz_norm(Y, phi, psi)
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-9) + 1e-300
