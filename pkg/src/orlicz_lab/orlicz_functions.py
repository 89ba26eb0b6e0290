"""Orlicz functions, conjugates and Delta_2-failure witnesses.

An Orlicz function here is a convex increasing function ``phi`` on
``[0, inf)`` with ``phi(0) = 0``, ``phi(t) > 0`` for ``t > 0`` and
superlinear growth.  The catalog spans the four Delta_2 combinations:

* ``power``   -- ``t**p``            (Delta_2 yes, conjugate yes)
* ``exp``     -- ``e**t - 1``        (Delta_2 no,  conjugate yes)
* ``entropy`` -- ``(1+t)log(1+t)-t`` (Delta_2 yes, conjugate no)
* ``sparse``  -- piecewise-linear pair failing Delta_2 on both sides
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvalidSchedule, NumericFailure, WitnessNotFound

__all__ = [
    "OrliczFunction",
    "PowerFunction",
    "ExpFunction",
    "ExpConjugateFunction",
    "EntropyFunction",
    "EntropyConjugateFunction",
    "PiecewiseLinearFunction",
    "PiecewiseSlopeSchedule",
    "sparse_schedule",
    "build_sparse_pair",
    "conjugate",
    "conjugate_value",
    "delta2_witnesses",
    "young_check",
    "parse_phi_spec",
    "CATALOG",
]

# Tolerances for the monotone root-finding used by numeric conjugation.
_ABS_TOL = 1e-12
_REL_TOL = 1e-10
_BRACKET_CAP = 1e300


class OrliczFunction:
    """Base class.  Subclasses provide ``_eval`` and ``_rderiv``.

    ``delta2`` / ``conjugate_delta2`` are analytic flags (``None`` when
    unknown); Delta_2 classification by scanning is only a semi-decision,
    see :func:`delta2_witnesses`.
    """

    kind = "catalog-analytic"
    name = "orlicz"
    delta2: bool | None = None
    conjugate_delta2: bool | None = None
    #: upper end of the domain; ``None`` means all of [0, inf)
    domain_cap: float | None = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.domain_cap is not None and np.any(t > self.domain_cap * (1 + 1e-12)):
            raise NumericFailure(
                f"{self.name}: evaluation beyond domain cap {self.domain_cap:g}"
            )
        with np.errstate(over="ignore"):
            out = self._eval(t)
        if out.ndim == 0:
            return float(out)
        return out

    def rderiv(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            out = self._rderiv(t)
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def analytic_conjugate(self) -> "OrliczFunction | None":
        return None

    def rderiv_inverse_left(self, s: float) -> float:
        """Left endpoint of ``{t : rderiv(t) = s}`` (0 when rderiv(0) >= s).

        Default implementation is monotone bisection with bracket doubling.
        """
        if s <= self.rderiv(0.0):
            return 0.0
        lo, hi = 0.0, 1.0
        n = 0
        while self.rderiv(hi) < s:
            lo, hi = hi, hi * 2.0
            n += 1
            if hi > _BRACKET_CAP or n > 1100:
                raise NumericFailure(
                    f"{self.name}: slope {s:g} beyond representable range"
                )
        while hi - lo > _ABS_TOL + _REL_TOL * hi:
            mid = 0.5 * (lo + hi)
            if self.rderiv(mid) < s:
                lo = mid
            else:
                hi = mid
        return hi

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"<{type(self).__name__} {self.name}>"


class PowerFunction(OrliczFunction):
    """``coef * t**p`` with ``p >= 1``; superlinear only for ``p > 1``."""

    delta2 = True
    conjugate_delta2 = True

    def __init__(self, p: float, coef: float = 1.0):
        if p < 1:
            raise InputError(f"power exponent must be >= 1, got {p}")
        if coef <= 0:
            raise InputError("power coefficient must be positive")
        self.p = float(p)
        self.coef = float(coef)
        self.name = f"power(p={p:g})" if coef == 1.0 else f"power(p={p:g},c={coef:g})"

    def _eval(self, t):
        return self.coef * t ** self.p

    def _rderiv(self, t):
        return self.coef * self.p * t ** (self.p - 1.0)

    @property
    def analytic_conjugate(self):
        p, c = self.p, self.coef
        if p == 1.0:
            return None  # conjugate jumps to +inf; handled numerically
        q = p / (p - 1.0)
        cq = (p - 1.0) * c * (c * p) ** (-q)
        return PowerFunction(q, cq)

    def rderiv_inverse_left(self, s):
        if s <= 0:
            return 0.0
        if self.p == 1.0:
            if s <= self.coef:
                return 0.0
            raise NumericFailure("linear function: slope range exhausted")
        return (s / (self.coef * self.p)) ** (1.0 / (self.p - 1.0))


class ExpFunction(OrliczFunction):
    """``e**t - 1``; fails Delta_2, conjugate satisfies it."""

    name = "exp"
    delta2 = False
    conjugate_delta2 = True

    def _eval(self, t):
        return np.expm1(t)

    def _rderiv(self, t):
        return np.exp(t)

    @property
    def analytic_conjugate(self):
        return ExpConjugateFunction()

    def rderiv_inverse_left(self, s):
        return math.log(s) if s > 1.0 else 0.0


class ExpConjugateFunction(OrliczFunction):
    """``s log s - s + 1`` for ``s >= 1``, zero below; conjugate of exp."""

    name = "exp*"
    delta2 = True
    conjugate_delta2 = False

    def _eval(self, s):
        s = np.maximum(s, 1.0)
        return s * np.log(s) - s + 1.0

    def _rderiv(self, s):
        return np.log(np.maximum(s, 1.0))

    @property
    def analytic_conjugate(self):
        return ExpFunction()

    def rderiv_inverse_left(self, s):
        return math.exp(s) if s > 0 else 0.0


class EntropyFunction(OrliczFunction):
    """``(1+t)log(1+t) - t``; satisfies Delta_2, conjugate fails it."""

    name = "entropy"
    delta2 = True
    conjugate_delta2 = False

    def _eval(self, t):
        return (1.0 + t) * np.log1p(t) - t

    def _rderiv(self, t):
        return np.log1p(t)

    @property
    def analytic_conjugate(self):
        return EntropyConjugateFunction()

    def rderiv_inverse_left(self, s):
        return math.expm1(s) if s > 0 else 0.0


class EntropyConjugateFunction(OrliczFunction):
    """``e**s - s - 1``; conjugate of the entropy function."""

    name = "entropy*"
    delta2 = False
    conjugate_delta2 = True

    def _eval(self, s):
        return np.expm1(s) - s

    def _rderiv(self, s):
        return np.expm1(s)

    @property
    def analytic_conjugate(self):
        return EntropyFunction()

    def rderiv_inverse_left(self, s):
        return math.log1p(s) if s > 0 else 0.0


class PiecewiseLinearFunction(OrliczFunction):
    """Convex piecewise-linear function.

    ``breakpoints`` are the strictly increasing positive kinks
    ``b_1 < ... < b_K`` and ``slopes`` the K+1 nondecreasing segment
    slopes (slope ``slopes[k]`` on ``[b_k, b_{k+1})`` with ``b_0 = 0``).
    ``domain_cap`` marks a function that is ``+inf`` beyond the cap
    (this occurs for conjugates of functions with a maximal slope).
    """

    kind = "piecewise-linear"

    def __init__(self, breakpoints, slopes, domain_cap=None, name="piecewise-linear",
                 delta2=None, conjugate_delta2=None):
        b = np.asarray(breakpoints, dtype=float)
        m = np.asarray(slopes, dtype=float)
        if b.ndim != 1 or m.ndim != 1 or len(m) != len(b) + 1:
            raise InvalidSchedule("need len(slopes) == len(breakpoints) + 1")
        if len(b) and (np.any(b <= 0) or np.any(np.diff(b) <= 0)):
            raise InvalidSchedule("breakpoints must be strictly increasing and positive")
        if np.any(m < 0) or np.any(np.diff(m) < 0):
            raise InvalidSchedule("slopes must be nonnegative and nondecreasing")
        self.breakpoints = b
        self.slopes = m
        self.domain_cap = None if domain_cap is None else float(domain_cap)
        self.name = name
        self.delta2 = delta2
        self.conjugate_delta2 = conjugate_delta2
        # knot values phi(b_k), accumulated left to right
        widths = np.diff(np.concatenate(([0.0], b)))
        self._knots = np.concatenate(([0.0], np.cumsum(m[:-1] * widths)))
        self._conjugate = None

    def _eval(self, t):
        edges = np.concatenate(([0.0], self.breakpoints))
        k = np.searchsorted(edges, t, side="right") - 1
        k = np.clip(k, 0, len(edges) - 1)
        return self._knots[k] + self.slopes[k] * (t - edges[k])

    def _rderiv(self, t):
        edges = np.concatenate(([0.0], self.breakpoints))
        k = np.searchsorted(edges, t, side="right") - 1
        k = np.clip(k, 0, len(edges) - 1)
        return self.slopes[k]

    @property
    def analytic_conjugate(self):
        if self._conjugate is None:
            self._conjugate = _pl_conjugate(self)
        return self._conjugate

    def rderiv_inverse_left(self, s):
        if s <= self.slopes[0]:
            return 0.0
        if self.domain_cap is None and s > self.slopes[-1]:
            raise NumericFailure(
                f"{self.name}: slope {s:g} beyond maximal slope {self.slopes[-1]:g}"
            )
        k = int(np.searchsorted(self.slopes, s, side="left"))
        if k == 0:
            return 0.0
        if k > len(self.breakpoints):
            return self.domain_cap
        return float(self.breakpoints[k - 1])


def _pl_conjugate(f: PiecewiseLinearFunction) -> PiecewiseLinearFunction:
    """Exact conjugate of a convex piecewise-linear function.

    Breakpoints and slopes swap roles: the conjugate has breakpoints at
    the slopes of ``f`` and slopes at the breakpoints of ``f``.  A
    function without a domain cap has a maximal slope, so its conjugate
    acquires a cap there; conversely a cap turns into a final slope.
    """
    b = list(f.breakpoints)
    m = list(f.slopes)
    g_bps = m[:-1]
    g_slopes = [0.0] + b
    if f.domain_cap is not None:
        g_bps = g_bps + [m[-1]]
        g_slopes = g_slopes + [f.domain_cap]
        g_cap = None
    else:
        g_cap = m[-1]
    # drop a degenerate zero-slope head (occurs when f had slope 0 at 0)
    while g_bps and g_bps[0] == 0.0:
        g_bps.pop(0)
        g_slopes.pop(0)
    out = PiecewiseLinearFunction(
        g_bps, g_slopes, domain_cap=g_cap, name=f.name + "*",
        delta2=f.conjugate_delta2, conjugate_delta2=f.delta2,
    )
    return out


@dataclass(frozen=True)
class PiecewiseSlopeSchedule:
    """Breakpoints and segment slopes for a sparse piecewise-linear pair.

    ``slopes[0]`` is the slope on ``[0, breakpoints[0])``.  Strictly
    increasing positive slopes force phi(t) > 0 for t > 0, and the slope
    bursts recorded in the schedule produce Delta_2-failure witnesses
    for phi (while the long multiplicative stretches between bursts
    produce witnesses for the conjugate).
    """

    breakpoints: tuple = field(default_factory=tuple)
    slopes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        b = self.breakpoints
        m = self.slopes
        if len(m) != len(b) + 1:
            raise InvalidSchedule("need len(slopes) == len(breakpoints) + 1")
        if not m or m[0] <= 0:
            raise InvalidSchedule("first slope must be positive")
        if any(x2 <= x1 for x1, x2 in zip(m, m[1:])):
            raise InvalidSchedule("slopes must be strictly increasing")
        if any(t <= 0 for t in b) or any(t2 <= t1 for t1, t2 in zip(b, b[1:])):
            raise InvalidSchedule("breakpoints must be strictly increasing and positive")


def sparse_schedule(bursts: int = 12, ratio: float = 2.0) -> PiecewiseSlopeSchedule:
    """Default sparse schedule: breakpoints ``ratio**(k*k)``, slope burst
    ``ratio**k`` at burst ``k``.

    The breakpoint ratios grow without bound (stretches) and the slope
    ratio at burst ``k`` is at least ``2**k`` for ``ratio >= 2``.
    """
    if bursts < 1:
        raise InvalidSchedule("need at least one burst")
    if ratio < 2.0:
        raise InvalidSchedule("burst ratio must be >= 2")
    breakpoints = [ratio ** (k * k) for k in range(1, bursts + 1)]
    slopes = [1.0]
    for k in range(1, bursts + 1):
        slopes.append(slopes[-1] * ratio ** k)
    if not math.isfinite(breakpoints[-1]) or not math.isfinite(
        breakpoints[-1] * slopes[-1]
    ):
        raise InvalidSchedule("schedule overflows double precision; reduce bursts")
    return PiecewiseSlopeSchedule(tuple(breakpoints), tuple(slopes))


def build_sparse_pair(schedule: PiecewiseSlopeSchedule) -> PiecewiseLinearFunction:
    """Piecewise-linear phi whose conjugate is exact piecewise-linear;
    both fail Delta_2 up to the schedule's range (bursts for phi,
    stretches for the conjugate)."""
    return PiecewiseLinearFunction(
        schedule.breakpoints, schedule.slopes, name="sparse",
        delta2=False, conjugate_delta2=False,
    )


class _NumericConjugate(OrliczFunction):
    """Conjugate of phi evaluated by monotone root-finding on rderiv."""

    kind = "numeric-conjugate"

    def __init__(self, phi: OrliczFunction):
        self.phi = phi
        self.name = phi.name + "*"
        self.delta2 = phi.conjugate_delta2
        self.conjugate_delta2 = phi.delta2

    def _eval(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.array([conjugate_value(self.phi, float(x)) for x in s])
        return out if out.size > 1 else out.reshape(())

    def _rderiv(self, s):
        # the maximizer t(s) is the right-derivative of the conjugate
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.array([self.phi.rderiv_inverse_left(float(x)) for x in s])
        return out if out.size > 1 else out.reshape(())


def conjugate(phi: OrliczFunction) -> OrliczFunction:
    """Conjugate of phi as a function object (closed form when known)."""
    conj = phi.analytic_conjugate
    return conj if conj is not None else _NumericConjugate(phi)


def conjugate_value(phi: OrliczFunction, s: float) -> float:
    """``sup_{t >= 0} (t*s - phi(t))``.

    Closed forms are used when available; otherwise the maximizer is
    located by monotone root-finding on ``rderiv(t) = s``.
    """
    if s < 0:
        raise InputError("conjugate argument must be nonnegative")
    if s == 0.0:
        return 0.0
    conj = phi.analytic_conjugate
    if conj is not None:
        return float(conj(s))
    t = phi.rderiv_inverse_left(s)  # raises NumericFailure on bracket failure
    return max(0.0, t * s - float(phi(t)))


def delta2_witnesses(phi: OrliczFunction, count: int, t_cap: float = 1e50):
    """Witnesses ``(n, t_n)`` with ``phi(2 t_n) > 2**n * phi(t_n)`` and
    ``phi(t_n) >= 3``, for ``n = 1..count``, found by geometric scanning.

    The lower bound ``phi(t_n) >= 3`` keeps downstream block
    probabilities ``1 / (2**n * phi(t_n))`` summable below 1/3.
    Raises :class:`WitnessNotFound` when some ``n`` has no witness below
    the cap -- a semi-decision, since Delta_2 quantifies over all large t.
    """
    if count < 1:
        raise InputError("count must be >= 1")
    if t_cap <= 0:
        raise InputError("t_cap must be positive")
    grid = _scan_grid(phi, t_cap)
    out = []
    for n in range(1, count + 1):
        bound = 2.0 ** n
        found = None
        for t in grid:
            try:
                a = float(phi(t))
                b = float(phi(2.0 * t))
            except NumericFailure:
                break
            if not math.isfinite(a):
                break
            if a >= 3.0 and b > bound * a:
                found = t
                break
        if found is None:
            raise WitnessNotFound(
                f"{phi.name}: no Delta_2-failure witness for n={n} below cap "
                f"{t_cap:g} (function plausibly satisfies Delta_2 up to the cap)"
            )
        out.append((n, found))
    return out


def _scan_grid(phi: OrliczFunction, t_cap: float):
    hi = t_cap
    if phi.domain_cap is not None:
        hi = min(hi, phi.domain_cap / 2.0)
    pts = []
    t = 1e-2
    factor = 2.0 ** 0.25
    while t <= hi:
        pts.append(t)
        t *= factor
    if isinstance(phi, PiecewiseLinearFunction):
        pts.extend(b for b in phi.breakpoints if b <= hi)
    return sorted(pts)


def young_check(phi: OrliczFunction, t: float, s: float):
    """Young's inequality ``t*s <= phi(t) + conj(s)``; returns
    ``(lhs, rhs, holds)`` with a small relative slack."""
    if t < 0 or s < 0:
        raise InputError("young_check requires nonnegative arguments")
    lhs = t * s
    rhs = float(phi(t)) + conjugate_value(phi, s)
    return lhs, rhs, lhs <= rhs + 1e-9 * (1.0 + rhs)


def parse_phi_spec(text: str) -> OrliczFunction:
    """Parse the function mini-language.

    ``power:p=<real>`` | ``exp`` | ``entropy`` |
    ``sparse:bursts=<int>,ratio=<real>`` (both sparse keys optional).
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    params = {}
    if rest:
        for piece in rest.split(","):
            k, eq, v = piece.partition("=")
            if not eq:
                raise InputError(f"malformed parameter {piece!r} in {text!r}")
            params[k.strip()] = v.strip()
    try:
        if head == "power":
            return PowerFunction(float(params.pop("p")))
        if head == "exp":
            _reject_extras(params, text)
            return ExpFunction()
        if head == "entropy":
            _reject_extras(params, text)
            return EntropyFunction()
        if head == "sparse":
            bursts = int(params.pop("bursts", 12))
            ratio = float(params.pop("ratio", 2.0))
            _reject_extras(params, text)
            return build_sparse_pair(sparse_schedule(bursts, ratio))
    except KeyError as exc:
        raise InputError(f"missing parameter {exc} in {text!r}") from None
    except ValueError as exc:
        raise InputError(f"bad numeric value in {text!r}: {exc}") from None
    raise InputError(f"unknown function spec {text!r}")


def _reject_extras(params, text):
    if params:
        raise InputError(f"unknown parameters {sorted(params)} in {text!r}")


def phi_spec_string(phi: OrliczFunction) -> str:
    """Round-trip representation for catalog functions."""
    if isinstance(phi, PowerFunction) and phi.coef == 1.0:
        return f"power:p={phi.p:g}"
    if isinstance(phi, ExpFunction):
        return "exp"
    if isinstance(phi, EntropyFunction):
        return "entropy"
    if isinstance(phi, PiecewiseLinearFunction) and phi.name == "sparse":
        # burst count recoverable from the number of breakpoints
        return f"sparse:bursts={len(phi.breakpoints)}"
    raise InputError(f"{phi.name} has no spec-string form")


#: The four catalog entries used throughout the tests.
CATALOG = {
    "power2": PowerFunction(2.0),
    "power3": PowerFunction(3.0),
    "exp": ExpFunction(),
    "entropy": EntropyFunction(),
    "sparse": build_sparse_pair(sparse_schedule()),
}
