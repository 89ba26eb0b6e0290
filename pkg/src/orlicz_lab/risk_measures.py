"""Coherent and convex risk measures on finite spaces.

Scenario sets are finite lists of nonnegative unit-expectation
densities; polytopes such as the average value at risk ball are
represented by vertex enumeration for small atom counts, so scenario
maxima are exact and no convex solver enters the core.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketInvalid, EmptyScenarioSet, InputError
from .finite_model import FiniteSpace, RandomVariable, expectation, pairing

__all__ = [
    "ScenarioSet",
    "RiskMeasure",
    "scenario_eval",
    "scenario_measure",
    "acceptance_eval",
    "acceptance_measure",
    "axiom_suite",
    "fatou_harness",
    "avar_scenarios",
    "worstcase_scenarios",
    "entropic_measure",
    "parse_measure_spec",
    "scenarios_to_json",
    "scenarios_from_json",
]

_MAX_VERTEX_ATOMS = 12


@dataclass(frozen=True)
class ScenarioSet:
    """Finite set Q of nonnegative densities with unit expectation."""

    densities: tuple  # tuple of RandomVariable

    def __post_init__(self):
        if not self.densities:
            raise EmptyScenarioSet("a scenario set needs at least one density")
        for Y in self.densities:
            if np.any(Y.x < -1e-12):
                raise InputError("scenario densities must be nonnegative")
            if abs(expectation(Y) - 1.0) > 1e-10:
                raise InputError(
                    f"scenario density has expectation {expectation(Y)!r}, not 1"
                )

    @property
    def space(self) -> FiniteSpace:
        return self.densities[0].space

    def __len__(self):
        return len(self.densities)


@dataclass(frozen=True)
class RiskMeasure:
    """Extended-real functional with a provenance tag.

    ``evaluator`` maps RandomVariable -> float (``math.inf`` allowed);
    the measure must be proper, which is checked at the zero position.
    """

    evaluator: object
    provenance: str  # "scenario" | "acceptance" | "catalog"
    name: str = "rho"
    gradient: object = None  # optional: RandomVariable -> atomwise gradient
    scenarios: ScenarioSet = None

    def __call__(self, X: RandomVariable) -> float:
        return float(self.evaluator(X))

    def check_proper(self, space: FiniteSpace) -> bool:
        return math.isfinite(self(space.constant(0.0)))


def scenario_eval(Q: ScenarioSet, X: RandomVariable) -> float:
    """``max_{Y in Q} E[-XY]`` over the finite density list."""
    if not Q.densities:
        raise EmptyScenarioSet("empty scenario set")
    best = -math.inf
    for Y in Q.densities:
        best = max(best, pairing(-X, Y))
    return best


def scenario_measure(Q: ScenarioSet, name: str = "scenario") -> RiskMeasure:
    return RiskMeasure(lambda X: scenario_eval(Q, X), "scenario", name, scenarios=Q)


def acceptance_eval(member, X: RandomVariable, bracket, tol: float = 1e-8,
                    max_doublings: int = 200) -> float:
    """``inf{m : X + m*1 in C}`` by bisection on a monotone membership
    predicate; ``bracket = (m_lo, m_hi)`` must satisfy
    ``member(X + m_hi) and not member(X + m_lo)``."""
    m_lo, m_hi = float(bracket[0]), float(bracket[1])
    if m_lo >= m_hi:
        raise BracketInvalid("need m_lo < m_hi")
    if not member(X + m_hi):
        raise BracketInvalid(f"X + {m_hi}*1 is not in C (upper bracket invalid)")
    if member(X + m_lo):
        raise BracketInvalid(f"X + {m_lo}*1 is in C (lower bracket invalid)")
    while m_hi - m_lo > tol * max(1.0, abs(m_hi)):
        mid = 0.5 * (m_lo + m_hi)
        if member(X + mid):
            m_hi = mid
        else:
            m_lo = mid
    return 0.5 * (m_lo + m_hi)


def acceptance_measure(member, bracket_seed: float = 1.0,
                       name: str = "acceptance") -> RiskMeasure:
    """Risk measure from an acceptance set, with automatic bracket
    widening by doubling."""

    def evaluate(X: RandomVariable) -> float:
        lo, hi = -bracket_seed, bracket_seed
        for _ in range(200):
            if member(X + hi):
                break
            hi *= 2.0
        else:
            raise BracketInvalid("no upper bracket: X + m*1 never enters C")
        for _ in range(200):
            if not member(X + lo):
                break
            lo *= 2.0
        else:
            raise BracketInvalid("no lower bracket: X + m*1 always in C")
        return acceptance_eval(member, X, (lo, hi))

    return RiskMeasure(evaluate, "acceptance", name)


def axiom_suite(rho, samples, tol: float = 1e-9, scalars=(0.5, 2.0),
                shifts=(-1.0, 0.5, 2.0)):
    """Check the four coherence axioms on all sample pairs and scalars.

    Returns a report dict with a pass flag and the witnessing inputs of
    every violation.
    """
    if len(samples) < 2:
        raise InputError("need at least two samples")
    violations = {"subadditive": [], "monotone": [], "cash_additive": [],
                  "positively_homogeneous": []}
    values = {i: rho(X) for i, X in enumerate(samples)}
    for (i, X1), (j, X2) in itertools.combinations(enumerate(samples), 2):
        r1, r2 = values[i], values[j]
        rsum = rho(X1 + X2)
        if rsum > r1 + r2 + tol * (1.0 + abs(r1) + abs(r2)):
            violations["subadditive"].append((i, j, rsum, r1 + r2))
        if np.all(X1.x >= X2.x) and r1 > r2 + tol * (1.0 + abs(r2)):
            violations["monotone"].append((i, j, r1, r2))
        if np.all(X2.x >= X1.x) and r2 > r1 + tol * (1.0 + abs(r1)):
            violations["monotone"].append((j, i, r2, r1))
    for i, X in enumerate(samples):
        r = values[i]
        if not math.isfinite(r):
            continue
        for m in shifts:
            shifted = rho(X + m)
            if abs(shifted - (r - m)) > tol * (1.0 + abs(r) + abs(m)):
                violations["cash_additive"].append((i, m, shifted, r - m))
        for lam in scalars:
            scaled = rho(X * lam)
            if abs(scaled - lam * r) > tol * (1.0 + abs(lam * r)):
                violations["positively_homogeneous"].append((i, lam, scaled, lam * r))
    report = {k: {"passed": not v, "violations": v} for k, v in violations.items()}
    report["passed"] = all(not v for v in violations.values())
    return report


def fatou_harness(rho, family, X: RandomVariable, mode: str = "order",
                  tol: float = 1e-8):
    """Check ``rho(X) <= liminf_n rho(X_n)`` along the supplied prefix.

    ``mode`` selects the convergence hypothesis that is verified first:
    ``order`` (a.s. plus order bounded; automatic order bound on finite
    spaces) or ``norm-bounded``.  The liminf surrogate is the infimum
    over the tail half of the prefix.  The harness can only refute the
    property, never prove it; the report says "no violation found".
    """
    from .finite_model import order_convergence_check

    if mode not in ("order", "norm-bounded"):
        raise InputError(f"unknown mode {mode!r}")
    errors = [float(np.max(np.abs(Xn.x - X.x))) for Xn in family]
    # a finite prefix cannot certify convergence; require the error to
    # shrink along the prefix (final at most half the initial, or exact)
    if len(errors) < 2 or not (errors[-1] <= 0.5 * errors[0] + tol):
        raise InputError("family does not approach the stated limit")
    order_convergence_check(family, X)  # validates shared space / dominator
    vals = [rho(Xn) for Xn in family]
    half = len(vals) // 2
    liminf = min(vals[half:])
    rho_x = rho(X)
    # each prefix element may still be `errors[i]` away from the limit in
    # sup norm; cash additivity + monotonicity make rho 1-Lipschitz there,
    # so that slack is added before declaring a violation
    holds = rho_x <= min(v + e for v, e in zip(vals[half:], errors[half:])) + tol
    return {
        "rho_limit": rho_x,
        "liminf": liminf,
        "margin": liminf - rho_x,
        "holds": holds,
        "verdict": "no violation found" if holds else "violated",
        "mode": mode,
        "values": vals,
    }


def avar_scenarios(space: FiniteSpace, alpha: float) -> ScenarioSet:
    """Vertices of ``{Y : 0 <= Y <= 1/alpha, E[Y] = 1}``.

    Vertex enumeration (all coordinates at a bound except at most one
    fractional), exact for small atom counts.
    """
    if not 0 < alpha <= 1:
        raise InputError("alpha must be in (0, 1]")
    n = space.n_atoms
    if n > _MAX_VERTEX_ATOMS:
        raise InputError(
            f"vertex enumeration limited to {_MAX_VERTEX_ATOMS} atoms, got {n}"
        )
    cap = 1.0 / alpha
    p = space.p
    seen = set()
    vertices = []

    def _push(vec):
        key = tuple(round(v, 12) for v in vec)
        if key not in seen:
            seen.add(key)
            vertices.append(space.rv(vec))

    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            mass = cap * sum(p[i] for i in S)
            if mass > 1.0 + 1e-12:
                continue
            if abs(mass - 1.0) <= 1e-12:
                vec = np.zeros(n)
                vec[list(S)] = cap
                _push(vec)
                continue
            for j in range(n):
                if j in S:
                    continue
                yj = (1.0 - mass) / p[j]
                if yj <= cap + 1e-12:
                    vec = np.zeros(n)
                    vec[list(S)] = cap
                    vec[j] = min(yj, cap)
                    _push(vec)
    return ScenarioSet(tuple(vertices))


def worstcase_scenarios(space: FiniteSpace) -> ScenarioSet:
    """Vertices of the full density simplex: one point mass per atom."""
    vertices = []
    for i, pi in enumerate(space.probabilities):
        vec = np.zeros(space.n_atoms)
        vec[i] = 1.0 / pi
        vertices.append(space.rv(vec))
    return ScenarioSet(tuple(vertices))


def entropic_measure(theta: float = 1.0) -> RiskMeasure:
    """``theta * log E[exp(-X / theta)]``; convex and cash additive but
    not positively homogeneous."""
    if theta <= 0:
        raise InputError("theta must be positive")

    def evaluate(X: RandomVariable) -> float:
        z = -X.x / theta
        zmax = float(np.max(z))
        return theta * (zmax + math.log(float(np.sum(X.space.p * np.exp(z - zmax)))))

    def grad(X: RandomVariable) -> np.ndarray:
        z = -X.x / theta
        w = X.space.p * np.exp(z - np.max(z))
        return -w / w.sum()

    return RiskMeasure(evaluate, "catalog", f"entropic(theta={theta:g})",
                       gradient=grad)


def parse_measure_spec(text: str, space: FiniteSpace) -> RiskMeasure:
    """``avar:alpha=<a>`` | ``worstcase`` | ``entropic:theta=<t>`` |
    ``scenario:<json file>``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    if head == "avar":
        params = dict(piece.split("=", 1) for piece in rest.split(",") if piece)
        try:
            alpha = float(params["alpha"])
        except (KeyError, ValueError):
            raise InputError(f"avar needs alpha=<real>, got {text!r}") from None
        return scenario_measure(avar_scenarios(space, alpha), name=text)
    if head == "worstcase":
        return scenario_measure(worstcase_scenarios(space), name="worstcase")
    if head == "entropic":
        params = dict(piece.split("=", 1) for piece in rest.split(",") if piece)
        try:
            theta = float(params.get("theta", "1.0"))
        except ValueError:
            raise InputError(f"bad theta in {text!r}") from None
        return entropic_measure(theta)
    if head == "scenario":
        with open(rest) as fh:
            Q = scenarios_from_json(fh.read(), space)
        return scenario_measure(Q, name=f"scenario:{rest}")
    raise InputError(f"unknown measure spec {text!r}")


def scenarios_to_json(Q: ScenarioSet) -> str:
    return json.dumps({"densities": [list(Y.values) for Y in Q.densities]},
                      sort_keys=True)


def scenarios_from_json(text: str, space: FiniteSpace) -> ScenarioSet:
    try:
        payload = json.loads(text)
        rows = payload["densities"]
        return ScenarioSet(tuple(space.rv(row) for row in rows))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed scenario JSON: {exc}") from None
