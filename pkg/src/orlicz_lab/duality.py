"""Fenchel-Moreau conjugation, biconjugation, scenario extraction.

The conjugate ``rho*(Y) = sup_X (E[XY] - rho(X))`` is computed two ways:
exactly in *polyhedral* mode when rho is a finite scenario maximum (an
LP decides whether -Y lies in the convex hull of the scenario set, with
a growth direction as the unbounded-value certificate), and empirically
in *box* mode by supergradient ascent over ``[-M, M]^atoms`` with one
automatic box doubling to flag boundary-limited suprema.  Reports
always state which surrogate was used.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import InputError
from .finite_model import RandomVariable, pairing
from .risk_measures import RiskMeasure, ScenarioSet

__all__ = [
    "ConjugateValue",
    "conjugate_rho",
    "biconjugate",
    "extract_scenarios",
    "duality_report",
    "report_to_json",
]

_DEFAULT_BOX = 1.0e3


@dataclass(frozen=True)
class ConjugateValue:
    """Extended-real conjugate value with provenance.

    ``value`` is finite or ``math.inf``; ``flag`` is one of "" (exact),
    "possibly-infinite" (box-mode maximizer touched the doubled box),
    and ``certificate`` carries the polyhedral growth direction (atom
    values along which the objective increases without bound) when the
    value is +infinity.
    """

    value: float
    mode: str  # "polyhedral" | "box"
    flag: str = ""
    certificate: tuple = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value) and self.flag != "possibly-infinite"


def _hull_lp(Q: ScenarioSet, target: np.ndarray):
    """Feasibility of ``sum_k w_k Y_k = target, w >= 0, sum w = 1``.

    Returns (feasible, growth_direction).  When infeasible, a separating
    hyperplane ``X`` with ``E[X * target] > max_k E[X Y_k]`` is produced
    from the LP that maximizes that margin over a normalized X; along
    t*X the objective E[XY] - rho(X) grows without bound.
    """
    mats = np.array([Y.x for Y in Q.densities])  # k x n
    p = Q.space.p
    k, n = mats.shape
    A_eq = np.vstack([mats.T, np.ones((1, k))])
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k,
                  method="highs")
    if res.status == 0:
        return True, None
    # separating direction: max s s.t. <p*x, target> - <p*x, Y_k> >= s,
    # |x_i| <= 1.  LP variables (x, s).
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.zeros((k, n + 1))
    for j in range(k):
        A_ub[j, :n] = -(p * (target - mats[j]))
        A_ub[j, -1] = 1.0
    sep = linprog(c, A_ub=A_ub, b_ub=np.zeros(k),
                  bounds=[(-1, 1)] * n + [(None, None)], method="highs")
    # the LP separates `target`; the conjugate objective (which pairs
    # with -target) grows without bound along the negated direction
    direction = tuple(-float(v) for v in sep.x[:n]) if sep.status == 0 else None
    return False, direction


def conjugate_rho(rho: RiskMeasure, Y: RandomVariable, mode: str = "auto",
                  box_radius: float = _DEFAULT_BOX) -> ConjugateValue:
    """``rho*(Y) = sup_X (E[XY] - rho(X))``.

    ``mode``: "polyhedral" (requires a scenario-maximum rho; exact),
    "box" (supergradient ascent over the box), or "auto" (polyhedral
    when available).
    """
    if mode not in ("auto", "polyhedral", "box"):
        raise InputError(f"unknown mode {mode!r}")
    if mode == "auto":
        mode = "polyhedral" if rho.scenarios is not None else "box"
    if mode == "polyhedral":
        if rho.scenarios is None:
            raise InputError("polyhedral mode requires a finite scenario maximum")
        feasible, direction = _hull_lp(rho.scenarios, -Y.x)
        if feasible:
            return ConjugateValue(0.0, "polyhedral")
        return ConjugateValue(math.inf, "polyhedral", certificate=direction)
    if box_radius <= 0:
        raise InputError("box radius must be positive")
    v1, on_edge1 = _box_sup(rho, Y, box_radius)
    v2, on_edge2 = _box_sup(rho, Y, 2.0 * box_radius)
    if on_edge2 or v2 > v1 + 1e-6 * (1.0 + abs(v1)):
        return ConjugateValue(v2, "box", flag="possibly-infinite")
    return ConjugateValue(v2, "box")


def _box_sup(rho: RiskMeasure, Y: RandomVariable, M: float):
    """Maximize the concave map ``X -> E[XY] - rho(X)`` over [-M, M]^n
    (bounded concave maximization: L-BFGS-B on the negated objective,
    supergradients from ``rho.gradient`` when supplied)."""
    from scipy.optimize import minimize

    space = Y.space
    p = space.p
    n = space.n_atoms
    y = Y.x

    def neg_objective(x: np.ndarray) -> float:
        v = pairing(space.rv(x), Y) - rho(space.rv(x))
        return -v if math.isfinite(v) else math.inf

    jac = None
    if rho.gradient is not None:
        def jac(x: np.ndarray) -> np.ndarray:
            g_rho = np.asarray(rho.gradient(space.rv(x)), dtype=float)
            return -(p * y - g_rho)

    best_v, best_x = -math.inf, np.zeros(n)
    for start in (np.zeros(n), np.full(n, 0.5 * M), np.full(n, -0.5 * M)):
        res = minimize(neg_objective, start, jac=jac, method="L-BFGS-B",
                       bounds=[(-M, M)] * n,
                       options={"ftol": 1e-14, "gtol": 1e-10, "maxiter": 500})
        if -res.fun > best_v:
            best_v, best_x = -float(res.fun), np.asarray(res.x)
    on_edge = bool(np.any(np.abs(best_x) > M * (1.0 - 1e-9)))
    return best_v, on_edge


def biconjugate(rho: RiskMeasure, X: RandomVariable, probes,
                mode: str = "auto") -> float:
    """``max over probes Y of E[XY] - rho*(Y)``, skipping infinite probes."""
    if not probes:
        raise InputError("probe list must be nonempty")
    best = -math.inf
    any_finite = False
    for Y in probes:
        cv = conjugate_rho(rho, Y, mode=mode)
        if not cv.finite:
            continue
        any_finite = True
        best = max(best, pairing(X, Y) - cv.value)
    if not any_finite:
        raise InputError("all probes have infinite conjugate value")
    return best


def extract_scenarios(rho: RiskMeasure, candidates, mode: str = "auto",
                      tol: float = 1e-9):
    """Filter candidate densities to ``{Y : rho*(-Y) = 0}``.

    Survivors are checked to be nonnegative with unit expectation (the
    two facts the zero conjugate value forces); returns
    ``(ScenarioSet-or-None, report dict)`` — extraction may legitimately
    come back empty.
    """
    from .finite_model import expectation

    survivors, rejected = [], []
    for Y in candidates:
        cv = conjugate_rho(rho, -Y, mode=mode)
        if cv.finite and abs(cv.value) <= 1e-8:
            if np.any(Y.x < -tol):
                raise InputError(
                    "zero conjugate value with a negative coordinate: "
                    "rho is not monotone on this space"
                )
            if abs(expectation(Y) - 1.0) > tol:
                raise InputError(
                    "zero conjugate value without unit expectation: "
                    "rho is not cash additive on this space"
                )
            survivors.append(Y)
        else:
            rejected.append(Y)
    report = {"n_candidates": len(list(candidates)) if not hasattr(candidates, "__len__")
              else len(candidates),
              "n_survivors": len(survivors), "n_rejected": len(rejected)}
    if not survivors:
        return None, report
    return ScenarioSet(tuple(survivors)), report


def duality_report(rho: RiskMeasure, positions, probes, candidates=None,
                   mode: str = "auto", tol: float = 1e-8):
    """Per-position conjugation audit: rho, rho** over the probes, gap
    flags, and the extracted scenario list."""
    rows = []
    gap = False
    for X in positions:
        rho_x = rho(X)
        rho_xx = biconjugate(rho, X, probes, mode=mode)
        g = abs(rho_xx - rho_x) > tol * (1.0 + abs(rho_x))
        if rho_xx > rho_x + 1e-10 * (1.0 + abs(rho_x)):
            raise InputError(
                "weak duality violated: biconjugate exceeds rho "
                f"({rho_xx!r} > {rho_x!r})"
            )
        gap = gap or g
        rows.append({"rho": rho_x, "biconjugate": rho_xx, "gap": bool(g)})
    star = []
    for Y in probes:
        cv = conjugate_rho(rho, Y, mode=mode)
        star.append({"value": cv.value if math.isfinite(cv.value) else "inf",
                     "mode": cv.mode, "flag": cv.flag})
    extracted = []
    if candidates is not None:
        Q, _ = extract_scenarios(rho, candidates, mode=mode)
        if Q is not None:
            extracted = [list(Y.values) for Y in Q.densities]
    return {
        "probes": [list(Y.values) for Y in probes],
        "rho_star": star,
        "biconjugate": rows,
        "gap": bool(gap),
        "extracted_scenarios": extracted,
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True)
