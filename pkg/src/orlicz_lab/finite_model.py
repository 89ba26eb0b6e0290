"""Finite probability spaces, random variables and convergence predicates."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SpaceMismatch
from .orlicz_functions import OrliczFunction

__all__ = [
    "FiniteSpace",
    "RandomVariable",
    "uniform_space",
    "expectation",
    "pairing",
    "order_convergence_check",
    "read_positions_csv",
    "write_positions_csv",
]


@dataclass(frozen=True)
class FiniteSpace:
    """Finite probability model: positive atom probabilities summing to 1."""

    probabilities: tuple
    labels: tuple = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or len(p) == 0:
            raise InputError("need a nonempty probability vector")
        if np.any(p <= 0):
            raise InputError("atom probabilities must be positive")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InputError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probabilities", tuple(float(x) for x in p))
        labels = self.labels
        if labels is None:
            labels = tuple(str(i) for i in range(len(p)))
        elif len(labels) != len(p):
            raise InputError("label count must match atom count")
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def n_atoms(self) -> int:
        return len(self.probabilities)

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.probabilities)

    def rv(self, values) -> "RandomVariable":
        return RandomVariable(self, tuple(float(v) for v in np.asarray(values, dtype=float)))

    def constant(self, c: float) -> "RandomVariable":
        return self.rv(np.full(self.n_atoms, float(c)))

    def indicator(self, atoms) -> "RandomVariable":
        v = np.zeros(self.n_atoms)
        v[list(atoms)] = 1.0
        return self.rv(v)


def uniform_space(n: int) -> FiniteSpace:
    return FiniteSpace(tuple([1.0 / n] * n))


@dataclass(frozen=True)
class RandomVariable:
    """Atomwise-valued position on a finite space."""

    space: FiniteSpace
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.space.n_atoms:
            raise InputError("value list length must equal atom count")

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __add__(self, other):
        if isinstance(other, RandomVariable):
            _same_space(self, other)
            return self.space.rv(self.x + other.x)
        return self.space.rv(self.x + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RandomVariable):
            _same_space(self, other)
            return self.space.rv(self.x - other.x)
        return self.space.rv(self.x - float(other))

    def __mul__(self, c):
        return self.space.rv(self.x * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.space.rv(-self.x)

    def abs(self) -> "RandomVariable":
        return self.space.rv(np.abs(self.x))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.x)))


def _same_space(X: RandomVariable, Y: RandomVariable):
    if X.space is not Y.space and X.space != Y.space:
        raise SpaceMismatch("random variables live on different spaces")


def expectation(X: RandomVariable) -> float:
    """Sum p_i x_i in fixed atom order (bitwise reproducible)."""
    total = 0.0
    for p, x in zip(X.space.probabilities, X.values):
        total += p * x
    return total


def pairing(X: RandomVariable, Y: RandomVariable) -> float:
    """Bilinear pairing E[XY], summed in fixed atom order."""
    _same_space(X, Y)
    total = 0.0
    for p, x, y in zip(X.space.probabilities, X.values, Y.values):
        total += p * x * y
    return total


def order_convergence_check(sequence, X: RandomVariable, phi: OrliczFunction = None,
                            tol: float = 1e-9):
    """Report on a.s. convergence (atomwise, exact on finite spaces),
    order boundedness, and the dominating variable ``sup_n |X_n|``.

    The dominator's Luxemburg norm is included when ``phi`` is given.
    """
    if not sequence:
        raise InputError("empty sequence")
    for Xn in sequence:
        _same_space(Xn, X)
    tail = np.abs(sequence[-1].x - X.x)
    converges = bool(np.all(tail <= tol))
    dominator = X.space.rv(np.max([np.abs(Xn.x) for Xn in sequence], axis=0))
    report = {
        "converges_as": converges,
        "final_error": float(np.max(tail)),
        "order_bounded": True,  # pointwise sup always finite on finite spaces
        "dominator": dominator,
    }
    if phi is not None:
        from .norms import luxemburg_norm

        report["dominator_norm"] = luxemburg_norm(dominator, phi)
    return report


def read_positions_csv(path) -> RandomVariable:
    """Positions CSV with header ``atom,probability,value``.

    Probabilities are validated to sum to 1 within 1e-9, then
    renormalized exactly for the space constructor.
    """
    labels, probs, values = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != [
            "atom", "probability", "value",
        ]:
            raise InputError(f"{path}: expected header 'atom,probability,value'")
        for row in reader:
            labels.append(row["atom"])
            try:
                probs.append(float(row["probability"]))
                values.append(float(row["value"]))
            except (TypeError, ValueError):
                raise InputError(f"{path}: non-numeric row {row!r}") from None
    if not labels:
        raise InputError(f"{path}: no data rows")
    total = sum(probs)
    if abs(total - 1.0) > 1e-9:
        raise InputError(f"{path}: probabilities sum to {total!r}, not 1")
    probs = [p / total for p in probs]
    space = FiniteSpace(tuple(probs), tuple(labels))
    return space.rv(values)


def write_positions_csv(path, X: RandomVariable):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["atom", "probability", "value"])
        for label, p, v in zip(X.space.labels, X.space.probabilities, X.values):
            writer.writerow([label, repr(p), repr(v)])
