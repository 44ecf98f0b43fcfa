"""Polynomial threshold functions: sgn(p(x)) with sgn(0) = +1.

The zero convention matters only on a measure-zero set for every
distribution used here, but fixing it keeps evaluation deterministic.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .hermite import (
    HermiteExpansion,
    SparsePolynomial,
    from_hermite,
    poly_from_json,
)

__all__ = [
    "PTF",
    "RandomPolyConfig",
    "eval_ptf",
    "eval_ptf_batch",
    "random_ptf",
    "hermite_indices",
    "halfspace_expectation",
    "linear_threshold_params",
    "normal_cdf",
    "ptf_to_json",
    "ptf_from_json",
]


@dataclass(frozen=True)
class PTF:
    poly: SparsePolynomial


def eval_ptf(f: PTF, x) -> int:
    """+1 if f.poly(x) >= 0 else -1."""
    return 1 if f.poly.evaluate(x) >= 0.0 else -1


def eval_ptf_batch(f: PTF, X: np.ndarray) -> np.ndarray:
    vals = f.poly.evaluate_batch(X)
    return np.where(vals >= 0.0, 1, -1).astype(np.int64)


@dataclass(frozen=True)
class RandomPolyConfig:
    """Test-instance ensemble: i.i.d. standard normal coefficients over the
    orthonormal Hermite products of total degree <= degree, rescaled so the
    resulting polynomial has Gaussian L2 norm 1."""

    num_vars: int
    degree: int
    rng_seed: int
    ensemble: str = "gaussian-hermite-coefficients"

    def __post_init__(self) -> None:
        if self.num_vars < 1 or self.degree < 1:
            raise ValueError("need num_vars >= 1 and degree >= 1")
        if self.ensemble != "gaussian-hermite-coefficients":
            raise ValueError(f"unknown ensemble {self.ensemble!r}")


def hermite_indices(num_vars: int, max_degree: int) -> list[tuple[int, ...]]:
    """All multi-indices with |a|_1 <= max_degree, graded lexicographic."""
    out = []
    for total in range(max_degree + 1):
        for a in itertools.product(range(total + 1), repeat=num_vars):
            if sum(a) == total:
                out.append(a)
    return out


def random_ptf(config: RandomPolyConfig) -> PTF:
    idx = hermite_indices(config.num_vars, config.degree)
    rng = np.random.default_rng(config.rng_seed)
    g = rng.standard_normal(len(idx))
    g /= np.linalg.norm(g)  # Parseval: unit coefficient norm <=> |p|_2 = 1
    he = HermiteExpansion(config.num_vars, dict(zip(idx, g.tolist())))
    return PTF(from_hermite(he))


def normal_cdf(t: float) -> float:
    return 0.5 * (1.0 + math.erf(t / math.sqrt(2.0)))


def halfspace_expectation(w, theta: float) -> float:
    """E[sgn(w . X - theta)] = 1 - 2*Phi(theta/|w|_2) for standard Gaussian X."""
    w = np.asarray(w, dtype=np.float64)
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        raise ValueError("weight vector must be nonzero")
    return 1.0 - 2.0 * normal_cdf(theta / norm)


def linear_threshold_params(f: PTF) -> tuple[np.ndarray, float]:
    """Extract (w, theta) with f.poly = w . x - theta; degree must be <= 1."""
    p = f.poly
    if p.degree > 1:
        raise ValueError("analytic baseline exists only for degree-1 PTFs")
    w = np.zeros(p.num_vars)
    theta = 0.0
    for exps, coef in p.terms.items():
        s = sum(exps)
        if s == 0:
            theta = -coef
        else:
            w[exps.index(1)] = coef
    return w, theta


def ptf_to_json(f: PTF) -> str:
    rows = [{"exps": list(e), "coef": c} for e, c in sorted(f.poly.terms.items())]
    return json.dumps(
        {"kind": "ptf", "num_vars": f.poly.num_vars, "terms": rows}, sort_keys=True
    )


def ptf_from_json(text: str) -> PTF:
    obj = json.loads(text)
    if obj.get("kind") != "ptf":
        raise ValueError("not a PTF document")
    return PTF(poly_from_json(obj))
