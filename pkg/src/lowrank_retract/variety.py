"""The set of m x n matrices of rank at most r: membership, metric
projection, distance, tangent-cone charts, cone projection, and a sampled
distance-growth rate along a direction.

All projections are selections: when nearest points tie (equal singular
values) the deterministic SVD picks one representative, always the same one
for the same input bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, frobenius_norm, orthonormal_complement, svd

__all__ = [
    "RANK_TOL",
    "RankExceededError",
    "VarietyBudget",
    "VarietyPoint",
    "TangentConeChart",
    "TangentVector",
    "numerical_rank",
    "make_point",
    "project_to_variety",
    "distance_to_variety",
    "tangent_cone_chart",
    "tangent_embed",
    "tangent_norm",
    "project_to_tangent_cone",
    "derivability_rate",
    "random_point",
    "random_cone_vector",
]

# Singular values below RANK_TOL * sigma_max are treated as exactly zero
# when deciding ranks.  Functions that threshold accept an override.
RANK_TOL = 1e-12


class RankExceededError(ValueError):
    """Matrix rank exceeds the budget r, so it is not a member of the set."""


@dataclass(frozen=True)
class VarietyBudget:
    """Ambient dimensions m x n and the rank bound r, with r < min(m, n)."""

    m: int
    n: int
    r: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.r < 1:
            raise ValueError(f"dimensions and rank bound must be positive, got {self}")
        if self.r >= min(self.m, self.n):
            raise ValueError(f"rank bound r={self.r} must satisfy r < min(m, n)={min(self.m, self.n)}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)


@dataclass(frozen=True)
class VarietyPoint:
    """A member of the bounded-rank set, carrying its exact rank and thin factors.

    X equals U @ diag(sigma) @ V.T up to the thresholded tail; sigma holds
    the rank-many positive singular values in descending order.
    """

    budget: VarietyBudget
    X: np.ndarray
    rank: int
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        m, n = self.budget.shape
        if self.X.shape != (m, n):
            raise ValueError(f"point shape {self.X.shape} does not match budget {m} x {n}")
        if not 0 <= self.rank <= self.budget.r:
            raise ValueError(f"rank {self.rank} outside [0, {self.budget.r}]")
        if self.U.shape != (m, self.rank) or self.V.shape != (n, self.rank):
            raise ValueError("thin factor shapes inconsistent with rank")
        if self.sigma.shape != (self.rank,):
            raise ValueError("sigma length inconsistent with rank")


@dataclass(frozen=True)
class TangentConeChart:
    """Orthonormal bases adapted to a point: U spans the column space of X,
    V the row space, U_perp and V_perp their orthogonal complements.

    corner_budget is r - rank(X), the rank allowance of the corner block in
    this chart's coordinates.
    """

    base: VarietyPoint
    U: np.ndarray
    U_perp: np.ndarray
    V: np.ndarray
    V_perp: np.ndarray
    corner_budget: int

    def __post_init__(self):
        m, n = self.base.budget.shape
        rb = self.base.rank
        if self.U.shape != (m, rb) or self.U_perp.shape != (m, m - rb):
            raise ValueError("left basis shapes inconsistent with base point")
        if self.V.shape != (n, rb) or self.V_perp.shape != (n, n - rb):
            raise ValueError("right basis shapes inconsistent with base point")
        if self.corner_budget != self.base.budget.r - rb:
            raise ValueError("corner budget must equal r - rank(X)")


@dataclass(frozen=True)
class TangentVector:
    """Tangent-cone element in chart coordinates.

    Ambient form is [U U_perp] @ [[core, upper], [lower, corner]] @ [V V_perp].T
    where core is rank(X) x rank(X) and the corner block has rank at most
    the chart's corner_budget.
    """

    chart: TangentConeChart
    core: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    corner: np.ndarray

    def __post_init__(self):
        m, n = self.chart.base.budget.shape
        rb = self.chart.base.rank
        if self.core.shape != (rb, rb):
            raise ValueError(f"core block must be {rb} x {rb}, got {self.core.shape}")
        if self.upper.shape != (rb, n - rb):
            raise ValueError(f"upper block must be {rb} x {n - rb}, got {self.upper.shape}")
        if self.lower.shape != (m - rb, rb):
            raise ValueError(f"lower block must be {m - rb} x {rb}, got {self.lower.shape}")
        if self.corner.shape != (m - rb, n - rb):
            raise ValueError(f"corner block must be {m - rb} x {n - rb}, got {self.corner.shape}")


def numerical_rank(sigma: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    """Number of singular values above rank_tol * sigma_max (descending input)."""
    if sigma.size == 0 or sigma[0] <= 0.0:
        return 0
    return int(np.count_nonzero(sigma > rank_tol * sigma[0]))


def make_point(a, budget: VarietyBudget, rank_tol: float = RANK_TOL) -> VarietyPoint:
    """Wrap a matrix as a member of the set; raises RankExceededError otherwise."""
    A = as_matrix(a)
    if A.shape != budget.shape:
        raise ValueError(f"matrix shape {A.shape} does not match budget {budget.shape}")
    f = svd(A)
    k = numerical_rank(f.singular_values, rank_tol)
    if k > budget.r:
        raise RankExceededError(f"rank {k} exceeds budget r={budget.r}")
    return VarietyPoint(
        budget=budget,
        X=A,
        rank=k,
        U=f.U[:, :k].copy(),
        sigma=f.singular_values[:k].copy(),
        V=f.V[:, :k].copy(),
    )


def project_to_variety(a, budget: VarietyBudget, rank_tol: float = RANK_TOL) -> VarietyPoint:
    """Nearest member of the set in Frobenius norm: rank-r truncated SVD.

    The metric projection can be set-valued on tied singular values; this
    returns the selection induced by the deterministic SVD ordering.
    """
    A = as_matrix(a)
    if A.shape != budget.shape:
        raise ValueError(f"matrix shape {A.shape} does not match budget {budget.shape}")
    f = svd(A)
    head = f.singular_values[: budget.r]
    k = numerical_rank(head, rank_tol)
    U = f.U[:, :k].copy()
    s = f.singular_values[:k].copy()
    V = f.V[:, :k].copy()
    X = (U * s) @ V.T
    return VarietyPoint(budget=budget, X=X, rank=k, U=U, sigma=s, V=V)


def distance_to_variety(a, budget: VarietyBudget) -> float:
    """Frobenius distance to the set: root sum of squared tail singular values."""
    A = as_matrix(a)
    if A.shape != budget.shape:
        raise ValueError(f"matrix shape {A.shape} does not match budget {budget.shape}")
    tail = svd(A).singular_values[budget.r :]
    return math.sqrt(float(np.sum(tail * tail)))


def tangent_cone_chart(x: VarietyPoint) -> TangentConeChart:
    """Chart at x: thin factors of x plus deterministic orthonormal complements."""
    return TangentConeChart(
        base=x,
        U=x.U,
        U_perp=orthonormal_complement(x.U),
        V=x.V,
        V_perp=orthonormal_complement(x.V),
        corner_budget=x.budget.r - x.rank,
    )


def tangent_embed(v: TangentVector) -> np.ndarray:
    """Ambient matrix of a tangent-cone element."""
    c = v.chart
    return (
        c.U @ v.core @ c.V.T
        + c.U @ v.upper @ c.V_perp.T
        + c.U_perp @ v.lower @ c.V.T
        + c.U_perp @ v.corner @ c.V_perp.T
    )


def tangent_norm(v: TangentVector) -> float:
    """Frobenius norm of the ambient form (blocks live in orthogonal frames)."""
    total = 0.0
    for block in (v.core, v.upper, v.lower, v.corner):
        total += float(np.sum(block * block))
    return math.sqrt(total)


def project_to_tangent_cone(chart: TangentConeChart, g) -> TangentVector:
    """Nearest tangent-cone element to an ambient matrix g.

    The three linear blocks are plain restrictions; the corner block is the
    rank-limited truncation of the corner restriction.  The four blocks are
    mutually orthogonal in the Frobenius inner product, so the minimization
    decouples and the result is a true cone projection (one deterministic
    selection of it).
    """
    G = as_matrix(g)
    m, n = chart.base.budget.shape
    if G.shape != (m, n):
        raise ValueError(f"matrix shape {G.shape} does not match budget {(m, n)}")
    U, Up, V, Vp = chart.U, chart.U_perp, chart.V, chart.V_perp
    core = U.T @ G @ V
    upper = U.T @ G @ Vp
    lower = Up.T @ G @ V
    corner_full = Up.T @ G @ Vp
    s = chart.corner_budget
    if s == 0:
        corner = np.zeros_like(corner_full)
    else:
        f = svd(corner_full)
        k = min(s, f.singular_values.size)
        corner = (f.U[:, :k] * f.singular_values[:k]) @ f.V[:, :k].T
    return TangentVector(chart=chart, core=core, upper=upper, lower=lower, corner=corner)


def derivability_rate(x: VarietyPoint, v, t_grid) -> np.ndarray:
    """Sampled distance growth rate d(X + t v, C) / t along direction v.

    Tangent directions drive the rate to zero as t decreases; the caller
    owns any threshold judgment.
    """
    V = as_matrix(v)
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or not (ts > 0.0).all():
        raise ValueError("t_grid must be a non-empty sequence of positive reals")
    return np.array(
        [distance_to_variety(x.X + t * V, x.budget) / t for t in ts]
    )


def random_point(budget: VarietyBudget, rng: np.random.Generator, rank: int | None = None) -> VarietyPoint:
    """Random member with the requested rank (defaults to the full budget r)."""
    k = budget.r if rank is None else rank
    if not 0 <= k <= budget.r:
        raise ValueError(f"requested rank {k} outside [0, {budget.r}]")
    if k == 0:
        return make_point(np.zeros(budget.shape), budget)
    A = rng.standard_normal((budget.m, k)) @ rng.standard_normal((k, budget.n))
    return make_point(A, budget)


def random_cone_vector(chart: TangentConeChart, rng: np.random.Generator) -> TangentVector:
    """Random tangent-cone element drawn blockwise in the chart."""
    m, n = chart.base.budget.shape
    rb = chart.base.rank
    s = chart.corner_budget
    core = rng.standard_normal((rb, rb))
    upper = rng.standard_normal((rb, n - rb))
    lower = rng.standard_normal((m - rb, rb))
    if s:
        corner = rng.standard_normal((m - rb, s)) @ rng.standard_normal((s, n - rb))
    else:
        corner = np.zeros((m - rb, n - rb))
    return TangentVector(chart=chart, core=core, upper=upper, lower=lower, corner=corner)
