"""Dense linear-algebra kernels shared by the rest of the package.

Everything here is deterministic: identical input bits produce identical
output bits, so downstream selections of set-valued projections are
reproducible run to run.  Elementary arithmetic (products, sums, norms) is
plain numpy; the SVD and the orthonormal completion are implemented here so
that their ordering and sign conventions stay fixed instead of depending on
whatever LAPACK build happens to be installed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OrthonormalityError",
    "SvdFactorization",
    "as_matrix",
    "frobenius_norm",
    "svd",
    "orthonormal_complement",
    "read_matrix",
    "write_matrix",
    "format_float",
]

# Jacobi sweep thresholds.  A column pair is left alone only when its Gram
# entry is below the absolute threshold (relative to ||A||_F^2, which the
# rotations preserve) AND below a pairwise relative threshold; the second
# condition keeps the normalized columns orthogonal even when the singular
# values span many orders of magnitude.
_SWEEP_ABS_TOL = 1e-14
_PAIR_REL_TOL = 1e-15
_MAX_SWEEPS = 100

# Columns whose norm is below this fraction of the largest singular value
# carry no reliable direction information; their left singular vectors are
# replaced by an orthonormal completion of the remaining columns.
_DIRECTION_TOL = 1e-12


class OrthonormalityError(ValueError):
    """A factor expected to have orthonormal columns does not."""


@dataclass(frozen=True)
class SvdFactorization:
    """SVD `A = U @ diag(singular_values) @ V.T` with k = min(m, n) columns.

    U and V have orthonormal columns, singular values are sorted descending,
    and the entry of largest absolute value in each column of U is positive
    (first such entry on ties).
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting NaN/Inf entries."""
    A = np.asarray(a, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D array, got ndim={A.ndim}")
    if A.size and not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    return A


def frobenius_norm(a) -> float:
    """Frobenius norm of a matrix."""
    return float(np.linalg.norm(np.asarray(a, dtype=float)))


def _one_sided_jacobi(A: np.ndarray):
    """Cyclic one-sided Jacobi on the columns of A; requires m >= n.

    Returns (U, sigma, V) with sigma descending and A = U @ diag(sigma) @ V.T.
    """
    m, n = A.shape
    W = A.copy()
    V = np.eye(n)
    abs_tol = _SWEEP_ABS_TOL * float(np.sum(W * W))

    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp = W[:, p]
                wq = W[:, q]
                gamma = float(wp @ wq)
                if gamma == 0.0:
                    continue
                alpha = float(wp @ wp)
                beta = float(wq @ wq)
                if abs(gamma) <= abs_tol and abs(gamma) <= _PAIR_REL_TOL * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                new_p = c * wp - s * wq
                new_q = s * wp + c * wq
                W[:, p] = new_p
                W[:, q] = new_q
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        if not rotated:
            break

    sigma = np.linalg.norm(W, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    W = W[:, order]
    V = V[:, order]

    smax = sigma[0] if sigma.size else 0.0
    cut = int(np.count_nonzero(sigma > _DIRECTION_TOL * smax)) if smax > 0.0 else 0
    U = np.zeros((m, n))
    if cut:
        U[:, :cut] = W[:, :cut] / sigma[:cut]
    if cut < n:
        U[:, cut:] = orthonormal_complement(U[:, :cut])[:, : n - cut]
    return U, sigma, V


def svd(a) -> SvdFactorization:
    """Deterministic full SVD with k = min(m, n) singular triplets.

    Uses cyclic one-sided Jacobi sweeps (high relative accuracy at desk
    scale).  Ordering is descending with stable tie order, and each left
    singular vector is signed so that its entry of largest absolute value is
    positive (first such entry on ties).
    """
    A = as_matrix(a)
    m, n = A.shape
    if m == 0 or n == 0:
        raise ValueError("matrix dimensions must be positive")
    if m >= n:
        U, sigma, V = _one_sided_jacobi(A)
    else:
        V, sigma, U = _one_sided_jacobi(A.T.copy())

    for j in range(sigma.size):
        col = U[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0.0:
            U[:, j] = -col
            V[:, j] = -V[:, j]
    return SvdFactorization(U=U, singular_values=sigma, V=V)


def orthonormal_complement(u) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span of u.

    u must be m x p with orthonormal columns (p <= m); the result is
    m x (m - p).  Built from the Householder QR factorization of u with a
    fixed sign rule, so the output is deterministic.
    """
    U = as_matrix(u)
    m, p = U.shape
    if p > m:
        raise ValueError(f"cannot complement {p} columns in dimension {m}")
    if p:
        defect = frobenius_norm(U.T @ U - np.eye(p))
        if defect > 1e-10:
            raise OrthonormalityError(
                f"input columns are not orthonormal (defect {defect:.3e})"
            )

    reflectors = []
    R = U.copy()
    for j in range(p):
        x = R[j:, j].copy()
        norm_x = float(np.linalg.norm(x))
        v = x
        v[0] += norm_x if x[0] >= 0.0 else -norm_x
        norm_v = float(np.linalg.norm(v))
        if norm_v > 0.0:
            v /= norm_v
        reflectors.append(v)
        R[j:, j:] -= 2.0 * np.outer(v, v @ R[j:, j:])

    # Q columns p..m-1 of the full QR factor, Q = H_1 ... H_p applied to I.
    Q = np.zeros((m, m - p))
    Q[p:, :] = np.eye(m - p)
    for j in reversed(range(p)):
        v = reflectors[j]
        Q[j:, :] -= 2.0 * np.outer(v, v @ Q[j:, :])
    return Q


def format_float(x: float) -> str:
    """Render a float with 17 significant digits (round-trips float64)."""
    return f"{x:.17g}"


def write_matrix(a, path) -> None:
    """Write a matrix in the shared text format.

    First line is `m n`, then m lines of n space-separated decimal numbers
    with 17 significant digits, LF line endings.
    """
    A = as_matrix(a)
    m, n = A.shape
    lines = [f"{m} {n}"]
    for i in range(m):
        lines.append(" ".join(format_float(x) for x in A[i]))
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a matrix in the shared text format; raises ValueError when malformed."""
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read()
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: header must be 'm n', got {lines[0]!r}")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError(f"{path}: non-integer header {lines[0]!r}") from exc
    if m <= 0 or n <= 0:
        raise ValueError(f"{path}: dimensions must be positive, got {m} x {n}")
    if len(lines) != m + 1:
        raise ValueError(f"{path}: expected {m} data rows, found {len(lines) - 1}")
    rows = []
    for i, line in enumerate(lines[1:], start=1):
        parts = line.split()
        if len(parts) != n:
            raise ValueError(f"{path}: row {i} has {len(parts)} entries, expected {n}")
        try:
            rows.append([float(tok) for tok in parts])
        except ValueError as exc:
            raise ValueError(f"{path}: row {i} contains a non-numeric token") from exc
    A = np.array(rows, dtype=float)
    if not np.isfinite(A).all():
        raise ValueError(f"{path}: matrix entries must be finite")
    return A
