"""Dense double-precision matrix helpers with optional flop instrumentation.

Matrices are plain 2-D float64 numpy arrays (row-major).  Only products of
the kind "l1 x l2 times l2 x l3" are metered, at 2*l1*l2*l3 multiply-adds;
element-wise work and rank-one updates are deliberately left uncounted so
the recorded numbers match the dominant-cost model used in reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ShapeError, SingularMatrixError


@dataclass
class FlopCounter:
    """Accumulates multiply-add counts for metered matrix products."""

    multiply_adds: int = 0
    enabled: bool = True

    def add(self, n: int) -> None:
        if self.enabled:
            self.multiply_adds += int(n)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ShapeError(f"{name} contains non-finite entries")
    return m


def check_finite(m: np.ndarray, context: str) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise ArithmeticError(f"non-finite result in {context}")
    return m


def gemm(a: np.ndarray, b: np.ndarray, counter: FlopCounter | None = None) -> np.ndarray:
    """Matrix product a @ b, metered at 2*rows(a)*cols(a)*cols(b)."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"gemm needs 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"gemm shape mismatch: {a.shape} x {b.shape}")
    if counter is not None:
        counter.add(2 * a.shape[0] * a.shape[1] * b.shape[1])
    return a @ b


def solve_spd(r: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Solve R @ X = M for symmetric positive definite R via Cholesky.

    Never forms the explicit inverse; raises SingularMatrixError naming the
    failing pivot when R is not SPD.
    """
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ShapeError(f"solve_spd needs a square matrix, got {r.shape}")
    if m.shape[0] != r.shape[0]:
        raise ShapeError(f"solve_spd shape mismatch: {r.shape} x {m.shape}")
    scale = np.abs(r).max()
    if scale > 0 and np.abs(r - r.T).max() > 1e-12 * scale:
        raise ShapeError("solve_spd requires a symmetric matrix")
    try:
        c, lower = scipy.linalg.cho_factor(r, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        # scipy reports "N-th leading minor ... is not positive definite"
        pivot = None
        for tok in str(exc).split():
            digits = tok.rstrip("-thstnd")
            if digits.isdigit():
                pivot = int(digits) - 1
                break
        raise SingularMatrixError(
            f"matrix is not positive definite (pivot {pivot})", pivot_index=pivot
        ) from exc
    return scipy.linalg.cho_solve((c, lower), m, check_finite=False)


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ShapeError(f"frobenius_distance shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def rank_one_update(a: np.ndarray, x: np.ndarray, y: np.ndarray, alpha: float = 1.0) -> np.ndarray:
    """Return a + alpha * outer(x, y).  Not metered (element-wise cost)."""
    x = np.asarray(x).reshape(-1)
    y = np.asarray(y).reshape(-1)
    if a.shape != (x.size, y.size):
        raise ShapeError(f"rank_one_update shape mismatch: {a.shape} vs ({x.size},{y.size})")
    return a + alpha * np.outer(x, y)
