"""Delay-embedded data matrices, DMD, and companion models of local dynamics.

The local model of a single observed vertex is the s x s companion matrix
whose bottom row carries the weights of the recurrence
u(k+s) = w_{s-1} u(k+s-1) + ... + w_0 u(k); everything above that row is the
fixed shift structure, so only the weights are ever estimated.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_RANK_TOL, lstsq_min_norm, numeric_rank, truncated_pinv
from .dynsys import LinearSystem, Trajectory
from .localizability import permute_vertex_first

# Default relative SVD truncation for all pseudoinverse-backed regressions.
DEFAULT_SVD_TOL = 1e-10


class NotLocalizableError(ValueError):
    """Hidden-state recovery was attempted at a vertex with rank-deficient R."""

    def __init__(self, message: str, singular_values: np.ndarray):
        super().__init__(message)
        self.singular_values = singular_values


@dataclass(frozen=True)
class DelayMatrices:
    """Augmented (Hankel-structured) data pair built from one trajectory.

    Column j of ``x`` stacks the observations at times j..j+s-1; ``y`` is the
    same stack shifted one step. Rows p.. of ``x`` therefore repeat rows
    ..(s-1)p of ``y``.
    """

    x: np.ndarray
    y: np.ndarray
    s: int
    p: int


@dataclass(frozen=True)
class CompanionModel:
    """Weights of the bottom row of a structured s x s companion matrix.

    ``residual`` is the 2-norm of the training residual in the original data
    units; ``scale`` records the max-abs normalization applied before the
    regression (the weights themselves are scale-invariant).
    """

    s: int
    weights: np.ndarray
    residual: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        if weights.shape != (self.s,):
            raise ValueError(f"expected {self.s} weights, got shape {weights.shape}")
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def companion_matrix(self) -> np.ndarray:
        """The full s x s matrix: identity superdiagonal plus the weight row."""
        c = np.zeros((self.s, self.s))
        c[:-1, 1:] = np.eye(self.s - 1)
        c[-1] = self.weights
        return c

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "w": [float(w) for w in self.weights],
            "residual": float(self.residual),
            "scale": float(self.scale),
        }


def _observations(data) -> np.ndarray:
    """Normalize trajectory input to a (steps, p) observation array."""
    if isinstance(data, Trajectory):
        return data.states
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        return arr[:, None]
    if arr.ndim == 2:
        return arr
    raise ValueError("trajectory data must be 1- or 2-dimensional")


def hankel_matrices(data, s: int) -> DelayMatrices:
    """Delay-embedded data pair with s stacked observations per column.

    Accepts a scalar series, a (steps, p) array, or a :class:`Trajectory`;
    a series of m+1 observations yields m - s + 1 columns.
    """
    obs = _observations(data)
    if s < 1:
        raise ValueError("delay count s must be at least 1")
    m = obs.shape[0] - 1
    if m + 1 < s + 1:
        raise ValueError(f"need at least s+1 = {s + 1} observations, got {m + 1}")
    p = obs.shape[1]
    cols = m - s + 1
    x = np.empty((s * p, cols))
    y = np.empty((s * p, cols))
    for block in range(s):
        x[block * p : (block + 1) * p] = obs[block : block + cols].T
        y[block * p : (block + 1) * p] = obs[block + 1 : block + 1 + cols].T
    return DelayMatrices(x=x, y=y, s=s, p=p)


def dmd(x: np.ndarray, y: np.ndarray, svd_tol: float = DEFAULT_SVD_TOL) -> np.ndarray:
    """Least-squares linear propagator C = Y X^+ between shifted data matrices.

    The pseudoinverse truncates singular values <= svd_tol * sigma_max, so C
    is the minimum-norm minimizer of the Frobenius residual ||C X - Y||_F.
    Rank deficiency of X (including an all-zero X, which yields C = 0) is
    reported through a RankWarning.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"X and Y must have equal shapes, got {x.shape} vs {y.shape}")
    pinv, rank = truncated_pinv(x, svd_tol)
    if rank < min(x.shape):
        warnings.warn(
            f"data matrix has numeric rank {rank} < {min(x.shape)}; "
            "returning the minimum-norm fit",
            np.exceptions.RankWarning,
            stacklevel=2,
        )
    return y @ pinv


def fit_companion(
    u: np.ndarray, s: int, svd_tol: float = DEFAULT_SVD_TOL
) -> CompanionModel:
    """Estimate the s recurrence weights of one vertex from its scalar series.

    Only the bottom row of the structured companion matrix is unknown, so
    the regression has s unknowns and len(u) - s equations: row k states
    u(k+s) = sum_j w_j u(k+j). The series is scaled to unit max-abs first so
    decaying trajectories do not underflow the regression; the weights are
    invariant under that scaling.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if s < 1:
        raise ValueError("delay count s must be at least 1")
    if u.shape[0] < 2 * s:
        raise ValueError(f"need at least 2s = {2 * s} observations, got {u.shape[0]}")
    scale = float(np.max(np.abs(u)))
    if scale == 0.0:
        return CompanionModel(s=s, weights=np.zeros(s), residual=0.0, scale=1.0)
    scaled = u / scale
    rows = u.shape[0] - s
    design = np.empty((rows, s))
    for j in range(s):
        design[:, j] = scaled[j : j + rows]
    target = scaled[s : s + rows]
    weights, _, residual = lstsq_min_norm(design, target, svd_tol)
    return CompanionModel(s=s, weights=weights, residual=residual * scale, scale=scale)


def exact_companion(sys: LinearSystem) -> CompanionModel:
    """Companion weights w_i = -alpha_i from the characteristic polynomial of A.

    The coefficients come from the Faddeev-LeVerrier recurrence, which is
    exact in exact arithmetic; tests cross-check against the expanded
    product of the computed eigenvalues.
    """
    n = sys.n
    a = sys.a
    # Faddeev-LeVerrier: M_1 = I, c_{n-k} = -tr(A M_k)/k, M_{k+1} = A M_k + c_{n-k} I.
    coeffs = np.empty(n + 1)
    coeffs[n] = 1.0
    m = np.eye(n)
    for k in range(1, n + 1):
        am = a @ m
        coeffs[n - k] = -np.trace(am) / k
        m = am + coeffs[n - k] * np.eye(n)
    return CompanionModel(s=n, weights=-coeffs[:n], residual=0.0, scale=1.0)


def predict(model: CompanionModel, window: np.ndarray, steps: int) -> np.ndarray:
    """Iterate the companion recurrence from a seed window of s values.

    Returns the window followed by ``steps`` predicted values.
    """
    window = np.asarray(window, dtype=float).reshape(-1)
    if window.shape[0] != model.s:
        raise ValueError(f"window must hold s = {model.s} values, got {window.shape[0]}")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    out = np.empty(model.s + steps)
    out[: model.s] = window
    for k in range(steps):
        out[model.s + k] = model.weights @ out[k : k + model.s]
    return out


def recover_hidden_state(
    sys: LinearSystem,
    vertex: int,
    window: np.ndarray,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray:
    """Reconstruct the hidden block v(k) from n consecutive local values.

    Solves R v(k) = b(k), where row r of b(k) subtracts from u(k+r) the
    contributions that reach the observed vertex through its own past:
    b_r = u(k+r) - a11 u(k+r-1) - sum_{l=0}^{r-2} (a12^T A22^l a21) u(k+r-2-l).
    The returned components keep the original vertex order with ``vertex``
    removed. Raises :class:`NotLocalizableError` when R is numerically
    singular at ``rel_tol``.
    """
    n = sys.n
    if n < 2:
        raise ValueError("hidden-state recovery needs n >= 2")
    window = np.asarray(window, dtype=float).reshape(-1)
    if window.shape[0] != n:
        raise ValueError(f"window must hold n = {n} values, got {window.shape[0]}")
    a = permute_vertex_first(sys, vertex).a
    a11 = a[0, 0]
    a12 = a[0, 1:]
    a21 = a[1:, 0]
    a22 = a[1:, 1:]

    r_rows = np.empty((n - 1, n - 1))
    r_rows[0] = a12
    for l in range(1, n - 1):
        r_rows[l] = r_rows[l - 1] @ a22
    feedthrough = r_rows @ a21  # entry l is a12^T A22^l a21

    u, sigma, vh = np.linalg.svd(r_rows)
    rank = numeric_rank(sigma, rel_tol)
    if rank < n - 1:
        raise NotLocalizableError(
            f"system is not localizable in vertex {vertex} at rel_tol {rel_tol:g} "
            f"(numeric rank {rank} of {n - 1})",
            singular_values=sigma,
        )

    b = np.empty(n - 1)
    for r in range(1, n):
        acc = window[r] - a11 * window[r - 1]
        for l in range(r - 1):
            acc -= feedthrough[l] * window[r - 2 - l]
        b[r - 1] = acc
    return vh.T @ ((u.T @ b) / sigma)
