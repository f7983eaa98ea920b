"""PCA and exact t-SNE, enough to reproduce the square-dataset experiment.

t-SNE here is the plain O(n^2)-per-iteration algorithm: no Barnes-Hut, so
whatever artefacts the layout shows come from the method itself and not
from an approximation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numba
import numpy as np

from .data import DistanceProvider, Layout, as_distance_provider
from .errors import CalibrationFailed, DegenerateCovariance, PerplexityTooLarge

_LN2 = math.log(2.0)
# bisection runs over log(beta * mean squared distance of the row)
_LOG_BETA_SPAN = 60.0


def pca_project(ps, out_dims: int = 2):
    """Project onto the leading principal axes of the covariance.

    Each axis is oriented so its largest-magnitude loading is positive,
    which makes the output independent of the eigensolver's sign choice.
    Returns a :class:`Layout` for ``out_dims == 2`` and a plain array
    otherwise.
    """
    X = np.asarray(getattr(ps, "points", ps), dtype=float)
    n, d = X.shape
    if n < 2:
        raise ValueError("PCA needs at least 2 points")
    if d < out_dims:
        raise ValueError(f"cannot project {d}-dimensional data onto {out_dims} axes")
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    top = np.argsort(-evals, kind="stable")[:out_dims]
    axes = evecs[:, top]
    lead = np.argmax(np.abs(axes), axis=0)
    axes = axes * np.where(axes[lead, np.arange(out_dims)] < 0, -1.0, 1.0)
    if evals[top[-1]] <= 1e-12 * max(evals.max(), 0.0) or evals[top[-1]] <= 0:
        warnings.warn(
            f"covariance has rank below {out_dims}; trailing layout axes carry no variance",
            DegenerateCovariance,
            stacklevel=2,
        )
    Y = Xc @ axes
    return Layout(Y) if out_dims == 2 else Y


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    momentum: float = 0.5
    final_momentum: float = 0.8
    momentum_switch: int = 250
    min_gain: float = 0.01
    init_std: float = 1e-4
    seed: int | None = None

    def __post_init__(self):
        for name in ("perplexity", "learning_rate", "early_exaggeration", "init_std"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")

    def to_dict(self):
        return asdict(self)


def _row_entropy(d2, beta):
    """Shannon entropy in bits of exp(-beta d2) per row, plus the row distribution."""
    shifted = d2 - d2.min(axis=1, keepdims=True)
    w = np.exp(-beta[:, None] * shifted)
    z = w.sum(axis=1)
    h = (np.log(z) + beta * np.sum(w * shifted, axis=1) / z) / _LN2
    return h, w / z[:, None]


def calibrate_rows(d2, perplexity, *, tol=1e-5, max_steps=200):
    """Per-row Gaussian precisions matching a target perplexity.

    Parameters
    ----------
    d2 : (m, k) ndarray
        Squared distances from each point to its k candidate neighbours
        (self excluded).

    Returns
    -------
    beta : (m,) ndarray
        Precision multiplying ``d2`` in ``exp(-beta d2)``.
    cond : (m, k) ndarray
        Conditional neighbour distributions, rows summing to 1.
    failed : (m,) bool ndarray
        Rows whose entropy never came within ``tol`` of ``log2(perplexity)``;
        their precision is left at the search bound.
    """
    d2 = np.asarray(d2, dtype=float)
    m = d2.shape[0]
    target = math.log2(perplexity)
    scale = d2.mean(axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    lo = np.full(m, -_LOG_BETA_SPAN)
    hi = np.full(m, _LOG_BETA_SPAN)
    t = np.zeros(m)
    beta = np.exp(t) / scale
    cond = np.empty_like(d2)
    done = np.zeros(m, dtype=bool)
    active = np.arange(m)
    for _ in range(max_steps):
        h, p = _row_entropy(d2[active], beta[active])
        cond[active] = p
        ok = np.abs(h - target) <= tol
        done[active[ok]] = True
        keep = ~ok
        active, h = active[keep], h[keep]
        if active.size == 0:
            break
        # entropy falls as beta grows
        up = h > target
        lo[active[up]] = t[active[up]]
        hi[active[~up]] = t[active[~up]]
        t[active] = 0.5 * (lo[active] + hi[active])
        beta[active] = np.exp(t[active]) / scale[active]
    failed = ~done
    if failed.any():
        warnings.warn(
            f"perplexity calibration did not converge for {int(failed.sum())} row(s)",
            CalibrationFailed,
            stacklevel=2,
        )
    return beta, cond, failed


def perplexity_calibrate(dist_row, perplexity, *, tol=1e-5) -> float:
    """Gaussian precision for one point given its distances to the others."""
    row = np.asarray(dist_row, dtype=float)
    if row.ndim != 1 or row.size < 2:
        raise ValueError("need a 1-D row of at least 2 distances")
    beta, _, _ = calibrate_rows((row**2)[None, :], perplexity, tol=tol)
    return float(beta[0])


def _squared_distances(data) -> np.ndarray:
    dist = as_distance_provider(data)
    return dist.matrix() ** 2


def joint_probabilities(data, perplexity, *, tol=1e-5) -> np.ndarray:
    """Symmetrised t-SNE input affinities; the matrix sums to 1."""
    d2 = _squared_distances(data)
    n = len(d2)
    off = ~np.eye(n, dtype=bool)
    _, cond, _ = calibrate_rows(d2[off].reshape(n, n - 1), perplexity, tol=tol)
    P = np.zeros((n, n))
    P[off] = cond.ravel()
    return (P + P.T) / (2.0 * n)


def student_t_affinities(Y):
    """Low-dimensional similarities ``q_ij`` and the unnormalised kernel."""
    Y = np.asarray(Y, dtype=float)
    num = np.zeros((len(Y), len(Y)))
    for k in range(Y.shape[1]):
        diff = Y[:, k, None] - Y[None, :, k]
        num += diff * diff
    num += 1.0
    np.reciprocal(num, out=num)
    np.fill_diagonal(num, 0.0)
    return num / num.sum(), num


@numba.njit(cache=True)
def _kl_terms(P, Y, exaggeration, want_kl):
    """Fused pass over all pairs i < j: gradient and optionally KL(P || Q).

    The gradient uses ``exaggeration * P``; the KL uses plain ``P``.
    """
    n, dims = Y.shape
    z = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for k in range(dims):
                diff = Y[i, k] - Y[j, k]
                d2 += diff * diff
            z += 2.0 / (1.0 + d2)
    grad = np.zeros((n, dims))
    kl = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for k in range(dims):
                diff = Y[i, k] - Y[j, k]
                d2 += diff * diff
            q = 1.0 / (1.0 + d2)
            w = (exaggeration * P[i, j] - q / z) * q
            for k in range(dims):
                g = w * (Y[i, k] - Y[j, k])
                grad[i, k] += g
                grad[j, k] -= g
            if want_kl and P[i, j] > 0.0:
                kl += 2.0 * P[i, j] * np.log(P[i, j] * z / q)
    for i in range(n):
        for k in range(dims):
            grad[i, k] *= 4.0
    return grad, kl


def kl_divergence(P, Y) -> float:
    P = np.asarray(P, dtype=float)
    Q, _ = student_t_affinities(Y)
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def kl_gradient(P, Y) -> np.ndarray:
    """Gradient of KL(P || Q) with respect to the embedding ``Y``.

    ``dC/dy_i = 4 sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2)``
    """
    grad, _ = _kl_terms(np.ascontiguousarray(P, dtype=float), np.ascontiguousarray(Y, dtype=float), 1.0, False)
    return grad


class TsneRun:
    """Embedding plus the KL trace recorded during optimisation."""

    def __init__(self, embedding, kl_history):
        self.embedding = embedding
        self.kl_history = kl_history


def tsne_embed(P, cfg: TsneConfig, *, record_kl=False) -> TsneRun:
    """Gradient descent with momentum and per-coordinate gains on KL(P || Q).

    The recorded KL is always against the unexaggerated ``P``; during early
    exaggeration the step itself follows the exaggerated target.
    """
    n = len(P)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    Y = rng.standard_normal((n, 2)) * cfg.init_std
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    P = np.ascontiguousarray(P, dtype=float)
    history = []
    for it in range(cfg.iterations):
        exaggeration = cfg.early_exaggeration if it < cfg.exaggeration_iters else 1.0
        grad, _ = _kl_terms(P, Y, exaggeration, False)
        momentum = cfg.momentum if it < cfg.momentum_switch else cfg.final_momentum
        same = (grad > 0) == (update > 0)
        gains = np.where(same, gains * 0.8, gains + 0.2)
        np.maximum(gains, cfg.min_gain, out=gains)
        update = momentum * update - cfg.learning_rate * gains * grad
        Y = Y + update
        Y = Y - Y.mean(axis=0)
        if record_kl:
            history.append(_kl_terms(P, Y, 1.0, True)[1])
    return TsneRun(Y, history)


def tsne_project(data, cfg: TsneConfig | None = None, *, record_kl=False):
    """Exact t-SNE layout of a point set or distance matrix.

    Parameters
    ----------
    data : PointSet, (n, d) array or DistanceProvider
    cfg : TsneConfig
        Defaults to perplexity 30, 1000 iterations, learning rate 200 and
        early exaggeration 12 for the first 250 iterations.
    record_kl : bool
        Also return the per-iteration KL divergence (slower).

    Returns
    -------
    Layout, or ``(Layout, list of float)`` when ``record_kl`` is set.

    Raises
    ------
    PerplexityTooLarge
        ``perplexity >= (n - 1) / 3``.
    """
    cfg = cfg or TsneConfig()
    dist = data if isinstance(data, DistanceProvider) else as_distance_provider(data)
    n = dist.n
    if n < 10:
        raise ValueError(f"t-SNE needs at least 10 points, got {n}")
    if not cfg.perplexity < (n - 1) / 3:
        raise PerplexityTooLarge(
            f"perplexity {cfg.perplexity} too large for {n} points (must be below {(n - 1) / 3:.2f})"
        )
    P = joint_probabilities(dist, cfg.perplexity)
    run = tsne_embed(P, cfg, record_kl=record_kl)
    layout = Layout(run.embedding)
    return (layout, run.kl_history) if record_kl else layout
