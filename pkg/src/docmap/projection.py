"""Exact t-SNE: perplexity-calibrated affinities and KL gradient descent."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericError, ParseError

log = logging.getLogger(__name__)

P_FLOOR = 1e-12
Q_FLOOR = 1e-12
ENTROPY_TOL = 1e-5
MAX_BISECTIONS = 50

EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
MOMENTUM_SWITCH = 250
WATCHDOG_EVERY = 50


@dataclass
class Affinities:
    P: np.ndarray
    perplexity: float
    betas: np.ndarray

    @property
    def n(self):
        return self.P.shape[0]


@dataclass
class Projection:
    coords: np.ndarray
    final_kl: float
    iterations: int
    seed: int
    initial_kl: float = math.nan


def pairwise_sq_dists(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ContractError("need an n x d matrix with n >= 2")
    if not np.all(np.isfinite(X)):
        raise ContractError("input contains non-finite values")
    return _sq_dists(X)


def _sq_dists(X):
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    # Values at round-off level of the norms are true zeros.
    D[D <= 1e-12 * (sq[:, None] + sq[None, :])] = 0.0
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


def _row_entropy(d, beta):
    """Entropy (bits) and conditional distribution for one row of distances."""
    w = np.exp(-beta * d)
    s = w.sum()
    p = w / s
    H = (math.log(s) + beta * float(d @ p)) / math.log(2)
    return H, p


def calibrate_affinities(D, perplexity) -> Affinities:
    """Binary-search per-point precisions to hit ``perplexity``, then symmetrize."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if D.shape != (n, n):
        raise ContractError("distance matrix must be square")
    if not 1.0 < perplexity < n:
        raise ContractError(f"perplexity must satisfy 1 < perplexity < n={n}, got {perplexity}")
    target = math.log2(perplexity)
    cond = np.zeros((n, n))
    betas = np.empty(n)
    unconverged = 0
    for i in range(n):
        d = np.delete(D[i], i)
        d = d - d.min()
        scale = d.mean()
        beta = 1.0 / scale if scale > 0 else 1.0
        lo, hi = 0.0, math.inf
        H, p = _row_entropy(d, beta)
        for _ in range(MAX_BISECTIONS):
            if abs(H - target) < ENTROPY_TOL:
                break
            if H > target:
                lo = beta
                beta = beta * 2.0 if hi == math.inf else 0.5 * (beta + hi)
            else:
                hi = beta
                beta = 0.5 * (beta + lo)
            H, p = _row_entropy(d, beta)
        else:
            if abs(H - target) >= ENTROPY_TOL:
                unconverged += 1
        betas[i] = beta
        cond[i, np.arange(n) != i] = p
    if unconverged:
        log.debug("perplexity search did not converge for %d point(s)", unconverged)
    P = (cond + cond.T) / (2.0 * n)
    off = ~np.eye(n, dtype=bool)
    small = off & (P < P_FLOOR)
    P[small] = P_FLOOR
    big = off & ~small
    # Rescale entries above the floor so the total stays exactly 1.
    P[big] *= (1.0 - small.sum() * P_FLOOR) / P[big].sum()
    np.fill_diagonal(P, 0.0)
    return Affinities(P, float(perplexity), betas)


def _student_t(Y):
    num = 1.0 / (1.0 + _sq_dists(Y))
    np.fill_diagonal(num, 0.0)
    return num


def _p_matrix(P):
    return P.P if isinstance(P, Affinities) else np.asarray(P, dtype=float)


def kl_divergence(P, coords) -> float:
    """KL(P || Q) with Student-t Q over ``coords``; Q floored at 1e-12."""
    P = _p_matrix(P)
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or P.shape != (coords.shape[0], coords.shape[0]):
        raise ContractError(f"shape mismatch: P {P.shape} vs coords {coords.shape}")
    num = _student_t(coords)
    Q = np.maximum(num / num.sum(), Q_FLOOR)
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def kl_gradient(P, coords):
    """Analytic gradient of :func:`kl_divergence` with respect to ``coords``."""
    P = _p_matrix(P)
    Y = np.asarray(coords, dtype=float)
    num = _student_t(Y)
    Q = num / num.sum()
    W = (P - Q) * num
    return 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)


def _step(P, Y, update, gains, it, learning_rate):
    """One momentum step with adaptive per-coordinate gains."""
    exaggerate = it < EXAGGERATION_ITERS
    momentum = 0.5 if it < MOMENTUM_SWITCH else 0.8
    grad = kl_gradient(P * EXAGGERATION if exaggerate else P, Y)
    same_sign = (grad > 0) == (update > 0)
    gains = np.where(same_sign, gains * 0.8, gains + 0.2)
    np.maximum(gains, 0.01, out=gains)
    update = momentum * update - learning_rate * gains * grad
    Y = Y + update
    Y -= Y.mean(axis=0)
    return Y, update, gains, grad


def tsne(X, perplexity=30.0, iterations=1000, learning_rate=200.0, seed=0) -> Projection:
    """Embed the rows of ``X`` in 2-D."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ContractError("X must be a 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise ContractError("input contains non-finite values")
    if iterations < 1 or learning_rate <= 0:
        raise ContractError("iterations and learning_rate must be positive")
    n = X.shape[0]
    aff = calibrate_affinities(pairwise_sq_dists(X), perplexity)
    P = aff.P

    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    initial_kl = kl_divergence(P, Y)
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    for it in range(iterations):
        with np.errstate(all="ignore"):
            Y, update, gains, grad = _step(P, Y, update, gains, it, learning_rate)
        if (it + 1) % WATCHDOG_EVERY == 0 or it == iterations - 1:
            if not np.all(np.isfinite(Y)):
                raise NumericError(
                    f"t-SNE diverged at iteration {it + 1}: "
                    f"max |gradient| = {float(np.max(np.abs(np.nan_to_num(grad, nan=np.inf))))}"
                )
    Y -= Y.mean(axis=0)
    return Projection(Y, kl_divergence(P, Y), iterations, seed, initial_kl)


def write_projection(ids, coords, path, clusters=None):
    with open(path, "w", encoding="utf-8") as fh:
        for i, doc_id in enumerate(ids):
            row = f"{doc_id}\t{coords[i, 0]:.9g}\t{coords[i, 1]:.9g}"
            if clusters is not None:
                c = clusters[i]
                row += "\t" + ("-" if c is None or c < 0 else str(int(c)))
            fh.write(row + "\n")


def read_projection(path):
    """Return (ids, coords, clusters-or-None); unassigned is -1."""
    ids, rows, clusters = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) not in (3, 4):
                raise ParseError(f"{path}: line {lineno}: expected 3 or 4 columns")
            ids.append(parts[0])
            rows.append((float(parts[1]), float(parts[2])))
            if len(parts) == 4:
                clusters.append(-1 if parts[3] == "-" else int(parts[3]))
    coords = np.array(rows, dtype=float).reshape(-1, 2)
    return ids, coords, (np.array(clusters, dtype=int) if clusters else None)
