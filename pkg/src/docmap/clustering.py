"""Gaussian mixture clustering of the 2-D map, fit by EM."""

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, NumericError

log = logging.getLogger(__name__)

UNASSIGNED = -1
DEFAULT_THRESHOLD = 0.6
REG_COVAR = 1e-6
TOL = 1e-6
MAX_ITER = 200
N_RESTARTS = 5
KMEANS_STEPS = 10


class DegenerateDataError(NumericError):
    pass


@dataclass
class ClusterModel:
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    log_likelihood: float
    posteriors: np.ndarray
    assignments: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    history: list = field(default_factory=list)
    n_iter: int = 0

    @property
    def K(self):
        return len(self.weights)

    def to_json(self):
        return {
            "K": self.K,
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "covariances": self.covariances.tolist(),
            "log_likelihood": self.log_likelihood,
            "threshold": self.threshold,
            "iterations": self.n_iter,
        }


def _logsumexp(a, axis):
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    return np.squeeze(s, axis=axis)


def log_gaussian(X, mean, cov):
    d = X.shape[1]
    L = np.linalg.cholesky(cov)
    sol = np.linalg.solve(L, (X - mean).T)
    maha = np.sum(sol * sol, axis=0)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return -0.5 * (d * math.log(2.0 * math.pi) + logdet + maha)


def _e_step(X, weights, means, covs):
    with np.errstate(divide="ignore"):
        logw = np.log(weights)
    log_joint = np.column_stack(
        [logw[k] + log_gaussian(X, means[k], covs[k]) for k in range(len(weights))]
    )
    log_norm = _logsumexp(log_joint, axis=1)
    resp = np.exp(log_joint - log_norm[:, None])
    return resp, float(log_norm.sum())


def _m_step(X, resp):
    n, d = X.shape
    nk = resp.sum(axis=0) + 10 * np.finfo(float).eps
    weights = nk / nk.sum()
    means = (resp.T @ X) / nk[:, None]
    covs = np.empty((len(nk), d, d))
    for k in range(len(nk)):
        diff = X - means[k]
        covs[k] = (resp[:, k, None] * diff).T @ diff / nk[k]
        covs[k] = 0.5 * (covs[k] + covs[k].T)
        covs[k].flat[:: d + 1] += REG_COVAR
    return weights, means, covs


def _kmeans_pp(X, K, rng):
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, K):
        total = d2.sum()
        idx = rng.integers(n) if total == 0 else rng.choice(n, p=d2 / total)
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    centers = np.array(centers)
    for _ in range(KMEANS_STEPS):
        labels = np.argmin(((X[:, None, :] - centers[None]) ** 2).sum(-1), axis=1)
        for k in range(K):
            members = X[labels == k]
            if len(members):
                centers[k] = members.mean(axis=0)
    labels = np.argmin(((X[:, None, :] - centers[None]) ** 2).sum(-1), axis=1)
    return labels


def _fit_once(X, K, rng):
    labels = _kmeans_pp(X, K, rng)
    resp = np.zeros((X.shape[0], K))
    resp[np.arange(X.shape[0]), labels] = 1.0
    params = _m_step(X, resp)
    resp, ll = _e_step(X, *params)
    history = [ll]
    n_iter = 0
    for n_iter in range(1, MAX_ITER + 1):
        params = _m_step(X, resp)
        resp, new_ll = _e_step(X, *params)
        history.append(new_ll)
        converged = (new_ll - ll) / X.shape[0] < TOL
        ll = new_ll
        if converged:
            break
    return params, resp, ll, history, n_iter


def fit_gmm(coords, K, seed=0, threshold=DEFAULT_THRESHOLD, restarts=N_RESTARTS) -> ClusterModel:
    """Full-covariance GMM by EM; best of ``restarts`` k-means++ seeded runs."""
    X = np.asarray(coords, dtype=float)
    if X.ndim != 2:
        raise ContractError("coords must be an n x d matrix")
    n = X.shape[0]
    if K < 1 or K > n:
        raise ContractError(f"need 1 <= K <= n, got K={K}, n={n}")
    if not np.all(np.isfinite(X)):
        raise ContractError("coords contain non-finite values")
    if K > 1 and np.all(X == X[0]):
        raise DegenerateDataError("all points identical; cannot fit more than one component")
    best = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        result = _fit_once(X, K, np.random.default_rng(child))
        if not math.isfinite(result[2]):
            continue
        if best is None or result[2] > best[2]:
            best = result
    if best is None:
        raise NumericError("EM produced a non-finite log-likelihood in every restart")
    (weights, means, covs), resp, ll, history, n_iter = best
    return ClusterModel(
        weights=weights,
        means=means,
        covariances=covs,
        log_likelihood=ll,
        posteriors=resp,
        assignments=assign(resp, threshold),
        threshold=threshold,
        history=history,
        n_iter=n_iter,
    )


def posteriors(model, coords):
    resp, _ = _e_step(np.asarray(coords, dtype=float), model.weights, model.means,
                      model.covariances)
    return resp


def assign(posteriors, threshold=DEFAULT_THRESHOLD):
    """Most likely component, or UNASSIGNED when its posterior is <= threshold."""
    post = np.asarray(posteriors, dtype=float)
    best = np.argmax(post, axis=1)
    top = post[np.arange(len(post)), best]
    return np.where(top > threshold, best, UNASSIGNED)


def silhouette_values(coords, labels):
    """Silhouette of each labelled point; NaN for unassigned points."""
    X = np.asarray(coords, dtype=float)
    labels = np.asarray(labels)
    out = np.full(len(X), np.nan)
    idx = np.flatnonzero(labels != UNASSIGNED)
    clusters = np.unique(labels[idx])
    if len(clusters) < 2:
        raise ContractError("silhouette needs at least 2 non-empty clusters")
    sub = X[idx]
    dist = np.sqrt(np.maximum(
        np.sum(sub ** 2, 1)[:, None] + np.sum(sub ** 2, 1)[None] - 2 * sub @ sub.T, 0.0))
    np.fill_diagonal(dist, 0.0)
    sub_labels = labels[idx]
    masks = {c: sub_labels == c for c in clusters}
    for row, i in enumerate(idx):
        own = masks[sub_labels[row]]
        size = own.sum()
        if size == 1:
            out[i] = 0.0
            continue
        a = dist[row, own].sum() / (size - 1)
        b = min(dist[row, masks[c]].mean() for c in clusters if c != sub_labels[row])
        denom = max(a, b)
        out[i] = 0.0 if denom == 0 else (b - a) / denom
    return out


def silhouette_exemplars(coords, assignments, top_m=3, ids=None):
    """Top ``top_m`` documents per cluster by silhouette, best first."""
    labels = np.asarray(assignments)
    if ids is None:
        ids = [str(i) for i in range(len(labels))]
    sil = silhouette_values(coords, labels)
    out = {}
    for c in sorted(set(labels[labels != UNASSIGNED].tolist())):
        members = np.flatnonzero(labels == c)
        # stable sort keeps document order among ties
        ranked = sorted(members, key=lambda i: -sil[i])
        out[int(c)] = [(ids[i], float(sil[i])) for i in ranked[:top_m]]
    return out


def write_exemplars(exemplars, path):
    payload = {
        str(c): [{"id": doc_id, "silhouette": round(s, 12)} for doc_id, s in rows]
        for c, rows in exemplars.items()
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def write_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json(), fh, indent=2)
        fh.write("\n")


def read_model_means(path):
    with open(path, encoding="utf-8") as fh:
        return np.array(json.load(fh)["means"], dtype=float)
